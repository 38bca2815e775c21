"""
Clustering points from a union of subspaces
===========================================

Three random planes in R^30, 50 points on each. We cluster them with
a linear kernel, score the partition and label fresh points.
"""

import numpy as np

from rkssc import KernelSpec, evaluate, run_pipeline
from rkssc.data import gen_union_subspaces, stratified_split

ds = gen_union_subspaces(D=30, c=3, dim=2, n_per_cluster=70, seed=0)
train, test = stratified_split(ds.labels, n_in=50, n_out=20, seed=0)
print("data", ds.X.shape, "train", train.size, "test", test.size)

# frobenius mode suits clean data; lambda weighs the fit against sparsity
fit = run_pipeline(ds.X[:, train], 3, mode="frobenius", kernel=KernelSpec.linear(), lam=10.0)
print("in-sample  ", evaluate(ds.labels[train], fit.labels))

# the coefficient matrix is block diagonal up to a permutation
C = np.abs(fit.result.C)
same = ds.labels[train][:, None] == ds.labels[train][None, :]
print("share of |C| mass inside the true blocks: %.4f" % (C[same].sum() / C.sum()))

# new points are embedded with the stored kernel model and given the
# label of the nearest fitted subspace
pred = fit.predict(ds.X[:, test])
print("out-of-sample", evaluate(ds.labels[test], pred))
