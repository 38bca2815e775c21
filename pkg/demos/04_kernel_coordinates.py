"""
Explicit coordinates from a kernel
==================================

Eigendecomposing the centered Gram matrix gives coordinates Y whose
inner products reproduce the kernel. With a linear kernel, Y is just a
rotation of the centered data.
"""

import numpy as np
from scipy.spatial.distance import pdist

from rkssc import KernelSpec, center_gram, fit_npt, gram, project

rng = np.random.default_rng(0)
X = rng.standard_normal((5, 40))
Xc = X - X.mean(axis=1, keepdims=True)

model = fit_npt(center_gram(gram(KernelSpec.linear(), Xc)))
print("rank", model.rank, "of", model.n_samples, "samples")
print("max distance change: %.1e" % np.abs(pdist(model.Y.T) - pdist(Xc.T)).max())

# a Gaussian kernel has full rank on distinct points, so R grows to N - 1
spec = KernelSpec.gaussian(2.0)
kappa = gram(spec, X)
gmodel = fit_npt(center_gram(kappa), col_means=kappa.mean(axis=1), X=X, spec=spec)
print("gaussian rank", gmodel.rank)

# projecting a training point lands on its own coordinates
K = center_gram(kappa)
print("projection error: %.1e" % np.abs(project(gmodel, K[:, 7]) - gmodel.Y[:, 7]).max())
print("transform error:  %.1e" % np.abs(gmodel.transform(X[:, 7])[:, 0] - gmodel.Y[:, 7]).max())
