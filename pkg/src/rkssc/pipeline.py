"""End-to-end clustering: normalize, embed, self-represent, cluster, fit subspaces."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from rkssc.data import unit_normalize_columns
from rkssc.kernel import KernelSpec, center_gram, gram
from rkssc.npt import NptModel, RankPolicy, fit_npt
from rkssc.oos import ClusterModel, fit_subspaces
from rkssc.solver import SolverOptions
from rkssc.spectral import ClusterResult, cluster


@dataclass
class PipelineResult:
    """Fitted clustering of a training set.

    ``npt`` is ``None`` when clustering ran directly on the (normalized)
    input columns instead of kernel coordinates.
    """

    labels: np.ndarray
    Y: np.ndarray
    result: ClusterResult
    npt: NptModel | None
    subspaces: ClusterModel
    normalize: bool = True
    timings: dict = field(default_factory=dict)

    def embed(self, Xnew):
        Xnew = np.asarray(Xnew, dtype=float)
        if Xnew.ndim == 1:
            Xnew = Xnew[:, None]
        if Xnew.shape[0] != self.input_dim:
            raise ValueError(f"dimension mismatch: got {Xnew.shape[0]}, trained on {self.input_dim}")
        if self.normalize:
            Xnew = unit_normalize_columns(Xnew)
        return Xnew if self.npt is None else self.npt.transform(Xnew)

    @property
    def input_dim(self):
        return self.Y.shape[0] if self.npt is None else self.npt.X.shape[0]

    def predict(self, Xnew):
        """Out-of-sample labels for the columns of ``Xnew``."""
        return self.subspaces.predict(self.embed(Xnew))


def run_pipeline(X, c, *, mode="robust", kernel: KernelSpec | None = None, lam=10.0,
                 rank: RankPolicy | None = None, opts: SolverOptions | None = None,
                 seed=0, d=5, normalize=True) -> PipelineResult:
    """Cluster the columns of ``X`` into ``c`` groups.

    With ``kernel=None`` the self-representation is computed on the columns
    of ``X`` themselves (linear SSC); otherwise on the kernel coordinates.
    """
    timings = {}
    t0 = time.perf_counter()
    X = np.asarray(X, dtype=float)
    if normalize:
        X = unit_normalize_columns(X)
    npt = None
    if kernel is None:
        Y = X
    else:
        kappa = gram(kernel, X)
        K = center_gram(kappa)
        timings["gram"] = time.perf_counter() - t0
        npt = fit_npt(K, rank, col_means=kappa.mean(axis=1), X=X, spec=kernel)
        Y = npt.Y
    timings["embed"] = time.perf_counter() - t0

    t1 = time.perf_counter()
    res = cluster(Y, c, mode=mode, lam=lam, opts=opts, seed=seed)
    timings["cluster"] = time.perf_counter() - t1

    t2 = time.perf_counter()
    present = np.unique(res.labels)
    if present.size < c:
        # k-means can leave clusters empty; compact labels for subspace fitting
        remap = np.searchsorted(present, res.labels)
        sub = fit_subspaces(Y, remap, d)
        res.kmeans["empty_clusters"] = int(c - present.size)
        sub.label_values = [int(v) for v in present]
    else:
        sub = fit_subspaces(Y, res.labels, d)
    timings["subspaces"] = time.perf_counter() - t2
    return PipelineResult(labels=res.labels, Y=Y, result=res, npt=npt, subspaces=sub,
                          normalize=normalize, timings=timings)
