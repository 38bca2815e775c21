"""Sparse subspace clustering in kernel coordinates, with an optional l1 data term.

Data are mapped to explicit coordinates in the empirical feature space of a
kernel (the nonlinear projection trick), then clustered by sparse
self-representation with either an l1 (robust) or squared-Frobenius error
term, followed by spectral clustering. New points are assigned by their
distance to per-cluster subspaces.
"""

__version__ = "0.1.0"

from rkssc.kernel import (
    KernelSpec,
    center_gram,
    center_kernel_vector,
    eval_kernel,
    gram,
    kernel_vector,
)
from rkssc.npt import NptModel, RankPolicy, fit_npt, project
from rkssc.solver import (
    SelfRepresentation,
    SolverOptions,
    effective_lambda,
    soft_threshold,
    solve_frobenius_ssc,
    solve_robust_ssc,
)
from rkssc.spectral import (
    ClusterResult,
    affinity,
    cluster,
    kmeans,
    laplacian,
    spectral_embed,
)
from rkssc.oos import ClusterModel, assign, fit_subspaces, oos_pipeline
from rkssc.metrics import (
    MetricsReport,
    accuracy,
    evaluate,
    nmi,
    pairwise_f1,
    wilcoxon_ranksum,
)
from rkssc.pipeline import PipelineResult, run_pipeline

__all__ = [
    "KernelSpec", "center_gram", "center_kernel_vector", "eval_kernel", "gram",
    "kernel_vector", "NptModel", "RankPolicy", "fit_npt", "project",
    "SelfRepresentation", "SolverOptions", "effective_lambda", "soft_threshold",
    "solve_frobenius_ssc", "solve_robust_ssc", "ClusterResult", "affinity",
    "cluster", "kmeans", "laplacian", "spectral_embed", "ClusterModel", "assign",
    "fit_subspaces", "oos_pipeline", "MetricsReport", "accuracy", "evaluate",
    "nmi", "pairwise_f1", "wilcoxon_ranksum", "PipelineResult", "run_pipeline",
]
