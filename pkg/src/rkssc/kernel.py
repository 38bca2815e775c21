"""Kernel evaluation, Gram matrices and centering in feature space.

Samples are stored one per column (``X`` has shape ``(D, N)``). Centering
follows the double-centering ``K = (I - E) Kc (I - E)`` with ``E = 11^T / N``;
the feature map itself is never formed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FAMILIES = ("linear", "polynomial", "gaussian")


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family and its parameters.

    Parameters
    ----------
    family : {"linear", "polynomial", "gaussian"}
    b : float
        Offset of the polynomial kernel ``(<x, y> + b) ** degree``.
    degree : int
        Degree of the polynomial kernel.
    sigma2 : float
        Width of the Gaussian kernel ``exp(-||x - y||^2 / (2 sigma2))``.
    """

    family: str = "linear"
    b: float = 0.0
    degree: int = 1
    sigma2: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}")
        if self.family == "polynomial":
            if int(self.degree) != self.degree or self.degree < 1:
                raise ValueError("polynomial degree must be a positive integer")
            if self.b < 0:
                raise ValueError("polynomial offset b must be >= 0")
        if self.family == "gaussian" and not self.sigma2 > 0:
            raise ValueError("gaussian sigma2 must be > 0")

    @classmethod
    def linear(cls):
        return cls("linear")

    @classmethod
    def polynomial(cls, b=0.0, degree=2):
        return cls("polynomial", b=float(b), degree=int(degree))

    @classmethod
    def gaussian(cls, sigma2=1.0):
        return cls("gaussian", sigma2=float(sigma2))

    def to_dict(self):
        return {"family": self.family, "b": self.b, "degree": self.degree,
                "sigma2": self.sigma2}

    @classmethod
    def from_dict(cls, d):
        return cls(d["family"], b=float(d.get("b", 0.0)),
                   degree=int(d.get("degree", 1)),
                   sigma2=float(d.get("sigma2", 1.0)))


def _cross(spec: KernelSpec, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    # A: (D, n), B: (D, m) -> (n, m) kernel block
    inner = A.T @ B
    if spec.family == "linear":
        return inner
    if spec.family == "polynomial":
        return (inner + spec.b) ** spec.degree
    sq = (A * A).sum(axis=0)[:, None] + (B * B).sum(axis=0)[None, :] - 2.0 * inner
    np.maximum(sq, 0.0, out=sq)
    return np.exp(-sq / (2.0 * spec.sigma2))


def eval_kernel(spec: KernelSpec, xi, xj) -> float:
    """Evaluate the kernel on a pair of vectors."""
    xi = np.asarray(xi, dtype=float).ravel()
    xj = np.asarray(xj, dtype=float).ravel()
    if xi.shape != xj.shape:
        raise ValueError(f"dimension mismatch: {xi.size} vs {xj.size}")
    if spec.family == "linear":
        return float(xi @ xj)
    if spec.family == "polynomial":
        return float((xi @ xj + spec.b) ** spec.degree)
    d = xi - xj
    return float(np.exp(-(d @ d) / (2.0 * spec.sigma2)))


def gram(spec: KernelSpec, X) -> np.ndarray:
    """Uncentered Gram matrix of the columns of ``X``.

    The result is symmetrized as ``(M + M.T) / 2`` so that it is exactly
    symmetric.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.size == 0:
        raise ValueError("X must be a non-empty (D, N) matrix")
    if X.shape[1] < 2:
        raise ValueError("need at least two samples")
    M = _cross(spec, X, X)
    return (M + M.T) / 2.0


def center_gram(kappa) -> np.ndarray:
    """Double-center a Gram matrix: ``(I - E) kappa (I - E)``."""
    kappa = np.asarray(kappa, dtype=float)
    if kappa.ndim != 2 or kappa.shape[0] != kappa.shape[1]:
        raise ValueError("Gram matrix must be square")
    # two one-sided passes; cancels better than subtracting the grand mean
    K = kappa - kappa.mean(axis=0)[None, :]
    K = K - K.mean(axis=1)[:, None]
    return (K + K.T) / 2.0


def kernel_vector(spec: KernelSpec, X, x) -> np.ndarray:
    """Empirical kernel map of ``x`` against the training columns of ``X``."""
    X = np.asarray(X, dtype=float)
    x = np.asarray(x, dtype=float).ravel()
    if x.size != X.shape[0]:
        raise ValueError(f"dimension mismatch: x has {x.size} entries, data has {X.shape[0]}")
    return _cross(spec, X, x[:, None])[:, 0]


def kernel_matrix(spec: KernelSpec, X, Xnew) -> np.ndarray:
    """Uncentered kernel vectors of every column of ``Xnew``, shape ``(N, M)``."""
    X = np.asarray(X, dtype=float)
    Xnew = np.asarray(Xnew, dtype=float)
    if Xnew.ndim == 1:
        Xnew = Xnew[:, None]
    if Xnew.shape[0] != X.shape[0]:
        raise ValueError(f"dimension mismatch: {Xnew.shape[0]} vs {X.shape[0]}")
    return _cross(spec, X, Xnew)


def center_kernel_vector(kappa, kv) -> np.ndarray:
    """Center an out-of-sample kernel vector against the training Gram matrix.

    Computes ``(I - E) (kv - kappa 1 / N)``. ``kv`` may also be an ``(N, M)``
    stack of kernel vectors, one per column.
    """
    kappa = np.asarray(kappa, dtype=float)
    return center_with_means(kappa.mean(axis=1), kv)


def center_with_means(col_means, kv) -> np.ndarray:
    """Same as :func:`center_kernel_vector`, given ``kappa 1 / N`` only."""
    col_means = np.asarray(col_means, dtype=float)
    kv = np.asarray(kv, dtype=float)
    if kv.shape[0] != col_means.shape[0]:
        raise ValueError(f"length mismatch: kernel vector {kv.shape[0]}, Gram {col_means.shape[0]}")
    v = kv - (col_means if kv.ndim == 1 else col_means[:, None])
    return v - v.mean(axis=0)
