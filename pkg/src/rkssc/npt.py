"""Explicit coordinates of centered, kernel-mapped data.

The centered Gram matrix ``K = U diag(lam) U^T`` is truncated to its
positive eigenpairs; the training coordinates are ``Y = diag(lam)^{1/2} U^T``
and a new point with centered kernel vector ``k`` lands at
``diag(lam)^{-1/2} U^T k``. Running a linear method on ``Y`` is then the
kernel method on the original data.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from rkssc.kernel import KernelSpec, center_with_means, kernel_matrix

EPS_ABS = 1e-12


class DegenerateInputError(ValueError):
    """Raised when the centered Gram matrix has no usable positive eigenvalue."""


@dataclass(frozen=True)
class RankPolicy:
    """How many eigenpairs of the centered Gram matrix to keep.

    ``mode="threshold"`` keeps every eigenvalue above
    ``max(1e-12, eps_rel * lam_1)``; ``mode="explicit"`` keeps the top ``r``,
    capped at the numerical rank.
    """

    mode: str = "threshold"
    r: int | None = None
    eps_rel: float = 1e-9

    def __post_init__(self):
        if self.mode not in ("threshold", "explicit"):
            raise ValueError(f"unknown rank mode {self.mode!r}")
        if self.mode == "explicit" and (self.r is None or self.r < 1):
            raise ValueError("explicit rank policy needs r >= 1")
        if not self.eps_rel > 0:
            raise ValueError("eps_rel must be > 0")

    @classmethod
    def explicit(cls, r):
        return cls("explicit", r=int(r))

    def to_dict(self):
        return {"mode": self.mode, "r": self.r, "eps_rel": self.eps_rel}


@dataclass
class NptModel:
    """Fitted embedding.

    Attributes
    ----------
    U : ndarray, shape (N, R)
        Retained eigenvectors of the centered Gram matrix.
    lam : ndarray, shape (R,)
        Retained eigenvalues, strictly decreasing and positive.
    Y : ndarray, shape (R, N)
        Coordinates of the training samples.
    col_means : ndarray, shape (N,)
        ``kappa 1 / N`` of the uncentered training Gram matrix, enough to
        center any new kernel vector.
    X : ndarray, shape (D, N) or None
        Training samples, needed to evaluate kernel vectors of new points.
    spec : KernelSpec or None
    diagnostics : dict
        ``numerical_rank``, ``requested_rank`` and ``rank``.
    """

    U: np.ndarray
    lam: np.ndarray
    Y: np.ndarray
    col_means: np.ndarray
    X: np.ndarray | None = None
    spec: KernelSpec | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def rank(self):
        return self.lam.shape[0]

    @property
    def n_samples(self):
        return self.U.shape[0]

    def transform(self, Xnew):
        """Coordinates of new samples (columns of ``Xnew``), shape ``(R, M)``."""
        if self.X is None or self.spec is None:
            raise ValueError("model was fitted without training data; use project()")
        kv = kernel_matrix(self.spec, self.X, Xnew)
        return project(self, center_with_means(self.col_means, kv))

    def to_dict(self):
        return {
            "U": self.U.tolist(),
            "lam": self.lam.tolist(),
            "col_means": self.col_means.tolist(),
            "X": None if self.X is None else self.X.tolist(),
            "spec": None if self.spec is None else self.spec.to_dict(),
            "diagnostics": self.diagnostics,
        }

    @classmethod
    def from_dict(cls, d):
        U = np.asarray(d["U"], dtype=float).reshape(len(d["col_means"]), -1)
        lam = np.asarray(d["lam"], dtype=float)
        X = d.get("X")
        return cls(
            U=U,
            lam=lam,
            Y=np.sqrt(lam)[:, None] * U.T,
            col_means=np.asarray(d["col_means"], dtype=float),
            X=None if X is None else np.asarray(X, dtype=float),
            spec=None if d.get("spec") is None else KernelSpec.from_dict(d["spec"]),
            diagnostics=dict(d.get("diagnostics", {})),
        )


def fit_npt(K, policy: RankPolicy | None = None, *, col_means=None, X=None,
            spec=None) -> NptModel:
    """Eigendecompose a centered Gram matrix and compute training coordinates.

    Parameters
    ----------
    K : ndarray, shape (N, N)
        Centered, symmetric Gram matrix.
    policy : RankPolicy, optional
        Defaults to relative thresholding at 1e-9.
    col_means, X, spec : optional
        Stored on the model so that new points can be embedded later.

    Raises
    ------
    DegenerateInputError
        If no eigenvalue clears the threshold.
    """
    policy = policy or RankPolicy()
    K = np.asarray(K, dtype=float)
    N = K.shape[0]
    if K.ndim != 2 or K.shape[1] != N:
        raise ValueError("K must be square")
    if policy.mode == "explicit" and policy.r > max(N - 1, 1):
        raise ValueError(f"requested rank {policy.r} exceeds N - 1 = {N - 1}")

    w, V = scipy.linalg.eigh(K)
    order = np.argsort(w)[::-1]
    w, V = w[order], V[:, order]
    thresh = max(EPS_ABS, policy.eps_rel * max(w[0], 0.0))
    numerical_rank = int(np.count_nonzero(w > thresh))
    if numerical_rank == 0:
        raise DegenerateInputError("centered Gram matrix is numerically zero")
    R = numerical_rank if policy.mode == "threshold" else min(policy.r, numerical_rank)

    U = V[:, :R]
    lam = w[:R]
    Y = np.sqrt(lam)[:, None] * U.T
    if col_means is None:
        col_means = np.zeros(N)
    diagnostics = {
        "numerical_rank": numerical_rank,
        "requested_rank": policy.r if policy.mode == "explicit" else None,
        "rank": R,
    }
    return NptModel(U=U, lam=lam, Y=Y, col_means=np.asarray(col_means, dtype=float),
                    X=None if X is None else np.asarray(X, dtype=float),
                    spec=spec, diagnostics=diagnostics)


def project(model: NptModel, kx) -> np.ndarray:
    """Coordinates of centered kernel vector(s) ``kx`` in the fitted basis.

    ``kx`` is a length-N vector or an ``(N, M)`` stack; the result has
    length R or shape ``(R, M)``.
    """
    kx = np.asarray(kx, dtype=float)
    if kx.shape[0] != model.n_samples:
        raise ValueError(f"length mismatch: got {kx.shape[0]}, model has {model.n_samples}")
    proj = model.U.T @ kx
    scale = 1.0 / np.sqrt(model.lam)
    return proj * (scale if kx.ndim == 1 else scale[:, None])
