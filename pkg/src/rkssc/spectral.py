"""Affinity, normalized Laplacian and spectral clustering of a representation."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from rkssc.solver import (SolverOptions, effective_lambda, solve_frobenius_ssc,
                          solve_robust_ssc)

N_RESTARTS = 20
MAX_KMEANS_ITER = 300


@dataclass
class ClusterResult:
    labels: np.ndarray
    laplacian_eigenvalues: np.ndarray
    kmeans: dict = field(default_factory=dict)
    solver: dict = field(default_factory=dict)
    C: np.ndarray | None = None

    def indicator(self, c=None):
        """Binary ``(N, c)`` cluster indicator matrix."""
        c = c or int(self.labels.max()) + 1
        F = np.zeros((self.labels.size, c), dtype=int)
        F[np.arange(self.labels.size), self.labels] = 1
        return F


def affinity(C) -> np.ndarray:
    """Symmetric affinity ``(|C| + |C|^T) / 2`` with a zero diagonal."""
    C = np.asarray(C, dtype=float)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise ValueError("C must be square")
    absC = np.abs(C)
    A = (absC + absC.T) / 2.0
    np.fill_diagonal(A, 0.0)
    return A


def laplacian(A) -> np.ndarray:
    """Symmetric normalized Laplacian ``I - D^{-1/2} A D^{-1/2}``.

    Isolated vertices (zero degree) get an identity row and column.
    """
    A = np.asarray(A, dtype=float)
    deg = A.sum(axis=1)
    inv_sqrt = np.zeros_like(deg)
    nz = deg > 0
    inv_sqrt[nz] = 1.0 / np.sqrt(deg[nz])
    L = np.eye(A.shape[0]) - inv_sqrt[:, None] * A * inv_sqrt[None, :]
    return (L + L.T) / 2.0


def _embed(L, c):
    w, V = scipy.linalg.eigh(L, subset_by_index=[0, c - 1])
    norms = np.linalg.norm(V, axis=1)
    nz = norms > 0
    V[nz] /= norms[nz, None]
    return V, w


def spectral_embed(L, c) -> np.ndarray:
    """Rows of the ``c`` smallest eigenvectors of ``L``, scaled to unit norm.

    Zero rows stay zero.
    """
    L = np.asarray(L, dtype=float)
    if not 1 <= c <= L.shape[0]:
        raise ValueError(f"cluster count {c} out of range for N = {L.shape[0]}")
    return _embed(L, c)[0]


def _rng(seed, stream):
    # counter-based generator keyed by (seed, stream)
    key = np.array([seed, stream], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _sq_dist(V, centers):
    d = (V * V).sum(axis=1)[:, None] - 2.0 * V @ centers.T + (centers * centers).sum(axis=1)[None, :]
    return np.maximum(d, 0.0)


def _kmeanspp(V, c, rng):
    N = V.shape[0]
    idx = [int(rng.integers(N))]
    closest = _sq_dist(V, V[idx])[:, 0]
    for _ in range(1, c):
        total = closest.sum()
        if total <= 0:
            nxt = int(rng.integers(N))
        else:
            nxt = int(np.searchsorted(np.cumsum(closest), rng.random() * total, side="right"))
            nxt = min(nxt, N - 1)
        idx.append(nxt)
        closest = np.minimum(closest, _sq_dist(V, V[[nxt]])[:, 0])
    return V[idx].copy()


def _lloyd(V, centers, max_iter):
    c = centers.shape[0]
    labels = np.full(V.shape[0], -1)
    reseeds = 0
    for it in range(max_iter):
        d = _sq_dist(V, centers)
        new = np.argmin(d, axis=1)
        dmin = d[np.arange(V.shape[0]), new]
        for k in range(c):
            if not np.any(new == k):
                # reseed an empty cluster at the point farthest from its center
                far = int(np.argmax(dmin))
                new[far] = k
                dmin[far] = 0.0
                reseeds += 1
        if np.array_equal(new, labels):
            break
        labels = new
        for k in range(c):
            centers[k] = V[labels == k].mean(axis=0)
    inertia = float(_sq_dist(V, centers)[np.arange(V.shape[0]), labels].sum())
    return labels, inertia, it + 1, reseeds


def kmeans(V, c, seed=0, n_restarts=N_RESTARTS, max_iter=MAX_KMEANS_ITER,
           return_info=False):
    """Seeded k-means with k-means++ initialization.

    Each restart draws from its own generator keyed by ``(seed, restart)``;
    the lowest inertia wins, ties going to the earliest restart.

    Parameters
    ----------
    V : ndarray, shape (N, p)
    c : int
    seed : int
    return_info : bool
        Also return a dict with ``inertia``, ``restarts``, ``best_restart``,
        ``iterations`` and ``reseeds``.
    """
    V = np.asarray(V, dtype=float)
    if V.ndim == 1:
        V = V[:, None]
    N = V.shape[0]
    if not 1 <= c <= N:
        raise ValueError(f"cluster count {c} out of range for N = {N}")
    best = None
    for restart in range(n_restarts):
        centers = _kmeanspp(V, c, _rng(seed, restart))
        labels, inertia, iters, reseeds = _lloyd(V, centers, max_iter)
        if best is None or inertia < best[1]:
            best = (labels, inertia, restart, iters, reseeds)
    labels = best[0]
    if not return_info:
        return labels
    return labels, {"inertia": best[1], "restarts": n_restarts, "best_restart": best[2],
                    "iterations": best[3], "reseeds": best[4]}


def cluster_representation(C, c, seed=0):
    """Spectral clustering of a self-representation matrix."""
    L = laplacian(affinity(C))
    V, w = _embed(L, c)
    labels, info = kmeans(V, c, seed=seed, return_info=True)
    return ClusterResult(labels=labels, laplacian_eigenvalues=w, kmeans=info, C=C)


def cluster(Y, c, mode="frobenius", lam=10.0, opts: SolverOptions | None = None,
            seed=0) -> ClusterResult:
    """Self-representation followed by spectral clustering.

    ``lam`` is scaled by :func:`effective_lambda` using ``opts.lambda_scaling``
    and the row count of ``Y``.
    """
    opts = opts or SolverOptions()
    Y = np.asarray(Y, dtype=float)
    lam_eff = effective_lambda(lam, Y.shape[0], opts.lambda_scaling)
    if mode == "robust":
        rep = solve_robust_ssc(Y, lam_eff, opts)
    elif mode == "frobenius":
        rep = solve_frobenius_ssc(Y, lam_eff, opts)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    result = cluster_representation(rep.C, c, seed=seed)
    result.solver = rep.summary()
    if not rep.converged:
        result.solver["warning"] = "solver did not converge on every column"
    return result
