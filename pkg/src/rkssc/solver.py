"""ADMM solvers for sparse self-representation.

Both objectives are separable over columns of ``C``. For column ``j`` the
robust problem is

    min_c ||c||_1 + lam * ||y_j - Y c||_1        s.t. c_j = 0

and the Frobenius problem replaces the error term by
``lam / 2 * ||y_j - Y c||_2^2``. Each column is split as
``e = y_j - Y a``, ``a = c``; all columns are iterated together but keep
their own penalty, residuals and stopping state.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.linalg

RHO_MIN, RHO_MAX = 1e-4, 1e4
# penalty updates every ADAPT_EVERY iterations, frozen after ADAPT_STOP
ADAPT_EVERY, ADAPT_STOP = 10, 1000


@dataclass(frozen=True)
class SolverOptions:
    rho: float = 1.0
    tol_abs: float = 1e-6
    tol_rel: float = 1e-4
    max_iter: int = 5000
    adaptive_rho: bool = True
    lambda_scaling: str = "none"

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError("rho must be > 0")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.lambda_scaling not in ("none", "sqrt_rank"):
            raise ValueError(f"unknown lambda_scaling {self.lambda_scaling!r}")

    def to_dict(self):
        return asdict(self)


@dataclass
class SelfRepresentation:
    """Self-representation ``Y ~ Y C`` with ``diag(C) = 0``.

    ``E`` is the residual ``Y - Y C`` (robust mode only, ``None`` otherwise).
    ``diagnostics`` holds per-column ``iterations``, ``converged``,
    ``primal_residual`` and ``objective`` arrays, plus their summaries.
    """

    C: np.ndarray
    E: np.ndarray | None
    diagnostics: dict = field(default_factory=dict)

    @property
    def converged(self):
        return bool(np.all(self.diagnostics["converged"]))

    def summary(self):
        d = self.diagnostics
        return {
            "mode": d["mode"],
            "lambda": d["lambda"],
            "objective": float(np.sum(d["objective"])),
            "columns": int(len(d["iterations"])),
            "converged_columns": int(np.count_nonzero(d["converged"])),
            "max_iterations": int(np.max(d["iterations"])),
            "max_primal_residual": float(np.max(d["primal_residual"])),
        }


def soft_threshold(v, tau):
    """Proximal operator of ``tau * ||.||_1``; ``tau`` may broadcast."""
    v = np.asarray(v, dtype=float)
    return v - np.clip(v, -tau, tau)


def effective_lambda(lambda_e, R, scaling="none"):
    """Error-term weight, optionally multiplied by ``sqrt(R)``.

    The l1 error of the coordinates bounds the error along any unit
    direction of the feature subspace only up to a factor ``sqrt(R)``, hence
    the ``"sqrt_rank"`` option.
    """
    if R < 1:
        raise ValueError("rank must be >= 1")
    if scaling == "none":
        return float(lambda_e)
    if scaling == "sqrt_rank":
        return math.sqrt(R) * float(lambda_e)
    raise ValueError(f"unknown scaling {scaling!r}")


def robust_objective(Y, C, lam):
    return np.abs(C).sum(axis=0) + lam * np.abs(Y - Y @ C).sum(axis=0)


def frobenius_objective(Y, C, lam):
    res = Y - Y @ C
    return np.abs(C).sum(axis=0) + 0.5 * lam * (res * res).sum(axis=0)


class _NormalSolver:
    """Solves ``(Y^T Y + I) a = Y^T w + z`` for many right-hand sides.

    Factorizes whichever of ``I + Y Y^T`` (R x R) or ``I + Y^T Y`` (N x N)
    is smaller, once.
    """

    def __init__(self, Y):
        self.Y = Y
        R, N = Y.shape
        self.small = R <= N
        if self.small:
            self.fac = scipy.linalg.cho_factor(np.eye(R) + Y @ Y.T)
        else:
            self.fac = scipy.linalg.cho_factor(np.eye(N) + Y.T @ Y)

    def solve(self, w, z):
        """Return ``a`` and ``Y a``."""
        Y = self.Y
        if self.small:
            # a = z + Y^T t with (I + Y Y^T) t = w - Y z, and then Y a = w - t
            t = scipy.linalg.cho_solve(self.fac, w - Y @ z, check_finite=False)
            return z + Y.T @ t, w - t
        a = scipy.linalg.cho_solve(self.fac, Y.T @ w + z, check_finite=False)
        return a, Y @ a


def _admm(Y, lam, opts, robust):
    Y = np.asarray(Y, dtype=float)
    if Y.ndim != 2 or Y.shape[1] < 2:
        raise ValueError("Y must be (R, N) with N >= 2")
    if not lam > 0:
        raise ValueError("lambda must be > 0")
    R, N = Y.shape
    normal = _NormalSolver(Y)
    YT = np.ascontiguousarray(Y.T)

    C = np.zeros((N, N))
    E = Y.copy()
    iterations = np.zeros(N, dtype=int)
    converged = np.zeros(N, dtype=bool)
    primal = np.full(N, np.inf)
    sqrt_p = math.sqrt(R + N)
    sqrt_n = math.sqrt(N)

    # working state of the still-active columns, compacted as columns finish
    active = np.arange(N)
    y = Y.copy()
    y_norm = np.linalg.norm(Y, axis=0)
    c = np.zeros((N, N))
    e = Y.copy()
    u1 = np.zeros((R, N))
    u2 = np.zeros((N, N))
    rho = np.full(N, float(opts.rho))
    cols = np.arange(N)

    for it in range(opts.max_iter):
        c_old, e_old = c, e
        a, Ya = normal.solve(y - e_old + u1, c_old - u2)

        c = soft_threshold(a + u2, 1.0 / rho)
        c[active, cols] = 0.0
        v = y - Ya + u1
        if robust:
            e = soft_threshold(v, lam / rho)
        else:
            e = v * (rho / (lam + rho))

        r1 = y - Ya - e
        r2 = a - c
        u1 = u1 + r1
        u2 = u2 + r2

        pri = np.sqrt(np.einsum("ij,ij->j", r1, r1) + np.einsum("ij,ij->j", r2, r2))
        dual = rho * np.linalg.norm(YT @ (e - e_old) - (c - c_old), axis=0)
        Ax = np.sqrt(np.einsum("ij,ij->j", Ya, Ya) + np.einsum("ij,ij->j", a, a))
        Bz = np.sqrt(np.einsum("ij,ij->j", e, e) + np.einsum("ij,ij->j", c, c))
        eps_pri = sqrt_p * opts.tol_abs + opts.tol_rel * np.maximum(np.maximum(Ax, Bz), y_norm)
        eps_dual = sqrt_n * opts.tol_abs + opts.tol_rel * rho * np.linalg.norm(
            YT @ u1 + u2, axis=0)
        iterations[active] += 1
        primal[active] = pri
        done = (pri <= eps_pri) & (dual <= eps_dual)

        if opts.adaptive_rho and it % ADAPT_EVERY == 0 and it < ADAPT_STOP:
            new_rho = np.where(pri > 10.0 * dual, 2.0 * rho,
                               np.where(dual > 10.0 * pri, 0.5 * rho, rho))
            new_rho = np.clip(new_rho, RHO_MIN, RHO_MAX)
            scale = rho / new_rho
            u1 = u1 * scale
            u2 = u2 * scale
            rho = new_rho

        last = it == opts.max_iter - 1
        if done.any() or last:
            out = np.ones_like(done) if last else done
            C[:, active[out]] = c[:, out]
            E[:, active[out]] = e[:, out]
            converged[active[done]] = True
            keep = ~out
            active = active[keep]
            if active.size == 0:
                break
            y, y_norm, c, e = y[:, keep], y_norm[keep], c[:, keep], e[:, keep]
            u1, u2, rho = u1[:, keep], u2[:, keep], rho[keep]
            cols = np.arange(active.size)

    np.fill_diagonal(C, 0.0)
    objective = robust_objective(Y, C, lam) if robust else frobenius_objective(Y, C, lam)
    diagnostics = {
        "mode": "robust" if robust else "frobenius",
        "lambda": float(lam),
        "iterations": iterations,
        "converged": converged,
        "primal_residual": primal,
        "objective": objective,
    }
    return SelfRepresentation(C=C, E=(Y - Y @ C) if robust else None,
                              diagnostics=diagnostics)


def solve_robust_ssc(Y, lambda_e, opts: SolverOptions | None = None) -> SelfRepresentation:
    """Sparse self-representation with an l1 error term.

    Parameters
    ----------
    Y : ndarray, shape (R, N)
        Data or feature-space coordinates, one sample per column.
    lambda_e : float
        Weight of the l1 error term, already scaled (see
        :func:`effective_lambda`).
    opts : SolverOptions, optional

    Returns
    -------
    SelfRepresentation
        Columns that hit ``max_iter`` are flagged in
        ``diagnostics["converged"]`` rather than raising.
    """
    return _admm(Y, float(lambda_e), opts or SolverOptions(), robust=True)


def solve_frobenius_ssc(Y, lambda_z, opts: SolverOptions | None = None) -> SelfRepresentation:
    """Sparse self-representation with a squared-Frobenius error term."""
    return _admm(Y, float(lambda_z), opts or SolverOptions(), robust=False)
