"""Clustering quality measures and the Wilcoxon rank-sum test."""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.stats import rankdata

EXACT_MAX_N = 12


@dataclass(frozen=True)
class MetricsReport:
    acc: float
    nmi: float
    f1: float
    n: int

    def to_dict(self):
        return asdict(self)


def _check(truth, pred):
    truth = np.asarray(truth).ravel()
    pred = np.asarray(pred).ravel()
    if truth.shape != pred.shape:
        raise ValueError(f"length mismatch: {truth.size} vs {pred.size}")
    if truth.size == 0:
        raise ValueError("empty labelings")
    return truth, pred


def contingency(truth, pred):
    """Counts of co-occurring labels; rows follow ``truth``, columns ``pred``."""
    truth, pred = _check(truth, pred)
    _, ti = np.unique(truth, return_inverse=True)
    _, pi = np.unique(pred, return_inverse=True)
    M = np.zeros((ti.max() + 1, pi.max() + 1), dtype=np.int64)
    np.add.at(M, (ti, pi), 1)
    return M


def accuracy(truth, pred) -> float:
    """Fraction of points correct under the best one-to-one label matching."""
    M = contingency(truth, pred)
    k = max(M.shape)
    padded = np.zeros((k, k), dtype=np.int64)
    padded[:M.shape[0], :M.shape[1]] = M
    rows, cols = linear_sum_assignment(-padded)
    return float(padded[rows, cols].sum() / M.sum())


def _entropy(counts):
    p = counts[counts > 0] / counts.sum()
    return float(-(p * np.log(p)).sum())


def nmi(truth, pred) -> float:
    """Mutual information normalized by the geometric mean of the entropies."""
    M = contingency(truth, pred).astype(float)
    n = M.sum()
    ht = _entropy(M.sum(axis=1))
    hp = _entropy(M.sum(axis=0))
    if ht == 0 and hp == 0:
        return 1.0
    if ht == 0 or hp == 0:
        return 0.0
    outer = M.sum(axis=1)[:, None] * M.sum(axis=0)[None, :]
    nz = M > 0
    mi = float((M[nz] / n * np.log(M[nz] * n / outer[nz])).sum())
    return float(min(max(mi / math.sqrt(ht * hp), 0.0), 1.0))


def _pairs(x):
    return float((x * (x - 1) // 2).sum())


def pairwise_f1(truth, pred) -> float:
    """F1 of the "same cluster" relation over all unordered pairs of points."""
    M = contingency(truth, pred)
    both = _pairs(M)
    same_pred = _pairs(M.sum(axis=0))
    same_truth = _pairs(M.sum(axis=1))
    if same_pred == 0 and same_truth == 0:
        return 1.0
    p = both / same_pred if same_pred else 0.0
    r = both / same_truth if same_truth else 0.0
    return 0.0 if p + r == 0 else 2 * p * r / (p + r)


def evaluate(truth, pred) -> MetricsReport:
    truth, pred = _check(truth, pred)
    return MetricsReport(acc=accuracy(truth, pred), nmi=nmi(truth, pred),
                         f1=pairwise_f1(truth, pred), n=int(truth.size))


def _exact_p(w, n1, n):
    # null distribution of the rank sum of n1 out of ranks 1..n
    sums = np.array([sum(c) for c in itertools.combinations(range(1, n + 1), n1)])
    lower = np.mean(sums <= w)
    upper = np.mean(sums >= w)
    return min(1.0, 2.0 * min(lower, upper))


def wilcoxon_ranksum(a, b, method="auto") -> float:
    """Two-sided p-value of the Wilcoxon rank-sum test.

    Parameters
    ----------
    a, b : sequences of float
    method : {"auto", "exact", "normal"}
        ``"auto"`` enumerates the exact null distribution when the pooled
        size is at most 12 and there are no ties, and otherwise uses the
        normal approximation with tie and continuity corrections.
    """
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be nonempty")
    n1, n2 = a.size, b.size
    n = n1 + n2
    pooled = np.concatenate([a, b])
    ranks = rankdata(pooled)
    w = float(ranks[:n1].sum())
    ties = np.unique(pooled).size < n
    if method == "exact" and ties:
        raise ValueError("exact test requires tie-free samples")
    if method == "exact" or (method == "auto" and n <= EXACT_MAX_N and not ties):
        return _exact_p(w, n1, n)

    _, t = np.unique(pooled, return_counts=True)
    tie_term = float((t ** 3 - t).sum()) / (n * (n - 1)) if n > 1 else 0.0
    var = n1 * n2 / 12.0 * ((n + 1) - tie_term)
    if var <= 0:
        return 1.0
    z = max(abs(w - n1 * (n + 1) / 2.0) - 0.5, 0.0) / math.sqrt(var)
    return min(1.0, math.erfc(z / math.sqrt(2.0)))
