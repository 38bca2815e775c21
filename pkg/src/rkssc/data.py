"""Matrix I/O, preprocessing and synthetic ground-truthed datasets.

Matrices keep one sample per column. Every random draw comes from a Philox
generator keyed by ``(seed, stream)``, so datasets are reproducible across
platforms.
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

MAGIC = b"KSC1"

# generator streams
_STREAM_BASES, _STREAM_COEFS, _STREAM_NOISE, _STREAM_CORRUPT, _STREAM_SPLIT = range(5)


class DataFormatError(ValueError):
    """Malformed or non-finite input data."""


def rng_for(seed, stream=0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=np.array([seed, stream], dtype=np.uint64)))


@dataclass
class LabeledDataset:
    X: np.ndarray
    labels: np.ndarray
    provenance: dict = field(default_factory=dict)

    @property
    def n_clusters(self):
        return int(self.labels.max()) + 1


def _is_number(tok):
    try:
        float(tok)
    except ValueError:
        return False
    return True


def load_csv(path, allow_empty=False) -> np.ndarray:
    """Read a CSV whose rows are samples; returns a ``(D, N)`` matrix.

    A first line containing a non-numeric field is treated as a header.
    """
    rows = []
    width = None
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not tok.strip() for tok in row):
                continue
            if lineno == 1 and not all(_is_number(tok) for tok in row):
                continue
            try:
                vals = [float(tok) for tok in row]
            except ValueError as exc:
                raise DataFormatError(f"{path}:{lineno}: {exc}") from None
            if width is None:
                width = len(vals)
            elif len(vals) != width:
                raise DataFormatError(
                    f"{path}:{lineno}: ragged row with {len(vals)} fields, expected {width}")
            if not all(np.isfinite(vals)):
                raise DataFormatError(f"{path}:{lineno}: non-finite value")
            rows.append(vals)
    if not rows:
        if allow_empty:
            return np.empty((0, 0))
        raise DataFormatError(f"{path}: no data rows")
    return np.array(rows, dtype=float).T


def save_csv(path, X, header=None):
    X = np.asarray(X, dtype=float)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if header:
            w.writerow(header)
        for col in X.T:
            w.writerow([repr(float(v)) for v in col])


def load_raw(path) -> np.ndarray:
    """Read the ``KSC1`` binary format: magic, u64 D, u64 N, column-major f64."""
    buf = Path(path).read_bytes()
    if buf[:4] != MAGIC:
        raise DataFormatError(f"{path}: bad magic {buf[:4]!r}")
    if len(buf) < 20:
        raise DataFormatError(f"{path}: truncated header")
    D, N = struct.unpack("<QQ", buf[4:20])
    if len(buf) != 20 + 8 * D * N:
        raise DataFormatError(f"{path}: expected {D * N} values, file size {len(buf)}")
    X = np.frombuffer(buf, dtype="<f8", offset=20).reshape((D, N), order="F").astype(float)
    if not np.all(np.isfinite(X)):
        raise DataFormatError(f"{path}: non-finite value")
    return X


def save_raw(path, X):
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("X must be 2-D")
    with open(path, "wb") as fh:
        fh.write(MAGIC + struct.pack("<QQ", *X.shape))
        fh.write(np.asarray(X, dtype="<f8").tobytes(order="F"))


def load_matrix(path, format=None, allow_empty=False) -> np.ndarray:
    """Load a ``(D, N)`` data matrix from CSV (rows are samples) or raw binary.

    ``format`` is ``"csv"`` or ``"raw"``; by default it is guessed from the
    file's first four bytes.
    """
    if format is None:
        with open(path, "rb") as fh:
            format = "raw" if fh.read(4) == MAGIC else "csv"
    if format == "csv":
        return load_csv(path, allow_empty=allow_empty)
    if format in ("raw", "raw-binary"):
        return load_raw(path)
    raise ValueError(f"unknown format {format!r}")


def save_matrix(path, X, format="csv"):
    if format == "csv":
        save_csv(path, X)
    elif format in ("raw", "raw-binary"):
        save_raw(path, X)
    else:
        raise ValueError(f"unknown format {format!r}")


def load_labels(path) -> np.ndarray:
    labels = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            tok = line.strip()
            if not tok:
                continue
            try:
                labels.append(int(tok))
            except ValueError:
                if lineno == 1:
                    continue
                raise DataFormatError(f"{path}:{lineno}: not an integer label: {tok!r}") from None
    return np.array(labels, dtype=int)


def save_labels(path, labels):
    with open(path, "w") as fh:
        fh.writelines(f"{int(v)}\n" for v in labels)


def unit_normalize_columns(X) -> np.ndarray:
    """Scale every column to unit Euclidean norm."""
    X = np.asarray(X, dtype=float)
    norms = np.linalg.norm(X, axis=0)
    zero = np.flatnonzero(norms == 0)
    if zero.size:
        raise ValueError(f"column {int(zero[0])} has zero norm")
    return X / norms


def gen_union_subspaces(D, c, dim, n_per_cluster, noise_sigma=0.0, seed=0) -> LabeledDataset:
    """Points drawn from ``c`` random ``dim``-dimensional linear subspaces of R^D.

    Coefficients are standard normal; isotropic noise of scale
    ``noise_sigma`` is added to every entry.
    """
    if not 1 <= dim < D:
        raise ValueError("need 1 <= dim < D")
    if c < 1 or n_per_cluster < 1:
        raise ValueError("need c >= 1 and n_per_cluster >= 1")
    if noise_sigma < 0:
        raise ValueError("noise_sigma must be >= 0")
    gb, gc = rng_for(seed, _STREAM_BASES), rng_for(seed, _STREAM_COEFS)
    blocks = []
    for _ in range(c):
        B, _ = np.linalg.qr(gb.standard_normal((D, dim)))
        blocks.append(B @ gc.standard_normal((dim, n_per_cluster)))
    X = np.hstack(blocks)
    if noise_sigma > 0:
        X = X + noise_sigma * rng_for(seed, _STREAM_NOISE).standard_normal(X.shape)
    labels = np.repeat(np.arange(c), n_per_cluster)
    prov = {"generator": "union_subspaces", "D": D, "c": c, "dim": dim,
            "n_per_cluster": n_per_cluster, "noise_sigma": noise_sigma, "seed": seed}
    return LabeledDataset(X, labels, prov)


def gen_nonlinear_manifolds(kind, params=None, seed=0) -> LabeledDataset:
    """Clusters lying on curved manifolds.

    ``kind="concentric_circles"`` accepts ``radii`` (distinct), ``n_per_cluster``
    and ``noise``; points are 2-D. ``kind="polynomial_embedding"`` accepts
    ``D``, ``c``, ``degree``, ``n_per_cluster`` and ``noise``: each cluster is
    the curve ``t -> B_m [t, t^2, ..., t^degree]`` for ``t`` in [-1, 1] and a
    random orthonormal ``B_m``.
    """
    params = dict(params or {})
    gc, gn = rng_for(seed, _STREAM_COEFS), rng_for(seed, _STREAM_NOISE)
    if kind == "concentric_circles":
        radii = [float(r) for r in params.get("radii", (1.0, 3.0))]
        n = int(params.get("n_per_cluster", 100))
        noise = float(params.get("noise", 0.0))
        if len(set(radii)) != len(radii) or any(r <= 0 for r in radii):
            raise ValueError("radii must be distinct and positive")
        if n < 1 or noise < 0:
            raise ValueError("invalid n_per_cluster or noise")
        blocks = []
        for r in radii:
            theta = gc.uniform(0.0, 2 * np.pi, n)
            blocks.append(r * np.vstack([np.cos(theta), np.sin(theta)]))
        X = np.hstack(blocks)
        c = len(radii)
        params.update(radii=radii, n_per_cluster=n, noise=noise)
    elif kind == "polynomial_embedding":
        D = int(params.get("D", 10))
        c = int(params.get("c", 3))
        degree = int(params.get("degree", 3))
        n = int(params.get("n_per_cluster", 50))
        noise = float(params.get("noise", 0.0))
        if degree < 2 or degree >= D or c < 1 or n < 1 or noise < 0:
            raise ValueError("need 2 <= degree < D, c >= 1, n_per_cluster >= 1, noise >= 0")
        gb = rng_for(seed, _STREAM_BASES)
        blocks = []
        for _ in range(c):
            B, _ = np.linalg.qr(gb.standard_normal((D, degree)))
            t = gc.uniform(-1.0, 1.0, n)
            blocks.append(B @ np.vstack([t ** p for p in range(1, degree + 1)]))
        X = np.hstack(blocks)
        params.update(D=D, c=c, degree=degree, n_per_cluster=n, noise=noise)
    else:
        raise ValueError(f"unknown manifold kind {kind!r}")
    if noise > 0:
        X = X + noise * gn.standard_normal(X.shape)
    labels = np.repeat(np.arange(c), n)
    return LabeledDataset(X, labels, {"generator": kind, **params, "seed": seed})


def corrupt_sparse(X, fraction, magnitude, seed=0) -> np.ndarray:
    """Overwrite ``round(fraction * X.size)`` random entries with ``+-magnitude``.

    Entries are chosen uniformly without replacement; signs are fair coin
    flips. Returns a new array.
    """
    if not 0.0 <= fraction <= 1.0:
        raise ValueError("fraction must be in [0, 1]")
    X = np.array(X, dtype=float)
    count = int(np.floor(fraction * X.size + 0.5))
    if count == 0:
        return X
    g = rng_for(seed, _STREAM_CORRUPT)
    idx = g.choice(X.size, size=count, replace=False)
    signs = np.where(g.random(count) < 0.5, -1.0, 1.0)
    flat = X.reshape(-1)
    flat[idx] = magnitude * signs
    return X


def stratified_split(labels, n_in, n_out, seed=0):
    """Random per-class in-sample and out-of-sample index sets.

    Classes with fewer than ``n_in + n_out`` members contribute everything
    they have, in-sample first.
    """
    labels = np.asarray(labels)
    g = rng_for(seed, _STREAM_SPLIT)
    tr, te = [], []
    for m in np.unique(labels):
        idx = g.permutation(np.flatnonzero(labels == m))
        tr.append(idx[:n_in])
        te.append(idx[n_in:n_in + n_out])
    return np.sort(np.concatenate(tr)), np.sort(np.concatenate(te))
