"""Repeated-trial comparison of clustering variants.

Each trial draws a fresh in-sample/out-of-sample split (or a fresh synthetic
dataset) from ``seed + trial``, clusters the in-sample part with every
variant, assigns the out-of-sample part, and records ACC, NMI and F1. The
report aggregates mean and standard deviation per variant and runs the
Wilcoxon rank-sum test between every pair of variants.
"""

from __future__ import annotations

import itertools
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from rkssc import __version__
from rkssc.config import RunConfig
from rkssc.data import (corrupt_sparse, gen_nonlinear_manifolds, gen_union_subspaces,
                        load_labels, load_matrix, stratified_split)
from rkssc.metrics import evaluate, wilcoxon_ranksum
from rkssc.pipeline import run_pipeline

METRICS = ("acc", "nmi", "f1")
SPLITS = ("in", "out")


class BenchmarkError(RuntimeError):
    pass


def _trial_data(cfg: RunConfig, seed):
    """Training and test matrices with labels for one trial."""
    spec = dict(cfg.data)
    n_in = int(spec.get("n_in", 30))
    n_out = int(spec.get("n_out", 10))
    if cfg.input:
        X = load_matrix(cfg.input)
        y = load_labels(cfg.truth) if cfg.truth else None
        if y is None or y.size != X.shape[1]:
            raise BenchmarkError("benchmark on a data file needs a matching truth file")
    else:
        gen = spec.get("generator", "union_subspaces")
        n_per = n_in + n_out
        if gen == "union_subspaces":
            ds = gen_union_subspaces(int(spec.get("D", 30)), int(spec.get("c", 3)),
                                     int(spec.get("dim", 3)), n_per,
                                     float(spec.get("noise_sigma", 0.0)), seed)
        else:
            params = {k: v for k, v in spec.items()
                      if k not in ("generator", "n_in", "n_out", "corrupt_fraction",
                                   "corrupt_magnitude")}
            params["n_per_cluster"] = n_per
            ds = gen_nonlinear_manifolds(gen, params, seed)
        X, y = ds.X, ds.labels
    fraction = float(spec.get("corrupt_fraction", 0.0))
    if fraction > 0:
        # magnitude is relative to the spread of the clean entries
        magnitude = float(spec.get("corrupt_magnitude", 5.0)) * float(X.std())
        X = corrupt_sparse(X, fraction, magnitude, seed)
    tr, te = stratified_split(y, n_in, n_out, seed)
    return X[:, tr], y[tr], X[:, te], y[te]


def _variant_configs(cfg: RunConfig):
    if not cfg.variants:
        return [("default", cfg)]
    out = []
    for i, v in enumerate(cfg.variants):
        v = dict(v)
        name = v.pop("name", f"variant{i}")
        out.append((name, cfg.replace(**v, variants=[])))
    return out


def run_trial(cfg: RunConfig, trial: int):
    """Metric rows (one per variant) and stage timings for one trial."""
    seed = cfg.seed + trial
    rows, timings = [], []
    try:
        Xtr, ytr, Xte, yte = _trial_data(cfg, seed)
    except Exception as exc:  # recorded, the report goes on
        for name, _ in _variant_configs(cfg):
            rows.append({"trial": trial, "variant": name, "status": "error",
                         "error": f"{type(exc).__name__}: {exc}"})
        return rows, timings
    for name, vcfg in _variant_configs(cfg):
        t0 = time.perf_counter()
        try:
            fit = run_pipeline(Xtr, vcfg.clusters, **vcfg.pipeline_kwargs())
            row = {"trial": trial, "variant": name, "status": "ok",
                   "in": evaluate(ytr, fit.labels).to_dict()}
            if Xte.shape[1]:
                row["out"] = evaluate(yte, fit.predict(Xte)).to_dict()
            row["solver_converged"] = (fit.result.solver["converged_columns"]
                                       == fit.result.solver["columns"])
        except Exception as exc:
            row = {"trial": trial, "variant": name, "status": "error",
                   "error": f"{type(exc).__name__}: {exc}"}
        rows.append(row)
        timings.append({"trial": trial, "variant": name,
                        "seconds": time.perf_counter() - t0})
    return rows, timings


def _values(rows, variant, split, metric):
    return [r[split][metric] for r in rows
            if r["variant"] == variant and r["status"] == "ok" and split in r]


def summarize(rows, names):
    """Mean/std per variant and pairwise Wilcoxon p-values from metric rows."""
    aggregate = {}
    for name in names:
        agg = {}
        for split in SPLITS:
            for metric in METRICS:
                vals = _values(rows, name, split, metric)
                if vals:
                    agg[f"{split}_{metric}"] = {
                        "mean": float(np.mean(vals)),
                        "std": float(np.std(vals, ddof=1)) if len(vals) > 1 else 0.0,
                        "n": len(vals),
                    }
        aggregate[name] = agg
    wilcoxon = {}
    for a, b in itertools.combinations(names, 2):
        pair = {}
        for split in SPLITS:
            for metric in METRICS:
                va = _values(rows, a, split, metric)
                vb = _values(rows, b, split, metric)
                if va and vb:
                    pair[f"{split}_{metric}"] = wilcoxon_ranksum(va, vb)
        wilcoxon[f"{a} vs {b}"] = pair
    return aggregate, wilcoxon


def run_benchmark(cfg: RunConfig) -> dict:
    """Run ``cfg.trials`` trials of every variant and build the report.

    Raises
    ------
    BenchmarkError
        If fewer than two trials succeed for some variant.
    """
    if cfg.trials < 2:
        raise ValueError("benchmark needs at least 2 trials")
    names = [name for name, _ in _variant_configs(cfg)]
    t0 = time.perf_counter()
    trials = range(cfg.trials)
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(run_trial, [cfg] * cfg.trials, trials))
    else:
        results = [run_trial(cfg, t) for t in trials]
    rows = [r for rr, _ in results for r in rr]
    timings = [t for _, tt in results for t in tt]
    for name in names:
        ok = sum(1 for r in rows if r["variant"] == name and r["status"] == "ok")
        if ok < 2:
            raise BenchmarkError(f"variant {name!r}: only {ok} successful trials")
    aggregate, wilcoxon = summarize(rows, names)
    return {
        "version": __version__,
        "config": cfg.to_dict(),
        "variants": names,
        "rows": rows,
        "aggregate": aggregate,
        "wilcoxon": wilcoxon,
        "timings": {"total_seconds": time.perf_counter() - t0, "per_run": timings},
    }
