"""Command-line interface.

Subcommands: ``cluster``, ``assign``, ``benchmark``, ``synth`` and ``eval``.
Every subcommand writes JSON; failures exit with status 1 and an
``{"error": {"kind": ..., "message": ...}}`` object.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from rkssc import __version__
from rkssc.benchmark import run_benchmark
from rkssc.config import RunConfig
from rkssc.data import (DataFormatError, corrupt_sparse, gen_nonlinear_manifolds,
                        gen_union_subspaces, load_labels, load_matrix, save_labels,
                        save_matrix, unit_normalize_columns)
from rkssc.metrics import evaluate
from rkssc.npt import DegenerateInputError, NptModel
from rkssc.oos import ClusterModel
from rkssc.pipeline import run_pipeline


class CliError(Exception):
    def __init__(self, kind, message):
        super().__init__(message)
        self.kind = kind


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def _write_json(path, payload):
    text = json.dumps(_jsonable(payload), indent=2, sort_keys=True)
    if path:
        Path(path).write_text(text + "\n")
    else:
        print(text)


# flag name -> config key
_FLAGS = {
    "mode": "mode", "kernel": "kernel", "b": "b", "degree": "degree", "sigma2": "sigma2",
    "rank": "rank", "lam": "lam", "lambda_scaling": "lambda_scaling",
    "clusters": "clusters", "seed": "seed", "oos_dim": "oos_dim", "input": "input",
    "truth": "truth", "out": "out", "models": "models", "trials": "trials",
    "variants": "variants", "jobs": "jobs", "rho": "rho", "tol_abs": "tol_abs",
    "tol_rel": "tol_rel", "max_iter": "max_iter", "test": "test",
}


def _add_run_flags(p):
    p.add_argument("--config", help="flat JSON config; flags override it")
    p.add_argument("--mode", choices=("robust", "frobenius"))
    p.add_argument("--kernel", choices=("linear", "poly", "gauss", "none"))
    p.add_argument("--b", type=float)
    p.add_argument("--degree", type=int)
    p.add_argument("--sigma2", type=float)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--rank", type=int)
    g.add_argument("--rank-auto", action="store_true")
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--lambda-scaling", choices=("none", "sqrt-rank"))
    p.add_argument("--clusters", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--oos-dim", type=int)
    p.add_argument("--no-normalize", action="store_true")
    p.add_argument("--rho", type=float)
    p.add_argument("--tol-abs", type=float)
    p.add_argument("--tol-rel", type=float)
    p.add_argument("--max-iter", type=int)
    p.add_argument("--in", dest="input")
    p.add_argument("--truth")
    p.add_argument("--out")


def _parse_variants(text):
    text = text.strip()
    if text.startswith("["):
        return json.loads(text)
    variants = []
    for tok in text.split(","):
        mode, _, kernel = tok.strip().partition(":")
        v = {"name": tok.strip(), "mode": mode}
        if kernel:
            v["kernel"] = kernel
        variants.append(v)
    return variants


def build_config(args) -> RunConfig:
    base = {}
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                base = json.load(fh)
        except OSError as exc:
            raise CliError("io", str(exc)) from None
        except json.JSONDecodeError as exc:
            raise CliError("parse", f"{args.config}: {exc}") from None
        base = RunConfig.from_dict(base).to_dict()
    cfg = RunConfig.from_dict(base) if base else RunConfig()
    changes = {}
    for flag, key in _FLAGS.items():
        val = getattr(args, flag, None)
        if val is not None:
            changes[key] = val
    if getattr(args, "rank_auto", False):
        changes["rank"] = "auto"
    if getattr(args, "no_normalize", False):
        changes["normalize"] = False
    if isinstance(changes.get("variants"), str):
        changes["variants"] = _parse_variants(changes["variants"])
    if "lam" in changes:
        changes["lambda"] = changes.pop("lam")
    if "input" in changes:
        changes["in"] = changes.pop("input")
    return cfg.replace(**changes) if changes else cfg


def _load(path, **kw):
    if not path:
        raise CliError("usage", "missing input path (--in)")
    try:
        return load_matrix(path, **kw)
    except OSError as exc:
        raise CliError("io", str(exc)) from None


def _load_labels(path):
    try:
        return load_labels(path)
    except OSError as exc:
        raise CliError("io", str(exc)) from None


def cmd_cluster(args):
    cfg = build_config(args)
    X = _load(cfg.input)
    fit = run_pipeline(X, cfg.clusters, **cfg.pipeline_kwargs())
    models_path = cfg.models or (str(Path(cfg.out).with_suffix(".models.json"))
                                 if cfg.out else None)
    result = {
        "version": __version__,
        "config": cfg.to_dict(),
        "labels": fit.labels,
        "metrics": None,
        "diagnostics": {
            "solver": fit.result.solver,
            "kmeans": fit.result.kmeans,
            "laplacian_eigenvalues": fit.result.laplacian_eigenvalues,
            "embedding": None if fit.npt is None else fit.npt.diagnostics,
            "subspace_dims": fit.subspaces.dims,
            "timings": fit.timings,
        },
        "models_path": models_path,
        "error": None,
    }
    if cfg.truth:
        truth = _load_labels(cfg.truth)
        if truth.size != fit.labels.size:
            raise CliError("dimension", f"truth has {truth.size} labels, data has {fit.labels.size} samples")
        result["metrics"] = evaluate(truth, fit.labels).to_dict()
    if models_path:
        models = {
            "version": __version__,
            "config": cfg.to_dict(),
            "input_dim": int(X.shape[0]),
            "normalize": cfg.normalize,
            "embedding": None if fit.npt is None else fit.npt.to_dict(),
            "subspaces": fit.subspaces.to_dict(),
        }
        _write_json(models_path, models)
    _write_json(cfg.out, result)
    return 0


def cmd_assign(args):
    try:
        models = json.loads(Path(args.models).read_text())
    except OSError as exc:
        raise CliError("io", str(exc)) from None
    except json.JSONDecodeError as exc:
        raise CliError("parse", f"{args.models}: {exc}") from None
    X = _load(args.input, allow_empty=True)
    D = int(models["input_dim"])
    sub = ClusterModel.from_dict(models["subspaces"])
    if X.size == 0:
        labels, residuals = np.zeros(0, dtype=int), np.zeros((sub.n_clusters, 0))
    else:
        if X.shape[0] != D:
            raise CliError("dimension", f"test data has dimension {X.shape[0]}, model expects {D}")
        if models["normalize"]:
            X = unit_normalize_columns(X)
        emb = models["embedding"]
        Y = X if emb is None else NptModel.from_dict(emb).transform(X)
        residuals = sub.residuals(Y)
        labels = sub.predict(Y)
    _write_json(args.out, {"version": __version__, "config": models.get("config"),
                           "labels": labels, "residuals": residuals.T, "error": None})
    return 0


def cmd_benchmark(args):
    cfg = build_config(args)
    report = run_benchmark(cfg)
    _write_json(cfg.out, report)
    return 0


def cmd_synth(args):
    params = json.loads(args.params) if args.params else {}
    if args.generator == "union_subspaces":
        ds = gen_union_subspaces(args.D, args.c, args.dim, args.n_per_cluster,
                                 args.noise, args.seed)
    else:
        params.setdefault("n_per_cluster", args.n_per_cluster)
        params.setdefault("noise", args.noise)
        ds = gen_nonlinear_manifolds(args.generator, params, args.seed)
    X = ds.X
    prov = dict(ds.provenance)
    if args.corrupt_fraction:
        magnitude = args.corrupt_magnitude * float(X.std())
        X = corrupt_sparse(X, args.corrupt_fraction, magnitude, args.seed)
        prov.update(corrupt_fraction=args.corrupt_fraction, corrupt_magnitude=magnitude)
    save_matrix(args.out, X, format=args.format)
    if args.labels_out:
        save_labels(args.labels_out, ds.labels)
    print(json.dumps({"version": __version__, "provenance": _jsonable(prov),
                      "shape": list(X.shape), "out": args.out,
                      "labels_out": args.labels_out}, sort_keys=True))
    return 0


def cmd_eval(args):
    truth = _load_labels(args.truth)
    pred = _load_labels(args.pred)
    if truth.size != pred.size:
        raise CliError("dimension", f"truth has {truth.size} labels, pred has {pred.size}")
    _write_json(args.out, {"version": __version__, **evaluate(truth, pred).to_dict()})
    return 0


def make_parser():
    parser = argparse.ArgumentParser(prog="rkssc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cluster", help="cluster a data matrix")
    _add_run_flags(p)
    p.add_argument("--models", help="where to write the fitted models (JSON)")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("assign", help="label new samples with a fitted model")
    p.add_argument("--models", required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_assign)

    p = sub.add_parser("benchmark", help="repeated-trial comparison of variants")
    _add_run_flags(p)
    p.add_argument("--trials", type=int)
    p.add_argument("--variants",
                   help='JSON list of overrides, or "mode:kernel,..." shorthand')
    p.add_argument("--jobs", type=int)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("synth", help="write a synthetic dataset")
    p.add_argument("--generator", default="union_subspaces",
                   choices=("union_subspaces", "concentric_circles", "polynomial_embedding"))
    p.add_argument("--D", type=int, default=30)
    p.add_argument("--c", type=int, default=3)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--n-per-cluster", type=int, default=50)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--params", help="extra generator parameters as JSON")
    p.add_argument("--corrupt-fraction", type=float, default=0.0)
    p.add_argument("--corrupt-magnitude", type=float, default=5.0,
                   help="corruption magnitude in units of the data's standard deviation")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("csv", "raw"), default="csv")
    p.add_argument("--out", required=True)
    p.add_argument("--labels-out")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("eval", help="score predicted labels against the truth")
    p.add_argument("--truth", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)
    return parser


def _error_kind(exc):
    if isinstance(exc, CliError):
        return exc.kind
    if isinstance(exc, OSError):
        return "io"
    if isinstance(exc, (DataFormatError, json.JSONDecodeError)):
        return "parse"
    if isinstance(exc, DegenerateInputError):
        return "degenerate"
    return "value"


def main(argv=None):
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:
        payload = {"version": __version__, "config": None, "labels": None,
                   "metrics": None, "diagnostics": None, "models_path": None,
                   "error": {"kind": _error_kind(exc), "message": str(exc)}}
        out = getattr(args, "out", None)
        try:
            _write_json(out, payload)
        except OSError:
            out = None
        if out:
            print(json.dumps(payload, sort_keys=True))
        return 1


if __name__ == "__main__":
    sys.exit(main())
