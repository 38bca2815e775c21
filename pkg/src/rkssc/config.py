"""Run configuration shared by the command line and the benchmark runner."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields

from rkssc.kernel import KernelSpec
from rkssc.npt import RankPolicy
from rkssc.solver import SolverOptions

KERNEL_NAMES = {"linear": "linear", "poly": "polynomial", "gauss": "gaussian"}


@dataclass
class RunConfig:
    """Flat, JSON-serializable settings for one clustering run.

    ``kernel="none"`` clusters the (normalized) input columns directly.
    ``rank`` is ``"auto"`` (relative eigenvalue threshold) or a positive
    integer.
    """

    mode: str = "robust"
    kernel: str = "gauss"
    b: float = 0.0
    degree: int = 2
    sigma2: float = 1.0
    rank: int | str = "auto"
    eps_rel: float = 1e-9
    lam: float = 10.0
    lambda_scaling: str = "none"
    clusters: int = 2
    seed: int = 0
    oos_dim: int = 5
    normalize: bool = True
    rho: float = 1.0
    tol_abs: float = 1e-6
    tol_rel: float = 1e-4
    max_iter: int = 5000
    adaptive_rho: bool = True
    input: str | None = None
    truth: str | None = None
    out: str | None = None
    models: str | None = None
    test: str | None = None
    trials: int = 2
    variants: list = field(default_factory=list)
    data: dict = field(default_factory=dict)
    jobs: int = 1

    def __post_init__(self):
        if self.mode not in ("robust", "frobenius"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.kernel != "none" and self.kernel not in KERNEL_NAMES:
            raise ValueError(f"unknown kernel {self.kernel!r}")
        self.lambda_scaling = self.lambda_scaling.replace("-", "_")
        if self.rank != "auto":
            self.rank = int(self.rank)
        if self.clusters < 1:
            raise ValueError("clusters must be >= 1")
        self.kernel_spec()
        self.solver_options()
        self.rank_policy()

    # JSON uses "lambda", which is a Python keyword
    def to_dict(self):
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        d["in"] = d.pop("input")
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        if "lambda" in d:
            d["lam"] = d.pop("lambda")
        if "in" in d:
            d["input"] = d.pop("in")
        names = {f.name for f in fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def replace(self, **changes):
        d = self.to_dict()
        d.update(changes)
        return RunConfig.from_dict(d)

    def kernel_spec(self) -> KernelSpec | None:
        if self.kernel == "none":
            return None
        family = KERNEL_NAMES[self.kernel]
        if family == "linear":
            return KernelSpec.linear()
        if family == "polynomial":
            return KernelSpec.polynomial(self.b, self.degree)
        return KernelSpec.gaussian(self.sigma2)

    def rank_policy(self) -> RankPolicy:
        if self.rank == "auto":
            return RankPolicy("threshold", eps_rel=self.eps_rel)
        return RankPolicy("explicit", r=int(self.rank), eps_rel=self.eps_rel)

    def solver_options(self) -> SolverOptions:
        return SolverOptions(rho=self.rho, tol_abs=self.tol_abs, tol_rel=self.tol_rel,
                             max_iter=self.max_iter, adaptive_rho=self.adaptive_rho,
                             lambda_scaling=self.lambda_scaling)

    def pipeline_kwargs(self):
        return dict(mode=self.mode, kernel=self.kernel_spec(), lam=self.lam,
                    rank=self.rank_policy(), opts=self.solver_options(), seed=self.seed,
                    d=self.oos_dim, normalize=self.normalize)
