"""Experiment configuration: dataclasses, validation, and YAML/JSON loading."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

import yaml

from .acquisition import KINDS, AcquisitionPolicy
from .bench import FUNCTIONS, BenchmarkSpec
from .margin import ADAPTIVE, FIXED, MarginPolicy

RULES = ("proposed", "fc", "fs")
STOP_CHOICES = RULES + ("none",)


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class FitSettings:
    refit: bool = True
    priors: bool = True
    restarts: int = 5
    maxiter: int = 200
    tol: float = 1e-6
    ell_prior_scale: float = 0.2


@dataclass(frozen=True)
class FSSettings:
    target: float = 0.95
    percentile: float = 95.0
    n_samples: int = 1000


@dataclass(frozen=True)
class ExperimentConfig:
    benchmark: BenchmarkSpec
    acquisition: AcquisitionPolicy = AcquisitionPolicy()
    margin: MarginPolicy = MarginPolicy()
    stop_on: str = "proposed"
    monitors: tuple = RULES
    delta: float = 0.99
    beta: float = 1.96
    budget: int = 300
    n_seeds: int = 5
    seed: int = 0
    n_initial: int = 1
    fit: FitSettings = FitSettings()
    fs: FSSettings = FSSettings()
    verify_every: int = 0
    verify_paths: int = 10_000

    def __post_init__(self):
        if self.budget < 1:
            raise ConfigError("budget", "must be >= 1")
        if self.n_seeds < 1:
            raise ConfigError("n_seeds", "must be >= 1")
        if self.n_initial < 1:
            raise ConfigError("n_initial", "must be >= 1")
        if not 0 < self.delta < 1:
            raise ConfigError("delta", "must lie in (0, 1)")
        if not self.beta > 0:
            raise ConfigError("beta", "must be positive")
        if self.stop_on not in STOP_CHOICES:
            raise ConfigError("stop_on", f"must be one of {STOP_CHOICES}")
        bad = [m for m in self.monitors if m not in RULES]
        if bad:
            raise ConfigError("monitors", f"unknown rules {bad}")
        if self.verify_every < 0:
            raise ConfigError("verify.every", "must be >= 0")
        if self.verify_paths < 100:
            raise ConfigError("verify.paths", "must be >= 100")
        if self.fs.n_samples < 100:
            raise ConfigError("fs.n_samples", "must be >= 100")

    def with_(self, **kw) -> "ExperimentConfig":
        return replace(self, **kw)

    def as_dict(self) -> dict:
        m = self.margin
        return {
            "benchmark": self.benchmark.as_dict(),
            "acquisition": {"kind": self.acquisition.kind, "beta": self.acquisition.beta,
                            "allow_repeats": self.acquisition.allow_repeats},
            "margin": ({"kind": FIXED, "eps": m.eps} if m.kind == FIXED
                       else {"kind": ADAPTIVE, "L": m.L}),
            "stop_on": self.stop_on,
            "monitors": list(self.monitors),
            "delta": self.delta,
            "beta": self.beta,
            "budget": self.budget,
            "n_seeds": self.n_seeds,
            "seed": self.seed,
            "n_initial": self.n_initial,
            "fit": {"refit": self.fit.refit, "priors": self.fit.priors,
                    "restarts": self.fit.restarts, "maxiter": self.fit.maxiter, "tol": self.fit.tol,
                    "ell_prior_scale": self.fit.ell_prior_scale},
            "fs": {"target": self.fs.target, "percentile": self.fs.percentile,
                   "n_samples": self.fs.n_samples},
            "verify": {"every": self.verify_every, "paths": self.verify_paths},
        }


# key -> description; printed by ``lsestop keys``
KEY_REFERENCE = {
    "benchmark.function": f"test function, one of {sorted(FUNCTIONS)}",
    "benchmark.resolution": "grid points per axis (>= 2); candidates = resolution**2",
    "benchmark.bounds": "per-axis [lower, upper]; defaults to the function's standard domain",
    "benchmark.theta": "level-set threshold; defaults per function",
    "benchmark.noise_std": "observation noise standard deviation; defaults per function",
    "acquisition.kind": f"one of {KINDS}",
    "acquisition.beta": "straddle width (default 1.96)",
    "acquisition.allow_repeats": "whether a candidate may be selected more than once (default true)",
    "margin.kind": "'adaptive' (eps from L) or 'fixed'",
    "margin.L": "effective measurements per point for the adaptive margin (default 5)",
    "margin.eps": "margin width when kind is 'fixed'",
    "stop_on": f"rule that ends a run, one of {STOP_CHOICES}; 'none' runs to budget",
    "monitors": f"rules evaluated every iteration, subset of {RULES}",
    "delta": "confidence level for the proposed rule and the adaptive margin (default 0.99)",
    "beta": "confidence width of the standard classification rule (default 1.96)",
    "budget": "maximum number of iterations (records) per run (default 300)",
    "n_seeds": "independent runs per suite, seeds seed..seed+n_seeds-1 (default 5)",
    "seed": "base seed (default 0)",
    "n_initial": "random initial observations per run (default 1)",
    "fit.refit": "refit kernel hyperparameters every iteration (default true)",
    "fit.priors": "gamma priors on signal variance and length scale (default true)",
    "fit.restarts": "optimizer starts per refit, first is warm (default 5)",
    "fit.maxiter": "simplex iterations per start (default 200)",
    "fit.tol": "objective tolerance (default 1e-6)",
    "fit.ell_prior_scale": "scale of the gamma(2, scale) prior on the length scale, unit-cube inputs",
    "fs.target": "F-score target of the sampling rule (default 0.95)",
    "fs.percentile": "required probability in percent (default 95)",
    "fs.n_samples": "posterior samples per check (default 1000)",
    "verify.every": "Monte-Carlo bound check every k iterations, 0 = off",
    "verify.paths": "sample paths per check (default 10000)",
}

_SECTIONS = {"benchmark", "acquisition", "margin", "fit", "fs", "verify"}
_TOP = {"stop_on", "monitors", "delta", "beta", "budget", "n_seeds", "seed", "n_initial"}


def _section(raw: dict, name: str) -> dict:
    val = raw.get(name, {}) or {}
    if not isinstance(val, dict):
        raise ConfigError(name, "must be a mapping")
    allowed = {k.split(".", 1)[1] for k in KEY_REFERENCE if k.startswith(name + ".")}
    for k in val:
        if k not in allowed:
            raise ConfigError(f"{name}.{k}", "unknown key")
    return val


def _typed(fn, key, value):
    try:
        return fn(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(key, f"invalid value {value!r} ({exc})") from None


def _as_bool(v):
    if isinstance(v, bool):
        return v
    if isinstance(v, str) and v.lower() in ("true", "false", "yes", "no", "1", "0"):
        return v.lower() in ("true", "yes", "1")
    raise ValueError("expected a boolean")


def _as_int(v):
    if isinstance(v, bool) or (isinstance(v, float) and not v.is_integer()):
        raise ValueError("expected an integer")
    return int(v)


def from_dict(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "configuration must be a mapping")
    for k in raw:
        if k not in _SECTIONS and k not in _TOP:
            raise ConfigError(k, "unknown key")

    b = _section(raw, "benchmark")
    if "function" not in b:
        raise ConfigError("benchmark.function", "required")
    try:
        bench = BenchmarkSpec(
            function=str(b["function"]),
            resolution=_typed(_as_int, "benchmark.resolution", b.get("resolution", 20)),
            bounds=b.get("bounds"),
            theta=None if b.get("theta") is None else _typed(float, "benchmark.theta", b["theta"]),
            noise_std=(None if b.get("noise_std") is None
                       else _typed(float, "benchmark.noise_std", b["noise_std"])),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError("benchmark", str(exc)) from None

    a = _section(raw, "acquisition")
    try:
        acq = AcquisitionPolicy(
            kind=str(a.get("kind", "proposed")),
            beta=_typed(float, "acquisition.beta", a.get("beta", 1.96)),
            allow_repeats=_typed(_as_bool, "acquisition.allow_repeats", a.get("allow_repeats", True)),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError("acquisition.kind", str(exc)) from None

    delta = _typed(float, "delta", raw.get("delta", 0.99))
    m = _section(raw, "margin")
    kind = str(m.get("kind", ADAPTIVE))
    try:
        if kind == FIXED:
            if "eps" not in m:
                raise ConfigError("margin.eps", "required when margin.kind is 'fixed'")
            margin = MarginPolicy(FIXED, eps=_typed(float, "margin.eps", m["eps"]), delta=0.5)
        else:
            margin = MarginPolicy(kind, L=_typed(_as_int, "margin.L", m.get("L", 5)),
                                  delta=delta if 0 < delta < 1 else 0.99)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError("margin", str(exc)) from None

    f = _section(raw, "fit")
    fit = FitSettings(
        refit=_typed(_as_bool, "fit.refit", f.get("refit", True)),
        priors=_typed(_as_bool, "fit.priors", f.get("priors", True)),
        restarts=_typed(_as_int, "fit.restarts", f.get("restarts", 5)),
        maxiter=_typed(_as_int, "fit.maxiter", f.get("maxiter", 200)),
        tol=_typed(float, "fit.tol", f.get("tol", 1e-6)),
        ell_prior_scale=_typed(float, "fit.ell_prior_scale", f.get("ell_prior_scale", 0.2)),
    )
    s = _section(raw, "fs")
    fs = FSSettings(
        target=_typed(float, "fs.target", s.get("target", 0.95)),
        percentile=_typed(float, "fs.percentile", s.get("percentile", 95.0)),
        n_samples=_typed(_as_int, "fs.n_samples", s.get("n_samples", 1000)),
    )
    v = _section(raw, "verify")
    monitors = raw.get("monitors", list(RULES))
    if isinstance(monitors, str):
        monitors = [monitors]
    if not isinstance(monitors, (list, tuple)):
        raise ConfigError("monitors", "must be a list")

    return ExperimentConfig(
        benchmark=bench,
        acquisition=acq,
        margin=margin,
        stop_on=str(raw.get("stop_on", "proposed")),
        monitors=tuple(str(x) for x in monitors),
        delta=delta,
        beta=_typed(float, "beta", raw.get("beta", 1.96)),
        budget=_typed(_as_int, "budget", raw.get("budget", 300)),
        n_seeds=_typed(_as_int, "n_seeds", raw.get("n_seeds", 5)),
        seed=_typed(_as_int, "seed", raw.get("seed", 0)),
        n_initial=_typed(_as_int, "n_initial", raw.get("n_initial", 1)),
        fit=fit,
        fs=fs,
        verify_every=_typed(_as_int, "verify.every", v.get("every", 0)),
        verify_paths=_typed(_as_int, "verify.paths", v.get("paths", 10_000)),
    )


def load(path) -> ExperimentConfig:
    """Read a YAML (or JSON) configuration file."""
    p = Path(path)
    if not p.is_file():
        raise ConfigError("config", f"file not found: {p}")
    try:
        raw = yaml.safe_load(p.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError("config", f"cannot parse {p}: {exc}") from None
    return from_dict(raw or {})
