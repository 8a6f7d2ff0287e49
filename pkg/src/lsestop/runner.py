"""The level-set-estimation loop, multi-seed suites, sweeps, and trace I/O."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import bench
from .acquisition import CandidatesExhausted, score, select_next
from .classification import ClassificationTriplet, proposed_labels, standard_labels
from .config import ExperimentConfig
from .gp import Dataset, KernelHyperparams, fit_hyperparameters, joint_posterior, posterior
from .margin import ADAPTIVE, FIXED, MarginPolicy
from .metrics import evaluation_prediction, f_score, metric_lower_bounds, true_upper
from .probabilities import class_probs
from .stopping import accuracy_bound, check_fc, check_fs, standard_rule_bound
from .verify import empirical_eps_accuracy_prob

log = logging.getLogger(__name__)

# independent random substreams per run
STREAM_INIT, STREAM_NOISE, STREAM_FS, STREAM_VERIFY, STREAM_FIT = range(5)


def stream_seed(seed: int, stream: int, *extra: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=int(seed), spawn_key=(stream, *extra))


@dataclass
class ExperimentTrace:
    config: dict
    seed: int
    records: list = field(default_factory=list)
    first_trigger: dict = field(default_factory=dict)
    stop_reason: str = "budget"
    stop_iteration: int | None = None
    error: str | None = None
    # triplet labels and margin behind the last record; kept in memory only
    final_labels: np.ndarray | None = field(default=None, repr=False, compare=False)
    final_eps: float | None = field(default=None, repr=False, compare=False)

    def record_at(self, t: int) -> dict | None:
        return self.records[t] if 0 <= t < len(self.records) else None

    @property
    def final_f(self) -> float:
        return self.records[-1]["f_score"] if self.records else math.nan


def _initial_hp(ds: Dataset, theta: float) -> KernelHyperparams:
    s2 = float(np.mean((ds.outputs - theta) ** 2)) if len(ds) else 1.0
    s2 = s2 if s2 > 0 else 1.0
    return KernelHyperparams(rho=s2, ell=0.3, lam=float(np.clip(100.0 / s2, 1e-6, 1e6)))


def _margin(config: ExperimentConfig) -> MarginPolicy:
    m = config.margin
    if m.kind == ADAPTIVE:
        return replace(m, delta=config.delta)
    return m


def run_single(config: ExperimentConfig, seed: int, *, observer=None,
               stop_when=()) -> ExperimentTrace:
    """One run of the estimation loop. ``observer(record)`` is called per iteration.

    ``stop_when`` lists monitored rules; the run also ends once all of them
    have fired, which saves time when only first-trigger iterations matter.
    """
    spec = config.benchmark
    grid = bench.make_grid(spec)
    X = bench.normalize(spec, grid)
    n_cand = len(X)
    theta = spec.theta
    f_true = bench.eval_true(spec, grid)
    truth = true_upper(f_true, theta)
    margin = _margin(config)
    policy = config.acquisition
    monitors = set(config.monitors) | ({config.stop_on} - {"none"}) | set(stop_when)

    trace = ExperimentTrace(config=config.as_dict(), seed=int(seed))
    noise_rng = np.random.default_rng(stream_seed(seed, STREAM_NOISE))
    init_rng = np.random.default_rng(stream_seed(seed, STREAM_INIT))

    ds = Dataset.empty(X.shape[1])
    visited = set()
    for i in init_rng.choice(n_cand, size=min(config.n_initial, n_cand), replace=False):
        ds = ds.append(X[i], bench.observe(spec, grid[i], noise_rng))
        visited.add(int(i))

    hp = _initial_hp(ds, theta)
    for t in range(config.budget):
        fit_note = None
        if config.fit.refit and len(ds) >= 2:
            res = fit_hyperparameters(ds, hp, priors_enabled=config.fit.priors, mean=theta,
                                      restarts=config.fit.restarts, maxiter=config.fit.maxiter,
                                      tol=config.fit.tol, seed=stream_seed(seed, STREAM_FIT, t),
                                      ell_prior_scale=config.fit.ell_prior_scale)
            hp, fit_note = res.hp, res.warning
        post = posterior(ds, hp, theta, X)
        eps = margin.margin(hp.rho, hp.lam, n_cand)
        tps = class_probs(post.mu, post.sigma, theta, eps)

        std_lab = standard_labels(post.mu, post.sigma, theta, config.beta)
        if policy.uses_proposed_rule:
            labels = proposed_labels(tps)
        else:
            labels = std_lab
        triplet = ClassificationTriplet.from_labels(labels)
        pred = evaluation_prediction(post.mu, theta, triplet)
        bound = accuracy_bound(tps)

        rec = {
            "iteration": t,
            "n_obs": len(ds),
            "rho": hp.rho, "ell": hp.ell, "lambda": hp.lam,
            "eps": float(eps),
            "f_score": f_score(pred, truth, n_cand),
            "proposed_bound": bound,
            "standard_bound": standard_rule_bound(tps, config.beta),
            "n_upper": len(triplet.upper),
            "n_lower": len(triplet.lower),
            "n_undetermined": len(triplet.undetermined),
            "proposed_stop": bound >= config.delta,
            "fc_stop": check_fc(ClassificationTriplet.from_labels(std_lab)),
        }
        rec.update(metric_lower_bounds(triplet).as_dict())
        trace.final_labels, trace.final_eps = labels, float(eps)
        if fit_note:
            rec["fit_warning"] = fit_note

        jp = None
        if "fs" in monitors:
            jp = joint_posterior(ds, hp, theta, X)
            stop, val = check_fs(jp, evaluation_prediction(post.mu, theta), theta,
                                 config.fs.target, config.fs.percentile, config.fs.n_samples,
                                 seed=stream_seed(seed, STREAM_FS, t))
            rec["fs_stop"], rec["fs_percentile"] = bool(stop), val
        if config.verify_every and t % config.verify_every == 0:
            jp = jp if jp is not None else joint_posterior(ds, hp, theta, X)
            est, se = empirical_eps_accuracy_prob(jp, triplet, theta, eps, config.verify_paths,
                                                  seed=stream_seed(seed, STREAM_VERIFY, t))
            rec["verify_estimate"], rec["verify_stderr"] = est, se

        for rule in ("proposed", "fc", "fs"):
            if rule in monitors and rec.get(f"{rule}_stop") and rule not in trace.first_trigger:
                trace.first_trigger[rule] = t

        if config.stop_on != "none" and rec.get(f"{config.stop_on}_stop"):
            rec["selected"] = None
            trace.records.append(rec)
            trace.stop_reason, trace.stop_iteration = config.stop_on, t
            if observer:
                observer(rec)
            break
        if stop_when and all(r in trace.first_trigger for r in stop_when):
            rec["selected"] = None
            trace.records.append(rec)
            trace.stop_reason, trace.stop_iteration = "+".join(stop_when), t
            if observer:
                observer(rec)
            break
        if t == config.budget - 1:
            rec["selected"] = None
            trace.records.append(rec)
            trace.stop_reason, trace.stop_iteration = "budget", t
            if observer:
                observer(rec)
            break

        try:
            idx = select_next(policy, score(policy, tps, post.mu, post.sigma, theta), visited)
        except CandidatesExhausted:
            rec["selected"] = None
            trace.records.append(rec)
            trace.stop_reason, trace.stop_iteration = "exhausted", t
            if observer:
                observer(rec)
            break
        y = bench.observe(spec, grid[idx], noise_rng)
        rec["selected"], rec["y"] = idx, y
        trace.records.append(rec)
        if observer:
            observer(rec)
        ds = ds.append(X[idx], y)
        visited.add(idx)
    return trace


def _run_safe(args):
    config, seed = args
    try:
        return run_single(config, seed)
    except Exception as exc:  # suite keeps going; failure is recorded on the trace
        log.exception("run with seed %s failed", seed)
        return ExperimentTrace(config=config.as_dict(), seed=seed, stop_reason="error",
                               error=f"{type(exc).__name__}: {exc}")


def run_suite(config: ExperimentConfig, jobs: int = 1) -> list:
    seeds = [config.seed + i for i in range(config.n_seeds)]
    work = [(config, s) for s in seeds]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(_run_safe, work))
    return [_run_safe(w) for w in work]


SWEEP_AXES = ("L", "theta", "grid_resolution", "epsilon_fixed", "noise_std")


def config_for(config: ExperimentConfig, axis: str, value) -> ExperimentConfig:
    if axis == "L":
        return config.with_(margin=MarginPolicy(ADAPTIVE, L=int(value), delta=config.delta))
    if axis == "theta":
        return config.with_(benchmark=config.benchmark.with_(theta=float(value)))
    if axis == "grid_resolution":
        return config.with_(benchmark=config.benchmark.with_(resolution=int(value)))
    if axis == "epsilon_fixed":
        return config.with_(margin=MarginPolicy(FIXED, eps=float(value)))
    if axis == "noise_std":
        return config.with_(benchmark=config.benchmark.with_(noise_std=float(value)))
    raise ValueError(f"unknown sweep axis {axis!r}; expected one of {SWEEP_AXES}")


def run_sweep(config: ExperimentConfig, axis: str, values, jobs: int = 1) -> dict:
    """One suite per value, all sharing the base seed."""
    values = list(values)
    if not values:
        raise ValueError("sweep needs at least one value")
    return {v: run_suite(config_for(config, axis, v), jobs) for v in values}


# -- aggregation and I/O ------------------------------------------------------

SUMMARY_COLUMNS = ("iteration", "n_runs", "f_mean", "f_std", "bound_mean",
                   "proposed_stopped", "fc_stopped", "fs_stopped")


def aggregate(traces: list) -> list:
    """Per-iteration mean/std of F-score and bound, plus how many runs have
    seen each rule fire by then."""
    ok = [t for t in traces if t.error is None]
    horizon = max((len(t.records) for t in ok), default=0)
    rows = []
    for i in range(horizon):
        recs = [t.records[i] for t in ok if i < len(t.records)]
        f = np.array([r["f_score"] for r in recs])
        b = np.array([r["proposed_bound"] for r in recs])
        row = {"iteration": i, "n_runs": len(recs),
               "f_mean": float(f.mean()), "f_std": float(f.std()),
               "bound_mean": float(b.mean())}
        for rule in ("proposed", "fc", "fs"):
            row[f"{rule}_stopped"] = sum(
                1 for t in ok if t.first_trigger.get(rule) is not None and t.first_trigger[rule] <= i)
        rows.append(row)
    return rows


def stop_times(traces: list) -> list:
    rows = []
    for t in traces:
        row = {"seed": t.seed, "stop_reason": t.stop_reason, "stop_iteration": t.stop_iteration}
        for rule in ("proposed", "fc", "fs"):
            it = t.first_trigger.get(rule)
            row[f"first_{rule}"] = it
            row[f"f_at_{rule}"] = t.records[it]["f_score"] if it is not None else None
        row["f_final"] = t.final_f if t.records else None
        row["error"] = t.error
        rows.append(row)
    return rows


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def config_comment(config: dict) -> str:
    return "# config: " + json.dumps(config, sort_keys=True) + "\n"


def write_csv(path, rows: list, columns, config: dict | None = None):
    buf = io.StringIO()
    if config is not None:
        buf.write(config_comment(config))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in columns])
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())


def trace_lines(trace: ExperimentTrace):
    yield {"type": "header", "seed": trace.seed, "config": trace.config}
    for r in trace.records:
        yield {"type": "iteration", **r}
    yield {"type": "result", "stop_reason": trace.stop_reason,
           "stop_iteration": trace.stop_iteration,
           "first_trigger": {k: trace.first_trigger.get(k) for k in ("proposed", "fc", "fs")},
           "error": trace.error}


def write_trace(path, trace: ExperimentTrace):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in trace_lines(trace):
            fh.write(json.dumps(line, sort_keys=True, allow_nan=True) + "\n")


def read_trace(path) -> ExperimentTrace:
    with open(path, encoding="utf-8") as fh:
        lines = [json.loads(s) for s in fh if s.strip()]
    head, tail = lines[0], lines[-1]
    recs = [{k: v for k, v in d.items() if k != "type"} for d in lines[1:-1]]
    return ExperimentTrace(
        config=head["config"], seed=head["seed"], records=recs,
        first_trigger={k: v for k, v in tail["first_trigger"].items() if v is not None},
        stop_reason=tail["stop_reason"], stop_iteration=tail["stop_iteration"],
        error=tail["error"])
