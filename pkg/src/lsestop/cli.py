"""Command-line entry point: ``lsestop run | verify | sweep | keys``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from pathlib import Path

from . import runner
from .config import KEY_REFERENCE, ConfigError, ExperimentConfig, load
from .margin import ADAPTIVE, FIXED, MarginPolicy

OUT_ENV = "LSESTOP_OUT"

log = logging.getLogger("lsestop")


def _out_root(args) -> Path:
    root = Path(args.out or os.environ.get(OUT_ENV) or "lsestop-out")
    if args.timestamp:
        root = root / time.strftime("%Y%m%d-%H%M%S")
    return root


def _apply_overrides(cfg: ExperimentConfig, args) -> ExperimentConfig:
    kw = {}
    if args.seed is not None:
        kw["seed"] = args.seed
    if args.budget is not None:
        if args.budget < 1:
            raise ConfigError("budget", "must be >= 1")
        kw["budget"] = args.budget
    if args.n_seeds is not None:
        kw["n_seeds"] = args.n_seeds
    if kw:
        cfg = cfg.with_(**kw)
    bench = {}
    if args.theta is not None:
        bench["theta"] = args.theta
    if args.noise_std is not None:
        bench["noise_std"] = args.noise_std
    if args.resolution is not None:
        bench["resolution"] = args.resolution
    if bench:
        try:
            cfg = cfg.with_(benchmark=cfg.benchmark.with_(**bench))
        except ValueError as exc:
            raise ConfigError("benchmark", str(exc)) from None
    try:
        if args.L is not None:
            cfg = cfg.with_(margin=MarginPolicy(ADAPTIVE, L=args.L, delta=cfg.delta))
        if args.eps is not None:
            cfg = cfg.with_(margin=MarginPolicy(FIXED, eps=args.eps))
    except ValueError as exc:
        raise ConfigError("margin", str(exc)) from None
    return cfg


def _write_suite(outdir: Path, cfg: ExperimentConfig, traces: list):
    outdir.mkdir(parents=True, exist_ok=True)
    snapshot = cfg.as_dict()
    for tr in traces:
        runner.write_trace(outdir / f"trace_seed{tr.seed}.jsonl", tr)
    runner.write_csv(outdir / "summary.csv", runner.aggregate(traces),
                     runner.SUMMARY_COLUMNS, snapshot)
    st = runner.stop_times(traces)
    runner.write_csv(outdir / "stop_times.csv", st, list(st[0]) if st else ["seed"], snapshot)


def cmd_run(args) -> int:
    cfg = _apply_overrides(load(args.config), args)
    traces = runner.run_suite(cfg, jobs=args.jobs)
    out = _out_root(args)
    _write_suite(out, cfg, traces)
    failed = [t for t in traces if t.error]
    for t in traces:
        print(f"seed {t.seed}: {t.stop_reason} at {t.stop_iteration}, "
              f"F={t.final_f if t.records else float('nan'):.4f}"
              + (f" [{t.error}]" if t.error else ""))
    print(f"wrote {out}")
    return 1 if failed else 0


def cmd_verify(args) -> int:
    cfg = _apply_overrides(load(args.config), args)
    if cfg.verify_every < 1:
        cfg = cfg.with_(verify_every=1)
    offset = args.bound_offset
    out = _out_root(args)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    violations = 0
    for s in range(cfg.seed, cfg.seed + cfg.n_seeds):
        tr = runner.run_single(cfg, s)
        for r in tr.records:
            if "verify_estimate" not in r:
                continue
            bound = r["proposed_bound"] + offset
            est, se = r["verify_estimate"], r["verify_stderr"]
            ok = est >= bound - 3.0 * se
            violations += not ok
            rows.append({"seed": s, "iteration": r["iteration"], "estimate": est,
                         "bound": bound, "stderr": se, "ok": int(ok)})
    cols = ("seed", "iteration", "estimate", "bound", "stderr", "ok")
    runner.write_csv(out / "verify.csv", rows, cols, cfg.as_dict())
    print("seed,iteration,estimate,bound")
    for r in rows:
        print(f"{r['seed']},{r['iteration']},{r['estimate']:.4f},{r['bound']:.4f}")
    if violations:
        print(f"{violations} iteration(s) with estimate < bound - 3*stderr", file=sys.stderr)
        return 1
    return 0


def _parse_values(axis: str, text: str):
    vals = [v for v in (s.strip() for s in text.split(",")) if v]
    conv = int if axis in ("L", "grid_resolution") else float
    try:
        return [conv(v) for v in vals]
    except ValueError:
        raise ConfigError("values", f"cannot parse {text!r} for axis {axis}") from None


def cmd_sweep(args) -> int:
    cfg = _apply_overrides(load(args.config), args)
    values = _parse_values(args.axis, args.values)
    if not values:
        raise ConfigError("values", "empty value list")
    out = _out_root(args)
    all_rows = []
    failed = False
    for v in values:
        sub = runner.config_for(cfg, args.axis, v)
        traces = runner.run_suite(sub, jobs=args.jobs)
        _write_suite(out / f"{args.axis}={v}", sub, traces)
        failed |= any(t.error for t in traces)
        for row in runner.stop_times(traces):
            all_rows.append({args.axis: v, **row})
    cols = [args.axis] + [c for c in all_rows[0] if c != args.axis]
    runner.write_csv(out / "stop_times.csv", all_rows, cols, cfg.as_dict())
    print(f"wrote {len(values)} suites to {out}")
    return 1 if failed else 0


def cmd_keys(args) -> int:
    width = max(map(len, KEY_REFERENCE))
    for k, v in KEY_REFERENCE.items():
        print(f"{k:<{width}}  {v}")
    return 0


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", "-c", required=True, help="YAML or JSON experiment file")
    p.add_argument("--out", "-o", help=f"output directory (default ${OUT_ENV} or ./lsestop-out)")
    p.add_argument("--timestamp", action="store_true", help="write into a timestamped subdirectory")
    p.add_argument("--seed", type=int)
    p.add_argument("--budget", type=int)
    p.add_argument("--n-seeds", type=int, dest="n_seeds")
    p.add_argument("--jobs", "-j", type=int, default=1)
    p.add_argument("--theta", type=float)
    p.add_argument("--noise-std", type=float, dest="noise_std")
    p.add_argument("--resolution", type=int)
    p.add_argument("--L", type=int, dest="L")
    p.add_argument("--eps", type=float, help="use a fixed margin")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lsestop", description="Level set estimation with stopping rules.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a multi-seed suite")
    _add_common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", help="Monte-Carlo check of the accuracy bound")
    _add_common(p)
    p.add_argument("--bound-offset", type=float, default=0.0, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="one suite per value of a parameter")
    _add_common(p)
    p.add_argument("--axis", required=True, choices=runner.SWEEP_AXES)
    p.add_argument("--values", required=True, help="comma-separated values")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("keys", help="list configuration keys")
    p.set_defaults(func=cmd_keys)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        log.debug("failure", exc_info=True)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
