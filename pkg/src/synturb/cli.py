"""Command-line entry point: ``synturb run | validate | presets``.

Exit codes: 0 success, 1 a check inside the experiment failed, 2 bad
configuration or parameters, 3 the eps-schedule fails the regime audit.
"""
from __future__ import annotations

import argparse
import hashlib
import os
import sys
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .config import ConfigError, ConstraintError, RunConfig, merge_config_text, parse_config
from .io import gnuplot_script, json_text, write_csv, write_json
from .kernels import BACKEND
from .params import ParameterError, classify_regime, exponents
from .presets import PRESETS, preset_text

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_CONSTRAINT = 0, 1, 2, 3


def _load(args) -> RunConfig:
    texts = []
    if args.preset:
        texts.append(preset_text(args.preset))
    if args.config:
        texts.append(Path(args.config).read_text(encoding="utf-8"))
    if not texts:
        raise ConfigError("give --config PATH and/or --preset NAME")
    text = texts[0] if len(texts) == 1 else merge_config_text(*texts)
    cfg = parse_config(text)
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    return cfg


def _regime_lines(cfg: RunConfig):
    p = cfg.spectrum()
    ex = exponents(p)
    lines = [
        f"alpha = {float(p.alpha):g}, beta = {float(p.beta):g}, dim = {p.dim}",
        f"alpha + 2 beta = {float(p.alpha) + 2 * float(p.beta):g}",
    ]
    rows = []
    if cfg.schedule is not None:
        rep, rows = cfg.schedule.audit(p)
    else:
        rep = classify_regime(p)
    lines.append(f"regime: {rep.regime}")
    lines.append(f"kolmogorov: {'yes' if rep.kolmogorov else 'no'}")
    lines.append(f"exponents: q = {float(ex.q):.6g}, p = {float(ex.p):.6g}, "
                 f"2 eta = {2 * float(ex.eta):.6g}, nu = {float(ex.nu):.6g}")
    for n in rep.notes:
        lines.append(f"note: {n}")
    if cfg.schedule is not None:
        e = cfg.schedule.smallest
        lines.append(f"constraints at eps = {e:g} (threshold {cfg.schedule.threshold:g}):")
        if not rows:
            lines.append("  (none)")
        for r in rows:
            lines.append(f"  {r['name']} = {r['value']:.6g}  {'ok' if r['ok'] else 'VIOLATED'}")
    return lines, rep, rows


def cmd_presets(args) -> int:
    for name, (desc, _) in PRESETS.items():
        print(f"{name:16s} {desc}")
    return EXIT_OK


def cmd_validate(args) -> int:
    cfg = _load(args)
    lines, _, rows = _regime_lines(cfg)
    print("\n".join(lines))
    return EXIT_CONSTRAINT if any(not r["ok"] for r in rows) else EXIT_OK


def run_config(cfg: RunConfig, out_dir, threads: int, *, gnuplot: bool = False, quiet: bool = False):
    """Execute ``cfg`` and write its tables and run record into ``out_dir``."""
    from .experiments import run_experiment

    p = cfg.spectrum()
    rep = classify_regime(p)
    audit = None
    if cfg.schedule is not None:
        rep, audit = cfg.schedule.check(p)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    outcome = run_experiment(cfg, threads)
    wall = time.perf_counter() - t0
    files = []
    for tb in outcome.tables:
        path = write_csv(out_dir / f"{tb.name}.csv", tb.header, tb.rows)
        files.append(path.name)
        if gnuplot and tb.plot:
            gp = gnuplot_script(path.name, tb.plot["x"], tb.plot["ys"], tb.header,
                                logx=tb.plot.get("logx", False), logy=tb.plot.get("logy", False),
                                title=f"{cfg.experiment}: {tb.name}")
            (out_dir / f"{tb.name}.gp").write_bytes(gp.encode("utf-8"))
            files.append(f"{tb.name}.gp")
    resolved = cfg.to_dict()
    run_id = hashlib.sha256(json_text(resolved).encode()).hexdigest()[:16]
    ex = exponents(p)
    record = {
        "run_id": run_id,
        "config": resolved,
        "params": p.to_dict(),
        "regime": {"class": rep.regime, "kolmogorov": rep.kolmogorov,
                   "constraints": audit or [], "notes": list(rep.notes)},
        "exponents": {"q": float(ex.q), "p": float(ex.p), "eta": float(ex.eta),
                      "nu": float(ex.nu), "gamma": [float(g) for g in ex.gamma]},
        "outputs": outcome.outputs,
        "failures": outcome.failures,
        "passed": not outcome.failures,
        "files": files,
        "wall_time_s": wall,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "version": __version__,
        "backend": BACKEND,
        "threads": threads,
    }
    write_json(out_dir / "record.json", record)
    if not quiet:
        for f in outcome.failures:
            print(f"FAIL: {f}", file=sys.stderr)
        print(f"{cfg.experiment}: {'ok' if not outcome.failures else 'FAILED'} "
              f"({wall:.1f} s, record {out_dir / 'record.json'})")
    return record


def cmd_run(args) -> int:
    cfg = _load(args)
    threads = args.threads or cfg.threads or os.cpu_count() or 1
    out = args.out or f"synturb-{cfg.experiment}"
    rec = run_config(cfg, out, threads, gnuplot=args.gnuplot)
    return EXIT_OK if rec["passed"] else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="synturb", description="synthetic-turbulence experiments")
    ap.add_argument("--version", action="version", version=f"synturb {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", metavar="PATH", help="INI configuration file")
        sp.add_argument("--preset", metavar="NAME", choices=sorted(PRESETS), help="start from a preset")
        sp.add_argument("--seed", metavar="N", type=int, help="override the master seed")

    r = sub.add_parser("run", help="execute an experiment")
    common(r)
    r.add_argument("--out", metavar="DIR", help="output directory")
    r.add_argument("--threads", metavar="N", type=int, help="worker threads (default: all cores)")
    r.add_argument("--gnuplot", action="store_true", help="also write a gnuplot script per table")
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("validate", help="regime report and constraint audit, no execution")
    common(v)
    v.set_defaults(func=cmd_validate)

    pr = sub.add_parser("presets", help="list presets")
    pr.set_defaults(func=cmd_presets)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConstraintError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_CONSTRAINT
    except (ConfigError, ParameterError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
