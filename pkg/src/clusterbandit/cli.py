"""Command-line front end.

Subcommands::

    clusterbandit run      --preset portfolio --policies tsg,tscg,utscg --horizon 30000 --reps 100 --seed 7
    clusterbandit validate --preset mmwave          (or an instance file path)
    clusterbandit bounds   --instance my.json --horizon 30000

Exit status: 0 success, 2 usage error, 3 malformed instance/config file,
4 I/O failure (unreadable input, unwritable report).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

from .core import (
    BanditInstance,
    InstanceError,
    compute_gaps,
    load_instance,
    validate_strong_dominance,
    validate_unimodality,
    validate_unique_optimum,
)
from .environments import PRESETS, preset_instance
from .policies import POLICIES
from .simulation import DEFAULT_STRIDE, all_bounds, run_experiment

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_IO = 0, 2, 3, 4

PRESET_DEFAULTS = {"mmwave": (20000, 100), "portfolio": (30000, 100)}
CUSTOM_DEFAULTS = (10000, 100)
DEFAULT_POLICIES = ("tsg", "tscg", "utscg")


class UsageError(Exception):
    pass


class ParseError(Exception):
    pass


class IOFailure(Exception):
    pass


@dataclass
class RunConfig:
    preset: str | None = None
    instance: str | None = None
    policies: list[str] = field(default_factory=lambda: list(DEFAULT_POLICIES))
    horizon: int = 0
    reps: int = 0
    seed: int = 0
    stride: int = DEFAULT_STRIDE
    out: str = ""
    format: str = "csv"
    threads: int | None = None


_RUN_KEYS = ("preset", "instance", "policies", "horizon", "reps", "seed", "stride", "out",
             "format", "threads")


def _policy_list(value: str | Sequence[str]) -> list[str]:
    items = value.split(",") if isinstance(value, str) else list(value)
    items = [p.strip().lower() for p in items if p.strip()]
    if not items:
        raise UsageError("empty policy list")
    unknown = [p for p in items if p not in POLICIES]
    if unknown:
        raise UsageError(f"unknown policy id(s) {unknown}; choose from {sorted(POLICIES)}")
    return items


def _read_config_file(path: str) -> dict:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise IOFailure(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError(f"config {path}: top level must be an object")
    unknown = set(doc) - set(_RUN_KEYS)
    if unknown:
        raise UsageError(f"config {path}: unknown keys {sorted(unknown)}")
    return doc


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    """Merge config-file values with flags (flags win) and validate."""
    merged = _read_config_file(ns.config) if ns.config else {}
    for key in _RUN_KEYS:
        v = getattr(ns, key, None)
        if v is not None:
            merged[key] = v

    preset, instance = merged.get("preset"), merged.get("instance")
    if preset and instance:
        raise UsageError("--preset and --instance are mutually exclusive")
    if not preset and not instance:
        raise UsageError("one of --preset or --instance is required")
    if preset and preset not in PRESETS:
        raise UsageError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")

    t_def, r_def = PRESET_DEFAULTS.get(preset, CUSTOM_DEFAULTS)
    cfg = RunConfig(
        preset=preset,
        instance=instance,
        policies=_policy_list(merged.get("policies", DEFAULT_POLICIES)),
        horizon=int(merged.get("horizon", t_def)),
        reps=int(merged.get("reps", r_def)),
        seed=int(merged.get("seed", 0)),
        stride=int(merged.get("stride", DEFAULT_STRIDE)),
        format=str(merged.get("format", "csv")).lower(),
        threads=None if merged.get("threads") is None else int(merged["threads"]),
    )
    if cfg.horizon < 1:
        raise UsageError(f"--horizon must be >= 1, got {cfg.horizon}")
    if cfg.reps < 1:
        raise UsageError(f"--reps must be >= 1, got {cfg.reps}")
    if cfg.stride < 1:
        raise UsageError(f"--stride must be >= 1, got {cfg.stride}")
    if cfg.threads is not None and cfg.threads < 1:
        raise UsageError(f"--threads must be >= 1, got {cfg.threads}")
    if cfg.format not in ("csv", "json"):
        raise UsageError(f"--format must be csv or json, got {cfg.format!r}")
    cfg.out = str(merged.get("out") or f"report.{cfg.format}")
    return cfg


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clusterbandit",
        description="Clustered Gaussian bandit benchmarks (TSG, TSCG, UTSCG, UCB1, TLP).")
    sub = parser.add_subparsers(dest="command", required=True)

    def source(p: argparse.ArgumentParser, positional: bool = False) -> None:
        p.add_argument("--preset", choices=sorted(PRESETS))
        p.add_argument("--instance", metavar="FILE", help="instance JSON file")
        if positional:
            p.add_argument("file", nargs="?", help="instance JSON file (same as --instance)")

    run = sub.add_parser("run", help="run a Monte Carlo experiment and write a report")
    source(run)
    run.add_argument("--config", metavar="FILE", help="JSON file with any of the run flags")
    run.add_argument("--policies", help=f"comma-separated ids from {','.join(POLICIES)}")
    run.add_argument("--horizon", type=int)
    run.add_argument("--reps", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--stride", type=int)
    run.add_argument("--out", metavar="PATH")
    run.add_argument("--format", choices=("csv", "json"))
    run.add_argument("--threads", type=int, help="worker processes (default: all CPUs)")

    val = sub.add_parser("validate", help="check structural assumptions of an instance")
    source(val, positional=True)

    bnd = sub.add_parser("bounds", help="print regret-bound leading terms")
    source(bnd, positional=True)
    bnd.add_argument("--horizon", type=int, required=True)
    return parser


def parse_config(argv: Sequence[str]) -> RunConfig:
    """Parse ``run`` arguments into a validated :class:`RunConfig`."""
    ns = build_parser().parse_args(list(argv))
    if ns.command != "run":
        raise UsageError("parse_config expects the 'run' subcommand")
    return config_from_args(ns)


def _load(preset: str | None, path: str | None) -> BanditInstance:
    if preset and path:
        raise UsageError("give either a preset or an instance file, not both")
    if preset:
        return preset_instance(preset)
    if not path:
        raise UsageError("an instance is required (--preset or an instance file)")
    try:
        return load_instance(path)
    except OSError as exc:
        raise IOFailure(f"cannot read instance {path}: {exc}") from exc
    except InstanceError as exc:
        raise ParseError(str(exc)) from exc


def _verdict(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


def _fmt(x: float | None) -> str:
    return "-" if x is None else f"{x:.6g}"


def cmd_validate(instance: BanditInstance, out=None) -> int:
    out = out or sys.stdout
    unique = validate_unique_optimum(instance)
    print(f"instance: {instance.name or '(unnamed)'}  arms={instance.n_arms}  "
          f"clusters={instance.partition.n_clusters}", file=out)
    print(f"unique optimum: {_verdict(unique)}", file=out)
    if unique:
        gaps = compute_gaps(instance)
        print(f"strong dominance: {_verdict(validate_strong_dominance(instance, gaps))}", file=out)
    else:
        gaps = None
        print("strong dominance: n/a (optimal cluster ambiguous)", file=out)
    uni = validate_unimodality(instance)
    for k, ok in enumerate(uni):
        print(f"unimodality cluster {k}: {_verdict(ok)}", file=out)
    if not all(uni):
        print("warning: some clusters are not unimodal; utscg runs but its guarantee does not apply",
              file=out)
    if gaps is not None:
        print(f"optimal arm: {gaps.optimal_arm}  optimal cluster: {gaps.optimal_cluster}  "
              f"D_max: {_fmt(gaps.d_max)}", file=out)
        print("arm gaps: " + " ".join(_fmt(g) for g in gaps.per_arm_gap), file=out)
        print(f"{'cluster':>7} {'gap':>10} {'prime_gap':>10} {'distance':>10} {'width':>10}", file=out)
        for k in range(instance.partition.n_clusters):
            print(f"{k:>7} {_fmt(gaps.per_cluster_gap[k]):>10} "
                  f"{_fmt(gaps.per_cluster_prime_gap[k]):>10} "
                  f"{_fmt(gaps.per_cluster_distance[k]):>10} "
                  f"{_fmt(gaps.per_cluster_width[k]):>10}", file=out)
    return EXIT_OK


def cmd_bounds(instance: BanditInstance, horizon: int, out=None) -> int:
    out = out or sys.stdout
    if horizon < 1:
        raise UsageError(f"--horizon must be >= 1, got {horizon}")
    print(f"regret-bound leading terms at T={horizon} (natural log)", file=out)
    for k, v in all_bounds(instance, horizon).items():
        text = f"{v:.6g}" if isinstance(v, float) else f"n/a (assumption violated: {v})"
        print(f"theorem{k}: {text}", file=out)
    return EXIT_OK


def cmd_run(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    instance = _load(cfg.preset, cfg.instance)
    if not all(validate_unimodality(instance)) and "utscg" in cfg.policies:
        print("warning: instance has non-unimodal clusters; running utscg anyway", file=sys.stderr)
    report = run_experiment(instance, cfg.policies, cfg.horizon, cfg.reps, seed=cfg.seed,
                            stride=cfg.stride, workers=cfg.threads)
    text = report.to_csv() if cfg.format == "csv" else report.to_json(asdict(cfg))
    try:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"error: cannot write {cfg.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"T={cfg.horizon} reps={cfg.reps} seed={cfg.seed} -> {cfg.out}", file=out)
    print(f"{'policy':<8} {'mean_regret':>12} {'stderr':>9} {'optimal_rate':>13}", file=out)
    for pid in cfg.policies:
        m, se, rate = report.final(pid)
        print(f"{pid:<8} {m:>12.2f} {se:>9.2f} {rate:>13.4f}", file=out)
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if ns.command == "run":
            return cmd_run(config_from_args(ns))
        path = ns.instance or ns.file
        if ns.instance and ns.file:
            raise UsageError("give the instance file once")
        instance = _load(ns.preset, path)
        if ns.command == "validate":
            return cmd_validate(instance)
        return cmd_bounds(instance, ns.horizon)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except IOFailure as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
