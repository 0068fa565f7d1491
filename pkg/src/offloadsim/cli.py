"""Command line front end.

Subcommands: run (one episode), sweep (axis sweep table), compare (replicated
runs of several configs, joined summary), profiles list.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .delay import load_profiles
from .errors import ConfigError, OffloadSimError
from .runner import (SWEEP_AXES, ExperimentConfig, run_episode,
                     run_replications, run_sweep, write_metrics, write_sweep)


def _out_dir(path: str) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_run(args: argparse.Namespace) -> int:
    cfg = ExperimentConfig.from_file(args.config)
    seed = args.seed if args.seed is not None else cfg.seed
    metrics = run_episode(cfg, seed=seed)
    out = _out_dir(args.out)
    csv_path = out / f"{cfg.label}_seed{seed}.csv"
    write_metrics(metrics, csv_path, cfg)
    agg = metrics.summary()
    print(f"wrote {csv_path}")
    print(f"steps={agg['steps']} mean_reward={agg['mean_reward']:.4f} "
          f"success_rate={agg['success_rate']:.4f} "
          f"mean_delay_s={agg['mean_delay_s']:.4f}")
    return 0


def _parse_values(axis: str, raw: str) -> list:
    parts = [p.strip() for p in raw.split(",") if p.strip()]
    if not parts:
        raise ConfigError("--values must contain at least one value")
    if axis == "profile_pair":
        return parts
    try:
        return [float(p) for p in parts]
    except ValueError as exc:
        raise ConfigError(f"axis {axis} takes numeric values: {exc}") from exc


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = ExperimentConfig.from_file(args.config)
    values = _parse_values(args.axis, args.values)
    rows = run_sweep(cfg, args.axis, values)
    out = _out_dir(args.out)
    csv_path = out / f"{cfg.label}_sweep_{args.axis}.csv"
    write_sweep(rows, csv_path)
    print(f"wrote {csv_path} ({len(rows)} rows)")
    return 0


def cmd_compare(args: argparse.Namespace) -> int:
    out = _out_dir(args.out)
    entries = []
    for path in args.configs:
        cfg = ExperimentConfig.from_file(path)
        aggs = [m.summary() for m in run_replications(cfg)]
        rewards = [a["mean_reward"] for a in aggs]
        entry = {
            "label": cfg.label,
            "policy": cfg.policy,
            "config_file": str(path),
            "replications": len(aggs),
            "mean_reward": sum(rewards) / len(rewards),
            "mean_reward_min": min(rewards),
            "mean_reward_max": max(rewards),
            "mean_delay_s": sum(a["mean_delay_s"] for a in aggs) / len(aggs),
            "success_rate": sum(a["success_rate"] for a in aggs) / len(aggs),
        }
        entries.append(entry)
        print(f"{entry['label']}: reward {entry['mean_reward']:.3f} "
              f"[{entry['mean_reward_min']:.3f}, {entry['mean_reward_max']:.3f}] "
              f"success {entry['success_rate']:.3f} "
              f"delay {entry['mean_delay_s']:.3f}s")
    json_path = out / "compare.json"
    json_path.write_text(json.dumps({"runs": entries}, indent=2) + "\n",
                         encoding="utf-8")
    print(f"wrote {json_path}")
    return 0


def cmd_profiles(args: argparse.Namespace) -> int:
    profiles = load_profiles(args.profiles_path, args.timing_interpretation)
    for name in sorted(profiles):
        p = profiles[name]
        print(f"{p.name:16s} {p.placement:5s} ttft_s={p.ttft_s:.3f} "
              f"tpot_s={p.tpot_s:.6f} quality={p.quality_index:.0f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="offloadsim",
        description="Simulate LLM task offloading in an edge-cloud network.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one episode and write CSV + JSON")
    p_run.add_argument("--config", required=True, help="YAML experiment config")
    p_run.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
    p_run.add_argument("--out", default=".", help="output directory")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="sweep one axis over a value list")
    p_sweep.add_argument("--config", required=True, help="YAML experiment config")
    p_sweep.add_argument("--axis", required=True, choices=SWEEP_AXES)
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated values; profile_pair values "
                              "look like edge_name+cloud_name")
    p_sweep.add_argument("--out", default=".", help="output directory")
    p_sweep.set_defaults(func=cmd_sweep)

    p_cmp = sub.add_parser("compare",
                           help="run several configs with replications and "
                                "emit a joined summary")
    p_cmp.add_argument("--configs", required=True, nargs="+",
                       help="YAML experiment configs")
    p_cmp.add_argument("--out", default=".", help="output directory")
    p_cmp.set_defaults(func=cmd_compare)

    p_prof = sub.add_parser("profiles", help="inspect the LLM profile library")
    p_prof.add_argument("action", choices=["list"])
    p_prof.add_argument("--profiles-path", default=None,
                        help="alternative profile library JSON")
    p_prof.add_argument("--timing-interpretation", default="tpot",
                        choices=["tpot", "ttft"],
                        help="how to read single-number timing records")
    p_prof.set_defaults(func=cmd_profiles)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OffloadSimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
