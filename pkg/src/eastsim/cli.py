"""``east-sim`` command line: run, compare and sweep."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import controller as ctl
from .engine import REF_MOBILITY_ALIASES, SimConfig, run
from .errors import ConfigError
from .io import csv_text, export_run, load_config, now_iso, write_atomic, write_json
from .regioning import REGIONS

log = logging.getLogger("eastsim")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH", help="key = value config file, or a manifest.json to replay")
    p.add_argument("--out", metavar="DIR", default="out", help="output directory (default: out)")
    p.add_argument("--seed", type=int)
    p.add_argument("--rounds", type=int)
    p.add_argument("--scheme", choices=ctl.SCHEMES)
    p.add_argument("--ref-mobility", choices=("static", "center", "perimeter"))
    p.add_argument("--node-step", type=float, metavar="METERS")
    p.add_argument("--temp-jitter", type=float, metavar="SIGMA",
                   help="per-round temperature jitter in degrees C; 0 keeps temperatures static")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="east-sim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="single simulation run")
    _common(p_run)

    p_cmp = sub.add_parser("compare", help="run several schemes on the same trace")
    _common(p_cmp)
    p_cmp.add_argument("--schemes", default=f"{ctl.EAST},{ctl.CLASSICAL_PER_NODE}",
                       help="comma-separated scheme names (at least two)")

    p_sw = sub.add_parser("sweep", help="repeat a run over several seeds")
    _common(p_sw)
    p_sw.add_argument("--seeds", required=True, help="comma-separated seeds, e.g. 1,2,3")
    return parser


def resolve_config(args: argparse.Namespace) -> SimConfig:
    env_seed = os.environ.get("EAST_SIM_SEED")
    if args.config:
        cfg = load_config(args.config)
    else:
        cfg = SimConfig()
        if env_seed is not None:
            try:
                cfg = replace(cfg, seed=int(env_seed))
            except ValueError:
                raise ConfigError(f"EAST_SIM_SEED must be an integer, got {env_seed!r}") from None

    updates = {}
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.rounds is not None:
        updates["rounds"] = args.rounds
    if args.scheme is not None:
        updates["scheme"] = args.scheme
    if args.ref_mobility is not None:
        updates["ref_mobility"] = REF_MOBILITY_ALIASES[args.ref_mobility]
    if args.node_step is not None:
        updates["node_step"] = args.node_step
        updates["node_mobility"] = "random-displacement" if args.node_step > 0 else "static"
    if args.temp_jitter is not None:
        updates["temp_jitter"] = args.temp_jitter
        updates["temp_process"] = "per-round-jitter" if args.temp_jitter > 0 else "static-field"
    return replace(cfg, **updates).validate()


def cmd_run(cfg: SimConfig, out: Path) -> int:
    started = now_iso()
    export_run(run(cfg), out, started)
    return EXIT_OK


def cmd_compare(cfg: SimConfig, schemes: list[str], out: Path) -> int:
    """Run every scheme on the same seed and report per-region level deltas.

    Deltas are ``level_sum(scheme) - level_sum(reference)`` where the
    reference is EAST if listed, else the first scheme.
    """
    ref_scheme = ctl.EAST if ctl.EAST in schemes else schemes[0]
    results = {}
    for scheme in schemes:
        sc = replace(cfg, scheme=scheme)
        started = now_iso()
        results[scheme] = run(sc)
        export_run(results[scheme], out / scheme, started)

    ref = results[ref_scheme].metrics
    others = [s for s in schemes if s != ref_scheme]
    header = ["round"] + [f"delta_{s}_{r}" for s in others for r in REGIONS]
    rows = []
    deltas = {s: np.array([[m.regions[k].level_sum - e.regions[k].level_sum for k in range(3)]
                           for m, e in zip(results[s].metrics, ref)]) for s in others}
    for i, e in enumerate(ref):
        rows.append([str(e.round)] + [f"{deltas[s][i, k]:.6g}" for s in others for k in range(3)])
    write_atomic(out / "compare.csv", csv_text(header, rows))

    summary = {
        "reference": ref_scheme,
        "seed": cfg.seed,
        "rounds": cfg.rounds,
        "delta_levels": {
            s: {r: {"min": float(d[:, k].min()), "max": float(d[:, k].max()), "mean": float(d[:, k].mean())}
                for k, r in enumerate(REGIONS)}
            for s, d in deltas.items()
        },
        "power_adjust_msgs": {s: res.traffic.power_adjust_msgs for s, res in results.items()},
    }
    write_json(out / "compare_summary.json", summary)
    return EXIT_OK


AGGREGATE_COLUMNS = (
    ["seed"]
    + [f"{c}_{r}" for r in REGIONS for c in ("p_save_levels_mean", "p_save_db_mean", "p_save_node_max", "prr_min")]
    + ["beacons", "acks", "adjust_msgs"]
)


def parse_seeds(text: str) -> list[int]:
    try:
        seeds = [int(s) for s in text.replace(" ", "").split(",") if s]
    except ValueError:
        raise ConfigError(f"bad seed list {text!r}") from None
    if not seeds:
        raise ConfigError("at least one seed is required")
    unique = list(dict.fromkeys(seeds))
    if len(unique) != len(seeds):
        log.warning("duplicate seeds ignored; running %s", ",".join(map(str, unique)))
    return unique


def cmd_sweep(cfg: SimConfig, seeds: list[int], out: Path) -> int:
    rows = []
    for seed in seeds:
        sc = replace(cfg, seed=seed)
        started = now_iso()
        result = run(sc)
        export_run(result, out / f"seed_{seed}", started)
        s = result.summary(digits=6)
        row = [str(seed)]
        for r in REGIONS:
            reg = s["regions"][r]
            row += [f"{reg['p_save_levels']['mean']:.6g}", f"{reg['p_save_db']['mean']:.6g}",
                    f"{reg['p_save_node_max']:.6g}", f"{reg['prr']['min']:.6g}"]
        t = s["traffic"]
        row += [str(t["beacons"]), str(t["acks"]), str(t["power_adjust_msgs"])]
        rows.append(row)
    write_atomic(out / "aggregate.csv", csv_text(AGGREGATE_COLUMNS, rows))
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    out = Path(args.out)
    try:
        cfg = resolve_config(args)
        if args.command == "compare":
            schemes = [s for s in args.schemes.split(",") if s]
            if len(schemes) < 2 or len(set(schemes)) != len(schemes):
                print("east-sim compare: need at least two distinct schemes", file=sys.stderr)
                return EXIT_CONFIG
            bad = [s for s in schemes if s not in ctl.SCHEMES]
            if bad:
                raise ConfigError(f"unknown scheme(s): {', '.join(bad)}")
        seeds = parse_seeds(args.seeds) if args.command == "sweep" else None

        out.mkdir(parents=True, exist_ok=True)
        if args.command == "run":
            return cmd_run(cfg, out)
        if args.command == "compare":
            return cmd_compare(cfg, schemes, out)
        return cmd_sweep(cfg, seeds, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
