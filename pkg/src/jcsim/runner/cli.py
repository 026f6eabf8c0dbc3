"""``jcsim`` command line: run, sweep, presets, validate."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import presets
from .config import ConfigError, from_dict, parse_config
from .run import ScenarioError, default_out_root, run_scenario, sweep


def _load(args):
    if args.config and args.preset:
        raise ConfigError("give --config or --preset, not both")
    if args.config:
        cfg = parse_config(args.config)
    elif args.preset:
        cfg = from_dict({"scenario": args.preset})
    else:
        raise ConfigError("one of --config or --preset is required")
    snaps = getattr(args, "snapshot_times", None)
    if snaps is not None:
        if cfg.kind != "molecular":
            raise ConfigError("--snapshot-times applies to molecular scenarios only")
        settings = dict(cfg.settings)
        settings["molecular"] = dict(settings["molecular"], snapshot_times_fs=snaps)
        cfg = from_dict(settings)
    return cfg


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _out_dir(args, cfg) -> Path:
    if args.out:
        return Path(args.out)
    if cfg.output_dir:
        return Path(cfg.output_dir)
    return default_out_root() / f"{cfg.scenario}-{cfg.config_hash}"


def cmd_run(args) -> int:
    cfg = _load(args)
    out = _out_dir(args, cfg)
    if args.dry_run:
        print(json.dumps(run_scenario(cfg, out, dry_run=True), indent=2, default=str))
        return 0
    bundle = run_scenario(cfg, out)
    for f in bundle.files:
        print(f)
    return 0


def cmd_sweep(args) -> int:
    cfg = _load(args)
    values = _floats(args.values)
    out = Path(args.out) if args.out else default_out_root() / f"sweep-{cfg.scenario}-{cfg.config_hash}"
    res = sweep(cfg, args.axis, values, out, threads=args.threads)
    for row in res.summary:
        print(f"{args.axis}={row['value']:g}\t{row['status']}" + (f"\t{row['error']}" if row["error"] else ""))
    print(out / "summary.tsv")
    return 1 if res.failures else 0


def cmd_presets(args) -> int:
    for name in presets.PRESETS:
        print(f"{name:22s} {presets.DESCRIPTIONS.get(name, '')}")
    return 0


def cmd_validate(args) -> int:
    cfg = _load(args)
    print(f"ok {cfg.scenario} ({cfg.kind}) hash {cfg.config_hash}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="jcsim", description="Exact Jaynes-Cummings density-matrix simulations.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def source(sp):
        sp.add_argument("--config", type=Path, help="TOML scenario file")
        sp.add_argument("--preset", choices=list(presets.PRESETS))

    r = sub.add_parser("run", help="run one scenario")
    source(r)
    r.add_argument("--out", help="output directory (default $JCSIM_OUT/<scenario>-<hash>)")
    r.add_argument("--snapshot-times", type=_floats, help="comma separated times in fs")
    r.add_argument("--dry-run", action="store_true", help="validate and print the plan only")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="run one scenario per parameter value")
    source(s)
    s.add_argument("--axis", required=True, help="dotted parameter path, e.g. vsystem.modes.*.n_bar")
    s.add_argument("--values", required=True, help="comma separated values")
    s.add_argument("--out")
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--snapshot-times", type=_floats)
    s.set_defaults(func=cmd_sweep)

    sub.add_parser("presets", help="list preset scenarios").set_defaults(func=cmd_presets)

    v = sub.add_parser("validate", help="check a config without running")
    source(v)
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ScenarioError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
