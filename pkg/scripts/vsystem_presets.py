"""Run the four V-system presets and write their output bundles.

Each bundle holds populations, coherences and partial-trace purities as
functions of time.
"""

import argparse
from pathlib import Path

from jcsim.runner import from_preset, run_scenario

NAMES = ("v_coherent", "v_thermal", "v_two_mode_coherent", "v_two_mode_thermal")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("jcsim_out/vsystem"))
    args = ap.parse_args(argv)
    for name in NAMES:
        b = run_scenario(from_preset(name), args.out / name)
        s = b.metadata["summary"]
        print(f"{name:22s} max|ρ_fe| {s['max_abs_rho_fe']:.3e}  max|ρ_ge| {s['max_abs_rho_ge']:.3e}  "
              f"max|ρ_gf| {s['max_abs_rho_gf']:.3e}  -> {b.directory}")


if __name__ == "__main__":
    main()
