"""Sweep the mean photon number of the V-system thermal preset."""

import argparse
from pathlib import Path

from jcsim.runner import from_preset, sweep


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--values", default="0.008,0.1,1,10")
    ap.add_argument("--preset", default="v_thermal")
    ap.add_argument("--threads", type=int, default=2)
    ap.add_argument("--out", type=Path, default=Path("jcsim_out/nbar_sweep"))
    args = ap.parse_args(argv)
    vals = [float(v) for v in args.values.split(",")]
    res = sweep(from_preset(args.preset), "vsystem.modes.*.n_bar", vals, args.out, args.threads)
    for row in res.summary:
        if row["status"] == "ok":
            print(f"n̄ = {row['value']:<8g} max|ρ_fe| = {row['max_abs_rho_fe']:.4e}  "
                  f"final ρ_ee = {row['final_rho_ee']:.4e}")
        else:
            print(f"n̄ = {row['value']:<8g} failed: {row['error']}")
    print(args.out / "summary.tsv")


if __name__ == "__main__":
    main()
