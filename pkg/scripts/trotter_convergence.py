"""Second-order convergence of the split-operator step in the molecular preset."""

import argparse
import dataclasses as dc

import numpy as np

from jcsim import molecular as mol


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--t-final", type=float, default=20000.0)
    ap.add_argument("--field", default="thermal")
    args = ap.parse_args(argv)

    base = dc.replace(mol.preset_config(args.field, t_final=args.t_final), snapshot_times=())
    dts = (2.0, 1.0, 0.5, 0.125)
    pe = {dt: mol.propagate_mixture(dc.replace(base, dt=dt, sample_every=int(round(20 / dt)))).pop_e
          for dt in dts}
    ref = pe[0.125]
    prev = None
    for dt in dts[:-1]:
        err = np.abs(pe[dt] - ref).max()
        ratio = "" if prev is None else f"  ratio {prev / err:.2f}"
        print(f"dt = {dt:5.3f}  max|ΔTr ρ_ee| = {err:.3e}{ratio}")
        prev = err


if __name__ == "__main__":
    main()
