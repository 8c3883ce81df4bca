#!/usr/bin/env python3
"""Spike amplitude and far-field level along a D_v sweep.

Solves the matched (V0, mu) system at each D_v and, optionally, traces the
full steady branch with pseudo-arclength continuation to locate the fold.

Writes <out>/amplitude_curve.csv with columns Dv,V0,mu,u0p,gamma and, with
--continue-branch, <out>/branch.csv (arclength,Dv,mu,v0,fold).
"""

import argparse
import csv
from pathlib import Path

import numpy as np

from spikelab import continuation as ct
from spikelab.errors import SpikeLabError
from spikelab.model import ModelParams
from spikelab.outer import solve_V0_mu
from spikelab.profile import gamma_of


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--a", type=float, default=1.0)
    ap.add_argument("--b", type=float, default=3.0)
    ap.add_argument("--c", type=float, default=1.0)
    ap.add_argument("--l", type=float, default=3.0)
    ap.add_argument("--delta1", type=float, default=1e-4)
    ap.add_argument("--Dv-min", type=float, default=1.9)
    ap.add_argument("--Dv-max", type=float, default=3.0)
    ap.add_argument("--n-Dv", type=int, default=12)
    ap.add_argument("--continue-branch", action="store_true",
                    help="also trace the steady branch down past the fold")
    ap.add_argument("--out", default="out/amplitude_curve")
    args = ap.parse_args()

    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    rows = []
    for Dv in np.linspace(args.Dv_max, args.Dv_min, args.n_Dv):
        p = ModelParams(a=args.a, b=args.b, c=args.c, l=args.l,
                        delta1=args.delta1, Dv=float(Dv))
        try:
            sol = solve_V0_mu(p)
        except SpikeLabError as exc:
            print(f"Dv={Dv:.3f}  no solution ({type(exc).__name__})")
            continue
        g = gamma_of(p.a, p.c, p.delta1, sol.V0)
        rows.append((float(Dv), sol.V0, sol.mu, sol.u0p, g))
        print(f"Dv={Dv:.3f}  V0={sol.V0:.6f}  mu={sol.mu:.6f}")

    path = outdir / "amplitude_curve.csv"
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["Dv", "V0", "mu", "u0p", "gamma"])
        for row in rows:
            wr.writerow([f"{v:.10g}" for v in row])
    print(f"wrote {path} ({len(rows)} rows)")

    if args.continue_branch:
        p = ModelParams(a=args.a, b=args.b, c=args.c, l=args.l,
                        delta1=args.delta1, Dv=args.Dv_max)
        points = ct.continue_branch(p, args.Dv_max, args.Dv_min, n=2001)
        ct.write_branch_csv(outdir / "branch.csv", points)
        fd = ct.fold_Dv(points)
        tail = f"fold at Dv={fd:.6f}" if fd is not None else "no fold"
        print(f"wrote {outdir / 'branch.csv'} ({len(points)} points, {tail})")


if __name__ == "__main__":
    main()
