"""End-to-end demo: generate small artifacts, then render every recipe kind.

Shells out to the `spikelab` command line (the numerical package is a
separate component; only its CSV artifacts are consumed here) and draws one
figure per recipe kind into <out>/png/. Used by the top-level `make figures`
target.
"""

from __future__ import annotations

import argparse
import subprocess
import sys
from pathlib import Path

from .recipes import FigureRecipe, render

MODEL = ["--set", "a=0.5", "--set", "b=1", "--set", "c=1",
         "--set", "delta1=1e-4"]


def _spikelab(*args: str) -> None:
    cmd = [sys.executable, "-m", "spikelab.cli", *args]
    print("+", " ".join(cmd[2:]))
    subprocess.run(cmd, check=True)


def generate_artifacts(work: Path) -> dict[str, Path]:
    """Run a small set of spikelab commands; return artifact paths by role."""
    sim_dir = work / "simulate"
    _spikelab("simulate", *MODEL, "--set", "l=2", "--set", "Dv=1.5",
              "--set", "n=801", "--set", "t_end=3", "--set", "dt=0.01",
              "--set", "output_stride=10", "--set", "snapshots=60",
              "--out", str(sim_dir))
    branch_dir = work / "branch"
    _spikelab("continue", *MODEL, "--set", "l=4", "--set", "Dv=1.2",
              "--set", "Dv_start=1.2", "--set", "Dv_end=1.0",
              "--set", "n=2001", "--out", str(branch_dir))
    nlep_dir = work / "nlep"
    _spikelab("nlep-theta", "--set", "a=0.01", "--set", "b=1",
              "--set", "c=1", "--set", "delta1=1e-4", "--set", "l=1",
              "--set", "Dv=1", "--out", str(nlep_dir))
    sweep_dir = work / "sweep"
    _spikelab("sweep", "nucleation", "a", "0.3,0.4,0.5,0.6",
              "--set", "b=1", "--set", "c=1", "--set", "l=4",
              "--set", "delta1=1e-4", "--out", str(sweep_dir))
    return {
        "snapshots": sim_dir / "snapshots.csv",
        "track": sim_dir / "track.csv",
        "branch": branch_dir / "branch.csv",
        "curve": nlep_dir / "f_of_lambda.csv",
        "summary": sweep_dir / "summary.csv",
    }


def recipes_for(artifacts: dict[str, Path], png_dir: Path) -> list[FigureRecipe]:
    return [
        FigureRecipe("fig-spacetime", "heatmap",
                     {"snapshots": str(artifacts["snapshots"])},
                     str(png_dir / "spacetime_u.png"),
                     title="activator space-time", options={"field": "u"}),
        FigureRecipe("fig-track", "track",
                     {"track": str(artifacts["track"])},
                     str(png_dir / "spike_track.png"),
                     title="spike position"),
        FigureRecipe("fig-nuc-bif", "branch",
                     {"branch": str(artifacts["branch"])},
                     str(png_dir / "bifurcation.png"),
                     title="steady branch with fold"),
        FigureRecipe("fig-f-curve", "spectral",
                     {"curve": str(artifacts["curve"])},
                     str(png_dir / "f_of_lambda.png"),
                     title="spectral function f"),
        FigureRecipe("fig-dnuc", "threshold",
                     {"summary": str(artifacts["summary"])},
                     str(png_dir / "dnuc_vs_a.png"),
                     title="nucleation threshold",
                     options={"quantity": "D_nuc"}),
    ]


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="out/figures")
    args = ap.parse_args(argv)
    out = Path(args.out)
    artifacts = generate_artifacts(out / "artifacts")
    for recipe in recipes_for(artifacts, out / "png"):
        print(render(recipe))
    return 0


if __name__ == "__main__":
    sys.exit(main())
