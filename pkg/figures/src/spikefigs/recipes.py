"""Figure recipes: declarative descriptions of one plot each.

A FigureRecipe names its input CSVs by role, the artifact kind each must
conform to, and the output image path. `render` validates every input
against the declared column schema (raising SchemaMismatch with the full
list of missing columns) and then draws a deterministic PNG: fixed canvas
size, fixed dpi, no embedded software/version metadata.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .schema import SCHEMAS, column, read_table  # noqa: E402

FIGSIZE = (6.4, 4.2)
DPI = 120


@dataclass(frozen=True)
class FigureRecipe:
    figure_id: str
    kind: str                       # one of KINDS
    inputs: dict[str, str]          # role -> CSV path
    output: str                     # PNG path
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown recipe kind {self.kind!r} "
                             f"(known: {', '.join(sorted(KINDS))})")


def _new_axes():
    fig, ax = plt.subplots(figsize=FIGSIZE, dpi=DPI)
    return fig, ax


def _draw_heatmap(recipe: FigureRecipe, ax):
    table = read_table(recipe.inputs["snapshots"], SCHEMAS["snapshots"])
    fld = recipe.options.get("field", "u")
    t = column(table, "t")
    x = column(table, "x")
    z = column(table, fld)
    times = np.unique(t)
    xs = np.unique(x)
    grid = np.full((times.size, xs.size), np.nan)
    ti = np.searchsorted(times, t)
    xi = np.searchsorted(xs, x)
    grid[ti, xi] = z
    mesh = ax.pcolormesh(xs, times, grid, cmap="viridis", shading="nearest",
                         rasterized=True)
    ax.figure.colorbar(mesh, ax=ax, label=fld)
    ax.set_xlabel(recipe.xlabel or "x")
    ax.set_ylabel(recipe.ylabel or "t")


def _draw_track(recipe: FigureRecipe, ax):
    table = read_table(recipe.inputs["track"], SCHEMAS["track"])
    t = column(table, "t")
    sid = column(table, "spike_id").astype(int)
    pos = column(table, "position")
    for s in np.unique(sid):
        mask = sid == s
        ax.plot(t[mask], pos[mask], lw=1.2, label=f"spike {s}")
    if np.unique(sid).size > 1:
        ax.legend(loc="best", fontsize=8)
    ax.set_xlabel(recipe.xlabel or "t")
    ax.set_ylabel(recipe.ylabel or "spike position")


def _draw_branch(recipe: FigureRecipe, ax):
    table = read_table(recipe.inputs["branch"], SCHEMAS["branch"])
    Dv = column(table, "Dv")
    mu = column(table, "mu")
    fold = column(table, "fold").astype(int)
    ax.plot(Dv, mu, "-", color="C0", lw=1.4)
    if fold.any():
        ax.plot(Dv[fold == 1], mu[fold == 1], "r*", ms=14,
                label="saddle-node")
        ax.legend(loc="best", fontsize=8)
    ax.set_xlabel(recipe.xlabel or "D_v")
    ax.set_ylabel(recipe.ylabel or "mu")


def _draw_spectral(recipe: FigureRecipe, ax):
    table = read_table(recipe.inputs["curve"], SCHEMAS["spectral"])
    lam = column(table, "lam")
    re = column(table, "re")
    order = np.argsort(lam)
    lam, re = lam[order], re[order]
    gaps = np.diff(lam)
    step = np.median(gaps) if gaps.size else 1.0
    breaks = np.flatnonzero(gaps > 2.5 * step)
    start = 0
    for brk in [*breaks, lam.size - 1]:
        ax.plot(lam[start:brk + 1], re[start:brk + 1], "-", color="C0",
                lw=1.4)
        start = brk + 1
    if breaks.size:
        # the widest sampling gap marks the pole
        widest = breaks[np.argmax(gaps[breaks])]
        pole = 0.5 * (lam[widest] + lam[widest + 1])
        ax.axvline(pole, color="0.5", ls="--", lw=1.0)
    ax.axhline(0.0, color="0.8", lw=0.8)
    ax.set_xlabel(recipe.xlabel or "lambda")
    ax.set_ylabel(recipe.ylabel or "Re value")


def _draw_threshold(recipe: FigureRecipe, ax):
    """Threshold curve from an aggregated sweep summary.

    Sweep summaries key each quantity as `<param>=<value>:<name>`; the
    recipe option `quantity` selects which <name> to plot against <value>.
    """
    table = read_table(recipe.inputs["summary"], SCHEMAS["summary"])
    target = recipe.options.get("quantity")
    if not target:
        raise ValueError("threshold recipe needs options['quantity']")
    xs, ys, param = [], [], None
    for q, v in zip(table["quantity"], table["value"]):
        if ":" not in q or "=" not in q:
            continue
        prefix, name = q.rsplit(":", 1)
        if name != target:
            continue
        key, raw = prefix.split("=", 1)
        param = key
        xs.append(float(raw))
        ys.append(float(v))
    if not xs:
        raise ValueError(f"no `key=value:{target}` rows in "
                         f"{recipe.inputs['summary']}")
    order = np.argsort(xs)
    ax.plot(np.asarray(xs)[order], np.asarray(ys)[order], "o-", color="C0",
            lw=1.4, ms=4)
    ax.set_xlabel(recipe.xlabel or param)
    ax.set_ylabel(recipe.ylabel or target)


KINDS = {
    "heatmap": ("snapshots", _draw_heatmap),
    "track": ("track", _draw_track),
    "branch": ("branch", _draw_branch),
    "spectral": ("curve", _draw_spectral),
    "threshold": ("summary", _draw_threshold),
}


def render(recipe: FigureRecipe) -> Path:
    """Draw one recipe to its PNG path and return the path.

    Rendering is deterministic: identical input CSVs yield byte-identical
    PNGs (the software metadata tag is stripped and no timestamps are
    embedded).
    """
    _, draw = KINDS[recipe.kind]
    fig, ax = _new_axes()
    try:
        draw(recipe, ax)
        if recipe.title:
            ax.set_title(recipe.title)
        fig.tight_layout()
        out = Path(recipe.output)
        out.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(out, format="png", dpi=DPI,
                    metadata={"Software": None})
    finally:
        plt.close(fig)
    return out


def default_role(kind: str) -> str:
    """The input role name a given recipe kind expects."""
    return KINDS[kind][0]
