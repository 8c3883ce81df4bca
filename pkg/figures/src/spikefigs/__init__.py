"""Render publication-style figures from spikelab CSV artifacts.

This package consumes only the documented CSV schemas (snapshots, track,
branch, spectral-curve and summary files); it never imports the numerical
package. All rendering is deterministic: re-running a recipe on identical
CSVs produces byte-identical PNG output.
"""

from .recipes import KINDS, FigureRecipe, render
from .schema import SchemaMismatch, read_table

__all__ = ["FigureRecipe", "KINDS", "SchemaMismatch", "read_table", "render"]
