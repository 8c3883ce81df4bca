"""Model parameters, 1-D grids, field storage and the shared PDE right-hand sides.

The system is

    u_t       = a - u + u^3/(w v) + delta1 u_xx
    theta v_t = u^2 - b v + Dv v_xx
    tau w_t   = u - c w + delta2 w_xx

on [-l, l] (or [0, l] in half-domain mode) with Neumann boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DegenerateDenominator, GridTooSmall

DENOM_TOL = 1e-12


@dataclass(frozen=True)
class ModelParams:
    a: float = 0.5        # activator background feed, >= 0
    b: float = 1.0        # inhibitor decay
    c: float = 1.0        # w decay
    delta1: float = 1e-4  # activator diffusivity, << 1
    Dv: float = 1.0       # inhibitor diffusivity
    theta: float = 0.0    # v time scaling
    tau: float = 0.0      # w time scaling
    l: float = 4.0        # half-domain length
    delta2: float | None = None  # defaults to delta1**2

    def __post_init__(self):
        if self.a < 0:
            raise ValueError(f"a must be >= 0, got {self.a}")
        for name in ("b", "c", "delta1", "Dv", "l"):
            v = getattr(self, name)
            if not v > 0:
                raise ValueError(f"{name} must be > 0, got {v}")
        for name in ("theta", "tau"):
            v = getattr(self, name)
            if v < 0:
                raise ValueError(f"{name} must be >= 0, got {v}")
        if self.delta2 is None:
            object.__setattr__(self, "delta2", self.delta1 ** 2)
        elif not self.delta2 > 0:
            raise ValueError(f"delta2 must be > 0, got {self.delta2}")

    def with_(self, **kwargs) -> "ModelParams":
        return replace(self, **kwargs)

    @property
    def homogeneous_state(self) -> tuple[float, float, float]:
        """Spatially uniform fixed point (u, v, w) = (a+bc, u^2/b, u/c)."""
        u = self.a + self.b * self.c
        return u, u * u / self.b, u / self.c


@dataclass(frozen=True)
class Grid1D:
    n: int
    x: np.ndarray
    h: float

    @classmethod
    def make(cls, n: int, l: float, half: bool = False) -> "Grid1D":
        if n < 3:
            raise GridTooSmall(f"need n >= 3 nodes, got {n}")
        lo = 0.0 if half else -l
        x = np.linspace(lo, l, n)
        return cls(n=n, x=x, h=float(x[1] - x[0]))

    @property
    def half(self) -> bool:
        return self.x[0] == 0.0


@dataclass
class FieldTriple:
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray

    def copy(self) -> "FieldTriple":
        return FieldTriple(self.u.copy(), self.v.copy(), self.w.copy())

    def all_finite(self) -> bool:
        return bool(
            np.all(np.isfinite(self.u))
            and np.all(np.isfinite(self.v))
            and np.all(np.isfinite(self.w))
        )


def reaction_terms(fields: FieldTriple, p: ModelParams, tol: float = DENOM_TOL) -> FieldTriple:
    """Pointwise reaction terms (F_u, F_v, F_w); diffusion excluded.

    Raises DegenerateDenominator if |v*w| drops below ``tol`` anywhere.
    """
    u, v, w = fields.u, fields.v, fields.w
    vw = v * w
    if np.any(np.abs(vw) < tol):
        raise DegenerateDenominator(
            f"min |v*w| = {np.min(np.abs(vw)):.3e} below tolerance {tol:.1e}"
        )
    fu = p.a - u + u ** 3 / vw
    fv = u ** 2 - p.b * v
    fw = u - p.c * w
    return FieldTriple(fu, fv, fw)


def laplacian_neumann(field: np.ndarray, h: float) -> np.ndarray:
    """Second-order Laplacian with ghost-node reflection at both ends.

    Nested differences keep the roundoff floor well below the Newton
    tolerances used by the continuation engine.
    """
    f = np.asarray(field, dtype=float)
    if f.shape[0] < 3:
        raise GridTooSmall(f"need at least 3 nodes, got {f.shape[0]}")
    out = np.empty_like(f)
    d = np.diff(f)
    out[1:-1] = (d[1:] - d[:-1]) / h ** 2
    # ghost reflection: f[-1] = f[1], f[n] = f[n-2]
    out[0] = 2.0 * d[0] / h ** 2
    out[-1] = -2.0 * d[-1] / h ** 2
    return out
