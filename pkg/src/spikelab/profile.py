"""Inner-region asymptotics of the one-spike quasi-equilibrium.

The activator core is u = (V0/(c sqrt(delta1))) (w_c(y) + gamma) with
y = x/sqrt(delta1), where w_c is the sech^2 homoclinic of
w'' - (1-2 gamma) w + w^2 = 0 and gamma solves
gamma^2 - gamma + a c sqrt(delta1)/V0 = 0 (smaller root).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GammaBranchCollision, QuadratureNotConverged
from .model import ModelParams

GAMMA_MARGIN = 1e-10


@dataclass(frozen=True)
class MomentTable:
    """Integrals of the core profile w_c (full line unless noted)."""

    I1: float  # int_0^inf w_c
    I2: float  # int_0^inf w_c^2
    J0: float  # int w_c^2
    J1: float  # int w_cy^2
    J2: float  # int w_c w_cy^2
    J3: float  # int w_c^3


@dataclass(frozen=True)
class SpikeProfile:
    V0: float
    gamma: float
    u0p: float          # outer boundary value u(0+)
    flux_coeff: float   # |v_x| as x -> 0+
    moments: MomentTable


def gamma_of(a: float, c: float, delta1: float, V0: float,
             margin: float = GAMMA_MARGIN) -> float:
    """Smaller root of gamma^2 - gamma + a c sqrt(delta1)/V0 = 0."""
    if V0 <= 0:
        raise ValueError(f"V0 must be > 0, got {V0}")
    q = 4.0 * a * c * math.sqrt(delta1) / V0
    disc = 1.0 - q
    if disc < margin:
        raise GammaBranchCollision(
            f"discriminant 1 - 4ac*sqrt(delta1)/V0 = {disc:.3e} below margin {margin:.1e}"
        )
    return 0.5 * (1.0 - math.sqrt(disc))


def wc_eval(y, gamma: float = 0.0):
    """Core homoclinic w_c(y) = (3/2)(1-2g) sech^2(sqrt(1-2g) y / 2).

    Evaluated through |y| so evenness holds exactly.
    """
    if not 0.0 <= gamma < 0.5:
        raise ValueError(f"gamma must be in [0, 1/2), got {gamma}")
    s = math.sqrt(1.0 - 2.0 * gamma)
    ay = np.abs(y)
    return 1.5 * s * s / np.cosh(0.5 * s * ay) ** 2


def wc_deriv(y, gamma: float = 0.0):
    """dw_c/dy, odd in y."""
    s = math.sqrt(1.0 - 2.0 * gamma)
    z = 0.5 * s * np.asarray(y, dtype=float)
    return -1.5 * s ** 3 * np.tanh(z) / np.cosh(z) ** 2


def inner_profile(y, V0: float, c: float, gamma: float):
    """Leading-order inner fields (U0, W0, Vconst) at inner coordinate y."""
    u0 = (V0 / c) * (wc_eval(y, gamma) + gamma)
    return u0, u0 / c, V0


def _simpson(f, lo: float, hi: float, n: int) -> float:
    x = np.linspace(lo, hi, n)
    y = f(x)
    h = (hi - lo) / (n - 1)
    return h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-2:2].sum())


def _refine_simpson(f, lo: float, hi: float, tol: float = 1e-10,
                    n0: int = 2001, max_doublings: int = 8) -> float:
    prev = _simpson(f, lo, hi, n0)
    n = n0
    for _ in range(max_doublings):
        n = 2 * n - 1
        cur = _simpson(f, lo, hi, n)
        if abs(cur - prev) < tol:
            return cur
        prev = cur
    raise QuadratureNotConverged(
        f"Simpson refinement stalled at n={n}, last change {abs(cur - prev):.2e}"
    )


def moments(gamma: float = 0.0, tol: float = 1e-10) -> MomentTable:
    """Quadrature moments of w_c; truncation chosen so tails are below ``tol``."""
    if not 0.0 <= gamma < 0.5:
        raise ValueError(f"gamma must be in [0, 1/2), got {gamma}")
    s = math.sqrt(1.0 - 2.0 * gamma)
    # slowest integrand (w_c itself) decays like exp(-s y)
    Y = max(40.0, 32.0 / s)
    w = lambda y: wc_eval(y, gamma)
    wy = lambda y: wc_deriv(y, gamma)
    I1 = _refine_simpson(w, 0.0, Y, tol)
    I2 = _refine_simpson(lambda y: w(y) ** 2, 0.0, Y, tol)
    J0 = 2.0 * I2
    J1 = 2.0 * _refine_simpson(lambda y: wy(y) ** 2, 0.0, Y, tol)
    J2 = 2.0 * _refine_simpson(lambda y: w(y) * wy(y) ** 2, 0.0, Y, tol)
    J3 = 2.0 * _refine_simpson(lambda y: w(y) ** 3, 0.0, Y, tol)
    return MomentTable(I1=I1, I2=I2, J0=J0, J1=J1, J2=J2, J3=J3)


def far_field_flux(V0: float, gamma: float, p: ModelParams) -> float:
    """Magnitude of v_x as x -> 0+: 3 V0^2 sqrt(1-2g) / (sqrt(delta1) Dv c^2)."""
    return 3.0 * V0 ** 2 * math.sqrt(1.0 - 2.0 * gamma) / (
        math.sqrt(p.delta1) * p.Dv * p.c ** 2
    )


def build_profile(V0: float, p: ModelParams, moment_tol: float = 1e-10) -> SpikeProfile:
    g = gamma_of(p.a, p.c, p.delta1, V0)
    u0p = V0 * g / (p.c * math.sqrt(p.delta1))
    return SpikeProfile(
        V0=V0,
        gamma=g,
        u0p=u0p,
        flux_coeff=far_field_flux(V0, g, p),
        moments=moments(g, moment_tol),
    )
