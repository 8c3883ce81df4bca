"""Small-eigenvalue (drift) stability: the 7c/6 threshold, the quadratic for
the slow eigenvalue pair, its asymptotic real/imaginary parts, and the outer
eta profile whose averaged slope closes the reduction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import ModelParams
from .profile import MomentTable, moments


@dataclass(frozen=True)
class DriftSpectrum:
    tau_h: float
    k: float
    lambda_pair: tuple[complex, complex]
    re_asym: float
    im_asym: float


@dataclass(frozen=True)
class EtaProfile:
    x: np.ndarray
    eta: np.ndarray
    jump: float          # eta(0+) - eta(0-)
    eta_x_mean: float    # <eta_x> = (eta_x(0-) + eta_x(0+)) / 2


def tau_h_threshold(c: float, table: MomentTable | None = None) -> tuple[float, float]:
    """Drift-Hopf threshold tau_h = c * (int w_y^2)/(int w w_y^2) = 7c/6.

    Returns (exact value, quadrature-based cross-check).
    """
    exact = 7.0 * c / 6.0
    table = table or moments(0.0)
    return exact, c * table.J1 / table.J2


def k_factor(p: ModelParams, table: MomentTable | None = None) -> float:
    """Geometric factor k = (int w^3 / 3) (b/Dv) sech^2(sqrt(b/Dv) l)."""
    table = table or moments(0.0)
    arg = math.sqrt(p.b / p.Dv) * p.l
    return (table.J3 / 3.0) * (p.b / p.Dv) / math.cosh(arg) ** 2


def small_lambda_roots(tau: float, p: ModelParams,
                       table: MomentTable | None = None) -> DriftSpectrum:
    """Roots of (7/6) tau lam^2 - (tau - 7c/6 - (35/36) d1 tau k) lam + (35/36) d1 k c = 0.

    Coefficients are assembled from the quadrature moments so the gamma > 0
    generalization stays open; at gamma = 0 they reduce to the 7/6 and 35/36
    rationals.
    """
    if tau <= 0:
        raise ValueError(f"tau must be > 0, got {tau}")
    table = table or moments(0.0)
    c, d1 = p.c, p.delta1
    k = k_factor(p, table)
    ratio = table.J1 / table.J2          # 6/5 / (36/35) = 7/6 at gamma=0

    # quadratic A lam^2 + B lam + C from lam (J1 - tau/(c+tau lam) J2) = -d1 k,
    # multiplied through by (c + tau lam)/J2:
    A = ratio * tau
    B = -(tau - ratio * c - (d1 * k / table.J2) * tau)
    C = (d1 * k / table.J2) * c

    disc = B * B - 4.0 * A * C
    if disc >= 0:
        s = math.sqrt(disc)
        roots = ((-B + s) / (2 * A), (-B - s) / (2 * A))
    else:
        s = math.sqrt(-disc)
        roots = ((-B + 1j * s) / (2 * A), (-B - 1j * s) / (2 * A))

    re_asym = 3.0 / (7.0 * tau) * (tau - 7.0 * c / 6.0)
    im_asym = math.sqrt(d1 * (5.0 / 6.0) * k * c / tau)
    return DriftSpectrum(
        tau_h=tau_h_threshold(c, table)[0],
        k=k,
        lambda_pair=(complex(roots[0]), complex(roots[1])),
        re_asym=re_asym,
        im_asym=im_asym,
    )


def small_lambda_linearized(tau: float, p: ModelParams,
                            table: MomentTable | None = None) -> float:
    """Leading-order eigenvalue with tau/(c + tau lam) frozen at tau/c."""
    table = table or moments(0.0)
    k = k_factor(p, table)
    return -p.delta1 * k / (table.J1 - (tau / p.c) * table.J2)


def eta_profile(p: ModelParams, V0: float, n: int = 2000,
                table: MomentTable | None = None) -> EtaProfile:
    """Piecewise-cosh outer eta with jump -(V0/(c Dv)) int w^2 at x = 0.

    Odd apart from the jump; eta_x vanishes at both endpoints. The grid is
    even-sized so no node sits on the discontinuity.
    """
    table = table or moments(0.0)
    beta = math.sqrt(p.b / p.Dv)
    J0 = table.J0
    K = V0 * J0 / (p.c * p.Dv * 2.0 * math.cosh(beta * p.l))
    if n % 2:
        n += 1
    x = np.linspace(-p.l, p.l, n + 1)
    x = np.delete(x, n // 2)  # drop the x=0 node; jump lives there
    eta = np.where(
        x < 0,
        K * np.cosh(beta * (x + p.l)),
        -K * np.cosh(beta * (x - p.l)),
    )
    jump = -V0 * J0 / (p.c * p.Dv)
    mean_slope = K * beta * math.sinh(beta * p.l)
    return EtaProfile(x=x, eta=eta, jump=jump, eta_x_mean=mean_slope)


def eta_x_mean_closed_form(p: ModelParams, table: MomentTable | None = None) -> float:
    """<eta_x> on the upper branch: (b c / (6 Dv)) int w^2 tanh^2(sqrt(b/Dv) l)."""
    table = table or moments(0.0)
    arg = math.sqrt(p.b / p.Dv) * p.l
    return p.b * p.c / (6.0 * p.Dv) * table.J0 * math.tanh(arg) ** 2
