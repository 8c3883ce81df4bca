"""Outer-region BVP machinery: R, f, G, the chi quadrature, the coupled
(V0, mu) Newton solve, nucleation threshold, and the closed-form small-a /
homogeneous-background amplitude roots.

In the outer region w = u/c and v = c u^2/(u-a), so u satisfies
Dv (f(u) u_x)_x = R(u) on (0+, l) with u_x(l) = 0, where
f(u) = c u (2a-u)/(u-a)^2 and R(u) = u^2 - b c u^2/(u-a).
A first integral G with G' = -R f turns the matching into the algebraic
pair solved here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import (
    ComplexRoots,
    NewtonDiverged,
    OutOfRange,
    PoleAtBackground,
    QuadratureNotConverged,
    RegimeMismatch,
)
from .model import ModelParams
from .profile import gamma_of

POLE_TOL = 1e-12


class Regime(Enum):
    NUCLEATING = "nucleating"
    HOMOGENEOUS = "homogeneous"


@dataclass(frozen=True)
class OuterSolve:
    V0: float
    mu: float
    u0p: float
    chi_of_mu: float
    converged: bool
    residuals: tuple[float, float]


@dataclass(frozen=True)
class NucleationResult:
    regime: Regime
    chi_max: float | None = None
    D_nuc: float | None = None
    V0_at_fold: float | None = None


def _check_pole(u, a: float):
    if np.any(np.abs(np.asarray(u) - a) < POLE_TOL):
        raise PoleAtBackground(f"u within {POLE_TOL:.0e} of the background a={a}")


def R_of(u, p: ModelParams):
    _check_pole(u, p.a)
    u = np.asarray(u, dtype=float)
    out = u ** 2 - p.b * p.c * u ** 2 / (u - p.a)
    return out if out.ndim else float(out)


def f_of(u, p: ModelParams):
    _check_pole(u, p.a)
    u = np.asarray(u, dtype=float)
    out = p.c * u * (2.0 * p.a - u) / (u - p.a) ** 2
    return out if out.ndim else float(out)


def Rprime_of(u, p: ModelParams):
    """R'(u) = 2u + b f(u)."""
    u = np.asarray(u, dtype=float)
    out = 2.0 * u + p.b * f_of(u, p)
    return out if out.ndim else float(out)


def G_of(xi, p: ModelParams):
    """Closed-form antiderivative of -R f, i.e. G' = -R(xi) f(xi)."""
    _check_pole(xi, p.a)
    xi = np.asarray(xi, dtype=float)
    a, b, c = p.a, p.b, p.c
    t = xi - a
    out = c * (
        t ** 3 / 3.0
        + 0.5 * (2.0 * a - b * c) * t ** 2
        - 2.0 * a * b * c * t
        - 2.0 * a ** 3 * np.log(t)
        + (a ** 4 - 2.0 * a ** 3 * b * c) / t
        - a ** 4 * b * c / (2.0 * t ** 2)
    )
    return out if out.ndim else float(out)


def u0p_of_V0(V0: float, p: ModelParams) -> tuple[float, float]:
    """Matching value u(0+) = V0 gamma / (c sqrt(delta1)) and gamma itself."""
    g = gamma_of(p.a, p.c, p.delta1, V0)
    return V0 * g / (p.c * math.sqrt(p.delta1)), g


def chi_of(mu: float, u0p: float, p: ModelParams, tol: float = 1e-11) -> float:
    """Integrated-by-parts chi(mu); finite up to and including mu = 2a.

    The substitution xi = mu - s^2 removes the sqrt endpoint behaviour,
    so adaptive quadrature converges to ~1e-11 absolute.
    """
    if not (p.a < u0p < mu <= 2.0 * p.a + 1e-14):
        raise OutOfRange(f"need a < u0p < mu <= 2a, got a={p.a}, u0p={u0p}, mu={mu}")
    Gmu = G_of(mu, p)
    dG0 = Gmu - G_of(u0p, p)
    if dG0 < 0:
        dG0 = 0.0
    boundary = -2.0 * math.sqrt(dG0) / R_of(u0p, p)

    smax = math.sqrt(mu - u0p)

    def integrand(s):
        xi = mu - s * s
        dG = Gmu - G_of(xi, p)
        if dG < 0:
            dG = 0.0
        return 2.0 * s * 2.0 * math.sqrt(dG) * Rprime_of(xi, p) / R_of(xi, p) ** 2

    val, err = quad(integrand, 0.0, smax, epsabs=tol, epsrel=1e-10, limit=200)
    if err > max(100 * tol, 1e-8 * abs(val)):
        raise QuadratureNotConverged(f"chi quadrature error estimate {err:.2e}")
    return boundary + val


def chi_improper(mu: float, u0p: float, p: ModelParams) -> float:
    """Direct (improper) form of chi; cross-check only, for mu well below 2a."""
    Gmu = G_of(mu, p)
    smax = math.sqrt(mu - u0p)

    def integrand(s):
        xi = mu - s * s
        dG = Gmu - G_of(xi, p)
        return 2.0 * s * f_of(xi, p) / math.sqrt(max(dG, 1e-300))

    val, _ = quad(integrand, 0.0, smax, epsabs=1e-10, epsrel=1e-9, limit=200)
    return val


def _flux_residual(V0: float, mu: float, p: ModelParams) -> float:
    """Scaled residual of the flux-matching equation.

    Zero when 3 V0^2 sqrt(1-2g)/(sqrt(2 delta1 Dv) c^2) = sqrt(G(mu)-G(u0p)).
    """
    u0p, g = u0p_of_V0(V0, p)
    if not (p.a < u0p < mu):
        raise OutOfRange(f"u0p={u0p} outside (a, mu)=({p.a}, {mu})")
    dG = G_of(mu, p) - G_of(u0p, p)
    lhs = 3.0 * V0 ** 2 * math.sqrt(1.0 - 2.0 * g) / math.sqrt(p.Dv)
    rhs = math.sqrt(2.0 * p.delta1) * p.c ** 2 * math.sqrt(max(dG, 0.0))
    return lhs - rhs


def _solve_V0_at_mu(mu: float, p: ModelParams) -> float:
    """Solve the flux-matching equation for V0 at fixed mu.

    The residual vanishes at two amplitudes; the physical (large-amplitude)
    root is the one where the residual crosses from negative to positive, so
    the bracket is grown downward from the small-a amplitude scale until the
    residual turns negative, then upward until it turns positive.
    """
    vmin = 4.0 * p.a * p.c * math.sqrt(p.delta1) / (1.0 - GAMMA_GUARD)

    def res(v):
        try:
            return _flux_residual(v, mu, p)
        except (OutOfRange, PoleAtBackground):
            return math.inf

    lo = max(_V0_plus_smalla(p), 2.0 * vmin)
    tries = 0
    while not res(lo) < 0 and tries < 80:
        lo *= 0.7
        tries += 1
        if lo <= vmin:
            raise NewtonDiverged(f"no negative flux residual above vmin at mu={mu}")
    if not res(lo) < 0:
        raise NewtonDiverged(f"could not bracket V0 (lower) at mu={mu}")
    hi = 2.0 * lo
    tries = 0
    while not res(hi) > 0 and tries < 80:
        hi *= 2.0
        tries += 1
    if not res(hi) > 0:
        raise NewtonDiverged(f"could not bracket V0 (upper) at mu={mu}")
    return brentq(lambda v: _flux_residual(v, mu, p), lo, hi, xtol=1e-15, rtol=1e-14)


GAMMA_GUARD = 1e-8


def _V0_plus_smalla(p: ModelParams) -> float:
    arg = math.sqrt(p.b / p.Dv) * p.l
    return math.sqrt(p.b * p.Dv) * p.c ** 2 / 3.0 * math.tanh(arg)


def nucleation_threshold(p: ModelParams, tol: float = 1e-12,
                         max_iter: int = 200) -> NucleationResult:
    """Saddle-node threshold D_nuc = 2 l^2 / chi(2a)^2 (self-consistent in Dv)."""
    if p.b * p.c < p.a:
        return NucleationResult(regime=Regime.HOMOGENEOUS)
    mu = 2.0 * p.a
    Dv = p.Dv
    V0 = None
    for _ in range(max_iter):
        pD = p.with_(Dv=Dv)
        V0 = _solve_V0_at_mu(mu, pD)
        u0p, _ = u0p_of_V0(V0, pD)
        chi_max = chi_of(mu, u0p, pD)
        D_new = 2.0 * p.l ** 2 / chi_max ** 2
        if abs(D_new - Dv) < tol * max(1.0, abs(D_new)):
            return NucleationResult(
                regime=Regime.NUCLEATING, chi_max=chi_max, D_nuc=D_new, V0_at_fold=V0
            )
        Dv = D_new
    raise NewtonDiverged(f"D_nuc fixed point stalled at Dv={Dv}")


def solve_V0_mu(p: ModelParams, initial_guess: tuple[float, float] | None = None,
                newton_tol: float = 1e-10, max_iter: int = 80) -> OuterSolve:
    """Damped Newton for the coupled (V0, mu) system at the given Dv.

    Residuals: r1 = scaled flux matching, r2 = chi(mu) - sqrt(2/Dv) l.
    """
    if p.b * p.c < p.a:
        raise RegimeMismatch(f"bc = {p.b*p.c} < a = {p.a}: homogeneous regime")
    if initial_guess is None:
        V0, mu = _V0_plus_smalla(p), 1.5 * p.a
    else:
        V0, mu = initial_guess

    target = math.sqrt(2.0 / p.Dv) * p.l

    def residuals(V0_, mu_):
        u0p_, _ = u0p_of_V0(V0_, p)
        r1 = _flux_residual(V0_, mu_, p)
        r2 = chi_of(mu_, u0p_, p) - target
        return np.array([r1, r2])

    def admissible(V0_, mu_):
        try:
            u0p_, _ = u0p_of_V0(V0_, p)
        except Exception:
            return False
        return p.a < u0p_ < mu_ <= 2.0 * p.a and V0_ > 0

    if not admissible(V0, mu):
        mu = 1.99 * p.a
        try:
            V0 = _solve_V0_at_mu(mu, p)
        except Exception:
            pass
    if not admissible(V0, mu):
        raise OutOfRange("no admissible starting point for the (V0, mu) Newton solve")

    trace = []
    r = residuals(V0, mu)
    for _ in range(max_iter):
        nrm = float(np.max(np.abs(r)))
        trace.append(nrm)
        if nrm < newton_tol:
            u0p, _ = u0p_of_V0(V0, p)
            return OuterSolve(V0=V0, mu=mu, u0p=u0p,
                              chi_of_mu=chi_of(mu, u0p, p), converged=True,
                              residuals=(float(r[0]), float(r[1])))
        # finite-difference Jacobian
        hV = 1e-7 * max(abs(V0), 1e-8)
        hm = 1e-7 * max(abs(mu), 1e-8)
        if mu + hm > 2.0 * p.a:
            hm = -hm  # one-sided difference at the mu = 2a boundary
        J = np.empty((2, 2))
        J[:, 0] = (residuals(V0 + hV, mu) - r) / hV
        J[:, 1] = (residuals(V0, mu + hm) - r) / hm
        try:
            dz = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError as exc:
            raise NewtonDiverged(f"singular Jacobian: {exc}", trace) from exc
        step = 1.0
        for _bt in range(31):
            V0n, mun = V0 + step * dz[0], mu + step * dz[1]
            if mun > 2.0 * p.a:
                mun = 2.0 * p.a  # clamp onto the admissible boundary
            if admissible(V0n, mun):
                try:
                    rn = residuals(V0n, mun)
                except Exception:
                    step *= 0.5
                    continue
                if np.max(np.abs(rn)) < nrm or step < 1e-6:
                    V0, mu, r = V0n, mun, rn
                    break
            step *= 0.5
        else:
            raise OutOfRange(
                f"backtracking exhausted at V0={V0}, mu={mu} (Dv={p.Dv})"
            )
    raise NewtonDiverged(f"(V0, mu) Newton did not reach {newton_tol}", trace)


def outer_u_profile(x_samples, solve: OuterSolve, p: ModelParams) -> np.ndarray:
    """Outer activator on 0+ <= |x| <= l from the first integral.

    The quadrature x(u) = sqrt(Dv/2) * int_{u0p}^{u} f(xi)/sqrt(G(mu)-G(xi))
    (mu fixed by the matched solve) is inverted pointwise; the substitution
    xi = mu - s^2 removes the square-root endpoint at xi = mu.
    """
    if not solve.converged:
        raise NewtonDiverged("outer_u_profile needs a converged OuterSolve")
    xs = np.atleast_1d(np.asarray(x_samples, dtype=float))
    out = np.empty_like(xs)
    lo, hi = solve.u0p, solve.mu
    Gmu = G_of(hi, p)
    smax = math.sqrt(hi - lo)

    def integrand(s):
        xi = hi - s * s
        dG = Gmu - G_of(xi, p)
        if dG <= 0.0:
            # s -> 0 limit: dG ~ G'(mu) s^2 with G' = -R f > 0.
            return 2.0 * math.sqrt(f_of(hi, p) / -R_of(hi, p))
        return 2.0 * s * f_of(xi, p) / math.sqrt(dG)

    def x_of_u(u):
        s_u = math.sqrt(max(hi - u, 0.0))
        val, _ = quad(integrand, s_u, smax, epsabs=1e-12, epsrel=1e-10,
                      limit=200)
        return math.sqrt(p.Dv / 2.0) * val

    x_at_mu = x_of_u(hi)
    for i, x in enumerate(xs):
        t = abs(x)
        if t <= 0.0:
            out[i] = lo
        elif t >= x_at_mu:
            out[i] = hi
        else:
            out[i] = brentq(lambda u: x_of_u(u) - t, lo, hi,
                            xtol=1e-13, rtol=1e-12)
    return out if np.ndim(x_samples) else float(out[0])


def _quadratic_roots(B: float, C: float) -> tuple[float, float]:
    """Real roots of 3 V^2 - B V + C = 0, larger first."""
    disc = B * B - 12.0 * C
    if disc < 0:
        raise ComplexRoots(f"discriminant {disc:.3e} < 0")
    s = math.sqrt(disc)
    hi = (B + s) / 6.0
    lo = C / (3.0 * hi) if hi != 0 else (B - s) / 6.0
    return hi, lo


def _amplitude_quadratic(p: ModelParams, background: float) -> tuple[float, float]:
    th = math.tanh(math.sqrt(p.b / p.Dv) * p.l)
    sd = math.sqrt(p.delta1)
    B = 3.0 * p.a * p.c * sd + math.sqrt(p.b * p.Dv) * p.c ** 2 * th
    C = math.sqrt(p.Dv / p.b) * background ** 2 * p.c ** 2 * sd * th
    return _quadratic_roots(B, C)


def smalla_roots(p: ModelParams):
    """Exact quadratic roots (small-a regime) plus the asymptotic pair.

    Returns (V0_plus_asym, V0_minus_asym, (exact_hi, exact_lo)).
    """
    exact = _amplitude_quadratic(p, p.a)
    V0p = _V0_plus_smalla(p)
    V0m = math.sqrt(p.delta1) * p.a ** 2 / p.b
    return V0p, V0m, exact


def homog_roots(p: ModelParams) -> tuple[float, float]:
    """Amplitude roots when the outer background is the uniform state a + bc."""
    return _amplitude_quadratic(p, p.a + p.b * p.c)


class Background(Enum):
    SMALL_A = "small-a"
    HOMOGENEOUS = "homogeneous"


def v_outer_profile(x, V0: float, p: ModelParams,
                    background: Background = Background.SMALL_A) -> np.ndarray:
    """Closed-form cosh inhibitor profile with plateau a^2/b or (a+bc)^2/b."""
    plateau = (p.a ** 2 if background is Background.SMALL_A
               else (p.a + p.b * p.c) ** 2) / p.b
    beta = math.sqrt(p.b / p.Dv)
    x = np.asarray(x, dtype=float)
    v0 = V0 / math.sqrt(p.delta1)
    out = plateau + (v0 - plateau) * np.cosh(beta * (p.l - np.abs(x))) / math.cosh(beta * p.l)
    return out if out.ndim else float(out)
