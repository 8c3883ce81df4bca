"""Large-eigenvalue (amplitude) stability machinery.

Everything lives on a truncated line [-Ly, Ly] with Dirichlet ends:
L0 phi = phi'' - phi + 2 w_c phi, and the tau-coupled variant
L_lam phi = phi'' - phi + (2 + tau lam/(c + tau lam)) w_c phi.
Resolvent integrals
    f(lam)        = int w_c (L0 - lam)^{-1} w_c^2
    g(lam; c,tau) = int w_c (L_lam - lam)^{-1} w_c^2
are compared with the nonlocal multiplier A to locate Hopf thresholds.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.linalg import eigh_tridiagonal, solve_banded
from scipy.optimize import brentq

from .errors import NearSingularResolvent, NewtonDiverged, NoRootInBracket
from .model import ModelParams
from .profile import wc_eval

SINGULAR_GROWTH = 1e12


@dataclass
class LineOperator:
    """Dirichlet-truncated discretization of the sech^2 Schroedinger operators."""

    n: int = 4001
    Ly: float = 20.0
    y: np.ndarray = field(init=False)
    h: float = field(init=False)
    w: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.Ly < 20.0:
            raise ValueError(f"Ly must be >= 20, got {self.Ly}")
        if self.n % 2 == 0:
            raise ValueError("n must be odd so Simpson quadrature applies")
        self.y = np.linspace(-self.Ly, self.Ly, self.n)
        self.h = float(self.y[1] - self.y[0])
        self.w = np.asarray(wc_eval(self.y, 0.0))

    def refined(self) -> "LineOperator":
        return LineOperator(n=2 * self.n - 1, Ly=self.Ly)

    def _resolvent_solve(self, lam: complex, coeff: complex) -> np.ndarray:
        """Solve (phi'' - phi + coeff*w*phi - lam*phi) = w^2 on interior nodes."""
        h2 = self.h ** 2
        wi = self.w[1:-1]
        diag = -2.0 / h2 - 1.0 + coeff * wi - lam
        off = np.full(wi.shape[0] - 1, 1.0 / h2, dtype=complex)
        ab = np.zeros((3, wi.shape[0]), dtype=complex)
        ab[0, 1:] = off
        ab[1, :] = diag
        ab[2, :-1] = off
        rhs = (wi ** 2).astype(complex)
        phi_i = solve_banded((1, 1), ab, rhs)
        growth = np.max(np.abs(phi_i)) / max(np.max(np.abs(rhs)), 1e-300)
        if not np.all(np.isfinite(phi_i)) or growth > SINGULAR_GROWTH:
            raise NearSingularResolvent(
                f"resolvent growth {growth:.2e} at lambda={lam}", distance=1.0 / growth
            )
        phi = np.zeros(self.n, dtype=complex)
        phi[1:-1] = phi_i
        return phi

    def resolvent_integral(self, lam: complex, coeff: complex) -> complex:
        phi = self._resolvent_solve(lam, coeff)
        return _simpson_weights(self.n, self.h) @ (self.w * phi)

    def top_eigenvalues(self, coeff: float = 2.0, k: int = 2) -> np.ndarray:
        """Largest k eigenvalues of phi'' - phi + coeff*w*phi (descending)."""
        h2 = self.h ** 2
        wi = self.w[1:-1]
        d = -2.0 / h2 - 1.0 + coeff * wi
        e = np.full(wi.shape[0] - 1, 1.0 / h2)
        m = wi.shape[0]
        vals = eigh_tridiagonal(d, e, select="i",
                                select_range=(m - k, m - 1), eigvals_only=True)
        return vals[::-1]

    def top_eigenpair(self, coeff: float = 2.0, index: int = 0):
        """(eigenvalue, eigenfunction on full grid) for the index-th from the top."""
        h2 = self.h ** 2
        wi = self.w[1:-1]
        d = -2.0 / h2 - 1.0 + coeff * wi
        e = np.full(wi.shape[0] - 1, 1.0 / h2)
        m = wi.shape[0]
        vals, vecs = eigh_tridiagonal(d, e, select="i",
                                      select_range=(m - 1 - index, m - 1 - index))
        phi = np.zeros(self.n)
        phi[1:-1] = vecs[:, 0]
        return float(vals[0]), phi


def _simpson_weights(n: int, h: float) -> np.ndarray:
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-2:2] = 2.0
    return w * (h / 3.0)


class Verdict(Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    NEUTRAL = "neutral"
    HOPF = "hopf"


@dataclass(frozen=True)
class SpectrumResult:
    threshold: float
    omega: float
    verdict: Verdict
    lam: complex
    residual: float


def f_lambda(lam: complex, op: LineOperator, richardson: bool = True) -> complex:
    """f(lam) = int w (L0 - lam)^{-1} w^2 (Richardson-extrapolated in h)."""
    coarse = op.resolvent_integral(lam, 2.0)
    if not richardson:
        return coarse
    fine = _refined_twin(op).resolvent_integral(lam, 2.0)
    return (4.0 * fine - coarse) / 3.0


def g_lambda(lam: complex, c: float, tau: float, op: LineOperator,
             richardson: bool = True) -> complex:
    """g(lam; c, tau) = int w (L_lam - lam)^{-1} w^2."""
    coeff = 2.0 + tau * lam / (c + tau * lam)
    coarse = op.resolvent_integral(lam, coeff)
    if not richardson:
        return coarse
    fine = _refined_twin(op).resolvent_integral(lam, coeff)
    return (4.0 * fine - coarse) / 3.0


_TWINS: dict[int, LineOperator] = {}


def _refined_twin(op: LineOperator) -> LineOperator:
    key = id(op)
    twin = _TWINS.get(key)
    if twin is None or twin.n != 2 * op.n - 1 or twin.Ly != op.Ly:
        twin = op.refined()
        _TWINS[key] = twin
    return twin


def A_multiplier(lam: complex, theta: float, p: ModelParams,
                 V0: float | None = None) -> complex:
    """Nonlocal multiplier A(lam; theta).

    With V0 given: A = c^2 sqrt(Dv (b + theta lam)) tanh(sqrt((b+theta lam)/Dv) l)/V0.
    With V0 None, the upper-branch closed form is used (A(0)=3 exactly):
    A = 3 sqrt(1 + th*lam) tanh(L sqrt(1+th*lam)) / tanh(L), th = theta/b,
    L = l sqrt(b/Dv).
    """
    th = theta / p.b
    root = cmath.sqrt(1.0 + th * lam)  # principal branch, Re > 0
    L = p.l * math.sqrt(p.b / p.Dv)
    ratio = cmath.tanh(L * root) / math.tanh(L)
    if V0 is None:
        return 3.0 * root * ratio
    A0 = p.c ** 2 * math.sqrt(p.b * p.Dv) * math.tanh(L) / V0
    return A0 * root * ratio


def A_multiplier_infinite(lam: complex, theta_hat: float) -> complex:
    """l sqrt(b/Dv) -> infinity limit: A = 3 sqrt(1 + theta_hat lam)."""
    return 3.0 * cmath.sqrt(1.0 + theta_hat * lam)


def classify_branch(V0: float, p: ModelParams, tol: float = 1e-8) -> Verdict:
    """Theta = tau = 0 verdict from the multiplier threshold A = 6."""
    A = A_multiplier(0.0, 0.0, p, V0=V0).real
    if abs(A - 6.0) < tol:
        return Verdict.NEUTRAL
    return Verdict.UNSTABLE if A > 6.0 else Verdict.STABLE


def _newton_2d(F, x0, tol=1e-11, max_iter=60):
    x = np.array(x0, dtype=float)
    r = F(x)
    for _ in range(max_iter):
        nrm = float(np.max(np.abs(r)))
        if nrm < tol:
            return x, nrm
        J = np.empty((2, 2))
        for j in range(2):
            hstep = 1e-6 * max(abs(x[j]), 1e-3)
            xp = x.copy()
            xp[j] += hstep
            J[:, j] = (F(xp) - r) / hstep
        try:
            dx = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError:
            return None
        step = 1.0
        for _bt in range(25):
            xn = x + step * dx
            try:
                rn = F(xn)
            except Exception:
                step *= 0.5
                continue
            if np.max(np.abs(rn)) < nrm or step < 1e-4:
                x, r = xn, rn
                break
            step *= 0.5
        else:
            return None
    return None


def _hopf_solve(mismatch, omega_starts, param_start, tol=1e-11):
    """Solve mismatch(i*omega, param) = 0 (complex) for (omega, param) > 0."""
    def F(z):
        val = mismatch(1j * z[0], z[1])
        return np.array([val.real, val.imag])

    for w0 in omega_starts:
        res = _newton_2d(F, (w0, param_start), tol=tol)
        if res is None:
            continue
        (omega, par), nrm = res
        if omega > 0 and par > 0:
            return omega, par, nrm
        if omega < 0 and par > 0:  # conjugate representative
            return -omega, par, nrm
    raise NewtonDiverged(
        f"Hopf root search failed from starts {list(omega_starts)}"
    )


def hopf_theta(p: ModelParams, V0: float | None = None,
               op: LineOperator | None = None,
               asymptotic: bool = False,
               omega_starts=None, theta_start: float = 2.0) -> SpectrumResult:
    """Hopf threshold theta_h on the upper branch (tau = 0): f(i w) = A(i w; theta)."""
    op = op or LineOperator()
    if omega_starts is None:
        omega_starts = (0.8, 0.4, 0.2, 1.2, 1.6, 2.0, 2.5, 3.0)

    if asymptotic:
        mismatch = lambda lam, th: f_lambda(lam, op) - A_multiplier_infinite(lam, th)
    else:
        mismatch = lambda lam, th: f_lambda(lam, op) - A_multiplier(lam, th, p, V0=V0)

    omega, theta, nrm = _hopf_solve(mismatch, omega_starts, theta_start)
    return SpectrumResult(threshold=theta, omega=omega, verdict=Verdict.HOPF,
                          lam=1j * omega, residual=nrm)


def hopf_tau_large(p: ModelParams, op: LineOperator | None = None,
                   omega_starts=None, tau_start: float = 5.0) -> SpectrumResult:
    """Hopf threshold tau_lh on the upper branch (theta = 0): g(i w; c, tau) = 3."""
    op = op or LineOperator()
    if omega_starts is None:
        omega_starts = (1.0, 0.5, 1.5, 2.0, 0.25, 2.5, 3.0)
    mismatch = lambda lam, tau: g_lambda(lam, p.c, tau, op) - 3.0
    omega, tau, nrm = _hopf_solve(mismatch, omega_starts, tau_start)
    return SpectrumResult(threshold=tau, omega=omega, verdict=Verdict.HOPF,
                          lam=1j * omega, residual=nrm)


def lambda0_root(tau: float, c: float) -> float:
    """Unique positive root of 4 + 3 tau*lam/(c + tau*lam) - 2 lam - sqrt(1 + lam) = 0.

    tau = 0 gives exactly 5/4; tau -> infinity approaches (29 - sqrt(73))/8.
    """
    def F(lam):
        return 4.0 + 3.0 * tau * lam / (c + tau * lam) - 2.0 * lam - math.sqrt(1.0 + lam)

    lo, hi = 1e-12, 4.0
    if F(lo) * F(hi) > 0:
        raise NoRootInBracket(f"no sign change on [0, 4] for tau={tau}, c={c}")
    return brentq(F, lo, hi, xtol=1e-14, rtol=8.9e-16)
