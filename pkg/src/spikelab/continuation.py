"""Steady states and pseudo-arclength continuation in Dv.

The steady problem is solved on the half-domain [0, l] (spike centered at
x = 0, even symmetry) with a damped Newton method and an analytic sparse
Jacobian. Branches are traced in (state, Dv) with a secant predictor and a
bordered Newton corrector; folds show up as sign changes of the Dv component
of the branch tangent.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .errors import NewtonDiverged, PositivityLost
from .model import FieldTriple, Grid1D, ModelParams
from .sim import asymptotic_spike_fields


@dataclass(frozen=True)
class BranchPoint:
    Dv: float
    mu: float            # far-field activator value u(l)
    v0: float            # spike amplitude sqrt(delta1) * v(peak)
    arclength: float
    fold: bool
    stability_hint: float  # smallest-magnitude steady-Jacobian eigenvalue estimate
    state: FieldTriple


# ---------------------------------------------------------------------------
# steady Newton

def _laplacian_matrix(n: int, h: float) -> sp.csr_matrix:
    h2 = h * h
    main = np.full(n, -2.0 / h2)
    off = np.full(n - 1, 1.0 / h2)
    L = sp.diags([off, main, off], offsets=(-1, 0, 1), format="lil")
    L[0, 1] = 2.0 / h2
    L[n - 1, n - 2] = 2.0 / h2
    return L.tocsr()


def _residual(z: np.ndarray, p: ModelParams, L: sp.csr_matrix, Dv: float) -> np.ndarray:
    n = L.shape[0]
    u, v, w = z[:n], z[n:2 * n], z[2 * n:]
    vw = v * w
    if np.any(vw <= 0):
        raise PositivityLost("v*w non-positive in steady residual")
    ru = p.delta1 * (L @ u) + p.a - u + u ** 3 / vw
    rv = Dv * (L @ v) + u ** 2 - p.b * v
    rw = p.delta2 * (L @ w) + u - p.c * w
    return np.concatenate([ru, rv, rw])


def _jacobian(z: np.ndarray, p: ModelParams, L: sp.csr_matrix, Dv: float) -> sp.csr_matrix:
    n = L.shape[0]
    u, v, w = z[:n], z[n:2 * n], z[2 * n:]
    vw = v * w
    I = sp.identity(n, format="csr")
    Auu = p.delta1 * L + sp.diags(-1.0 + 3.0 * u ** 2 / vw)
    Auv = sp.diags(-u ** 3 / (v * vw))
    Auw = sp.diags(-u ** 3 / (w * vw))
    Avu = sp.diags(2.0 * u)
    Avv = Dv * L - p.b * I
    Awu = I
    Aww = p.delta2 * L - p.c * I
    Z = None
    return sp.bmat([[Auu, Auv, Auw],
                    [Avu, Avv, Z],
                    [Awu, Z, Aww]], format="csc")


def _presolve_vw(z: np.ndarray, p: ModelParams, L: sp.csr_matrix, Dv: float) -> np.ndarray:
    """Exactly satisfy the linear v and w equations for the current u."""
    n = L.shape[0]
    u = z[:n]
    I = sp.identity(n, format="csc")
    v = splu((p.b * I - Dv * L).tocsc()).solve(u ** 2)
    w = splu((p.c * I - p.delta2 * L).tocsc()).solve(u)
    return np.concatenate([u, v, w])


def _block_norm(r: np.ndarray, z: np.ndarray, n: int) -> float:
    """Residual inf-norm with each equation scaled by its largest term."""
    u = z[:n]
    su = 1.0 + float(np.max(np.abs(u)))
    sv = 1.0 + float(np.max(u ** 2))
    return max(
        float(np.max(np.abs(r[:n]))) / su,
        float(np.max(np.abs(r[n:2 * n]))) / sv,
        float(np.max(np.abs(r[2 * n:]))) / su,
    )


def steady_newton(initial: FieldTriple, p: ModelParams, grid: Grid1D,
                  Dv: float | None = None, tol: float = 1e-9,
                  max_iter: int = 60, presolve: bool = True) -> FieldTriple:
    """Damped Newton to a steady state; raises NewtonDiverged on failure.

    ``tol`` bounds a block-scaled residual (each equation divided by the size
    of its dominant term), which keeps the target reachable at large spike
    amplitudes where raw roundoff in Dv * v_xx exceeds 1e-10.
    """
    Dv = p.Dv if Dv is None else Dv
    L = _laplacian_matrix(grid.n, grid.h)
    n = grid.n
    z = np.concatenate([initial.u, initial.v, initial.w]).astype(float)
    if presolve:
        z = _presolve_vw(z, p, L, Dv)
    r = _residual(z, p, L, Dv)
    trace = []
    for _ in range(max_iter):
        nrm = _block_norm(r, z, n)
        trace.append(nrm)
        if nrm < tol:
            return FieldTriple(z[:n].copy(), z[n:2 * n].copy(), z[2 * n:].copy())
        J = _jacobian(z, p, L, Dv)
        dz = splu(J).solve(-r)
        step = 1.0
        for _bt in range(40):
            zn = z + step * dz
            try:
                rn = _residual(zn, p, L, Dv)
            except PositivityLost:
                step *= 0.5
                continue
            if _block_norm(rn, zn, n) < nrm or step < 1e-8:
                z, r = zn, rn
                break
            step *= 0.5
        else:
            raise NewtonDiverged("steady Newton backtracking exhausted", trace)
    raise NewtonDiverged(f"steady Newton did not reach {tol}", trace)


def relax_to_basin(f: FieldTriple, p: ModelParams, grid: Grid1D,
                   t_relax: float = 40.0, dt: float = 0.02,
                   Dv: float | None = None) -> FieldTriple:
    """Pseudo-transient pre-pass: quasi-static IMEX stepping toward the
    steady state, which lands well inside Newton's basin of attraction."""
    from .sim import Stepper
    pp = p if Dv is None else p.with_(Dv=Dv)
    stepper = Stepper(pp, grid)
    t = 0.0
    while t < t_relax:
        f = stepper.step(f, dt)
        t += dt
    return f


def steady_from_asymptotics(p: ModelParams, n: int = 4001,
                            Dv: float | None = None,
                            t_relax: float = 40.0) -> tuple[FieldTriple, Grid1D]:
    """Converged steady spike on [0, l], seeded with the matched asymptotics."""
    pp = p if Dv is None else p.with_(Dv=Dv)
    grid = Grid1D.make(n, pp.l, half=True)
    guess = asymptotic_spike_fields(grid, pp, center=0.0, mode="auto")
    guess = relax_to_basin(guess, pp, grid, t_relax=t_relax)
    return steady_newton(guess, pp, grid, Dv=pp.Dv), grid


# ---------------------------------------------------------------------------
# branch continuation

def _observables(z: np.ndarray, grid: Grid1D, p: ModelParams) -> tuple[float, float]:
    n = grid.n
    u, v = z[:n], z[n:2 * n]
    mu = float(u[-1])
    ipk = int(np.argmax(u))
    v0 = float(math.sqrt(p.delta1) * v[ipk])
    return mu, v0


def _stability_hint(z: np.ndarray, p: ModelParams, L: sp.csr_matrix,
                    Dv: float, iters: int = 12) -> float:
    """Smallest-magnitude eigenvalue of the steady Jacobian by inverse power
    iteration. A hint only: its sign flips across a fold."""
    J = _jacobian(z, p, L, Dv)
    try:
        lu = splu(J)
    except RuntimeError:
        return 0.0
    rng = np.random.default_rng(0)
    x = rng.standard_normal(J.shape[0])
    x /= np.linalg.norm(x)
    for _ in range(iters):
        x = lu.solve(x)
        x /= np.linalg.norm(x)
    return float(x @ (J @ x))


def continue_branch(p: ModelParams, Dv_start: float, Dv_end: float,
                    n: int = 4001, ds: float = 0.02, ds_min: float = 1e-4,
                    ds_max: float = 0.1, max_points: int = 400,
                    tol: float = 1e-9) -> list[BranchPoint]:
    """Trace the one-spike branch from Dv_start toward Dv_end.

    Continues around folds; stops when Dv leaves [min, max](Dv_start, Dv_end)
    on the far side, when the corrector cannot recover at ds_min, or after
    max_points.
    """
    grid = Grid1D.make(n, p.l, half=True)
    L = _laplacian_matrix(n, grid.h)
    nfields = 3 * n
    wz = 1.0 / math.sqrt(nfields)          # weighted norm for the field block

    def solve_at(Dv, guess):
        return steady_newton(guess, p, grid, Dv=Dv, tol=tol)

    f0 = asymptotic_spike_fields(grid, p.with_(Dv=Dv_start), center=0.0, mode="auto")
    f0 = relax_to_basin(f0, p, grid, Dv=Dv_start)
    s0 = solve_at(Dv_start, f0)
    z0 = np.concatenate([s0.u, s0.v, s0.w])

    direction = 1.0 if Dv_end > Dv_start else -1.0
    Dv1 = Dv_start + direction * min(ds, 0.02) * max(abs(Dv_start), 1.0) * 0.1
    s1 = solve_at(Dv1, s0)
    z1 = np.concatenate([s1.u, s1.v, s1.w])

    points: list[BranchPoint] = []
    arclen = 0.0
    tangents: list[float] = []

    def add_point(z, Dv, s_arc, fold=False):
        mu, v0 = _observables(z, grid, p)
        nn = grid.n
        st = FieldTriple(z[:nn].copy(), z[nn:2 * nn].copy(), z[2 * nn:].copy())
        points.append(BranchPoint(Dv=Dv, mu=mu, v0=v0, arclength=s_arc,
                                  fold=fold,
                                  stability_hint=_stability_hint(z, p, L, Dv),
                                  state=st))

    add_point(z0, Dv_start, 0.0)
    step_len = math.sqrt((wz * np.linalg.norm(z1 - z0)) ** 2 + (Dv1 - Dv_start) ** 2)
    arclen += step_len
    add_point(z1, Dv1, arclen)
    tangents.extend([direction, (Dv1 - Dv_start) / step_len])

    zp, Dp = z0, Dv_start
    zc, Dc = z1, Dv1
    cur_ds = ds
    lo, hi = min(Dv_start, Dv_end), max(Dv_start, Dv_end)

    while len(points) < max_points:
        dlen = math.sqrt((wz * np.linalg.norm(zc - zp)) ** 2 + (Dc - Dp) ** 2)
        tz = (zc - zp) / dlen
        tD = (Dc - Dp) / dlen

        # predictor
        zg = zc + cur_ds * tz
        Dg = Dc + cur_ds * tD

        ok = False
        for _attempt in range(30):
            try:
                zn, Dn = _bordered_newton(zg, Dg, zc, Dc, tz, tD, cur_ds,
                                          p, L, wz, tol)
                ok = True
                break
            except (NewtonDiverged, PositivityLost, RuntimeError):
                cur_ds *= 0.5
                if cur_ds < ds_min:
                    break
                zg = zc + cur_ds * tz
                Dg = Dc + cur_ds * tD
        if not ok:
            break

        arclen += cur_ds
        fold = bool(tangents and tangents[-1] * ((Dn - Dc) / cur_ds) < 0)
        tangents.append((Dn - Dc) / cur_ds)
        add_point(zn, Dn, arclen, fold=fold)

        zp, Dp, zc, Dc = zc, Dc, zn, Dn
        cur_ds = min(cur_ds * 1.5, ds_max)

        past_folds = any(pt.fold for pt in points)
        if (Dc > hi + 1e-9 or Dc < lo - 1e-9):
            # allow leaving the window only before the first fold is found
            if past_folds or (direction > 0 and Dc > hi) or (direction < 0 and Dc < lo):
                break
    return points


def _bordered_newton(z, Dv, z_ref, D_ref, tz, tD, ds, p, L, wz, tol,
                     max_iter: int = 25):
    """Corrector: F(z, Dv) = 0 plus the arclength plane constraint."""
    n = L.shape[0]
    z = z.copy()
    for _ in range(max_iter):
        r = _residual(z, p, L, Dv)
        g = wz ** 2 * tz @ (z - z_ref) + tD * (Dv - D_ref) - ds
        nrm = max(_block_norm(r, z, n), abs(g))
        if nrm < tol:
            return z, Dv
        J = _jacobian(z, p, L, Dv)
        dFdD = np.concatenate([np.zeros(n), L @ z[n:2 * n], np.zeros(n)])
        B = sp.bmat([[J, sp.csc_matrix(dFdD.reshape(-1, 1))],
                     [sp.csr_matrix((wz ** 2 * tz).reshape(1, -1)),
                      sp.csc_matrix([[tD]])]], format="csc")
        rhs = -np.concatenate([r, [g]])
        dz = splu(B).solve(rhs)
        z = z + dz[:-1]
        Dv = Dv + dz[-1]
    raise NewtonDiverged(f"bordered corrector stalled at Dv={Dv}")


def fold_Dv(points: list[BranchPoint]) -> float | None:
    """Fold location by quadratic fit of Dv(arclength) around the marked point."""
    idx = [i for i, pt in enumerate(points) if pt.fold]
    if not idx:
        return None
    i = idx[0]
    sel = points[max(0, i - 2): i + 2]
    if len(sel) < 3:
        return points[i].Dv
    s = np.array([pt.arclength for pt in sel])
    d = np.array([pt.Dv for pt in sel])
    coef = np.polyfit(s, d, 2)
    if coef[0] == 0:
        return points[i].Dv
    s_star = -coef[1] / (2.0 * coef[0])
    return float(np.polyval(coef, s_star))


def write_branch_csv(path, points: list[BranchPoint]):
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["arclength", "Dv", "mu", "v0", "fold"])
        for pt in points:
            wr.writerow([f"{pt.arclength:.10g}", f"{pt.Dv:.10g}",
                         f"{pt.mu:.10g}", f"{pt.v0:.10g}", int(pt.fold)])
