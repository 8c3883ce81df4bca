"""Time-dependent simulation of the three-component system.

First-order IMEX stepping: diffusion and the linear decay of each species are
implicit (one tridiagonal solve per species per step), the cubic interaction
is explicit. When theta = 0 (tau = 0) the v (w) equation is replaced by its
quasi-static elliptic solve. dt halves adaptively when positivity or
finiteness is lost and recovers geometrically afterwards.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np
from scipy.linalg import solve_banded

from .errors import BlowUpDetected, GammaBranchCollision, PositivityLost
from .model import FieldTriple, Grid1D, ModelParams
from .outer import (
    Background,
    OuterSolve,
    outer_u_profile,
    smalla_roots,
    solve_V0_mu,
    v_outer_profile,
)
from .profile import gamma_of, wc_eval

BLOWUP_GUARD = 1e8


# ---------------------------------------------------------------------------
# configuration

@dataclass(frozen=True)
class RampSchedule:
    """Dv(t): 'linear' -> Dv0 + rate*t, 'exponential' -> Dv0 * exp(rate*t)."""

    kind: str = "none"          # none | linear | exponential
    rate: float = 0.0

    def Dv_at(self, t: float, Dv0: float) -> float:
        if self.kind == "none":
            return Dv0
        if self.kind == "linear":
            return Dv0 + self.rate * t
        if self.kind == "exponential":
            return Dv0 * math.exp(self.rate * t)
        raise ValueError(f"unknown ramp kind {self.kind!r}")


@dataclass(frozen=True)
class InitialCondition:
    kind: str = "spike"          # spike | homogeneous | from-file
    center: float = 0.0
    mode: str = "auto"           # spike construction: auto | small-a | full
    amplitude: float = 1e-3      # perturbation amplitude (homogeneous)
    seed: int = 0
    path: str | None = None
    V0: float | None = None      # override the matched amplitude


@dataclass(frozen=True)
class SimConfig:
    params: ModelParams
    n: int = 2001
    t_end: float = 10.0
    dt: float = 1e-3
    half_domain: bool = False
    ramp: RampSchedule = RampSchedule()
    initial: InitialCondition = InitialCondition()
    output_stride: int = 50          # steps between track samples
    snapshot_times: int = 0          # number of snapshots kept (0 = final only)
    snapshot_max_nodes: int = 401

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be > 0")
        Dv_end = self.ramp.Dv_at(self.t_end, self.params.Dv)
        if Dv_end <= 0:
            raise ValueError("ramp drives Dv non-positive before t_end")


@dataclass
class Event:
    t: float
    kind: str        # nucleation | annihilation | oscillation-onset
    detail: str = ""


@dataclass
class SpikeTrack:
    times: list[float] = field(default_factory=list)
    spikes: list[list[tuple[float, float]]] = field(default_factory=list)
    Dv: list[float] = field(default_factory=list)
    events: list[Event] = field(default_factory=list)

    def counts(self) -> np.ndarray:
        return np.array([len(s) for s in self.spikes])

    def position_series(self, which: int = 0) -> tuple[np.ndarray, np.ndarray]:
        """(t, position) of the spike nearest the previous sample's position."""
        ts, xs = [], []
        last = None
        for t, sp in zip(self.times, self.spikes):
            if not sp:
                last = None
                continue
            if last is None:
                pos = sp[min(which, len(sp) - 1)][0]
            else:
                pos = min(sp, key=lambda pa: abs(pa[0] - last))[0]
            ts.append(t)
            xs.append(pos)
            last = pos
        return np.array(ts), np.array(xs)


@dataclass
class SimResult:
    grid: Grid1D
    track: SpikeTrack
    final: FieldTriple
    snapshots: list[tuple[float, FieldTriple]]
    t: float


# ---------------------------------------------------------------------------
# implicit tridiagonal helpers

def _helmholtz_banded(alpha: float, kappa: float, D: float, n: int, h: float):
    """Banded form of (alpha + kappa - D d_xx) with Neumann ghost reflection."""
    h2 = h * h
    diag = np.full(n, alpha + kappa + 2.0 * D / h2)
    upper = np.full(n, -D / h2)
    lower = np.full(n, -D / h2)
    upper[1] = -2.0 * D / h2   # superdiag entry for row 0
    lower[-2] = -2.0 * D / h2  # subdiag entry for row n-1
    ab = np.zeros((3, n))
    ab[0, 1:] = upper[1:]
    ab[1, :] = diag
    ab[2, :-1] = lower[:-1]
    return ab


class _Solver:
    """Caches the banded matrix for fixed (alpha, kappa, D, dt grouping)."""

    def __init__(self, n: int, h: float):
        self.n, self.h = n, h
        self.key = None
        self.ab = None

    def solve(self, alpha: float, kappa: float, D: float, rhs: np.ndarray) -> np.ndarray:
        key = (alpha, kappa, D)
        if key != self.key:
            self.ab = _helmholtz_banded(alpha, kappa, D, self.n, self.h)
            self.key = key
        return solve_banded((1, 1), self.ab, rhs)


class Stepper:
    def __init__(self, p: ModelParams, grid: Grid1D):
        self.p = p
        self.grid = grid
        self._su = _Solver(grid.n, grid.h)
        self._sv = _Solver(grid.n, grid.h)
        self._sw = _Solver(grid.n, grid.h)

    def step(self, f: FieldTriple, dt: float, Dv: float | None = None) -> FieldTriple:
        p = self.p
        Dv = p.Dv if Dv is None else Dv
        u, v, w = f.u, f.v, f.w
        vw = v * w
        if np.any(vw <= 0):
            raise PositivityLost("v*w non-positive entering the step")
        rhs_u = u / dt + p.a + u ** 3 / vw
        un = self._su.solve(1.0 / dt, 1.0, p.delta1, rhs_u)
        if p.theta > 0:
            vn = self._sv.solve(p.theta / dt, p.b, Dv, p.theta * v / dt + un ** 2)
        else:
            vn = self._sv.solve(0.0, p.b, Dv, un ** 2)
        if p.tau > 0:
            wn = self._sw.solve(p.tau / dt, p.c, p.delta2, p.tau * w / dt + un)
        else:
            wn = self._sw.solve(0.0, p.c, p.delta2, un)
        out = FieldTriple(un, vn, wn)
        if not out.all_finite():
            raise PositivityLost("non-finite field after step")
        if np.max(np.abs(un)) > BLOWUP_GUARD:
            raise BlowUpDetected(f"max|u| = {np.max(np.abs(un)):.3e}")
        if np.any(vn <= 0) or np.any(wn <= 0):
            raise PositivityLost("v or w lost positivity")
        return out


def step(state: FieldTriple, dt: float, p: ModelParams, grid: Grid1D,
         Dv: float | None = None) -> FieldTriple:
    """One IMEX step (convenience wrapper around Stepper)."""
    return Stepper(p, grid).step(state, dt, Dv)


# ---------------------------------------------------------------------------
# initial conditions

def _core_resolved_n(n: int, p: ModelParams, l_span: float) -> int:
    """Raise n until the spike core (width ~ sqrt(delta1)) has >= 10 nodes."""
    core = 6.0 * math.sqrt(p.delta1)
    while l_span / (n - 1) > core / 10.0:
        n = 2 * n - 1
    return n


def _smootherstep(r, r0, r1):
    t = np.clip((r - r0) / (r1 - r0), 0.0, 1.0)
    return t * t * (3.0 - 2.0 * t)


def asymptotic_spike_fields(grid: Grid1D, p: ModelParams, center: float = 0.0,
                            mode: str = "auto", V0: float | None = None) -> FieldTriple:
    """Matched inner/outer one-spike initial data.

    mode 'full' blends the inner core into the nonlinear outer profile
    (requires bc > a and Dv above threshold); 'small-a' uses the closed-form
    cosh inhibitor; 'auto' tries full, then falls back.
    """
    x = grid.x - center
    sd = math.sqrt(p.delta1)
    y = x / sd

    solve: OuterSolve | None = None
    if mode in ("auto", "full"):
        try:
            solve = solve_V0_mu(p)
        except Exception:
            if mode == "full":
                raise
            solve = None

    if solve is not None and V0 is None:
        V0 = solve.V0
    if V0 is None:
        V0 = smalla_roots(p)[2][0]  # exact upper quadratic root

    try:
        g = gamma_of(p.a, p.c, p.delta1, V0)
        u_inner = (V0 / (p.c * sd)) * (wc_eval(y, g) + g)
    except GammaBranchCollision:
        # amplitudes too small to carry a gamma-deformed core (e.g. the lower
        # quadratic root): use the undeformed core on the feed background
        g = 0.0
        u_inner = p.a + (V0 / (p.c * sd)) * wc_eval(y, 0.0)

    if solve is not None:
        r = np.abs(x)
        # sample the (expensive) implicit outer profile coarsely; it is smooth
        # and monotone, so interpolation is ample for an initial condition
        xs = np.linspace(0.0, p.l, 101)
        us = outer_u_profile(xs, solve, p)
        u_outer = np.interp(np.minimum(r, p.l), xs, us)
        s = _smootherstep(r, 5.0 * sd, 10.0 * sd)
        u = (1.0 - s) * u_inner + s * u_outer
        v_outer = p.c * u_outer ** 2 / np.maximum(u_outer - p.a, 1e-14)
        v_inner = np.full_like(u, V0 / sd)
        v = (1.0 - s) * v_inner + s * v_outer
    else:
        u = u_inner
        v = np.asarray(v_outer_profile(x, V0, p, Background.SMALL_A))
    w = u / p.c
    return FieldTriple(u, v, np.asarray(w))


def homogeneous_fields(grid: Grid1D, p: ModelParams, amplitude: float = 0.0,
                       seed: int = 0) -> FieldTriple:
    u0, v0, w0 = p.homogeneous_state
    rng = np.random.default_rng(seed)
    pert = amplitude * rng.standard_normal(grid.n) if amplitude else 0.0
    return FieldTriple(np.full(grid.n, u0) + pert,
                       np.full(grid.n, v0),
                       np.full(grid.n, w0))


def build_initial(cfg: SimConfig, grid: Grid1D) -> FieldTriple:
    ic = cfg.initial
    if ic.kind == "spike":
        return asymptotic_spike_fields(grid, cfg.params, ic.center, ic.mode, ic.V0)
    if ic.kind == "homogeneous":
        return homogeneous_fields(grid, cfg.params, ic.amplitude, ic.seed)
    if ic.kind == "from-file":
        data = np.loadtxt(ic.path, delimiter=",", skiprows=1)
        return FieldTriple(data[:, 2].copy(), data[:, 3].copy(), data[:, 4].copy())
    raise ValueError(f"unknown initial kind {ic.kind!r}")


# ---------------------------------------------------------------------------
# spike tracking and events

def track_spikes(u: np.ndarray, grid: Grid1D, rel_threshold: float = 0.5,
                 min_sep_cells: int = 10) -> list[tuple[float, float]]:
    """Local maxima above rel_threshold * max(u), parabolic subgrid refinement.

    Boundary maxima are admitted. Peaks closer than min_sep_cells * h keep
    only the taller one.
    """
    n = grid.n
    umax = float(np.max(u))
    if umax <= 0:
        return []
    thr = rel_threshold * umax
    cand: list[tuple[float, float]] = []
    interior = np.nonzero(
        (u[1:-1] > u[:-2]) & (u[1:-1] >= u[2:]) & (u[1:-1] >= thr)
    )[0] + 1
    for i in interior:
        denom = u[i - 1] - 2.0 * u[i] + u[i + 1]
        dx = 0.0 if denom == 0 else 0.5 * (u[i - 1] - u[i + 1]) / denom * grid.h
        dx = float(np.clip(dx, -grid.h, grid.h))
        amp = float(u[i] - 0.25 * (u[i - 1] - u[i + 1]) * dx / grid.h)
        cand.append((float(grid.x[i] + dx), amp))
    if u[0] > u[1] and u[0] >= thr:
        cand.insert(0, (float(grid.x[0]), float(u[0])))
    if u[-1] > u[-2] and u[-1] >= thr:
        cand.append((float(grid.x[-1]), float(u[-1])))
    cand.sort()
    pruned: list[tuple[float, float]] = []
    for pos, amp in cand:
        if pruned and pos - pruned[-1][0] < min_sep_cells * grid.h:
            if amp > pruned[-1][1]:
                pruned[-1] = (pos, amp)
        else:
            pruned.append((pos, amp))
    return pruned


def detect_events(track: SpikeTrack, grid: Grid1D, persist: int = 20,
                  window_frac: float = 0.1, p2p_cells: float = 5.0) -> list[Event]:
    """Count-change (nucleation/annihilation) and oscillation-onset events."""
    events: list[Event] = []
    counts = track.counts()
    times = track.times
    m = len(counts)
    if m < 100:
        return events
    # compare against the last *stable* count so a brief flicker up and back
    # does not register as a change on its trailing edge
    baseline = counts[0]
    i = 1
    while i < m:
        if counts[i] != baseline:
            j = i
            while j < m and counts[j] == counts[i]:
                j += 1
            if j - i >= persist:
                kind = "nucleation" if counts[i] > baseline else "annihilation"
                events.append(Event(t=times[i], kind=kind,
                                    detail=f"count {baseline} -> {counts[i]}"))
                baseline = counts[i]
            i = j
        else:
            i += 1

    ts, xs = track.position_series()
    if len(xs) >= 10:
        win = max(2, int(window_frac * len(xs)))
        thresh = p2p_cells * grid.h
        for k in range(win, len(xs)):
            seg = xs[k - win:k]
            if seg.max() - seg.min() > thresh:
                events.append(Event(t=float(ts[k]), kind="oscillation-onset",
                                    detail=f"p2p {seg.max() - seg.min():.4g}"))
                break
    events.sort(key=lambda e: e.t)
    return events


# ---------------------------------------------------------------------------
# driver

def simulate(cfg: SimConfig, progress: Callable[[float], None] | None = None) -> SimResult:
    p = cfg.params
    n = _core_resolved_n(cfg.n, p, (p.l if cfg.half_domain else 2 * p.l))
    grid = Grid1D.make(n, p.l, half=cfg.half_domain)
    state = build_initial(cfg, grid)
    stepper = Stepper(p, grid)

    track = SpikeTrack()
    snapshots: list[tuple[float, FieldTriple]] = []
    snap_every = (math.inf if cfg.snapshot_times <= 0
                  else cfg.t_end / cfg.snapshot_times)
    next_snap = snap_every

    t = 0.0
    dt = cfg.dt
    steps = 0

    def record(tcur: float, f: FieldTriple, Dv: float):
        track.times.append(tcur)
        track.spikes.append(track_spikes(f.u, grid))
        track.Dv.append(Dv)

    record(0.0, state, cfg.ramp.Dv_at(0.0, p.Dv))
    if cfg.snapshot_times > 0:
        snapshots.append((0.0, state.copy()))

    while t < cfg.t_end - 1e-12:
        dt_try = min(dt, cfg.t_end - t)
        Dv = cfg.ramp.Dv_at(t + dt_try, p.Dv)
        try:
            new = stepper.step(state, dt_try, Dv)
        except (PositivityLost, FloatingPointError):
            dt *= 0.5
            if dt < cfg.dt * 2.0 ** -40:
                raise PositivityLost(f"dt underflow at t={t:.6g}")
            continue
        state = new
        t += dt_try
        steps += 1
        dt = min(cfg.dt, dt * 2.0)
        if steps % cfg.output_stride == 0:
            record(t, state, Dv)
            if progress is not None:
                progress(t)
        if t >= next_snap - 1e-12 and cfg.snapshot_times > 0:
            snapshots.append((t, state.copy()))
            next_snap += snap_every

    if track.times[-1] < t:
        record(t, state, cfg.ramp.Dv_at(t, p.Dv))
    snapshots.append((t, state.copy()))
    track.events = detect_events(track, grid)
    return SimResult(grid=grid, track=track, final=state, snapshots=snapshots, t=t)


# ---------------------------------------------------------------------------
# CSV artifacts

def write_snapshot_csv(path, result: SimResult, max_nodes: int = 401):
    stride = max(1, (result.grid.n - 1) // (max_nodes - 1))
    idx = np.arange(0, result.grid.n, stride)
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["t", "x", "u", "v", "w"])
        for t, f in result.snapshots:
            for i in idx:
                wr.writerow([f"{t:.10g}", f"{result.grid.x[i]:.10g}",
                             f"{f.u[i]:.10g}", f"{f.v[i]:.10g}", f"{f.w[i]:.10g}"])


def write_track_csv(path, result: SimResult):
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["t", "spike_id", "position", "amplitude", "count"])
        for t, spikes in zip(result.track.times, result.track.spikes):
            if not spikes:
                wr.writerow([f"{t:.10g}", -1, "", "", 0])
            for sid, (pos, amp) in enumerate(spikes):
                wr.writerow([f"{t:.10g}", sid, f"{pos:.10g}", f"{amp:.10g}",
                             len(spikes)])


def write_event_csv(path, result: SimResult):
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["t", "type", "detail"])
        for ev in result.track.events:
            wr.writerow([f"{ev.t:.10g}", ev.kind, ev.detail])
