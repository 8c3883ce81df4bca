"""Steady-state Newton solver and pseudo-arclength branch following."""

import numpy as np
import pytest

from spikelab.continuation import (
    continue_branch,
    fold_Dv,
    steady_from_asymptotics,
    steady_newton,
    write_branch_csv,
)
from spikelab.model import FieldTriple, Grid1D, ModelParams
from spikelab.outer import nucleation_threshold, solve_V0_mu


P_NUC = ModelParams(a=0.5, b=1.0, c=1.0, delta1=1e-4, Dv=1.2, l=4.0)
P_AMP = ModelParams(a=1.0, b=3.0, c=1.0, delta1=1e-4, Dv=2.0, l=3.0)


@pytest.fixture(scope="module")
def branch():
    """Nucleation-regime branch, traced from above the fold down and around it."""
    return continue_branch(P_NUC, Dv_start=1.2, Dv_end=1.0, n=2001, ds=0.02)


@pytest.fixture(scope="module")
def steady_amp():
    return steady_from_asymptotics(P_AMP, n=2001)


class TestSteadyNewton:
    def test_converges_quickly_from_blended_spike(self, steady_amp):
        state, grid = steady_amp
        # re-entering Newton from the converged state must finish immediately,
        # and from the relaxed asymptotic guess it needs < 15 iterations
        # (steady_from_asymptotics would have raised otherwise; assert basin)
        again = steady_newton(state, P_AMP, grid, max_iter=15)
        assert np.max(np.abs(again.u - state.u)) < 1e-8 * np.max(state.u)

    def test_amplitude_matches_matched_asymptotics(self, steady_amp):
        state, grid = steady_amp
        v0_pde = np.sqrt(P_AMP.delta1) * state.v[np.argmax(state.u)]
        v0_asym = solve_V0_mu(P_AMP).V0
        assert v0_pde == pytest.approx(v0_asym, rel=0.05)

    def test_perturbed_state_reconverges(self, steady_amp):
        state, grid = steady_amp
        rng = np.random.default_rng(5)
        noisy = FieldTriple(
            state.u * (1 + 1e-6 * rng.standard_normal(grid.n)),
            state.v * (1 + 1e-6 * rng.standard_normal(grid.n)),
            state.w * (1 + 1e-6 * rng.standard_normal(grid.n)),
        )
        back = steady_newton(noisy, P_AMP, grid, presolve=False)
        for f, g in ((back.u, state.u), (back.v, state.v), (back.w, state.w)):
            assert np.max(np.abs(f - g)) < 1e-8 * np.max(np.abs(g))

    def test_homogeneous_regime_converges_to_uniform_state(self):
        p = ModelParams(a=1.5, b=1.0, c=1.0, delta1=1e-4, Dv=1.0, l=2.0)
        grid = Grid1D.make(401, p.l, half=True)
        u0, v0, w0 = p.homogeneous_state
        init = FieldTriple(np.full(grid.n, u0 * 1.001),
                           np.full(grid.n, v0), np.full(grid.n, w0))
        out = steady_newton(init, p, grid)
        assert np.max(np.abs(out.u - u0)) < 1e-9 * u0


class TestBranch:
    def test_fold_detected_near_asymptotic_threshold(self, branch):
        assert any(pt.fold for pt in branch)
        D_nuc = nucleation_threshold(P_NUC).D_nuc
        assert fold_Dv(branch) == pytest.approx(D_nuc, rel=0.05)

    def test_arclength_strictly_increasing(self, branch):
        s = [pt.arclength for pt in branch]
        assert all(b > a for a, b in zip(s, s[1:]))

    def test_mu_at_fold_is_twice_background(self, branch):
        # the lower branch stays below u = 2a and loses existence there
        ifold = next(i for i, pt in enumerate(branch) if pt.fold)
        assert all(pt.mu < 2 * P_NUC.a + 0.1 for pt in branch[:ifold])
        assert branch[ifold].mu == pytest.approx(2 * P_NUC.a, rel=0.1)

    def test_stability_hint_flips_across_fold(self, branch):
        ifold = next(i for i, pt in enumerate(branch) if pt.fold)
        before = [pt.stability_hint for pt in branch[:ifold]]
        after = [pt.stability_hint for pt in branch[ifold + 1:]]
        assert all(h < 0 for h in before[2:])
        assert any(h > 0 for h in after)

    def test_resolving_at_branch_point_reproduces_mu(self, branch):
        pt = branch[len(branch) // 3]
        grid = Grid1D.make(2001, P_NUC.l, half=True)
        resolved = steady_newton(pt.state, P_NUC, grid, Dv=pt.Dv,
                                 presolve=False)
        assert float(resolved.u[-1]) == pytest.approx(pt.mu, abs=1e-8)

    def test_fold_invariant_under_step_halving(self, branch):
        finer = continue_branch(P_NUC, Dv_start=1.2, Dv_end=1.0,
                                n=2001, ds=0.01)
        assert fold_Dv(finer) == pytest.approx(fold_Dv(branch), rel=1e-3)

    def test_fold_invariant_under_grid_refinement(self, branch):
        refined = continue_branch(P_NUC, Dv_start=1.2, Dv_end=1.0,
                                  n=4001, ds=0.02)
        assert fold_Dv(refined) == pytest.approx(fold_Dv(branch), rel=1e-3)

    def test_no_fold_regime(self):
        p = ModelParams(a=1.5, b=1.0, c=1.0, delta1=1e-4, Dv=1.0, l=4.0)
        pts = continue_branch(p, Dv_start=1.0, Dv_end=0.25, n=2001, ds=0.05,
                              max_points=120)
        assert not any(pt.fold for pt in pts)
        assert fold_Dv(pts) is None
        assert all(pt.mu < 2 * p.a for pt in pts)
        # mu rises toward the uniform far-field value a + bc as Dv shrinks
        assert pts[-1].mu > pts[0].mu
        assert pts[-1].mu < p.a + p.b * p.c


class TestArtifacts:
    def test_branch_csv_schema(self, branch, tmp_path):
        path = tmp_path / "branch.csv"
        write_branch_csv(path, branch)
        lines = path.read_text().splitlines()
        assert lines[0] == "arclength,Dv,mu,v0,fold"
        assert len(lines) == len(branch) + 1
        assert any(line.endswith(",1") for line in lines[1:])  # fold marker
