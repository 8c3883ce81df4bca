"""Numerical laboratory for one-spike dynamics of a three-component
activator-inhibitor system in the semi-strong (small activator diffusivity)
regime: matched-asymptotic equilibria, nucleation thresholds, nonlocal
eigenvalue stability, slow drift spectra, IMEX time stepping, and
pseudo-arclength continuation.
"""

from .model import FieldTriple, Grid1D, ModelParams, laplacian_neumann, reaction_terms
from .profile import MomentTable, SpikeProfile, build_profile, gamma_of, moments, wc_eval
from .outer import (
    Background,
    NucleationResult,
    OuterSolve,
    Regime,
    chi_of,
    homog_roots,
    nucleation_threshold,
    outer_u_profile,
    smalla_roots,
    solve_V0_mu,
)
from .nlep import (
    LineOperator,
    SpectrumResult,
    Verdict,
    A_multiplier,
    classify_branch,
    f_lambda,
    g_lambda,
    hopf_tau_large,
    hopf_theta,
    lambda0_root,
)
from .smalleig import (
    DriftSpectrum,
    EtaProfile,
    eta_profile,
    k_factor,
    small_lambda_roots,
    tau_h_threshold,
)
from .sim import (
    InitialCondition,
    RampSchedule,
    SimConfig,
    SimResult,
    asymptotic_spike_fields,
    simulate,
    track_spikes,
)
from .continuation import BranchPoint, continue_branch, fold_Dv, steady_newton

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
