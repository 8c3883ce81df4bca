"""Shared fixtures: reusable operators, moment tables, and parameter sets."""

import pytest

from spikelab.model import ModelParams
from spikelab.nlep import LineOperator
from spikelab.profile import moments


@pytest.fixture(scope="session")
def op():
    """Default discretized line operator (shared; construction is cheap but
    the Richardson twin cache makes reuse worthwhile)."""
    return LineOperator()


@pytest.fixture(scope="session")
def table():
    """Core-profile moment table at gamma = 0."""
    return moments(0.0)


@pytest.fixture(scope="session")
def p_nucleation():
    """Nucleating regime: a < bc, small core diffusivity."""
    return ModelParams(a=0.5, b=1.0, c=1.0, delta1=1e-4, Dv=1.2, l=4.0)


@pytest.fixture(scope="session")
def p_amplitude():
    """Amplitude-curve regime (larger a and b, shorter domain)."""
    return ModelParams(a=1.0, b=3.0, c=1.0, delta1=1e-4, Dv=2.0, l=3.0)


@pytest.fixture(scope="session")
def p_drift():
    """Drift-oscillation regime (tiny a, unit everything else)."""
    return ModelParams(a=0.01, b=1.0, c=1.0, delta1=1e-4, Dv=1.0, l=1.0)


def pytest_terminal_summary(terminalreporter):
    """Echo the acceptance verdict lines after the run (output capture
    would otherwise swallow them on passing tests)."""
    import sys

    mod = (sys.modules.get("test_acceptance")
           or sys.modules.get("tests.test_acceptance"))
    VERDICTS = getattr(mod, "VERDICTS", None)
    if VERDICTS:
        terminalreporter.write_sep("-", "acceptance verdicts")
        for line in VERDICTS:
            terminalreporter.write_line(line)
