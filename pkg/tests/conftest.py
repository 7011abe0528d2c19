import warnings

import numpy as np
import pytest

from ptcavity.cavity import CavityConfig, evolve
from ptcavity.diagnostics import observe
from ptcavity.errors import AliasingWarning

# High-precision reference values for the default cavity, computed with
# mpmath from the cavity geometry (30 digits) and frozen here.
REF = {
    "A": 0.9,
    "B": -9500.0,
    "C": 2.0e-5,
    "theta": 0.451026811796262432544644635794,
    "mass": 1.01730419509602594066051163047e-4,
    "g0": 0.121306131942526684720759906998,
    "alpha": 5.02302823778578404640827772249e-4,
    "delta": -3.79733892333545391987055768569,
    "w0": 83.2910747500918371591300935161,
    "tilt_ratio": -0.0455911865074266790490699649584,
    "petermann": 1.00834888430662331360294810361,
    "p0": -1.74233859170450408952384390135e-4,
    "v0": -1.71270166790184159300821753071,
    "c2": -7.79449972038963151238884911117,
    "c1": 16.4647943399416400352027227177,
    "sqq_stored": 5026.54824574366918154022941325,
}


@pytest.fixture(scope="session")
def fig2_config():
    return CavityConfig()


@pytest.fixture(scope="session")
def fig2_params(fig2_config):
    return fig2_config.oscillator_params()


@pytest.fixture(scope="session")
def fig2_series(fig2_config):
    with warnings.catch_warnings():
        warnings.simplefilter("error", AliasingWarning)
        return observe(evolve(fig2_config, 60), hbar=fig2_config.oscillator_params().hbar)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def record_criterion(number, title, checks):
    """Store the outcome of one acceptance criterion and print it.

    ``checks`` is a list of (label, passed, detail) sub-results.
    """
    ok = all(c[1] for c in checks)
    detail = "; ".join(f"{'ok' if c[1] else 'FAIL'} {c[0]}: {c[2]}" for c in checks)
    ACCEPTANCE[number] = (ok, title, detail)
    print(f"criterion {number} {'PASS' if ok else 'FAIL'} [{title}] {detail}")
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, title, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")
        terminalreporter.write_line(f"    {detail}")
