import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from nxfem.experiments import ExperimentConfig, make_problem

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("ci", max_examples=200, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_cache = {}


def experiment_problem(level, dim=2, **kw):
    """Cached problems of the reference experiments (kw go to ExperimentConfig)."""
    key = (level, dim, tuple(sorted(kw.items())))
    if key not in _cache:
        cfg = ExperimentConfig(**kw) if dim == 2 else ExperimentConfig.reference_3d(**kw)
        _cache[key] = make_problem(cfg, level)
    return _cache[key]


@pytest.fixture(scope="session")
def p_l1():
    return experiment_problem(1)


@pytest.fixture(scope="session")
def p_l2():
    return experiment_problem(2)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, (ok, line) in RESULTS.items():
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {name}: {line}")
