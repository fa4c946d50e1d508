import time

import pytest

from hyperbp.bodies import CylinderCapsParams, SmoothingParams, build_M_for_FT
from hyperbp.config import RunConfig, validate
from hyperbp.pipeline import run_counterexample

# filled by tests/test_acceptance.py, printed at the end of the session
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


@pytest.fixture(scope="session")
def m_bodies():
    """M(n=3) for a few cap heights, unstrictified as in the negativity claim."""
    return {lam: build_M_for_FT(CylinderCapsParams(3, lam), SmoothingParams()) for lam in (0.2, 0.1, 0.05, 0.02)}


@pytest.fixture(scope="session")
def pipeline_cfg():
    cfg = validate(RunConfig())
    cfg.certify.seed = 7
    return cfg


@pytest.fixture(scope="session")
def ce_run(pipeline_cfg):
    """One full counterexample run (n=3, k=1, lambda=0.02, seed 7), timed."""
    t0 = time.perf_counter()
    run = run_counterexample(pipeline_cfg)
    run.elapsed = time.perf_counter() - t0
    return run
