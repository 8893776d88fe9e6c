import numpy as np
import pytest

from obliqueplan import CameraIntrinsics, GroundTarget, Scenario, Waypoint3D

CAMERA = CameraIntrinsics(0.035, 0.0156, 0.0235)
ORIGIN = Waypoint3D((0.0, 0.0), 0.0)


@pytest.fixture
def cam():
    return CAMERA


@pytest.fixture
def gt04():
    return GroundTarget((0.0, 0.0), 20.0, 0.4)


def random_scenario(seed, k, area=300.0, r=20.0, lo=0.01, hi=0.4):
    rng = np.random.default_rng(seed)
    targets = tuple(GroundTarget(tuple(rng.uniform(0, area, 2)), r, rng.uniform(lo, hi)) for _ in range(k))
    return Scenario(CAMERA, targets, ORIGIN, ORIGIN)


def single_target(w=(150.0, 0.0), i_min=0.4, r=20.0):
    return Scenario(CAMERA, (GroundTarget(w, r, i_min),), ORIGIN, ORIGIN)


# criterion number -> PASS/FAIL line, filled by test_acceptance.py
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
