import os
import subprocess
import sys

import numpy as np
import pytest

from obliqueplan import _kernels

py = _kernels.python_backend
cy = _kernels.compiled_backend
needs_compiled = pytest.mark.skipif(cy is None, reason="compiled kernels not built")


def test_backend_selected():
    assert _kernels.BACKEND in ("cython", "python")
    assert (_kernels.BACKEND == "cython") == (cy is not None)


def test_pure_python_override():
    code = "from obliqueplan import _kernels; print(_kernels.BACKEND)"
    env = dict(os.environ, OBLIQUEPLAN_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@pytest.mark.parametrize("backend", [py, pytest.param(cy, marks=needs_compiled)], ids=["python", "cython"])
def test_chain_kernels(backend):
    pts = np.array([[0, 0, 0], [100, 0, 100], [200, 0, 100], [0, 0, 0]], float)
    assert backend.chain_length(pts) == pytest.approx(465.0281539872885, rel=1e-12)
    val, grad, hess = backend.smoothed_chain(pts, 1e-8)
    assert val == pytest.approx(465.0281539872885, rel=1e-12)
    # gradient of the smoothed length against central differences
    h = 1e-6
    for i in range(1, 3):
        for a in range(3):
            e = np.zeros_like(pts)
            e[i, a] = h
            fd = (backend.smoothed_chain(pts + e, 1e-8)[0] - backend.smoothed_chain(pts - e, 1e-8)[0]) / (2 * h)
            assert fd == pytest.approx(grad[i, a], abs=1e-6)
    assert hess.shape == (3, 3, 3)


@needs_compiled
def test_backends_agree():
    rng = np.random.default_rng(0)
    for _ in range(20):
        pts = rng.normal(0, 100, (8, 3))
        assert cy.chain_length(pts) == pytest.approx(py.chain_length(pts), rel=1e-13)
        for a, b in zip(cy.smoothed_chain(pts, 1e-3), py.smoothed_chain(pts, 1e-3)):
            np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-14)
        K = 7
        D = rng.uniform(1, 100, (K, K))
        D = D + D.T
        to_end = rng.uniform(1, 100, K)
        np.testing.assert_allclose(cy.held_karp_table(D, to_end), py.held_karp_table(D, to_end), rtol=1e-13)
        full = rng.uniform(1, 100, (K + 2, K + 2))
        full = full + full.T
        order = list(rng.permutation(K))
        assert cy.two_opt(order, full) == py.two_opt(order, full)

        n = 12
        l = rng.normal(0, 20, (n, 2))
        z = rng.uniform(60, 120, n)
        l0 = l + rng.normal(0, 2, (n, 2))
        r2 = np.full(n, 400.0)
        lr = rng.uniform(-10, -8, n)
        args_h = (l, z, l0, r2, lr, 4.4872, 2.9787, 1e-8, 1e-9)
        args_a = (z, z + 2.0, np.sum(l * l, axis=1), r2, lr, 4.4872, 2.9787, 1e-8)
        for fname, args in (("horizontal_constraints", args_h), ("altitude_constraints", args_a)):
            for a, b in zip(getattr(cy, fname)(*args), getattr(py, fname)(*args)):
                np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-15)
            np.testing.assert_allclose(
                getattr(cy, fname)(*args, derivatives=False), getattr(py, fname)(*args, derivatives=False), rtol=1e-12
            )


@pytest.mark.parametrize("backend", [py, pytest.param(cy, marks=needs_compiled)], ids=["python", "cython"])
def test_two_opt_removes_crossing(backend):
    # start, 4 points on a line, end; the given order crosses itself
    xs = np.array([0.0, 1.0, 2.0, 3.0, 4.0, 5.0])
    D = np.abs(xs[:, None] - xs[None, :])
    assert backend.two_opt([2, 1, 0, 3], D) == [0, 1, 2, 3]


def test_pure_python_plan_matches_compiled():
    code = (
        "from obliqueplan.scenario_io import generate; from obliqueplan.planner import plan;"
        "print(repr(plan(generate(2, k=4)).distance))"
    )
    outs = []
    for flag in ("0", "1"):
        env = dict(os.environ, OBLIQUEPLAN_PURE_PYTHON=flag)
        outs.append(float(subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                                         text=True, check=True).stdout))
    assert outs[0] == pytest.approx(outs[1], rel=1e-9)
