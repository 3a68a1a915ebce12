import math
import os
import subprocess
import sys

import numpy as np
import pytest

from tubeorbit import _kernels
from tubeorbit.trajectory import basis_tables, random_trajectory

needs_numba = pytest.mark.skipif(_kernels.numba_impl is None, reason="numba backend disabled")


def _case(seed, n=12):
    tr = random_trajectory(n, 0.4, seed, 3.0 + seed, 1 + seed % 3)
    t, w, S, C = basis_tables(tr.omega, n, 8 * n)
    rng = np.random.default_rng(seed)
    da, db = 1e-3 * rng.normal(size=n), 1e-3 * rng.normal(size=n)
    return tr, (S, C, w, t), da, db


@needs_numba
@pytest.mark.parametrize("seed", range(5))
def test_action_grad_backends_agree(seed):
    tr, (S, C, w, t), _, _ = _case(seed)
    args = (S, C, w, t, tr.a, tr.b, tr.omega, float(tr.k), 1.3, 0.7, 2.0)
    v1, ga1, gb1 = _kernels.numpy_impl.action_grad(*args)
    v2, ga2, gb2 = _kernels.numba_impl.action_grad(*args)
    assert v2 == pytest.approx(v1, rel=1e-13)
    scale = max(np.max(np.abs(ga1)), np.max(np.abs(gb1)))
    assert np.max(np.abs(ga1 - ga2)) <= 1e-12 * scale
    assert np.max(np.abs(gb1 - gb2)) <= 1e-12 * scale


@needs_numba
@pytest.mark.parametrize("seed", range(5))
def test_action_delta_backends_agree(seed):
    tr, (S, C, w, t), da, db = _case(seed)
    args = (S, C, w, t, tr.a, tr.b, da, db, tr.omega, float(tr.k), 1.3, 0.7, 2.0)
    d1 = _kernels.numpy_impl.action_delta(*args)
    d2 = _kernels.numba_impl.action_delta(*args)
    assert d2 == pytest.approx(d1, rel=1e-10)


@needs_numba
def test_rk4_backends_agree():
    s0 = np.array([0.0, 0.0, 0.3, 1.2])
    p1, b1 = _kernels.numpy_impl.rk4_path(s0, 0.01, 500, 1.0, 1.0, 1.0)
    p2, b2 = _kernels.numba_impl.rk4_path(s0, 0.01, 500, 1.0, 1.0, 1.0)
    assert b1 == b2 == -1
    assert np.max(np.abs(p1 - p2)) <= 1e-12


def test_delta_matches_difference_of_values():
    tr, (S, C, w, t), da, db = _case(3)
    f = _kernels.numpy_impl.action_grad
    base = f(S, C, w, t, tr.a, tr.b, tr.omega, float(tr.k), 1.0, 1.0, 1.0)[0]
    moved = f(S, C, w, t, tr.a + da, tr.b + db, tr.omega, float(tr.k), 1.0, 1.0, 1.0)[0]
    delta = _kernels.numpy_impl.action_delta(S, C, w, t, tr.a, tr.b, da, db, tr.omega,
                                             float(tr.k), 1.0, 1.0, 1.0)
    assert delta == pytest.approx(moved - base, rel=1e-8)


def test_flag_selects_numpy_backend():
    env = dict(os.environ, TUBEORBIT_NUMBA="0")
    code = ("import math, tubeorbit\n"
            "from tubeorbit import ModelParams, OptimConfig, find_orbit\n"
            "r = find_orbit(ModelParams(), 2 * math.pi, 1, OptimConfig(modes=16))\n"
            "print(tubeorbit.BACKEND, r.converged)\n")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                         check=True)
    assert out.stdout.split() == ["numpy", "True"]


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "tubeorbit", "find", "--omega", "-1", "--k", "1"],
                         capture_output=True, text=True)
    assert out.returncode == 2


@needs_numba
def test_benchmark_script_runs():
    script = os.path.join(os.path.dirname(__file__), os.pardir, "benchmarks", "bench_kernels.py")
    out = subprocess.run([sys.executable, script, "--repeat", "1"], capture_output=True,
                         text=True, check=True)
    assert "rk4_path" in out.stdout and "speedup" in out.stdout
