import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tubeorbit.trajectory import (FourierTrajectory, evaluate, random_trajectory, sample,
                                  sobolev_norms)


def test_pure_winding_at_half_period():
    tr = FourierTrajectory.zero(2 * math.pi, 1, 4)
    s, a = evaluate(tr, math.pi)
    assert s.x == 0.0 and s.xdot == 0.0
    assert s.phi == math.pi
    assert s.phidot == pytest.approx(1.0, rel=1e-15)
    assert a == (0.0, 0.0)


def test_single_mode_values():
    tr = FourierTrajectory(2 * math.pi, 1, [1.0], [0.0])
    s, _ = evaluate(tr, math.pi / 2)
    assert s.x == pytest.approx(1.0, rel=1e-15)
    assert s.xdot == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("bad", [
    dict(omega=0.0), dict(omega=-1.0), dict(k=0), dict(k=1.5), dict(a=[], b=[]),
    dict(a=[1.0, 2.0], b=[1.0]), dict(a=[math.inf], b=[0.0]),
])
def test_invalid_trajectories_rejected(bad):
    kw = dict(omega=1.0, k=1, a=[0.0], b=[0.0])
    kw.update(bad)
    with pytest.raises(ValueError):
        FourierTrajectory(**kw)


def _random_cases(n, seed):
    rng = np.random.default_rng(seed)
    for i in range(n):
        omega = rng.uniform(0.5, 10)
        k = int(rng.integers(1, 6))
        tr = random_trajectory(int(rng.integers(1, 33)), rng.uniform(0.01, 3), seed * 10000 + i,
                               omega, k)
        yield tr, rng.uniform(-3 * omega, 3 * omega)


def test_odd_and_periodic_identities_1000():
    for tr, t in _random_cases(1000, 1):
        s, _ = evaluate(tr, t)
        sp, _ = evaluate(tr, t + tr.omega)
        sn, _ = evaluate(tr, -t)
        assert abs(sp.x - s.x) <= 1e-12 * (1 + abs(s.x))
        assert abs(sp.phi - s.phi - 2 * math.pi * tr.k) <= 1e-10
        assert abs(sn.x + s.x) <= 1e-12
        assert abs(sn.phi + s.phi) <= 1e-10
        assert sn.phidot == pytest.approx(s.phidot, rel=1e-12, abs=1e-12)
        assert sn.xdot == pytest.approx(s.xdot, rel=1e-12, abs=1e-12)


def test_exact_zeros_at_origin_and_half_period():
    for tr, _ in _random_cases(200, 2):
        s0, _ = evaluate(tr, 0.0)
        sh, _ = evaluate(tr, tr.omega / 2)
        assert s0.x == 0.0 and s0.phi == 0.0
        assert sh.x == 0.0
        assert sh.phi == math.pi * tr.k


def test_derivatives_match_finite_differences():
    h = 1e-6
    for tr, t in _random_cases(100, 3):
        s, a = evaluate(tr, t)
        sp, ap = evaluate(tr, t + h)
        sm, am = evaluate(tr, t - h)
        # absolute floor: rounding of the differenced quantity over 2h
        assert (sp.x - sm.x) / (2 * h) == pytest.approx(s.xdot, rel=1e-5, abs=1e-9 * (1 + abs(s.x)))
        assert (sp.phi - sm.phi) / (2 * h) == pytest.approx(s.phidot, rel=1e-5,
                                                            abs=1e-9 * (1 + abs(s.phi)))
        assert (sp.xdot - sm.xdot) / (2 * h) == pytest.approx(a.xddot, rel=1e-5,
                                                              abs=1e-9 * (1 + abs(s.xdot)))
        assert (sp.phidot - sm.phidot) / (2 * h) == pytest.approx(a.phiddot, rel=1e-5,
                                                                  abs=1e-9 * (1 + abs(s.phidot)))


def test_sample_trivial_grid():
    k = 3
    smp = sample(FourierTrajectory.zero(2.0, k, 5), 4)
    assert len(smp) == 4
    np.testing.assert_allclose(smp.states.phi, [0, math.pi * k / 2, math.pi * k, 3 * math.pi * k / 2],
                               rtol=1e-15)


def test_sample_matches_pointwise_eval_exactly():
    tr = random_trajectory(7, 0.5, 4, 3.3, 2)
    smp = sample(tr, 33)
    for i, t in enumerate(smp.times):
        s, a = evaluate(tr, t)
        assert t == i * (tr.omega / 33)
        assert tuple(v[i] for v in smp.states) == s
        assert tuple(v[i] for v in smp.accels) == a


def test_sample_grid_nesting():
    tr = random_trajectory(5, 1.0, 5, 4.0, 1)
    coarse, fine = sample(tr, 16), sample(tr, 32)
    np.testing.assert_array_equal(fine.times[::2], coarse.times)
    for cf, ff in zip(coarse.states, fine.states):
        np.testing.assert_array_equal(ff[::2], cf)


def test_sample_rejects_small_m():
    with pytest.raises(ValueError):
        sample(FourierTrajectory.zero(1.0, 1, 1), 1)


def test_sobolev_norm_examples():
    assert sobolev_norms(FourierTrajectory.zero(2 * math.pi, 1, 3)) == pytest.approx(
        (0.0, math.sqrt(2 * math.pi)), rel=1e-15)
    nx, _ = sobolev_norms(FourierTrajectory(2 * math.pi, 1, [1.0], [0.0]))
    assert nx == pytest.approx(math.sqrt(math.pi), rel=1e-15)


def test_sobolev_norms_match_trapezoid_quadrature():
    for tr, _ in _random_cases(100, 6):
        M = 1024
        t = np.arange(M) * tr.omega / M
        s, _ = evaluate(tr, t)
        qx = math.sqrt(tr.omega / M * np.sum(s.xdot**2))
        qphi = math.sqrt(tr.omega / M * np.sum(s.phidot**2))
        nx, nphi = sobolev_norms(tr)
        assert nx == pytest.approx(qx, rel=1e-10)
        assert nphi == pytest.approx(qphi, rel=1e-10)


@settings(max_examples=50)
@given(st.integers(1, 16), st.integers(0, 2**31), st.integers(0, 2**31))
def test_sobolev_norms_ignore_coefficient_signs(n, seed, sign_seed):
    tr = random_trajectory(n, 1.0, seed, 3.0, 2)
    rng = np.random.default_rng(sign_seed)
    flipped = FourierTrajectory(tr.omega, tr.k, tr.a * rng.choice([-1, 1], n),
                                tr.b * rng.choice([-1, 1], n))
    assert sobolev_norms(flipped) == sobolev_norms(tr)


def test_random_trajectory_determinism_and_bounds():
    a = random_trajectory(12, 0.7, 42, 2.5, 3)
    b = random_trajectory(12, 0.7, 42, 2.5, 3)
    assert a == b
    assert a != random_trajectory(12, 0.7, 43, 2.5, 3)
    bound = 0.7 / np.arange(1, 13)
    assert np.all(np.abs(a.a) <= bound) and np.all(np.abs(a.b) <= bound)
    z = random_trajectory(5, 0.0, 1)
    assert not np.any(z.a) and not np.any(z.b)
    assert (a.omega, a.k, a.modes) == (2.5, 3, 12)


def test_coefficient_roundtrip():
    tr = random_trajectory(6, 1.0, 9)
    assert tr.with_coefficients(tr.coefficients()) == tr
    with pytest.raises(ValueError):
        tr.with_coefficients(np.zeros(5))
