import numpy as np
import pytest
from scipy.linalg import expm

from bdpbounds.errors import DimensionMismatch, InvalidParameter, OutOfRange
from bdpbounds.model import build_A, preset, triangular_D
from bdpbounds.oracle import (
    cesaro_average,
    frozen_spectrum,
    frozen_spectrum_dense,
    integrate_kolmogorov,
    point_mass,
    spectral_gap,
    stationary_distribution,
    weighted_norm,
)
from bdpbounds.rates import RateFunction as R
from bdpbounds.weights import constant_weights, explicit_weights


def test_matches_matrix_exponential():
    spec = preset("mmss", R.constant(3.0), R.constant(1.0), S=5)
    p0 = point_mass(spec, 2)
    t = np.linspace(0, 2, 5)
    traj = integrate_kolmogorov(spec, p0, t)
    A = build_A(spec, 0.0)
    for ti, pi in zip(t, traj.p):
        np.testing.assert_allclose(pi, expm(A * ti) @ p0, atol=1e-9)


def test_mass_is_conserved_without_renormalizing():
    spec = preset("mms", R.sinusoid(2.0, 1.0), R.constant(1.0), S=3, trunc=60)
    traj = integrate_kolmogorov(spec, point_mass(spec, 0), np.linspace(0, 5, 51))
    np.testing.assert_allclose(traj.mass, 1.0, atol=1e-8)
    assert not traj.flagged


def test_truncation_loss_is_flagged():
    spec = preset("mm1", R.constant(4.0), R.constant(1.0), trunc=20)
    traj = integrate_kolmogorov(spec, point_mass(spec, 0), np.linspace(0, 5, 11))
    assert traj.flagged
    assert traj.max_truncation_loss > 0.1


def test_input_validation():
    spec = preset("mm1", R.constant(1.0), R.constant(2.0), trunc=10)
    with pytest.raises(DimensionMismatch):
        integrate_kolmogorov(spec, np.ones(3) / 3, [0, 1])
    with pytest.raises(InvalidParameter):
        integrate_kolmogorov(spec, np.full(11, 0.2), [0, 1])
    with pytest.raises(InvalidParameter):
        integrate_kolmogorov(spec, point_mass(spec, 0), [1, 0])
    with pytest.raises(InvalidParameter):
        point_mass(spec, 11)


def test_triangular_norm_is_weighted_tail_sum():
    spec = preset("mmss", R.constant(1.0), R.constant(1.0), S=4)
    w = explicit_weights("triangular", [1.5, 0.5, 2.0], None, True)
    rng = np.random.default_rng(0)
    x = rng.normal(size=5)
    D = triangular_D(w.d_prefix(4))
    assert weighted_norm(x, w, "l1D") == pytest.approx(np.abs(D @ x[1:]).sum())
    assert weighted_norm(x, w, "q") == pytest.approx((np.abs(x[1:]) * np.cumsum(w.d_prefix(4))).sum())
    assert weighted_norm(x, w, "l1") == pytest.approx(np.abs(x).sum())
    assert spec.size == 5


def test_diagonal_norm():
    w = constant_weights("diagonal", 0.5, 4, True)
    assert weighted_norm(np.array([1.0, -1.0, 1.0, 0.0]), w, "l1D") == pytest.approx(1.75)
    with pytest.raises(InvalidParameter):
        weighted_norm(np.zeros(4), w, "l2")


def test_stationary_law_is_a_fixed_point():
    spec = preset("mms", R.constant(2.0), R.constant(1.0), S=3, trunc=40)
    pi = stationary_distribution(spec)
    np.testing.assert_allclose(build_A(spec, 0.0) @ pi, 0.0, atol=1e-14)
    assert pi.sum() == pytest.approx(1.0)


def test_spectrum_agrees_with_dense_solver():
    spec = preset("mmss", R.sinusoid(3.0, 1.0), R.constant(1.0), S=6)
    for t in (0.0, 0.3):
        fast = frozen_spectrum(spec, t)
        dense = frozen_spectrum_dense(spec, t)
        np.testing.assert_allclose(np.abs(dense.imag), 0.0, atol=1e-10)
        np.testing.assert_allclose(fast, dense.real, rtol=1e-10, atol=1e-10)


def test_single_server_gap_near_theory():
    spec = preset("mm1", R.constant(1.0), R.constant(4.0), trunc=200)
    assert spectral_gap(spec) == pytest.approx(1.0, rel=0.05)


def test_cesaro_average_of_a_stationary_start():
    spec = preset("mm1", R.constant(1.0), R.constant(2.0), trunc=40)
    pi = stationary_distribution(spec)
    traj = integrate_kolmogorov(spec, pi, np.linspace(0, 4, 41))
    np.testing.assert_allclose(cesaro_average(traj, 2.55), pi, atol=1e-9)
    np.testing.assert_array_equal(cesaro_average(traj, 0.0), pi)
    with pytest.raises(OutOfRange):
        cesaro_average(traj, 5.0)


def test_trajectory_csv(tmp_path):
    spec = preset("mmss", R.constant(1.0), R.constant(1.0), S=2)
    traj = integrate_kolmogorov(spec, point_mass(spec, 0), [0.0, 0.5])
    traj.to_csv(tmp_path / "t.csv")
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines[0] == "t,p_0,p_1,p_2,mass,truncation_loss"
    assert len(lines) == 3
