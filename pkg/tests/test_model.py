import numpy as np
import pytest

from bdpbounds.errors import DimensionMismatch, InvalidParameter, UnknownPreset
from bdpbounds.model import build_A, build_B, build_transformed, from_tables, preset, triangular_D
from bdpbounds.rates import RateFunction as R
from bdpbounds.weights import constant_weights, explicit_weights


def test_generator_columns_sum_to_zero():
    spec = preset("mms", R.sinusoid(2.0, 1.0), R.constant(1.0), S=3, trunc=30)
    for t in (0.0, 0.3, 0.8):
        A = build_A(spec, t)
        np.testing.assert_allclose(A.sum(axis=0), 0.0, atol=1e-12)
        assert np.all(A - np.diag(np.diag(A)) >= 0)


def test_column_convention():
    spec = preset("mm1", R.constant(2.0), R.constant(5.0), trunc=10)
    A = build_A(spec, 0.0)
    assert A[1, 0] == 2.0   # birth out of state 0
    assert A[0, 1] == 5.0   # death out of state 1
    assert A[10, 10] == -5.0  # reflecting top: no births


def test_reduced_system_reproduces_forward_equation():
    spec = from_tables([1.0, 2.0, 0.5], [3.0, 1.0, 2.0], R.constant(1.5), R.constant(0.7))
    rng = np.random.default_rng(3)
    p = rng.random(4)
    p /= p.sum()
    A = build_A(spec, 0.0)
    B, f = build_B(spec, 0.0)
    np.testing.assert_allclose(B @ p[1:] + f, (A @ p)[1:], atol=1e-14)


def test_closed_form_transform_matches_matrix_product():
    spec = preset("mmss", R.constant(3.0), R.constant(1.0), S=6)
    w = explicit_weights("triangular", [0.9, 1.2, 0.7, 1.1, 1.3], None, True)
    B, _ = build_B(spec, 0.0)
    D = triangular_D(w.d_prefix(6))
    np.testing.assert_allclose(build_transformed(spec, w, 0.0), D @ B @ np.linalg.inv(D), atol=1e-12)


def test_diagonal_transform_matches_matrix_product():
    spec = preset("mm1", R.constant(4.0), R.constant(1.0), trunc=8)
    w = constant_weights("diagonal", 0.5, 9, False)
    D = np.diag(w.d_prefix(9))
    A = build_A(spec, 0.0)
    np.testing.assert_allclose(build_transformed(spec, w, 0.0), D @ A @ np.linalg.inv(D), atol=1e-12)


def test_preset_rates():
    mms = preset("mms", R.constant(1.0), R.constant(1.0), S=3)
    np.testing.assert_array_equal(mms.mu(np.arange(6)), [0, 1, 2, 3, 3, 3])
    assert mms.mu_limit == 3.0
    dis = preset("discouragement", R.constant(1.0), R.constant(2.0), S=2)
    np.testing.assert_allclose(dis.lam(np.arange(6)), [1, 1, 1 / 2, 1 / 3, 1 / 4, 1 / 5])
    assert dis.lam_limit == 0.0
    loss = preset("mmss", R.constant(1.0), R.constant(1.0), S=4)
    assert loss.finite and loss.size == 5
    np.testing.assert_array_equal(loss.generator_rates()[0], [1, 1, 1, 1, 0])


def test_traffic_intensity():
    spec = preset("mms", R.sinusoid(3.0, 1.0), R.constant(2.0), S=3)
    assert spec.traffic_intensity() == pytest.approx(0.5)


def test_preset_errors():
    with pytest.raises(UnknownPreset):
        preset("gg1", R.constant(1.0), R.constant(1.0))
    with pytest.raises(InvalidParameter):
        preset("mms", R.constant(1.0), R.constant(1.0), S=0)
    with pytest.raises(InvalidParameter):
        preset("mms", R.constant(1.0), R.constant(1.0), S=2.5)
    with pytest.raises(InvalidParameter):
        preset("mm1", R.constant(1.0), R.constant(1.0), trunc=1)


def test_tables_must_match():
    with pytest.raises(DimensionMismatch):
        from_tables([1.0, 2.0], [1.0], R.constant(1.0), R.constant(1.0))
    with pytest.raises(InvalidParameter):
        from_tables([1.0, 0.0], [1.0, 1.0], R.constant(1.0), R.constant(1.0))


def test_with_trunc_and_rates_copy():
    spec = preset("mm1", R.constant(1.0), R.constant(2.0))
    assert spec.with_trunc(50).size == 51
    assert spec.with_rates(a=R.constant(3.0)).a(0.0) == 3.0
    assert spec.a(0.0) == 1.0
