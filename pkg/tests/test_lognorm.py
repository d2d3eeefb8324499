import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from bdpbounds.errors import KindMismatch
from bdpbounds.lognorm import (
    coefficient_profile,
    coefficients,
    dominates,
    linear_bounds,
    lognorm_l1,
    lognorm_limit,
    lognorm_of_transformed,
)
from bdpbounds.model import build_transformed, from_tables, preset
from bdpbounds.rates import LinearRate
from bdpbounds.rates import RateFunction as R
from bdpbounds.weights import constant_weights, explicit_weights, preset_setup


def test_hand_computed_norm():
    M = np.array([[-3.0, 1.0], [2.0, -1.0]])
    # columns: -3 + 2 = -1 and -1 + 1 = 0
    assert lognorm_l1(M) == 0.0
    assert lognorm_l1(np.zeros((0, 0))) == 0.0


@settings(max_examples=50, deadline=None)
@given(arrays(float, st.tuples(st.integers(1, 10), st.integers(1, 10)).map(lambda s: (s[0], s[0])),
              elements=st.floats(-5, 5)))
def test_closed_form_matches_difference_quotient(M):
    h = 1e-6
    bound = 10 * np.abs(M).sum(axis=0).max() ** 2 * h + 1e-8
    assert abs(lognorm_l1(M) - lognorm_limit(M, h)) <= bound


def test_alpha_for_single_server_queue():
    spec = preset("mm1", R.constant(1.0), R.constant(4.0))
    setup = preset_setup(spec)
    prof = coefficient_profile(spec, setup.weights, 0.0, "alpha")
    # (sqrt(a) - sqrt(b))^2 = 1 for every k >= 1; k = 0 has lambda_0 (1 - delta_1) a + mu_1 b = -1 + 4
    np.testing.assert_allclose(prof.values[1:], 1.0)
    assert prof.values[0] == pytest.approx(3.0)
    assert prof.limit == pytest.approx(1.0)
    assert lognorm_of_transformed(spec, setup.weights, 0.0) == pytest.approx(-1.0)


def test_loss_queue_coefficients():
    spec = preset("mmss", R.constant(3.0), R.constant(1.0), S=5)
    w = preset_setup(spec).weights
    lo, hi = linear_bounds(spec, w, "zeta")
    assert hi.evaluate(spec.a, spec.b, 0.0) == pytest.approx(2 * 3 + 9 * 1)
    lo_a, _ = linear_bounds(spec, w, "alpha")
    assert lo_a.evaluate(spec.a, spec.b, 0.0) == pytest.approx(1.0)


@pytest.mark.parametrize("seed", range(5))
def test_closed_form_transform_norm_matches_explicit_matrix(seed):
    rng = np.random.default_rng(seed)
    N = int(rng.integers(3, 9))
    spec = from_tables(rng.uniform(0.5, 2, N), rng.uniform(0.5, 2, N), R.sinusoid(1, 0.3), R.constant(1.2))
    tri = explicit_weights("triangular", rng.uniform(0.5, 2, N - 1), None, True)
    diag = explicit_weights("diagonal", rng.uniform(0.5, 2, N), None, True)
    for t in (0.0, 0.4):
        for w in (tri, diag):
            assert lognorm_of_transformed(spec, w, t) == pytest.approx(
                lognorm_l1(build_transformed(spec, w, t)), abs=1e-10)


def test_kind_mismatch():
    spec = preset("mm1", R.constant(1.0), R.constant(4.0))
    w = constant_weights("diagonal", 0.5, 201, False)
    with pytest.raises(KindMismatch):
        coefficients(spec, w, "alpha")
    with pytest.raises(KindMismatch):
        coefficients(spec, w, "beta")


def test_dominance():
    spec = preset("mm1", R.constant(1.0), R.constant(4.0))
    w = preset_setup(spec).weights
    co = coefficients(spec, w, "alpha")
    assert dominates(co, LinearRate(-1.0, 0.5))
    assert not dominates(co, LinearRate(-0.5, 0.5))
    assert not dominates(co, LinearRate(-1.0, 0.5, 0.1))


def test_profile_csv(tmp_path):
    spec = preset("mm1", R.constant(1.0), R.constant(4.0), trunc=5)
    prof = coefficient_profile(spec, preset_setup(spec).weights, 0.0, "alpha")
    prof.to_csv(tmp_path / "p.csv")
    lines = (tmp_path / "p.csv").read_text().splitlines()
    assert lines[0] == "k,value"
    assert lines[-1].startswith("inf,")
