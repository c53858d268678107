"""
Tests for norms, dual norms and norming functionals.
"""

import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from pydantic import ValidationError

from conftest import EXPONENTS
from model.errors import DegenerateInputError, DimensionMismatchError
from model.normed_space import (
    dual_norm,
    dual_norm_of,
    make_functional,
    norm,
    norm_rows,
    norming_functional,
    random_functionals,
)
from model.space_models import NormSpec, parse_exponent

coordinates = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)
vectors = st.lists(coordinates, min_size=4, max_size=4)
exponents = st.sampled_from(EXPONENTS)


@pytest.mark.parametrize("p, expected", [(1.0, 7.0), (2.0, 5.0), (math.inf, 4.0)])
def test_norm_known_values(p, expected):
    assert norm(NormSpec(dim=2, p=p), [3.0, -4.0]) == pytest.approx(expected)


def test_weighted_norm():
    space = NormSpec(dim=2, p=2.0, weights=(4.0, 1.0))
    assert norm(space, [3.0, 4.0]) == pytest.approx(math.sqrt(4 * 9 + 16))


def test_max_norm_ignores_weights():
    space = NormSpec(dim=2, p=math.inf, weights=(9.0, 1.0))
    assert norm(space, [1.0, -2.0]) == pytest.approx(2.0)


@pytest.mark.parametrize("p, conjugate", [(1.0, math.inf), (2.0, 2.0), (3.0, 1.5), (math.inf, 1.0)])
def test_dual_exponent(p, conjugate):
    assert NormSpec(dim=3, p=p).dual_exponent == pytest.approx(conjugate)


def test_invalid_exponent_rejected():
    with pytest.raises(ValidationError):
        NormSpec(dim=3, p=0.5)


def test_nonpositive_weight_rejected():
    with pytest.raises(ValidationError):
        NormSpec(dim=2, p=2.0, weights=(1.0, 0.0))


def test_parse_exponent_accepts_inf():
    assert math.isinf(parse_exponent("inf"))
    assert parse_exponent("1.5") == 1.5


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        norm(NormSpec(dim=3), [1.0, 2.0])


def test_norming_functional_of_zero_raises():
    with pytest.raises(DegenerateInputError):
        norming_functional(NormSpec(dim=3), [0.0, 0.0, 0.0])


@given(vectors, exponents)
def test_norming_functional_attains_norm(x, p):
    assume(max(abs(v) for v in x) > 1e-3)
    space = NormSpec(dim=4, p=p, weights=(1.0, 2.0, 0.5, 3.0))
    f = norming_functional(space, x)
    assert f(x) == pytest.approx(norm(space, x), rel=1e-9, abs=1e-12)
    assert f.dual_norm == pytest.approx(1.0, rel=1e-9)
    assert dual_norm(space, f) == pytest.approx(1.0, rel=1e-9)


@given(vectors, vectors, exponents)
def test_hoelder_inequality(coeffs, x, p):
    space = NormSpec(dim=4, p=p)
    f = make_functional(space, coeffs)
    assert abs(f(x)) <= f.dual_norm * norm(space, x) * (1 + 1e-12) + 1e-12


def test_norm_rows_matches_norm(space):
    rng = np.random.default_rng(3)
    rows = rng.standard_normal((7, space.dim))
    expected = [norm(space, r) for r in rows]
    assert np.allclose(norm_rows(space, rows), expected)


def test_random_functionals_are_reproducible(euclidean):
    first = random_functionals(euclidean, 3, np.random.default_rng(11))
    second = random_functionals(euclidean, 3, np.random.default_rng(11))
    assert [f.coeffs for f in first] == [f.coeffs for f in second]
    for f in first:
        assert f.dual_norm == pytest.approx(dual_norm_of(euclidean, f.coeffs))


def test_weighted_l1_and_max_norm_examples():
    assert norm(NormSpec(dim=2, p=1.0, weights=(1.0, 2.0)), [1.0, 1.0]) == pytest.approx(3.0)
    assert norm(NormSpec(dim=3, p=math.inf), [1.0, -7.0, 2.0]) == pytest.approx(7.0)
    assert dual_norm_of(NormSpec(dim=2, p=3.0), [1.0, 1.0]) == pytest.approx(2.0 ** (2.0 / 3.0))


@pytest.mark.parametrize("p, x, expected", [
    (2.0, [3.0, 4.0], [0.6, 0.8]),
    (1.0, [1.0, -2.0], [1.0, -1.0]),
    (math.inf, [1.0, 3.0], [0.0, 1.0]),
])
def test_norming_functional_examples(p, x, expected):
    f = norming_functional(NormSpec(dim=2, p=p), x)
    assert np.allclose(f.coeffs, expected)


@given(vectors, vectors, exponents)
def test_triangle_inequality(x, y, p):
    space = NormSpec(dim=4, p=p)
    total = norm(space, np.add(x, y))
    assert total <= norm(space, x) + norm(space, y) + 1e-9 * (1 + total)


@given(vectors, st.floats(min_value=-5, max_value=5, allow_nan=False), exponents)
def test_absolute_homogeneity(x, t, p):
    space = NormSpec(dim=4, p=p)
    assert norm(space, np.multiply(t, x)) == pytest.approx(abs(t) * norm(space, x), rel=1e-9, abs=1e-9)
