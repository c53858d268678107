"""
Tests for annihilating certificates, minimum-norm functionals and the two-point construction.
"""

import math

import numpy as np
import pytest

from model.distance_engine import distance_value
from model.errors import DegenerateInputError
from model.functional_factory import (
    annihilator_certificate,
    minimum_dual_norm_functional,
    norm_attaining_two_point,
    two_point_hahn_banach,
)
from model.normed_space import norm
from model.space_models import NormSpec, Subspace
from model.subspace_chain import random_chain


def test_annihilator_certificate(space):
    rng = np.random.default_rng(21)
    Y = Subspace.from_matrix(rng.standard_normal((space.dim, 2)))
    x = rng.standard_normal(space.dim)
    f = annihilator_certificate(space, Y, x)
    assert f.dual_norm == pytest.approx(1.0, abs=1e-6)
    assert f(x) == pytest.approx(distance_value(space, Y, x), abs=1e-5)
    for b in Y.basis.T:
        assert abs(f(b)) <= 1e-6 * (1 + np.linalg.norm(b))


def test_annihilator_certificate_rejects_member():
    space = NormSpec(dim=3, p=2.0)
    Y = Subspace.from_matrix([1.0, 2.0, 0.0])
    with pytest.raises(DegenerateInputError):
        annihilator_certificate(space, Y, [2.0, 4.0, 0.0])


def test_single_constraint_minimum_norm(space):
    # the least norm of f with f(x) = 1 is 1/‖x‖
    x = np.array([1.0, -2.0, 0.5, 0.0, 3.0])
    f = minimum_dual_norm_functional(space, [x], [1.0])
    assert f(x) == pytest.approx(1.0, abs=1e-8)
    assert f.dual_norm == pytest.approx(1.0 / norm(space, x), rel=1e-5)


def test_minimum_norm_on_l1_diagonal():
    space = NormSpec(dim=2, p=1.0)
    f = minimum_dual_norm_functional(space, [[1.0, 1.0]], [1.0])
    assert f.dual_norm == pytest.approx(0.5, abs=1e-9)


def test_inconsistent_constraints_raise():
    space = NormSpec(dim=3, p=2.0)
    x = np.array([1.0, 0.0, 1.0])
    with pytest.raises(DegenerateInputError):
        minimum_dual_norm_functional(space, [x, 2 * x], [1.0, 1.0])


@pytest.mark.parametrize("mirrored", [False, True])
def test_two_point_constraints_hold(space, mirrored):
    chain = random_chain(space.dim, [1], seed=3)
    Q = chain.spaces[0]
    rng = np.random.default_rng(5)
    x1, x2 = rng.standard_normal(space.dim), rng.standard_normal(space.dim)
    result = two_point_hahn_banach(space, Q, x1, x2, mirrored=mirrored)
    f = result.f
    assert f(x1) == pytest.approx(1.0, abs=1e-7)
    assert f(x2) == pytest.approx(result.target_value, abs=1e-7)
    assert abs(f(Q.basis[:, 0])) <= 1e-7
    assert result.achieved_dual_norm >= result.claimed_dual_norm * (1 - 1e-6)
    assert result.mirrored == mirrored


def test_two_point_claimed_norm_can_be_infeasible():
    # f(e1) = 1 and f(e2) = −1 force ‖f‖ = √2 while the claimed norm is 1
    space = NormSpec(dim=3, p=2.0)
    result = two_point_hahn_banach(space, Subspace.zero(3), [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], delta=0.0)
    assert result.target_value == pytest.approx(-1.0)
    assert result.claimed_dual_norm == pytest.approx(1.0)
    assert result.achieved_dual_norm == pytest.approx(math.sqrt(2.0))
    assert not result.feasible_at_norm


def test_two_point_rejects_dependent_points():
    space = NormSpec(dim=3, p=2.0)
    with pytest.raises(DegenerateInputError):
        two_point_hahn_banach(space, Subspace.zero(3), [1.0, 0.0, 0.0], [2.0, 0.0, 0.0])


@pytest.mark.parametrize("p", [1.0, 2.0, 3.0, math.inf])
def test_norm_attaining_two_point(p):
    space = NormSpec(dim=4, p=p)
    Q = Subspace.from_matrix([0.0, 0.0, 1.0, 1.0])
    x1, x2 = np.array([1.0, 0.5, 0.0, 0.0]), np.array([0.0, 1.0, -1.0, 0.0])
    result = norm_attaining_two_point(space, Q, x1, x2, target=-0.5, delta=1.0)
    assert result.f(x1) == pytest.approx(1.0, abs=1e-6)
    assert abs(result.f(Q.basis[:, 0])) <= 1e-6
    assert result.achieved_dual_norm == pytest.approx(result.claimed_dual_norm, rel=1e-5)
    assert result.feasible_at_norm


@pytest.mark.parametrize("delta", [2.0, None])
def test_two_point_max_norm_example(delta):
    # max(|1 − a|, 1) is flat on [0, 2]; at its right end f = (1, 0) has dual ℓ1-norm 1
    space = NormSpec(dim=2, p=math.inf)
    result = two_point_hahn_banach(space, Subspace.zero(2), [1.0, 0.0], [1.0, 1.0], delta=delta)
    assert result.delta == pytest.approx(2.0, abs=1e-6)
    assert result.target_value == pytest.approx(1.0, abs=1e-6)
    assert np.allclose(result.f.coeffs, [1.0, 0.0], atol=1e-6)
    assert result.achieved_dual_norm == pytest.approx(1.0, abs=1e-6)
    assert result.feasible_at_norm
