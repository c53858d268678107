"""
Tests for the brute-force oracle, residual verification and the lemma audits.
"""

import math

import numpy as np
import pytest

from model.distance_engine import distance_value
from model.errors import DegenerateInputError
from model.lethargy_constructor import theorem_construct
from model.oracle import (
    BruteForceBudget,
    acceptance_gap_limit,
    brute_distance,
    certificate_duality,
    lemma_audit,
    oracle_equivalence,
    verify_construction,
)
from model.space_models import NormSpec, Subspace
from model.subspace_chain import random_chain


@pytest.mark.parametrize("p, slack", [(2.0, 1e-6), (3.0, 1e-5), (1.0, 1e-4), (math.inf, 1e-4)])
def test_brute_distance_agrees_with_solver(p, slack):
    rng = np.random.default_rng(4)
    space = NormSpec(dim=4, p=p)
    Y = Subspace.from_matrix(rng.standard_normal((4, 2)))
    x = rng.standard_normal(4)
    solved = distance_value(space, Y, x)
    brute = brute_distance(space, Y, x, BruteForceBudget(restarts=2))
    # the brute-force value is an upper bound
    assert brute >= solved - 1e-8
    assert brute <= solved + slack * (1 + solved)


def test_brute_distance_refuses_large_subspaces():
    space = NormSpec(dim=5)
    with pytest.raises(DegenerateInputError):
        brute_distance(space, Subspace.from_matrix(np.eye(5)[:, :4]), np.ones(5))


def test_verify_accepts_constructed_point():
    space = NormSpec(dim=5, p=2.0)
    chain = random_chain(5, [1, 2, 3], seed=1)
    d = [1.0, 0.5, 0.25]
    x, _ = theorem_construct(space, chain, d)
    report = verify_construction(space, chain, x, d)
    assert report.passed
    assert report.failing_rows == []
    assert [check.k for check in report.spot_checks] == [1, 2, 3]
    assert all(check.agrees for check in report.spot_checks)


def test_verify_reports_failing_rows():
    space = NormSpec(dim=4, p=2.0)
    chain = random_chain(4, [1, 2], seed=1)
    report = verify_construction(space, chain, np.zeros(4), [1.0, 0.5], spot_checks=False)
    assert not report.passed
    assert report.failing_rows == [1, 2]
    assert report.rows[0].residual == pytest.approx(1.0)


def test_kernel_audit_passes():
    report = lemma_audit("kernel", NormSpec(dim=4, p=1.5), trials=5, seed=2)
    assert report.passes == 5
    assert report.pass_rate == 1.0


def test_two_point_free_audit_records_reproducible_failure():
    report = lemma_audit("two_point_free", NormSpec(dim=3, p=2.0), trials=1, seed=0)
    assert report.passes == 0
    failure = report.failures[0]
    assert failure.trial == 0
    assert failure.seed == [0, 0]
    assert failure.observed["dual_norm"] == pytest.approx(math.sqrt(2.0))


def test_audits_are_deterministic():
    space = NormSpec(dim=4, p=2.0)
    first = lemma_audit("q_sequence", space, trials=2, seed=8)
    second = lemma_audit("q_sequence", space, trials=2, seed=8)
    assert first.passes == second.passes
    assert first.passes + len(first.failures) == 2


def test_audit_rejects_unknown_lemma_and_small_dimension():
    with pytest.raises(DegenerateInputError):
        lemma_audit("pythagoras", NormSpec(dim=4), trials=1, seed=0)
    with pytest.raises(DegenerateInputError):
        lemma_audit("kernel", NormSpec(dim=2), trials=1, seed=0)


@pytest.mark.parametrize("p", [1.0, 2.0, math.inf])
def test_certificate_duality_within_acceptance(p):
    result = certificate_duality(p, instances=8, seed=3)
    assert result["max_gap"] <= acceptance_gap_limit(p)
    assert result["max_vanishing"] <= 1e-6


def test_brute_distance_worked_examples():
    assert brute_distance(NormSpec(dim=2, p=2.0), Subspace.from_matrix([1.0, 0.0]), [3.0, 4.0]) == pytest.approx(4.0, abs=1e-5)
    assert brute_distance(NormSpec(dim=2, p=1.0), Subspace.from_matrix([1.0, 1.0]), [1.0, 0.0]) == pytest.approx(1.0, abs=1e-3)
    assert brute_distance(NormSpec(dim=3, p=3.0), Subspace.zero(3), [1.0, 1.0, 1.0]) == pytest.approx(3.0 ** (1 / 3))


def test_verify_zero_point_against_zero_targets():
    space = NormSpec(dim=4, p=2.0)
    report = verify_construction(space, random_chain(4, [1, 2], seed=2), np.zeros(4), [0.0, 0.0])
    assert report.passed


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.0, math.inf])
def test_oracle_equivalence_on_random_instances(p):
    result = oracle_equivalence(p, instances=12, seed=5)
    assert result["max_error"] <= 1e-4
