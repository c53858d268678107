"""
Independent verification: brute-force distances, residual verification of constructed
points and seeded audits of the construction lemmas.
"""

import logging
import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field
from scipy.linalg import null_space
from scipy.optimize import minimize

from .config import Tolerances
from .construction_models import AuditFailure, AuditReport, SpotCheck, VerificationReport
from .distance_engine import DEFAULT_TOLERANCES, distance, distance_value, last_level_crossing
from .errors import DegenerateInputError
from .functional_factory import two_point_hahn_banach
from .lethargy_constructor import build_zw, finite_construct, q_sequence, residual_rows
from .normed_space import dual_norm_of, norm, norm_rows
from .space_models import Chain, NormSpec, PointLike, Subspace, as_point
from .subspace_chain import random_chain, witness

logger = logging.getLogger(__name__)

MAX_ORACLE_RANK = 3

LEMMAS = ("kernel", "two_point", "two_point_free", "q_sequence", "finite")


class BruteForceBudget(BaseModel):
    """
    Effort of the brute-force distance search.
    """
    grid_points: int = Field(default=41, ge=3, description="Grid points per coefficient axis")
    refinements: int = Field(default=2, ge=0, description="Zoomed grid passes around the incumbent")
    restarts: int = Field(default=6, ge=0, description="Random Nelder–Mead restarts")
    seed: int = Field(default=0, description="Seed of the random restarts")


def _box_radius(space: NormSpec, x_norm: float) -> float:
    """Euclidean radius containing every nearest-point coefficient vector."""
    n = space.dim
    if space.p >= 2:
        equivalence = n ** (1.0 / space.p - 0.5) if not space.is_max_norm else n ** -0.5
    else:
        equivalence = 1.0
    return 2.0 * x_norm / (float(np.min(space.scale)) * equivalence)


def brute_distance(
    space: NormSpec, Y: Subspace, x: PointLike, budget: Optional[BruteForceBudget] = None
) -> float:
    """
    Reference ρ(x, Y) by grid search over subspace coefficients plus Nelder–Mead polishing.

    Args:
        space: Normed space
        Y: Subspace of dimension at most 3
        x: Point
        budget: Search effort

    Returns:
        Best distance found (an upper bound on ρ(x, Y))

    Raises:
        DegenerateInputError: If the subspace dimension exceeds 3
    """
    budget = budget or BruteForceBudget()
    x = as_point(x, space.dim)
    if Y.rank > MAX_ORACLE_RANK:
        raise DegenerateInputError(f"brute-force oracle refuses subspaces of dimension {Y.rank} > {MAX_ORACLE_RANK}")
    x_norm = norm(space, x)
    if Y.is_zero or x_norm == 0:
        return x_norm

    basis = Y.orthonormal
    k = basis.shape[1]

    def values(coeffs: np.ndarray) -> np.ndarray:
        return norm_rows(space, x[None, :] - coeffs @ basis.T)

    def objective(c: np.ndarray) -> float:
        return float(norm(space, x - basis @ c))

    center = np.zeros(k)
    half_width = _box_radius(space, x_norm)
    best_c, best = center, x_norm
    for _ in range(budget.refinements + 1):
        axes = [np.linspace(ci - half_width, ci + half_width, budget.grid_points) for ci in center]
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, k)
        vals = values(grid)
        i = int(np.argmin(vals))
        if vals[i] < best:
            best, best_c = float(vals[i]), grid[i]
        center = best_c
        half_width = 2.0 * (2.0 * half_width / (budget.grid_points - 1))

    rng = np.random.default_rng(budget.seed)
    radius = _box_radius(space, x_norm)
    starts = [best_c] + [rng.uniform(-radius, radius, size=k) for _ in range(budget.restarts)]
    for start in starts:
        res = minimize(objective, start, method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000 * k})
        if res.fun < best:
            best = float(res.fun)
    return best


def verify_construction(
    space: NormSpec, chain: Chain, x: PointLike, d: Sequence[float],
    tolerances: Optional[Tolerances] = None, spot_checks: bool = True,
) -> VerificationReport:
    """
    Per-k residuals |ρ(x, Y_k) − d_k|, with oracle spot checks on links of dimension ≤ 3.

    Args:
        space: Normed space
        chain: Chain Y_1 ⊂ … ⊂ Y_m
        x: Candidate point
        d: Targets of length m
        tolerances: Verification tolerance source
        spot_checks: Run brute_distance on low-dimensional links

    Returns:
        VerificationReport; passed iff every residual is within tolerance
    """
    tolerances = tolerances or DEFAULT_TOLERANCES
    if len(d) != chain.length:
        raise DegenerateInputError(f"{len(d)} targets for a chain of length {chain.length}")
    rows = residual_rows(space, chain, x, d, tolerances)
    checks = []
    if spot_checks:
        for row, Y in zip(rows, chain.spaces):
            if Y.rank <= MAX_ORACLE_RANK:
                oracle = brute_distance(space, Y, x)
                checks.append(SpotCheck(
                    k=row.k, solver=row.rho, oracle=oracle,
                    agrees=row.rho - 1e-4 * (1.0 + row.rho) <= oracle <= row.rho + 1e-3 * (1.0 + row.rho),
                ))
    return VerificationReport(
        rows=rows,
        tolerance=tolerances.verify_for(max(d, default=0.0)),
        spot_checks=checks,
        passed=all(r.passed for r in rows),
    )


def _random_triple(space: NormSpec, rng: np.random.Generator) -> Tuple[Subspace, Subspace, Subspace]:
    """Random Q1 ⊂ Q2 ⊂ Q3 with Q3 proper."""
    a = int(rng.integers(0, space.dim - 2))
    chain = random_chain(space.dim, [a, a + 1, a + 2], int(rng.integers(0, 2 ** 31)))
    return chain.spaces[0], chain.spaces[1], chain.spaces[2]


def _in_context(space: NormSpec, rng: np.random.Generator, tolerances: Tolerances):
    Q1, Q2, Q3 = _random_triple(space, rng)
    y2 = witness(space, Q2, Q3, tolerances=tolerances)
    y1 = witness(space, Q1, Q2, tolerances=tolerances)
    z, w = build_zw(space, Q1, Q2, y2, y1, tolerances)
    return Q1, Q2, z, w


def _audit_kernel(space, rng, trial, tolerances):
    f = rng.standard_normal(space.dim)
    x = rng.standard_normal(space.dim)
    kernel = Subspace.from_matrix(null_space(f[None, :]))
    observed = distance_value(space, kernel, x, tolerances)
    claimed = abs(float(f @ x)) / dual_norm_of(space, f)
    ok = abs(observed - claimed) <= tolerances.verify_for(claimed)
    return ok, {"f": f.tolist(), "x": x.tolist()}, {"distance": observed}, {"distance": claimed}


def _audit_two_point(space, rng, trial, tolerances):
    Q1, _, z, w = _in_context(space, rng, tolerances)
    rho_w = distance_value(space, Q1, w, tolerances)
    delta, _ = last_level_crossing(space, Q1, z, w, 1.0, 1.0, 3.0 / rho_w, tolerances)
    result = two_point_hahn_banach(space, Q1, w, z, delta=delta, tolerances=tolerances)
    config = {"Q_dim": Q1.rank, "x1": w.tolist(), "x2": z.tolist(), "delta": delta}
    return (
        result.feasible_at_norm, config,
        {"dual_norm": result.achieved_dual_norm, "f_x2": result.target_value},
        {"dual_norm": result.claimed_dual_norm},
    )


def _audit_two_point_free(space, rng, trial, tolerances):
    Q = Subspace.zero(space.dim)
    if trial == 0:
        x1, x2, delta = np.eye(space.dim)[0], np.eye(space.dim)[1], 0.0
    else:
        x1, x2, delta = rng.standard_normal(space.dim), rng.standard_normal(space.dim), None
    result = two_point_hahn_banach(space, Q, x1, x2, delta=delta, tolerances=tolerances)
    config = {"Q_dim": 0, "x1": x1.tolist(), "x2": x2.tolist(), "delta": result.delta}
    return (
        result.feasible_at_norm, config,
        {"dual_norm": result.achieved_dual_norm, "f_x2": result.target_value},
        {"dual_norm": result.claimed_dual_norm},
    )


def _audit_q_sequence(space, rng, trial, tolerances):
    Q1, Q2, z, w = _in_context(space, rng, tolerances)
    v = rng.uniform(0.5, 1.5, size=3)
    u = v + rng.uniform(0.0, 1.0, size=3)
    level = q_sequence(space, Q1, Q2, z, w, list(zip(u.tolist(), v.tolist())), tolerances)
    tol = tolerances.verify_for(float(u.max()))
    observed: Dict[str, object] = {
        "rho_z_Q1": distance_value(space, Q1, z, tolerances),
        "rho_z_Q2": distance_value(space, Q2, z, tolerances),
        "norm_z_minus_w": norm(space, z - w),
        "delta": level.delta,
        "delta_max": 3.0 / level.rho_w,
    }
    ok = (
        abs(observed["rho_z_Q1"] - 2.0) <= tol
        and abs(observed["rho_z_Q2"] - 1.0) <= tol
        and abs(observed["norm_z_minus_w"] - 1.0) <= tol
        and 1.0 - tol <= level.delta <= observed["delta_max"] + tol
    )
    worst_difference = 0.0
    for e in level.entries:
        ok = ok and abs(distance_value(space, Q1, e.q_array, tolerances) - e.u) <= tol
        ok = ok and abs(distance_value(space, Q2, e.q_array, tolerances) - e.v) <= tol
        for other in level.entries:
            diff = norm(space, e.q_array - other.q_array)
            bound = level.c * (max(e.u, other.u) - min(e.v, other.v))
            worst_difference = max(worst_difference, diff - bound)
    ok = ok and worst_difference <= 1e-6
    observed["difference_excess"] = worst_difference
    config = {"Q_dims": [Q1.rank, Q2.rank], "u": u.tolist(), "v": v.tolist()}
    return ok, config, observed, {"rho_z_Q1": 2.0, "rho_z_Q2": 1.0, "norm_z_minus_w": 1.0}


def _audit_finite(space, rng, trial, tolerances):
    n = int(rng.integers(1, min(4, space.dim)))
    dims = sorted(rng.choice(np.arange(0, space.dim), size=n, replace=False).tolist())
    chain = random_chain(space.dim, dims, int(rng.integers(0, 2 ** 31)))
    d = np.sort(rng.uniform(0.1, 3.0, size=n))[::-1]
    z = rng.standard_normal(space.dim)
    result = finite_construct(space, chain, d.tolist(), z, tolerances)
    ok = result.passed and result.lam > 0 and result.span_residual <= 1e-8 * (1.0 + np.linalg.norm(z))
    config = {"dims": dims, "d": d.tolist(), "z": z.tolist()}
    observed = {"max_residual": max(r.residual for r in result.residuals), "lam": result.lam,
                "span_residual": result.span_residual}
    return ok, config, observed, {"max_residual": 0.0}


_AUDITS: Dict[str, Callable] = {
    "kernel": _audit_kernel,
    "two_point": _audit_two_point,
    "two_point_free": _audit_two_point_free,
    "q_sequence": _audit_q_sequence,
    "finite": _audit_finite,
}


def lemma_audit(
    lemma: str, space: NormSpec, trials: int, seed: int, tolerances: Optional[Tolerances] = None
) -> AuditReport:
    """
    Evaluate a lemma's conclusions on seeded random configurations satisfying its hypotheses.

    Args:
        lemma: One of kernel, two_point, two_point_free, q_sequence, finite
        space: Space family (dimension and norm)
        trials: Number of configurations
        seed: Base seed; trial i uses np.random.default_rng([seed, i])

    Returns:
        AuditReport with every failing configuration
    """
    tolerances = tolerances or DEFAULT_TOLERANCES
    if lemma not in _AUDITS:
        raise DegenerateInputError(f"unknown lemma id '{lemma}'; expected one of {LEMMAS}")
    if trials < 1:
        raise DegenerateInputError("trials must be at least 1")
    if space.dim < 3:
        raise DegenerateInputError("audits need an ambient dimension of at least 3")

    audit = _AUDITS[lemma]
    passes = 0
    failures: List[AuditFailure] = []
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        ok, config, observed, claimed = audit(space, rng, trial, tolerances)
        if ok:
            passes += 1
        else:
            failures.append(AuditFailure(trial=trial, seed=[seed, trial], config=config,
                                         observed=observed, claimed=claimed))
    logger.info("audit %s p=%s: %d/%d passed", lemma, space.exponent_label(), passes, trials)
    return AuditReport(lemma=lemma, p=space.exponent_label(), trials=trials, passes=passes,
                       failures=failures, seed=seed)


def _random_instance(p: float, rng: np.random.Generator) -> Tuple[NormSpec, Subspace, np.ndarray]:
    dim = int(rng.integers(2, 7))
    k = int(rng.integers(0, min(3, dim - 1) + 1))
    space = NormSpec(dim=dim, p=p)
    Y = Subspace.from_matrix(rng.standard_normal((dim, k)), dim=dim)
    return space, Y, rng.standard_normal(dim)


def oracle_equivalence(
    p: float, instances: int, seed: int, budget: Optional[BruteForceBudget] = None,
    tolerances: Optional[Tolerances] = None,
) -> Dict[str, float]:
    """
    Largest |distance − brute_distance| over random instances (ambient dim ≤ 6, subspace dim ≤ 3).
    """
    worst = 0.0
    for i in range(instances):
        rng = np.random.default_rng([seed, i])
        space, Y, x = _random_instance(p, rng)
        solved = distance_value(space, Y, x, tolerances)
        worst = max(worst, abs(solved - brute_distance(space, Y, x, budget)))
    return {"instances": float(instances), "max_error": worst}


def certificate_duality(
    p: float, instances: int, seed: int, tolerances: Optional[Tolerances] = None
) -> Dict[str, float]:
    """
    Largest duality gap |f(x) − ρ| and largest |f(b)| over basis vectors b of Y, on random solves.
    """
    worst_gap, worst_vanish = 0.0, 0.0
    for i in range(instances):
        rng = np.random.default_rng([seed, i])
        space, Y, x = _random_instance(p, rng)
        solution = distance(space, Y, x, tolerances)
        worst_gap = max(worst_gap, abs(solution.certificate(x) - solution.value))
        for b in Y.basis.T:
            worst_vanish = max(worst_vanish, abs(solution.certificate(b)) / max(1.0, float(np.linalg.norm(b))))
    return {"instances": float(instances), "max_gap": worst_gap, "max_vanishing": worst_vanish}


def acceptance_gap_limit(p: float) -> float:
    """Duality-gap acceptance threshold per norm."""
    if p == 2:
        return 1e-7
    if p == 1 or math.isinf(p):
        return 1e-6
    return 1e-5
