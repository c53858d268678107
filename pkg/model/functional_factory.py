"""
Annihilating norming functionals and the two-point Hahn–Banach construction.
Minimal dual-norm functionals are found as distance problems in the dual space.
"""

import logging
import math
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import linprog

from .config import Tolerances
from .distance_engine import DEFAULT_TOLERANCES, argmin_line_right, distance, distance_value
from .errors import DegenerateInputError, SolverError
from .normed_space import functional_from_scaled, norm
from .space_models import Functional, NormSpec, PointLike, Subspace, TwoPointResult, as_point

logger = logging.getLogger(__name__)

# Relative slack of the claimed norm 1/ρ(x1, Q).
NORM_SLACK = 1e-6
LP_NORM_SLACK = 1e-7


def annihilator_certificate(
    space: NormSpec, Y: Subspace, x: PointLike, tolerances: Optional[Tolerances] = None
) -> Functional:
    """
    f with f|Y = 0, ‖f‖ = 1 and f(x) = ρ(x, Y).

    Raises:
        DegenerateInputError: If x lies in span(Y)
    """
    tolerances = tolerances or DEFAULT_TOLERANCES
    x = as_point(x, space.dim)
    solution = distance(space, Y, x, tolerances)
    if solution.value <= tolerances.compare * (1.0 + norm(space, x)):
        raise DegenerateInputError("x lies in span(Y); no annihilating certificate direction")
    return solution.certificate


def minimum_dual_norm_functional(
    space: NormSpec, points: Sequence[PointLike], values: Sequence[float],
    tolerances: Optional[Tolerances] = None,
) -> Functional:
    """
    Functional of least dual norm with f(points[i]) = values[i].

    Args:
        space: Normed space
        points: Constraint points
        values: Prescribed values

    Returns:
        Minimizing functional

    Raises:
        DegenerateInputError: If the constraint system is inconsistent
    """
    tolerances = tolerances or DEFAULT_TOLERANCES
    rows = np.array([space.scale * as_point(pt, space.dim, "constraint point") for pt in points])
    rhs = np.asarray(values, dtype=float)
    g0, *_ = np.linalg.lstsq(rows, rhs, rcond=None)
    if np.linalg.norm(rows @ g0 - rhs) > 1e-9 * (1.0 + np.linalg.norm(rhs)):
        raise DegenerateInputError("constraint system is inconsistent")

    kernel = null_space(rows)
    if kernel.shape[1] == 0:
        return functional_from_scaled(space, g0)
    dual_space = NormSpec(dim=space.dim, p=space.dual_exponent)
    nearest = distance(dual_space, Subspace.from_matrix(kernel), g0, tolerances).minimizer_array
    return functional_from_scaled(space, g0 - nearest)


def two_point_hahn_banach(
    space: NormSpec, Q: Subspace, x1: PointLike, x2: PointLike,
    delta: Optional[float] = None, mirrored: bool = False,
    tolerances: Optional[Tolerances] = None,
) -> TwoPointResult:
    """
    Least-dual-norm f with f|Q = 0, f(x1) = 1 and f(x2) = δ − ρ(x2 − δ·x1, Q)/ρ(x1, Q).

    The claimed norm ‖f‖ = 1/ρ(x1, Q) is checked, not assumed: feasible_at_norm reports it.
    With mirrored=True the construction runs on −x1 and the resulting functional is negated.

    Args:
        space: Normed space
        Q: Subspace the functional must vanish on
        x1: First point, outside span(Q)
        x2: Second point, outside span(Q ∪ {x1})
        delta: Right endpoint of the argmin interval; computed when omitted
        mirrored: Use the mirrored form of the lemma
        tolerances: Solver tolerances

    Returns:
        TwoPointResult
    """
    tolerances = tolerances or DEFAULT_TOLERANCES
    x1 = as_point(x1, space.dim, "x1")
    x2 = as_point(x2, space.dim, "x2")
    lead = -x1 if mirrored else x1

    rho1 = distance_value(space, Q, lead, tolerances)
    if rho1 <= tolerances.compare * (1.0 + norm(space, x1)):
        raise DegenerateInputError("x1 lies in span(Q)")
    extended = Subspace.from_matrix(np.column_stack([Q.basis, lead]))
    if distance_value(space, extended, x2, tolerances) <= tolerances.compare * (1.0 + norm(space, x2)):
        raise DegenerateInputError("x2 lies in span(Q ∪ {x1})")

    if delta is None:
        delta = argmin_line_right(space, Q, x2, lead, tolerances).delta
    target = delta - distance_value(space, Q, x2 - delta * lead, tolerances) / rho1

    points = list(Q.basis.T) + [lead, x2]
    values = [0.0] * Q.rank + [1.0, target]
    f = minimum_dual_norm_functional(space, points, values, tolerances)
    achieved = f.dual_norm
    claimed = 1.0 / rho1
    feasible = achieved <= (1.0 + NORM_SLACK) * claimed
    if mirrored:
        f = f.scaled(-1.0)
        target = -target
    if not feasible:
        logger.info(
            "two-point functional infeasible at norm: achieved %.9g, claimed %.9g", achieved, claimed
        )
    return TwoPointResult(
        delta=delta,
        f=f,
        target_value=target,
        achieved_dual_norm=achieved,
        claimed_dual_norm=claimed,
        feasible_at_norm=feasible,
        mirrored=mirrored,
    )


def norm_attaining_two_point(
    space: NormSpec, Q: Subspace, x1: PointLike, x2: PointLike, target: float, delta: float,
    tolerances: Optional[Tolerances] = None,
) -> TwoPointResult:
    """
    Among f with f|Q = 0, f(x1) = 1 and ‖f‖ = 1/ρ(x1, Q), the one with f(x2) closest to target.

    For 1 < p < inf this set is a single functional (the scaled certificate of x1);
    for p in {1, inf} the closest value is found by a linear program.
    """
    tolerances = tolerances or DEFAULT_TOLERANCES
    x1 = as_point(x1, space.dim, "x1")
    x2 = as_point(x2, space.dim, "x2")
    solution = distance(space, Q, x1, tolerances)
    rho1 = solution.value
    if rho1 <= tolerances.compare * (1.0 + norm(space, x1)):
        raise DegenerateInputError("x1 lies in span(Q)")

    if not space.is_polyhedral:
        f = solution.certificate.scaled(1.0 / rho1)
    else:
        f = _closest_value_lp(space, Q, x1, x2, target, (1.0 + LP_NORM_SLACK) / rho1)

    return TwoPointResult(
        delta=delta,
        f=f,
        target_value=target,
        achieved_dual_norm=f.dual_norm,
        claimed_dual_norm=1.0 / rho1,
        feasible_at_norm=f.dual_norm <= (1.0 + NORM_SLACK) / rho1,
    )


def _closest_value_lp(space, Q, x1, x2, target, bound) -> Functional:
    n = space.dim
    s = space.scale
    basis = (s[:, None] * Q.basis).T
    x1s, x2s = s * x1, s * x2
    options = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}

    if math.isinf(space.p):
        # dual ℓ1 ball: g = u − v with Σ(u + v) ≤ bound
        objective = np.concatenate([np.zeros(2 * n), [1.0]])
        a_eq = np.vstack([np.hstack([basis, -basis, np.zeros((Q.rank, 1))]), np.concatenate([x1s, -x1s, [0.0]])])
        a_ub = np.vstack([
            np.concatenate([x2s, -x2s, [-1.0]]),
            np.concatenate([-x2s, x2s, [-1.0]]),
            np.concatenate([np.ones(2 * n), [0.0]]),
        ])
        b_ub = [target, -target, bound]
        res = linprog(
            objective, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=np.concatenate([np.zeros(Q.rank), [1.0]]),
            bounds=(0, None), method="highs-ds", options=options,
        )
        if res.status != 0:
            raise SolverError(f"norm-attaining functional LP failed: {res.message}")
        g = res.x[:n] - res.x[n: 2 * n]
    else:
        # dual ℓ∞ ball: |g_i| ≤ bound
        objective = np.concatenate([np.zeros(n), [1.0]])
        a_eq = np.vstack([np.hstack([basis, np.zeros((Q.rank, 1))]), np.concatenate([x1s, [0.0]])])
        a_ub = np.vstack([np.concatenate([x2s, [-1.0]]), np.concatenate([-x2s, [-1.0]])])
        res = linprog(
            objective, A_ub=a_ub, b_ub=[target, -target], A_eq=a_eq,
            b_eq=np.concatenate([np.zeros(Q.rank), [1.0]]),
            bounds=[(-bound, bound)] * n + [(0, None)], method="highs-ds", options=options,
        )
        if res.status != 0:
            raise SolverError(f"norm-attaining functional LP failed: {res.message}")
        g = res.x[:n]
    return functional_from_scaled(space, g)
