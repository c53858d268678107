"""
Constructions of elements with prescribed distances to a nested chain of subspaces:
the q-sequence lemma, the finite-chain lemma, the theorem driver, the Cauchy study
and the norm-attainment demo.
"""

import logging
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import null_space

from .config import Tolerances
from .construction_models import (
    BoundRow,
    CauchyStudyReport,
    ConstructionTranscript,
    FiniteConstructResult,
    FunctionalRecord,
    GapRow,
    JamesReport,
    QEntry,
    QSequenceLevel,
    ResidualRow,
    SweepStep,
    TargetSequence,
    TauSequence,
    estimate_warning,
)
from .distance_engine import (
    DEFAULT_TOLERANCES,
    distance,
    distance_value,
    ivt_solve,
    ivt_solve_expanding,
    last_level_crossing,
)
from .errors import ChainValidationError, DegenerateInputError
from .functional_factory import norm_attaining_two_point, two_point_hahn_banach
from .normed_space import dual_norm_of, norm
from .space_models import Chain, Functional, NormSpec, Point, PointLike, Subspace, as_point
from .subspace_chain import NESTING_TOLERANCE, chain_witnesses, validate_chain

logger = logging.getLogger(__name__)

TargetsLike = Union[TargetSequence, Sequence[float]]

PROFILES = ("geometric", "harmonic", "tied", "zero_tail")


def _as_targets(d: TargetsLike) -> TargetSequence:
    return d if isinstance(d, TargetSequence) else TargetSequence(d=[float(v) for v in d])


def _tuple(x: Point) -> Tuple[float, ...]:
    return tuple(float(v) for v in x)


def target_profile(name: str, m: int) -> TargetSequence:
    """
    Named target sequences of length m.

    Args:
        name: One of 'geometric' (2^{−k}), 'harmonic' (1/k), 'tied' (1, 1, 1/2, 1/4, …)
            or 'zero_tail' (1, 1/2, 0, 0, …)
        m: Length

    Returns:
        TargetSequence
    """
    if m < 1:
        raise DegenerateInputError("profile length must be positive")
    if name == "geometric":
        d = [2.0 ** -k for k in range(1, m + 1)]
    elif name == "harmonic":
        d = [1.0 / k for k in range(1, m + 1)]
    elif name == "tied":
        d = [1.0] + [2.0 ** -(k - 2) for k in range(2, m + 1)]
    elif name == "zero_tail":
        d = [1.0, 0.5] + [0.0] * max(m - 2, 0)
        d = d[:m]
    else:
        raise DegenerateInputError(f"unknown target profile '{name}'; expected one of {PROFILES}")
    return TargetSequence(d=d)


def residual_rows(
    space: NormSpec, chain: Chain, x: PointLike, d: Sequence[float], tolerances: Optional[Tolerances] = None
) -> List[ResidualRow]:
    """|ρ(x, Y_k) − d_k| for every k, checked against the verify tolerance scaled by (1 + d_1)."""
    tolerances = tolerances or DEFAULT_TOLERANCES
    x = as_point(x, space.dim)
    tol = tolerances.verify_for(max(d, default=0.0))
    rows = []
    for k, (Y, target) in enumerate(zip(chain.spaces, d), start=1):
        rho = distance_value(space, Y, x, tolerances)
        residual = abs(rho - target)
        rows.append(ResidualRow(k=k, d=float(target), rho=rho, residual=residual, passed=residual <= tol))
    return rows


def build_zw(
    space: NormSpec, Q1: Subspace, Q2: Subspace, y2: PointLike, y1_dir: PointLike,
    tolerances: Optional[Tolerances] = None,
) -> Tuple[Point, Point]:
    """
    z = y2/‖y2‖ + t·y1_dir with ρ(z, Q1) = 2, and w = t·y1_dir.

    Args:
        space: Normed space
        Q1: Smaller subspace
        Q2: Larger subspace
        y2: Witness with ρ(y2, Q2) = ‖y2‖
        y1_dir: Direction in span(Q2) outside span(Q1)

    Returns:
        Tuple (z, w) with ρ(z, Q2) = 1 and ‖z − w‖ = 1
    """
    tolerances = tolerances or DEFAULT_TOLERANCES
    y2 = as_point(y2, space.dim, "y2")
    y1_dir = as_point(y1_dir, space.dim, "y1_dir")
    size = norm(space, y2)
    if size == 0:
        raise DegenerateInputError("witness y2 is zero")
    if abs(distance_value(space, Q2, y2, tolerances) - size) > tolerances.verify_for(size):
        raise DegenerateInputError("witness precondition violated: ρ(y2, Q2) ≠ ‖y2‖")
    if not Q2.contains(y1_dir, NESTING_TOLERANCE):
        raise DegenerateInputError("y1_dir must lie in span(Q2)")
    rho_dir = distance_value(space, Q1, y1_dir, tolerances)
    if rho_dir <= tolerances.compare * (1.0 + norm(space, y1_dir)):
        raise DegenerateInputError("y1_dir lies in span(Q1)")

    unit = y2 / size
    t, _ = ivt_solve_expanding(space, Q1, unit, y1_dir, 0.0, 3.0 / rho_dir, 2.0, tolerances)
    w = t * y1_dir
    return unit + w, w


def q_sequence(
    space: NormSpec, Q1: Subspace, Q2: Subspace, z: PointLike, w: PointLike,
    pairs: Sequence[Tuple[float, float]], tolerances: Optional[Tolerances] = None,
    j: int = 1, labels: Optional[Sequence[int]] = None,
) -> QSequenceLevel:
    """
    q_m = v_m x2′ + μ_m x1′ with ρ(q_m, Q1) = u_m and ρ(q_m, Q2) = v_m.

    δ is the last crossing of a ⟼ ρ(z − a·w, Q1) with level 1 in [1, 3/ρ(w, Q1)];
    x1′ = (f(z) − δ)w and x2′ = z − f(z)w use the prescribed value f(z) = δ − 1/ρ(w, Q1).

    Args:
        space: Normed space
        Q1: Smaller subspace
        Q2: Larger subspace
        z: From build_zw
        w: From build_zw
        pairs: (u_m, v_m) with u_m ≥ v_m ≥ 0
        j: Level index recorded in the result
        labels: Index m of each pair (1..len(pairs) by default)

    Returns:
        QSequenceLevel
    """
    tolerances = tolerances or DEFAULT_TOLERANCES
    z = as_point(z, space.dim, "z")
    w = as_point(w, space.dim, "w")
    labels = list(labels) if labels is not None else list(range(1, len(pairs) + 1))
    for u, v in pairs:
        if not (u >= v >= 0):
            raise DegenerateInputError(f"pair (u={u}, v={v}) violates u ≥ v ≥ 0")

    rho_w = distance_value(space, Q1, w, tolerances)
    if rho_w <= tolerances.compare:
        raise DegenerateInputError("w lies in span(Q1)")
    delta_max = 3.0 / rho_w
    delta, _ = last_level_crossing(space, Q1, z, w, 1.0, 1.0, delta_max, tolerances)
    target = delta - 1.0 / rho_w

    warnings: List[str] = []
    two_point = two_point_hahn_banach(space, Q1, w, z, delta=delta, tolerances=tolerances)
    if not two_point.feasible_at_norm:
        warnings.append(
            f"level {j}: two-point functional infeasible at norm "
            f"({two_point.achieved_dual_norm:.9g} > {two_point.claimed_dual_norm:.9g})"
        )

    x1p = (target - delta) * w
    x2p = z - target * w
    entries = []
    for m, (u, v) in zip(labels, pairs):
        expansions = 0
        if tolerances.close(u, v) or distance_value(space, Q1, v * (x2p + x1p), tolerances) >= u:
            mu = v
        else:
            mu, expansions = ivt_solve_expanding(space, Q1, v * x2p, x1p, v, u, u, tolerances)
            if expansions:
                warnings.append(f"level {j}, m={m}: μ bracket widened {expansions} times")
        entries.append(QEntry(m=m, u=u, v=v, mu=mu, q=_tuple(v * x2p + mu * x1p), expansions=expansions))

    return QSequenceLevel(
        j=j,
        z=_tuple(z),
        w=_tuple(w),
        rho_w=rho_w,
        delta=delta,
        target_value=target,
        f=two_point.f,
        feasible_at_norm=two_point.feasible_at_norm,
        entries=entries,
        c=norm(space, z) + 2.0,
        warnings=warnings,
    )


def _unit(space: NormSpec, y: Point) -> Point:
    return y / norm(space, y)


def _fixed_level(space: NormSpec, j: int, unit: Point, labels: Sequence[int]) -> QSequenceLevel:
    """q_{j,n} = unit vector for every n (ties after a zero first subspace)."""
    zeros = _tuple(np.zeros(space.dim))
    entries = [QEntry(m=m, u=1.0, v=1.0, mu=1.0, q=_tuple(unit)) for m in labels]
    return QSequenceLevel(j=j, kind="fixed", z=_tuple(unit), w=zeros, entries=entries, c=3.0)


def _build_levels(
    space: NormSpec, spaces: List[Subspace], hats: List[Point], d: List[float],
    n_values: Sequence[int], tolerances: Tolerances, first_fixed: Optional[Point], offset: int,
) -> List[QSequenceLevel]:
    tau = TauSequence.from_targets(d)
    zero = Subspace.zero(space.dim)
    levels: List[QSequenceLevel] = []
    prev_z: Optional[Point] = None
    for j in range(1, max(n_values) + 1):
        labels = [n for n in n_values if n >= j]
        Y_j = spaces[j - 1]
        if j == 1 and first_fixed is not None:
            levels.append(_fixed_level(space, j + offset, first_fixed, labels))
            prev_z = first_fixed
            continue

        alpha = None
        z_prime = None
        if j == 1:
            anchor = _unit(space, Y_j.basis[:, 0])
            z, w = build_zw(space, zero, Y_j, hats[0], anchor, tolerances)
        elif levels[-1].kind == "fixed":
            z, w = build_zw(space, zero, Y_j, hats[j - 1], prev_z, tolerances)
        else:
            z_prime = hats[j - 1] + prev_z
            alpha = ivt_solve(space, zero, z_prime, prev_z, (-0.5, 0.5), 2.0, tolerances)
            z = z_prime + alpha * prev_z
            w = (1.0 + alpha) * prev_z

        pairs = [(tau.amplitude(j, n, d), 1.0) for n in labels]
        level = q_sequence(space, zero, Y_j, z, w, pairs, tolerances, j=j + offset, labels=labels)
        if alpha is not None:
            level = level.model_copy(update={"alpha": alpha, "z_prime": _tuple(z_prime)})
        levels.append(level)
        prev_z = z
    return levels


def _level_functional(
    space: NormSpec, Y_j: Subspace, q_j: Point, q_next: Point, j: int, n: int,
    tau: TauSequence, d: List[float], tolerances: Tolerances, warnings: List[str], offset: int,
) -> FunctionalRecord:
    result = two_point_hahn_banach(space, Y_j, q_j, q_next, tolerances=tolerances)
    fallback = False
    if not result.feasible_at_norm:
        warnings.append(
            f"f_{j + offset},{n + offset}: infeasible at norm "
            f"({result.achieved_dual_norm:.9g} > {result.claimed_dual_norm:.9g}); using norm-attaining functional"
        )
        result = norm_attaining_two_point(
            space, Y_j, q_j, q_next, result.target_value, result.delta, tolerances
        ).model_copy(update={"feasible_at_norm": False})
        fallback = True
    window_hi = tau.tau[n - 1] / (2.0 ** j * d[j]) - 1.0
    return FunctionalRecord(
        j=j + offset,
        n=n + offset,
        f=result.f,
        delta=result.delta,
        target_value=result.target_value,
        value_next=result.f(q_next),
        window=(-1.0, window_hi),
        feasible_at_norm=result.feasible_at_norm,
        fallback=fallback,
    )


def _sweep(
    space: NormSpec, spaces: List[Subspace], levels: List[QSequenceLevel], d: List[float], n: int,
    tolerances: Tolerances, offset: int,
) -> Tuple[Point, List[float], List[FunctionalRecord], List[SweepStep], List[str], Dict[int, Point]]:
    """Backward sweep λ_{n,n} = d_n, then λ_{k−1,n} for k = n, …, 2."""
    tau = TauSequence.from_targets(d)
    warnings: List[str] = []
    q = {j: levels[j - 1].entry(n).q_array for j in range(1, n + 1)}
    functionals = [
        _level_functional(space, spaces[j - 1], q[j], q[j + 1], j, n, tau, d, tolerances, warnings, offset)
        for j in range(1, n)
    ]

    lambdas = [0.0] * n
    lambdas[n - 1] = d[n - 1]
    z = d[n - 1] * q[n]
    steps: List[SweepStep] = []
    for k in range(n, 1, -1):
        Y_lo = spaces[k - 2]
        goal = d[k - 2]
        index = k - 1
        upper = distance_value(space, Y_lo, z, tolerances)
        endpoint_general = functionals[k - 2].f(q[k])
        endpoint_top = functionals[n - 2].f(q[n])
        slack = tolerances.solve_for(space.p) * (1.0 + goal)

        correction: Tuple[float, ...] = ()
        if upper > goal + slack:
            nearest = distance(space, spaces[k - 1], z, tolerances).minimizer_array
            z = z - nearest
            correction = _tuple(nearest)
            warnings.append(
                f"sweep k={k + offset}: ρ(z, Y_{k - 1 + offset}) = {upper:.12g} exceeds d = {goal:.12g}; "
                f"anchored at the nearest point in Y_{k + offset}"
            )
            logger.warning("sweep anchor shift at k=%d", k + offset)

        lam, expansions = 0.0, 0
        if abs(distance_value(space, Y_lo, z, tolerances) - goal) > slack:
            lo = -(goal + d[k - 1] * endpoint_general)
            if lo >= -1e-12 * (1.0 + goal):
                lo = -(goal + d[k - 1])
            lam, expansions = ivt_solve_expanding(space, Y_lo, z, q[k - 1], 0.0, lo, goal, tolerances)
            z = z + lam * q[k - 1]
        lambdas[k - 2] = lam
        steps.append(SweepStep(
            k=index + offset,
            lam=lam,
            upper_estimate=upper,
            endpoint_general=endpoint_general,
            endpoint_top=endpoint_top,
            lambda_bound=d[index - 1] - d[index] * (1.0 - 2.0 ** -index),
            anchor_shift=bool(correction),
            correction=correction,
            expansions=expansions,
        ))
    return z, lambdas, functionals, steps, warnings, q


def _lift(
    space: NormSpec, x: Point, Y_lo: Subspace, Y_hi: Subspace, y: Point, d_lo: float, d_hi: float,
    tolerances: Tolerances,
) -> Tuple[Point, Point]:
    """
    Move x within Y_hi so that ρ(x, Y_lo) = d_lo, leaving every distance to Y_hi and above unchanged.

    Returns:
        Tuple (lifted point, vector added to x)
    """
    nearest = distance(space, Y_hi, x, tolerances).minimizer_array
    anchored = x - nearest
    reach = (d_lo + d_hi) / distance_value(space, Y_lo, y, tolerances)
    s, _ = ivt_solve_expanding(space, Y_lo, anchored, y, 0.0, reach, d_lo, tolerances)
    return anchored + s * y, s * y - nearest


def _construct(
    space: NormSpec, spaces: List[Subspace], hats: List[Point], d: List[float],
    tolerances: Tolerances, transcript: ConstructionTranscript, offset: int = 0,
) -> Point:
    n = len(spaces)
    first_fixed = None
    if spaces[0].is_zero:
        if n == 1:
            transcript.branch = "zero_first_single"
            transcript.levels = [_fixed_level(space, 1 + offset, hats[0], [1])]
            transcript.lambdas = [d[0]]
            return d[0] * hats[0]
        if d[0] > d[1]:
            transcript.branch = "zero_first_patch"
            inner = ConstructionTranscript(targets=d[1:], tau=TauSequence.from_targets(d[1:]).tau)
            x = _construct(space, spaces[1:], hats[1:], d[1:], tolerances, inner, offset + 1)
            transcript.levels, transcript.functionals = inner.levels, inner.functionals
            transcript.sweep, transcript.warnings = inner.sweep, transcript.warnings + inner.warnings
            transcript.lambdas = [1.0] + inner.lambdas
            lifted, added = _lift(space, x, spaces[0], spaces[1], hats[0], d[0], d[1], tolerances)
            transcript.lift = _tuple(added)
            return lifted
        transcript.branch = "zero_first_tied"
        first_fixed = hats[0]

    levels = _build_levels(space, spaces, hats, d, [n], tolerances, first_fixed, offset)
    x, lambdas, functionals, steps, warnings, _ = _sweep(space, spaces, levels, d, n, tolerances, offset)
    transcript.levels = levels
    transcript.functionals = functionals
    transcript.lambdas = lambdas
    transcript.sweep = steps
    transcript.warnings += [w for lv in levels for w in lv.warnings] + warnings
    return x


def _top_space(space: NormSpec, chain: Chain, n0: Optional[int]) -> Subspace:
    if n0 is not None:
        return chain.spaces[n0 - 1]
    if chain.spaces[-1].rank >= space.dim:
        raise DegenerateInputError("a positive last target requires Y_m to be a proper subspace")
    return Subspace.full(space.dim)


def theorem_construct(
    space: NormSpec, chain: Chain, d: TargetsLike, tolerances: Optional[Tolerances] = None
) -> Tuple[Point, ConstructionTranscript]:
    """
    Element x with ρ(x, Y_k) = d_k for every subspace of the chain.

    Args:
        space: Normed space
        chain: Validated strictly nested chain Y_1 ⊂ … ⊂ Y_m
        d: Non-increasing nonnegative targets of length m
        tolerances: Solver and verification tolerances

    Returns:
        Tuple (x, transcript); transcript.passed reports the residual check

    Raises:
        ChainValidationError: If the chain fails validation
        DegenerateInputError: If the targets do not match the chain
    """
    tolerances = tolerances or DEFAULT_TOLERANCES
    targets = _as_targets(d)
    report = validate_chain(space, chain, tolerances)
    if not report.passed:
        raise ChainValidationError(report)
    if targets.length != chain.length:
        raise DegenerateInputError(f"{targets.length} targets for a chain of length {chain.length}")

    transcript = ConstructionTranscript(
        targets=targets.d,
        tau=targets.tau().tau,
        strict_tail_condition=targets.satisfies_strict_tail_condition(),
    )
    n0 = targets.first_zero_index
    if n0 == 1:
        transcript.branch = "all_zero"
        x = np.zeros(space.dim)
    else:
        n = n0 - 1 if n0 is not None else chain.length
        top = _top_space(space, chain, n0)
        spaces = chain.spaces[:n]
        truncated = chain.prefix(n)
        hats = [_unit(space, y) for y in chain_witnesses(space, truncated, top, tolerances)]
        x = _construct(space, spaces, hats, targets.d[:n], tolerances, transcript)
        if n0 is not None:
            transcript.branch = f"zero_tail/{transcript.branch}"

    transcript.x = _tuple(x)
    transcript.residuals = residual_rows(space, chain, x, targets.d, tolerances)
    transcript.warnings += transcript.estimate_warnings()
    transcript.passed = all(r.passed for r in transcript.residuals)
    if not transcript.passed:
        logger.warning("construction residual check failed: max residual %.3e", transcript.max_residual)
    return x, transcript


def finite_construct(
    space: NormSpec, chain: Chain, d: Sequence[float], z: PointLike, tolerances: Optional[Tolerances] = None
) -> FiniteConstructResult:
    """
    x = λz + correction with ρ(x, Y_k) = d_k, λ = d_n/ρ(z, Y_n) and x − λz ∈ span(Y_n).

    Args:
        space: Normed space
        chain: Chain Y_1 ⊂ … ⊂ Y_n
        d: Strictly decreasing targets d_1 > … > d_n ≥ 0
        z: Point outside span(Y_n)

    Returns:
        FiniteConstructResult
    """
    tolerances = tolerances or DEFAULT_TOLERANCES
    targets = _as_targets(d)
    if not targets.is_strict:
        raise DegenerateInputError("finite construction needs strictly decreasing targets")
    if targets.length != chain.length:
        raise DegenerateInputError(f"{targets.length} targets for a chain of length {chain.length}")
    report = validate_chain(space, chain, tolerances)
    if not report.passed:
        raise ChainValidationError(report)
    z = as_point(z, space.dim, "z")
    Y_n = chain.spaces[-1]
    rho = distance_value(space, Y_n, z, tolerances)
    if rho <= tolerances.compare * (1.0 + norm(space, z)):
        raise DegenerateInputError("z lies in span(Y_n)")

    warnings: List[str] = []
    dd = targets.d
    lam = dd[-1] / rho
    if lam == 0:
        warnings.append("d_n = 0 forces λ = 0")
    x = lam * z
    witnesses = chain_witnesses(space, chain, tolerances=tolerances)
    for k in range(chain.length - 1, 0, -1):
        x, _ = _lift(space, x, chain.spaces[k - 1], chain.spaces[k], witnesses[k - 1], dd[k - 1], dd[k], tolerances)

    residuals = residual_rows(space, chain, x, dd, tolerances)
    size = norm(space, x)
    return FiniteConstructResult(
        x=_tuple(x),
        lam=lam,
        residuals=residuals,
        norm=size,
        norm_bound_holds=size <= dd[0] + 1.0,
        span_residual=Y_n.residual(x - lam * z) if not Y_n.is_zero else float(np.linalg.norm(x - lam * z)),
        passed=all(r.passed for r in residuals),
        warnings=warnings,
    )


def cauchy_study(
    space: NormSpec, chain: Chain, d: TargetsLike, n_values: Sequence[int],
    tolerances: Optional[Tolerances] = None,
) -> CauchyStudyReport:
    """
    Build x_{n,n} for each n from one shared set of levels and tabulate ‖x_{n,n} − x_{m,m}‖.

    The per-level estimate ‖q_{j,m} − q_{j,n}‖ ≤ 4τ_m/(2^j d_j) and the tail estimate
    Σ_{k=m}^n |λ_{k,n}|·‖q_{k,n}‖ ≤ d_{m−1} are evaluated and reported.

    Args:
        space: Normed space
        chain: Chain with at least max(n_values) subspaces
        d: Positive non-increasing targets covering max(n_values)
        n_values: Values of n to construct

    Returns:
        CauchyStudyReport; passed iff every x_{n,n} meets its targets
    """
    tolerances = tolerances or DEFAULT_TOLERANCES
    targets = _as_targets(d)
    n_values = sorted({int(n) for n in n_values})
    if not n_values or n_values[0] < 1:
        raise DegenerateInputError("n values must be positive")
    top_n = n_values[-1]
    if top_n > chain.length or top_n > targets.length:
        raise DegenerateInputError(f"chain and targets must cover n = {top_n}")
    dd = targets.d[:top_n]
    if dd[-1] <= 0:
        raise DegenerateInputError("the Cauchy study needs positive targets")
    report = validate_chain(space, chain, tolerances)
    if not report.passed:
        raise ChainValidationError(report)

    spaces = chain.spaces[:top_n]
    top = chain.spaces[top_n] if chain.length > top_n else _top_space(space, chain.prefix(top_n), None)
    hats = [_unit(space, y) for y in chain_witnesses(space, chain.prefix(top_n), top, tolerances)]
    first_fixed = None
    if spaces[0].is_zero:
        if top_n > 1 and dd[0] > dd[1]:
            raise DegenerateInputError("a zero first subspace with d_1 > d_2 has no shared q-ladder")
        first_fixed = hats[0]

    tau = TauSequence.from_targets(dd)
    levels = _build_levels(space, spaces, hats, dd, n_values, tolerances, first_fixed, 0)
    study = CauchyStudyReport(n_values=n_values)
    study.warnings += [w for lv in levels for w in lv.warnings]

    xs: Dict[int, Point] = {}
    qs: Dict[int, Dict[int, Point]] = {}
    for n in n_values:
        if n == 1:
            q1 = levels[0].entry(1).q_array
            x, lambdas, warnings, q = dd[0] * q1, [dd[0]], [], {1: q1}
        else:
            x, lambdas, _, _, warnings, q = _sweep(space, spaces[:n], levels, dd[:n], n, tolerances, 0)
        xs[n], qs[n] = x, q
        study.warnings += warnings
        prefix = chain.prefix(n)
        study.max_residuals[n] = max(r.residual for r in residual_rows(space, prefix, x, dd[:n], tolerances))
        for m in range(2, n + 1):
            tail = sum(abs(lambdas[k - 1]) * norm(space, q[k]) for k in range(m, n + 1))
            bound = dd[m - 2]
            study.tail_bounds.append(BoundRow(j=0, m=m, n=n, value=tail, bound=bound, holds=tail <= bound + 1e-6))

    for i, n in enumerate(n_values):
        for m in n_values[: i + 1]:
            study.gaps.append(GapRow(m=m, n=n, gap=norm(space, xs[n] - xs[m]) if m != n else 0.0))
            if m == n:
                continue
            for j in range(1, m + 1):
                diff = norm(space, qs[m][j] - qs[n][j])
                bound = 4.0 * tau.tau[m - 1] / (2.0 ** j * dd[j - 1])
                study.level_bounds.append(
                    BoundRow(j=j, m=m, n=n, value=diff, bound=bound, holds=diff <= bound + 1e-6)
                )

    study.warnings += [
        line for line in (
            estimate_warning("per-level bounds", [b.holds for b in study.level_bounds]),
            estimate_warning("tail bounds", [b.holds for b in study.tail_bounds]),
        ) if line
    ]

    limit = tolerances.verify_for(dd[0])
    study.passed = all(r <= limit for r in study.max_residuals.values())
    return study


def james_demo(
    space: NormSpec, f: Union[Functional, PointLike], d_tail: Sequence[float] = (),
    tolerances: Optional[Tolerances] = None,
) -> JamesReport:
    """
    Construct x with ‖x‖ = 1 = ρ(x, ker f) and check that f attains its norm at x.

    The chain is {0} ⊂ ker f with targets (1, 1). A kernel hyperplane admits no strictly larger
    proper subspace, so any further targets in d_tail are reported as dropped.
    """
    tolerances = tolerances or DEFAULT_TOLERANCES
    coeffs = f.array if isinstance(f, Functional) else as_point(f, space.dim, "functional")
    if coeffs.shape[0] != space.dim:
        raise DegenerateInputError(f"functional has dimension {coeffs.shape[0]}, expected {space.dim}")
    if not np.any(coeffs):
        raise DegenerateInputError("zero functional")
    tail = [float(v) for v in d_tail]
    if any(v > 1.0 for v in tail) or any(b > a for a, b in zip(tail, tail[1:])):
        raise DegenerateInputError("d_tail must be non-increasing and at most 1")

    kernel = null_space((coeffs / np.linalg.norm(coeffs))[None, :])
    chain = Chain(dim=space.dim, spaces=[Subspace.zero(space.dim), Subspace.from_matrix(kernel)])
    x, transcript = theorem_construct(space, chain, [1.0, 1.0], tolerances)

    f_norm = dual_norm_of(space, coeffs)
    flipped = False
    if float(coeffs @ x) < 0:
        x = -x
        flipped = True
    norm_x = norm(space, x)
    ratio = float(coeffs @ x) / f_norm
    kernel_distance = distance_value(space, chain.spaces[1], x, tolerances)
    tol = tolerances.verify_for(1.0)
    return JamesReport(
        x=_tuple(x),
        norm_x=norm_x,
        pairing_ratio=ratio,
        kernel_distance=kernel_distance,
        used_targets=[1.0, 1.0],
        dropped_targets=tail,
        flipped=flipped,
        passed=abs(norm_x - 1.0) <= tol and abs(ratio - 1.0) <= tol,
        transcript=transcript,
    )
