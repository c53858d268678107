"""
Distance-to-subspace solvers using the Abstract Factory pattern, plus the one-dimensional
searches (argmin right endpoint, intermediate-value root finding) built on top of them.
"""

import logging
import math
from abc import ABC, abstractmethod
from typing import Dict, List, Optional, Tuple, Type

import numpy as np
import numpy.typing as npt
from scipy.optimize import linprog, minimize

from .config import Tolerances
from .errors import BracketError, DegenerateInputError, DimensionMismatchError, SolverError
from .normed_space import duality_map_scaled, functional_from_scaled, norm
from .space_models import DistanceSolution, LineSearchResult, NormSpec, Point, PointLike, Subspace, as_point

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCES = Tolerances()

INV_PHI = (math.sqrt(5) - 1) / 2  # 1 / phi
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2  # 1 / phi^2
SLOPE_STEP = 1e-7


def _lp_norm(v: Point, p: float) -> float:
    return float(np.linalg.norm(v, ord=p)) if v.size else 0.0


def _scaled_frame(space: NormSpec, Y: Subspace) -> npt.NDArray[np.float64]:
    """Orthonormal basis (Euclidean) of the scaled subspace s∘Y."""
    if Y.dim != space.dim:
        raise DimensionMismatchError(space.dim, Y.dim, "subspace")
    if Y.is_zero:
        return np.zeros((space.dim, 0))
    q, _ = np.linalg.qr(space.scale[:, None] * Y.basis)
    return q[:, : Y.rank]


def _finalize_certificate(space: NormSpec, frame: npt.NDArray[np.float64], g: Point, xs: Point) -> Point:
    """
    Project a scaled dual vector onto the annihilator of the frame and renormalize to dual norm 1.
    """
    if frame.shape[1]:
        g = g - frame @ (frame.T @ g)
    size = _lp_norm(g, space.dual_exponent)
    if size == 0:
        return g
    g = g / size
    if float(g @ xs) < 0:
        g = -g
    return g


def _null_certificate(space: NormSpec, frame: npt.NDArray[np.float64]) -> Point:
    """A dual-norm-one annihilator of the frame, or zero when the frame spans everything."""
    k = frame.shape[1]
    if k >= space.dim:
        return np.zeros(space.dim)
    if k == 0:
        g = np.zeros(space.dim)
        g[0] = 1.0
        return g
    full, _ = np.linalg.qr(np.hstack([frame, np.eye(space.dim)]))
    u = full[:, k]
    u = u - frame @ (frame.T @ u)
    return u / _lp_norm(u, space.dual_exponent)


class DistanceSolver(ABC):
    """Abstract base class for distance-to-subspace solvers on scaled coordinates."""

    name: str = "abstract"

    @abstractmethod
    def minimize(
        self, p: float, frame: npt.NDArray[np.float64], xs: Point, tol: float, tolerances: Tolerances
    ) -> Tuple[Point, Point]:
        """
        Solve min_c ‖xs − frame·c‖_p for xs of unit max-magnitude.

        Returns:
            Tuple of (coefficients c, scaled dual vector g before finalization)
        """

    def value(self, p: float, frame: npt.NDArray[np.float64], xs: Point, tol: float, tolerances: Tolerances) -> float:
        """Optimal value only; solvers may skip the certificate here."""
        c, _ = self.minimize(p, frame, xs, tol, tolerances)
        return _lp_norm(xs - frame @ c, p)


class ProjectionSolver(DistanceSolver):
    """Closed-form orthogonal projection for the (weighted) Euclidean norm."""

    name = "projection"

    def minimize(self, p, frame, xs, tol, tolerances):
        c = frame.T @ xs
        r = xs - frame @ c
        return c, r

    def value(self, p, frame, xs, tol, tolerances):
        return float(np.linalg.norm(xs - frame @ (frame.T @ xs)))


class LinearProgramSolver(DistanceSolver):
    """Primal and dual linear programs for p in {1, inf}, solved by the HiGHS dual simplex."""

    name = "linear_program"
    method = "highs-ds"

    def _options(self, tol: float) -> Dict[str, float]:
        feasibility = max(min(tol, 1e-7), 1e-10)
        return {"primal_feasibility_tolerance": feasibility, "dual_feasibility_tolerance": feasibility}

    def _primal(self, p, frame, xs, tol):
        n, k = frame.shape
        if math.isinf(p):
            objective = np.concatenate([np.zeros(k), [1.0]])
            ones = np.ones((n, 1))
            a_ub = np.vstack([np.hstack([frame, -ones]), np.hstack([-frame, -ones])])
            bounds = [(None, None)] * k + [(0, None)]
        else:
            objective = np.concatenate([np.zeros(k), np.ones(n)])
            eye = np.eye(n)
            a_ub = np.vstack([np.hstack([frame, -eye]), np.hstack([-frame, -eye])])
            bounds = [(None, None)] * k + [(0, None)] * n
        b_ub = np.concatenate([xs, -xs])
        res = linprog(objective, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method=self.method, options=self._options(tol))
        if res.status != 0:
            raise SolverError(f"primal distance LP failed: {res.message}")
        return res.x[:k]

    def _dual(self, p, frame, xs, tol):
        n, k = frame.shape
        if math.isinf(p):
            # max ⟨g, xs⟩ over ‖g‖_1 ≤ 1, frameᵀg = 0, with g = u − v
            objective = np.concatenate([-xs, xs])
            a_eq = np.hstack([frame.T, -frame.T])
            a_ub = np.ones((1, 2 * n))
            res = linprog(
                objective, A_ub=a_ub, b_ub=[1.0], A_eq=a_eq, b_eq=np.zeros(k),
                bounds=(0, None), method=self.method, options=self._options(tol),
            )
            if res.status != 0:
                raise SolverError(f"dual distance LP failed: {res.message}")
            return res.x[:n] - res.x[n:]
        res = linprog(
            -xs, A_eq=frame.T, b_eq=np.zeros(k), bounds=(-1.0, 1.0),
            method=self.method, options=self._options(tol),
        )
        if res.status != 0:
            raise SolverError(f"dual distance LP failed: {res.message}")
        return res.x

    def minimize(self, p, frame, xs, tol, tolerances):
        return self._primal(p, frame, xs, tol), self._dual(p, frame, xs, tol)

    def value(self, p, frame, xs, tol, tolerances):
        c = self._primal(p, frame, xs, tol)
        return _lp_norm(xs - frame @ c, p)


class NewtonSolver(DistanceSolver):
    """
    Damped Newton on Σ|r_i|^p / p for 1 < p < inf, with a quasi-Newton fallback near kinks.
    """

    name = "newton"

    def minimize(self, p, frame, xs, tol, tolerances):
        k = frame.shape[1]
        c = frame.T @ xs
        eta2 = 1e-18
        eye = np.eye(k)

        def objective(coef):
            return float(np.sum(np.abs(xs - frame @ coef) ** p) / p)

        def gradient(coef):
            r = xs - frame @ coef
            return -(frame.T @ (np.sign(r) * np.abs(r) ** (p - 1.0)))

        def normalized_gradient(coef) -> float:
            r = xs - frame @ coef
            size = _lp_norm(r, p)
            # xs has unit max-magnitude, so a residual this small is rounding noise.
            if size <= 1e-13:
                return 0.0
            return float(np.linalg.norm(frame.T @ duality_map_scaled(p, r)))

        converged = False
        for _ in range(tolerances.max_iterations):
            if normalized_gradient(c) <= tol:
                converged = True
                break
            r = xs - frame @ c
            grad = gradient(c)
            weights = (p - 1.0) * (r * r + eta2) ** ((p - 2.0) / 2.0)
            hessian = frame.T @ (weights[:, None] * frame)
            hessian += 1e-14 * (np.trace(hessian) + 1.0) * eye
            step = np.linalg.solve(hessian, -grad)
            f0 = objective(c)
            slope = float(grad @ step)
            t = 1.0
            while t > 1e-12 and objective(c + t * step) > f0 + 1e-4 * t * slope:
                t *= 0.5
            if t <= 1e-12 or np.linalg.norm(t * step) <= 1e-16:
                break
            c = c + t * step

        if not converged and normalized_gradient(c) > tol:
            logger.info("Newton stalled at gradient %.3e; switching to BFGS", normalized_gradient(c))
            res = minimize(objective, c, jac=gradient, method="BFGS", options={"gtol": tol * 1e-2, "maxiter": 2000})
            c = res.x
            achieved = normalized_gradient(c)
            if achieved > 1e3 * tol:
                raise SolverError("distance solver did not converge", achieved_gap=achieved)

        r = xs - frame @ c
        g = duality_map_scaled(p, r) if np.any(r) else np.zeros_like(r)
        return c, g


class DistanceSolverFactory:
    """Abstract Factory for per-norm distance solvers."""

    _solvers: Dict[str, Type[DistanceSolver]] = {
        "projection": ProjectionSolver,
        "linear_program": LinearProgramSolver,
        "newton": NewtonSolver,
    }

    @classmethod
    def register_solver(cls, name: str, solver_class: Type[DistanceSolver]) -> None:
        """Register a new solver type."""
        cls._solvers[name] = solver_class

    @classmethod
    def create_solver(cls, solver_type: str) -> DistanceSolver:
        """
        Create a solver instance.

        Args:
            solver_type: Registered solver name

        Returns:
            DistanceSolver instance

        Raises:
            ValueError: If the solver type is not registered
        """
        if solver_type not in cls._solvers:
            raise ValueError(f"Unsupported solver type: {solver_type}")
        return cls._solvers[solver_type]()

    @classmethod
    def solver_type_for(cls, space: NormSpec) -> str:
        if space.is_euclidean:
            return "projection"
        if space.is_polyhedral:
            return "linear_program"
        return "newton"

    @classmethod
    def for_space(cls, space: NormSpec) -> DistanceSolver:
        return cls.create_solver(cls.solver_type_for(space))

    @classmethod
    def get_supported_solvers(cls) -> List[str]:
        return list(cls._solvers.keys())


def distance(
    space: NormSpec, Y: Subspace, x: PointLike, tolerances: Optional[Tolerances] = None
) -> DistanceSolution:
    """
    Distance from x to span(Y) with a nearest point and a dual certificate.

    Args:
        space: Normed space
        Y: Subspace (may be the zero subspace)
        x: Point
        tolerances: Solver tolerances

    Returns:
        DistanceSolution whose certificate vanishes on Y, has dual norm 1 and f(x) ≈ value
    """
    tolerances = tolerances or DEFAULT_TOLERANCES
    x = as_point(x, space.dim)
    frame = _scaled_frame(space, Y)
    xs = space.scale * x
    sigma = float(np.max(np.abs(xs))) if xs.size else 0.0
    solver = DistanceSolverFactory.for_space(space)
    tol = tolerances.solve_for(space.p)

    if sigma == 0:
        g = _null_certificate(space, frame)
        return DistanceSolution(
            value=0.0, minimizer=tuple(0.0 for _ in x), certificate=functional_from_scaled(space, g),
            gap=0.0, method=solver.name,
        )

    unit = xs / sigma
    if frame.shape[1] == 0:
        coeffs = np.zeros(0)
        g = duality_map_scaled(space.p, unit)
    elif frame.shape[1] >= space.dim:
        coeffs = frame.T @ unit
        g = np.zeros(space.dim)
    else:
        coeffs, g = solver.minimize(space.p, frame, unit, tol, tolerances)

    residual = unit - frame @ coeffs
    value = _lp_norm(residual, space.p) * sigma
    if value <= tol * sigma:
        g = _null_certificate(space, frame)
    else:
        g = _finalize_certificate(space, frame, g, unit)
    certificate = functional_from_scaled(space, g)
    minimizer = (frame @ coeffs) * sigma / space.scale
    gap = value - certificate(x)
    if gap > 1e3 * tol * (1.0 + value):
        logger.warning("distance certificate gap %.3e exceeds solver tolerance", gap)
    return DistanceSolution(
        value=value, minimizer=tuple(float(v) for v in minimizer), certificate=certificate,
        gap=float(gap), method=solver.name,
    )


def distance_value(space: NormSpec, Y: Subspace, x: PointLike, tolerances: Optional[Tolerances] = None) -> float:
    """ρ(x, Y) without building a certificate."""
    tolerances = tolerances or DEFAULT_TOLERANCES
    x = as_point(x, space.dim)
    if Y.is_zero:
        return norm(space, x)
    frame = _scaled_frame(space, Y)
    xs = space.scale * x
    sigma = float(np.max(np.abs(xs)))
    if sigma == 0 or frame.shape[1] >= space.dim:
        return 0.0
    solver = DistanceSolverFactory.for_space(space)
    return solver.value(space.p, frame, xs / sigma, tolerances.solve_for(space.p), tolerances) * sigma


def distance_along_line(
    space: NormSpec, Q: Subspace, base: PointLike, direction: PointLike, a: float,
    tolerances: Optional[Tolerances] = None,
) -> float:
    """
    ρ(base − a·dir, Q); convex in a.
    """
    base = as_point(base, space.dim, "base")
    direction = as_point(direction, space.dim, "direction")
    return distance_value(space, Q, base - a * direction, tolerances)


def _require_outside(space: NormSpec, Q: Subspace, direction: Point, tolerances: Tolerances) -> float:
    rho = distance_value(space, Q, direction, tolerances)
    if rho <= tolerances.compare * (1.0 + norm(space, direction)):
        raise DegenerateInputError("direction lies in span(Q)")
    return rho


def golden_section(fun, a: float, b: float, tol: float) -> Tuple[float, float]:
    """
    Golden-section search.

    Given a function with a single local minimum in [a, b], return a
    subinterval [c, d] containing the minimum with d - c <= tol.
    """
    a, b = min(a, b), max(a, b)
    h = b - a
    if h <= tol:
        return a, b
    n = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))
    c = a + INV_PHI_SQUARE * h
    d = a + INV_PHI * h
    yc = fun(c)
    yd = fun(d)
    for _ in range(n - 1):
        if yc < yd:
            b = d
            d = c
            yd = yc
            h = INV_PHI * h
            c = a + INV_PHI_SQUARE * h
            yc = fun(c)
        else:
            a = c
            c = d
            yc = yd
            h = INV_PHI * h
            d = a + INV_PHI * h
            yd = fun(d)
    if yc < yd:
        return a, d
    return c, b


def _bisect_predicate(pred, good: float, bad: float, tol: float) -> float:
    """Boundary between pred(good) = True and pred(bad) = False, returned on the good side."""
    while abs(bad - good) > tol:
        mid = 0.5 * (good + bad)
        if pred(mid):
            good = mid
        else:
            bad = mid
    return good


def argmin_line_right(
    space: NormSpec, Q: Subspace, base: PointLike, direction: PointLike,
    tolerances: Optional[Tolerances] = None, lower: float = 0.0,
) -> LineSearchResult:
    """
    Right endpoint δ of the argmin interval of a ⟼ ρ(base − a·dir, Q) over a ≥ lower.

    The minimum is bracketed by doubling and located by golden-section search. For
    1 < p < inf the profile is strictly convex and δ is the last point where the forward
    difference with step SLOPE_STEP is not positive. For p in {1, inf} the profile may be
    flat on an interval, whose ends are found by bisection on the level set {g ≤ min + ε}.

    Args:
        space: Normed space
        Q: Subspace
        base: Base point
        direction: Direction, not in span(Q)
        tolerances: Solver tolerances
        lower: Left end of the search half-line

    Returns:
        LineSearchResult with ρ(base − δ·dir, Q) ≤ ρ(base − a·dir, Q) for all a ≥ δ
    """
    tolerances = tolerances or DEFAULT_TOLERANCES
    base = as_point(base, space.dim, "base")
    direction = as_point(direction, space.dim, "direction")
    slope = _require_outside(space, Q, direction, tolerances)

    cache: Dict[float, float] = {}

    def g(a: float) -> float:
        if a not in cache:
            cache[a] = distance_value(space, Q, base - a * direction, tolerances)
        return cache[a]

    h = max(1.0, distance_value(space, Q, base, tolerances) / slope)
    for _ in range(tolerances.bracket_expansions):
        if g(lower + 2 * h) >= g(lower + h):
            break
        h *= 2.0
    else:
        raise SolverError("argmin bracket expansion did not terminate")
    hi = lower + 2 * h

    c, d = golden_section(g, lower, hi, tol=max(tolerances.root, 1e-9 * hi))
    best = min([lower, c, d, 0.5 * (c + d)], key=g)
    g_min = g(best)
    width = tolerances.root * (1.0 + abs(best))

    if space.is_polyhedral:
        eps = 10.0 * tolerances.solve_for(space.p) * (1.0 + g_min)

        def flat(a: float) -> bool:
            return g(a) <= g_min + eps

        right = hi
        for _ in range(tolerances.bracket_expansions):
            if not flat(right):
                break
            right = best + 2.0 * (right - best) + 1.0
        else:
            raise SolverError("argmin level set is unbounded")
        delta = _bisect_predicate(flat, best, right, width)
        left = lower if flat(lower) else _bisect_predicate(flat, best, lower, width)
        return LineSearchResult(delta=delta, min_value=min(g(delta), g_min), argmin_interval=(left, delta))

    def descending(a: float) -> bool:
        return g(a + SLOPE_STEP) - g(a) <= 0.0

    if not descending(lower):
        delta = lower
    else:
        right = max(hi, best + SLOPE_STEP)
        for _ in range(tolerances.bracket_expansions):
            if not descending(right):
                break
            right = lower + 2.0 * (right - lower) + 1.0
        else:
            raise SolverError("argmin slope stays non-positive")
        delta = _bisect_predicate(descending, lower, right, width)
    return LineSearchResult(delta=delta, min_value=min(g(delta), g_min), argmin_interval=(delta, delta))


def ivt_solve(
    space: NormSpec, Q: Subspace, base: PointLike, direction: PointLike,
    bracket: Tuple[float, float], target: float, tolerances: Optional[Tolerances] = None,
) -> float:
    """
    Root a* of g(a) = ρ(base + a·dir, Q) − target by signed bisection.

    Args:
        space: Normed space
        Q: Subspace
        base: Base point
        direction: Direction
        bracket: (a_lo, a_hi) whose values straddle the target
        target: Level to hit

    Returns:
        a* within the bracket

    Raises:
        BracketError: If g(a_lo) and g(a_hi) do not straddle the target
    """
    tolerances = tolerances or DEFAULT_TOLERANCES
    base = as_point(base, space.dim, "base")
    direction = as_point(direction, space.dim, "direction")

    def g(a: float) -> float:
        return distance_value(space, Q, base + a * direction, tolerances) - target

    lo, hi = bracket
    g_lo, g_hi = g(lo), g(hi)
    exact = 1e-13 * (1.0 + abs(target))
    if abs(g_lo) <= exact:
        return lo
    if abs(g_hi) <= exact:
        return hi
    if (g_lo > 0) == (g_hi > 0):
        raise BracketError(lo, hi, g_lo + target, g_hi + target, target)

    sign_lo = g_lo > 0
    best_a, best_g = (lo, g_lo) if abs(g_lo) < abs(g_hi) else (hi, g_hi)
    width = tolerances.root
    iterations = int(math.ceil(math.log2(max(abs(hi - lo), width) / width))) + 2
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        g_mid = g(mid)
        if abs(g_mid) < abs(best_g):
            best_a, best_g = mid, g_mid
        if abs(g_mid) <= exact:
            return mid
        if (g_mid > 0) == sign_lo:
            lo = mid
        else:
            hi = mid
        if abs(hi - lo) <= width:
            break
    return best_a


def ivt_solve_expanding(
    space: NormSpec, Q: Subspace, base: PointLike, direction: PointLike,
    anchor: float, far: float, target: float, tolerances: Optional[Tolerances] = None,
) -> Tuple[float, int]:
    """
    ivt_solve after widening the far endpoint geometrically away from the anchor until the bracket straddles.

    Returns:
        Tuple of (root, number of expansions performed)
    """
    tolerances = tolerances or DEFAULT_TOLERANCES
    base = as_point(base, space.dim, "base")
    direction = as_point(direction, space.dim, "direction")
    g_anchor = distance_value(space, Q, base + anchor * direction, tolerances) - target
    span = far - anchor
    if span == 0:
        span = 1.0
    expansions = 0
    while True:
        g_far = distance_value(space, Q, base + (anchor + span) * direction, tolerances) - target
        if g_anchor == 0 or g_far == 0 or (g_anchor > 0) != (g_far > 0):
            break
        if expansions >= tolerances.bracket_expansions:
            raise BracketError(
                min(anchor, anchor + span), max(anchor, anchor + span),
                g_anchor + target, g_far + target, target,
            )
        span *= 2.0
        expansions += 1
    if expansions:
        logger.warning("bracket widened %d times to reach target %.6g", expansions, target)
    bracket = (anchor, anchor + span) if span > 0 else (anchor + span, anchor)
    return ivt_solve(space, Q, base, direction, bracket, target, tolerances), expansions


def last_level_crossing(
    space: NormSpec, Q: Subspace, base: PointLike, direction: PointLike,
    level: float, lower: float, upper: float, tolerances: Optional[Tolerances] = None,
) -> Tuple[float, LineSearchResult]:
    """
    Largest a in [lower, upper] with ρ(base − a·dir, Q) = level, assuming the profile is at most
    the level at `lower` and at least the level at `upper`.

    Returns:
        Tuple of (crossing, argmin search over a ≥ lower)
    """
    tolerances = tolerances or DEFAULT_TOLERANCES
    base = as_point(base, space.dim, "base")
    direction = as_point(direction, space.dim, "direction")
    search = argmin_line_right(space, Q, base, direction, tolerances, lower=lower)
    eps = 10.0 * tolerances.solve_for(space.p) * (1.0 + level)
    if search.min_value >= level - eps:
        return min(search.delta, max(upper, lower)), search
    crossing, _ = ivt_solve_expanding(
        space, Q, base, -direction, search.delta, max(upper, search.delta + 1.0), level, tolerances
    )
    return crossing, search
