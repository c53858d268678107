"""
Norms, dual norms and norming functionals of weighted p-norm spaces.
Everything is computed on scaled coordinates x̃ = s∘x, where the weighted norm is the plain p-norm.
"""

from typing import Sequence

import numpy as np
import numpy.typing as npt

from .errors import DegenerateInputError, DimensionMismatchError
from .space_models import Functional, NormSpec, Point, PointLike, as_point


def _lp(v: Point, p: float) -> float:
    if v.size == 0:
        return 0.0
    return float(np.linalg.norm(v, ord=p))


def to_scaled(space: NormSpec, x: PointLike) -> Point:
    """Scaled coordinates s∘x."""
    return space.scale * as_point(x, space.dim)


def functional_from_scaled(space: NormSpec, g: PointLike) -> Functional:
    """
    Build a functional from its action g on scaled coordinates (f = s∘g).

    Args:
        space: Owning space
        g: Coefficients acting on s∘x

    Returns:
        Functional with cached dual norm ‖g‖_{p′}
    """
    g = as_point(g, space.dim, "functional")
    coeffs = space.scale * g
    return Functional(coeffs=tuple(float(c) for c in coeffs), dual_norm=_lp(g, space.dual_exponent))


def make_functional(space: NormSpec, coeffs: PointLike) -> Functional:
    """Wrap raw pairing coefficients as a Functional of the given space."""
    coeffs = as_point(coeffs, space.dim, "functional")
    return Functional(coeffs=tuple(float(c) for c in coeffs), dual_norm=dual_norm_of(space, coeffs))


def norm(space: NormSpec, x: PointLike) -> float:
    """
    Norm of x in the space.

    Args:
        space: Normed space specification
        x: Point of matching dimension

    Returns:
        ‖x‖ (zero iff x = 0)
    """
    return _lp(to_scaled(space, x), space.p)


def norm_rows(space: NormSpec, rows: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    """Vectorized norm of every row of a (N × dim) array."""
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    if rows.shape[1] != space.dim:
        raise DimensionMismatchError(space.dim, rows.shape[1], "row")
    scaled = np.abs(rows * space.scale)
    if space.is_max_norm:
        return scaled.max(axis=1)
    if space.p == 1:
        return scaled.sum(axis=1)
    return (scaled ** space.p).sum(axis=1) ** (1.0 / space.p)


def dual_norm_of(space: NormSpec, coeffs: PointLike) -> float:
    """Dual norm of raw pairing coefficients: ‖f/s‖_{p′}."""
    coeffs = as_point(coeffs, space.dim, "functional")
    return _lp(coeffs / space.scale, space.dual_exponent)


def dual_norm(space: NormSpec, f: Functional) -> float:
    """
    Dual norm sup{f(x) : ‖x‖ ≤ 1}, in closed form via Hölder conjugacy.

    Args:
        space: Normed space specification
        f: Functional of matching dimension

    Returns:
        ‖f‖
    """
    if len(f.coeffs) != space.dim:
        raise DimensionMismatchError(space.dim, len(f.coeffs), "functional")
    return dual_norm_of(space, f.coeffs)


def duality_map_scaled(p: float, v: Point) -> Point:
    """
    Norming vector of v ≠ 0 in plain ℓ_p: g with ‖g‖_{p′} = 1 and ⟨g, v⟩ = ‖v‖_p.

    For p = 1 the full sign vector is used, for p = inf the lowest-index maximal coordinate.
    """
    if p == 1:
        return np.sign(v)
    if np.isinf(p):
        i = int(np.argmax(np.abs(v)))
        g = np.zeros_like(v)
        g[i] = np.sign(v[i])
        return g
    n = _lp(v, p)
    if p == 2:
        return v / n
    return np.sign(v) * (np.abs(v) / n) ** (p - 1.0)


def norming_functional(space: NormSpec, x: PointLike) -> Functional:
    """
    Functional f with f(x) = ‖x‖ and ‖f‖ = 1.

    Args:
        space: Normed space specification
        x: Non-zero point

    Returns:
        Norming functional (unique for 1 < p < inf)

    Raises:
        DegenerateInputError: If x = 0
    """
    scaled = to_scaled(space, x)
    if not np.any(scaled):
        raise DegenerateInputError("norming functional of the zero vector is undefined")
    return functional_from_scaled(space, duality_map_scaled(space.p, scaled))


def random_functionals(space: NormSpec, count: int, rng: np.random.Generator) -> Sequence[Functional]:
    """Draw Gaussian functionals (used by audits and demos)."""
    return [make_functional(space, rng.standard_normal(space.dim)) for _ in range(count)]
