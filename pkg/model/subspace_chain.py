"""
Subspace chains: validation of strict nesting, witness elements and seeded random chains.
"""

import logging
from typing import List, Optional, Sequence

import numpy as np

from .config import Tolerances
from .distance_engine import DEFAULT_TOLERANCES, distance, distance_value
from .errors import DegenerateInputError, DimensionMismatchError
from .normed_space import norm
from .space_models import Chain, ChainValidationReport, LinkStatus, NormSpec, Point, PointLike, Subspace, as_point

logger = logging.getLogger(__name__)

NESTING_TOLERANCE = 1e-10


def _containment_residual(Y_lo: Subspace, Y_hi: Subspace) -> float:
    if Y_lo.is_zero:
        return 0.0
    residuals = [
        Y_hi.residual(column) / max(1.0, float(np.linalg.norm(column)))
        for column in Y_lo.basis.T
    ]
    return float(max(residuals))


def validate_chain(
    space: NormSpec, chain: Chain, tolerances: Optional[Tolerances] = None
) -> ChainValidationReport:
    """
    Check strict nesting Y_1 ⊂ Y_2 ⊂ … and, when present, the witness property of each y_j.

    Args:
        space: Normed space
        chain: Chain to validate
        tolerances: Verification tolerances for the witness check

    Returns:
        ChainValidationReport; never raises for a failing chain
    """
    tolerances = tolerances or DEFAULT_TOLERANCES
    report = ChainValidationReport()

    if chain.dim != space.dim:
        report.failures.append(f"chain dimension {chain.dim} does not match space dimension {space.dim}")
    if not chain.spaces:
        report.failures.append("chain is empty")

    for j in range(1, chain.length):
        lo, hi = chain.spaces[j - 1], chain.spaces[j]
        residual = _containment_residual(lo, hi)
        status = LinkStatus(
            index=j,
            dim_lo=lo.rank,
            dim_hi=hi.rank,
            strict_dims=lo.rank < hi.rank,
            contained=residual <= NESTING_TOLERANCE,
            max_residual=residual,
        )
        report.links.append(status)
        if not status.strict_dims:
            report.failures.append(f"link {j}: dimensions non-increasing ({lo.rank} -> {hi.rank})")
        if not status.contained:
            report.failures.append(f"link {j}: Y_{j} not contained in Y_{j + 1} (residual {residual:.3e})")

    if chain.witnesses is not None and not report.failures:
        if len(chain.witnesses) != max(chain.length - 1, 0):
            report.witness_failures.append(
                f"expected {chain.length - 1} witnesses, got {len(chain.witnesses)}"
            )
        for j, y in enumerate(chain.witnesses, start=1):
            if j >= chain.length:
                break
            problem = _witness_problem(space, chain.spaces[j - 1], chain.spaces[j], y, tolerances)
            if problem:
                report.witness_failures.append(f"witness {j}: {problem}")

    report.passed = not report.failures and not report.witness_failures
    if not report.passed:
        logger.info("Chain validation failed: %s", report.failures + report.witness_failures)
    return report


def _witness_problem(
    space: NormSpec, Y_lo: Subspace, Y_hi: Subspace, y: PointLike, tolerances: Tolerances
) -> Optional[str]:
    y = as_point(y, space.dim, "witness")
    if not Y_hi.contains(y, NESTING_TOLERANCE):
        return "not in Y_{j+1}"
    size = norm(space, y)
    if size == 0 or Y_lo.contains(y, NESTING_TOLERANCE):
        return "lies in Y_j"
    rho = distance_value(space, Y_lo, y, tolerances)
    if abs(rho - size) > tolerances.verify_for(size):
        return f"ρ(y, Y_j) = {rho:.9g} differs from ‖y‖ = {size:.9g}"
    return None


def witness(
    space: NormSpec, Y_lo: Subspace, Y_hi: Subspace,
    completion: Optional[PointLike] = None, tolerances: Optional[Tolerances] = None,
) -> Point:
    """
    Element y ∈ Y_hi \\ Y_lo with ρ(y, Y_lo) = ‖y‖, built as y = x − v with v a nearest point of x in Y_lo.

    Args:
        space: Normed space
        Y_lo: Smaller subspace
        Y_hi: Larger subspace containing Y_lo
        completion: Vector x of Y_hi outside Y_lo; defaults to the basis column of Y_hi
            farthest (Euclidean) from Y_lo
        tolerances: Solver tolerances

    Returns:
        Witness y

    Raises:
        DegenerateInputError: If Y_lo is not strictly inside Y_hi
    """
    if Y_lo.dim != space.dim or Y_hi.dim != space.dim:
        raise DimensionMismatchError(space.dim, Y_lo.dim if Y_lo.dim != space.dim else Y_hi.dim, "subspace")
    if Y_lo.rank >= Y_hi.rank or _containment_residual(Y_lo, Y_hi) > NESTING_TOLERANCE:
        raise DegenerateInputError("degenerate inclusion: Y_lo is not strictly inside Y_hi")

    if completion is None:
        columns = Y_hi.basis.T
        residuals = [Y_lo.residual(c) / float(np.linalg.norm(c)) for c in columns]
        x = columns[int(np.argmax(residuals))].copy()
    else:
        x = as_point(completion, space.dim, "completion")
        if not Y_hi.contains(x, NESTING_TOLERANCE) or Y_lo.contains(x, NESTING_TOLERANCE):
            raise DegenerateInputError("completion must lie in Y_hi and outside Y_lo")

    v = distance(space, Y_lo, x, tolerances).minimizer_array
    y = x - v
    # Stay exactly in Y_hi despite rounding in the minimizer.
    return Y_hi.project_euclidean(y)


def chain_witnesses(
    space: NormSpec, chain: Chain, top: Optional[Subspace] = None, tolerances: Optional[Tolerances] = None
) -> List[Point]:
    """
    Witnesses y_1, …, y_{m−1} for the links of the chain (provided ones are reused),
    followed by y_m for Y_m ⊂ top when a top space is given.
    """
    result: List[Point] = []
    for j in range(1, chain.length):
        if chain.witnesses is not None and j <= len(chain.witnesses):
            result.append(as_point(chain.witnesses[j - 1], space.dim, "witness"))
        else:
            result.append(witness(space, chain.spaces[j - 1], chain.spaces[j], tolerances=tolerances))
    if top is not None and chain.spaces:
        result.append(witness(space, chain.spaces[-1], top, tolerances=tolerances))
    return result


def random_chain(dim: int, subspace_dims: Sequence[int], seed: int) -> Chain:
    """
    Seeded nested chain: orthonormalize a Gaussian matrix and take leading-column prefixes.

    Args:
        dim: Ambient dimension
        subspace_dims: Strictly increasing subspace dimensions, all below dim
        seed: Generator seed

    Returns:
        Chain whose bases are orthonormal (condition number 1)
    """
    dims = [int(k) for k in subspace_dims]
    if not dims:
        raise DegenerateInputError("subspace_dims must not be empty")
    if any(k < 0 for k in dims):
        raise DegenerateInputError("subspace dimensions must be nonnegative")
    if any(b <= a for a, b in zip(dims, dims[1:])):
        raise DegenerateInputError(f"subspace dimensions {dims} are not strictly increasing")
    if dims[-1] >= dim:
        raise DegenerateInputError(f"largest subspace dimension {dims[-1]} must be below dim {dim}")

    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    spaces = [Subspace.from_matrix(q[:, :k], dim=dim) for k in dims]
    return Chain(dim=dim, spaces=spaces)


def distance_profile(
    space: NormSpec, chain: Chain, x: PointLike, tolerances: Optional[Tolerances] = None
) -> List[float]:
    """ρ(x, Y_1) ≥ ρ(x, Y_2) ≥ … along the chain."""
    x = as_point(x, space.dim)
    return [distance_value(space, Y, x, tolerances) for Y in chain.spaces]
