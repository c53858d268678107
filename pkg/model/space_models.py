"""
Pydantic models for normed spaces, subspaces and the objects solvers return.
Coordinates are stored as float tuples; numerical code works on numpy views of them.
"""

import math
from typing import Any, List, Optional, Sequence, Tuple, Union

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, field_validator, model_validator

from .errors import DegenerateInputError, DimensionMismatchError

# Points travel through the numerical code as float64 arrays.
Point = npt.NDArray[np.float64]
PointLike = Union[Sequence[float], npt.NDArray[np.float64]]

INDEPENDENCE_RATIO = 1e-10


def as_point(x: PointLike, dim: Optional[int] = None, what: str = "point") -> Point:
    """
    Convert to a finite float64 vector, optionally checking its dimension.

    Args:
        x: Sequence or array of coordinates
        dim: Expected dimension
        what: Name used in error messages

    Returns:
        1-D float64 array
    """
    arr = np.asarray(x, dtype=float).reshape(-1)
    if dim is not None and arr.shape[0] != dim:
        raise DimensionMismatchError(dim, arr.shape[0], what)
    if not np.all(np.isfinite(arr)):
        raise DegenerateInputError(f"{what} has non-finite coordinates")
    return arr


def parse_exponent(value: Any) -> float:
    """Accept numbers or the strings 'inf'/'infinity' for the norm exponent."""
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "infinity", "∞"):
            return math.inf
        return float(value)
    return float(value)


class NormSpec(BaseModel):
    """
    A finite-dimensional real space with a (weighted) p-norm.
    """
    model_config = ConfigDict(frozen=True)

    dim: int = Field(..., ge=1, description="Ambient dimension")
    p: float = Field(default=2.0, description="Norm exponent, math.inf for the max norm")
    weights: Optional[Tuple[float, ...]] = Field(default=None, description="Strictly positive weights")

    @field_validator("p", mode="before")
    @classmethod
    def validate_exponent(cls, v):
        """Validate p >= 1 or p = inf."""
        p = parse_exponent(v)
        if math.isnan(p) or p < 1:
            raise ValueError("p must be ≥ 1 or inf")
        return p

    @field_validator("weights")
    @classmethod
    def validate_weights(cls, v):
        """Validate that all weights are strictly positive and finite."""
        if v is not None and any(not (w > 0 and math.isfinite(w)) for w in v):
            raise ValueError("weights must be strictly positive")
        return v

    @model_validator(mode="after")
    def validate_weight_length(self):
        """Validate that weights match the dimension."""
        if self.weights is not None and len(self.weights) != self.dim:
            raise ValueError(f"weights must have length {self.dim}")
        return self

    @property
    def is_max_norm(self) -> bool:
        return math.isinf(self.p)

    @property
    def is_euclidean(self) -> bool:
        return self.p == 2

    @property
    def is_polyhedral(self) -> bool:
        """True for p in {1, inf}, where distances are linear programs."""
        return self.p == 1 or self.is_max_norm

    @property
    def dual_exponent(self) -> float:
        """Hölder conjugate p′ with 1/p + 1/p′ = 1."""
        if self.p == 1:
            return math.inf
        if self.is_max_norm:
            return 1.0
        return self.p / (self.p - 1.0)

    @property
    def scale(self) -> Point:
        """
        Coordinate scale s with ‖x‖ = ‖s∘x‖_p; s_i = w_i^{1/p} (all ones for p = inf).
        """
        if self.weights is None or self.is_max_norm:
            return np.ones(self.dim)
        return np.asarray(self.weights, dtype=float) ** (1.0 / self.p)

    def exponent_label(self) -> str:
        return "inf" if self.is_max_norm else f"{self.p:g}"

    def dual(self) -> "NormSpec":
        """Unweighted space of the dual exponent (used on scaled coordinates)."""
        return NormSpec(dim=self.dim, p=self.dual_exponent)


class Functional(BaseModel):
    """
    A linear functional acting by the standard pairing, with its cached dual norm.
    """
    model_config = ConfigDict(frozen=True)

    coeffs: Tuple[float, ...] = Field(..., description="Coefficients of the pairing")
    dual_norm: float = Field(..., ge=0, description="Dual norm in the owning space")

    @property
    def array(self) -> Point:
        return np.asarray(self.coeffs, dtype=float)

    def __call__(self, x: PointLike) -> float:
        return float(np.dot(self.array, as_point(x, len(self.coeffs), "argument")))

    def scaled(self, factor: float) -> "Functional":
        return Functional(coeffs=tuple(float(c) for c in factor * self.array), dual_norm=abs(factor) * self.dual_norm)


class Subspace(BaseModel):
    """
    A subspace given by an explicit basis, with a cached Euclidean-orthonormal copy.
    """

    dim: int = Field(..., ge=1, description="Ambient dimension")
    columns: Tuple[Tuple[float, ...], ...] = Field(default=(), description="Basis vectors (columns)")

    _basis: Any = PrivateAttr(default=None)
    _orthonormal: Any = PrivateAttr(default=None)

    @model_validator(mode="after")
    def validate_basis(self):
        """Validate column dimensions and linear independence."""
        for column in self.columns:
            if len(column) != self.dim:
                raise ValueError(f"basis column has dimension {len(column)}, expected {self.dim}")
            if not all(math.isfinite(c) for c in column):
                raise ValueError("basis column has non-finite entries")
        if len(self.columns) > self.dim:
            raise ValueError("more basis columns than the ambient dimension")
        if self.columns:
            singular = np.linalg.svd(np.asarray(self.columns, dtype=float).T, compute_uv=False)
            if singular[-1] <= INDEPENDENCE_RATIO * singular[0]:
                raise ValueError("basis columns are not linearly independent")
        return self

    def model_post_init(self, __context: Any) -> None:
        if self.columns:
            basis = np.asarray(self.columns, dtype=float).T
            q, _ = np.linalg.qr(basis)
            self._basis = basis
            self._orthonormal = q[:, : basis.shape[1]]
        else:
            self._basis = np.zeros((self.dim, 0))
            self._orthonormal = np.zeros((self.dim, 0))

    @classmethod
    def from_matrix(cls, matrix: npt.ArrayLike, dim: Optional[int] = None) -> "Subspace":
        """
        Build a subspace from a dim × k matrix whose columns form the basis.

        Args:
            matrix: Basis matrix (columns are basis vectors)
            dim: Ambient dimension, required when k = 0

        Returns:
            Subspace instance
        """
        arr = np.asarray(matrix, dtype=float)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.size == 0:
            if dim is None:
                dim = arr.shape[0]
            return cls(dim=dim, columns=())
        return cls(dim=arr.shape[0], columns=tuple(tuple(float(v) for v in col) for col in arr.T))

    @classmethod
    def zero(cls, dim: int) -> "Subspace":
        return cls(dim=dim, columns=())

    @classmethod
    def full(cls, dim: int) -> "Subspace":
        return cls.from_matrix(np.eye(dim))

    @property
    def basis(self) -> npt.NDArray[np.float64]:
        return self._basis

    @property
    def orthonormal(self) -> npt.NDArray[np.float64]:
        return self._orthonormal

    @property
    def rank(self) -> int:
        return len(self.columns)

    @property
    def is_zero(self) -> bool:
        return self.rank == 0

    def project_euclidean(self, x: PointLike) -> Point:
        """Euclidean orthogonal projection onto the span (representation only)."""
        q = self._orthonormal
        x = as_point(x, self.dim)
        return q @ (q.T @ x)

    def residual(self, x: PointLike) -> float:
        """Euclidean least-squares residual of x against the span."""
        x = as_point(x, self.dim)
        return float(np.linalg.norm(x - self.project_euclidean(x)))

    def contains(self, x: PointLike, tol: float = 1e-10) -> bool:
        """Membership test by relative Euclidean residual."""
        x = as_point(x, self.dim)
        return self.residual(x) <= tol * max(1.0, float(np.linalg.norm(x)))


class LinkStatus(BaseModel):
    """Per-link result of chain validation."""
    index: int = Field(..., description="Link index j for Y_j ⊂ Y_{j+1} (1-based)")
    dim_lo: int
    dim_hi: int
    strict_dims: bool
    contained: bool
    max_residual: float


class ChainValidationReport(BaseModel):
    """
    Outcome of validating a chain: per-link inclusion status and any failures.
    """
    links: List[LinkStatus] = Field(default_factory=list)
    failures: List[str] = Field(default_factory=list)
    witness_failures: List[str] = Field(default_factory=list)
    passed: bool = Field(default=True)


class Chain(BaseModel):
    """
    A strictly nested chain Y_1 ⊂ … ⊂ Y_m of subspaces with optional witnesses.
    """

    dim: int = Field(..., ge=1, description="Ambient dimension")
    spaces: List[Subspace] = Field(default_factory=list, description="Y_1, …, Y_m")
    witnesses: Optional[List[Tuple[float, ...]]] = Field(
        default=None, description="y_j ∈ Y_{j+1} with ρ(y_j, Y_j) = ‖y_j‖"
    )

    @model_validator(mode="after")
    def validate_dimensions(self):
        """Validate that every subspace and witness lives in the ambient dimension."""
        for space in self.spaces:
            if space.dim != self.dim:
                raise ValueError(f"subspace has ambient dimension {space.dim}, expected {self.dim}")
        if self.witnesses is not None:
            for w in self.witnesses:
                if len(w) != self.dim:
                    raise ValueError(f"witness has dimension {len(w)}, expected {self.dim}")
        return self

    @property
    def length(self) -> int:
        return len(self.spaces)

    @property
    def dims(self) -> List[int]:
        return [s.rank for s in self.spaces]

    def prefix(self, m: int) -> "Chain":
        """The chain Y_1, …, Y_m (witnesses truncated accordingly)."""
        witnesses = None
        if self.witnesses is not None:
            witnesses = self.witnesses[: max(m - 1, 0)]
        return Chain(dim=self.dim, spaces=self.spaces[:m], witnesses=witnesses)


class DistanceSolution(BaseModel):
    """
    ρ(x, Y) with a nearest point and a dual certificate.
    """
    value: float = Field(..., ge=0, description="Distance ρ(x, Y)")
    minimizer: Tuple[float, ...] = Field(..., description="Nearest point in span(Y)")
    certificate: Functional = Field(..., description="f with f|Y = 0, ‖f‖ = 1, f(x) = value")
    gap: float = Field(default=0.0, description="value − certificate(x), the duality gap")
    method: str = Field(default="", description="Solver that produced the solution")

    @property
    def minimizer_array(self) -> Point:
        return np.asarray(self.minimizer, dtype=float)


class LineSearchResult(BaseModel):
    """
    Right endpoint δ of the argmin interval of a ⟼ ρ(base − a·dir, Q).
    """
    delta: float
    min_value: float = Field(..., ge=0)
    argmin_interval: Tuple[float, float]


class TwoPointResult(BaseModel):
    """
    Output of the two-point Hahn–Banach construction with its feasibility check.
    """
    delta: float
    f: Functional
    target_value: float = Field(..., description="Prescribed value f(x_2)")
    achieved_dual_norm: float = Field(..., ge=0)
    claimed_dual_norm: float = Field(..., ge=0, description="1 / ρ(x_1, Q)")
    feasible_at_norm: bool
    mirrored: bool = False
