"""
Pydantic models for the lethargy constructions: target sequences, q-sequence levels,
transcripts and the reports produced by the studies and audits.
"""

import math
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from .space_models import Functional, Point


class TargetSequence(BaseModel):
    """
    Target distances d_1 ≥ d_2 ≥ … ≥ 0.
    """
    d: List[float] = Field(..., min_length=1, description="Target distances")

    @field_validator("d")
    @classmethod
    def validate_targets(cls, v):
        """Validate that targets are finite, nonnegative and non-increasing."""
        if any(not math.isfinite(x) for x in v):
            raise ValueError("targets must be finite")
        if any(x < 0 for x in v):
            raise ValueError("targets must be nonnegative")
        if any(b > a for a, b in zip(v, v[1:])):
            raise ValueError("targets not non-increasing")
        return v

    @property
    def length(self) -> int:
        return len(self.d)

    @property
    def first_zero_index(self) -> Optional[int]:
        """1-based index of the first zero target, if any."""
        for k, value in enumerate(self.d, start=1):
            if value == 0:
                return k
        return None

    @property
    def is_strict(self) -> bool:
        """Strictly decreasing (the finite-chain construction requires this)."""
        return all(b < a for a, b in zip(self.d, self.d[1:]))

    def satisfies_strict_tail_condition(self) -> bool:
        """Whether d_n > Σ_{k>n} d_k for every n before the last index."""
        return all(self.d[n] > sum(self.d[n + 1:]) for n in range(len(self.d) - 1))

    def tau(self) -> "TauSequence":
        return TauSequence.from_targets(self.d)


class TauSequence(BaseModel):
    """
    τ_1 = d_1 and τ_j = min_{k=2..j} (d_{k−1} − d_k).
    """
    tau: List[float] = Field(default_factory=list)

    @classmethod
    def from_targets(cls, d: List[float]) -> "TauSequence":
        if not d:
            return cls(tau=[])
        tau = [float(d[0])]
        running = math.inf
        for k in range(1, len(d)):
            running = min(running, d[k - 1] - d[k])
            tau.append(float(running))
        return cls(tau=tau)

    def amplitude(self, j: int, n: int, d: List[float]) -> float:
        """u_n^{(j)} = 1 + τ_n / (2^j d_j)."""
        return 1.0 + self.tau[n - 1] / (2.0 ** j * d[j - 1])


def estimate_warning(label: str, holds: Sequence[bool]) -> Optional[str]:
    """'estimate check: a/b <label> not met', or None when every estimate held."""
    misses = sum(1 for h in holds if not h)
    if not misses:
        return None
    return f"estimate check: {misses}/{len(holds)} {label} not met"


class QEntry(BaseModel):
    """One q_m of a q-sequence level."""
    m: int
    u: float
    v: float
    mu: float
    q: Tuple[float, ...]
    expansions: int = Field(default=0, description="Times the μ bracket had to be widened")

    @property
    def q_array(self) -> Point:
        return np.asarray(self.q, dtype=float)


class QSequenceLevel(BaseModel):
    """
    One application of the q-sequence lemma: z, w, δ, the two-point functional and the q_m.
    """
    j: int = Field(..., ge=1)
    kind: str = Field(default="lemma", description="'lemma', or 'fixed' for a prescribed unit vector")
    z: Tuple[float, ...]
    w: Tuple[float, ...]
    rho_w: float = Field(default=0.0, description="ρ(w, Q_1)")
    delta: float = 0.0
    target_value: float = Field(default=0.0, description="Prescribed f(z) = δ − 1/ρ(w, Q_1)")
    f: Optional[Functional] = None
    feasible_at_norm: bool = True
    alpha: Optional[float] = None
    z_prime: Optional[Tuple[float, ...]] = None
    entries: List[QEntry] = Field(default_factory=list)
    c: float = Field(default=0.0, description="‖z‖ + 2")
    warnings: List[str] = Field(default_factory=list)

    @property
    def z_array(self) -> Point:
        return np.asarray(self.z, dtype=float)

    @property
    def w_array(self) -> Point:
        return np.asarray(self.w, dtype=float)

    def entry(self, m: int) -> QEntry:
        for e in self.entries:
            if e.m == m:
                return e
        raise KeyError(f"level {self.j} has no entry for m={m}")


class FunctionalRecord(BaseModel):
    """f_{j,n} with its recorded value on q_{j+1,n}."""
    j: int
    n: int
    f: Functional
    delta: float
    target_value: float
    value_next: float = Field(..., description="f_{j,n}(q_{j+1,n})")
    window: Tuple[float, float] = Field(..., description="[−1, τ_n/(2^j d_{j+1}) − 1]")
    feasible_at_norm: bool
    fallback: bool = Field(default=False, description="Norm-attaining substitute used")

    @property
    def in_window(self) -> bool:
        lo, hi = self.window
        return lo - 1e-6 <= self.value_next <= hi + 1e-6


class SweepStep(BaseModel):
    """Backward sweep step solving for λ_{k−1,n}."""
    k: int = Field(..., description="Level whose λ is being solved (k − 1 in the sweep)")
    lam: float
    upper_estimate: float = Field(..., description="ρ(z_{k+1,n}, Y_k) before the correction")
    endpoint_general: float = Field(..., description="f_{k,n}(q_{k+1,n})")
    endpoint_top: float = Field(..., description="f_{n−1,n}(q_{n,n})")
    lambda_bound: float = Field(..., description="d_k − d_{k+1}(1 − 2^{−k})")
    anchor_shift: bool = False
    correction: Tuple[float, ...] = Field(default=(), description="Nearest point in Y_{k+1} subtracted by an anchor shift")
    expansions: int = 0

    @property
    def within_bound(self) -> bool:
        return abs(self.lam) <= self.lambda_bound + 1e-6


class ResidualRow(BaseModel):
    """|ρ(x, Y_k) − d_k| for one k."""
    k: int
    d: float
    rho: float
    residual: float
    passed: bool


class ConstructionTranscript(BaseModel):
    """
    Everything the theorem driver computed on the way to x.
    """
    targets: List[float]
    tau: List[float]
    branch: str = "general"
    strict_tail_condition: bool = False
    levels: List[QSequenceLevel] = Field(default_factory=list)
    functionals: List[FunctionalRecord] = Field(default_factory=list)
    lambdas: List[float] = Field(default_factory=list, description="λ_{1,n}, …, λ_{n,n}")
    sweep: List[SweepStep] = Field(default_factory=list)
    lift: Tuple[float, ...] = Field(default=(), description="Vector added when lifting past a zero first subspace")
    x: Tuple[float, ...] = ()
    residuals: List[ResidualRow] = Field(default_factory=list)
    warnings: List[str] = Field(default_factory=list)
    passed: bool = False

    @property
    def x_array(self) -> Point:
        return np.asarray(self.x, dtype=float)

    @property
    def max_residual(self) -> float:
        return max((r.residual for r in self.residuals), default=0.0)

    def reconstruct(self) -> Point:
        """
        Σ λ_{j,n} q_{j,n} over the levels, minus the anchor-shift corrections, plus the lift.
        """
        x = np.zeros(len(self.x))
        lambdas = self.lambdas[len(self.lambdas) - len(self.levels):]
        for lam, level in zip(lambdas, self.levels):
            x = x + lam * level.entries[-1].q_array
        for step in self.sweep:
            if step.correction:
                x = x - np.asarray(step.correction, dtype=float)
        if self.lift:
            x = x + np.asarray(self.lift, dtype=float)
        return x

    def estimate_warnings(self) -> List[str]:
        """Report lines for the functional windows and λ bounds that did not hold numerically."""
        lines = [
            estimate_warning("functional windows", [f.in_window for f in self.functionals]),
            estimate_warning("λ bounds", [s.within_bound for s in self.sweep]),
        ]
        return [line for line in lines if line]

    def diagnostics(self) -> Dict[str, int]:
        """Counts of solver events and of estimates that did not hold numerically."""
        return {
            "infeasible_at_norm": sum(1 for f in self.functionals if not f.feasible_at_norm)
            + sum(1 for lv in self.levels if not lv.feasible_at_norm),
            "fallback_functionals": sum(1 for f in self.functionals if f.fallback),
            "window_violations": sum(1 for f in self.functionals if not f.in_window),
            "lambda_bound_violations": sum(1 for s in self.sweep if not s.within_bound),
            "anchor_shifts": sum(1 for s in self.sweep if s.anchor_shift),
            "bracket_expansions": sum(s.expansions for s in self.sweep)
            + sum(e.expansions for lv in self.levels for e in lv.entries),
        }


class FiniteConstructResult(BaseModel):
    """Output of the finite-chain construction."""
    x: Tuple[float, ...]
    lam: float
    residuals: List[ResidualRow]
    norm: float
    norm_bound_holds: bool = Field(..., description="‖x‖ ≤ d_1 + 1 (reported, not enforced)")
    span_residual: float = Field(..., description="Euclidean residual of x − λz against Y_n")
    passed: bool
    warnings: List[str] = Field(default_factory=list)


class GapRow(BaseModel):
    m: int
    n: int
    gap: float


class BoundRow(BaseModel):
    """An a-priori estimate evaluated numerically."""
    j: int
    m: int
    n: int
    value: float
    bound: float
    holds: bool


class CauchyStudyReport(BaseModel):
    """
    Gaps ‖x_{n,n} − x_{m,m}‖ with the per-level and tail estimates.
    """
    n_values: List[int]
    gaps: List[GapRow] = Field(default_factory=list)
    level_bounds: List[BoundRow] = Field(default_factory=list)
    tail_bounds: List[BoundRow] = Field(default_factory=list)
    max_residuals: Dict[int, float] = Field(default_factory=dict)
    warnings: List[str] = Field(default_factory=list)
    passed: bool = False


class JamesReport(BaseModel):
    """Norm attainment at the constructed x."""
    x: Tuple[float, ...]
    norm_x: float
    pairing_ratio: float = Field(..., description="f(x) / ‖f‖")
    kernel_distance: float = Field(..., description="ρ(x, ker f)")
    used_targets: List[float]
    dropped_targets: List[float] = Field(default_factory=list)
    flipped: bool = False
    passed: bool
    transcript: Optional[ConstructionTranscript] = None


class AuditFailure(BaseModel):
    """A failing audit trial with enough data to reproduce it."""
    trial: int
    seed: List[int]
    config: Dict[str, Any] = Field(default_factory=dict)
    observed: Dict[str, Any] = Field(default_factory=dict)
    claimed: Dict[str, Any] = Field(default_factory=dict)


class AuditReport(BaseModel):
    """
    Pass/fail tabulation of a lemma audit.
    """
    lemma: str
    p: str
    trials: int = Field(..., ge=1)
    passes: int = Field(..., ge=0)
    failures: List[AuditFailure] = Field(default_factory=list)
    seed: int = 0

    @model_validator(mode="after")
    def validate_counts(self):
        """Validate passes + failures = trials."""
        if self.passes + len(self.failures) != self.trials:
            raise ValueError("passes and failures must add up to trials")
        return self

    @property
    def pass_rate(self) -> float:
        return self.passes / self.trials


class SpotCheck(BaseModel):
    """Solver distance against the brute-force oracle on a low-dimensional link."""
    k: int
    solver: float
    oracle: float
    agrees: bool


class VerificationReport(BaseModel):
    """
    Residual table of a candidate x against its targets.
    """
    rows: List[ResidualRow] = Field(default_factory=list)
    tolerance: float
    spot_checks: List[SpotCheck] = Field(default_factory=list)
    passed: bool

    @property
    def failing_rows(self) -> List[int]:
        return [r.k for r in self.rows if not r.passed]
