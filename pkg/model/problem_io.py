"""
Problem and report file formats (JSON), canonical hashing and instance generation.
"""

import hashlib
import json
import math
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .config import Tolerances
from .construction_models import ResidualRow, TargetSequence
from .errors import ProblemParseError
from .space_models import Chain, NormSpec, Subspace, parse_exponent
from .subspace_chain import random_chain


class NormConfig(BaseModel):
    """Norm section: exponent (number or "inf") and optional weights."""
    model_config = ConfigDict(extra="forbid")

    p: Union[float, str] = Field(default=2.0)
    weights: Optional[List[float]] = None

    @field_validator("p")
    @classmethod
    def validate_exponent(cls, v):
        """Validate p ≥ 1 or inf."""
        try:
            p = parse_exponent(v)
        except ValueError:
            raise ValueError("p must be ≥ 1 or inf")
        if math.isnan(p) or p < 1:
            raise ValueError("p must be ≥ 1 or inf")
        return "inf" if math.isinf(p) else p

    @property
    def exponent(self) -> float:
        return parse_exponent(self.p)


class SpaceConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    dim: int = Field(..., ge=1)
    norm: NormConfig = Field(default_factory=NormConfig)


class ChainConfig(BaseModel):
    """
    Chain section: explicit bases (each a list of basis vectors) or a seeded random chain.
    """
    model_config = ConfigDict(extra="forbid")

    mode: Literal["explicit", "random"]
    bases: Optional[List[List[List[float]]]] = None
    dims: Optional[List[int]] = None
    seed: Optional[int] = None
    witnesses: Optional[List[List[float]]] = None

    @model_validator(mode="after")
    def validate_mode_fields(self):
        """Validate that the fields required by the mode are present."""
        if self.mode == "explicit" and self.bases is None:
            raise ValueError("explicit chains need 'bases'")
        if self.mode == "random" and (self.dims is None or self.seed is None):
            raise ValueError("random chains need 'dims' and 'seed'")
        return self

    @property
    def length(self) -> int:
        return len(self.bases) if self.mode == "explicit" else len(self.dims)


class ToleranceConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    solve: Optional[float] = Field(default=None, gt=0)
    root: Optional[float] = Field(default=None, gt=0)
    verify: Optional[float] = Field(default=None, gt=0)


class OptionsConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    transcript: bool = False


class ProblemSpec(BaseModel):
    """
    A construction problem: space, chain, targets, tolerances and options.
    """
    model_config = ConfigDict(extra="forbid")

    space: SpaceConfig
    chain: ChainConfig
    targets: List[float]
    tolerances: ToleranceConfig = Field(default_factory=ToleranceConfig)
    options: OptionsConfig = Field(default_factory=OptionsConfig)
    x: Optional[List[float]] = Field(default=None, description="Candidate point for verify")

    @field_validator("targets")
    @classmethod
    def validate_targets(cls, v):
        """Validate that targets are nonnegative and non-increasing."""
        if any(t < 0 for t in v):
            raise ValueError("targets must be nonnegative")
        if any(b > a for a, b in zip(v, v[1:])):
            raise ValueError("targets not non-increasing")
        return v

    @model_validator(mode="after")
    def validate_consistency(self):
        """Validate dimensions of bases, weights, witnesses and x, and the target count."""
        dim = self.space.dim
        weights = self.space.norm.weights
        if weights is not None and len(weights) != dim:
            raise ValueError(f"weights must have length {dim}")
        if self.chain.mode == "explicit":
            for basis in self.chain.bases:
                if any(len(vec) != dim for vec in basis):
                    raise ValueError(f"basis vectors must have dimension {dim}")
        else:
            if any(k >= dim or k < 0 for k in self.chain.dims):
                raise ValueError(f"chain dims must lie in [0, {dim})")
            if any(b <= a for a, b in zip(self.chain.dims, self.chain.dims[1:])):
                raise ValueError("chain dims must be strictly increasing")
        if self.chain.witnesses is not None and any(len(w) != dim for w in self.chain.witnesses):
            raise ValueError(f"witnesses must have dimension {dim}")
        if len(self.targets) != self.chain.length:
            raise ValueError(f"{len(self.targets)} targets for a chain of length {self.chain.length}")
        if self.x is not None and len(self.x) != dim:
            raise ValueError(f"x must have dimension {dim}")
        return self

    def norm_spec(self) -> NormSpec:
        weights = tuple(self.space.norm.weights) if self.space.norm.weights is not None else None
        return NormSpec(dim=self.space.dim, p=self.space.norm.exponent, weights=weights)

    def build_chain(self) -> Chain:
        dim = self.space.dim
        if self.chain.mode == "random":
            chain = random_chain(dim, self.chain.dims, self.chain.seed)
        else:
            spaces = [Subspace(dim=dim, columns=tuple(tuple(v) for v in basis)) for basis in self.chain.bases]
            chain = Chain(dim=dim, spaces=spaces)
        if self.chain.witnesses is not None:
            chain = chain.model_copy(update={"witnesses": [tuple(w) for w in self.chain.witnesses]})
        return chain

    def target_sequence(self) -> TargetSequence:
        return TargetSequence(d=self.targets)

    def apply_tolerances(self, base: Tolerances) -> Tolerances:
        """File tolerances layered over the given base."""
        return base.merged(**self.tolerances.model_dump())


class Report(BaseModel):
    """
    Machine-readable outcome of one subcommand.
    """
    command: str
    problem_hash: Optional[str] = None
    passed: bool
    x: Optional[List[float]] = None
    residuals: List[ResidualRow] = Field(default_factory=list)
    warnings: List[str] = Field(default_factory=list)
    details: Dict[str, Any] = Field(default_factory=dict)
    transcript: Optional[Dict[str, Any]] = None
    timestamp: str = Field(default_factory=lambda: datetime.now(timezone.utc).isoformat())


def _jsonable(value: Any) -> Any:
    """Replace non-finite floats by strings so the output is strict JSON."""
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if math.isnan(value):
            return "nan"
        return value
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def parse_problem(source: Union[str, Path]) -> ProblemSpec:
    """
    Parse and validate a JSON problem file or text.

    Args:
        source: Path to a file, or the JSON text itself

    Returns:
        ProblemSpec

    Raises:
        ProblemParseError: With line/column for syntax errors, with field errors for semantic ones
    """
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
        path = Path(source)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise ProblemParseError(f"cannot read problem file {path}: {e}")
    else:
        text = source

    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ProblemParseError(f"syntax error: {e.msg}", line=e.lineno, column=e.colno)

    try:
        return ProblemSpec.model_validate(raw)
    except ValidationError as e:
        field_errors = [
            {"field": ".".join(str(part) for part in err["loc"]) or "problem",
             "message": err["msg"].removeprefix("Value error, ")}
            for err in e.errors()
        ]
        summary = "; ".join(f"{fe['field']}: {fe['message']}" for fe in field_errors)
        raise ProblemParseError(f"invalid problem: {summary}", field_errors=field_errors)


def canonical_json(data: Any) -> str:
    """Compact key-sorted JSON; floats use the shortest round-trip representation."""
    return json.dumps(_jsonable(data), sort_keys=True, separators=(",", ":"), ensure_ascii=False, allow_nan=False)


def emit_problem(spec: ProblemSpec) -> str:
    """Pretty JSON text of a problem; parse_problem(emit_problem(s)) == s."""
    data = spec.model_dump(exclude_none=True)
    return json.dumps(_jsonable(data), sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def problem_hash(spec: ProblemSpec) -> str:
    """sha256 of the canonical problem JSON."""
    return hashlib.sha256(canonical_json(spec.model_dump(exclude_none=True)).encode("utf-8")).hexdigest()


def report_payload(report: Report, include_timestamp: bool = True) -> Dict[str, Any]:
    data = report.model_dump(mode="python")
    if not include_timestamp:
        data.pop("timestamp", None)
    return _jsonable(data)


def report_json(report: Report) -> str:
    return json.dumps(report_payload(report), sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def report_digest(report: Report) -> str:
    """Hash of the report content, excluding the timestamp."""
    return hashlib.sha256(canonical_json(report_payload(report, include_timestamp=False)).encode("utf-8")).hexdigest()


def write_report(report: Report, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report_json(report), encoding="utf-8")
    return path


def generate_problem(
    dim: int, dims: List[int], seed: int, p: Union[float, str] = 2.0,
    targets: Optional[List[float]] = None,
) -> ProblemSpec:
    """
    Problem with a seeded random chain; targets default to the geometric profile 2^{−k}.
    """
    if targets is None:
        targets = [2.0 ** -k for k in range(1, len(dims) + 1)]
    raw = {
        "space": {"dim": dim, "norm": {"p": p}},
        "chain": {"mode": "random", "dims": list(dims), "seed": seed},
        "targets": list(targets),
    }
    try:
        return ProblemSpec.model_validate(raw)
    except ValidationError as e:
        raise ProblemParseError(f"invalid generated problem: {e.errors()[0]['msg']}")
