"""
Configuration models for the lethargy application.
Tolerances are read from the environment (via python-dotenv) and can be overridden per problem or per CLI call.
"""

import math
import os
from datetime import datetime
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, field_validator

ENV_PREFIX = "LETHARGY_"

# Per-norm solve tolerances when none is configured explicitly.
DEFAULT_SOLVE_TOLERANCES = {
    "projection": 1e-10,
    "linear_program": 1e-9,
    "newton": 1e-8,
}


class Tolerances(BaseModel):
    """
    Numerical tolerances shared by every solver and check.
    """
    model_config = ConfigDict(frozen=True)

    solve: Optional[float] = Field(default=None, description="Solver tolerance; None selects the per-norm default")
    root: float = Field(default=1e-10, description="Absolute tolerance on root-finding parameters")
    verify: float = Field(default=1e-6, description="Verification tolerance, scaled by (1 + magnitude)")
    compare: float = Field(default=1e-9, description="Absolute-plus-relative comparison tolerance")
    max_iterations: int = Field(default=200, ge=1, description="Iteration budget of iterative solvers")
    bracket_expansions: int = Field(default=60, ge=1, description="Maximum doublings when widening a bracket")

    @field_validator("solve", "root", "verify", "compare")
    @classmethod
    def validate_positive(cls, v):
        """Validate that tolerances are strictly positive."""
        if v is not None and not (v > 0 and math.isfinite(v)):
            raise ValueError("tolerances must be positive")
        return v

    def solve_for(self, p: float) -> float:
        """
        Resolve the solve tolerance for a given norm exponent.

        Args:
            p: Norm exponent (math.inf for the max norm)

        Returns:
            The configured solve tolerance or the per-norm default
        """
        if self.solve is not None:
            return self.solve
        if p == 2:
            return DEFAULT_SOLVE_TOLERANCES["projection"]
        if p == 1 or math.isinf(p):
            return DEFAULT_SOLVE_TOLERANCES["linear_program"]
        return DEFAULT_SOLVE_TOLERANCES["newton"]

    def verify_for(self, magnitude: float) -> float:
        """Verification tolerance scaled by (1 + problem magnitude)."""
        return self.verify * (1.0 + abs(magnitude))

    def close(self, a: float, b: float) -> bool:
        """Absolute-plus-relative comparison with the compare tolerance."""
        return abs(a - b) <= self.compare * (1.0 + max(abs(a), abs(b)))

    def merged(self, **overrides: Any) -> "Tolerances":
        """Return a copy with the non-None overrides applied."""
        updates = {k: v for k, v in overrides.items() if v is not None}
        return self.model_copy(update=updates) if updates else self


class AppState(BaseModel):
    """
    Application state model for the controller singleton.
    """
    log_level: str = Field(default="WARNING", description="Root logger level")
    last_report_hash: Optional[str] = Field(default=None, description="Problem hash of the last report")
    last_updated: datetime = Field(default_factory=datetime.now, description="Last state update timestamp")
    subcommands: List[str] = Field(default_factory=list, description="Enabled CLI subcommands")
    config: Dict[str, Any] = Field(default_factory=dict, description="Free-form settings")


def _env_float(name: str) -> Optional[float]:
    raw = os.getenv(ENV_PREFIX + name)
    if raw is None or raw.strip() == "":
        return None
    return float(raw)


def load_tolerances(dotenv_path: Optional[str] = None) -> Tolerances:
    """
    Build tolerances from built-in defaults and LETHARGY_TOL_* environment variables.

    Args:
        dotenv_path: Optional explicit .env file (the default search is used otherwise)

    Returns:
        Tolerances instance
    """
    load_dotenv(dotenv_path=dotenv_path, override=False)
    return Tolerances().merged(
        solve=_env_float("TOL_SOLVE"),
        root=_env_float("TOL_ROOT"),
        verify=_env_float("TOL_VERIFY"),
        compare=_env_float("TOL_COMPARE"),
    )


def load_log_level(default: str = "WARNING") -> str:
    """Log level from LETHARGY_LOG_LEVEL, after loading any .env file."""
    load_dotenv(override=False)
    return os.getenv(ENV_PREFIX + "LOG_LEVEL", default).upper()
