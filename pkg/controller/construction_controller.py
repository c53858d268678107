"""
Construction controller: one handler per CLI subcommand.
Acts as the interface between the command line and the numerical services.
"""

import logging
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, ValidationError

from model.config import Tolerances
from model.construction_models import ResidualRow
from model.distance_engine import distance_value
from model.errors import DegenerateInputError, ProblemParseError
from model.lethargy_constructor import (
    build_zw,
    cauchy_study,
    finite_construct,
    james_demo,
    q_sequence,
    target_profile,
    theorem_construct,
)
from model.normed_space import norm
from model.oracle import lemma_audit, verify_construction
from model.problem_io import ProblemSpec, Report, emit_problem, generate_problem, problem_hash
from model.space_models import Chain, NormSpec, Subspace, parse_exponent
from model.subspace_chain import validate_chain, witness

logger = logging.getLogger(__name__)

SUBCOMMANDS = ("construct", "verify", "witness", "finite", "qseq", "james", "cauchy", "gen", "audit")


class RunFlags(BaseModel):
    """
    Command-line options shared by the handlers; None means "not given".
    """
    tol_solve: Optional[float] = None
    tol_root: Optional[float] = None
    tol_verify: Optional[float] = None
    seed: int = 0
    transcript: bool = False
    x: Optional[List[float]] = None
    z: Optional[List[float]] = None
    pairs: Optional[List[Tuple[float, float]]] = None
    functional: Optional[List[float]] = None
    d_tail: List[float] = Field(default_factory=list)
    n_max: Optional[int] = None
    lemma: Optional[str] = None
    trials: int = 100
    p: str = "2"
    dims: Optional[List[int]] = None
    dim: Optional[int] = None
    profile: Optional[str] = None


def _floats(values) -> List[float]:
    return [float(v) for v in values]


class ConstructionController:
    """
    Controller for running constructions, verifications, studies and audits.
    Every handler returns a Report; problem-level failures are reported, not raised.
    """

    def __init__(self, tolerances: Optional[Tolerances] = None):
        """
        Initialize the controller.

        Args:
            tolerances: Base tolerances (built-in defaults overlaid with the environment)
        """
        self.base_tolerances = tolerances or Tolerances()
        self._handlers: Dict[str, Callable[[Optional[ProblemSpec], RunFlags], Report]] = {
            "construct": self.run_construct,
            "verify": self.run_verify,
            "witness": self.run_witness,
            "finite": self.run_finite,
            "qseq": self.run_qseq,
            "james": self.run_james,
            "cauchy": self.run_cauchy,
            "gen": self.run_gen,
            "audit": self.run_audit,
        }

    def resolve_tolerances(self, spec: Optional[ProblemSpec], flags: RunFlags) -> Tolerances:
        """CLI flags over problem-file tolerances over the base tolerances."""
        tolerances = spec.apply_tolerances(self.base_tolerances) if spec is not None else self.base_tolerances
        return tolerances.merged(solve=flags.tol_solve, root=flags.tol_root, verify=flags.tol_verify)

    def run_subcommand(self, name: str, spec: Optional[ProblemSpec], flags: RunFlags) -> Report:
        """
        Dispatch a subcommand.

        Args:
            name: Subcommand name
            spec: Parsed problem, when the subcommand takes one
            flags: Command-line options

        Returns:
            Report of the run

        Raises:
            DegenerateInputError: If the subcommand is unknown
        """
        if name not in self._handlers:
            raise DegenerateInputError(f"unknown subcommand '{name}'; expected one of {SUBCOMMANDS}")
        return self._handlers[name](spec, flags)

    # Problem helpers
    def _require(self, spec: Optional[ProblemSpec], name: str) -> ProblemSpec:
        if spec is None:
            raise ProblemParseError(f"'{name}' needs a problem file")
        return spec

    def _materialize(self, spec: ProblemSpec) -> Tuple[NormSpec, Chain]:
        try:
            return spec.norm_spec(), spec.build_chain()
        except ValidationError as e:
            raise ProblemParseError(f"invalid problem: {e.errors()[0]['msg']}")

    def _report(self, command: str, spec: Optional[ProblemSpec], passed: bool, **fields: Any) -> Report:
        return Report(command=command, problem_hash=problem_hash(spec) if spec is not None else None,
                      passed=passed, **fields)

    # Handlers
    def run_construct(self, spec: Optional[ProblemSpec], flags: RunFlags) -> Report:
        spec = self._require(spec, "construct")
        space, chain = self._materialize(spec)
        tolerances = self.resolve_tolerances(spec, flags)
        x, transcript = theorem_construct(space, chain, spec.target_sequence(), tolerances)
        include = flags.transcript or spec.options.transcript
        return self._report(
            "construct", spec, transcript.passed,
            x=_floats(x),
            residuals=transcript.residuals,
            warnings=transcript.warnings,
            details={
                "branch": transcript.branch,
                "strict_tail_condition": transcript.strict_tail_condition,
                "lambdas": transcript.lambdas,
                "diagnostics": transcript.diagnostics(),
            },
            transcript=transcript.model_dump(mode="python") if include else None,
        )

    def run_verify(self, spec: Optional[ProblemSpec], flags: RunFlags) -> Report:
        spec = self._require(spec, "verify")
        space, chain = self._materialize(spec)
        tolerances = self.resolve_tolerances(spec, flags)
        x = flags.x if flags.x is not None else spec.x
        if x is None:
            raise ProblemParseError("verify needs a point: pass --x or set 'x' in the problem file")
        if len(x) != space.dim:
            raise ProblemParseError(f"x has dimension {len(x)}, expected {space.dim}")
        result = verify_construction(space, chain, x, spec.targets, tolerances)
        return self._report(
            "verify", spec, result.passed,
            x=_floats(x),
            residuals=result.rows,
            details={
                "tolerance": result.tolerance,
                "failing_rows": result.failing_rows,
                "spot_checks": [c.model_dump() for c in result.spot_checks],
            },
        )

    def run_witness(self, spec: Optional[ProblemSpec], flags: RunFlags) -> Report:
        spec = self._require(spec, "witness")
        space, chain = self._materialize(spec)
        tolerances = self.resolve_tolerances(spec, flags)
        report = validate_chain(space, chain, tolerances)
        if not report.passed:
            return self._report("witness", spec, False, warnings=report.failures + report.witness_failures)
        uppers = list(chain.spaces[1:])
        if chain.spaces[-1].rank < space.dim:
            uppers.append(Subspace.full(space.dim))
        rows = []
        for j, (lo, hi) in enumerate(zip(chain.spaces, uppers), start=1):
            y = witness(space, lo, hi, tolerances=tolerances)
            size = norm(space, y)
            rho = distance_value(space, lo, y, tolerances)
            rows.append({"link": j, "witness": _floats(y), "norm": size, "distance": rho,
                         "ratio": rho / size, "passed": abs(rho - size) <= tolerances.verify_for(size)})
        return self._report(
            "witness", spec, all(r["passed"] for r in rows),
            details={"links": rows, "chain": [lk.model_dump() for lk in report.links]},
        )

    def run_finite(self, spec: Optional[ProblemSpec], flags: RunFlags) -> Report:
        spec = self._require(spec, "finite")
        space, chain = self._materialize(spec)
        tolerances = self.resolve_tolerances(spec, flags)
        z = flags.z
        if z is None:
            z = np.random.default_rng(flags.seed).standard_normal(space.dim).tolist()
        result = finite_construct(space, chain, spec.targets, z, tolerances)
        return self._report(
            "finite", spec, result.passed,
            x=list(result.x),
            residuals=result.residuals,
            warnings=result.warnings,
            details={"lambda": result.lam, "z": _floats(z), "norm": result.norm,
                     "norm_bound_holds": result.norm_bound_holds, "span_residual": result.span_residual},
        )

    def run_qseq(self, spec: Optional[ProblemSpec], flags: RunFlags) -> Report:
        spec = self._require(spec, "qseq")
        space, chain = self._materialize(spec)
        tolerances = self.resolve_tolerances(spec, flags)
        if chain.length < 2:
            raise DegenerateInputError("qseq needs a chain with at least two subspaces (Q1 ⊂ Q2)")
        Q1, Q2 = chain.spaces[0], chain.spaces[1]
        Q3 = chain.spaces[2] if chain.length > 2 else Subspace.full(space.dim)
        pairs = flags.pairs or [(1.0, 1.0), (1.5, 1.0)]
        y2 = witness(space, Q2, Q3, tolerances=tolerances)
        y1 = witness(space, Q1, Q2, tolerances=tolerances)
        z, w = build_zw(space, Q1, Q2, y2, y1, tolerances)
        level = q_sequence(space, Q1, Q2, z, w, pairs, tolerances)

        tol = tolerances.verify_for(max(u for u, _ in pairs))
        rows = []
        for e in level.entries:
            rho1 = distance_value(space, Q1, e.q_array, tolerances)
            rho2 = distance_value(space, Q2, e.q_array, tolerances)
            rows.append(ResidualRow(k=e.m, d=e.u, rho=rho1, residual=abs(rho1 - e.u), passed=abs(rho1 - e.u) <= tol))
            rows.append(ResidualRow(k=e.m, d=e.v, rho=rho2, residual=abs(rho2 - e.v), passed=abs(rho2 - e.v) <= tol))
        return self._report(
            "qseq", spec, all(r.passed for r in rows),
            residuals=rows,
            warnings=level.warnings,
            details={"delta": level.delta, "delta_max": 3.0 / level.rho_w, "target_value": level.target_value,
                     "feasible_at_norm": level.feasible_at_norm, "c": level.c,
                     "mu": [e.mu for e in level.entries]},
            transcript=level.model_dump(mode="python") if flags.transcript else None,
        )

    def run_james(self, spec: Optional[ProblemSpec], flags: RunFlags) -> Report:
        if flags.functional is None:
            raise ProblemParseError("james needs --functional")
        space = NormSpec(dim=len(flags.functional), p=parse_exponent(flags.p))
        tolerances = self.resolve_tolerances(None, flags)
        result = james_demo(space, flags.functional, flags.d_tail, tolerances)
        return self._report(
            "james", None, result.passed,
            x=list(result.x),
            residuals=result.transcript.residuals if result.transcript else [],
            warnings=result.transcript.warnings if result.transcript else [],
            details={"norm_x": result.norm_x, "pairing_ratio": result.pairing_ratio,
                     "kernel_distance": result.kernel_distance, "dropped_targets": result.dropped_targets,
                     "flipped": result.flipped},
        )

    def run_cauchy(self, spec: Optional[ProblemSpec], flags: RunFlags) -> Report:
        spec = self._require(spec, "cauchy")
        space, chain = self._materialize(spec)
        tolerances = self.resolve_tolerances(spec, flags)
        n_max = flags.n_max or chain.length
        study = cauchy_study(space, chain, spec.target_sequence(), range(1, n_max + 1), tolerances)
        return self._report(
            "cauchy", spec, study.passed,
            warnings=study.warnings,
            details={
                "gaps": [g.model_dump() for g in study.gaps],
                "tail_bounds": [b.model_dump() for b in study.tail_bounds],
                "level_bound_violations": sum(1 for b in study.level_bounds if not b.holds),
                "tail_bound_violations": sum(1 for b in study.tail_bounds if not b.holds),
                "max_residuals": {str(n): r for n, r in study.max_residuals.items()},
            },
        )

    def run_gen(self, spec: Optional[ProblemSpec], flags: RunFlags) -> Report:
        if flags.dims is None or flags.dim is None:
            raise ProblemParseError("gen needs --dims and --dim")
        targets = target_profile(flags.profile, len(flags.dims)).d if flags.profile else None
        p = "inf" if parse_exponent(flags.p) == float("inf") else float(flags.p)
        generated = generate_problem(flags.dim, flags.dims, flags.seed, p, targets)
        return self._report("gen", generated, True, details={"problem": emit_problem(generated)})

    def run_audit(self, spec: Optional[ProblemSpec], flags: RunFlags) -> Report:
        if flags.lemma is None:
            raise ProblemParseError("audit needs --lemma")
        space = NormSpec(dim=flags.dim or 6, p=parse_exponent(flags.p))
        tolerances = self.resolve_tolerances(None, flags)
        audit = lemma_audit(flags.lemma, space, flags.trials, flags.seed, tolerances)
        return self._report(
            "audit", None, audit.passes == audit.trials,
            details={"lemma": audit.lemma, "p": audit.p, "trials": audit.trials, "passes": audit.passes,
                     "pass_rate": audit.pass_rate, "seed": audit.seed,
                     "failures": [f.model_dump() for f in audit.failures]},
        )
