"""
Plain-text rendering of reports as pandas tables.
"""

from typing import Any, Dict, List

import pandas as pd

from model.construction_models import ResidualRow
from model.problem_io import Report

FLOAT_FORMAT = "{:.3e}".format


def _table(records: List[Dict[str, Any]], columns: List[str]) -> str:
    if not records:
        return "(no rows)"
    frame = pd.DataFrame.from_records(records, columns=columns)
    return frame.to_string(index=False, float_format=FLOAT_FORMAT)


def render_residuals(rows: List[ResidualRow]) -> str:
    """Residual table with one row per k."""
    records = [
        {"k": r.k, "d_k": r.d, "rho(x, Y_k)": r.rho, "residual": r.residual, "ok": "yes" if r.passed else "NO"}
        for r in rows
    ]
    return _table(records, ["k", "d_k", "rho(x, Y_k)", "residual", "ok"])


def render_witness_links(links: List[Dict[str, Any]]) -> str:
    records = [
        {"link": lk["link"], "norm": lk["norm"], "distance": lk["distance"], "ratio": lk["ratio"],
         "ok": "yes" if lk["passed"] else "NO"}
        for lk in links
    ]
    return _table(records, ["link", "norm", "distance", "ratio", "ok"])


def render_gaps(gaps: List[Dict[str, Any]]) -> str:
    return _table(gaps, ["m", "n", "gap"])


def render_audit(details: Dict[str, Any]) -> str:
    """Summary line followed by the failing trials, if any."""
    header = (f"lemma={details['lemma']} p={details['p']} passes={details['passes']}/{details['trials']} "
              f"rate={details['pass_rate']:.2%} seed={details['seed']}")
    failures = details.get("failures", [])
    if not failures:
        return header
    records = [
        {"trial": f["trial"], "seed": f["seed"], "observed": f["observed"], "claimed": f["claimed"]}
        for f in failures
    ]
    return header + "\n" + _table(records, ["trial", "seed", "observed", "claimed"])


def _render_details(command: str, details: Dict[str, Any]) -> List[str]:
    if command == "witness" and "links" in details:
        return [render_witness_links(details["links"])]
    if command == "cauchy":
        return [
            render_gaps(details.get("gaps", [])),
            f"level bound violations: {details.get('level_bound_violations', 0)}",
            f"tail bound violations: {details.get('tail_bound_violations', 0)}",
        ]
    if command == "audit":
        return [render_audit(details)]
    if command == "gen":
        return [details["problem"].rstrip("\n")]
    if command == "james":
        return [
            f"||x|| = {details['norm_x']:.12g}",
            f"f(x)/||f|| = {details['pairing_ratio']:.12g}",
            f"rho(x, ker f) = {details['kernel_distance']:.12g}",
            f"dropped targets: {details['dropped_targets']}",
        ]
    if command == "construct":
        lines = [f"branch: {details['branch']}"]
        lines += [f"{name}: {count}" for name, count in details.get("diagnostics", {}).items() if count]
        return lines
    if command == "finite":
        return [f"lambda = {details['lambda']:.12g}", f"||x|| = {details['norm']:.12g}"]
    if command == "qseq":
        return [f"delta = {details['delta']:.12g} (max {details['delta_max']:.12g})", f"c = {details['c']:.12g}"]
    return []


def render_report(report: Report) -> str:
    """
    Human-readable rendering of a report.

    Args:
        report: Report produced by a controller handler

    Returns:
        Multi-line text ending with the overall verdict
    """
    lines = [f"{report.command}: {'PASS' if report.passed else 'FAIL'}"]
    if report.problem_hash:
        lines.append(f"problem: {report.problem_hash[:16]}")
    if report.x is not None:
        lines.append("x = [" + ", ".join(f"{v:.12g}" for v in report.x) + "]")
    if report.residuals:
        lines.append(render_residuals(report.residuals))
    lines.extend(_render_details(report.command, report.details))
    for warning in report.warnings:
        lines.append(f"warning: {warning}")
    return "\n".join(lines) + "\n"
