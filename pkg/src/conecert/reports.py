"""Plain-dict renderings of result objects, and a flat text view of reports."""

from __future__ import annotations

from typing import Any

from .convexity import ConditionReport, ConvexityVerdict, InteriorCondition
from .lagrangian import RoundtripReport, VectorLagrangianPair
from .multipliers import (
    AlternativeReport,
    CertificateCheck,
    CharacterizationReport,
    EfficiencyVerdict,
    MultiplierCertificate,
    NecessityReport,
    NNAMCQResult,
    ScalarizationResult,
    SCQReport,
    SufficiencyReport,
    SystemIWitness,
)


def verdict(v: ConvexityVerdict | None) -> dict | None:
    if v is None:
        return None
    w = v.witness
    return {
        "status": v.status.value,
        "set": v.set_kind,
        "pair_count": v.pair_count,
        "lambda_grid": list(v.lambda_grid),
        "seed": v.seed,
        "margin": v.margin,
        "witness": None if w is None else {
            "p1": w.p1, "p2": w.p2, "lambda": w.lam, "midpoint": w.midpoint,
        },
    }


def condition(c: ConditionReport | None) -> dict | None:
    if c is None:
        return None
    return {
        "name": c.name,
        "refuted": c.refuted,
        "factors": {k: verdict(v) for k, v in c.factors.items()},
        "note": c.note,
    }


def interior(c: InteriorCondition | None) -> dict | None:
    return None if c is None else {"holds": c.holds, "explanation": c.explanation}


def certificate(c: MultiplierCertificate | None) -> dict | None:
    if c is None:
        return None
    return {
        "xi": c.xi, "eta": c.eta, "zeta": c.zeta,
        "normalization": c.normalization,
        "min_slack": c.min_slack,
        "xi_nonzero": c.xi_nonzero,
        "vacuous": c.vacuous,
    }


def check(c: CertificateCheck | None) -> dict | None:
    return None if c is None else {"passed": c.passed, "clauses": c.clauses, "values": c.values}


def efficiency(e: EfficiencyVerdict | None) -> dict | None:
    if e is None:
        return None
    return {
        "weakly_efficient": e.weakly_efficient,
        "ybar": e.ybar,
        "ybar_index": e.ybar_index,
        "dominator": None if e.dominator is None else {"x": e.dominator[0], "y": e.dominator[1]},
        "efficient_indices": list(e.efficient_indices),
        "dominators": [{"candidate": k, "x": x, "y": y} for k, x, y in e.dominators],
        "margin": e.margin,
    }


def system_i(w: SystemIWitness | None) -> dict | None:
    return None if w is None else {"x": w.x, "y": w.y, "z": w.z, "zero_index": w.zero_index}


def nnamcq(n: NNAMCQResult | None) -> dict | None:
    if n is None:
        return None
    return {
        "holds": n.holds,
        "violating": None if n.holds else {
            "eta": n.eta, "zeta": n.zeta, "normalization": n.normalization,
            "min_combined": n.min_combined, "min_eta_at_xbar": n.min_eta_at_xbar,
        },
    }


def scq(s: SCQReport | None) -> dict | None:
    if s is None:
        return None
    return {
        "samples": s.samples,
        "seed": s.seed,
        "satisfied_count": int(sum(s.satisfied)),
        "violated": s.violated,
        "violating": None if s.violating is None else {"eta": s.violating[0], "zeta": s.violating[1]},
        "flags": list(s.flags),
    }


def scalarization(s: ScalarizationResult) -> dict:
    return {
        "minimum": s.minimum,
        "argmin": list(s.argmin),
        "values": s.values,
        "attaining": s.attaining,
    }


def necessity(n: NecessityReport | None) -> dict | None:
    if n is None:
        return None
    return {
        "status": n.status,
        "xbar": n.xbar,
        "efficiency": efficiency(n.efficiency),
        "ybar": n.ybar,
        "a1": condition(n.a1),
        "a2": interior(n.a2),
        "nnamcq": nnamcq(n.nnamcq),
        "certificate": certificate(n.certificate),
        "check": check(n.check),
    }


def sufficiency(s: SufficiencyReport | None) -> dict | None:
    if s is None:
        return None
    return {
        "status": s.status,
        "nnamcq": nnamcq(s.nnamcq),
        "check": check(s.check),
        "efficiency": efficiency(s.efficiency),
    }


def alternative(a: AlternativeReport) -> dict:
    return {
        "status": a.status,
        "domain": list(a.domain),
        "system_i": system_i(a.system_i),
        "certificate": certificate(a.certificate),
    }


def characterization(c: CharacterizationReport) -> dict:
    return {
        "status": c.status,
        "scq": scq(c.scq),
        "necessity": necessity(c.necessity),
        "sufficiency": sufficiency(c.sufficiency),
    }


def pair(p: VectorLagrangianPair | None) -> dict | None:
    return None if p is None else {"y0": p.y0, "S": p.S, "T": p.T}


def roundtrip(r: RoundtripReport) -> dict:
    return {
        "mode": r.mode,
        "gate": r.gate,
        "forward": r.forward,
        "backward": r.backward,
        "vp": efficiency(r.vp),
        "necessity": necessity(r.necessity),
        "pair": pair(r.pair),
        "vpst": efficiency(r.vpst),
        "vpst_matched": efficiency(r.vpst_matched),
    }


def flatten(obj: Any, prefix: str = "") -> list[tuple[str, Any]]:
    """Leaf paths of a nested dict/list; numeric lists are kept whole."""
    if isinstance(obj, dict):
        out = []
        for k in sorted(obj):
            out.extend(flatten(obj[k], f"{prefix}.{k}" if prefix else str(k)))
        return out
    if isinstance(obj, list) and any(isinstance(v, (dict, list)) for v in obj):
        out = []
        for i, v in enumerate(obj):
            out.extend(flatten(v, f"{prefix}[{i}]"))
        return out
    return [(prefix, obj)]


def render_text(report: dict) -> str:
    return "\n".join(f"{k}: {v}" for k, v in flatten(report)) + "\n"
