"""Command-line interface.

Exit codes: 0 claim verified or certificate found, 1 claim refuted (witness
in the report), 2 inconclusive (sampling semidecision or unmet hypothesis),
3 input error, 4 internal failure or a theorem violation.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path
from typing import Callable

import numpy as np

from . import reports
from .campaigns import (
    backward_campaign,
    chain_campaign,
    dual_pairing_campaign,
    quarter_annulus_campaign,
    exclusivity_campaign,
    lp_campaign,
)
from .cones import DEFAULT_MARGIN, cone_contains
from .convexity import DEFAULT_LAMBDAS, DEFAULT_PAIRS, Sampling, Verdict, characterizing_sets, classify
from .errors import ConecertError, InstanceError
from .generators import generate_quarter_annulus
from .instance import VPInstance, feasible_set, shift_objective
from .io import SCHEMA, digest, dumps, instance_from_dict, instance_to_dict, jsonable, parse_instance, write_instance
from .lagrangian import VectorLagrangianPair, pair_invariants, lagrangian_roundtrip
from .lp import DEFAULT_TOL
from .multipliers import (
    MultiplierCertificate,
    alternative,
    check_nnamcq,
    check_scq,
    scalarize_and_solve,
    necessity_pipeline,
    characterization_check,
    verify_certificate,
)

EXIT_OK, EXIT_REFUTED, EXIT_INCONCLUSIVE, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3, 4

GLOBAL_DEFAULTS = {
    "tol": DEFAULT_TOL,
    "margin": DEFAULT_MARGIN,
    "pairs": DEFAULT_PAIRS,
    "seed": 0,
    "format": "json",
    "lambda_grid": DEFAULT_LAMBDAS,
    "save_report": None,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _lambda_grid(text: str) -> tuple[float, ...]:
    try:
        grid = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated numbers")
    if not grid or not all(0 < v < 1 for v in grid):
        raise argparse.ArgumentTypeError("lambda values must lie in (0, 1)")
    return grid


def _seed_range(text: str) -> tuple[int, int]:
    a, sep, b = text.partition("..")
    try:
        lo, hi = int(a), int(b if sep else a)
    except ValueError:
        raise argparse.ArgumentTypeError("expected a..b")
    if hi < lo:
        raise argparse.ArgumentTypeError("empty seed range")
    return lo, hi


def _common() -> argparse.ArgumentParser:
    p = _Parser(add_help=False, argument_default=argparse.SUPPRESS)
    p.add_argument("--tol", type=float, help="feasibility tolerance (default 1e-9)")
    p.add_argument("--margin", type=float, help="strict-interior margin (default 1e-7)")
    p.add_argument("--pairs", type=int, help="sampled pairs per convexity check (default 10000)")
    p.add_argument("--seed", type=int, help="sampling seed (default 0)")
    p.add_argument("--format", choices=("json", "text"), help="report format (default json)")
    p.add_argument("--lambda-grid", type=_lambda_grid, help="comma-separated lambdas (default 0.25,0.5,0.75)")
    p.add_argument("--save-report", help="also write the JSON report to this file")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="conecert", parents=[common], description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_text, instance=True):
        sp = sub.add_parser(name, parents=[common], help=help_text)
        if instance:
            sp.add_argument("instance", help="instance JSON file")
        return sp

    sp = add("classify", "sampled convexlike / subconvexlike / presubconvexlike checks on f(D)")
    sp.add_argument("--claim", choices=("convexlike", "subconvexlike", "presubconvexlike", "all"), default="all")
    add("feasible", "list the feasible set with witnesses")
    sp = add("certify", "multiplier certificate (at --xbar: the weak-efficiency pipeline)")
    sp.add_argument("--xbar")
    sp.add_argument("--require-xi-nonzero", action="store_true")
    sp = add("cq", "constraint qualifications at --xbar")
    sp.add_argument("--xbar", required=True)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--nnamcq", action="store_true")
    g.add_argument("--scq", action="store_true")
    sp.add_argument("--directions", type=int, default=1000)
    sp = add("scalarize", "minimize <xi, f> over D")
    sp.add_argument("--xi", type=float, nargs="+", required=True)
    sp = add("vector-lagrangian", "rank-one Lagrangian pair and both efficiency directions")
    sp.add_argument("--xbar", required=True)
    sp.add_argument("--mode", choices=("scq", "nnamcq"), default="scq")
    sp.add_argument("--directions", type=int, default=1000)
    sp = add("characterize", "necessity and sufficiency together, gated on sampled SCQ")
    sp.add_argument("--xbar", required=True)
    sp.add_argument("--directions", type=int, default=1000)
    sp = add("example21", "generate the quarter-annulus instance", instance=False)
    sp.add_argument("--radial-step", type=float, default=0.25)
    sp.add_argument("--angular-step", type=float, default=math.pi / 64)
    sp.add_argument("--radius-max", type=float, default=3.0)
    sp.add_argument("-o", "--output", help="write the instance here")
    sp = add("campaign", "seeded acceptance suites", instance=False)
    sp.add_argument("--seeds", type=_seed_range, default=(0, 199))
    sp.add_argument("--family", choices=("general", "chain"), default="chain")
    sp.add_argument("--suite", choices=("exclusivity", "chain", "backward", "lp", "dual-pairing", "example21"))
    sp = add("verify", "re-verify a saved report", instance=False)
    sp.add_argument("--report", required=True)
    return parser


def _sampling(p: dict) -> Sampling:
    return Sampling(pair_count=p["pairs"], lambda_grid=tuple(p["lambda_grid"]), seed=p["seed"],
                    margin=p["margin"], tol=p["tol"])


def _require_label(instance: VPInstance, label: str) -> None:
    if label not in instance.labels:
        raise InstanceError(f"unknown label {label!r}", "--xbar")


def _require_feasible(instance: VPInstance, label: str, tol: float):
    _require_label(instance, label)
    D = feasible_set(instance, tol)
    if label not in D:
        raise InstanceError(f"label {label!r} is not feasible", "--xbar")
    return D


# ---------------------------------------------------------------- commands
# Each returns (status, result, clauses, exit code).

def cmd_classify(instance: VPInstance, p: dict):
    D = feasible_set(instance, p["tol"]).members
    rep = classify(instance.f, instance.cone_y, _sampling(p), labels=D)
    verdicts = rep.verdicts()
    chosen = list(verdicts) if p["claim"] == "all" else [p["claim"]]
    statuses = [verdicts[k].status for k in chosen]
    if not rep.chain_consistent:
        code, status = EXIT_INTERNAL, "inconsistent"
    elif Verdict.NON_CONVEX in statuses:
        code, status = EXIT_REFUTED, "refuted"
    elif Verdict.NO_COUNTEREXAMPLE in statuses:
        code, status = EXIT_INCONCLUSIVE, "no-counterexample-found"
    else:
        code, status = EXIT_OK, "vacuous"
    result = {
        "claim": p["claim"],
        "domain_size": len(D),
        "verdicts": {k: reports.verdict(v) for k, v in verdicts.items()},
        "chain_consistent": rep.chain_consistent,
    }
    clauses = {k: verdicts[k].status is not Verdict.NON_CONVEX for k in chosen}
    return status, result, clauses, code


def cmd_feasible(instance: VPInstance, p: dict):
    D = feasible_set(instance, p["tol"])
    result = {
        "domain": list(D.members),
        "witnesses": {
            x: {"z_index": w.z_index, "z": list(w.z), "w_index": w.w_index} for x, w in D.witnesses.items()
        },
    }
    return ("nonempty" if D.members else "empty"), result, {"domain_nonempty": bool(D.members)}, EXIT_OK


_NECESSITY_EXIT = {
    "certified": EXIT_OK,
    "abnormal-certificate": EXIT_OK,
    "not-weakly-efficient": EXIT_REFUTED,
    "hypothesis-unmet": EXIT_INCONCLUSIVE,
    "inconclusive": EXIT_INCONCLUSIVE,
    "verification-failed": EXIT_INTERNAL,
}


def cmd_certify(instance: VPInstance, p: dict):
    if p.get("xbar") is None:
        rep = alternative(instance, p["require_xi_nonzero"], p["margin"], p["tol"])
        code = {"system-ii": EXIT_OK, "system-i": EXIT_REFUTED, "neither": EXIT_INCONCLUSIVE}.get(
            rep.status, EXIT_INTERNAL)
        clauses = {"exclusivity": not rep.exclusivity_violated}
        return rep.status, reports.alternative(rep), clauses, code
    D = _require_feasible(instance, p["xbar"], p["tol"])
    req = True if p["require_xi_nonzero"] else None
    rep = necessity_pipeline(instance, p["xbar"], _sampling(p), req, D, True, p["tol"], p["margin"])
    clauses = dict(rep.check.clauses) if rep.check is not None else {}
    clauses["weakly_efficient"] = rep.efficiency.weakly_efficient
    return rep.status, reports.necessity(rep), clauses, _NECESSITY_EXIT[rep.status]


def cmd_cq(instance: VPInstance, p: dict):
    D = _require_feasible(instance, p["xbar"], p["tol"])
    if p["nnamcq"]:
        rep = check_nnamcq(instance, D, p["xbar"], p["tol"])
        status = "holds" if rep.holds else "violated"
        return status, {"nnamcq": reports.nnamcq(rep)}, {"nnamcq": rep.holds}, (
            EXIT_OK if rep.holds else EXIT_REFUTED)
    rep = check_scq(instance, D, p["directions"], p["seed"], p["tol"])
    status = "violated" if rep.violated else "no-violation-found"
    return status, {"scq": reports.scq(rep)}, {"scq": not rep.violated}, (
        EXIT_REFUTED if rep.violated else EXIT_INCONCLUSIVE)


def cmd_scalarize(instance: VPInstance, p: dict):
    D = feasible_set(instance, p["tol"]).members
    if len(p["xi"]) != instance.p:
        raise InstanceError(f"--xi needs {instance.p} components", "--xi")
    try:
        rep = scalarize_and_solve(instance, D, p["xi"], p["tol"])
    except ValueError as exc:
        raise InstanceError(str(exc), "--xi") from exc
    return "solved", reports.scalarization(rep), {}, EXIT_OK


def cmd_vector_lagrangian(instance: VPInstance, p: dict):
    _require_feasible(instance, p["xbar"], p["tol"])
    rep = lagrangian_roundtrip(instance, p["xbar"], _sampling(p), p["mode"], p["directions"],
                              True, p["tol"], p["margin"])
    clauses = {"forward": rep.forward != "theorem-violation", "backward": rep.backward != "theorem-violation"}
    if rep.pair is not None:
        inv = pair_invariants(rep.pair, instance.cone_y, instance.cone_z)
        clauses.update({f"invariant_{k}": v <= p["tol"] for k, v in inv.items()})
    if rep.violation:
        code, status = EXIT_INTERNAL, "theorem-violation"
    elif rep.forward == "pass":
        code, status = EXIT_OK, "pass"
    elif rep.forward == "not-applicable":
        code, status = EXIT_REFUTED, "not-weakly-efficient"
    else:
        code, status = EXIT_INCONCLUSIVE, rep.forward
    return status, reports.roundtrip(rep), clauses, code


_CHARACTERIZE_EXIT = {
    "characterized": EXIT_OK,
    "not-weakly-efficient": EXIT_REFUTED,
    "theorem-violation": EXIT_INTERNAL,
    "verification-failed": EXIT_INTERNAL,
}


def cmd_characterize(instance: VPInstance, p: dict):
    _require_feasible(instance, p["xbar"], p["tol"])
    rep = characterization_check(instance, p["xbar"], _sampling(p), p["directions"], p["tol"], p["margin"])
    clauses = {"scq_no_violation_found": not rep.scq.violated}
    if rep.necessity.check is not None:
        clauses.update(rep.necessity.check.clauses)
    if rep.sufficiency is not None:
        clauses["sufficiency"] = not rep.sufficiency.violation
    return rep.status, reports.characterization(rep), clauses, _CHARACTERIZE_EXIT.get(rep.status, EXIT_INCONCLUSIVE)


INSTANCE_COMMANDS: dict[str, Callable] = {
    "classify": cmd_classify,
    "feasible": cmd_feasible,
    "certify": cmd_certify,
    "cq": cmd_cq,
    "scalarize": cmd_scalarize,
    "vector-lagrangian": cmd_vector_lagrangian,
    "characterize": cmd_characterize,
}


def cmd_example21(p: dict):
    try:
        inst = generate_quarter_annulus(p["radial_step"], p["angular_step"], p["radius_max"])
    except ValueError as exc:
        raise InstanceError(str(exc)) from exc
    if p.get("output"):
        write_instance(inst, p["output"])
    result = {
        "labels": len(inst.labels),
        "values_per_label": int(inst.f[inst.labels[0]].shape[0]),
        "truncation": dict(inst.meta),
        "output": p.get("output"),
    }
    return "generated", result, {}, EXIT_OK, inst


def cmd_campaign(p: dict):
    lo, hi = p["seeds"]
    seeds = range(lo, hi + 1)
    suite = p.get("suite") or ("chain" if p["family"] == "chain" else "exclusivity")
    sampling = _sampling({**p, "pairs": min(p["pairs"], 500)})
    if suite == "exclusivity":
        results = {"exclusivity": exclusivity_campaign(seeds, tol=p["tol"], margin=p["margin"])}
    elif suite == "chain":
        results = chain_campaign(seeds, sampling, p["tol"], p["margin"])
    elif suite == "backward":
        results = {"backward": backward_campaign(lo, needed=len(seeds), tol=p["tol"], margin=p["margin"])}
    elif suite == "lp":
        results = {"lp": lp_campaign(seed=lo)}
    elif suite == "dual-pairing":
        results = {"dual_pairing": dual_pairing_campaign(seed=lo, margin=p["margin"])}
    else:
        results = {"example21": quarter_annulus_campaign(p["pairs"], p["lambda_grid"], p["seed"], margin=p["margin"])}
    out = {k: r.to_dict() for k, r in results.items()}
    for r in out.values():
        r.pop("elapsed_s")
    passed = all(r.passed for r in results.values())
    clauses = {k: r.passed for k, r in results.items()}
    return ("pass" if passed else "fail"), {"suite": suite, "results": out}, clauses, (
        EXIT_OK if passed else EXIT_REFUTED)


# ---------------------------------------------------------------- reports

def make_report(command: str, params: dict, instance: VPInstance | None, status: str,
                result: dict, clauses: dict, code: int, elapsed: float) -> dict:
    return jsonable({
        "schema": SCHEMA,
        "command": command,
        "parameters": params,
        "instance": None if instance is None else instance_to_dict(instance),
        "instance_digest": None if instance is None else digest(instance),
        "status": status,
        "result": result,
        "clauses": clauses,
        "exit_code": code,
        "wall_clock_s": elapsed,
    })


def _params(ns: argparse.Namespace) -> dict:
    p = dict(GLOBAL_DEFAULTS)
    p.update(vars(ns))
    p["lambda_grid"] = list(p["lambda_grid"])
    for k in ("instance", "format", "save_report", "report"):
        p.pop(k, None)
    return p


def _normalized(obj):
    return json.loads(json.dumps(jsonable(obj), sort_keys=True))


def execute(command: str, params: dict, instance: VPInstance | None):
    """Run one command on parsed inputs; returns (status, result, clauses, code, instance)."""
    if command in INSTANCE_COMMANDS:
        return (*INSTANCE_COMMANDS[command](instance, params), instance)
    if command == "example21":
        return cmd_example21(params)
    if command == "campaign":
        return (*cmd_campaign(params), None)
    raise UsageError(f"unknown command {command!r}")


def _witness_checks(report: dict, instance: VPInstance | None, params: dict) -> dict[str, bool]:
    """Independent re-checks of the witnesses and certificates embedded in a report."""
    checks: dict[str, bool] = {}
    res = report["result"]
    tol, margin = params["tol"], params["margin"]
    cmd = report["command"]
    if instance is None:
        return checks
    D = feasible_set(instance, tol).members
    if cmd == "classify":
        sets = characterizing_sets(instance.f.image(D), instance.cone_y, _sampling(params))
        for name, v in res["verdicts"].items():
            w = v["witness"]
            if w is not None:
                oracle = sets[name]
                mid = w["lambda"] * np.array(w["p1"]) + (1 - w["lambda"]) * np.array(w["p2"])
                checks[f"{name}_witness"] = (
                    oracle.contains(w["p1"]) and oracle.contains(w["p2"]) and not oracle.contains(mid)
                )
    if cmd == "feasible":
        for x, w in res["witnesses"].items():
            z = instance.g[x][w["z_index"]]
            h = instance.h[x][w["w_index"]]
            checks[f"feasible_{x}"] = bool(
                cone_contains(instance.cone_z, -z, "closed", tol=tol) and np.all(np.abs(h) <= tol)
            )
        checks["domain"] = list(D) == res["domain"]
    nec = res.get("necessity") if cmd in ("characterize", "vector-lagrangian") else (
        res if cmd == "certify" and "efficiency" in res else None)
    if nec and nec.get("certificate"):
        c = nec["certificate"]
        cert = MultiplierCertificate(np.array(c["xi"]), np.array(c["eta"]), np.array(c["zeta"]),
                                     c["normalization"], c["min_slack"], c["xi_nonzero"], c["vacuous"])
        shifted = shift_objective(instance, nec["xbar"], nec["ybar"], tol)
        chk = verify_certificate(instance, D, shifted, cert, nec["xbar"], nec["ybar"], tol)
        checks["certificate"] = chk.clauses == nec["check"]["clauses"]
    if cmd == "certify" and "system_i" in res and res["system_i"] is not None:
        w = res["system_i"]
        checks["system_i_witness"] = bool(
            instance.cone_y.strict_mask(-np.array(w["y"]), margin)[0]
            and cone_contains(instance.cone_z, -np.array(w["z"]), "closed", tol=tol)
            and np.all(np.abs(instance.h[w["x"]][w["zero_index"]]) <= tol)
        )
    if cmd == "vector-lagrangian" and res.get("pair"):
        pr = res["pair"]
        src = None
        if nec and nec.get("certificate"):
            src = cert
        pair = VectorLagrangianPair(np.array(pr["y0"]), np.array(pr["S"]).reshape(instance.p, instance.q),
                                    np.array(pr["T"]).reshape(instance.p, instance.r), src)
        inv = pair_invariants(pair, instance.cone_y, instance.cone_z)
        checks["pair_invariants"] = max(inv.values()) <= tol
    if cmd == "cq" and res.get("nnamcq") and res["nnamcq"]["violating"]:
        v = res["nnamcq"]["violating"]
        eta, zeta = np.array(v["eta"]), np.array(v["zeta"])
        rows_ok = all(
            float((instance.g[x] @ eta).min() + ((instance.h[x] @ zeta).min() if instance.r else 0.0)) >= -tol
            for x in D
        )
        dual_ok = bool(np.all(instance.cone_z.generators @ eta >= -tol))
        nonzero = bool(np.abs(np.concatenate([eta, zeta])).max() > tol)
        checks["nnamcq_violation"] = rows_ok and dual_ok and nonzero
    return checks


def verify_report(report: dict) -> tuple[dict[str, bool], dict]:
    """Re-run the recorded command and re-check every embedded witness."""
    if report.get("schema") != SCHEMA:
        raise InstanceError("not a conecert report", "schema")
    command = report.get("command")
    if command == "verify":
        raise InstanceError("cannot verify a verify report", "command")
    params = dict(report["parameters"])
    params["output"] = None
    instance = instance_from_dict(report["instance"]) if report.get("instance") else None
    if instance is not None and digest(instance) != report.get("instance_digest"):
        return {"digest": False}, {}
    status, result, clauses, code, inst = execute(command, params, instance)
    checks = {
        "status": status == report["status"],
        "result": _normalized(result) == _normalized({**report["result"], **(
            {"output": None} if command == "example21" else {})}),
        "clauses": _normalized(clauses) == _normalized(report["clauses"]),
        "exit_code": code == report["exit_code"],
    }
    if command == "example21":
        checks["instance"] = inst is not None and digest(inst) == report["instance_digest"]
    checks.update(_witness_checks(report, instance, params))
    return checks, {"status": status, "exit_code": code}


# ---------------------------------------------------------------- entry points

def _dispatch(ns: argparse.Namespace) -> tuple[int, dict]:
    t0 = time.perf_counter()
    params = _params(ns)
    command = params.pop("command")
    if command == "verify":
        try:
            report = json.loads(Path(ns.report).read_text())
        except OSError as exc:
            raise InstanceError(f"cannot read {ns.report}: {exc.strerror}", "--report") from exc
        except json.JSONDecodeError as exc:
            raise InstanceError(f"malformed report JSON: {exc.msg}", "--report") from exc
        checks, rerun = verify_report(report)
        ok = all(checks.values())
        code = EXIT_OK if ok else EXIT_REFUTED
        out = make_report("verify", {"report": ns.report}, None, "agrees" if ok else "disagrees",
                          {"checks": checks, "rerun": rerun, "verified_command": report["command"]},
                          checks, code, time.perf_counter() - t0)
        return code, out
    instance = parse_instance(ns.instance) if command in INSTANCE_COMMANDS else None
    status, result, clauses, code, inst = execute(command, params, instance)
    return code, make_report(command, params, inst, status, result, clauses, code, time.perf_counter() - t0)


def run_command(argv: list[str]) -> tuple[int, dict]:
    """Parse ``argv`` and run it; errors propagate as exceptions."""
    return _dispatch(build_parser().parse_args(argv))


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        ns = build_parser().parse_args(argv)
        code, report = _dispatch(ns)
    except UsageError as exc:
        print(f"conecert: usage error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InstanceError as exc:
        where = f" [{exc.field}]" if exc.field else ""
        print(f"conecert: input error{where}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConecertError as exc:
        print(f"conecert: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # last-resort guard: report, do not crash
        print(f"conecert: internal failure: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL
    fmt = getattr(ns, "format", GLOBAL_DEFAULTS["format"])
    sys.stdout.write(reports.render_text(report) if fmt == "text" else dumps(report) + "\n")
    save = getattr(ns, "save_report", None)
    if save:
        Path(save).write_text(dumps(report) + "\n")
    return code
