"""Seeded campaigns that exercise the theorems end to end.

Every campaign returns a :class:`CampaignResult` with counts and the list of
failing seeds; a campaign passes when that list is empty and the required
number of cases was reached.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

import numpy as np

from .cones import DEFAULT_MARGIN, PolyhedralCone
from .convexity import DEFAULT_LAMBDAS, Sampling, ScaledConeUnion, TranslatedCone, Verdict, classify
from .generators import generate_quarter_annulus, generate_random_instance, make_cone
from .instance import feasible_set, shift_objective
from .lagrangian import VectorLagrangianPair, backward_check, construct, pair_invariants, random_pair, vpst_weak_efficiency
from .lp import DEFAULT_TOL, LinearSystem, Relation, Status, solve, verify_farkas
from .multipliers import (
    alternative,
    check_nnamcq,
    find_multipliers,
    scalarize_and_solve,
    necessity_pipeline,
    sufficiency_check,
    verify_certificate,
    weak_efficiency_bruteforce,
)


@dataclass
class CampaignResult:
    name: str
    cases: int
    required: int = 0
    counts: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures and self.cases >= self.required

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "cases": self.cases,
            "required": self.required,
            "counts": self.counts,
            "failures": self.failures,
            "elapsed_s": self.elapsed,
        }


def _bump(counts: dict, key: str, by: int = 1) -> None:
    counts[key] = counts.get(key, 0) + by


# ---------------------------------------------------------------- quarter annulus

def quarter_annulus_campaign(
    pairs: int = 10_000,
    lambda_grid=DEFAULT_LAMBDAS,
    seed: int = 0,
    point_checks: int = 1000,
    margin: float = DEFAULT_MARGIN,
) -> CampaignResult:
    """Classify the quarter-annulus map and check the union-set identity by sampling."""
    t0 = time.perf_counter()
    inst = generate_quarter_annulus()
    sampling = Sampling(pair_count=pairs, lambda_grid=tuple(lambda_grid), seed=seed, margin=margin)
    rep = classify(inst.f, inst.cone_y, sampling)
    res = CampaignResult("example21", 1, 1)
    values = inst.f.image()
    sets = {
        "convexlike": TranslatedCone(values, inst.cone_y, False, margin),
        "subconvexlike": TranslatedCone(values, inst.cone_y, True, margin),
        "presubconvexlike": ScaledConeUnion(values, inst.cone_y, margin),
    }
    expected = {
        "convexlike": Verdict.NON_CONVEX,
        "subconvexlike": Verdict.NON_CONVEX,
        "presubconvexlike": Verdict.NO_COUNTEREXAMPLE,
    }
    for name, v in rep.verdicts().items():
        res.counts[f"{name}_verdict"] = v.status.value
        if v.status is not expected[name]:
            res.failures.append({"check": name, "status": v.status.value})
        if v.witness is not None:
            w = v.witness
            ok = sets[name].contains(w.p1) and sets[name].contains(w.p2) and not sets[name].contains(w.midpoint)
            res.counts[f"{name}_witness_verified"] = bool(ok)
            if not ok:
                res.failures.append({"check": f"{name}_witness"})
    res.counts["pairs"] = pairs
    res.counts["lambda_grid"] = list(lambda_grid)
    rng = np.random.default_rng(seed + 1)
    union = sets["presubconvexlike"]
    members = union.sample(rng, point_checks)
    inside = inst.cone_y.strict_mask(members, margin)
    res.counts["union_samples_strict_interior"] = int(inside.sum())
    if not inside.all():
        res.failures.append({"check": "union_subset_interior", "misses": int((~inside).sum())})
    interior = 10.0 ** rng.uniform(-3.0, 0.5, size=(point_checks, 2))
    interior = interior[inst.cone_y.strict_mask(interior, margin)]
    covered = union.contains_many(interior)
    res.counts["interior_samples"] = int(interior.shape[0])
    res.counts["interior_samples_in_union"] = int(covered.sum())
    if interior.shape[0] < point_checks or not covered.all():
        res.failures.append({"check": "interior_subset_union", "misses": int((~covered).sum())})
    res.counts["labels"] = len(inst.labels)
    res.elapsed = time.perf_counter() - t0
    return res


# ---------------------------------------------------------------- exclusivity

def exclusivity_campaign(
    seeds, n_labels: int = 8, p: int = 2, q: int = 1, r: int = 1, values_per_map: int = 2,
    tol: float = DEFAULT_TOL, margin: float = DEFAULT_MARGIN,
) -> CampaignResult:
    """A certificate with ``xi != 0`` on the unshifted objective rules out system (i)."""
    t0 = time.perf_counter()
    seeds = list(seeds)
    res = CampaignResult("exclusivity", len(seeds), len(seeds))
    for seed in seeds:
        inst = generate_random_instance(
            seed, n_labels, p, q, r, values_per_map, "general", ("orthant", "skewed")[seed % 2]
        )
        rep = alternative(inst, require_xi_nonzero=True, margin=margin, tol=tol)
        _bump(res.counts, rep.status)
        if rep.exclusivity_violated:
            res.failures.append({"seed": seed, "label": rep.system_i.x})
    res.elapsed = time.perf_counter() - t0
    return res


# ---------------------------------------------------------------- chain family

def chain_params(seed: int) -> dict:
    """Instance sizes for the chain campaign, drawn from the seed."""
    rng = np.random.default_rng([seed, 7])
    return {
        "n_labels": int(rng.integers(3, 13)),
        "p": int(rng.integers(1, 4)),
        "q": int(rng.integers(1, 3)),
        "r": int(seed % 2),
        "values_per_map": int(rng.integers(1, 4)),
        "family": "chain",
        "cone_kind": ("orthant", "skewed")[(seed // 2) % 2],
    }


def chain_campaign(
    seeds,
    sampling: Sampling = Sampling(pair_count=500),
    tol: float = DEFAULT_TOL,
    margin: float = DEFAULT_MARGIN,
) -> dict[str, CampaignResult]:
    """Necessity, sufficiency, scalarization and the Lagrangian construction on chain instances.

    For each seed ``xbar`` is the first weakly efficient feasible label. The
    sufficiency check runs over every feasible ``(x, y)`` pair for which an
    N1 certificate verifies, so non-efficient candidates are exercised too.
    """
    seeds = list(seeds)
    t0 = time.perf_counter()
    nec = CampaignResult("necessity", 0, len(seeds))
    suf = CampaignResult("sufficiency", 0, 1)
    sca = CampaignResult("scalarization", 0, 0)
    lag = CampaignResult("lagrangian", 0, 0)
    for seed in seeds:
        inst = generate_random_instance(seed, **chain_params(seed))
        D = feasible_set(inst, tol).members
        xbar = next((x for x in D if weak_efficiency_bruteforce(inst, D, x, margin).weakly_efficient), None)
        if xbar is None:
            nec.failures.append({"seed": seed, "reason": "no weakly efficient label"})
            continue
        nec.cases += 1
        report = necessity_pipeline(inst, xbar, sampling, True, D, True, tol, margin)
        _bump(nec.counts, report.status)
        if not report.certified:
            nec.failures.append({"seed": seed, "xbar": xbar, "status": report.status})
            continue
        cert = report.certificate
        _bump(nec.counts, f"normalization_{cert.normalization}")
        if cert.normalization != "N1" or not report.check.passed:
            nec.failures.append({"seed": seed, "xbar": xbar, "normalization": cert.normalization,
                                 "clauses": report.check.clauses})
        nec.counts["max_abs_cs"] = max(nec.counts.get("max_abs_cs", 0.0),
                                       abs(report.check.values["complementary_slackness"]))
        sca.cases += 1
        argmin = scalarize_and_solve(inst, D, cert.xi, tol).argmin
        if xbar not in argmin:
            sca.failures.append({"seed": seed, "xbar": xbar, "argmin": list(argmin)})
        lag.cases += 1
        try:
            pair = construct(cert, inst.cone_y, inst.cone_z, tol)
        except Exception as exc:  # invariant failure is a campaign failure
            lag.failures.append({"seed": seed, "error": str(exc)})
            continue
        inv = pair_invariants(pair, inst.cone_y, inst.cone_z)
        if max(inv.values()) > tol:
            lag.failures.append({"seed": seed, "invariants": inv})
        if not vpst_weak_efficiency(inst, D, pair, xbar, margin).weakly_efficient:
            lag.failures.append({"seed": seed, "xbar": xbar, "reason": "not efficient for the Lagrangian problem"})
        # sufficiency over every feasible candidate
        nn = {x: check_nnamcq(inst, D, x, tol).holds for x in D}
        _bump(suf.counts, "nnamcq_holds_instances", int(any(nn.values())))
        for x in D:
            if not nn[x]:
                continue
            for y in inst.f[x]:
                shifted = shift_objective(inst, x, y, tol)
                c = find_multipliers(inst, D, shifted, True, tol)
                if c is None:
                    continue
                if not verify_certificate(inst, D, shifted, c, x, y, tol).passed:
                    _bump(suf.counts, "rejected_certificates")
                    continue
                suf.cases += 1
                out = sufficiency_check(inst, x, c, y, D, tol, margin)
                _bump(suf.counts, out.status)
                if out.status != "confirmed":
                    suf.failures.append({"seed": seed, "x": x, "y": y.tolist(), "status": out.status})
    elapsed = time.perf_counter() - t0
    for r in (nec, suf, sca, lag):
        r.elapsed = elapsed
    sca.required = lag.required = nec.cases
    return {"necessity": nec, "sufficiency": suf, "scalarization": sca, "lagrangian": lag}


# ---------------------------------------------------------------- backward direction

def backward_campaign(
    start: int = 0, needed: int = 200, max_draws: int = 5000,
    tol: float = DEFAULT_TOL, margin: float = DEFAULT_MARGIN,
) -> CampaignResult:
    """Matched-efficiency for the Lagrangian problem implies efficiency, on seeded draws.

    Pairs cycle through three sources: the rank-one construction from an N1
    certificate, ``S = 0`` with random ``T``, and a random element of
    ``B+(Z, Y) x B(W, Y)``. A draw counts when at least one feasible label is
    matched-efficient for its Lagrangian problem.
    """
    t0 = time.perf_counter()
    res = CampaignResult("backward", 0, needed)
    for seed in range(start, start + max_draws):
        if res.cases >= needed:
            break
        family = "chain" if seed % 2 else "general"
        inst = generate_random_instance(seed, 6, 2, 1, (seed // 2) % 2, 2, family)
        D = feasible_set(inst, tol).members
        if not D:
            continue
        rng = np.random.default_rng([seed, 11])
        kind = ("constructed", "zero-S", "random")[seed % 3]
        if kind == "constructed":
            pair = None
            for x in D:
                eff = weak_efficiency_bruteforce(inst, D, x, margin)
                if not eff.weakly_efficient:
                    continue
                cert = find_multipliers(inst, D, shift_objective(inst, x, eff.ybar, tol), True, tol)
                if cert is not None:
                    pair = construct(cert, inst.cone_y, inst.cone_z, tol)
                    break
            if pair is None:
                continue
        else:
            pair = random_pair(inst, rng)
            if kind == "zero-S":
                pair = VectorLagrangianPair(pair.y0, np.zeros_like(pair.S), pair.T)
        _bump(res.counts, f"draws_{kind}")
        checked = backward_check(inst, pair, D, margin, tol)
        if not checked:
            continue
        res.cases += 1
        _bump(res.counts, f"hits_{kind}")
        for x, ok in checked:
            if not ok:
                res.failures.append({"seed": seed, "kind": kind, "xbar": x})
    res.elapsed = time.perf_counter() - t0
    return res


# ---------------------------------------------------------------- LP engine

def random_lp(rng: np.random.Generator) -> LinearSystem:
    n = int(rng.integers(1, 7))
    m = int(rng.integers(1, 9))
    A = rng.integers(-4, 5, size=(m, n)).astype(float)
    if rng.random() < 0.5:
        A += rng.normal(scale=0.1, size=A.shape)
    b = rng.integers(-5, 6, size=m).astype(float)
    rel = [Relation.EQ if rng.random() < 0.25 else Relation.GE for _ in range(m)]
    obj = rng.normal(size=n) if rng.random() < 0.5 else None
    return LinearSystem(A, b, tuple(rel), obj, "maximize" if rng.random() < 0.5 else "minimize")


def _vertex_oracle(A: np.ndarray, b: np.ndarray, eq: np.ndarray, tol: float = 1e-7) -> bool:
    """Feasibility of a bounded 2-D system by trying every pairwise line intersection."""
    def ok(x):
        r = A @ x - b
        return np.all(r[~eq] >= -tol) and np.all(np.abs(r[eq]) <= tol)

    for i, j in itertools.combinations(range(A.shape[0]), 2):
        M = A[[i, j]]
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        if ok(np.linalg.solve(M, b[[i, j]])):
            return True
    return False


def lp_campaign(n_random: int = 1000, n_planar: int = 500, seed: int = 0, tol: float = DEFAULT_TOL) -> CampaignResult:
    """Feasible points substitute back, Farkas vectors verify, planar statuses match vertex enumeration."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    res = CampaignResult("lp", 0, n_random + n_planar)
    for i in range(n_random):
        system = random_lp(rng)
        out = solve(system, tol)
        _bump(res.counts, out.status.value)
        res.cases += 1
        if out.status is Status.INFEASIBLE:
            if not verify_farkas(system, out.farkas, 1e-7):
                res.failures.append({"case": i, "reason": "farkas"})
        elif system.violation(out.point) > 1e-7:
            res.failures.append({"case": i, "reason": "substitution", "violation": system.violation(out.point)})
    box = np.vstack([np.eye(2), -np.eye(2)])
    for i in range(n_planar):
        m = int(rng.integers(1, 6))
        A = rng.integers(-5, 6, size=(m, 2)).astype(float)
        b = rng.integers(-10, 11, size=m).astype(float)
        eq = rng.random(m) < 0.2
        A_all = np.vstack([A, box])
        b_all = np.concatenate([b, -100.0 * np.ones(4)])
        eq_all = np.concatenate([eq, np.zeros(4, dtype=bool)])
        rel = tuple(Relation.EQ if e else Relation.GE for e in eq_all)
        out = solve(LinearSystem(A_all, b_all, rel), tol)
        expect = _vertex_oracle(A_all, b_all, eq_all)
        res.cases += 1
        _bump(res.counts, f"planar_{'feasible' if expect else 'infeasible'}")
        if (out.status is not Status.INFEASIBLE) != expect:
            res.failures.append({"planar_case": i, "lp": out.status.value, "oracle": expect})
    res.elapsed = time.perf_counter() - t0
    return res


# ---------------------------------------------------------------- dual pairing

def pairing_cones() -> list[PolyhedralCone]:
    cones = [make_cone(kind, d) for kind in ("orthant", "skewed") for d in range(1, 5)]
    cones.append(PolyhedralCone([[1.0, 0.0], [1.0, 1.0]]))
    cones.append(PolyhedralCone([[1.0, 0.2, 0.0], [0.0, 1.0, 0.3], [0.4, 0.0, 1.0], [1.0, 1.0, 1.0]]))
    return cones


def dual_pairing_campaign(
    n: int = 1_000_000, seed: int = 0, margin: float = DEFAULT_MARGIN, chunk: int = 100_000
) -> CampaignResult:
    """A nonzero dual element is positive on every strictly interior point."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    cones = pairing_cones()
    res = CampaignResult("dual_pairing", 0, n)
    done = 0
    while done < n:
        m = min(chunk, n - done)
        cone = cones[(done // chunk) % len(cones)]
        N, G = cone.facet_normals, cone.generators
        w = rng.uniform(0, 1, size=(m, N.shape[0])) * (rng.random((m, N.shape[0])) < 0.6)
        empty = ~w.any(axis=1)
        w[empty, rng.integers(0, N.shape[0], size=int(empty.sum()))] = 1.0
        xi = w @ N
        y = (10.0 ** rng.uniform(-6, 1, size=(m, G.shape[0]))) @ G
        y = np.where(rng.random((m, 1)) < 0.5, y, y + rng.normal(scale=0.5, size=y.shape))
        keep = cone.strict_mask(y, margin)
        vals = np.einsum("ij,ij->i", xi[keep], y[keep])
        bad = np.flatnonzero(vals <= 0)
        res.cases += int(keep.sum())
        _bump(res.counts, "rejected_non_interior", int((~keep).sum()))
        for k in bad[:10]:
            res.failures.append({"cone": cone.generators.tolist(), "xi": xi[keep][k].tolist(), "y": y[keep][k].tolist()})
        done += int(keep.sum())
    res.elapsed = time.perf_counter() - t0
    return res
