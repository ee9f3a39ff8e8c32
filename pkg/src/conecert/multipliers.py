"""Alternative systems, Lagrangian multipliers, constraint qualifications.

All multiplier searches are linear feasibility problems over the product of
value lists: a set inequality ``A >= 0`` holds when every element does, so
``xi(f(x)) + eta(g(x)) + zeta(h(x)) >= 0`` becomes one row per value triple.
Nonzero multipliers are found by trying a complete list of normalizations:
``<xi, e_Y> = 1`` (any nonzero dual element is positive on an interior point),
then ``<eta, e_Z> = 1``, then ``zeta_j = +1`` and ``zeta_j = -1`` for each j.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cones import DEFAULT_MARGIN, as_point, cone_contains, interior_point
from .convexity import ConditionReport, InteriorCondition, Sampling, check_condition_a1, check_condition_a2
from .errors import InstanceError
from .instance import (
    SetValuedMap,
    VPInstance,
    domain_labels,
    feasible_set,
    shift_objective,
    zero_value_index,
)
from .lp import DEFAULT_TOL, LinearSystem, Status, solve

CS_TOL = 1e-7


# ---------------------------------------------------------------- helpers

def _check_domain(instance: VPInstance, domain) -> tuple[str, ...]:
    D = domain_labels(domain)
    unknown = [x for x in D if x not in instance.f]
    if unknown:
        raise InstanceError(f"domain labels outside the instance: {unknown}")
    return D


def _product_rows(*blocks: np.ndarray) -> np.ndarray:
    """Rows ``[a | b | c]`` for every combination of one row from each block."""
    out = blocks[0]
    for blk in blocks[1:]:
        n1, n2 = out.shape[0], blk.shape[0]
        out = np.hstack([np.repeat(out, n2, axis=0), np.tile(blk, (n1, 1))])
    return out


def _unique_rows(R: np.ndarray) -> np.ndarray:
    if R.shape[0] <= 1:
        return R
    _, first = np.unique(R, axis=0, return_index=True)
    return R[np.sort(first)]


def _normalizations(e_y, e_z, p: int, q: int, r: int, include_xi: bool, include_rest: bool):
    """(tag, row) pairs over the variable vector (xi, eta, zeta)."""
    n = p + q + r
    out = []
    if include_xi and p:
        row = np.zeros(n)
        row[:p] = e_y
        out.append(("N1", row))
    if include_rest:
        row = np.zeros(n)
        row[p:p + q] = e_z
        out.append(("N2", row))
        for j in range(r):
            for s in ("+", "-"):
                row = np.zeros(n)
                row[p + q + j] = 1.0
                out.append((f"N3[{j}]{s}", row))
    return out


def _norm_target(tag: str) -> float:
    return -1.0 if tag.endswith("-") else 1.0


def _norm_row(tag: str, instance: VPInstance) -> np.ndarray:
    p, q, r = instance.p, instance.q, instance.r
    e_y, e_z = interior_point(instance.cone_y), interior_point(instance.cone_z)
    for t, row in _normalizations(e_y, e_z, p, q, r, True, True):
        if t == tag:
            return row
    raise ValueError(f"unknown normalization tag {tag!r}")


def _split(v: np.ndarray, p: int, q: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    return v[:p].copy(), v[p:p + q].copy(), v[p + q:].copy()


# ---------------------------------------------------------------- system (i)

@dataclass(frozen=True, eq=False)
class SystemIWitness:
    x: str
    y: np.ndarray
    z: np.ndarray
    zero_index: int


def solve_system_i(
    instance: VPInstance, margin: float = DEFAULT_MARGIN, tol: float = DEFAULT_TOL
) -> SystemIWitness | None:
    """First label with a value in ``-int Y+``, a value in ``-Z+`` and zero in ``h``."""
    for x in instance.labels:
        F = instance.f[x]
        strict = np.flatnonzero(instance.cone_y.strict_mask(-F, margin))
        if strict.size == 0:
            continue
        w_idx = zero_value_index(instance.h[x], tol)
        if w_idx is None:
            continue
        for z in instance.g[x]:
            if cone_contains(instance.cone_z, -z, "closed", tol=tol):
                return SystemIWitness(x, F[strict[0]].copy(), z.copy(), w_idx)
    return None


# ---------------------------------------------------------------- multipliers

@dataclass(frozen=True, eq=False)
class MultiplierCertificate:
    xi: np.ndarray
    eta: np.ndarray
    zeta: np.ndarray
    normalization: str
    min_slack: float | None
    xi_nonzero: bool
    vacuous: bool = False


def system_ii_rows(
    instance: VPInstance, domain, shifted_f: SetValuedMap
) -> np.ndarray:
    """One row ``(y, z, w)`` per value triple over the domain."""
    D = _check_domain(instance, domain)
    blocks = [
        _product_rows(shifted_f[x], instance.g[x], instance.h[x]) for x in D
    ]
    if not blocks:
        return np.zeros((0, instance.p + instance.q + instance.r))
    return _unique_rows(np.vstack(blocks))


def find_multipliers(
    instance: VPInstance,
    domain,
    shifted_f: SetValuedMap | None = None,
    require_xi_nonzero: bool = False,
    tol: float = DEFAULT_TOL,
) -> MultiplierCertificate | None:
    """Nonzero ``(xi, eta, zeta)`` in ``Y+* x Z+* x W*`` with every triple row ``>= 0``.

    Normalizations are tried in priority order N1, N2, N3; with
    ``require_xi_nonzero`` only N1 is tried. Returns None when every
    normalization is infeasible.
    """
    shifted_f = instance.f if shifted_f is None else shifted_f
    p, q, r = instance.p, instance.q, instance.r
    n = p + q + r
    rows = system_ii_rows(instance, domain, shifted_f)
    GY, GZ = instance.cone_y.generators, instance.cone_z.generators
    dual = np.zeros((GY.shape[0] + GZ.shape[0], n))
    dual[:GY.shape[0], :p] = GY
    dual[GY.shape[0]:, p:p + q] = GZ
    A_ge = np.vstack([dual, rows])
    e_y, e_z = interior_point(instance.cone_y), interior_point(instance.cone_z)
    for tag, nrow in _normalizations(e_y, e_z, p, q, r, True, not require_xi_nonzero):
        system = LinearSystem.stack(
            n, ge=(A_ge, np.zeros(A_ge.shape[0])), eq=(nrow[None, :], [_norm_target(tag)])
        )
        out = solve(system, tol)
        if out.status is Status.INFEASIBLE:
            continue
        xi, eta, zeta = _split(out.point, p, q)
        slack = float((rows @ out.point).min()) if rows.shape[0] else None
        return MultiplierCertificate(
            xi, eta, zeta, tag, slack, bool(xi @ e_y > tol), vacuous=rows.shape[0] == 0
        )
    return None


@dataclass(frozen=True, eq=False)
class CertificateCheck:
    clauses: dict[str, bool]
    values: dict[str, float | None]

    @property
    def passed(self) -> bool:
        return all(self.clauses.values())


def verify_certificate(
    instance: VPInstance,
    domain,
    shifted_f: SetValuedMap,
    cert: MultiplierCertificate,
    xbar: str,
    ybar,
    tol: float = DEFAULT_TOL,
    cs_tol: float = CS_TOL,
) -> CertificateCheck:
    """Recompute every clause of a certificate from scratch.

    The Lagrangian bound is checked in its stated ``>=`` form; the gap to the
    equality that holds at a solution is reported as ``equality_gap``.
    """
    D = _check_domain(instance, domain)
    p = instance.p
    xi, eta, zeta = (np.asarray(v, dtype=float) for v in (cert.xi, cert.eta, cert.zeta))
    ybar = as_point(ybar, p)
    v = np.concatenate([xi, eta, zeta])
    rows = system_ii_rows(instance, D, shifted_f)
    dual_xi = float((instance.cone_y.generators @ xi).min())
    dual_eta = float((instance.cone_z.generators @ eta).min())
    min_slack = float((rows @ v).min()) if rows.shape[0] else None
    norm_res = abs(float(_norm_row(cert.normalization, instance) @ v) - _norm_target(cert.normalization))
    cs = float((instance.g[xbar] @ eta).min())
    lagr = None
    if D:
        lagr = min(
            float((instance.f[x] @ xi).min() + (instance.g[x] @ eta).min()
                  + ((instance.h[x] @ zeta).min() if instance.r else 0.0))
            for x in D
        )
    target = float(xi @ ybar)
    clauses = {
        "dual_xi": dual_xi >= -tol,
        "dual_eta": dual_eta >= -tol,
        "system_ii": min_slack is None or min_slack >= -tol,
        "normalization": norm_res <= tol,
        "complementary_slackness": abs(cs) <= cs_tol,
        "lagrangian_bound": lagr is None or lagr >= target - tol,
    }
    values = {
        "dual_xi": dual_xi,
        "dual_eta": dual_eta,
        "min_slack": min_slack,
        "normalization_residual": norm_res,
        "complementary_slackness": cs,
        "lagrangian_min": lagr,
        "xi_dot_ybar": target,
        "equality_gap": None if lagr is None else lagr - target,
    }
    return CertificateCheck(clauses, values)


# ---------------------------------------------------------------- efficiency

@dataclass(frozen=True, eq=False)
class EfficiencyVerdict:
    weakly_efficient: bool
    ybar: np.ndarray | None = None
    ybar_index: int | None = None
    dominator: tuple[str, np.ndarray] | None = None
    efficient_indices: tuple[int, ...] = ()
    dominators: tuple[tuple[int, str, np.ndarray], ...] = ()
    margin: float = DEFAULT_MARGIN


def weak_efficiency_scan(
    candidates: np.ndarray,
    comparison: Sequence[tuple[str, np.ndarray]],
    cone,
    margin: float = DEFAULT_MARGIN,
) -> EfficiencyVerdict:
    """A candidate is weakly efficient when no comparison value ``y`` has ``ybar - y`` strictly interior."""
    if comparison:
        labels = np.concatenate([[i] * vals.shape[0] for i, (_, vals) in enumerate(comparison)]).astype(int)
        V = np.vstack([vals for _, vals in comparison])
    else:
        labels, V = np.zeros(0, dtype=int), np.zeros((0, cone.dim))
    efficient, doms = [], []
    for k, ybar in enumerate(candidates):
        hit = np.flatnonzero(cone.strict_mask(ybar[None, :] - V, margin)) if V.shape[0] else []
        if len(hit) == 0:
            efficient.append(k)
        else:
            j = int(hit[0])
            doms.append((k, comparison[labels[j]][0], V[j].copy()))
    if efficient:
        k = efficient[0]
        return EfficiencyVerdict(True, candidates[k].copy(), k, None, tuple(efficient), tuple(doms), margin)
    first = doms[0]
    return EfficiencyVerdict(False, None, None, (first[1], first[2]), (), tuple(doms), margin)


def weak_efficiency_bruteforce(
    instance: VPInstance, domain, xbar: str, margin: float = DEFAULT_MARGIN
) -> EfficiencyVerdict:
    D = _check_domain(instance, domain)
    if xbar not in D:
        raise ValueError(f"{xbar!r} is not in the domain")
    return weak_efficiency_scan(
        instance.f[xbar], [(x, instance.f[x]) for x in D], instance.cone_y, margin
    )


# ---------------------------------------------------------------- constraint qualifications

@dataclass(frozen=True, eq=False)
class NNAMCQResult:
    holds: bool
    eta: np.ndarray | None = None
    zeta: np.ndarray | None = None
    normalization: str | None = None
    min_combined: float | None = None
    min_eta_at_xbar: float | None = None


def check_nnamcq(
    instance: VPInstance, domain, xbar: str, tol: float = DEFAULT_TOL
) -> NNAMCQResult:
    """Exact check: NNAMCQ holds iff no normalized abnormal pair ``(eta, zeta)`` exists.

    The abnormal system is ``eta in Z+*``, ``<eta, z> + <zeta, w> >= 0`` for
    every value pair over the domain. Its two "min = 0" clauses follow from
    feasibility of ``xbar`` and are recomputed for the record.
    """
    D = _check_domain(instance, domain)
    if xbar not in D:
        raise ValueError(f"{xbar!r} is not in the domain")
    q, r = instance.q, instance.r
    n = q + r
    blocks = [_product_rows(instance.g[x], instance.h[x]) for x in D]
    rows = _unique_rows(np.vstack(blocks))
    GZ = instance.cone_z.generators
    dual = np.hstack([GZ, np.zeros((GZ.shape[0], r))])
    A_ge = np.vstack([dual, rows])
    e_z = interior_point(instance.cone_z)
    for tag, nrow in _normalizations(None, e_z, 0, q, r, False, True):
        system = LinearSystem.stack(
            n, ge=(A_ge, np.zeros(A_ge.shape[0])), eq=(nrow[None, :], [_norm_target(tag)])
        )
        out = solve(system, tol)
        if out.status is Status.INFEASIBLE:
            continue
        eta, zeta = out.point[:q].copy(), out.point[q:].copy()
        combined = min(
            float((instance.g[x] @ eta).min() + ((instance.h[x] @ zeta).min() if r else 0.0))
            for x in D
        )
        return NNAMCQResult(False, eta, zeta, tag, combined, float((instance.g[xbar] @ eta).min()))
    return NNAMCQResult(True)


@dataclass(frozen=True, eq=False)
class SCQReport:
    samples: int
    seed: int
    satisfied: tuple[bool, ...]
    directions: tuple[tuple[np.ndarray, np.ndarray], ...]
    violating: tuple[np.ndarray, np.ndarray] | None
    flags: tuple[str, ...]

    @property
    def violated(self) -> bool:
        return self.violating is not None


def _sample_directions(instance: VPInstance, n: int, rng: np.random.Generator):
    Nz = instance.cone_z.facet_normals
    r = instance.r
    out = []
    for _ in range(n):
        mode = int(rng.integers(0, 3)) if r else 1
        eta = np.zeros(instance.q)
        zeta = np.zeros(r)
        if mode in (0, 1):
            eta = rng.uniform(0.0, 1.0, size=Nz.shape[0]) @ Nz
            eta /= np.linalg.norm(eta)
        if mode in (0, 2):
            zeta = rng.normal(size=r)
            zeta /= np.linalg.norm(zeta)
        out.append((eta, zeta))
    return out


def scq_direction_satisfied(
    instance: VPInstance, D: Sequence[str], eta: np.ndarray, zeta: np.ndarray, tol: float = DEFAULT_TOL
) -> bool:
    """Is there ``x`` in ``D`` and a common negative value ``t`` in ``eta(g(x))`` and ``zeta(h(x))``?

    With no equality block only ``eta(g(x))`` is consulted.
    """
    for x in D:
        a = instance.g[x] @ eta
        if instance.r == 0:
            if np.any(a < -tol):
                return True
            continue
        b = instance.h[x] @ zeta
        close = np.abs(a[:, None] - b[None, :]) <= tol
        if np.any(close & (a[:, None] < -tol)):
            return True
    return False


def check_scq(
    instance: VPInstance,
    domain,
    direction_samples: int = 1000,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
) -> SCQReport:
    """Sampled semidecision of the Slater-type qualification.

    Directions mix ``eta`` from the dual cone with ``zeta`` from the unit
    sphere, including the pure directions ``(eta, 0)`` and ``(0, zeta)``.
    """
    D = _check_domain(instance, domain)
    if not D:
        raise ValueError("the domain is empty")
    rng = np.random.default_rng(seed)
    dirs = _sample_directions(instance, direction_samples, rng)
    sat = tuple(scq_direction_satisfied(instance, D, e, z, tol) for e, z in dirs)
    violating = next((d for d, s in zip(dirs, sat) if not s), None)
    flags = []
    if instance.r and all(np.all(np.abs(instance.h[x]) <= tol) for x in D):
        flags.append("zeta(h(x)) = {0} on the whole domain: no common negative value can exist")
    if instance.r:
        flags.append("directions with eta = 0 or zeta = 0 never admit a common negative value")
    return SCQReport(direction_samples, seed, sat, tuple(dirs), violating, tuple(flags))


# ---------------------------------------------------------------- scalarization

@dataclass(frozen=True, eq=False)
class ScalarizationResult:
    minimum: float
    argmin: tuple[str, ...]
    values: dict[str, float]
    attaining: dict[str, np.ndarray]


def scalarize_and_solve(
    instance: VPInstance, domain, xi, tol: float = DEFAULT_TOL
) -> ScalarizationResult:
    D = _check_domain(instance, domain)
    if not D:
        raise ValueError("the domain is empty")
    xi = as_point(xi, instance.p)
    if np.any(instance.cone_y.generators @ xi < -tol):
        raise ValueError("xi is not in the dual cone of Y+")
    vals, att = {}, {}
    for x in D:
        s = instance.f[x] @ xi
        k = int(np.argmin(s))
        vals[x] = float(s[k])
        att[x] = instance.f[x][k].copy()
    best = min(vals.values())
    argmin = tuple(x for x in D if vals[x] <= best + tol)
    return ScalarizationResult(best, argmin, vals, att)


# ---------------------------------------------------------------- pipelines

@dataclass(frozen=True, eq=False)
class NecessityReport:
    status: str
    xbar: str
    efficiency: EfficiencyVerdict
    ybar: np.ndarray | None = None
    a1: ConditionReport | None = None
    a2: InteriorCondition | None = None
    nnamcq: NNAMCQResult | None = None
    certificate: MultiplierCertificate | None = None
    check: CertificateCheck | None = None

    @property
    def certified(self) -> bool:
        return self.status == "certified"


def necessity_pipeline(
    instance: VPInstance,
    xbar: str,
    sampling: Sampling = Sampling(),
    require_xi_nonzero: bool | None = None,
    domain=None,
    check_a1: bool = True,
    tol: float = DEFAULT_TOL,
    margin: float = DEFAULT_MARGIN,
    cs_tol: float = CS_TOL,
) -> NecessityReport:
    """Weak efficiency by brute force, then look for the promised multipliers.

    ``require_xi_nonzero`` defaults to the outcome of the NNAMCQ check. A
    missing certificate while (a1) has a verified counterexample is reported
    as ``hypothesis-unmet``.
    """
    D = feasible_set(instance, tol).members if domain is None else _check_domain(instance, domain)
    if xbar not in D:
        raise ValueError(f"{xbar!r} is not feasible")
    eff = weak_efficiency_bruteforce(instance, D, xbar, margin)
    if not eff.weakly_efficient:
        return NecessityReport("not-weakly-efficient", xbar, eff)
    nnamcq = check_nnamcq(instance, D, xbar, tol)
    require = nnamcq.holds if require_xi_nonzero is None else require_xi_nonzero
    cert, ybar, shifted = None, None, None
    for k in eff.efficient_indices:
        ybar = instance.f[xbar][k]
        shifted = shift_objective(instance, xbar, ybar, tol)
        cert = find_multipliers(instance, D, shifted, require, tol)
        if cert is not None:
            break
    if cert is None:
        ybar = eff.ybar
        shifted = shift_objective(instance, xbar, ybar, tol)
    a1 = check_condition_a1(instance, xbar, ybar, sampling, D, shifted) if check_a1 else None
    a2 = check_condition_a2(instance)
    if cert is None:
        status = "hypothesis-unmet" if a1 is not None and a1.refuted else "inconclusive"
        return NecessityReport(status, xbar, eff, ybar, a1, a2, nnamcq)
    check = verify_certificate(instance, D, shifted, cert, xbar, ybar, tol, cs_tol)
    if not check.passed:
        status = "verification-failed"
    elif cert.xi_nonzero:
        status = "certified"
    else:
        status = "abnormal-certificate"
    return NecessityReport(status, xbar, eff, ybar, a1, a2, nnamcq, cert, check)


@dataclass(frozen=True, eq=False)
class SufficiencyReport:
    status: str
    nnamcq: NNAMCQResult
    check: CertificateCheck
    efficiency: EfficiencyVerdict

    @property
    def violation(self) -> bool:
        return self.status == "theorem-violation"


def sufficiency_check(
    instance: VPInstance,
    xbar: str,
    cert: MultiplierCertificate,
    ybar,
    domain=None,
    tol: float = DEFAULT_TOL,
    margin: float = DEFAULT_MARGIN,
    cs_tol: float = CS_TOL,
) -> SufficiencyReport:
    """Under NNAMCQ a verified certificate with nonzero xi implies weak efficiency."""
    if not cert.xi_nonzero:
        raise ValueError("sufficiency needs a certificate with xi != 0")
    D = feasible_set(instance, tol).members if domain is None else _check_domain(instance, domain)
    if xbar not in D:
        raise ValueError(f"{xbar!r} is not feasible")
    shifted = shift_objective(instance, xbar, ybar, tol)
    check = verify_certificate(instance, D, shifted, cert, xbar, ybar, tol, cs_tol)
    nnamcq = check_nnamcq(instance, D, xbar, tol)
    eff = weak_efficiency_bruteforce(instance, D, xbar, margin)
    if not nnamcq.holds:
        status = "cq-unmet"
    elif not check.passed:
        status = "certificate-rejected"
    elif eff.weakly_efficient:
        status = "confirmed"
    else:
        status = "theorem-violation"
    return SufficiencyReport(status, nnamcq, check, eff)


@dataclass(frozen=True, eq=False)
class AlternativeReport:
    status: str
    system_i: SystemIWitness | None
    certificate: MultiplierCertificate | None
    domain: tuple[str, ...]

    @property
    def exclusivity_violated(self) -> bool:
        return self.system_i is not None and self.certificate is not None and self.certificate.xi_nonzero


def alternative(
    instance: VPInstance,
    require_xi_nonzero: bool = False,
    margin: float = DEFAULT_MARGIN,
    tol: float = DEFAULT_TOL,
) -> AlternativeReport:
    """Evaluate both systems of the Gordan-type alternative on the unshifted objective."""
    D = feasible_set(instance, tol).members
    wit = solve_system_i(instance, margin, tol)
    cert = find_multipliers(instance, D, instance.f, require_xi_nonzero, tol)
    if wit is not None and cert is not None and cert.xi_nonzero:
        status = "exclusivity-violated"
    elif wit is not None:
        status = "system-i"
    elif cert is not None:
        status = "system-ii"
    else:
        status = "neither"
    return AlternativeReport(status, wit, cert, D)


@dataclass(frozen=True, eq=False)
class CharacterizationReport:
    status: str
    scq: SCQReport
    necessity: NecessityReport
    sufficiency: SufficiencyReport | None


def characterization_check(
    instance: VPInstance,
    xbar: str,
    sampling: Sampling = Sampling(),
    direction_samples: int = 1000,
    tol: float = DEFAULT_TOL,
    margin: float = DEFAULT_MARGIN,
) -> CharacterizationReport:
    """Necessity and sufficiency together, gated on the sampled SCQ."""
    D = feasible_set(instance, tol).members
    scq = check_scq(instance, D, direction_samples, sampling.seed, tol)
    nec = necessity_pipeline(instance, xbar, sampling, None, D, True, tol, margin)
    suff = None
    if nec.certificate is not None and nec.certificate.xi_nonzero:
        suff = sufficiency_check(instance, xbar, nec.certificate, nec.ybar, D, tol, margin)
    if suff is not None and suff.violation:
        status = "theorem-violation"
    elif scq.violated:
        status = "scq-unmet"
    elif nec.status == "not-weakly-efficient":
        status = "not-weakly-efficient"
    elif nec.certified:
        status = "characterized"
    else:
        status = nec.status
    return CharacterizationReport(status, scq, nec, suff)
