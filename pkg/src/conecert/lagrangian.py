"""Rank-one vector Lagrangian multipliers and the induced set-valued problem.

From a scalar certificate ``(xi, eta, zeta)`` with ``xi != 0`` pick
``y0 = e / <xi, e>`` for the canonical interior point ``e`` of ``Y+`` and set
``S = y0 eta^T``, ``T = y0 zeta^T``. Then ``xi o S = eta``, ``xi o T = zeta``
and ``S`` maps ``Z+`` into ``Y+``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cones import DEFAULT_MARGIN, PolyhedralCone, cone_contains, interior_point
from .convexity import Sampling
from .errors import ConecertError
from .instance import VPInstance, dedupe, feasible_set
from .lp import DEFAULT_TOL
from .multipliers import (
    CS_TOL,
    EfficiencyVerdict,
    MultiplierCertificate,
    NecessityReport,
    check_nnamcq,
    check_scq,
    necessity_pipeline,
    weak_efficiency_bruteforce,
    weak_efficiency_scan,
    _check_domain,
)


@dataclass(frozen=True, eq=False)
class VectorLagrangianPair:
    y0: np.ndarray
    S: np.ndarray
    T: np.ndarray
    source: MultiplierCertificate | None = None


def pair_invariants(
    pair: VectorLagrangianPair, cone_y: PolyhedralCone, cone_z: PolyhedralCone | None = None
) -> dict[str, float]:
    """Residuals of the construction identities (all should be ~0)."""
    out: dict[str, float] = {}
    if pair.source is not None:
        xi, eta, zeta = pair.source.xi, pair.source.eta, pair.source.zeta
        out["xi_y0"] = abs(float(xi @ pair.y0) - 1.0)
        out["rank_one_S"] = float(np.max(np.abs(pair.S - np.outer(pair.y0, eta)), initial=0.0))
        out["rank_one_T"] = float(np.max(np.abs(pair.T - np.outer(pair.y0, zeta)), initial=0.0))
        out["xi_S"] = float(np.max(np.abs(xi @ pair.S - eta), initial=0.0))
        out["xi_T"] = float(np.max(np.abs(xi @ pair.T - zeta), initial=0.0))
    out["y0_interior"] = 0.0 if cone_contains(cone_y, pair.y0, "strict") else 1.0
    if cone_z is not None:
        bad = sum(
            not cone_contains(cone_y, pair.S @ gz, "closed") for gz in cone_z.generators
        )
        out["positivity"] = float(bad)
    return out


def construct(
    cert: MultiplierCertificate,
    cone_y: PolyhedralCone,
    cone_z: PolyhedralCone | None = None,
    tol: float = DEFAULT_TOL,
) -> VectorLagrangianPair:
    if not cert.xi_nonzero:
        raise ValueError("construction needs a certificate with xi != 0")
    xi = np.asarray(cert.xi, dtype=float)
    e = interior_point(cone_y)
    s = float(xi @ e)
    if s <= tol:
        raise ConecertError("xi vanishes on interior point")
    y0 = e / s
    pair = VectorLagrangianPair(
        y0, np.outer(y0, cert.eta), np.outer(y0, cert.zeta), cert
    )
    res = pair_invariants(pair, cone_y, cone_z)
    broken = {k: v for k, v in res.items() if v > tol}
    if broken:
        raise ConecertError(f"constructed pair violates its invariants: {broken}")
    return pair


@dataclass(frozen=True, eq=False)
class LagrangianTerms:
    """Every sum ``y + S z + T w`` with its value indices and multiplier part."""

    values: np.ndarray
    indices: np.ndarray
    multiplier_part: np.ndarray


def lagrangian_terms(instance: VPInstance, pair: VectorLagrangianPair, x: str) -> LagrangianTerms:
    F, G, H = instance.f[x], instance.g[x], instance.h[x]
    SG = G @ pair.S.T
    TH = H @ pair.T.T if instance.r else np.zeros((H.shape[0], instance.p))
    iy, iz, iw = np.meshgrid(
        np.arange(F.shape[0]), np.arange(G.shape[0]), np.arange(H.shape[0]), indexing="ij"
    )
    iy, iz, iw = iy.ravel(), iz.ravel(), iw.ravel()
    mult = SG[iz] + TH[iw]
    return LagrangianTerms(F[iy] + mult, np.stack([iy, iz, iw], axis=1), mult)


def lagrangian_map(
    instance: VPInstance, pair: VectorLagrangianPair, x: str, tol: float = DEFAULT_TOL
) -> np.ndarray:
    """``f(x) + S g(x) + T h(x)`` as a deduplicated list (f-major order)."""
    if x not in instance.f:
        raise KeyError(x)
    return dedupe(lagrangian_terms(instance, pair, x).values, tol)


def vpst_weak_efficiency(
    instance: VPInstance,
    domain,
    pair: VectorLagrangianPair,
    xbar: str,
    margin: float = DEFAULT_MARGIN,
    matched: bool = False,
    tol: float = DEFAULT_TOL,
) -> EfficiencyVerdict:
    """Brute-force weak efficiency of ``xbar`` for the Lagrangian problem.

    The comparison set is the union of ``L(x)`` over the domain. Candidates
    are all of ``L(xbar)``; with ``matched`` only compositions
    ``y + S z + T w`` whose multiplier part ``S z + T w`` lies in ``Y+``.
    """
    D = _check_domain(instance, domain)
    if xbar not in D:
        raise ValueError(f"{xbar!r} is not in the domain")
    terms = lagrangian_terms(instance, pair, xbar)
    cand = terms.values
    if matched:
        keep = instance.cone_y.closed_mask(terms.multiplier_part, tol)
        cand = cand[keep]
    comparison = [(x, lagrangian_map(instance, pair, x, tol)) for x in D]
    if cand.shape[0] == 0:
        return EfficiencyVerdict(False, margin=margin)
    return weak_efficiency_scan(cand, comparison, instance.cone_y, margin)


def random_pair(instance: VPInstance, rng: np.random.Generator, terms: int = 2) -> VectorLagrangianPair:
    """A random element of ``B+(Z, Y) x B(W, Y)``.

    ``S`` is a sum of rank-one maps ``y_k eta_k^T`` with ``y_k`` in ``Y+`` and
    ``eta_k`` in the dual of ``Z+``; ``T`` is unconstrained.
    """
    GY, NZ = instance.cone_y.generators, instance.cone_z.facet_normals
    S = np.zeros((instance.p, instance.q))
    for _ in range(terms):
        y = rng.uniform(0.0, 1.0, GY.shape[0]) @ GY
        eta = rng.uniform(0.0, 1.0, NZ.shape[0]) @ NZ
        S += np.outer(y, eta)
    T = rng.normal(size=(instance.p, instance.r))
    return VectorLagrangianPair(np.zeros(instance.p), S, T, None)


@dataclass(frozen=True, eq=False)
class RoundtripReport:
    mode: str
    gate: str
    forward: str
    backward: str
    vp: EfficiencyVerdict
    necessity: NecessityReport | None = None
    pair: VectorLagrangianPair | None = None
    vpst: EfficiencyVerdict | None = None
    vpst_matched: EfficiencyVerdict | None = None

    @property
    def violation(self) -> bool:
        return "theorem-violation" in (self.forward, self.backward)


def lagrangian_roundtrip(
    instance: VPInstance,
    xbar: str,
    sampling: Sampling = Sampling(),
    mode: str = "scq",
    direction_samples: int = 1000,
    check_a1: bool = True,
    tol: float = DEFAULT_TOL,
    margin: float = DEFAULT_MARGIN,
) -> RoundtripReport:
    """Both directions of the vector Lagrangian characterization at ``xbar``.

    Forward: weak efficiency gives a certificate with ``xi != 0``, hence a
    pair, and ``xbar`` must be weakly efficient for the Lagrangian problem.
    Backward (needs no convexity, asserted unconditionally): efficiency for
    the Lagrangian problem with a matched composition gives efficiency.
    The gate (SCQ or NNAMCQ) is recorded but does not suppress either check.
    """
    if mode not in ("scq", "nnamcq"):
        raise ValueError("mode must be 'scq' or 'nnamcq'")
    D = feasible_set(instance, tol).members
    if xbar not in D:
        raise ValueError(f"{xbar!r} is not feasible")
    vp = weak_efficiency_bruteforce(instance, D, xbar, margin)
    if mode == "scq":
        gate = "scq-violated" if check_scq(instance, D, direction_samples, sampling.seed, tol).violated else "scq-no-violation-found"
    else:
        gate = "nnamcq-holds" if check_nnamcq(instance, D, xbar, tol).holds else "nnamcq-fails"
    nec = None
    pair = None
    if vp.weakly_efficient:
        nec = necessity_pipeline(instance, xbar, sampling, True, D, check_a1, tol, margin, CS_TOL)
        if nec.certified:
            pair = construct(nec.certificate, instance.cone_y, instance.cone_z, tol)
            forward = "pass" if vpst_weak_efficiency(instance, D, pair, xbar, margin).weakly_efficient else "theorem-violation"
        elif nec.status == "hypothesis-unmet":
            forward = "hypothesis-unmet"
        else:
            forward = "inconclusive"
    else:
        forward = "not-applicable"
    vpst = vpst_m = None
    if pair is not None:
        vpst = vpst_weak_efficiency(instance, D, pair, xbar, margin)
        vpst_m = vpst_weak_efficiency(instance, D, pair, xbar, margin, matched=True, tol=tol)
        if vpst_m.weakly_efficient:
            backward = "pass" if vp.weakly_efficient else "theorem-violation"
        else:
            backward = "not-applicable"
    else:
        backward = "not-applicable"
    return RoundtripReport(mode, gate, forward, backward, vp, nec, pair, vpst, vpst_m)


def backward_check(
    instance: VPInstance, pair: VectorLagrangianPair, domain=None, margin: float = DEFAULT_MARGIN,
    tol: float = DEFAULT_TOL,
) -> list[tuple[str, bool]]:
    """For every ``xbar`` that is matched-efficient for the Lagrangian problem, the VP verdict."""
    D = feasible_set(instance, tol).members if domain is None else _check_domain(instance, domain)
    out = []
    for x in D:
        if vpst_weak_efficiency(instance, D, pair, x, margin, matched=True, tol=tol).weakly_efficient:
            out.append((x, weak_efficiency_bruteforce(instance, D, x, margin).weakly_efficient))
    return out
