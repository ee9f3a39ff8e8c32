"""Sampled convexity checks for the sets characterizing generalized cone-convexity.

A map f is convexlike, subconvexlike or presubconvexlike on D exactly when
``f(D) + Y+``, ``f(D) + int Y+`` or ``U_{t>0} (t f(D) + int Y+)`` is convex.
Each of those sets gets a membership oracle and a member sampler here; a
convexity verdict is a seeded search for two members whose convex
combination falls outside. A failure is a checked witness, a pass is only
``NoCounterexampleFound``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .cones import DEFAULT_MARGIN, PolyhedralCone, scaled_intervals
from .instance import SetValuedMap, VPInstance, domain_labels, feasible_set, shift_objective
from .lp import DEFAULT_TOL

DEFAULT_PAIRS = 10_000
DEFAULT_LAMBDAS = (0.25, 0.5, 0.75)

_CHUNK = 512


class Verdict(str, enum.Enum):
    NON_CONVEX = "NonConvex"
    NO_COUNTEREXAMPLE = "NoCounterexampleFound"
    VACUOUS = "Vacuous"


@dataclass(frozen=True)
class Sampling:
    pair_count: int = DEFAULT_PAIRS
    lambda_grid: tuple[float, ...] = DEFAULT_LAMBDAS
    seed: int = 0
    margin: float = DEFAULT_MARGIN
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if self.pair_count < 1:
            raise ValueError("pair_count must be positive")
        if not all(0.0 < lam < 1.0 for lam in self.lambda_grid):
            raise ValueError("lambda values must lie in (0, 1)")


@dataclass(frozen=True, eq=False)
class ConvexityWitness:
    p1: np.ndarray
    p2: np.ndarray
    lam: float
    midpoint: np.ndarray


@dataclass(frozen=True, eq=False)
class ConvexityVerdict:
    status: Verdict
    witness: ConvexityWitness | None
    pair_count: int
    lambda_grid: tuple[float, ...]
    seed: int
    margin: float
    set_kind: str = ""

    @property
    def refuted(self) -> bool:
        return self.status is Verdict.NON_CONVEX


class SetOracle:
    """A subset of R^d with a vectorized membership test and a member sampler."""

    kind = "set"
    dim: int
    margin: float = DEFAULT_MARGIN

    def contains_many(self, P: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        raise NotImplementedError

    @property
    def empty(self) -> bool:
        return False

    def contains(self, p) -> bool:
        p = _as_rows(p, self.dim)
        return bool(self.contains_many(p)[0])

    def __call__(self, p) -> bool:
        return self.contains(p)


def _interior_offsets(cone: PolyhedralCone, rng: np.random.Generator, n: int) -> np.ndarray:
    """``delta * w`` with delta log-uniform in [1e-3, 1] and w a jittered interior point."""
    G = cone.generators / np.linalg.norm(cone.generators, axis=1)[:, None]
    weights = rng.uniform(0.25, 1.75, size=(n, G.shape[0]))
    delta = 10.0 ** rng.uniform(-3.0, 0.0, size=(n, 1))
    return delta * (weights @ G)


def _as_rows(P, dim: int) -> np.ndarray:
    P = np.asarray(P, dtype=float)
    if dim == 0:
        return P.reshape(P.shape[0] if P.ndim > 1 else 1, 0)
    return P.reshape(-1, dim)


def _chunked(fn, P: np.ndarray) -> np.ndarray:
    if P.shape[0] <= _CHUNK:
        return fn(P)
    return np.concatenate([fn(P[i:i + _CHUNK]) for i in range(0, P.shape[0], _CHUNK)])


class TranslatedCone(SetOracle):
    """``values + cone`` (closed) or ``values + int cone`` (strict, at margin)."""

    def __init__(self, values: np.ndarray, cone: PolyhedralCone, strict: bool,
                 margin: float = DEFAULT_MARGIN, tol: float = DEFAULT_TOL):
        self.values = np.asarray(values, dtype=float).reshape(-1, cone.dim)
        self.cone = cone
        self.strict = strict
        self.margin = margin
        self.tol = tol
        self.dim = cone.dim
        self.kind = "values+int(cone)" if strict else "values+cone"

    @property
    def empty(self) -> bool:
        return self.values.shape[0] == 0

    def _contains(self, P: np.ndarray) -> np.ndarray:
        N = self.cone.facet_normals
        S = (P @ N.T)[:, None, :] - (self.values @ N.T)[None, :, :]
        if self.strict:
            ok = np.all(S > self.margin, axis=2)
        else:
            ok = np.all(S >= -self.tol, axis=2)
        return ok.any(axis=1)

    def contains_many(self, P):
        P = _as_rows(P, self.dim)
        return _chunked(self._contains, P)

    def sample(self, rng, n):
        idx = rng.integers(0, self.values.shape[0], size=n)
        return self.values[idx] + _interior_offsets(self.cone, rng, n)


class ScaledConeUnion(SetOracle):
    """``U_{t>0} (t * values + int cone)`` at margin."""

    kind = "union_t(t*values+int(cone))"

    def __init__(self, values: np.ndarray, cone: PolyhedralCone, margin: float = DEFAULT_MARGIN):
        self.values = np.asarray(values, dtype=float).reshape(-1, cone.dim)
        self.cone = cone
        self.margin = margin
        self.dim = cone.dim

    @property
    def empty(self) -> bool:
        return self.values.shape[0] == 0

    def _contains(self, P):
        lo, hi = scaled_intervals(self.values, self.cone.facet_normals, P, self.margin)
        return np.any(lo < hi, axis=1)

    def contains_many(self, P):
        P = _as_rows(P, self.dim)
        return _chunked(self._contains, P)

    def sample(self, rng, n):
        idx = rng.integers(0, self.values.shape[0], size=n)
        t = 10.0 ** rng.uniform(-2.0, 2.0, size=(n, 1))
        return t * self.values[idx] + _interior_offsets(self.cone, rng, n)


class RayUnion(SetOracle):
    """``U_{t>0} t * values``: open rays through the values (the origin for zero values)."""

    kind = "union_t(t*values)"

    def __init__(self, values: np.ndarray, tol: float = DEFAULT_TOL):
        self.values = np.asarray(values, dtype=float)
        self.tol = tol
        self.dim = self.values.shape[1]

    @property
    def empty(self) -> bool:
        return self.values.shape[0] == 0

    def _contains(self, P):
        V = self.values
        if self.dim == 0:
            return np.ones(P.shape[0], dtype=bool)
        sq = np.einsum("ij,ij->i", V, V)
        nonzero = sq > 0
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (P @ V.T) / np.where(nonzero, sq, 1.0)[None, :]
        resid = np.max(np.abs(P[:, None, :] - t[:, :, None] * V[None, :, :]), axis=2)
        scale = 1.0 + np.max(np.abs(P), axis=1, keepdims=True)
        on_ray = nonzero[None, :] & (t > 0) & (resid <= self.tol * scale)
        at_origin = (~nonzero)[None, :] & (np.max(np.abs(P), axis=1, keepdims=True) <= self.tol)
        return np.any(on_ray | at_origin, axis=1)

    def contains_many(self, P):
        P = _as_rows(P, self.dim)
        return _chunked(self._contains, P)

    def sample(self, rng, n):
        idx = rng.integers(0, self.values.shape[0], size=n)
        t = 10.0 ** rng.uniform(-2.0, 2.0, size=(n, 1))
        return t * self.values[idx]


class FinitePointSet(SetOracle):
    kind = "values"

    def __init__(self, values: np.ndarray, tol: float = DEFAULT_TOL):
        self.values = np.asarray(values, dtype=float)
        self.tol = tol
        self.dim = self.values.shape[1]

    @property
    def empty(self) -> bool:
        return self.values.shape[0] == 0

    def contains_many(self, P):
        P = _as_rows(P, self.dim)
        if self.dim == 0:
            return np.ones(P.shape[0], dtype=bool)
        d = np.max(np.abs(P[:, None, :] - self.values[None, :, :]), axis=2)
        return np.any(d <= self.tol, axis=1)

    def sample(self, rng, n):
        return self.values[rng.integers(0, self.values.shape[0], size=n)]


def probe_pair(oracle: SetOracle, p1, p2, lam: float) -> ConvexityWitness | None:
    """Return a witness if ``p1``, ``p2`` are members and their combination is not."""
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    mid = lam * p1 + (1.0 - lam) * p2
    if oracle.contains(p1) and oracle.contains(p2) and not oracle.contains(mid):
        return ConvexityWitness(p1, p2, lam, mid)
    return None


def check_set_convexity(
    member_oracle: SetOracle | Callable,
    sample_source: Callable[[np.random.Generator, int], np.ndarray] | None = None,
    pair_count: int = DEFAULT_PAIRS,
    lambda_grid: Sequence[float] = DEFAULT_LAMBDAS,
    seed: int = 0,
    margin: float = DEFAULT_MARGIN,
) -> ConvexityVerdict:
    """Seeded search for a convexity counterexample.

    Draws ``2 * pair_count`` members, pairs them consecutively and probes each
    ``lambda`` on the grid. The first failing (pair, lambda) in that order is
    reported; every reported witness has been re-checked through the oracle.
    """
    grid = tuple(float(x) for x in lambda_grid)
    contains_many = getattr(member_oracle, "contains_many", None)
    if contains_many is None:
        contains_many = lambda P: np.array([bool(member_oracle(p)) for p in P])  # noqa: E731
    if sample_source is None:
        sample_source = member_oracle.sample
    kind = getattr(member_oracle, "kind", "")

    def verdict(status, witness=None):
        return ConvexityVerdict(status, witness, pair_count, grid, seed, margin, kind)

    if getattr(member_oracle, "empty", False):
        return verdict(Verdict.VACUOUS)
    rng = np.random.default_rng(seed)
    S = np.asarray(sample_source(rng, 2 * pair_count), dtype=float)
    if S.shape[0] == 0:
        return verdict(Verdict.VACUOUS)
    members = contains_many(S)
    p1, p2 = S[0::2], S[1::2]
    valid = members[0::2] & members[1::2]
    if not valid.any():
        return verdict(Verdict.VACUOUS)
    fails = np.zeros((p1.shape[0], len(grid)), dtype=bool)
    for j, lam in enumerate(grid):
        mids = lam * p1 + (1.0 - lam) * p2
        fails[:, j] = valid & ~contains_many(mids)
    hits = np.argwhere(fails)
    for i, j in hits:
        lam = grid[j]
        mid = lam * p1[i] + (1.0 - lam) * p2[i]
        if (contains_many(p1[i][None])[0] and contains_many(p2[i][None])[0]
                and not contains_many(mid[None])[0]):
            return verdict(Verdict.NON_CONVEX, ConvexityWitness(p1[i].copy(), p2[i].copy(), lam, mid))
    return verdict(Verdict.NO_COUNTEREXAMPLE)


@dataclass(frozen=True, eq=False)
class ClassificationReport:
    convexlike: ConvexityVerdict
    subconvexlike: ConvexityVerdict
    presubconvexlike: ConvexityVerdict
    chain_consistent: bool

    def verdicts(self) -> dict[str, ConvexityVerdict]:
        return {
            "convexlike": self.convexlike,
            "subconvexlike": self.subconvexlike,
            "presubconvexlike": self.presubconvexlike,
        }


def characterizing_sets(values: np.ndarray, cone: PolyhedralCone, sampling: Sampling) -> dict[str, SetOracle]:
    return {
        "convexlike": TranslatedCone(values, cone, strict=False, margin=sampling.margin, tol=sampling.tol),
        "subconvexlike": TranslatedCone(values, cone, strict=True, margin=sampling.margin, tol=sampling.tol),
        "presubconvexlike": ScaledConeUnion(values, cone, margin=sampling.margin),
    }


def _witness_transfers(w: ConvexityWitness | None, oracle: SetOracle) -> bool:
    return w is not None and probe_pair(oracle, w.p1, w.p2, w.lam) is not None


def classify(
    fmap: SetValuedMap,
    cone: PolyhedralCone,
    sampling: Sampling = Sampling(),
    labels: Sequence[str] | None = None,
) -> ClassificationReport:
    """Run the three characterizations over ``f(D)`` (``D`` = ``labels``, default all)."""
    values = fmap.image(labels)
    sets = characterizing_sets(values, cone, sampling)
    out = {
        name: check_set_convexity(oracle, None, sampling.pair_count, sampling.lambda_grid,
                                  sampling.seed, sampling.margin)
        for name, oracle in sets.items()
    }
    # a witness for the stronger set that is also a witness for the weaker
    # one contradicts a "no counterexample" verdict on the weaker set
    consistent = True
    for strong, weak in (("convexlike", "subconvexlike"), ("subconvexlike", "presubconvexlike")):
        if (_witness_transfers(out[strong].witness, sets[weak])
                and out[weak].status is not Verdict.NON_CONVEX):
            consistent = False
    return ClassificationReport(out["convexlike"], out["subconvexlike"], out["presubconvexlike"], consistent)


@dataclass(frozen=True, eq=False)
class ConditionReport:
    """Per-factor verdicts for a product-set convexity condition."""

    name: str
    objective: ConvexityVerdict
    inequality: ConvexityVerdict
    equality: ConvexityVerdict
    note: str = ""

    @property
    def factors(self) -> dict[str, ConvexityVerdict]:
        return {"objective": self.objective, "inequality": self.inequality, "equality": self.equality}

    @property
    def refuted(self) -> bool:
        return any(v.refuted for v in self.factors.values())


def _run(oracle: SetOracle, sampling: Sampling, salt: int) -> ConvexityVerdict:
    return check_set_convexity(oracle, None, sampling.pair_count, sampling.lambda_grid,
                               sampling.seed + salt, sampling.margin)


def _domain(instance: VPInstance, domain) -> tuple[str, ...]:
    if domain is None:
        return feasible_set(instance).members
    return domain_labels(domain)


def check_condition_a1(
    instance: VPInstance,
    xbar: str,
    ybar,
    sampling: Sampling = Sampling(),
    domain=None,
    shifted: SetValuedMap | None = None,
) -> ConditionReport:
    """Convexity of each factor of the product set B for ``(f - ybar, g, h)``.

    B is convex iff every factor is, so a refuted factor refutes the condition.
    ``shifted`` overrides the objective shift (e.g. the full-set variant).
    """
    D = _domain(instance, domain)
    fs = shifted if shifted is not None else shift_objective(instance, xbar, ybar, sampling.tol)
    return ConditionReport(
        "a1",
        _run(ScaledConeUnion(fs.image(D), instance.cone_y, sampling.margin), sampling, 0),
        _run(ScaledConeUnion(instance.g.image(D), instance.cone_z, sampling.margin), sampling, 1),
        _run(RayUnion(instance.h.image(D), sampling.tol), sampling, 2),
    )


def check_condition_b1(
    instance: VPInstance,
    xbar: str,
    ybar,
    sampling: Sampling = Sampling(),
    domain=None,
) -> ConditionReport:
    """The scale-free variant: ``f_s(D) + int Y+``, ``g(D) + int Z+`` and ``h(D)`` itself."""
    D = _domain(instance, domain)
    fs = shift_objective(instance, xbar, ybar, sampling.tol)
    return ConditionReport(
        "b1",
        _run(TranslatedCone(fs.image(D), instance.cone_y, True, sampling.margin, sampling.tol), sampling, 0),
        _run(TranslatedCone(instance.g.image(D), instance.cone_z, True, sampling.margin, sampling.tol), sampling, 1),
        _run(FinitePointSet(instance.h.image(D), sampling.tol), sampling, 2),
    )


@dataclass(frozen=True)
class InteriorCondition:
    holds: bool
    explanation: str


def check_condition_a2(instance: VPInstance) -> InteriorCondition:
    if instance.r == 0:
        return InteriorCondition(True, "no equality block (r = 0); the condition holds vacuously")
    return InteriorCondition(
        False,
        f"h(D) is a finite subset of R^{instance.r} and so has empty interior; in finite "
        "dimensions the separation step does not need this condition, so certification "
        "proceeds without it",
    )
