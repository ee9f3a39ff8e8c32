"""Finitely generated cones: membership, interior points and dual constraints.

A cone is stored by its generators. The facet normals (the H-representation)
are enumerated once at construction: every (dim-1)-subset of generators of
full rank spans a candidate hyperplane, which is kept when all generators lie
on one side of it. Normals are unit length, so ``n . p`` is the Euclidean
distance from ``p`` to that facet's hyperplane; strict membership at margin
``m`` means ``n . p > m`` for every facet.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateConeError, DimensionError
from .lp import DEFAULT_TOL, LinearSystem, Status, solve

DEFAULT_MARGIN = 1e-7

_MAX_FACET_CANDIDATES = 200_000


def as_point(p, dim: int | None = None) -> np.ndarray:
    """Coerce ``p`` to a finite 1-D float array, optionally of length ``dim``."""
    arr = np.asarray(p, dtype=float).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise ValueError("point coordinates must be finite")
    if dim is not None and arr.shape[0] != dim:
        raise DimensionError(f"expected a point of dimension {dim}, got {arr.shape[0]}")
    return arr


def _facet_normals(G: np.ndarray, tol: float) -> np.ndarray:
    m, d = G.shape
    if d == 1:
        return np.array([[1.0 if G[0, 0] > 0 else -1.0]])
    if math.comb(m, d - 1) > _MAX_FACET_CANDIDATES:
        raise DegenerateConeError(
            f"{m} generators in dimension {d} is beyond facet enumeration limits"
        )
    scale = np.linalg.norm(G, axis=1)
    Gu = G / scale[:, None]
    normals: list[np.ndarray] = []
    for idx in itertools.combinations(range(m), d - 1):
        sub = Gu[list(idx)]
        _, s, vt = np.linalg.svd(sub)
        if s[-1] < 1e-10:
            continue
        n = vt[-1]
        side = Gu @ n
        if np.all(side >= -tol):
            pass
        elif np.all(side <= tol):
            n = -n
        else:
            continue
        n = n / np.linalg.norm(n)
        if not any(np.allclose(n, q, atol=1e-9) for q in normals):
            normals.append(n)
    return np.array(normals)


class PolyhedralCone:
    """Pointed, full-dimensional cone ``{sum l_i g_i : l >= 0}``."""

    def __init__(self, generators, *, tol: float = DEFAULT_TOL):
        G = np.array(generators, dtype=float, ndmin=2)
        if G.ndim != 2 or G.shape[0] == 0 or G.shape[1] == 0:
            raise DegenerateConeError("a cone needs at least one generator of positive dimension")
        if not np.all(np.isfinite(G)):
            raise ValueError("generator coordinates must be finite")
        if np.any(np.linalg.norm(G, axis=1) <= tol):
            raise DegenerateConeError("zero generator")
        d = G.shape[1]
        if np.linalg.matrix_rank(G) < d:
            raise DegenerateConeError("empty interior: generators do not span the space")
        # pointed iff some functional is strictly positive on every generator
        probe = LinearSystem.stack(d, ge=(G, np.ones(G.shape[0])))
        if solve(probe, tol).status is Status.INFEASIBLE:
            raise DegenerateConeError("cone is not pointed")
        self._G = G
        self._G.setflags(write=False)
        self._N = _facet_normals(G, tol)
        self._N.setflags(write=False)
        self.tol = tol

    @classmethod
    def orthant(cls, dim: int) -> "PolyhedralCone":
        if dim < 1:
            raise DegenerateConeError("orthant dimension must be positive")
        return cls(np.eye(dim))

    @property
    def dim(self) -> int:
        return self._G.shape[1]

    @property
    def generators(self) -> np.ndarray:
        return self._G

    @property
    def facet_normals(self) -> np.ndarray:
        """Unit inward facet normals; they also generate the dual cone."""
        return self._N

    def strict_mask(self, P: np.ndarray, margin: float = DEFAULT_MARGIN) -> np.ndarray:
        """Vectorized strict-interior test for the rows of ``P``."""
        P = np.asarray(P, dtype=float).reshape(-1, self.dim)
        return np.all(P @ self._N.T > margin, axis=1)

    def closed_mask(self, P: np.ndarray, tol: float | None = None) -> np.ndarray:
        """Vectorized closed-membership test through the facet inequalities."""
        tol = self.tol if tol is None else tol
        P = np.asarray(P, dtype=float).reshape(-1, self.dim)
        return np.all(P @ self._N.T >= -tol, axis=1)

    def to_dict(self) -> dict:
        return {"generators": self._G.tolist()}

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyhedralCone) and np.array_equal(self._G, other._G)

    def __hash__(self) -> int:
        return hash(self._G.tobytes())

    def __repr__(self) -> str:
        return f"PolyhedralCone(dim={self.dim}, generators={self._G.tolist()})"


def cone_contains(
    cone: PolyhedralCone,
    p,
    mode: str = "closed",
    margin: float = DEFAULT_MARGIN,
    tol: float = DEFAULT_TOL,
) -> bool:
    """Membership of ``p`` in the cone (``closed``) or its interior (``strict``).

    Closed mode solves the LP ``p = G^T l, l >= 0``. Strict mode requires a
    distance above ``margin`` from every facet hyperplane.
    """
    p = as_point(p, cone.dim)
    if mode == "closed":
        G = cone.generators
        m = G.shape[0]
        system = LinearSystem.stack(m, ge=(np.eye(m), np.zeros(m)), eq=(G.T, p))
        return solve(system, tol).status is not Status.INFEASIBLE
    if mode in ("strict", "strict-interior"):
        if margin <= 0:
            raise ValueError("strict membership needs a positive margin")
        return bool(cone.strict_mask(p[None, :], margin)[0])
    raise ValueError(f"unknown membership mode {mode!r}")


def interior_point(cone: PolyhedralCone, margin: float = DEFAULT_MARGIN) -> np.ndarray:
    """Sum of the normalized generators, checked to be strictly interior."""
    G = cone.generators
    e = (G / np.linalg.norm(G, axis=1)[:, None]).sum(axis=0)
    if not cone_contains(cone, e, "strict", margin):
        raise DegenerateConeError("empty interior")
    return e


@dataclass(frozen=True, eq=False)
class DualConeConstraints:
    """Rows ``<xi, g> >= 0``, one per generator of the source cone."""

    rows: np.ndarray

    def residuals(self, xi) -> np.ndarray:
        return self.rows @ as_point(xi, self.rows.shape[1])

    def satisfied_by(self, xi, tol: float = DEFAULT_TOL) -> bool:
        return bool(np.all(self.residuals(xi) >= -tol))


def dual_constraints(cone: PolyhedralCone) -> DualConeConstraints:
    return DualConeConstraints(cone.generators)


@dataclass(frozen=True, eq=False)
class ScaledMembership:
    member: bool
    t: float | None = None
    index: int | None = None
    value: np.ndarray | None = None


def scaled_intervals(
    values: np.ndarray, normals: np.ndarray, P: np.ndarray, margin: float
) -> tuple[np.ndarray, np.ndarray]:
    """Open t-intervals ``(lo, hi)`` with ``p - t v`` strictly interior.

    Returns arrays of shape ``(len(P), len(values))``. For facet ``n`` the
    condition is ``t (n.v) < n.p - margin``; intersecting over facets and with
    ``t > 0`` gives the interval. Empty intervals have ``lo >= hi``.
    """
    R = P @ normals.T - margin  # (b, k)
    C = values @ normals.T  # (nv, k)
    Rb = R[:, None, :]
    Cb = C[None, :, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = Rb / Cb
    hi = np.where(Cb > 0, ratio, np.inf).min(axis=2)
    lo = np.maximum(np.where(Cb < 0, ratio, -np.inf).max(axis=2), 0.0)
    blocked = np.any((Cb == 0) & (Rb <= 0), axis=2)
    hi = np.where(blocked, -np.inf, hi)
    return lo, hi


def union_scaled_membership(
    values, cone: PolyhedralCone, p, margin: float = DEFAULT_MARGIN
) -> ScaledMembership:
    """Is ``p`` in the union over ``t > 0`` of ``t * values + int(cone)``?

    The first value (by index) with a nonempty t-interval is the witness; ``t``
    is the interval midpoint, or ``lo + 1`` when the interval is unbounded.
    """
    if margin <= 0:
        raise ValueError("margin must be positive")
    p = as_point(p, cone.dim)
    V = np.asarray(values, dtype=float).reshape(-1, cone.dim)
    lo, hi = scaled_intervals(V, cone.facet_normals, p[None, :], margin)
    ok = np.flatnonzero(lo[0] < hi[0])
    if ok.size == 0:
        return ScaledMembership(False)
    i = int(ok[0])
    a, b = float(lo[0, i]), float(hi[0, i])
    t = a + 1.0 if math.isinf(b) else 0.5 * (a + b)
    return ScaledMembership(True, t, i, V[i].copy())
