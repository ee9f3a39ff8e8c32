"""Finite set-valued problems: maps over a labelled ground set, cones, feasible set."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .cones import PolyhedralCone, as_point, cone_contains
from .errors import DimensionError, InstanceError
from .lp import DEFAULT_TOL


def _as_value_block(vals, dim: int, label: str) -> np.ndarray:
    arr = np.asarray(vals, dtype=float)
    if dim == 0:
        if arr.size != 0:
            raise InstanceError("values must be empty tuples in dimension 0", label)
        n = max(1, arr.shape[0] if arr.ndim >= 1 else 1)
        return np.zeros((n, 0))
    arr = arr.reshape(-1, dim) if arr.ndim == 1 and arr.size == dim else arr
    if arr.ndim != 2 or arr.shape[1] != dim:
        raise InstanceError(f"values must have dimension {dim}", label)
    if arr.shape[0] == 0:
        raise InstanceError("a label needs at least one value", label)
    if not np.all(np.isfinite(arr)):
        raise InstanceError("values must be finite", label)
    return arr


class SetValuedMap:
    """A map ``label -> finite nonempty list of points`` of a fixed dimension."""

    def __init__(self, dim: int, values: Mapping[str, Sequence]):
        if dim < 0:
            raise InstanceError("dimension must be nonnegative")
        self.dim = int(dim)
        blocks = {}
        for label, vals in values.items():
            arr = _as_value_block(vals, self.dim, str(label))
            arr.setflags(write=False)
            blocks[str(label)] = arr
        self._values = blocks

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self._values)

    def __getitem__(self, label: str) -> np.ndarray:
        return self._values[label]

    def __contains__(self, label: str) -> bool:
        return label in self._values

    def items(self) -> Iterator[tuple[str, np.ndarray]]:
        return iter(self._values.items())

    def image(self, labels: Iterable[str] | None = None, unique: bool = True) -> np.ndarray:
        """``f(D)``: the stacked values over ``labels`` (all labels by default)."""
        labels = self.labels if labels is None else list(labels)
        if not labels:
            return np.zeros((0, self.dim))
        stacked = np.vstack([self._values[x] for x in labels])
        if unique and self.dim > 0:
            _, first = np.unique(stacked, axis=0, return_index=True)
            stacked = stacked[np.sort(first)]
        elif unique:
            stacked = stacked[:1]
        return stacked

    def restrict(self, labels: Iterable[str]) -> "SetValuedMap":
        return SetValuedMap(self.dim, {x: self._values[x] for x in labels})

    def to_lists(self) -> dict[str, list[list[float]]]:
        return {x: v.tolist() for x, v in self._values.items()}

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SetValuedMap)
            and self.dim == other.dim
            and self.labels == other.labels
            and all(np.array_equal(self[x], other[x]) for x in self.labels)
        )

    def __repr__(self) -> str:
        return f"SetValuedMap(dim={self.dim}, labels={len(self._values)})"


@dataclass(frozen=True, eq=False)
class VPInstance:
    """Discretized problem: minimize f over x with g(x) meeting -Z+ and 0 in h(x)."""

    labels: tuple[str, ...]
    f: SetValuedMap
    g: SetValuedMap
    h: SetValuedMap
    cone_y: PolyhedralCone
    cone_z: PolyhedralCone
    meta: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        labels = tuple(str(x) for x in self.labels)
        object.__setattr__(self, "labels", labels)
        if len(set(labels)) != len(labels):
            raise InstanceError("duplicate labels")
        if not labels:
            raise InstanceError("the ground set is empty")
        for name, m in (("f", self.f), ("g", self.g), ("h", self.h)):
            if set(m.labels) != set(labels):
                raise InstanceError(f"map {name} is not defined on exactly the ground set", name)
        if self.f.dim < 1 or self.g.dim < 1:
            raise InstanceError("objective and inequality blocks need dimension >= 1")
        if self.cone_y.dim != self.f.dim:
            raise DimensionError("cone_Y dimension differs from p")
        if self.cone_z.dim != self.g.dim:
            raise DimensionError("cone_Z dimension differs from q")

    @property
    def p(self) -> int:
        return self.f.dim

    @property
    def q(self) -> int:
        return self.g.dim

    @property
    def r(self) -> int:
        return self.h.dim

    @classmethod
    def build(
        cls,
        points: Mapping[str, tuple],
        p: int,
        q: int,
        r: int,
        cone_y: PolyhedralCone | None = None,
        cone_z: PolyhedralCone | None = None,
    ) -> "VPInstance":
        """Convenience constructor from ``{label: (f_values, g_values, h_values)}``.

        ``h_values`` may be omitted (or None) when ``r == 0``.
        """
        fv, gv, hv = {}, {}, {}
        for label, vals in points.items():
            fv[label], gv[label] = vals[0], vals[1]
            hv[label] = vals[2] if len(vals) > 2 and vals[2] is not None else [[]]
        return cls(
            tuple(points),
            SetValuedMap(p, fv),
            SetValuedMap(q, gv),
            SetValuedMap(r, hv),
            cone_y or PolyhedralCone.orthant(p),
            cone_z or PolyhedralCone.orthant(q),
        )

    def with_objective(self, f: SetValuedMap) -> "VPInstance":
        return VPInstance(self.labels, f, self.g, self.h, self.cone_y, self.cone_z, self.meta)


@dataclass(frozen=True)
class FeasibilityWitness:
    z_index: int
    z: tuple[float, ...]
    w_index: int


@dataclass(frozen=True)
class FeasibleSet:
    members: tuple[str, ...]
    witnesses: Mapping[str, FeasibilityWitness] = field(default_factory=dict)

    def __contains__(self, label) -> bool:
        return label in self.members

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)


def domain_labels(domain) -> tuple[str, ...]:
    """Accept a FeasibleSet or any iterable of labels."""
    if isinstance(domain, FeasibleSet):
        return domain.members
    return tuple(domain)


def zero_value_index(values: np.ndarray, tol: float = DEFAULT_TOL) -> int | None:
    """Index of the first value with sup-norm at most ``tol``."""
    if values.shape[1] == 0:
        return 0
    hits = np.flatnonzero(np.max(np.abs(values), axis=1) <= tol)
    return int(hits[0]) if hits.size else None


def feasible_set(instance: VPInstance, tolerance: float = DEFAULT_TOL) -> FeasibleSet:
    members, witnesses = [], {}
    for x in instance.labels:
        w_idx = zero_value_index(instance.h[x], tolerance)
        if w_idx is None:
            continue
        for k, z in enumerate(instance.g[x]):
            if cone_contains(instance.cone_z, -z, "closed", tol=tolerance):
                members.append(x)
                witnesses[x] = FeasibilityWitness(k, tuple(z.tolist()), w_idx)
                break
    return FeasibleSet(tuple(members), witnesses)


def shift_objective(instance: VPInstance, xbar: str, ybar, tol: float = DEFAULT_TOL) -> SetValuedMap:
    """The map ``x -> f(x) - ybar`` for a chosen value ``ybar`` of ``f(xbar)``."""
    if xbar not in instance.f:
        raise InstanceError(f"unknown label {xbar!r}")
    ybar = as_point(ybar, instance.p)
    vals = instance.f[xbar]
    hit = np.flatnonzero(np.max(np.abs(vals - ybar), axis=1) <= tol)
    if hit.size == 0:
        raise InstanceError(f"{ybar.tolist()} is not a value of f({xbar})")
    ybar = vals[hit[0]]
    return SetValuedMap(instance.p, {x: v - ybar for x, v in instance.f.items()})


def shift_objective_by_set(instance: VPInstance, xbar: str, tol: float = DEFAULT_TOL) -> SetValuedMap:
    """Variant shifting by the whole set: ``x -> f(x) - f(xbar)`` (Minkowski difference)."""
    neg = -instance.f[xbar]
    return SetValuedMap(
        instance.p, {x: minkowski_sum(v, neg, tol) for x, v in instance.f.items()}
    )


def dedupe(points: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Drop points within ``tol`` (sup-norm) of an earlier one; order is kept."""
    points = np.asarray(points, dtype=float)
    if points.shape[0] <= 1 or points.shape[1] == 0:
        return points[:1] if points.shape[1] == 0 else points
    keep = []
    for i in range(points.shape[0]):
        if not keep or np.max(np.abs(points[keep] - points[i]), axis=1).min() > tol:
            keep.append(i)
    return points[keep]


def minkowski_sum(A, B, tol: float = DEFAULT_TOL) -> np.ndarray:
    """All pairwise sums ``a + b`` (``a``-major order), deduplicated within ``tol``."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    A = A.reshape(-1, A.shape[-1]) if A.ndim else A.reshape(1, 1)
    B = B.reshape(-1, B.shape[-1]) if B.ndim else B.reshape(1, 1)
    if A.shape[1] != B.shape[1]:
        raise DimensionError(f"cannot add sets of dimension {A.shape[1]} and {B.shape[1]}")
    sums = (A[:, None, :] + B[None, :, :]).reshape(-1, A.shape[1])
    return dedupe(sums, tol)
