"""Seeded instance generators: random families and the quarter-annulus example."""

from __future__ import annotations

import math

import numpy as np

from .cones import PolyhedralCone, interior_point
from .errors import InstanceError
from .instance import SetValuedMap, VPInstance

MAX_LABELS = 32
MAX_DIM = 4
MAX_VALUES = 4

FAMILIES = ("general", "chain")
CONE_KINDS = ("orthant", "skewed")


def _fmt(v: float) -> str:
    s = f"{v:.6g}"
    return "0" if s == "-0" else s


def quarter_arc(angular_step: float) -> np.ndarray:
    """Points of the unit circle in the closed first quadrant, angle 0 to pi/2."""
    n = int(math.floor((math.pi / 2) / angular_step + 1e-9))
    theta = [j * angular_step for j in range(n + 1)]
    if math.pi / 2 - theta[-1] > 1e-12:
        theta.append(math.pi / 2)
    arc = np.column_stack([np.cos(theta), np.sin(theta)])
    arc[np.abs(arc) < 1e-15] = 0.0
    return arc


def generate_quarter_annulus(
    radial_step: float = 0.25,
    angular_step: float = math.pi / 64,
    radius_max: float = 3.0,
) -> VPInstance:
    """``f(x) = {x} + quarter arc`` over ``{x >= 0, |x| >= 1}`` cut at ``radius_max``.

    Labels are the grid points of spacing ``radial_step`` in
    ``[0, radius_max]^2`` with ``1 <= |x| <= radius_max``, plus the sampled arc
    points themselves (so the arc boundary of the domain is represented).
    ``g`` is constantly ``-1`` and ``h`` constantly ``0``: every label is feasible.
    """
    if radial_step <= 0 or angular_step <= 0:
        raise ValueError("steps must be positive")
    if radius_max < 1:
        raise ValueError("radius_max must be at least 1")
    arc = quarter_arc(angular_step)
    pts: dict[str, np.ndarray] = {}
    for a in arc:
        pts.setdefault(f"{_fmt(a[0])},{_fmt(a[1])}", a)
    k = int(math.floor(radius_max / radial_step + 1e-9))
    for i in range(k + 1):
        for j in range(k + 1):
            x = np.array([i * radial_step, j * radial_step])
            nrm = float(np.hypot(*x))
            if 1 - 1e-12 <= nrm <= radius_max + 1e-12:
                pts.setdefault(f"{_fmt(x[0])},{_fmt(x[1])}", x)
    if not pts:
        raise InstanceError("the grid is empty")
    labels = tuple(pts)
    f = SetValuedMap(2, {x: np.vstack([pts[x][None, :], arc]) for x in labels})
    g = SetValuedMap(1, {x: [[-1.0]] for x in labels})
    h = SetValuedMap(1, {x: [[0.0]] for x in labels})
    meta = {
        "generator": "example21",
        "radial_step": radial_step,
        "angular_step": angular_step,
        "radius_max": radius_max,
        "truncated": True,
        "arc_points": int(arc.shape[0]),
    }
    return VPInstance(labels, f, g, h, PolyhedralCone.orthant(2), PolyhedralCone.orthant(1), meta)


def make_cone(kind: str, dim: int) -> PolyhedralCone:
    """``orthant``, or ``skewed``: generators ``e_i + 0.5 e_{i+1}`` (cyclic, dim >= 2)."""
    if kind == "orthant" or dim == 1:
        return PolyhedralCone.orthant(dim)
    if kind == "skewed":
        G = np.eye(dim)
        for i in range(dim):
            G[i, (i + 1) % dim] += 0.5
        return PolyhedralCone(G)
    raise ValueError(f"unknown cone kind {kind!r}")


def _check_params(n_labels, p, q, r, values_per_map, family, cone_kind):
    if not 1 <= n_labels <= MAX_LABELS:
        raise ValueError(f"n_labels must be in [1, {MAX_LABELS}]")
    if not (1 <= p <= MAX_DIM and 1 <= q <= MAX_DIM and 0 <= r <= MAX_DIM):
        raise ValueError(f"dimensions must satisfy 1 <= p, q <= {MAX_DIM} and 0 <= r <= {MAX_DIM}")
    if not 1 <= values_per_map <= MAX_VALUES:
        raise ValueError(f"values_per_map must be in [1, {MAX_VALUES}]")
    if family not in FAMILIES:
        raise ValueError(f"family must be one of {FAMILIES}")
    if cone_kind not in CONE_KINDS:
        raise ValueError(f"cone_kind must be one of {CONE_KINDS}")


def _chain(rng: np.random.Generator, cone: PolyhedralCone, n: int) -> np.ndarray:
    """``n`` points, each the previous plus a nonnegative generator combination."""
    G = cone.generators
    w = rng.uniform(0.0, 1.0, size=(n, G.shape[0])) * (rng.random((n, G.shape[0])) < 0.7)
    steps = w @ G
    steps[0] = rng.uniform(-2.0, 0.0, size=G.shape[1])
    return np.cumsum(steps, axis=0)


def generate_random_instance(
    seed: int,
    n_labels: int = 8,
    p: int = 2,
    q: int = 1,
    r: int = 1,
    values_per_map: int = 2,
    family: str = "general",
    cone_kind: str = "orthant",
) -> VPInstance:
    """Deterministic random instance.

    ``general``: values uniform in ``[-2, 2]``; when ``r > 0`` each label gets
    a zero equality value with probability 3/4 (otherwise the feasible set is
    almost surely empty). ``chain``: the objective values of all labels form
    one chain of the cone order, ``g`` is single-valued along a chain with the
    designated label (and its predecessors) feasible, ``h`` is ``{0}``.
    """
    _check_params(n_labels, p, q, r, values_per_map, family, cone_kind)
    rng = np.random.default_rng([seed, n_labels, p, q, r, values_per_map, FAMILIES.index(family)])
    cy, cz = make_cone(cone_kind, p), make_cone(cone_kind, q)
    labels = tuple(f"x{i}" for i in range(n_labels))
    k = values_per_map
    if family == "general":
        fv = rng.uniform(-2, 2, size=(n_labels, k, p))
        gv = rng.uniform(-2, 2, size=(n_labels, k, q))
        hv = rng.uniform(-2, 2, size=(n_labels, k, r))
        if r:
            plant = rng.random(n_labels) < 0.75
            hv[plant, 0, :] = 0.0
    else:
        chain = _chain(rng, cy, n_labels * k)
        fv = chain[rng.permutation(n_labels * k)].reshape(n_labels, k, p)
        gchain = _chain(rng, cz, n_labels)
        order = rng.permutation(n_labels)
        designated = int(rng.integers(n_labels))
        s = rng.uniform(0.1, 1.0)
        gchain = gchain - gchain[designated] - s * interior_point(cz)
        gv = gchain[order].reshape(n_labels, 1, q)
        hv = np.zeros((n_labels, 1, r))
    meta = {
        "generator": "random",
        "seed": seed,
        "family": family,
        "cone_kind": cone_kind,
        "n_labels": n_labels,
        "values_per_map": values_per_map,
    }
    return VPInstance(
        labels,
        SetValuedMap(p, dict(zip(labels, fv))),
        SetValuedMap(q, dict(zip(labels, gv))),
        SetValuedMap(r, dict(zip(labels, hv))),
        cy,
        cz,
        meta,
    )
