"""Dense two-phase simplex with Farkas infeasibility certificates.

Variables are free. Rows are ``a . x >= b`` or ``a . x = b``. The engine is a
plain tableau implementation with Bland's rule (lowest index enters, lowest
basic index leaves on ratio ties), so results are deterministic and cycling
cannot occur. Sizes here are tiny (tens of variables, a few hundred rows).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

DEFAULT_TOL = 1e-9
MARGIN_CAP = 1e6

_COST_EPS = 1e-11
_PIVOT_EPS = 1e-11
_MAX_PIVOTS = 100_000


class Relation(str, enum.Enum):
    GE = ">="
    EQ = "="


class Status(str, enum.Enum):
    FEASIBLE = "Feasible"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


@dataclass(frozen=True, eq=False)
class LinearSystem:
    """Rows ``A[i] . x (>= | =) b[i]`` with an optional linear objective."""

    A: np.ndarray
    b: np.ndarray
    relations: tuple[Relation, ...]
    objective: np.ndarray | None = None
    sense: str = "maximize"

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        b = np.asarray(self.b, dtype=float).reshape(-1)
        if A.ndim != 2:
            raise ValueError("A must be two-dimensional")
        if A.shape[0] != b.shape[0] or len(self.relations) != b.shape[0]:
            raise ValueError("A, b and relations disagree on the row count")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise ValueError("coefficients and right-hand sides must be finite")
        rel = tuple(Relation(r) for r in self.relations)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "relations", rel)
        if self.objective is not None:
            c = np.asarray(self.objective, dtype=float).reshape(-1)
            if c.shape[0] != A.shape[1]:
                raise ValueError("objective length differs from num_vars")
            object.__setattr__(self, "objective", c)
        if self.sense not in ("maximize", "minimize"):
            raise ValueError(f"unknown sense {self.sense!r}")

    @property
    def num_vars(self) -> int:
        return self.A.shape[1]

    @property
    def num_rows(self) -> int:
        return self.A.shape[0]

    @property
    def eq_mask(self) -> np.ndarray:
        return np.array([r is Relation.EQ for r in self.relations], dtype=bool)

    @classmethod
    def from_rows(
        cls,
        num_vars: int,
        rows: Iterable[tuple[Sequence[float], str, float]],
        objective: Sequence[float] | None = None,
        sense: str = "maximize",
    ) -> "LinearSystem":
        rows = list(rows)
        A = np.array([r[0] for r in rows], dtype=float).reshape(len(rows), num_vars)
        b = np.array([r[2] for r in rows], dtype=float)
        return cls(A, b, tuple(r[1] for r in rows), objective, sense)

    @classmethod
    def stack(
        cls,
        num_vars: int,
        ge: tuple[np.ndarray, np.ndarray] | None = None,
        eq: tuple[np.ndarray, np.ndarray] | None = None,
        objective: Sequence[float] | None = None,
        sense: str = "maximize",
    ) -> "LinearSystem":
        """Build from a block of ``>=`` rows followed by a block of ``=`` rows."""
        blocks_A, blocks_b, rel = [], [], []
        for block, r in ((ge, Relation.GE), (eq, Relation.EQ)):
            if block is None:
                continue
            A_blk = np.asarray(block[0], dtype=float).reshape(-1, num_vars)
            b_blk = np.asarray(block[1], dtype=float).reshape(-1)
            blocks_A.append(A_blk)
            blocks_b.append(b_blk)
            rel.extend([r] * A_blk.shape[0])
        A = np.vstack(blocks_A) if blocks_A else np.zeros((0, num_vars))
        b = np.concatenate(blocks_b) if blocks_b else np.zeros(0)
        return cls(A, b, tuple(rel), objective, sense)

    def violation(self, x: np.ndarray) -> float:
        """Largest constraint violation of ``x`` (0 when every row holds)."""
        if self.num_rows == 0:
            return 0.0
        r = self.A @ np.asarray(x, dtype=float) - self.b
        viol = np.where(self.eq_mask, np.abs(r), np.maximum(-r, 0.0))
        return float(viol.max())


@dataclass(frozen=True, eq=False)
class FeasibilityOutcome:
    status: Status
    point: np.ndarray | None = None
    farkas: np.ndarray | None = None
    value: float | None = None

    @property
    def feasible(self) -> bool:
        return self.status is not Status.INFEASIBLE


@dataclass(frozen=True, eq=False)
class MarginOutcome:
    status: Status
    point: np.ndarray | None
    margin: float | None
    capped: bool = False
    farkas: np.ndarray | None = None


def _pivot(T: np.ndarray, r: int, c: int) -> None:
    T[r] /= T[r, c]
    col = T[:, c].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])


def _run_simplex(T: np.ndarray, basis: np.ndarray, allowed: np.ndarray) -> int | None:
    """Minimize with the reduced-cost row ``T[-1]``.

    Returns None at optimality, or the index of an entering column with no
    positive entry (the objective is unbounded along it).
    """
    m = T.shape[0] - 1
    for _ in range(_MAX_PIVOTS):
        d = T[-1, :-1]
        cand = np.flatnonzero((d < -_COST_EPS) & allowed)
        if cand.size == 0:
            return None
        j = int(cand[0])
        col = T[:m, j]
        pos = col > _PIVOT_EPS
        if not pos.any():
            return j
        ratios = np.full(m, np.inf)
        ratios[pos] = T[:m, -1][pos] / col[pos]
        rmin = ratios.min()
        ties = np.flatnonzero(ratios <= rmin + 1e-12 * (1.0 + abs(rmin)))
        r = int(ties[np.argmin(basis[ties])])
        _pivot(T, r, j)
        basis[r] = j
    raise RuntimeError("simplex pivot limit exceeded")


def solve(system: LinearSystem, tolerance: float = DEFAULT_TOL) -> FeasibilityOutcome:
    """Decide feasibility (and optimize the objective, if any).

    Infeasible outcomes carry Farkas multipliers ``u`` (one per row, ``u >= 0``
    on ``>=`` rows) scaled so that ``u . b = 1`` while ``u @ A`` is ~0.
    """
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    A, b = system.A, system.b
    m, n = A.shape
    eq = system.eq_mask

    # flip rows so the rhs is nonnegative; >= rows with rhs <= 0 then carry a
    # +1 slack that can start in the basis
    sign = np.where((b < 0) | ((b == 0) & ~eq), -1.0, 1.0)
    ge_rows = np.flatnonzero(~eq)
    slack_col = {int(i): 2 * n + k for k, i in enumerate(ge_rows)}
    needs_art = [i for i in range(m) if not (not eq[i] and sign[i] < 0)]
    n_slack = len(ge_rows)
    art_col = {i: 2 * n + n_slack + k for k, i in enumerate(needs_art)}
    N = 2 * n + n_slack + len(needs_art)

    T = np.zeros((m + 1, N + 1))
    T[:m, :n] = sign[:, None] * A
    T[:m, n:2 * n] = -sign[:, None] * A
    for i, c in slack_col.items():
        T[i, c] = -sign[i]
    for i, c in art_col.items():
        T[i, c] = 1.0
    T[:m, -1] = sign * b

    basis = np.empty(m, dtype=int)
    start_col = np.empty(m, dtype=int)
    for i in range(m):
        start_col[i] = art_col[i] if i in art_col else slack_col[i]
    basis[:] = start_col
    is_art = np.zeros(N, dtype=bool)
    is_art[list(art_col.values())] = True

    phase1_cost = is_art.astype(float)
    T[-1, :-1] = phase1_cost
    if needs_art:
        T[-1] -= T[needs_art].sum(axis=0)
    _run_simplex(T, basis, np.ones(N, dtype=bool))
    infeasibility = -T[-1, -1]

    if infeasibility > tolerance:
        y = phase1_cost[start_col] - T[-1, start_col]
        u = sign * y
        u[~eq & (u < 0) & (u > -1e-10)] = 0.0
        scale = float(u @ b)
        farkas = u / scale if scale > 0 else u
        return FeasibilityOutcome(Status.INFEASIBLE, farkas=farkas)

    if system.objective is None:
        return FeasibilityOutcome(Status.FEASIBLE, point=_extract(T, basis, n, N))

    # drive artificials still basic at level zero out of the basis
    for r in range(m):
        if is_art[basis[r]]:
            cands = np.flatnonzero((np.abs(T[r, :-1]) > 1e-9) & ~is_art)
            if cands.size:
                j = int(cands[0])
                _pivot(T, r, j)
                basis[r] = j

    c = system.objective if system.sense == "minimize" else -system.objective
    cost = np.zeros(N + 1)
    cost[:n] = c
    cost[n:2 * n] = -c
    T[-1] = cost - cost[basis] @ T[:m]
    ray_col = _run_simplex(T, basis, ~is_art)
    x = _extract(T, basis, n, N)
    value = float(system.objective @ x)
    status = Status.FEASIBLE if ray_col is None else Status.UNBOUNDED
    return FeasibilityOutcome(status, point=x, value=value)


def _extract(T: np.ndarray, basis: np.ndarray, n: int, N: int) -> np.ndarray:
    vals = np.zeros(N)
    vals[basis] = T[:-1, -1]
    return vals[:n] - vals[n:2 * n]


def verify_farkas(
    system: LinearSystem, farkas: Sequence[float], tolerance: float = DEFAULT_TOL
) -> bool:
    """Check that ``farkas`` proves ``system`` infeasible.

    The weighted row sum must have every coefficient within ``tolerance`` of
    zero and a right-hand side above ``tolerance``. Weights on ``>=`` rows must
    be nonnegative; equality rows take either sign.
    """
    u = np.asarray(farkas, dtype=float).reshape(-1)
    if u.shape[0] != system.num_rows:
        raise ValueError(
            f"certificate has {u.shape[0]} entries for {system.num_rows} rows"
        )
    if np.any(u[~system.eq_mask] < 0):
        return False
    coeffs = u @ system.A if system.num_rows else np.zeros(system.num_vars)
    rhs = float(u @ system.b) if system.num_rows else 0.0
    return bool(np.all(np.abs(coeffs) <= tolerance) and rhs > tolerance)


def maximize_margin(
    system: LinearSystem, tolerance: float = DEFAULT_TOL, cap: float = MARGIN_CAP
) -> MarginOutcome:
    """Maximize the smallest slack over the ``>=`` rows.

    Solves ``max d`` subject to ``A_i x - d >= b_i`` on inequality rows and the
    equality rows unchanged, with ``d <= cap``. A negative optimum means the
    system itself is infeasible; a Farkas certificate for the original rows is
    returned in that case.
    """
    m, n = system.A.shape
    eq = system.eq_mask
    A = np.hstack([system.A, np.where(eq, 0.0, -1.0)[:, None]])
    cap_row = np.zeros(n + 1)
    cap_row[-1] = -1.0
    A = np.vstack([A, cap_row])
    b = np.concatenate([system.b, [-cap]])
    rel = system.relations + (Relation.GE,)
    obj = np.zeros(n + 1)
    obj[-1] = 1.0
    out = solve(LinearSystem(A, b, rel, obj, "maximize"), tolerance)
    if out.status is Status.INFEASIBLE:
        plain = solve(LinearSystem(system.A, system.b, system.relations), tolerance)
        return MarginOutcome(Status.INFEASIBLE, None, None, farkas=plain.farkas)
    delta = float(out.point[-1])
    if delta < -tolerance:
        plain = solve(LinearSystem(system.A, system.b, system.relations), tolerance)
        if plain.status is Status.INFEASIBLE:
            return MarginOutcome(Status.INFEASIBLE, None, delta, farkas=plain.farkas)
    return MarginOutcome(
        Status.FEASIBLE, out.point[:n], delta, capped=delta >= cap - tolerance
    )
