"""Exact rational linear programming via a two-phase dense simplex.

All coefficients are ``fractions.Fraction``; there is no floating point
anywhere, so feasibility, optimality, and unboundedness are decided
exactly.  Bland's rule (smallest-index entering column, smallest-index
basic variable on ratio ties) guarantees termination.

The solver reports exactly one of three outcomes: an optimum together
with a point that satisfies every constraint exactly, infeasibility, or
unboundedness together with an improving ray.  Each solve owns private
tableau state, so concurrent solves over shared problem data are safe.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence

from .spaces import RationalLike, as_fraction

_ZERO = Fraction(0)
_ONE = Fraction(1)

LESS_EQUAL = "<="
EQUAL = "=="
GREATER_EQUAL = ">="


class LPStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LPResult:
    status: LPStatus
    value: Optional[Fraction] = None
    point: Optional[tuple[Fraction, ...]] = None
    #: On UNBOUNDED: a direction d with A-feasibility preserved along x + t*d
    #: and strictly increasing objective.
    ray: Optional[tuple[Fraction, ...]] = None

    @property
    def is_optimal(self) -> bool:
        return self.status is LPStatus.OPTIMAL


class LinearProgram:
    """maximize c.x subject to rows (a.x <= / == / >= b), with per-variable
    non-negativity flags (free variables are split internally)."""

    def __init__(
        self,
        num_vars: int,
        objective: Sequence[RationalLike],
        nonneg: Sequence[bool] | bool = True,
    ):
        if len(objective) != num_vars:
            raise ValueError("objective length does not match variable count")
        self.num_vars = num_vars
        self.objective = [as_fraction(c) for c in objective]
        if isinstance(nonneg, bool):
            self.nonneg = [nonneg] * num_vars
        else:
            if len(nonneg) != num_vars:
                raise ValueError("nonneg flags length does not match variable count")
            self.nonneg = list(nonneg)
        self.rows: list[tuple[list[Fraction], str, Fraction]] = []

    def add(self, coeffs: Sequence[RationalLike], rel: str, rhs: RationalLike) -> None:
        if len(coeffs) != self.num_vars:
            raise ValueError("constraint length does not match variable count")
        if rel not in (LESS_EQUAL, EQUAL, GREATER_EQUAL):
            raise ValueError(f"unknown relation {rel!r}")
        self.rows.append(([as_fraction(a) for a in coeffs], rel, as_fraction(rhs)))

    # -- internal ---------------------------------------------------------

    def _split_columns(self) -> tuple[list[tuple[int, int]], int]:
        """Map each original variable to (plus_col, minus_col); minus_col is -1
        for non-negative variables.  Returns the map and the column count."""
        colmap: list[tuple[int, int]] = []
        ncols = 0
        for j in range(self.num_vars):
            if self.nonneg[j]:
                colmap.append((ncols, -1))
                ncols += 1
            else:
                colmap.append((ncols, ncols + 1))
                ncols += 2
        return colmap, ncols

    def solve(self) -> LPResult:
        m = len(self.rows)
        colmap, nstruct = self._split_columns()

        # Expand rows over split columns; normalise to a.x (<=|==|>=) b.
        exp_rows: list[list[Fraction]] = []
        rels: list[str] = []
        rhs: list[Fraction] = []
        for coeffs, rel, b in self.rows:
            row = [_ZERO] * nstruct
            for j, a in enumerate(coeffs):
                if a == 0:
                    continue
                plus, minus = colmap[j]
                row[plus] = a
                if minus >= 0:
                    row[minus] = -a
            exp_rows.append(row)
            rels.append(rel)
            rhs.append(b)

        # Slack columns (one per inequality), then artificials as needed.
        nslack = sum(1 for r in rels if r != EQUAL)
        width = nstruct + nslack
        tableau: list[list[Fraction]] = []
        basis: list[int] = []
        art_cols: list[int] = []
        slack_at = 0
        pending_artificial: list[int] = []
        for i in range(m):
            row = exp_rows[i] + [_ZERO] * nslack + [rhs[i]]
            if rels[i] != EQUAL:
                s = _ONE if rels[i] == LESS_EQUAL else -_ONE
                row[nstruct + slack_at] = s
                slack_col = nstruct + slack_at
                slack_at += 1
            else:
                slack_col = -1
            # Make the right-hand side non-negative.
            if row[-1] < 0:
                row = [-v for v in row]
            # A positive-signed slack with the (now non-negative) rhs can
            # start in the basis; otherwise the row needs an artificial.
            if slack_col >= 0 and row[slack_col] == _ONE:
                basis.append(slack_col)
            else:
                basis.append(-1)
                pending_artificial.append(i)
            tableau.append(row)

        nart = len(pending_artificial)
        if nart:
            for row in tableau:
                rhs_v = row.pop()
                row.extend([_ZERO] * nart)
                row.append(rhs_v)
            for k, i in enumerate(pending_artificial):
                col = width + k
                tableau[i][col] = _ONE
                basis[i] = col
                art_cols.append(col)
        total_cols = width + nart

        # Phase 1: maximize -(sum of artificials).
        if nart:
            cost = [_ZERO] * (total_cols + 1)
            for col in art_cols:
                cost[col] = -_ONE
            self._reduce_cost_row(cost, tableau, basis)
            status, _ = self._iterate(tableau, basis, cost, total_cols, block_cols=())
            assert status is LPStatus.OPTIMAL  # phase 1 is always bounded
            if cost[-1] != 0:  # cost[-1] holds -z; z* < 0 means infeasible
                return LPResult(status=LPStatus.INFEASIBLE)
            self._expel_artificials(tableau, basis, art_cols, width)

        # Phase 2 over the structural objective.
        cost = [_ZERO] * (total_cols + 1)
        for j in range(self.num_vars):
            c = self.objective[j]
            if c == 0:
                continue
            plus, minus = colmap[j]
            cost[plus] = c
            if minus >= 0:
                cost[minus] = -c
        self._reduce_cost_row(cost, tableau, basis)
        blocked = tuple(art_cols)
        status, entering = self._iterate(tableau, basis, cost, total_cols, block_cols=blocked)

        if status is LPStatus.UNBOUNDED:
            ray = self._extract_ray(tableau, basis, entering, colmap)
            return LPResult(status=LPStatus.UNBOUNDED, ray=ray)

        point = self._extract_point(tableau, basis, colmap)
        value = sum((c * x for c, x in zip(self.objective, point)), _ZERO)
        return LPResult(status=LPStatus.OPTIMAL, value=value, point=point)

    @staticmethod
    def _reduce_cost_row(cost: list[Fraction], tableau: list[list[Fraction]], basis: list[int]) -> None:
        for i, b in enumerate(basis):
            cb = cost[b]
            if cb == 0:
                continue
            row = tableau[i]
            for j, v in enumerate(row):
                if v != 0:
                    cost[j] -= cb * v

    @staticmethod
    def _pivot(tableau: list[list[Fraction]], cost: list[Fraction], basis: list[int], r: int, c: int) -> None:
        prow = tableau[r]
        piv = prow[c]
        if piv != 1:
            inv = 1 / piv
            tableau[r] = prow = [v * inv if v != 0 else _ZERO for v in prow]
        for row in tableau:
            if row is prow:
                continue
            f = row[c]
            if f == 0:
                continue
            for j, v in enumerate(prow):
                if v != 0:
                    row[j] -= f * v
        f = cost[c]
        if f != 0:
            for j, v in enumerate(prow):
                if v != 0:
                    cost[j] -= f * v
        basis[r] = c

    @classmethod
    def _iterate(
        cls,
        tableau: list[list[Fraction]],
        basis: list[int],
        cost: list[Fraction],
        total_cols: int,
        block_cols: tuple[int, ...],
    ) -> tuple[LPStatus, int]:
        """Run Bland-rule pivots to optimality; on unboundedness, also
        return the entering column whose ray escapes."""
        blocked = set(block_cols)
        while True:
            enter = -1
            for j in range(total_cols):  # Bland: smallest improving index
                if j in blocked:
                    continue
                if cost[j] > 0:
                    enter = j
                    break
            if enter < 0:
                return LPStatus.OPTIMAL, -1
            leave = -1
            best: Optional[Fraction] = None
            for i, row in enumerate(tableau):
                a = row[enter]
                if a <= 0:
                    continue
                ratio = row[-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
            if leave < 0:
                return LPStatus.UNBOUNDED, enter
            cls._pivot(tableau, cost, basis, leave, enter)

    @staticmethod
    def _expel_artificials(
        tableau: list[list[Fraction]], basis: list[int], art_cols: list[int], width: int
    ) -> None:
        """Pivot artificial variables out of the basis; drop redundant rows."""
        art = set(art_cols)
        drop: list[int] = []
        for i in range(len(tableau)):
            if basis[i] not in art:
                continue
            row = tableau[i]
            pivot_col = -1
            for j in range(width):
                if row[j] != 0:
                    pivot_col = j
                    break
            if pivot_col < 0:
                drop.append(i)  # all-zero structural row: redundant constraint
                continue
            LinearProgram._pivot(tableau, [_ZERO] * len(row), basis, i, pivot_col)
        for i in reversed(drop):
            del tableau[i]
            del basis[i]

    def _extract_point(
        self, tableau: list[list[Fraction]], basis: list[int], colmap: list[tuple[int, int]]
    ) -> tuple[Fraction, ...]:
        col_values: dict[int, Fraction] = {b: tableau[i][-1] for i, b in enumerate(basis)}
        point = []
        for plus, minus in colmap:
            v = col_values.get(plus, _ZERO)
            if minus >= 0:
                v -= col_values.get(minus, _ZERO)
            point.append(v)
        return tuple(point)

    @staticmethod
    def _extract_ray(
        tableau: list[list[Fraction]],
        basis: list[int],
        enter: int,
        colmap: list[tuple[int, int]],
    ) -> tuple[Fraction, ...]:
        """Improving direction from the entering column that had no blocking row."""
        direction: dict[int, Fraction] = {enter: _ONE}
        for i, row in enumerate(tableau):
            a = row[enter]
            if a != 0:
                direction[basis[i]] = -a
        ray = []
        for plus, minus in colmap:
            v = direction.get(plus, _ZERO)
            if minus >= 0:
                v -= direction.get(minus, _ZERO)
            ray.append(v)
        return tuple(ray)


def solve_lp(
    objective: Sequence[RationalLike],
    constraints: Sequence[tuple[Sequence[RationalLike], str, RationalLike]],
    nonneg: Sequence[bool] | bool = True,
) -> LPResult:
    """One-shot helper: maximize objective subject to (coeffs, rel, rhs) rows."""
    lp = LinearProgram(len(objective), objective, nonneg=nonneg)
    for coeffs, rel, rhs in constraints:
        lp.add(coeffs, rel, rhs)
    return lp.solve()
