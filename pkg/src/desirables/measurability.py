"""Measurability of non-negative gambles with respect to an event family.

A non-negative gamble is family-measurable when it lies in the simple
cone

    { c0 * 1 + sum_i c_i * indicator(B_i) : c0 >= 0, c_i >= 0, B_i in family },

decided exactly by LP feasibility.  On a finite space this cone is
polyhedral and hence closed, so uniform limits add nothing and cone
membership is the whole story.

The constructive side builds staircase approximants from level sets: with
alpha = max(g) + 1 and levels k*alpha/n, the gamble

    g_n = (alpha/n) * sum_{k=1}^{n-1} indicator({g >= k*alpha/n})

satisfies max|g - g_n| <= alpha/n whenever every level set splits into
pairwise disjoint family events (allowing the whole space and the empty
set).  Level-set splitting is sufficient for measurability, not
necessary; a failed split at some level is reported as a witness against
that sufficient condition, and is guaranteed to exist whenever the gamble
is genuinely non-measurable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Optional

from .simplex import EQUAL, LinearProgram, LPStatus
from .spaces import Event, Gamble, Space, SpaceMismatchError, indicator

if TYPE_CHECKING:  # pragma: no cover
    from .independence import EventFamily


class MeasurabilityError(ValueError):
    """A gamble failed a required measurability condition; carries the first
    offending level and its level set when one exists."""

    def __init__(self, message: str, level: Optional[Fraction] = None, level_set: Optional[Event] = None):
        super().__init__(message)
        self.level = level
        self.level_set = level_set


def _require_nonneg(g: Gamble) -> None:
    if not g.is_nonneg:
        raise ValueError("measurability is defined for non-negative gambles only")


@dataclass(frozen=True)
class SimpleGambleCone:
    """The convex cone of non-negative simple combinations of family
    indicators and non-negative constants."""

    space: Space
    family: "EventFamily"

    def __post_init__(self) -> None:
        if self.family.space != self.space:
            raise SpaceMismatchError("family on a different space")

    def coefficients(
        self, g: Gamble
    ) -> Optional[tuple[Fraction, tuple[tuple[Event, Fraction], ...]]]:
        """Non-negative (c0, per-event coefficients) reconstructing g
        exactly, or None when g lies outside the cone."""
        _require_nonneg(g)
        if g.space != self.space:
            raise SpaceMismatchError("gamble on a different space")
        events = self.family.events()
        n = 1 + len(events)
        lp = LinearProgram(n, [0] * n, nonneg=True)
        for k, x in enumerate(self.space.outcomes):
            row = [Fraction(1)]
            for e in events:
                row.append(Fraction(1) if x in e.members else Fraction(0))
            lp.add(row, EQUAL, g.values[k])
        result = lp.solve()
        if result.status is not LPStatus.OPTIMAL:
            return None
        c0 = result.point[0]
        coeffs = tuple((e, c) for e, c in zip(events, result.point[1:]))
        return c0, coeffs

    def contains(self, g: Gamble) -> bool:
        return self.coefficients(g) is not None


def is_measurable(g: Gamble, family: "EventFamily") -> bool:
    """Exact decision: does g belong to the family's simple cone?"""
    return SimpleGambleCone(g.space, family).contains(g)


def level_set(g: Gamble, level: Fraction) -> Event:
    return Event(g.space, frozenset(x for x, v in zip(g.space.outcomes, g.values) if v >= level))


def split_into_disjoint(event: Event, family: "EventFamily") -> Optional[tuple[Event, ...]]:
    """Write the event as a disjoint union of family events (the whole
    space counts; the empty event is the empty union), or None."""
    if event.is_empty:
        return ()
    if event.is_full:
        return (event,)
    space = event.space
    candidates = [e for e in family.events() if e.members <= event.members]

    def cover(remaining: frozenset[str]) -> Optional[tuple[Event, ...]]:
        if not remaining:
            return ()
        first = next(x for x in space.outcomes if x in remaining)
        for e in candidates:
            if first in e.members and e.members <= remaining:
                rest = cover(remaining - e.members)
                if rest is not None:
                    return (e,) + rest
        return None

    return cover(event.members)


def non_measurability_witness(
    g: Gamble, family: "EventFamily"
) -> Optional[tuple[Fraction, Event]]:
    """The first positive value r of g whose level set {g >= r} does not
    split into disjoint family events, scanning values in increasing
    order; None when every level splits (which makes g measurable)."""
    _require_nonneg(g)
    for r in sorted(set(v for v in g.values if v > 0)):
        ls = level_set(g, r)
        if split_into_disjoint(ls, family) is None:
            return r, ls
    return None


def require_measurable(g: Gamble, family: "EventFamily") -> None:
    """Raise MeasurabilityError with a witness level set when g is not
    family-measurable."""
    if is_measurable(g, family):
        return
    witness = non_measurability_witness(g, family)
    assert witness is not None  # non-measurable gambles always fail some level
    level, ls = witness
    raise MeasurabilityError(
        f"gamble is not measurable for the conditioning family: level set at "
        f"{level} is {sorted(ls.members)}",
        level=level,
        level_set=ls,
    )


@dataclass(frozen=True)
class LevelApproximation:
    """Outcome of the staircase construction for one n."""

    alpha: Fraction
    n: int
    approximant: Optional[Gamble]
    witness_level: Optional[Fraction] = None
    witness_set: Optional[Event] = None

    @property
    def succeeded(self) -> bool:
        return self.approximant is not None

    @property
    def error_bound(self) -> Fraction:
        return self.alpha / self.n


def level_set_approximation(g: Gamble, family: "EventFamily", n: int) -> LevelApproximation:
    """Build the n-step staircase approximant of g from its level sets.

    Succeeds iff every grid level set splits into disjoint family events,
    in which case max|g - g_n| <= alpha/n with alpha = max(g) + 1; the
    first offending grid level is returned as a witness otherwise.  This
    checks the sufficient condition only: a measurable gamble can still
    fail it for a particular family.
    """
    _require_nonneg(g)
    if n < 1:
        raise ValueError("the step count n must be a positive integer")
    alpha = g.maximum() + 1
    pieces = []
    for k in range(1, n):
        level = Fraction(k, n) * alpha
        ls = level_set(g, level)
        if split_into_disjoint(ls, family) is None:
            return LevelApproximation(
                alpha=alpha, n=n, approximant=None, witness_level=level, witness_set=ls
            )
        pieces.append(indicator(ls))
    approx = g.space.zero()
    for piece in pieces:
        approx = approx + piece
    approx = approx * (alpha / n)
    return LevelApproximation(alpha=alpha, n=n, approximant=approx)


# ---------------------------------------------------------------------------
# Finite-field audit
# ---------------------------------------------------------------------------


def generated_field(family: "EventFamily") -> frozenset[frozenset[str]]:
    """The smallest family of subsets containing the family members and
    closed under complement and intersection (hence union)."""
    space = family.space
    full = frozenset(space.outcomes)
    current: set[frozenset[str]] = {frozenset(), full}
    current.update(e.members for e in family.events())
    while True:
        additions: set[frozenset[str]] = set()
        for a in current:
            comp = full - a
            if comp not in current:
                additions.add(comp)
        for a, b in itertools.combinations(current, 2):
            inter = a & b
            if inter not in current:
                additions.add(inter)
        if not additions:
            return frozenset(current)
        current |= additions


def family_is_field(family: "EventFamily") -> bool:
    """Whether the family members together with the empty set already form
    a field (closed under complement and intersection; closure under
    complement of the empty set puts the whole space among the members)."""
    members = {e.members for e in family.events()}
    members.add(frozenset())
    return generated_field(family) <= members


def measurable_by_field_criterion(g: Gamble, family: "EventFamily") -> bool:
    """Every level set of g belongs to the field generated by the family.

    For families that already form a field this criterion coincides with
    cone membership; for general families it need not.
    """
    _require_nonneg(g)
    field = generated_field(family)
    return all(level_set(g, r).members in field for r in set(g.values))
