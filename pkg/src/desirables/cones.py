"""Finitely generated cones of desirable gambles.

A :class:`DesirableCone` with generator set A represents the natural
extension E(A): every gamble of the form

    sum_i lambda_i f_i + g,   lambda_i >= 0 not all zero, f_i in A,

or g alone, where g is non-negative and non-zero.  The non-negative part
is always included, so a cone with no generators is the vacuous model.

Membership, coherence (no non-positive element), and the dual
strictly-positive-pmf witness are all decided by exact rational linear
programs.  Cones are immutable; queries are pure and safe to run
concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .simplex import GREATER_EQUAL, LESS_EQUAL, EQUAL, LinearProgram, LPStatus
from .spaces import Event, Gamble, Space, SpaceMismatchError


@dataclass(frozen=True)
class PmfWitness:
    """A strictly positive probability mass function giving every generator
    a strictly positive expectation; its existence certifies coherence."""

    space: Space
    masses: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.masses) != self.space.size:
            raise ValueError("witness length does not match its space")
        if any(p <= 0 for p in self.masses):
            raise ValueError("witness masses must be strictly positive")
        if sum(self.masses) != 1:
            raise ValueError("witness masses must sum to one")

    def expectation(self, g: Gamble) -> Fraction:
        if g.space != self.space:
            raise SpaceMismatchError("gamble on a different space")
        return sum((p * v for p, v in zip(self.masses, g.values)), Fraction(0))

    def as_dict(self) -> dict[str, Fraction]:
        return dict(zip(self.space.outcomes, self.masses))


@dataclass(frozen=True)
class DesirableCone:
    """A set of desirable gambles generated by finitely many gambles plus
    all non-negative non-zero gambles."""

    space: Space
    generators: tuple[Gamble, ...]

    #: The non-negative non-zero gambles are always part of the cone.
    include_nonneg = True

    def __post_init__(self) -> None:
        for g in self.generators:
            if g.space != self.space:
                raise SpaceMismatchError("generator on a different space")

    @staticmethod
    def vacuous(space: Space) -> "DesirableCone":
        return DesirableCone(space, ())

    @staticmethod
    def from_generators(space: Space, generators: Iterable[Gamble]) -> "DesirableCone":
        return DesirableCone(space, tuple(generators))

    def extended_with(self, f: Gamble) -> "DesirableCone":
        """The cone generated by the current generators together with f."""
        if f.space != self.space:
            raise SpaceMismatchError("gamble on a different space")
        return DesirableCone(self.space, self.generators + (f,))

    # -- decision procedures ------------------------------------------------

    def contains(self, f: Gamble) -> bool:
        """Exact membership of f in the generated cone.

        True iff f is non-negative and non-zero, or some combination
        sum lambda_i f_i with lambda >= 0 and sum lambda_i > 0 satisfies
        sum lambda_i f_i <= f pointwise (the remainder is then absorbed by
        the non-negative part).  The zero gamble is handled literally: it
        belongs to the cone exactly when the cone is incoherent.
        """
        if f.space != self.space:
            raise SpaceMismatchError("gamble on a different space")
        if f.is_nonneg and not f.is_zero:
            return True
        n = len(self.generators)
        if n == 0:
            return False
        lp = LinearProgram(n, [1] * n, nonneg=True)
        for k, x in enumerate(self.space.outcomes):
            lp.add([g.values[k] for g in self.generators], LESS_EQUAL, f.values[k])
        result = lp.solve()
        if result.status is LPStatus.UNBOUNDED:
            return True
        if result.status is LPStatus.INFEASIBLE:
            return False
        return result.value > 0

    def is_coherent(self) -> bool:
        """True iff the cone contains no gamble f <= 0.

        Only generator combinations can produce a non-positive element, so
        this is the infeasibility of {lambda >= 0, sum lambda = 1,
        sum lambda_i f_i <= 0}.
        """
        n = len(self.generators)
        if n == 0:
            return True
        lp = LinearProgram(n, [0] * n, nonneg=True)
        lp.add([1] * n, EQUAL, 1)
        for k in range(self.space.size):
            lp.add([g.values[k] for g in self.generators], LESS_EQUAL, 0)
        return lp.solve().status is LPStatus.INFEASIBLE

    def positive_pmf_witness(self) -> Optional[PmfWitness]:
        """A strictly positive pmf with positive expectation for every
        generator, or None if there is none.

        Such a witness exists iff the zero gamble lies outside the cone,
        which on finite spaces is equivalent to coherence.
        """
        n = self.space.size
        m = len(self.generators)
        # Variables: p_1..p_n >= 0, t free.  Maximize t subject to
        # p_k >= t, sum p = 1, p.f_i >= t.
        lp = LinearProgram(n + 1, [0] * n + [1], nonneg=[True] * n + [False])
        lp.add([1] * n + [0], EQUAL, 1)
        for k in range(n):
            row = [Fraction(0)] * (n + 1)
            row[k] = Fraction(1)
            row[n] = Fraction(-1)
            lp.add(row, GREATER_EQUAL, 0)
        for g in self.generators:
            lp.add(list(g.values) + [Fraction(-1)], GREATER_EQUAL, 0)
        result = lp.solve()
        assert result.status is LPStatus.OPTIMAL  # always feasible and bounded
        if result.value <= 0:
            return None
        return PmfWitness(self.space, tuple(result.point[:n]))

    # -- credal-set side ------------------------------------------------------

    def dominating_pmf_exists(self) -> bool:
        """Whether some pmf gives every generator a non-negative expectation.

        This is the (non-strict) dual cone being non-empty; it fails exactly
        when the generators incur a sure loss, making every lower-prevision
        query diverge.
        """
        n = self.space.size
        if not self.generators:
            return True
        lp = LinearProgram(n, [0] * n, nonneg=True)
        lp.add([1] * n, EQUAL, 1)
        for g in self.generators:
            lp.add(list(g.values), GREATER_EQUAL, 0)
        return lp.solve().status is LPStatus.OPTIMAL

    def upper_probability_positive(self, event: Event) -> bool:
        """Whether some pmf with non-negative generator expectations gives
        the event positive probability."""
        if event.space != self.space:
            raise SpaceMismatchError("event on a different space")
        event.require_nonempty()
        n = self.space.size
        weights = [Fraction(1) if x in event.members else Fraction(0) for x in self.space.outcomes]
        lp = LinearProgram(n, weights, nonneg=True)
        lp.add([1] * n, EQUAL, 1)
        for g in self.generators:
            lp.add(list(g.values), GREATER_EQUAL, 0)
        result = lp.solve()
        if result.status is not LPStatus.OPTIMAL:
            return False
        return result.value > 0
