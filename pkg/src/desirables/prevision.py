"""Conditional lower previsions from assessment tables.

An :class:`Assessment` is a finite table of entries "the lower prevision of
gamble f contingent on event B is at least v"; a self-conjugate (linear)
entry also imposes the matching upper bound.  The induced model is the
natural extension: the least-committal coherent extension of the table,
realised as lower-prevision queries over the cone generated by the gambles
[f - v] * indicator(B).

On a finite space the query

    lower(f | B) = sup { mu : [f - mu] * indicator(B) in cone }

is an exact rational LP whose dual ranges over the probability mass
functions that dominate the assessment, so query values are lower
envelopes of dominating expectations.  A query diverges in exactly two
situations, reported as distinct errors: the assessment incurs a sure loss
(no dominating pmf at all), or the conditioning event is given probability
zero by every dominating pmf ("conditioning beyond support"); in the
latter case finite mass functions cannot represent the conditional model
and the engine refuses to guess.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Optional, Sequence

from .cones import DesirableCone
from .simplex import EQUAL, GREATER_EQUAL, LESS_EQUAL, LinearProgram, LPResult, LPStatus
from .spaces import (
    Event,
    Gamble,
    RationalLike,
    Space,
    SpaceMismatchError,
    as_fraction,
    indicator,
)

_ZERO = Fraction(0)
_ONE = Fraction(1)


class SureLossError(ValueError):
    """The model admits no dominating pmf: every query value diverges."""


class BeyondSupportError(ValueError):
    """Every dominating pmf gives the conditioning event probability zero;
    the conditional value is not representable by mass functions."""

    def __init__(self, event: Event):
        self.event = event
        super().__init__(
            f"conditioning beyond support: event {sorted(event.members)} has upper probability zero"
        )


# ---------------------------------------------------------------------------
# Cone-level queries
# ---------------------------------------------------------------------------


def _raw_lower(cone: DesirableCone, f: Gamble, event: Event) -> LPResult:
    """LP for sup{mu : [f - mu] * indicator(B) in cone}.

    Variables are the generator coefficients followed by mu (free);
    one row per outcome:  sum_i lambda_i g_i(x) + I_B(x) mu <= I_B(x) f(x).
    """
    n = len(cone.generators)
    lp = LinearProgram(n + 1, [0] * n + [1], nonneg=[True] * n + [False])
    for k, x in enumerate(cone.space.outcomes):
        in_b = x in event.members
        row = [g.values[k] for g in cone.generators]
        row.append(_ONE if in_b else _ZERO)
        lp.add(row, LESS_EQUAL, f.values[k] if in_b else _ZERO)
    return lp.solve()


def lower_prevision(cone: DesirableCone, f: Gamble, event: Optional[Event] = None) -> Fraction:
    """The exact lower prevision of f contingent on the event, derived from
    the cone.  Raises SureLossError or BeyondSupportError when the supremum
    is infinite."""
    if f.space != cone.space:
        raise SpaceMismatchError("gamble on a different space")
    if event is None:
        event = cone.space.full_event()
    elif event.space != cone.space:
        raise SpaceMismatchError("event on a different space")
    event.require_nonempty()
    result = _raw_lower(cone, f, event)
    if result.status is LPStatus.OPTIMAL:
        return result.value
    if not cone.dominating_pmf_exists():
        raise SureLossError("the cone incurs a sure loss; lower previsions diverge")
    raise BeyondSupportError(event)


def upper_prevision(cone: DesirableCone, f: Gamble, event: Optional[Event] = None) -> Fraction:
    """Conjugate value: upper(f|B) = -lower(-f|B)."""
    return -lower_prevision(cone, -f, event)


# ---------------------------------------------------------------------------
# Assessments
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AssessmentEntry:
    gamble: Gamble
    event: Event
    lower: Fraction
    #: Self-conjugate entries also impose lower(-f|B) = -value.
    linear: bool = False

    def __post_init__(self) -> None:
        if self.event.space != self.gamble.space:
            raise SpaceMismatchError("entry event and gamble on different spaces")
        self.event.require_nonempty()

    def boundary_gamble(self) -> Gamble:
        return (self.gamble - self.lower) * indicator(self.event)


@dataclass(frozen=True)
class Assessment:
    space: Space
    entries: tuple[AssessmentEntry, ...]

    def __post_init__(self) -> None:
        seen: dict[tuple, Fraction] = {}
        for e in self.entries:
            if e.gamble.space != self.space:
                raise SpaceMismatchError("entry on a different space")
            key = (e.gamble.values, e.event.members)
            if key in seen and seen[key] != e.lower:
                raise ValueError(
                    f"duplicate assessment of the same (gamble, event) pair with "
                    f"values {seen[key]} and {e.lower}"
                )
            seen[key] = e.lower

    @staticmethod
    def build(
        space: Space,
        entries: Iterable[tuple[Gamble, Optional[Event], RationalLike] | tuple[Gamble, Optional[Event], RationalLike, bool]],
    ) -> "Assessment":
        built = []
        for item in entries:
            gamble, event, lower = item[0], item[1], item[2]
            linear = bool(item[3]) if len(item) > 3 else False
            built.append(
                AssessmentEntry(
                    gamble=gamble,
                    event=event if event is not None else space.full_event(),
                    lower=as_fraction(lower),
                    linear=linear,
                )
            )
        return Assessment(space, tuple(built))

    def restricted(self, indices: Sequence[int]) -> "Assessment":
        return Assessment(self.space, tuple(self.entries[i] for i in indices))


@dataclass(frozen=True)
class CoherenceViolation:
    """A certificate against Williams coherence.

    ``lambdas`` are the non-negative coefficients on assessed directions
    used in the positive slot, as (entry index, sign, coefficient)
    triples; sign -1 marks the conjugate direction of a self-conjugate
    entry.  ``entry_index`` (with coefficient one) is the entry tested in
    the negative slot, or None for a pure sure-loss combination.
    ``sup_value`` is the exact maximum of the combined called-off gamble
    over the union of the involved conditioning events; a negative value is
    a genuine finite-combination violation.  ``kind`` is 'sure-loss',
    'gap' (an assessed value strictly below its natural extension), or
    'beyond-support' (a conditioning event unreachable by every dominating
    pmf, where mass functions cannot settle the verdict).
    """

    kind: str
    entry_index: Optional[int]
    lambdas: tuple[tuple[int, int, Fraction], ...]
    sup_value: Optional[Fraction]
    assessed: Optional[Fraction] = None
    extension: Optional[Fraction] = None


@dataclass(frozen=True)
class CoherenceVerdict:
    coherent: bool
    violation: Optional[CoherenceViolation] = None


class ConditionalLowerPrevision:
    """An assessment together with its induced natural extension.

    The cone is generated by one boundary gamble [f - v] * I_B per entry
    (plus the conjugate twin for linear entries); queries are exact LP
    optima over it.  Instances are immutable and queries are pure.
    """

    def __init__(self, assessment: Assessment):
        self.assessment = assessment
        self.space = assessment.space
        generators = []
        owners = []  # generator index -> (entry index, sign)
        for k, e in enumerate(assessment.entries):
            generators.append(e.boundary_gamble())
            owners.append((k, 1))
            if e.linear:
                generators.append(-e.boundary_gamble())
                owners.append((k, -1))
        self.cone = DesirableCone(self.space, tuple(generators))
        self._owners = tuple(owners)

    @staticmethod
    def from_entries(space, entries) -> "ConditionalLowerPrevision":
        return ConditionalLowerPrevision(Assessment.build(space, entries))

    # -- queries -----------------------------------------------------------

    def lower(self, f: Gamble, event: Optional[Event] = None) -> Fraction:
        """The natural extension of the assessment at (f, event)."""
        return lower_prevision(self.cone, f, event)

    def upper(self, f: Gamble, event: Optional[Event] = None) -> Fraction:
        return -self.lower(-f, event)

    natural_extension = lower

    # -- coherence ---------------------------------------------------------

    @cached_property
    def coherence(self) -> CoherenceVerdict:
        return self._check_coherence()

    def is_coherent(self) -> bool:
        return self.coherence.coherent

    def _entry_lambdas(
        self, point_or_ray: Sequence[Fraction]
    ) -> tuple[tuple[int, int, Fraction], ...]:
        """Fold generator coefficients back onto assessed directions.

        A linear entry's twin generator is its own conjugate assessment,
        reported under the same entry index with sign -1, so the published
        coefficients reconstruct the combination exactly.
        """
        per_direction: dict[tuple[int, int], Fraction] = {}
        for coeff, owner in zip(point_or_ray, self._owners):
            if coeff:
                per_direction[owner] = per_direction.get(owner, _ZERO) + coeff
        return tuple((k, sign, coeff) for (k, sign), coeff in sorted(per_direction.items()))

    def _combination_sup(
        self, lambdas_by_gen: Sequence[Fraction], minus_entry: Optional[int]
    ) -> Optional[Fraction]:
        """Max over the union of involved conditioning events of
        sum lambda_i [f_i - v_i] I_{B_i}  ( - [f_k - v_k] I_{B_k} )."""
        combo = self.space.zero()
        region: set[str] = set()
        for coeff, g, (k, _s) in zip(lambdas_by_gen, self.cone.generators, self._owners):
            if coeff:
                combo = combo + g * coeff
                region |= self.assessment.entries[k].event.members
        if minus_entry is not None:
            combo = combo - self.assessment.entries[minus_entry].boundary_gamble()
            region |= self.assessment.entries[minus_entry].event.members
        if not region:
            return None
        return combo.max_over(Event(self.space, frozenset(region)))

    def _polish_certificate(
        self, support: Sequence[int], minus_entry: Optional[int]
    ) -> Optional[tuple[tuple[Fraction, ...], Fraction]]:
        """Search, over generator support sets, for coefficients making the
        finite combination strictly negative on the union of its
        conditioning events.  Returns (per-generator lambdas, sup value)."""
        gens = self.cone.generators
        for size in range(len(support), 0, -1):
            for subset in itertools.combinations(support, size):
                region: set[str] = set()
                for gi in subset:
                    region |= self.assessment.entries[self._owners[gi][0]].event.members
                if minus_entry is not None:
                    region |= self.assessment.entries[minus_entry].event.members
                region_list = [x for x in self.space.outcomes if x in region]
                if not region_list:
                    continue
                # Variables: lambda_i for i in subset, then eps; maximize eps.
                nv = len(subset) + 1
                lp = LinearProgram(nv, [0] * len(subset) + [1], nonneg=True)
                minus = (
                    self.assessment.entries[minus_entry].boundary_gamble()
                    if minus_entry is not None
                    else self.space.zero()
                )
                for x in region_list:
                    xi = self.space.index(x)
                    row = [gens[gi].values[xi] for gi in subset] + [_ONE]
                    lp.add(row, LESS_EQUAL, minus.values[xi])
                lp.add([0] * len(subset) + [1], LESS_EQUAL, 1)
                result = lp.solve()
                if result.status is LPStatus.OPTIMAL and result.value > 0:
                    lambdas = [_ZERO] * len(gens)
                    for j, gi in enumerate(subset):
                        lambdas[gi] = result.point[j]
                    sup = self._combination_sup(lambdas, minus_entry)
                    if sup is not None and sup < 0:
                        return tuple(lambdas), sup
        return None

    def _check_coherence(self) -> CoherenceVerdict:
        """Coherent iff every assessed value is reproduced exactly by its
        own natural-extension query with a finite optimum."""
        entries = self.assessment.entries
        gens = self.cone.generators
        for k, e in enumerate(entries):
            probes = [(e.gamble, e.event, e.lower)]
            if e.linear:
                probes.append((-e.gamble, e.event, -e.lower))
            for gamble, event, assessed in probes:
                result = _raw_lower(self.cone, gamble, event)
                if result.status is LPStatus.UNBOUNDED:
                    ray = result.ray[: len(gens)]
                    support = [i for i, c in enumerate(ray) if c > 0]
                    polished = self._polish_certificate(support, minus_entry=None)
                    if polished is not None:
                        lambdas, sup = polished
                        return CoherenceVerdict(
                            False,
                            CoherenceViolation(
                                kind="sure-loss",
                                entry_index=None,
                                lambdas=self._entry_lambdas(lambdas),
                                sup_value=sup,
                            ),
                        )
                    return CoherenceVerdict(
                        False,
                        CoherenceViolation(
                            kind="beyond-support",
                            entry_index=k,
                            lambdas=self._entry_lambdas(ray),
                            sup_value=self._combination_sup(ray, None),
                        ),
                    )
                value = result.value
                if value > assessed:
                    point = result.point[: len(gens)]
                    support = [i for i, c in enumerate(point) if c > 0]
                    polished = self._polish_certificate(support, minus_entry=k)
                    lambdas, sup = polished if polished is not None else (tuple(point), None)
                    return CoherenceVerdict(
                        False,
                        CoherenceViolation(
                            kind="gap",
                            entry_index=k,
                            lambdas=self._entry_lambdas(lambdas),
                            sup_value=sup,
                            assessed=assessed,
                            extension=value,
                        ),
                    )
        return CoherenceVerdict(True)

    # -- dominating linear previsions ---------------------------------------

    def dominating_previsions(
        self, f: Gamble, event: Optional[Event] = None
    ) -> tuple["LinearPrevision", "LinearPrevision"]:
        """Mass functions from the dominating set attaining the minimum and
        maximum of the conditional expectation of f given the event.

        The LP runs over vectors r >= 0 with unit mass on the event and
        non-negative expectation for every boundary generator; normalising
        an optimal r yields a dominating pmf whose conditional expectation
        attains the bound.
        """
        if f.space != self.space:
            raise SpaceMismatchError("gamble on a different space")
        if event is None:
            event = self.space.full_event()
        event.require_nonempty()
        points = []
        for sign in (-1, 1):  # minimize first, then maximize
            n = self.space.size
            weights = [
                sign * f.values[k] if x in event.members else _ZERO
                for k, x in enumerate(self.space.outcomes)
            ]
            lp = LinearProgram(n, weights, nonneg=True)
            lp.add(
                [_ONE if x in event.members else _ZERO for x in self.space.outcomes],
                EQUAL,
                1,
            )
            for g in self.cone.generators:
                lp.add(list(g.values), GREATER_EQUAL, 0)
            result = lp.solve()
            if result.status is LPStatus.INFEASIBLE:
                if not self.cone.dominating_pmf_exists():
                    raise SureLossError("no dominating pmf: the assessment incurs a sure loss")
                raise BeyondSupportError(event)
            assert result.status is LPStatus.OPTIMAL  # objective bounded on the event
            total = sum(result.point, _ZERO)
            points.append(tuple(v / total for v in result.point))
        return LinearPrevision(self.space, points[0]), LinearPrevision(self.space, points[1])

    def dominates(self, pmf: "LinearPrevision") -> bool:
        """Whether the pmf gives every boundary generator non-negative expectation."""
        return all(pmf.expectation(g) >= 0 for g in self.cone.generators)


# ---------------------------------------------------------------------------
# Linear previsions (expectation operators from mass functions)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LinearPrevision:
    """A pmf-induced expectation operator; conditioning follows Bayes rule
    and is refused on events of probability zero."""

    space: Space
    masses: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.masses) != self.space.size:
            raise ValueError("mass vector length does not match its space")
        if any(p < 0 for p in self.masses):
            raise ValueError("masses must be non-negative")
        if sum(self.masses) != 1:
            raise ValueError("masses must sum to one")

    @staticmethod
    def from_masses(space: Space, masses) -> "LinearPrevision":
        if isinstance(masses, dict):
            vec = tuple(as_fraction(masses.get(x, 0)) for x in space.outcomes)
        else:
            vec = tuple(as_fraction(v) for v in masses)
        return LinearPrevision(space, vec)

    @staticmethod
    def uniform(space: Space) -> "LinearPrevision":
        share = Fraction(1, space.size)
        return LinearPrevision(space, (share,) * space.size)

    def mass(self, outcome: str) -> Fraction:
        return self.masses[self.space.index(outcome)]

    def probability(self, event: Event) -> Fraction:
        if event.space != self.space:
            raise SpaceMismatchError("event on a different space")
        return sum((self.masses[self.space.index(x)] for x in event.members), _ZERO)

    def expectation(self, f: Gamble) -> Fraction:
        if f.space != self.space:
            raise SpaceMismatchError("gamble on a different space")
        return sum((p * v for p, v in zip(self.masses, f.values)), _ZERO)

    def conditional(self, f: Gamble, event: Event) -> Fraction:
        """Renormalised expectation; defined only when the event has
        positive probability."""
        event.require_nonempty()
        pb = self.probability(event)
        if pb == 0:
            raise BeyondSupportError(event)
        return self.expectation(f * indicator(event)) / pb

    def __call__(self, f: Gamble, event: Optional[Event] = None) -> Fraction:
        if event is None or event.is_full:
            return self.expectation(f)
        return self.conditional(f, event)

    def as_assessment(self) -> Assessment:
        """Self-conjugate singleton-indicator entries pinning this pmf as the
        unique dominating mass function."""
        entries = tuple(
            AssessmentEntry(
                gamble=indicator(atom),
                event=self.space.full_event(),
                lower=self.probability(atom),
                linear=True,
            )
            for atom in self.space.atoms()
        )
        return Assessment(self.space, entries)

    def as_lower_prevision(self) -> ConditionalLowerPrevision:
        return ConditionalLowerPrevision(self.as_assessment())


def envelope_assessment(
    space: Space,
    pmfs: Sequence[LinearPrevision],
    pairs: Sequence[tuple[Gamble, Optional[Event]]],
) -> Assessment:
    """Assess each (gamble, event) pair at the lower envelope of the given
    pmfs; every event must have positive probability under each pmf.  The
    result is coherent by construction."""
    entries = []
    for f, event in pairs:
        ev = event if event is not None else space.full_event()
        value = min(p(f, ev) for p in pmfs)
        entries.append(AssessmentEntry(gamble=f, event=ev, lower=value))
    return Assessment(space, tuple(entries))


# ---------------------------------------------------------------------------
# Axiom checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AxiomCheck:
    axiom: str
    description: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class AxiomReport:
    checks: tuple[AxiomCheck, ...]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[AxiomCheck]:
        return [c for c in self.checks if not c.passed]


@dataclass(frozen=True)
class AxiomSample:
    """Inputs for one round of axiom checks; events must be non-empty and
    representable (positive upper probability) for the conditional values
    to be defined."""

    f: Gamble
    g: Gamble
    event_a: Event
    event_b: Event
    scale: Fraction
    shift: Fraction


def check_axioms(prev: ConditionalLowerPrevision, samples: Sequence[AxiomSample]) -> AxiomReport:
    """Evaluate the standard coherence properties of the natural extension
    on the given samples, exactly.

    Covered: lower bound by the conditional infimum, non-negative
    homogeneity, superadditivity, the generalised Bayes rule, the uniform
    continuity bound in its finite-space form, constant additivity,
    monotonicity, and lower <= upper conjugacy.
    """
    checks: list[AxiomCheck] = []

    def add(axiom: str, description: str, passed: bool, detail: str = "") -> None:
        checks.append(AxiomCheck(axiom, description, passed, detail))

    for s in samples:
        f, g, a, b = s.f, s.g, s.event_a, s.event_b
        lam, mu = s.scale, s.shift
        lf_b = prev.lower(f, b)

        add("LP1", "lower(f|B) >= min of f over B", lf_b >= f.min_over(b), f"value {lf_b}")
        add(
            "LP2",
            "lower(scale*f|B) = scale*lower(f|B) for scale >= 0",
            prev.lower(f * lam, b) == lam * lf_b,
        )
        add(
            "LP3",
            "lower(f+g|B) >= lower(f|B) + lower(g|B)",
            prev.lower(f + g, b) >= lf_b + prev.lower(g, b),
        )
        ab = a.intersect(b)
        if not ab.is_empty:
            inner = prev.lower(f, ab)
            gbr = prev.lower((f - inner) * indicator(b), a)
            add("LP4", "generalised Bayes rule: lower(I_B[f - lower(f|A&B)] | A) = 0", gbr == 0, f"value {gbr}")
        bound = (f - g).abs().max_over(b)
        add(
            "LP5",
            "|lower(f|B) - lower(g|B)| <= max |f-g| over B",
            abs(lf_b - prev.lower(g, b)) <= bound,
        )
        add("LP6", "lower(f + mu|B) = lower(f|B) + mu", prev.lower(f + mu, b) == lf_b + mu)
        if all((f - g).values[f.space.index(x)] >= 0 for x in b.members):
            add("LP7", "f >= g on B implies lower(f|B) >= lower(g|B)", lf_b >= prev.lower(g, b))
        else:
            h = g + (f - g).min_over(b)  # h <= f on B by construction
            add("LP7", "f >= g on B implies lower(f|B) >= lower(g|B)", lf_b >= prev.lower(h, b))
        add("LP8", "lower(f|B) <= upper(f|B)", lf_b <= prev.upper(f, b))

    return AxiomReport(tuple(checks))
