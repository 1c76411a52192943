"""Epistemic independence and the independent natural extension.

Two marginal models on finite spaces are combined into the smallest
epistemically independent joint model.  The strength of the independence
assessment is set by a conditioning-event family per factor: atoms
(singleton events), all non-empty events, or a custom list taken
literally.  On a finite space, closing a family under finite disjoint
unions never changes the joint values, so the all-events family is
realised through the atoms during construction; an audit switch
materialises every subset instead, which is how that equivalence is
tested rather than assumed.

The joint cone is generated by the marginal generators conditioned on
family events:

    ext(g2) * ext(indicator(B1))   for g2 a right-marginal generator,
                                       B1 in family1 or B1 = X1,
    ext(g1) * ext(indicator(B2))   symmetrically.

Joint lower previsions are exact LP optima over this cone.  With coherent
marginals the joint is coherent, reproduces the marginals, and satisfies
factorisation and external additivity; those statements are executable
properties, exercised by the test suites.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .cones import DesirableCone
from .measurability import require_measurable
from .prevision import (
    ConditionalLowerPrevision,
    LinearPrevision,
    lower_prevision,
)
from .spaces import (
    Event,
    Gamble,
    ProductSpace,
    Space,
    SpaceMismatchError,
    cylinder_event,
    cylindrical_extension,
    indicator,
    product_space,
)

ATOMS = "atoms"
ALL_NONEMPTY = "all"
CUSTOM = "custom"


class IncoherentMarginalError(ValueError):
    """A marginal model failed its coherence check."""


@dataclass(frozen=True)
class EventFamily:
    """A set of non-empty conditioning events on one factor space."""

    space: Space
    kind: str
    custom_events: tuple[Event, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in (ATOMS, ALL_NONEMPTY, CUSTOM):
            raise ValueError(f"unknown family kind {self.kind!r}")
        for e in self.custom_events:
            if e.space != self.space:
                raise SpaceMismatchError("family event on a different space")
            e.require_nonempty()
        if self.kind != CUSTOM and self.custom_events:
            raise ValueError("explicit events are only allowed for custom families")

    @staticmethod
    def atoms(space: Space) -> "EventFamily":
        return EventFamily(space, ATOMS)

    @staticmethod
    def all_nonempty(space: Space) -> "EventFamily":
        return EventFamily(space, ALL_NONEMPTY)

    @staticmethod
    def custom(space: Space, events: Iterable[Event]) -> "EventFamily":
        return EventFamily(space, CUSTOM, tuple(events))

    @staticmethod
    def empty(space: Space) -> "EventFamily":
        return EventFamily(space, CUSTOM, ())

    def events(self) -> tuple[Event, ...]:
        """The family members, materialised (exponentially many for 'all')."""
        if self.kind == ATOMS:
            return self.space.atoms()
        if self.kind == ALL_NONEMPTY:
            outcomes = self.space.outcomes
            members = []
            for size in range(1, len(outcomes) + 1):
                for subset in itertools.combinations(outcomes, size):
                    members.append(Event(self.space, frozenset(subset)))
            return tuple(members)
        return self.custom_events

    def generator_events(self, audit: bool = False) -> tuple[Event, ...]:
        """Events used to build joint generators.  The all-events family
        rides on the atoms (finite disjoint unions add nothing) unless the
        audit flag forces full materialisation."""
        if self.kind == ALL_NONEMPTY and not audit:
            return self.space.atoms()
        return self.events()


def _joint_generators(
    left: DesirableCone,
    right: DesirableCone,
    left_family: EventFamily,
    right_family: EventFamily,
    prod: ProductSpace,
    audit_families: bool = False,
) -> tuple[Gamble, ...]:
    gens: list[Gamble] = []
    left_events = list(left_family.generator_events(audit_families)) + [prod.left.full_event()]
    right_events = list(right_family.generator_events(audit_families)) + [prod.right.full_event()]
    for g2 in right.generators:
        ext_g2 = cylindrical_extension(g2, prod, "right")
        for b1 in left_events:
            gens.append(ext_g2 * cylindrical_extension(indicator(b1), prod, "left"))
    for g1 in left.generators:
        ext_g1 = cylindrical_extension(g1, prod, "left")
        for b2 in right_events:
            gens.append(ext_g1 * cylindrical_extension(indicator(b2), prod, "right"))
    return tuple(gens)


@dataclass(frozen=True)
class IndependentProductCone:
    """The independent natural extension of two marginal cones."""

    prod: ProductSpace
    left_marginal: DesirableCone
    right_marginal: DesirableCone
    left_family: EventFamily
    right_family: EventFamily
    joint: DesirableCone

    def contains(self, f: Gamble) -> bool:
        return self.joint.contains(f)

    def marginal_view(self, side: str) -> "MarginalConeView":
        return MarginalConeView(self.joint, self.prod, side)

    def conditional_view(self, side: str, other_event: Event) -> "MarginalConeView":
        return MarginalConeView(self.joint, self.prod, side, other_event)


def independent_product_cone(
    left: DesirableCone,
    right: DesirableCone,
    left_family: Optional[EventFamily] = None,
    right_family: Optional[EventFamily] = None,
    prod: Optional[ProductSpace] = None,
    validate: bool = True,
    audit_families: bool = False,
) -> IndependentProductCone:
    """Build the joint cone of the independent natural extension.

    With validate=True each marginal must pass its strict coherence check
    (no non-positive element).  Callers combining boundary or
    self-conjugate marginal cones, which legitimately contain the zero
    gamble, pass validate=False and rely on assessment-level checks.
    """
    left_family = left_family or EventFamily.atoms(left.space)
    right_family = right_family or EventFamily.atoms(right.space)
    if left_family.space != left.space or right_family.space != right.space:
        raise SpaceMismatchError("family space does not match its marginal")
    if validate:
        for name, cone in (("left", left), ("right", right)):
            if not cone.is_coherent():
                raise IncoherentMarginalError(f"{name} marginal cone is incoherent")
    prod = prod or product_space(left.space, right.space)
    gens = _joint_generators(left, right, left_family, right_family, prod, audit_families)
    return IndependentProductCone(
        prod=prod,
        left_marginal=left,
        right_marginal=right,
        left_family=left_family,
        right_family=right_family,
        joint=DesirableCone(prod, gens),
    )


@dataclass(frozen=True)
class MarginalConeView:
    """A queryable marginal or conditional cone of a joint cone.

    Membership of a factor gamble f means membership of its cylindrical
    extension (times the indicator of the other-factor conditioning event)
    in the joint cone; nothing is materialised.
    """

    joint: DesirableCone
    prod: ProductSpace
    side: str
    other_event: Optional[Event] = None

    def __post_init__(self) -> None:
        if self.other_event is not None:
            other = self.prod.factor("right" if self.side == "left" else "left")
            if self.other_event.space != other:
                raise SpaceMismatchError("conditioning event on the wrong factor")
            self.other_event.require_nonempty()

    @property
    def space(self) -> Space:
        return self.prod.factor(self.side)

    def contains(self, f: Gamble) -> bool:
        lifted = cylindrical_extension(f, self.prod, self.side)
        if self.other_event is not None and not self.other_event.is_full:
            other_side = "right" if self.side == "left" else "left"
            lifted = lifted * cylindrical_extension(
                indicator(self.other_event), self.prod, other_side
            )
        return self.joint.contains(lifted)


def marginal_view(joint: DesirableCone, prod: ProductSpace, side: str) -> MarginalConeView:
    return MarginalConeView(joint, prod, side)


def conditional_view(
    joint: DesirableCone, prod: ProductSpace, side: str, other_event: Event
) -> MarginalConeView:
    return MarginalConeView(joint, prod, side, other_event)


# ---------------------------------------------------------------------------
# Independent natural extension of lower previsions
# ---------------------------------------------------------------------------


class IndependentNaturalExtension:
    """The joint lower prevision of two coherent marginal assessments under
    an epistemic-independence assessment.

    Queries run over the joint cone built from the marginal natural
    extension cones; the restriction to either factor reproduces the local
    natural extension, and conditioning on family events of the other
    factor leaves local values unchanged.
    """

    def __init__(
        self,
        left: ConditionalLowerPrevision,
        right: ConditionalLowerPrevision,
        left_family: Optional[EventFamily] = None,
        right_family: Optional[EventFamily] = None,
        audit_families: bool = False,
        check_marginals: bool = True,
    ):
        if check_marginals:
            for name, model in (("left", left), ("right", right)):
                if not model.is_coherent():
                    raise IncoherentMarginalError(
                        f"{name} marginal assessment is incoherent: "
                        f"{model.coherence.violation.kind}"
                    )
        self.left = left
        self.right = right
        self.prod = product_space(left.space, right.space)
        self.left_family = left_family or EventFamily.atoms(left.space)
        self.right_family = right_family or EventFamily.atoms(right.space)
        self.product_cone = independent_product_cone(
            left.cone,
            right.cone,
            self.left_family,
            self.right_family,
            prod=self.prod,
            validate=False,
            audit_families=audit_families,
        )

    @property
    def joint_cone(self) -> DesirableCone:
        return self.product_cone.joint

    def lower(self, f: Gamble, event: Optional[Event] = None) -> Fraction:
        return lower_prevision(self.joint_cone, f, event)

    def upper(self, f: Gamble, event: Optional[Event] = None) -> Fraction:
        return -self.lower(-f, event)

    # -- lifting helpers ----------------------------------------------------

    def lift(self, f: Gamble) -> Gamble:
        """Cylindrically extend a factor gamble to the product space."""
        if f.space == self.prod.left:
            return cylindrical_extension(f, self.prod, "left")
        if f.space == self.prod.right:
            return cylindrical_extension(f, self.prod, "right")
        if f.space == self.prod:
            return f
        raise SpaceMismatchError("gamble belongs to neither factor nor the product")

    def lift_event(self, event: Event) -> Event:
        if event.space == self.prod.left:
            return cylinder_event(event, self.prod, "left")
        if event.space == self.prod.right:
            return cylinder_event(event, self.prod, "right")
        if event.space == self.prod:
            return event
        raise SpaceMismatchError("event belongs to neither factor nor the product")


def independent_lower_prevision(
    left: ConditionalLowerPrevision,
    right: ConditionalLowerPrevision,
    f: Gamble,
    event: Optional[Event] = None,
    left_family: Optional[EventFamily] = None,
    right_family: Optional[EventFamily] = None,
    upper: bool = False,
) -> Fraction:
    """One-shot joint query; marginal coherence is checked first."""
    ine = IndependentNaturalExtension(left, right, left_family, right_family)
    f = ine.lift(f)
    if event is not None:
        event = ine.lift_event(event)
    return ine.upper(f, event) if upper else ine.lower(f, event)


# ---------------------------------------------------------------------------
# Epistemic-independence verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IndependenceCheck:
    side: str
    gamble: Gamble
    local_event: Event
    other_event: Event
    unconditional: Fraction
    conditioned: Fraction

    @property
    def equal(self) -> bool:
        return self.unconditional == self.conditioned


@dataclass(frozen=True)
class IndependenceReport:
    checks: tuple[IndependenceCheck, ...]

    @property
    def all_equal(self) -> bool:
        return all(c.equal for c in self.checks)

    def violations(self) -> list[IndependenceCheck]:
        return [c for c in self.checks if not c.equal]


def check_epistemic_independence(
    joint: "IndependentNaturalExtension | JointModel",
    left_family: EventFamily,
    right_family: EventFamily,
    samples: Sequence[tuple[str, Gamble, Optional[Event]]],
) -> IndependenceReport:
    """Compare local conditional values with and without extra conditioning
    on family events of the other factor, exactly.

    ``samples`` holds (side, local gamble, local event or None) triples;
    the caller chooses the local domain to probe.
    """
    prod = joint.prod
    checks = []
    for side, f, local_event in samples:
        factor = prod.factor(side)
        if f.space != factor:
            raise SpaceMismatchError(f"sample gamble is not on the {side} factor")
        local_event = local_event if local_event is not None else factor.full_event()
        other_side = "right" if side == "left" else "left"
        family = right_family if side == "left" else left_family
        lifted_f = cylindrical_extension(f, prod, side)
        base_event = cylinder_event(local_event, prod, side)
        base = joint.lower(lifted_f, base_event)
        for b_other in family.events():
            joint_event = base_event.intersect(cylinder_event(b_other, prod, other_side))
            value = joint.lower(lifted_f, joint_event)
            checks.append(
                IndependenceCheck(
                    side=side,
                    gamble=f,
                    local_event=local_event,
                    other_event=b_other,
                    unconditional=base,
                    conditioned=value,
                )
            )
    return IndependenceReport(tuple(checks))


class JointModel:
    """A direct joint assessment on a product space, queryable like an
    independent natural extension; used to probe non-independent models."""

    def __init__(self, prevision: ConditionalLowerPrevision, prod: ProductSpace):
        if prevision.space != prod:
            raise SpaceMismatchError("assessment is not on the product space")
        self.prevision = prevision
        self.prod = prod

    def lower(self, f: Gamble, event: Optional[Event] = None) -> Fraction:
        return self.prevision.lower(f, event)

    def upper(self, f: Gamble, event: Optional[Event] = None) -> Fraction:
        return self.prevision.upper(f, event)


# ---------------------------------------------------------------------------
# Factorisation, external additivity, nested evaluation
# ---------------------------------------------------------------------------


def factorisation_closed_form(
    local_i: ConditionalLowerPrevision,
    local_j: ConditionalLowerPrevision,
    g: Gamble,
    h: Gamble,
) -> Fraction:
    """lower_i(g) * lower_j(h) when lower_j(h) >= 0, else upper_i(g) * lower_j(h),
    for non-negative g on factor i; both branches agree at zero."""
    if not g.is_nonneg:
        raise ValueError("factorisation requires a non-negative gamble g")
    c = local_j.lower(h)
    if c >= 0:
        return local_i.lower(g) * c
    return local_i.upper(g) * c


def factored_sum(
    local_i: ConditionalLowerPrevision,
    local_j: ConditionalLowerPrevision,
    family_i: EventFamily,
    f: Gamble,
    g: Gamble,
    h: Gamble,
) -> Fraction:
    """The joint value of f + g*h evaluated through local models only:
    lower_i(f + g * lower_j(h)), for g >= 0 and measurable with respect to
    the factor-i conditioning family.

    Raises MeasurabilityError (carrying a witness level set) when g is not
    family-measurable; without measurability the joint value can fall
    strictly below this closed form.
    """
    if f.space != local_i.space or g.space != local_i.space:
        raise SpaceMismatchError("f and g must live on factor i")
    if h.space != local_j.space:
        raise SpaceMismatchError("h must live on factor j")
    require_measurable(g, family_i)
    c = local_j.lower(h)
    return local_i.lower(f + g * c)


def nested_evaluation(
    inner: LinearPrevision, f: Gamble, prod: ProductSpace, inner_side: str
) -> Gamble:
    """Integrate out one factor: for inner_side='right', the gamble
    x1 -> inner(f(x1, .)) on the left factor."""
    if f.space != prod:
        raise SpaceMismatchError("gamble is not on the product space")
    outer = prod.left if inner_side == "right" else prod.right
    inner_space = prod.factor(inner_side)
    values = []
    for y in outer.outcomes:
        total = Fraction(0)
        for z in inner_space.outcomes:
            label = f"{y}|{z}" if inner_side == "right" else f"{z}|{y}"
            total += inner.mass(z) * f(label)
        values.append(total)
    return Gamble(outer, tuple(values))


@dataclass(frozen=True)
class SandwichReport:
    lower_joint: Fraction
    nested_left_of_right: Fraction
    nested_right_of_left: Fraction
    upper_joint: Fraction

    @property
    def holds(self) -> bool:
        return (
            self.lower_joint <= self.nested_left_of_right <= self.upper_joint
            and self.lower_joint <= self.nested_right_of_left <= self.upper_joint
        )


def nested_sandwich(
    left: LinearPrevision,
    right: LinearPrevision,
    f: Gamble,
    left_family: Optional[EventFamily] = None,
    right_family: Optional[EventFamily] = None,
) -> SandwichReport:
    """Exactly compare the joint lower/upper values of linear marginals with
    both nested evaluations: the nested values always sit between them."""
    ine = IndependentNaturalExtension(
        left.as_lower_prevision(),
        right.as_lower_prevision(),
        left_family,
        right_family,
    )
    if f.space != ine.prod:
        raise SpaceMismatchError("gamble is not on the product space")
    nested_lr = left.expectation(nested_evaluation(right, f, ine.prod, "right"))
    nested_rl = right.expectation(nested_evaluation(left, f, ine.prod, "left"))
    return SandwichReport(
        lower_joint=ine.lower(f),
        nested_left_of_right=nested_lr,
        nested_right_of_left=nested_rl,
        upper_joint=ine.upper(f),
    )
