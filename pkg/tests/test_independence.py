"""Independent natural extension, epistemic independence, factorisation."""

import random
from fractions import Fraction

import pytest

from desirables.cones import DesirableCone
from desirables.independence import (
    EventFamily,
    IncoherentMarginalError,
    IndependentNaturalExtension,
    JointModel,
    check_epistemic_independence,
    conditional_view,
    factorisation_closed_form,
    factored_sum,
    independent_lower_prevision,
    independent_product_cone,
    marginal_view,
    nested_evaluation,
    nested_sandwich,
)
from desirables.measurability import MeasurabilityError
from desirables.prevision import ConditionalLowerPrevision, LinearPrevision
from desirables.spaces import (
    Gamble,
    Space,
    cylindrical_extension,
    indicator,
    product_space,
)
from desirables.suites import (
    gap_instance_values,
    random_envelope_model,
    random_gamble,
    random_strict_pmf,
    restricted_family_gap_instance,
)

from oracles import sympy_lower_prevision

AB = Space("A", ("a", "b"))
UV = Space("U", ("u", "v"))


def spanning_gambles(space):
    gambles = [indicator(atom) for atom in space.atoms()]
    gambles.append(space.constant(1))
    gambles.append(space.gamble([k + 1 for k in range(space.size)]))
    return gambles


class TestEventFamilies:
    def test_atoms_are_singletons(self):
        fam = EventFamily.atoms(AB)
        assert [sorted(e.members) for e in fam.events()] == [["a"], ["b"]]

    def test_all_nonempty_materialises_every_subset(self):
        fam = EventFamily.all_nonempty(AB)
        assert len(fam.events()) == 3

    def test_all_nonempty_generates_through_atoms(self):
        fam = EventFamily.all_nonempty(AB)
        assert [sorted(e.members) for e in fam.generator_events()] == [["a"], ["b"]]
        assert len(fam.generator_events(audit=True)) == 3

    def test_custom_taken_literally(self):
        fam = EventFamily.custom(AB, (AB.event(["a"]),))
        assert [sorted(e.members) for e in fam.events()] == [["a"]]

    def test_empty_family_allowed(self):
        assert EventFamily.empty(AB).events() == ()

    def test_empty_member_rejected(self):
        with pytest.raises(ValueError):
            EventFamily.custom(AB, (AB.event([]),))


class TestProductCone:
    def test_vacuous_marginals_give_vacuous_joint(self):
        ipc = independent_product_cone(DesirableCone.vacuous(AB), DesirableCone.vacuous(UV))
        assert ipc.joint.generators == ()
        assert ipc.joint.is_coherent()

    def test_generator_shape(self):
        left = DesirableCone.from_generators(AB, [AB.gamble([-1, 2])])
        right = DesirableCone.from_generators(UV, [UV.gamble([1, -1])])
        ipc = independent_product_cone(left, right)
        # one right generator x (2 left atoms + full) + one left generator x
        # (2 right atoms + full)
        assert len(ipc.joint.generators) == 6

    def test_incoherent_marginal_rejected(self):
        bad = DesirableCone.from_generators(AB, [AB.gamble([-1, -1])])
        with pytest.raises(IncoherentMarginalError):
            independent_product_cone(bad, DesirableCone.vacuous(UV))

    def test_joint_membership_by_definition_unwinding(self):
        left = DesirableCone.from_generators(AB, [AB.gamble([-1, 2])])
        right = DesirableCone.vacuous(UV)
        ipc = independent_product_cone(left, right)
        prod = ipc.prod
        lifted = cylindrical_extension(AB.gamble([-1, 2]), prod, "left")
        assert ipc.contains(lifted)
        assert ipc.contains(lifted * cylindrical_extension(indicator(UV.event(["u"])), prod, "right"))

    def test_marginal_view_reproduces_input_memberships(self):
        rng = random.Random(2)
        left = DesirableCone.from_generators(AB, [AB.gamble([-1, 2])])
        right = DesirableCone.from_generators(UV, [UV.gamble([2, -1])])
        ipc = independent_product_cone(left, right)
        view_left = ipc.marginal_view("left")
        view_right = ipc.marginal_view("right")
        for _ in range(12):
            f = random_gamble(rng, AB)
            assert view_left.contains(f) == left.contains(f)
            g = random_gamble(rng, UV)
            assert view_right.contains(g) == right.contains(g)

    def test_view_satisfies_partial_gain_axiom(self):
        ipc = independent_product_cone(DesirableCone.vacuous(AB), DesirableCone.vacuous(UV))
        assert ipc.marginal_view("left").contains(AB.gamble([1, 0]))

    def test_conditional_view_on_full_event_is_marginal(self):
        left = DesirableCone.from_generators(AB, [AB.gamble([-1, 2])])
        ipc = independent_product_cone(left, DesirableCone.vacuous(UV))
        rng = random.Random(3)
        for _ in range(8):
            f = random_gamble(rng, AB)
            assert ipc.conditional_view("left", UV.full_event()).contains(f) == ipc.marginal_view(
                "left"
            ).contains(f)

    def test_conditional_views_match_marginals_for_independent_joint(self):
        left = DesirableCone.from_generators(AB, [AB.gamble([-1, 2])])
        right = DesirableCone.from_generators(UV, [UV.gamble([2, -1])])
        ipc = independent_product_cone(left, right)
        rng = random.Random(4)
        for b in (UV.event(["u"]), UV.event(["v"])):
            for _ in range(6):
                f = random_gamble(rng, AB)
                assert ipc.conditional_view("left", b).contains(f) == left.contains(f)

    def test_correlated_joint_views_differ(self):
        # Desiring [I_a - 1/2] only when the second coordinate is u makes
        # that bet conditionally acceptable but not marginally.
        prod = product_space(AB, UV)
        gen = cylindrical_extension(AB.gamble(["1/2", "-1/2"]), prod, "left") * cylindrical_extension(
            indicator(UV.event(["u"])), prod, "right"
        )
        joint = DesirableCone.from_generators(prod, [gen])
        f = AB.gamble(["1/2", "-1/2"])
        assert conditional_view(joint, prod, "left", UV.event(["u"])).contains(f)
        assert not marginal_view(joint, prod, "left").contains(f)

    def test_factor_swap_is_a_relabelling(self):
        left = DesirableCone.from_generators(AB, [AB.gamble([-1, 2])])
        right = DesirableCone.from_generators(UV, [UV.gamble([2, -1])])
        forward = independent_product_cone(left, right)
        backward = independent_product_cone(right, left)
        rng = random.Random(5)
        for _ in range(10):
            f = random_gamble(rng, forward.prod, span=3)
            swapped = Gamble(
                backward.prod,
                tuple(
                    f(f"{a}|{u}")
                    for u in UV.outcomes
                    for a in AB.outcomes
                ),
            )
            assert forward.contains(f) == backward.contains(swapped)


class TestJointLowerPrevisions:
    def test_marginal_gamble_gets_local_value(self):
        rng = random.Random(6)
        left, _ = random_envelope_model(rng, AB)
        right, _ = random_envelope_model(rng, UV)
        ine = IndependentNaturalExtension(left, right)
        f = random_gamble(rng, AB)
        assert ine.lower(ine.lift(f)) == left.lower(f)

    def test_conditioning_on_other_factor_family_event_is_irrelevant(self):
        rng = random.Random(7)
        left, _ = random_envelope_model(rng, AB)
        right, _ = random_envelope_model(rng, UV)
        ine = IndependentNaturalExtension(left, right)
        f = random_gamble(rng, AB)
        for member in ("u", "v"):
            event = ine.lift_event(UV.event([member]))
            assert ine.lower(ine.lift(f), event) == left.lower(f)

    def test_incoherent_marginal_rejected(self):
        bad = ConditionalLowerPrevision.from_entries(
            AB, [(AB.gamble([1, 0]), None, "2/3"), (AB.gamble([0, 1]), None, "2/3")]
        )
        good, _ = random_envelope_model(random.Random(8), UV)
        with pytest.raises(IncoherentMarginalError):
            IndependentNaturalExtension(bad, good)

    def test_xor_of_linear_marginals(self):
        # Regression value confirmed by the independent sympy route below:
        # the joint constraint polytope of these two linear marginals is the
        # single product measure, so the XOR indicator gets 1/2 exactly.
        p1 = LinearPrevision.from_masses(AB, ["1/2", "1/2"])
        p2 = LinearPrevision.from_masses(UV, ["1/3", "2/3"])
        ine = IndependentNaturalExtension(p1.as_lower_prevision(), p2.as_lower_prevision())
        xor = ine.prod.gamble({"a|u": 0, "a|v": 1, "b|u": 1, "b|v": 0})
        assert ine.lower(xor) == Fraction(1, 2)
        assert ine.upper(xor) == Fraction(1, 2)
        oracle = sympy_lower_prevision(
            ine.prod, ine.joint_cone.generators, xor, ine.prod.full_event()
        )
        assert oracle == Fraction(1, 2)

    def test_one_shot_helper_matches_class(self):
        rng = random.Random(9)
        left, _ = random_envelope_model(rng, AB)
        right, _ = random_envelope_model(rng, UV)
        f = random_gamble(rng, AB)
        ine = IndependentNaturalExtension(left, right)
        assert independent_lower_prevision(left, right, f) == ine.lower(ine.lift(f))


class TestEpistemicIndependenceCheck:
    def test_ine_joint_passes(self):
        rng = random.Random(10)
        left, _ = random_envelope_model(rng, AB)
        right, _ = random_envelope_model(rng, UV)
        fam1, fam2 = EventFamily.atoms(AB), EventFamily.atoms(UV)
        ine = IndependentNaturalExtension(left, right, fam1, fam2)
        samples = [
            ("left", random_gamble(rng, AB), None),
            ("left", random_gamble(rng, AB), AB.event(["a"])),
            ("right", random_gamble(rng, UV), None),
        ]
        report = check_epistemic_independence(ine, fam1, fam2, samples)
        assert report.all_equal

    def test_correlated_joint_fails(self):
        # A comonotone credal joint: all mass on the diagonal.
        prod = product_space(AB, UV)
        joint = ConditionalLowerPrevision.from_entries(
            prod,
            [
                (indicator(prod.event(["a|u"])), None, "1/2"),
                (indicator(prod.event(["b|v"])), None, "1/2"),
            ],
        )
        model = JointModel(joint, prod)
        report = check_epistemic_independence(
            model,
            EventFamily.atoms(AB),
            EventFamily.atoms(UV),
            [("left", AB.gamble([1, 0]), None)],
        )
        assert not report.all_equal
        # Conditioning on U = u reveals the first coordinate completely.
        bad = [c for c in report.violations() if sorted(c.other_event.members) == ["u"]]
        assert bad and bad[0].unconditional == Fraction(1, 2) and bad[0].conditioned == 1

    def test_trivial_on_full_event(self):
        rng = random.Random(12)
        left, _ = random_envelope_model(rng, AB)
        right, _ = random_envelope_model(rng, UV)
        fam_full = EventFamily.custom(UV, (UV.full_event(),))
        ine = IndependentNaturalExtension(left, right, EventFamily.atoms(AB), fam_full)
        report = check_epistemic_independence(
            ine, EventFamily.atoms(AB), fam_full, [("left", random_gamble(rng, AB), None)]
        )
        assert report.all_equal


class TestFactorisation:
    def test_zero_inner_value_gives_zero(self):
        rng = random.Random(14)
        left, _ = random_envelope_model(rng, AB)
        right = LinearPrevision.from_masses(UV, ["1/2", "1/2"]).as_lower_prevision()
        h = UV.gamble([1, -1])  # expectation zero
        g = AB.gamble([1, 2])
        assert right.lower(h) == 0
        assert factorisation_closed_form(left, right, g, h) == 0

    def test_unit_g_returns_inner_value(self):
        rng = random.Random(15)
        left, _ = random_envelope_model(rng, AB)
        right, _ = random_envelope_model(rng, UV)
        h = random_gamble(rng, UV)
        assert factorisation_closed_form(left, right, AB.constant(1), h) == right.lower(h)

    def test_negative_branch_uses_upper(self):
        left = ConditionalLowerPrevision.from_entries(
            AB, [(AB.gamble([1, 0]), None, "1/4"), (AB.gamble([0, 1]), None, "1/4")]
        )
        right = ConditionalLowerPrevision.from_entries(
            UV, [(UV.gamble([1, -1]), None, "-1/2")]
        )
        g = AB.gamble([1, 0])
        h = UV.gamble([1, -1])
        assert left.lower(g) == Fraction(1, 4) and left.upper(g) == Fraction(3, 4)
        assert right.lower(h) == Fraction(-1, 2)
        assert factorisation_closed_form(left, right, g, h) == Fraction(-3, 8)

    def test_negative_g_rejected(self):
        rng = random.Random(16)
        left, _ = random_envelope_model(rng, AB)
        right, _ = random_envelope_model(rng, UV)
        with pytest.raises(ValueError):
            factorisation_closed_form(left, right, AB.gamble([-1, 0]), UV.gamble([1, 0]))

    def test_factored_sum_matches_joint_value(self):
        rng = random.Random(17)
        left, _ = random_envelope_model(rng, AB)
        right, _ = random_envelope_model(rng, UV)
        fam = EventFamily.atoms(AB)
        f = random_gamble(rng, AB)
        g = AB.gamble(["1/2", "2"])  # atom-measurable: every gamble is
        h = random_gamble(rng, UV)
        ine = IndependentNaturalExtension(left, right, fam, EventFamily.atoms(UV))
        lhs = ine.lower(ine.lift(f) + ine.lift(g) * ine.lift(h))
        assert lhs == factored_sum(left, right, fam, f, g, h)

    def test_factored_sum_rejects_non_measurable_g(self):
        rng = random.Random(18)
        x3 = Space("T", ("1", "2", "3"))
        left, _ = random_envelope_model(rng, x3)
        right, _ = random_envelope_model(rng, UV)
        fam = EventFamily.custom(x3, (x3.event(["1"]),))
        g = x3.gamble([1, 0, 1])
        with pytest.raises(MeasurabilityError) as err:
            factored_sum(left, right, fam, x3.zero(), g, UV.gamble([1, 0]))
        assert err.value.level == 1
        assert sorted(err.value.level_set.members) == ["1", "3"]

    def test_external_additivity_even_with_empty_families(self):
        rng = random.Random(19)
        left, _ = random_envelope_model(rng, AB)
        right, _ = random_envelope_model(rng, UV)
        ine = IndependentNaturalExtension(
            left, right, EventFamily.empty(AB), EventFamily.empty(UV)
        )
        f = random_gamble(rng, AB)
        h = random_gamble(rng, UV)
        assert ine.lower(ine.lift(f) + ine.lift(h)) == left.lower(f) + right.lower(h)


class TestRestrictedFamilyGap:
    def test_committed_instance(self):
        inst = restricted_family_gap_instance()
        custom_value, all_value = gap_instance_values()
        assert custom_value == inst.expected_custom_value == Fraction(1, 9)
        assert all_value == inst.expected_all_value == Fraction(2, 9)
        assert custom_value < all_value

    def test_oracle_recomputes_both_sides(self):
        inst = restricted_family_gap_instance()
        for families, expected in (
            ((inst.left_family, inst.right_family), inst.expected_custom_value),
            (
                (
                    EventFamily.all_nonempty(inst.left.space),
                    EventFamily.all_nonempty(inst.right.space),
                ),
                inst.expected_all_value,
            ),
        ):
            ine = IndependentNaturalExtension(
                inst.left.as_lower_prevision(),
                inst.right.as_lower_prevision(),
                families[0],
                families[1],
                audit_families=True,
            )
            target = ine.lift(inst.odd) * ine.lift(inst.even)
            oracle = sympy_lower_prevision(
                ine.prod, ine.joint_cone.generators, target, ine.prod.full_event()
            )
            assert oracle == expected == ine.lower(target)


class TestNestedSandwich:
    def test_marginal_gamble_collapses_the_sandwich(self):
        p1 = LinearPrevision.from_masses(AB, ["1/3", "2/3"])
        p2 = LinearPrevision.from_masses(UV, ["1/2", "1/2"])
        prod = product_space(AB, UV)
        f = cylindrical_extension(AB.gamble([3, -3]), prod, "left")
        report = nested_sandwich(p1, p2, f)
        expected = p1.expectation(AB.gamble([3, -3]))
        assert (
            report.lower_joint
            == report.nested_left_of_right
            == report.nested_right_of_left
            == report.upper_joint
            == expected
        )

    def test_factorising_gamble(self):
        p1 = LinearPrevision.from_masses(AB, ["1/4", "3/4"])
        p2 = LinearPrevision.from_masses(UV, ["2/3", "1/3"])
        prod = product_space(AB, UV)
        g = AB.gamble([1, 2])
        h = UV.gamble([3, -1])
        f = cylindrical_extension(g, prod, "left") * cylindrical_extension(h, prod, "right")
        report = nested_sandwich(p1, p2, f)
        middle = p1.expectation(g) * p2.expectation(h)
        assert report.nested_left_of_right == middle
        assert report.nested_right_of_left == middle
        assert report.holds

    @pytest.mark.parametrize("seed", range(8))
    def test_generic_joint_gambles(self, seed):
        rng = random.Random(2000 + seed)
        p1 = random_strict_pmf(rng, AB)
        p2 = random_strict_pmf(rng, UV)
        prod = product_space(AB, UV)
        f = random_gamble(rng, prod)
        report = nested_sandwich(p1, p2, f)
        assert report.holds

    def test_nested_evaluation_shape(self):
        p2 = LinearPrevision.from_masses(UV, ["1/2", "1/2"])
        prod = product_space(AB, UV)
        f = prod.gamble({"a|u": 4, "a|v": 0, "b|u": 1, "b|v": 3})
        inner = nested_evaluation(p2, f, prod, "right")
        assert inner.space == AB
        assert inner.values == (Fraction(2), Fraction(2))


class TestFamilyEquivalence:
    @pytest.mark.parametrize("seed", range(5))
    def test_atoms_equal_all_nonempty_values(self, seed):
        rng = random.Random(3000 + seed)
        left, _ = random_envelope_model(rng, AB)
        right, _ = random_envelope_model(rng, UV)
        ine_atoms = IndependentNaturalExtension(
            left, right, EventFamily.atoms(AB), EventFamily.atoms(UV)
        )
        ine_all = IndependentNaturalExtension(
            left,
            right,
            EventFamily.all_nonempty(AB),
            EventFamily.all_nonempty(UV),
            audit_families=True,
        )
        for _ in range(5):
            f = random_gamble(rng, ine_atoms.prod, span=3)
            assert ine_atoms.lower(f) == ine_all.lower(f)
