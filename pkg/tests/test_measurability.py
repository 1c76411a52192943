"""Family-measurability: the simple cone, staircases, and field audits."""

import random
from fractions import Fraction

import pytest

from desirables.independence import EventFamily
from desirables.measurability import (
    SimpleGambleCone,
    family_is_field,
    generated_field,
    is_measurable,
    level_set,
    level_set_approximation,
    measurable_by_field_criterion,
    non_measurability_witness,
    require_measurable,
    split_into_disjoint,
    MeasurabilityError,
)
from desirables.spaces import Event, Space, indicator
from desirables.suites import random_measurable_gamble, random_nonneg_gamble

X4 = Space("X", ("1", "2", "3", "4"))
X6 = Space("S", tuple(str(i) for i in range(1, 7)))


class TestSimpleCone:
    def test_all_nonempty_accepts_every_nonneg_gamble(self):
        fam = EventFamily.all_nonempty(X4)
        for values in ([3, 1, 2, 0], [0, 0, 0, 0], ["1/2", "1/3", "5", "0"]):
            assert is_measurable(X4.gamble(values), fam)

    def test_empty_family_accepts_exactly_constants(self):
        fam = EventFamily.empty(X4)
        assert is_measurable(X4.constant(Fraction(7, 3)), fam)
        assert not is_measurable(X4.gamble([1, 0, 0, 0]), fam)

    def test_two_singleton_family_rejects_odd_indicator(self):
        # Outcome 3 carries value 1 but only the constant term reaches it,
        # and g(4) = 0 forces that constant to zero.
        fam = EventFamily.custom(X4, (X4.event(["1"]), X4.event(["2"])))
        assert not is_measurable(X4.gamble([1, 0, 1, 0]), fam)

    def test_negative_gamble_rejected(self):
        fam = EventFamily.all_nonempty(X4)
        with pytest.raises(ValueError):
            is_measurable(X4.gamble([-1, 0, 0, 0]), fam)

    def test_coefficients_reconstruct_exactly(self):
        fam = EventFamily.custom(X4, (X4.event(["1", "2"]), X4.event(["2", "3"])))
        g = X4.gamble([1, 2, 1, 0])  # I_{12} + I_{23}
        c0, coeffs = SimpleGambleCone(X4, fam).coefficients(g)
        rebuilt = X4.constant(c0)
        for event, c in coeffs:
            rebuilt = rebuilt + indicator(event) * c
        assert rebuilt.values == g.values

    def test_membership_can_hold_despite_an_unsplittable_level(self):
        # I_{12} + I_{23} is plainly in the cone, yet its level set at 2 is
        # the bare outcome {2}, which the family cannot assemble: level
        # splitting is sufficient, not necessary.
        fam = EventFamily.custom(X4, (X4.event(["1", "2"]), X4.event(["2", "3"])))
        g = X4.gamble([1, 2, 1, 0])
        assert is_measurable(g, fam)
        assert split_into_disjoint(level_set(g, Fraction(2)), fam) is None


class TestLevelSets:
    def test_prefix_family_approximates_reciprocal(self):
        x10 = Space("T", tuple(str(i) for i in range(1, 11)))
        prefixes = EventFamily.custom(
            x10,
            tuple(x10.event([str(j) for j in range(1, k + 1)]) for k in range(1, 11)),
        )
        g = x10.gamble([Fraction(1, i) for i in range(1, 11)])
        for n in (2, 4, 8, 16):
            approx = level_set_approximation(g, prefixes, n)
            assert approx.succeeded
            error = max(abs(a - b) for a, b in zip(approx.approximant.values, g.values))
            assert error <= approx.error_bound == (g.maximum() + 1) / n

    def test_doubling_n_halves_the_bound(self):
        fam = EventFamily.all_nonempty(X4)
        g = X4.gamble([2, 0, 1, 3])
        a_n = level_set_approximation(g, fam, 4)
        a_2n = level_set_approximation(g, fam, 8)
        assert a_2n.error_bound == a_n.error_bound / 2

    def test_odd_indicator_fails_at_level_one(self):
        fam = EventFamily.custom(X6, (X6.event(["1"]), X6.event(["2"])))
        odd = X6.gamble([1, 0, 1, 0, 1, 0])
        approx = level_set_approximation(odd, fam, 2)
        assert not approx.succeeded
        assert approx.witness_level == 1
        assert sorted(approx.witness_set.members) == ["1", "3", "5"]

    def test_witness_scan_finds_first_bad_level(self):
        fam = EventFamily.custom(X6, (X6.event(["1"]), X6.event(["2"])))
        odd = X6.gamble([1, 0, 1, 0, 1, 0])
        level, ls = non_measurability_witness(odd, fam)
        assert level == 1 and sorted(ls.members) == ["1", "3", "5"]

    def test_require_measurable_raises_with_witness(self):
        fam = EventFamily.custom(X6, (X6.event(["1"]), X6.event(["2"])))
        odd = X6.gamble([1, 0, 1, 0, 1, 0])
        with pytest.raises(MeasurabilityError) as err:
            require_measurable(odd, fam)
        assert err.value.level == 1

    @pytest.mark.parametrize("seed", range(10))
    def test_all_levels_split_implies_membership(self, seed):
        rng = random.Random(seed)
        fam = EventFamily.custom(
            X4, tuple({X4.event(["1"]), X4.event(["2", "3"]), X4.event(["4"])})
        )
        g = random_nonneg_gamble(rng, X4)
        if non_measurability_witness(g, fam) is None:
            assert is_measurable(g, fam)


class TestGeneratedField:
    def test_partition_generates_the_union_closure(self):
        fam = EventFamily.custom(X4, (X4.event(["1", "2"]), X4.event(["3"]), X4.event(["4"])))
        field = generated_field(fam)
        assert frozenset() in field and frozenset(X4.outcomes) in field
        assert len(field) == 8  # three blocks -> 2^3 unions

    def test_family_is_field_detection(self):
        blocks = (X4.event(["1", "2"]), X4.event(["3", "4"]))
        not_field = EventFamily.custom(X4, blocks)
        assert not family_is_field(not_field)
        members = [Event(X4, m) for m in generated_field(not_field) if m]
        assert family_is_field(EventFamily.custom(X4, tuple(members)))

    @pytest.mark.parametrize("seed", range(10))
    def test_field_criterion_agrees_with_cone_membership(self, seed):
        rng = random.Random(100 + seed)
        # Random partition of a 4-element space, closed into a field.
        labels = list(X4.outcomes)
        rng.shuffle(labels)
        cut = rng.randint(1, 3)
        fam0 = EventFamily.custom(X4, (X4.event(labels[:cut]), X4.event(labels[cut:])))
        members = [Event(X4, m) for m in generated_field(fam0) if m]
        field_family = EventFamily.custom(X4, tuple(members))
        assert family_is_field(field_family)
        for _ in range(6):
            g = rng.choice(
                [
                    random_nonneg_gamble(rng, X4),
                    random_measurable_gamble(rng, X4, field_family),
                ]
            )
            assert is_measurable(g, field_family) == measurable_by_field_criterion(
                g, field_family
            )
