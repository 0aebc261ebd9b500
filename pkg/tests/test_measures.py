import math
import random
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from commlb.core import InputDistribution, ValidationError
from commlb.measures import (
    Channel,
    InfoValue,
    internal_cost,
    log2_exact,
    renyi_inf_cost,
    renyi_inf_mi,
    shannon_cost_of_pseudotranscript,
    shannon_mi,
)
from commlb.pseudotranscript import Pseudotranscript

from conftest import random_pseudotranscript, random_mu


def oracle_column_max_sum(rows) -> Fraction:
    """Independent evaluation of the order-infinity argument of a channel."""
    n_cols = len(rows[0])
    total = Fraction(0)
    for b in range(n_cols):
        total += max(row[b] for row in rows)
    return total


def oracle_shannon_mi(joint) -> float:
    """Plain double-sum evaluation of I(A;B)."""
    n, m = len(joint), len(joint[0])
    pa = [sum(joint[a][b] for b in range(m)) for a in range(n)]
    pb = [sum(joint[a][b] for a in range(n)) for b in range(m)]
    bits = 0.0
    for a in range(n):
        for b in range(m):
            p = joint[a][b]
            if p:
                bits += float(p) * math.log2(float(p) / (float(pa[a]) * float(pb[b])))
    return bits


@st.composite
def joints(draw, max_side=4, min_weight=0):
    n = draw(st.integers(1, max_side))
    m = draw(st.integers(1, max_side))
    weights = draw(
        st.lists(
            st.lists(st.integers(min_weight, 8), min_size=m, max_size=m),
            min_size=n,
            max_size=n,
        )
    )
    assume(any(any(row) for row in weights))
    total = sum(sum(row) for row in weights)
    return [[Fraction(v, total) for v in row] for row in weights]


@st.composite
def channels(draw, max_side=4):
    n = draw(st.integers(1, max_side))
    m = draw(st.integers(1, max_side))
    rows = []
    for _ in range(n):
        weights = draw(st.lists(st.integers(0, 8), min_size=m, max_size=m))
        assume(any(weights))
        total = sum(weights)
        rows.append([Fraction(v, total) for v in weights])
    return Channel.of(rows)


class TestRenyiCost:
    def test_identity_channel(self):
        ch = Channel.of(
            [[Fraction(1 if i == j else 0) for j in range(4)] for i in range(4)]
        )
        iv = renyi_inf_cost(ch)
        assert iv.exact_argument == 4 and iv.bits == 2.0

    def test_constant_channel(self):
        iv = renyi_inf_cost(Channel.of([[Fraction(1)], [Fraction(1)]]))
        assert iv.exact_argument == 1 and iv.bits == 0.0

    def test_two_outcome_example(self):
        rows = [
            [Fraction(1, 2), Fraction(1, 2)],
            [Fraction(1), Fraction(0)],
        ]
        assert oracle_column_max_sum(rows) == Fraction(3, 2)
        iv = renyi_inf_cost(Channel.of(rows))
        assert iv.exact_argument == Fraction(3, 2)

    def test_channel_row_sum_enforced(self):
        with pytest.raises(ValidationError):
            Channel.of([[Fraction(1, 2), Fraction(1, 3)]])

    @given(channels())
    @settings(max_examples=60, deadline=None)
    def test_argument_matches_oracle(self, ch):
        assert renyi_inf_cost(ch).exact_argument == oracle_column_max_sum(ch.probs)

    @given(channels(max_side=4))
    @settings(max_examples=60, deadline=None)
    def test_merging_outcomes_never_increases_argument(self, ch):
        if ch.n_outcomes < 2:
            return
        merged_rows = [
            (row[0] + row[1],) + tuple(row[2:]) for row in ch.probs
        ]
        before = renyi_inf_cost(ch).exact_argument
        after = renyi_inf_cost(Channel.of(merged_rows)).exact_argument
        assert after <= before


class TestRenyiMi:
    def test_independent_uniform_bits(self):
        q = Fraction(1, 4)
        iv = renyi_inf_mi([[q, q], [q, q]])
        assert iv.exact_argument == 1 and iv.bits == 0.0

    def test_identical_uniform_triple(self):
        third = Fraction(1, 3)
        joint = [
            [third if i == j else Fraction(0) for j in range(3)] for i in range(3)
        ]
        assert renyi_inf_mi(joint).bits == pytest.approx(math.log2(3), abs=1e-12)

    def test_zero_mass_row_excluded_from_max(self):
        # row 0 would dominate outcome 0 as a channel, but it carries no mass
        joint = [
            [Fraction(0), Fraction(0)],
            [Fraction(1, 2), Fraction(1, 2)],
        ]
        assert renyi_inf_mi(joint).exact_argument == 1
        as_channel = Channel.of([[Fraction(1), Fraction(0)], [Fraction(1, 2), Fraction(1, 2)]])
        assert renyi_inf_cost(as_channel).exact_argument == Fraction(3, 2)

    def test_degenerate_joint_rejected(self):
        with pytest.raises(ValidationError):
            renyi_inf_mi([[Fraction(0)]])

    @given(joints(min_weight=1))
    @settings(max_examples=60, deadline=None)
    def test_full_support_agrees_with_channel_form(self, joint):
        row_mass = [sum(row) for row in joint]
        channel = Channel.of(
            [[p / row_mass[a] for p in row] for a, row in enumerate(joint)]
        )
        assert renyi_inf_mi(joint).exact_argument == renyi_inf_cost(channel).exact_argument


class TestShannonMi:
    def test_independent_is_zero(self):
        q = Fraction(1, 4)
        assert abs(shannon_mi([[q, q], [q, q]])) <= 1e-12

    def test_xor_of_uniform_bits_is_one_bit(self):
        # rows: (x,y) pairs, cols: q = x xor y
        quarter = Fraction(1, 4)
        joint = [
            [quarter, Fraction(0)],
            [Fraction(0), quarter],
            [Fraction(0), quarter],
            [quarter, Fraction(0)],
        ]
        assert shannon_mi(joint) == pytest.approx(1.0, abs=1e-12)

    def test_binary_symmetric_channel_value(self):
        joint = [
            [Fraction(3, 8), Fraction(1, 8)],
            [Fraction(1, 8), Fraction(3, 8)],
        ]
        expected = oracle_shannon_mi(joint)
        value = shannon_mi(joint)
        assert value == pytest.approx(expected, abs=1e-12)
        assert value == pytest.approx(0.18872187554086717, abs=1e-12)

    @given(joints())
    @settings(max_examples=80, deadline=None)
    def test_nonnegative_and_below_renyi(self, joint):
        value = shannon_mi(joint)
        assert value >= -1e-12
        assert value <= renyi_inf_mi(joint).bits + 1e-9

    @given(joints())
    @settings(max_examples=60, deadline=None)
    def test_outcome_relabeling_invariance(self, joint):
        reversed_cols = [list(reversed(row)) for row in joint]
        assert shannon_mi(joint) == pytest.approx(shannon_mi(reversed_cols), abs=1e-12)


class TestPseudotranscriptCosts:
    def test_constant_outcome_costs_nothing(self):
        ones = ((Fraction(1), Fraction(1)), (Fraction(1), Fraction(1)))
        q = Pseudotranscript.of(2, 2, 1, [(0, ones)])
        mu = InputDistribution.uniform(2, 2)
        assert shannon_cost_of_pseudotranscript(q, mu) == pytest.approx(0.0, abs=1e-12)
        assert internal_cost(q, mu) == pytest.approx(0.0, abs=1e-12)

    def test_revealing_x_costs_one_bit_both_ways(self):
        one, zero = Fraction(1), Fraction(0)
        q = Pseudotranscript.of(
            2,
            2,
            1,
            [
                (0, ((one, one), (zero, zero))),
                (0, ((zero, zero), (one, one))),
            ],
        )
        mu = InputDistribution.uniform(2, 2)
        assert shannon_cost_of_pseudotranscript(q, mu) == pytest.approx(1.0, abs=1e-12)
        assert internal_cost(q, mu) == pytest.approx(1.0, abs=1e-12)

    def test_costs_are_nonnegative_on_random_instances(self):
        rng = random.Random(11)
        for _ in range(40):
            x_size, y_size = rng.randint(1, 3), rng.randint(1, 3)
            q = random_pseudotranscript(rng, x_size, y_size, 2)
            mu = random_mu(rng, x_size, y_size)
            assert shannon_cost_of_pseudotranscript(q, mu) >= -1e-12
            assert internal_cost(q, mu) >= -1e-12


class TestInfoValue:
    @given(st.fractions(min_value=Fraction(1, 10**6), max_value=Fraction(10**6)))
    def test_bits_match_log_of_argument(self, argument):
        iv = InfoValue.from_argument(argument)
        assert iv.bits == pytest.approx(math.log2(float(argument)), rel=1e-12, abs=1e-12)

    def test_log2_exact_handles_zero_and_big_values(self):
        assert log2_exact(Fraction(0)) == float("-inf")
        assert log2_exact(Fraction(2**4000)) == pytest.approx(4000.0)
        assert log2_exact(Fraction(1, 2**4000)) == pytest.approx(-4000.0)
        with pytest.raises(ValidationError):
            log2_exact(Fraction(-1))
