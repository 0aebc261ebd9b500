import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from commlb.core import InputDistribution, Relation, ValidationError
from commlb.measures import renyi_inf_cost
from commlb.pseudotranscript import (
    Factorization,
    FactorizationError,
    MinorWitness,
    Pseudotranscript,
    SupportWitness,
    average_pseudotranscript_error,
    channel_of,
    check_and_factorize,
    load_pseudotranscript,
    pseudotranscript_error,
    pseudotranscript_from_json,
    pseudotranscript_to_json,
)

from conftest import random_pseudotranscript, random_mu


def F(n, d=1):
    return Fraction(n, d)


class TestCheckAndFactorize:
    def test_outer_product_accepted(self):
        alpha = (F(1, 2), F(1))
        beta = (F(1), F(1, 3))
        matrix = [[a * b for b in beta] for a in alpha]
        fact = check_and_factorize(matrix)
        assert isinstance(fact, Factorization)
        for x in range(2):
            for y in range(2):
                assert fact.product(x, y) == matrix[x][y]

    def test_diagonal_support_rejected(self):
        result = check_and_factorize([[F(1), F(0)], [F(0), F(1)]])
        assert isinstance(result, SupportWitness)
        assert set(result.present) == {(0, 0), (1, 1)}
        assert result.missing in {(0, 1), (1, 0)}

    def test_nonzero_minor_rejected(self):
        result = check_and_factorize([[F(1, 2), F(1, 4)], [F(1, 4), F(1, 2)]])
        assert isinstance(result, MinorWitness)
        # direct evaluation: (1/2)(1/2) - (1/4)(1/4)
        assert result.value == F(3, 16)

    def test_all_zero_matrix_accepted_with_zero_factors(self):
        fact = check_and_factorize([[F(0), F(0)]])
        assert isinstance(fact, Factorization)
        assert fact.alpha == (F(0),) and fact.beta == (F(0), F(0))

    def test_negative_entry_rejected(self):
        with pytest.raises(ValidationError):
            check_and_factorize([[F(-1, 2)]])

    @given(
        st.lists(st.fractions(min_value=0, max_value=4), min_size=2, max_size=4),
        st.lists(st.fractions(min_value=0, max_value=4), min_size=2, max_size=4),
        st.fractions(min_value=Fraction(1, 7), max_value=7),
    )
    @settings(max_examples=60, deadline=None)
    def test_scaling_freedom(self, alpha, beta, scale):
        matrix = [[a * b for b in beta] for a in alpha]
        fact = check_and_factorize(matrix)
        assert isinstance(fact, Factorization)
        rescaled_alpha = [a * scale for a in fact.alpha]
        rescaled_beta = [b / scale for b in fact.beta]
        for x in range(len(alpha)):
            for y in range(len(beta)):
                assert rescaled_alpha[x] * rescaled_beta[y] == matrix[x][y]


class TestPseudotranscriptValidation:
    def test_cell_mass_must_sum_to_one(self):
        with pytest.raises(ValidationError, match=r"\(0,0\)"):
            Pseudotranscript.of(1, 1, 1, [(0, ((F(1, 2),),))])

    def test_non_factorizing_outcome_rejected_with_witness(self):
        half = F(1, 2)
        mix = [
            (0, ((half, F(0)), (F(0), half))),
            (0, ((half, F(1)), (F(1), half))),
        ]
        with pytest.raises(FactorizationError) as exc:
            Pseudotranscript.of(2, 2, 1, mix)
        assert isinstance(exc.value.witness, (SupportWitness, MinorWitness))

    def test_zero_outcomes_dropped(self):
        zero = ((F(0),),)
        one = ((F(1),),)
        q = Pseudotranscript.of(1, 1, 2, [(0, zero), (1, one), (0, zero)])
        assert q.outcome_count == 1
        assert q.outcomes[0].z == 1

    def test_label_out_of_range(self):
        with pytest.raises(ValidationError):
            Pseudotranscript.of(1, 1, 1, [(3, ((F(1),),))])


class TestErrors:
    def test_supported_labels_accepted_everywhere(self, eq_relation):
        # one singleton outcome per cell, labelled with the accepted value
        outcomes = []
        for x in range(2):
            for y in range(2):
                matrix = tuple(
                    tuple(F(1) if (i, j) == (x, y) else F(0) for j in range(2))
                    for i in range(2)
                )
                outcomes.append((1 if x == y else 0, matrix))
        q = Pseudotranscript.of(2, 2, 2, outcomes)
        err = pseudotranscript_error(eq_relation, q)
        assert err == {c: 0 for c in eq_relation.cells()}

    def test_constant_label_rejected_at_one_cell(self):
        rel = Relation.from_function([[1, 0], [0, 0]], 2)
        ones = ((F(1), F(1)), (F(1), F(1)))
        q = Pseudotranscript.of(2, 2, 2, [(0, ones)])
        err = pseudotranscript_error(rel, q)
        assert err[(0, 0)] == 1
        assert all(err[c] == 0 for c in rel.cells() if c != (0, 0))

    def test_average_error_weights_cells(self):
        rel = Relation.from_function([[1, 0], [0, 0]], 2)
        ones = ((F(1), F(1)), (F(1), F(1)))
        q = Pseudotranscript.of(2, 2, 2, [(0, ones)])
        mu = InputDistribution.point(2, 2, 0, 0)
        assert average_pseudotranscript_error(rel, q, mu) == 1
        nu = InputDistribution.uniform(2, 2)
        assert average_pseudotranscript_error(rel, q, nu) == F(1, 4)

    def test_error_values_stay_in_unit_interval(self):
        rng = random.Random(23)
        for _ in range(30):
            x_size, y_size, z_size = rng.randint(1, 3), rng.randint(1, 3), rng.randint(1, 2)
            rel_accept = [
                [set(rng.sample(range(z_size), rng.randint(1, z_size))) for _ in range(y_size)]
                for _ in range(x_size)
            ]
            rel = Relation.from_accept_sets(x_size, y_size, z_size, rel_accept)
            q = random_pseudotranscript(rng, x_size, y_size, z_size)
            for value in pseudotranscript_error(rel, q).values():
                assert 0 <= value <= 1


class TestChannelOf:
    def test_row_sums_are_one(self):
        rng = random.Random(5)
        for _ in range(20):
            q = random_pseudotranscript(rng, rng.randint(1, 3), rng.randint(1, 3), 2)
            ch = channel_of(q)
            assert ch.n_inputs == q.x_size * q.y_size
            for row in ch.probs:
                assert sum(row) == 1

    def test_constant_outcome_is_a_column_of_ones(self):
        ones = ((F(1), F(1)),)
        q = Pseudotranscript.of(1, 2, 1, [(0, ones)])
        ch = channel_of(q)
        assert all(row == (F(1),) for row in ch.probs)

    def test_composition_with_renyi_cost(self):
        # X = {0,1}, Y = {0}: masses p(q1|x) = (1/2, 1), p(q2|x) = (1/2, 0)
        q = Pseudotranscript.of(
            2,
            1,
            1,
            [
                (0, ((F(1, 2),), (F(1),))),
                (0, ((F(1, 2),), (F(0),))),
            ],
        )
        assert renyi_inf_cost(channel_of(q)).exact_argument == F(3, 2)
        assert q.renyi_argument() == F(3, 2)


class TestInvariants:
    def test_column_max_sum_at_least_one(self):
        rng = random.Random(40)
        for _ in range(40):
            q = random_pseudotranscript(rng, rng.randint(1, 4), rng.randint(1, 4), 2)
            assert q.renyi_argument() >= 1
            assert q.renyi_argument() == renyi_inf_cost(channel_of(q)).exact_argument


class TestJson:
    def test_round_trip(self):
        rng = random.Random(9)
        q = random_pseudotranscript(rng, 2, 3, 2)
        again = pseudotranscript_from_json(pseudotranscript_to_json(q))
        assert again == q

    def test_load_from_file(self, tmp_path):
        rng = random.Random(10)
        q = random_pseudotranscript(rng, 2, 2, 2)
        path = tmp_path / "q.json"
        import json

        path.write_text(json.dumps(pseudotranscript_to_json(q)))
        assert load_pseudotranscript(str(path)) == q

    def test_bad_matrix_entry_names_location(self):
        obj = {
            "x_size": 1,
            "y_size": 1,
            "z_size": 1,
            "outcomes": [{"z": 0, "matrix": [["1/0"]]}],
        }
        import pytest as _pytest

        from commlb.core import ParseError

        with _pytest.raises(ParseError, match=r"outcomes\[0\]\.matrix\[0\]\[0\]"):
            pseudotranscript_from_json(obj)
