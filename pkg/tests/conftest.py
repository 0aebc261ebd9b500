"""Shared fixtures and seeded random generators.

Random rational data is built from integer weights over a common denominator,
so probabilities and weights stay exact.  Pseudotranscripts are generated as
public-coin mixtures of product channels (an X-side channel times a Y-side
channel); every such mixture satisfies the factorization condition by
construction while exercising non-constant alpha/beta profiles, partial
supports, constants and full reveals.
"""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from commlb.core import InputDistribution, Relation
from commlb.pseudotranscript import Pseudotranscript


@pytest.fixture
def eq_relation() -> Relation:
    return Relation.from_function([[1, 0], [0, 1]], 2)


@pytest.fixture
def and_relation() -> Relation:
    return Relation.from_function([[0, 0], [0, 1]], 2)


def constant_relation(x_size: int = 2, y_size: int = 2, z_size: int = 1) -> Relation:
    return Relation.from_accept_sets(
        x_size,
        y_size,
        z_size,
        [[set(range(z_size)) for _ in range(y_size)] for _ in range(x_size)],
    )


def random_unit_weights(
    rng: random.Random, k: int, *, allow_zero: bool = True, max_weight: int = 8
) -> list[Fraction]:
    """k nonnegative rationals summing to exactly 1."""
    low = 0 if allow_zero else 1
    weights = [rng.randint(low, max_weight) for _ in range(k)]
    if sum(weights) == 0:
        weights[rng.randrange(k)] = 1
    total = sum(weights)
    return [Fraction(w, total) for w in weights]


def random_channel_rows(
    rng: random.Random, n_rows: int, n_cols: int, *, allow_zero: bool = True
) -> list[list[Fraction]]:
    return [random_unit_weights(rng, n_cols, allow_zero=allow_zero) for _ in range(n_rows)]


def random_joint(rng: random.Random, n_rows: int, n_cols: int) -> list[list[Fraction]]:
    flat = random_unit_weights(rng, n_rows * n_cols)
    return [flat[r * n_cols : (r + 1) * n_cols] for r in range(n_rows)]


def random_relation(rng: random.Random, x_size: int, y_size: int, z_size: int) -> Relation:
    accept = [
        [
            set(rng.sample(range(z_size), rng.randint(1, z_size)))
            for _ in range(y_size)
        ]
        for _ in range(x_size)
    ]
    return Relation.from_accept_sets(x_size, y_size, z_size, accept)


def random_mu(rng: random.Random, x_size: int, y_size: int) -> InputDistribution:
    flat = random_unit_weights(rng, x_size * y_size)
    return InputDistribution(
        tuple(tuple(flat[x * y_size + y] for y in range(y_size)) for x in range(x_size))
    )


def _side_channel(rng: random.Random, size: int) -> list[list[Fraction]]:
    """A channel from one party's input: random, identity (full reveal),
    or constant (reveal nothing)."""
    kind = rng.choice(("random", "identity", "constant"))
    if kind == "identity":
        return [
            [Fraction(1) if u == v else Fraction(0) for u in range(size)]
            for v in range(size)
        ]
    if kind == "constant":
        return [[Fraction(1)] for _ in range(size)]
    n_cols = rng.randint(1, 3)
    return random_channel_rows(rng, size, n_cols)


def random_pseudotranscript(
    rng: random.Random,
    x_size: int,
    y_size: int,
    z_size: int,
    *,
    skewed: bool = False,
) -> Pseudotranscript:
    """Mixture of product channels; `skewed` biases toward a heavy constant
    component plus light informative ones (which makes pruning thresholds
    bite)."""
    n_components = rng.randint(1, 3)
    if skewed and n_components > 1:
        rest = random_unit_weights(rng, n_components - 1, allow_zero=False)
        heavy = Fraction(rng.randint(3, 9), 10)
        weights = [heavy] + [(1 - heavy) * w for w in rest]
    else:
        weights = random_unit_weights(rng, n_components, allow_zero=False)

    outcomes = []
    for ci in range(n_components):
        if skewed and ci == 0:
            left = [[Fraction(1)] for _ in range(x_size)]
            right = [[Fraction(1)] for _ in range(y_size)]
        else:
            left = _side_channel(rng, x_size)
            right = _side_channel(rng, y_size)
        w = weights[ci]
        for u in range(len(left[0])):
            for v in range(len(right[0])):
                matrix = tuple(
                    tuple(w * left[x][u] * right[y][v] for y in range(y_size))
                    for x in range(x_size)
                )
                outcomes.append((rng.randrange(z_size), matrix))
    return Pseudotranscript.of(x_size, y_size, z_size, outcomes)
