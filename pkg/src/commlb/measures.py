"""Shannon and order-infinity Renyi information quantities on finite data.

Every order-infinity quantity is the base-2 log of a rational number, so the
pre-log argument is computed exactly and exposed next to its float log.  That
lets equality statements be tested at the argument level with zero tolerance,
while anything inherently logarithmic (Shannon quantities, bit counts) stays
in double precision.

Two entry points exist for the order-infinity measure:

- `renyi_inf_cost` on a channel: sum over outcomes of the column maximum of
  the conditional law.  Distribution-free, and the default downstream.
- `renyi_inf_mi` on a joint: the same sum, with the maximum restricted to
  input rows of positive marginal mass.

The two agree whenever the input marginal has full support.

Logarithms are base 2 throughout; 0 * log(0/0) terms are defined as 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Sequence

from .core import ONE, ZERO, ValidationError

if TYPE_CHECKING:  # pragma: no cover
    from .core import InputDistribution
    from .pseudotranscript import Pseudotranscript

Matrix = Sequence[Sequence[Fraction]]


def log2_exact(value: Fraction) -> float:
    """Base-2 log of a nonnegative rational; -inf at zero.

    Falls back to log2(num) - log2(den) when the value itself over- or
    underflows double precision.
    """
    value = Fraction(value)
    if value < 0:
        raise ValidationError(f"log2 of a negative rational: {value}")
    if value == 0:
        return float("-inf")
    try:
        f = float(value)
    except OverflowError:
        f = math.inf
    if f > 0 and math.isfinite(f):
        return math.log2(f)
    return math.log2(value.numerator) - math.log2(value.denominator)


@dataclass(frozen=True)
class InfoValue:
    """An information quantity carried as (exact pre-log argument, float bits)."""

    exact_argument: Fraction | None
    bits: float

    @classmethod
    def from_argument(cls, argument: Fraction) -> "InfoValue":
        argument = Fraction(argument)
        return cls(argument, log2_exact(argument))


@dataclass(frozen=True)
class Channel:
    """A row-stochastic rational matrix; rows index inputs, columns outcomes."""

    probs: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if not self.probs or not self.probs[0]:
            raise ValidationError("channel must have at least one row and one column")
        width = len(self.probs[0])
        for a, row in enumerate(self.probs):
            if len(row) != width:
                raise ValidationError("channel rows have uneven lengths")
            total = ZERO
            for b, p in enumerate(row):
                if p < 0:
                    raise ValidationError(f"negative channel entry at ({a},{b}): {p}")
                total += p
            if total != ONE:
                raise ValidationError(f"channel row {a} sums to {total}, not 1")

    @classmethod
    def of(cls, rows: Matrix) -> "Channel":
        return cls(tuple(tuple(Fraction(p) for p in row) for row in rows))

    @property
    def n_inputs(self) -> int:
        return len(self.probs)

    @property
    def n_outcomes(self) -> int:
        return len(self.probs[0])


def renyi_inf_cost(channel: Channel) -> InfoValue:
    """Order-infinity cost of a channel: log2 of the sum of column maxima."""
    argument = sum(
        (max(row[b] for row in channel.probs) for b in range(channel.n_outcomes)),
        start=ZERO,
    )
    return InfoValue.from_argument(argument)


def _validate_joint(joint: Matrix) -> tuple[tuple[Fraction, ...], ...]:
    if not joint or not joint[0]:
        raise ValidationError("joint must have at least one row and one column")
    rows = tuple(tuple(Fraction(p) for p in row) for row in joint)
    width = len(rows[0])
    total = ZERO
    for a, row in enumerate(rows):
        if len(row) != width:
            raise ValidationError("joint rows have uneven lengths")
        for b, p in enumerate(row):
            if p < 0:
                raise ValidationError(f"negative joint entry at ({a},{b}): {p}")
            total += p
    if total == 0:
        raise ValidationError("degenerate joint: all mass is zero")
    if total != ONE:
        raise ValidationError(f"joint mass must be exactly 1, got {total}")
    return rows


def renyi_inf_mi(joint: Matrix) -> InfoValue:
    """Order-infinity mutual information of a joint distribution (rows: A, cols: B).

    The per-column maximum ranges only over rows with positive marginal mass.
    """
    rows = _validate_joint(joint)
    row_mass = [sum(row, start=ZERO) for row in rows]
    support = [a for a, m in enumerate(row_mass) if m > 0]
    argument = ZERO
    for b in range(len(rows[0])):
        argument += max(rows[a][b] / row_mass[a] for a in support)
    return InfoValue.from_argument(argument)


def shannon_mi(joint: Matrix) -> float:
    """Shannon mutual information I(A;B) in bits; zero-mass terms contribute 0."""
    rows = _validate_joint(joint)
    row_mass = [sum(row, start=ZERO) for row in rows]
    col_mass = [sum((row[b] for row in rows), start=ZERO) for b in range(len(rows[0]))]
    bits = 0.0
    for a, row in enumerate(rows):
        for b, p in enumerate(row):
            if p:
                bits += float(p) * log2_exact(p / (row_mass[a] * col_mass[b]))
    return bits


def _exact_triple_joint(
    q_transcript: "Pseudotranscript", mu: "InputDistribution"
) -> list[tuple[int, int, int, Fraction]]:
    """Nonzero entries of p(x, y, q) = mu(x, y) * p(q | x, y), exactly."""
    if (mu.x_size, mu.y_size) != (q_transcript.x_size, q_transcript.y_size):
        raise ValidationError("distribution shape does not match the pseudotranscript")
    entries = []
    for qi, outcome in enumerate(q_transcript.outcomes):
        for x in range(q_transcript.x_size):
            for y in range(q_transcript.y_size):
                mass = mu(x, y) * outcome.matrix[x][y]
                if mass:
                    entries.append((x, y, qi, mass))
    return entries


def shannon_cost_of_pseudotranscript(
    q_transcript: "Pseudotranscript", mu: "InputDistribution"
) -> float:
    """External cost I(XY;Q) in bits under mu, from the exact joint law."""
    entries = _exact_triple_joint(q_transcript, mu)
    p_q: dict[int, Fraction] = {}
    for _, _, qi, mass in entries:
        p_q[qi] = p_q.get(qi, ZERO) + mass
    bits = 0.0
    for x, y, qi, mass in entries:
        conditional = q_transcript.outcomes[qi].matrix[x][y]
        bits += float(mass) * log2_exact(conditional / p_q[qi])
    return bits


def internal_cost(q_transcript: "Pseudotranscript", mu: "InputDistribution") -> float:
    """Internal cost I(X;Q|Y) + I(Y;Q|X) in bits under mu."""
    entries = _exact_triple_joint(q_transcript, mu)
    p_x: dict[int, Fraction] = {}
    p_y: dict[int, Fraction] = {}
    p_xq: dict[tuple[int, int], Fraction] = {}
    p_yq: dict[tuple[int, int], Fraction] = {}
    for x in range(mu.x_size):
        for y in range(mu.y_size):
            m = mu(x, y)
            p_x[x] = p_x.get(x, ZERO) + m
            p_y[y] = p_y.get(y, ZERO) + m
    for x, y, qi, mass in entries:
        p_xq[(x, qi)] = p_xq.get((x, qi), ZERO) + mass
        p_yq[(y, qi)] = p_yq.get((y, qi), ZERO) + mass
    bits = 0.0
    for x, y, qi, mass in entries:
        m_xy = mu(x, y)
        # I(X;Q|Y) term: log p(x,y,q) p(y) / (p(x,y) p(y,q))
        bits += float(mass) * log2_exact((mass * p_y[y]) / (m_xy * p_yq[(y, qi)]))
        # I(Y;Q|X) term: log p(x,y,q) p(x) / (p(x,y) p(x,q))
        bits += float(mass) * log2_exact((mass * p_x[x]) / (m_xy * p_xq[(x, qi)]))
    return bits
