"""Outcome-labelled rational channels whose conditional law factorizes.

An outcome q with conditional matrix M(x, y) = p(q | x, y) is admissible when
M is a nonnegative rank-one matrix: its support must be a combinatorial
rectangle and the anchored 2x2 minors on that rectangle must vanish, which is
exactly the existence of nonnegative alpha(x), beta(y) with
M(x, y) = alpha(x) * beta(y).

Factorization is verified, never assumed.  `check_and_factorize` either
returns an exact decomposition or a concrete witness of failure (two support
cells whose corner is missing, or a nonzero 2x2 minor); the `Pseudotranscript`
constructor turns a witness into a `FactorizationError` so invalid inputs can
never reach the constructions built on top.

The decomposition anchors alpha at the lexicographically smallest support
cell, so alpha and beta are deterministic despite the scaling freedom
(alpha*c, beta/c describes the same outcome for any positive rational c).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .core import (
    Cell,
    ONE,
    ParseError,
    Relation,
    InputDistribution,
    ValidationError,
    ZERO,
    _require,
    _require_size,
    format_rational,
    parse_rational,
    read_json_file,
)
from .measures import Channel

Matrix = tuple[tuple[Fraction, ...], ...]


@dataclass(frozen=True)
class Factorization:
    """Exact per-outcome decomposition p(q|x,y) = alpha[x] * beta[y]."""

    alpha: tuple[Fraction, ...]
    beta: tuple[Fraction, ...]

    def product(self, x: int, y: int) -> Fraction:
        return self.alpha[x] * self.beta[y]


@dataclass(frozen=True)
class SupportWitness:
    """Two support cells whose shared corner carries zero mass."""

    present: tuple[Cell, Cell]
    missing: Cell

    def describe(self) -> str:
        (a, b) = self.present
        return (
            f"support is not a rectangle: cells {a} and {b} have positive mass "
            f"but their corner {self.missing} does not"
        )


@dataclass(frozen=True)
class MinorWitness:
    """Opposite corners of a 2x2 minor that fails to vanish."""

    cells: tuple[Cell, Cell]
    value: Fraction

    def describe(self) -> str:
        (a, b) = self.cells
        return f"2x2 minor on corners {a}, {b} is {self.value}, not 0"


RejectionWitness = SupportWitness | MinorWitness


class FactorizationError(ValidationError):
    def __init__(self, witness: RejectionWitness, outcome_index: int | None = None):
        prefix = "" if outcome_index is None else f"outcome {outcome_index}: "
        super().__init__(prefix + witness.describe())
        self.witness = witness
        self.outcome_index = outcome_index


def check_and_factorize(matrix: Sequence[Sequence[Fraction]]) -> Factorization | RejectionWitness:
    """Decide the rank-one condition for a nonnegative matrix.

    Returns a `Factorization` reproducing the matrix exactly, or a witness.
    The all-zero matrix is accepted with alpha = beta = 0 (an outcome that
    occurs with probability zero).
    """
    rows = tuple(tuple(Fraction(v) for v in row) for row in matrix)
    if not rows or not rows[0]:
        raise ValidationError("matrix must have at least one row and one column")
    n, m = len(rows), len(rows[0])
    for x, row in enumerate(rows):
        if len(row) != m:
            raise ValidationError("matrix rows have uneven lengths")
        for y, v in enumerate(row):
            if v < 0:
                raise ValidationError(f"negative entry at ({x},{y}): {v}")

    support_rows = [x for x in range(n) if any(rows[x])]
    support_cols = [y for y in range(m) if any(rows[x][y] for x in range(n))]
    if not support_rows:
        return Factorization((ZERO,) * n, (ZERO,) * m)

    # Rectangularity: every (support row, support col) cell must be positive.
    for x in support_rows:
        for y in support_cols:
            if rows[x][y] == 0:
                y_in_row = next(j for j in support_cols if rows[x][j])
                x_in_col = next(i for i in support_rows if rows[i][y])
                return SupportWitness(((x, y_in_row), (x_in_col, y)), (x, y))

    x0, y0 = support_rows[0], support_cols[0]
    pivot = rows[x0][y0]
    alpha = tuple(rows[x][y0] for x in range(n))
    beta = tuple(rows[x0][y] / pivot for y in range(m))
    for x in support_rows:
        for y in support_cols:
            if alpha[x] * beta[y] != rows[x][y]:
                minor = pivot * rows[x][y] - rows[x][y0] * rows[x0][y]
                return MinorWitness(((x0, y0), (x, y)), minor)
    return Factorization(alpha, beta)


@dataclass(frozen=True)
class Outcome:
    """One pseudotranscript outcome: an output label and its conditional matrix."""

    z: int
    matrix: Matrix

    @classmethod
    def of(cls, z: int, matrix: Sequence[Sequence[Fraction]]) -> "Outcome":
        return cls(z, tuple(tuple(Fraction(v) for v in row) for row in matrix))

    def mass(self, x: int, y: int) -> Fraction:
        return self.matrix[x][y]

    @property
    def max_mass(self) -> Fraction:
        return max(v for row in self.matrix for v in row)

    @property
    def is_zero(self) -> bool:
        return not any(v for row in self.matrix for v in row)


@dataclass(frozen=True)
class Pseudotranscript:
    """A validated family of outcomes forming an exact channel from input cells.

    Construction verifies, exactly: matrix shapes and label ranges, per-cell
    total mass 1, and the factorization condition for every outcome.
    Identically-zero outcomes are dropped (they change no measure or
    construction).  `factorizations` is derived and aligned with `outcomes`.
    """

    x_size: int
    y_size: int
    z_size: int
    outcomes: tuple[Outcome, ...]
    factorizations: tuple[Factorization, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if min(self.x_size, self.y_size, self.z_size) < 1:
            raise ValidationError("alphabet sizes must all be >= 1")
        kept: list[Outcome] = []
        for qi, outcome in enumerate(self.outcomes):
            if len(outcome.matrix) != self.x_size or any(
                len(row) != self.y_size for row in outcome.matrix
            ):
                raise ValidationError(f"outcome {qi}: matrix shape does not match alphabets")
            if not (0 <= outcome.z < self.z_size):
                raise ValidationError(f"outcome {qi}: output label {outcome.z} out of range")
            for x in range(self.x_size):
                for y in range(self.y_size):
                    if outcome.matrix[x][y] < 0:
                        raise ValidationError(f"outcome {qi}: negative mass at ({x},{y})")
            if not outcome.is_zero:
                kept.append(outcome)
        if not kept:
            raise ValidationError("pseudotranscript has no outcome with positive mass")
        for x in range(self.x_size):
            for y in range(self.y_size):
                total = sum((o.matrix[x][y] for o in kept), start=ZERO)
                if total != ONE:
                    raise ValidationError(
                        f"outcome masses at cell ({x},{y}) sum to {total}, not 1"
                    )
        factorizations = []
        for qi, outcome in enumerate(kept):
            result = check_and_factorize(outcome.matrix)
            if not isinstance(result, Factorization):
                raise FactorizationError(result, outcome_index=qi)
            factorizations.append(result)
        object.__setattr__(self, "outcomes", tuple(kept))
        object.__setattr__(self, "factorizations", tuple(factorizations))

    @classmethod
    def of(
        cls,
        x_size: int,
        y_size: int,
        z_size: int,
        outcomes: Iterable[tuple[int, Sequence[Sequence[Fraction]]]],
    ) -> "Pseudotranscript":
        return cls(
            x_size, y_size, z_size, tuple(Outcome.of(z, matrix) for z, matrix in outcomes)
        )

    @property
    def outcome_count(self) -> int:
        return len(self.outcomes)

    def cells(self) -> Iterable[Cell]:
        for x in range(self.x_size):
            for y in range(self.y_size):
                yield (x, y)

    def renyi_argument(self) -> Fraction:
        """Sum over outcomes of the maximum conditional mass (exact, >= 1)."""
        return sum((o.max_mass for o in self.outcomes), start=ZERO)


def pseudotranscript_error(rel: Relation, q_transcript: Pseudotranscript) -> dict[Cell, Fraction]:
    """Per-cell probability that the emitted label is rejected there; exact."""
    _check_shapes(rel, q_transcript)
    err = {cell: ZERO for cell in rel.cells()}
    for outcome in q_transcript.outcomes:
        for x in range(rel.x_size):
            for y in range(rel.y_size):
                if not rel.accepts(x, y, outcome.z):
                    err[(x, y)] += outcome.matrix[x][y]
    return err


def average_pseudotranscript_error(
    rel: Relation, q_transcript: Pseudotranscript, mu: InputDistribution
) -> Fraction:
    if (mu.x_size, mu.y_size) != (rel.x_size, rel.y_size):
        raise ValidationError("distribution shape does not match the relation")
    err = pseudotranscript_error(rel, q_transcript)
    return sum((mu(x, y) * err[(x, y)] for (x, y) in rel.cells()), start=ZERO)


def channel_of(q_transcript: Pseudotranscript) -> Channel:
    """Re-index outcomes as a channel: rows are cells (row-major), columns outcomes."""
    rows = []
    for x in range(q_transcript.x_size):
        for y in range(q_transcript.y_size):
            rows.append(tuple(o.matrix[x][y] for o in q_transcript.outcomes))
    return Channel(tuple(rows))


def _check_shapes(rel: Relation, q_transcript: Pseudotranscript) -> None:
    if (rel.x_size, rel.y_size, rel.z_size) != (
        q_transcript.x_size,
        q_transcript.y_size,
        q_transcript.z_size,
    ):
        raise ValidationError("pseudotranscript alphabets do not match the relation")


# JSON format:
#   { "x_size": n, "y_size": m, "z_size": k,
#     "outcomes": [ { "z": int, "matrix": [["p/q", ...], ...] }, ... ] }


def pseudotranscript_from_json(obj: Mapping) -> Pseudotranscript:
    where = "pseudotranscript"
    x_size = _require_size(obj, "x_size", where)
    y_size = _require_size(obj, "y_size", where)
    z_size = _require_size(obj, "z_size", where)
    outcome_objs = _require(obj, "outcomes", where)
    if not isinstance(outcome_objs, Sequence):
        raise ParseError("'outcomes' must be a list", where)
    outcomes = []
    for i, entry in enumerate(outcome_objs):
        in_outcome = f"outcomes[{i}]"
        z = _require(entry, "z", in_outcome)
        if not isinstance(z, int) or isinstance(z, bool):
            raise ParseError("'z' must be an int", in_outcome)
        rows = _require(entry, "matrix", in_outcome)
        if not isinstance(rows, Sequence) or len(rows) != x_size:
            raise ParseError(f"'matrix' must be a list of {x_size} rows", in_outcome)
        matrix = []
        for x, row in enumerate(rows):
            if not isinstance(row, Sequence) or len(row) != y_size:
                raise ParseError(
                    f"must be a list of {y_size} rationals", f"{in_outcome}.matrix[{x}]"
                )
            matrix.append(
                tuple(
                    parse_rational(v, f"{in_outcome}.matrix[{x}][{y}]")
                    for y, v in enumerate(row)
                )
            )
        outcomes.append((z, tuple(matrix)))
    return Pseudotranscript.of(x_size, y_size, z_size, outcomes)


def pseudotranscript_to_json(q_transcript: Pseudotranscript) -> dict:
    return {
        "x_size": q_transcript.x_size,
        "y_size": q_transcript.y_size,
        "z_size": q_transcript.z_size,
        "outcomes": [
            {
                "z": o.z,
                "matrix": [[format_rational(v) for v in row] for row in o.matrix],
            }
            for o in q_transcript.outcomes
        ],
    }


def load_pseudotranscript(path: str) -> Pseudotranscript:
    return pseudotranscript_from_json(read_json_file(path))
