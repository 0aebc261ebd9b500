"""Exact-rational building blocks: relations, error functions, tiles, weightings.

All probability- and weight-valued data in this package is carried as
`fractions.Fraction`, so cover constraints, error masses and LP certificates
can be compared for *equality* rather than closeness.  Floating point enters
only where a logarithm is inherently required (see `measures`).

Conventions:

- Input alphabets are the index sets {0..x_size-1} and {0..y_size-1};
  outputs are {0..z_size-1}.  A cell is an (x, y) pair.
- A tile is a combinatorial rectangle of the input domain with an output
  label.  Tiles with an empty side are excluded from the tile universe:
  they can never affect a constraint.
- The tile universe is ordered canonically (xs bitmask, then ys bitmask,
  then label) so LP columns, certificates and test fixtures are
  reproducible run to run.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

Cell = tuple[int, int]

ZERO = Fraction(0)
ONE = Fraction(1)

DEFAULT_TILE_CAP = 10**6


class SizeLimitError(ValueError):
    """A requested enumeration or solve exceeds the configured cap."""


class ValidationError(ValueError):
    """A domain object violates one of its invariants."""


class ParseError(ValueError):
    """Malformed input data; `where` names the offending field."""

    def __init__(self, message: str, where: str):
        super().__init__(f"{where}: {message}")
        self.where = where


def parse_rational(value: str | int, where: str = "value") -> Fraction:
    """Parse a "p/q" or integer string (or a plain int) into a Fraction."""
    if isinstance(value, bool):
        raise ParseError("expected a rational, got a boolean", where)
    if isinstance(value, int):
        return Fraction(value)
    if not isinstance(value, str):
        raise ParseError(f"expected a rational string, got {type(value).__name__}", where)
    body = value.strip()
    try:
        if "/" in body:
            num_text, den_text = body.split("/", 1)
            num, den = int(num_text), int(den_text)
            if den == 0:
                raise ParseError(f"zero denominator in rational {body!r}", where)
            return Fraction(num, den)
        return Fraction(int(body))
    except ValueError:
        raise ParseError(f"malformed rational {body!r}", where) from None


def format_rational(value: Fraction) -> str:
    """Lowest-terms rendering: "p/q", or just "p" for integers."""
    return str(Fraction(value))


@dataclass(frozen=True)
class Relation:
    """A finite relation: each input cell accepts a nonempty set of outputs."""

    x_size: int
    y_size: int
    z_size: int
    accept: tuple[tuple[frozenset[int], ...], ...]

    def __post_init__(self):
        if min(self.x_size, self.y_size, self.z_size) < 1:
            raise ValidationError("alphabet sizes must all be >= 1")
        if len(self.accept) != self.x_size or any(len(row) != self.y_size for row in self.accept):
            raise ValidationError("accept table shape does not match the alphabet sizes")
        for x, row in enumerate(self.accept):
            for y, zs in enumerate(row):
                if not zs:
                    raise ValidationError(f"accept set at cell ({x},{y}) is empty")
                if not all(0 <= z < self.z_size for z in zs):
                    raise ValidationError(f"accept set at cell ({x},{y}) has out-of-range outputs")

    @classmethod
    def from_accept_sets(
        cls,
        x_size: int,
        y_size: int,
        z_size: int,
        accept: Sequence[Sequence[Iterable[int]]],
    ) -> "Relation":
        table = tuple(
            tuple(frozenset(accept[x][y]) for y in range(y_size)) for x in range(x_size)
        )
        return cls(x_size, y_size, z_size, table)

    @classmethod
    def from_function(cls, values: Sequence[Sequence[int]], z_size: int) -> "Relation":
        """Relation of a total function given as a value table values[x][y]."""
        x_size, y_size = len(values), len(values[0])
        return cls.from_accept_sets(
            x_size, y_size, z_size, [[{v} for v in row] for row in values]
        )

    def accepts(self, x: int, y: int, z: int) -> bool:
        return z in self.accept[x][y]

    def cells(self) -> Iterator[Cell]:
        for x in range(self.x_size):
            for y in range(self.y_size):
                yield (x, y)


@dataclass(frozen=True)
class ErrorFn:
    """Per-cell error bound, each value an exact rational in [0, 1]."""

    values: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        for x, row in enumerate(self.values):
            for y, v in enumerate(row):
                if not (ZERO <= v <= ONE):
                    raise ValidationError(f"error bound at cell ({x},{y}) outside [0,1]: {v}")

    @classmethod
    def constant(cls, x_size: int, y_size: int, eps: Fraction | int) -> "ErrorFn":
        eps = Fraction(eps)
        return cls(tuple(tuple(eps for _ in range(y_size)) for _ in range(x_size)))

    @classmethod
    def zero(cls, x_size: int, y_size: int) -> "ErrorFn":
        return cls.constant(x_size, y_size, 0)

    @classmethod
    def from_cells(cls, values: Mapping[Cell, Fraction], x_size: int, y_size: int) -> "ErrorFn":
        return cls(
            tuple(
                tuple(Fraction(values[(x, y)]) for y in range(y_size)) for x in range(x_size)
            )
        )

    @property
    def x_size(self) -> int:
        return len(self.values)

    @property
    def y_size(self) -> int:
        return len(self.values[0])

    def __call__(self, x: int, y: int) -> Fraction:
        return self.values[x][y]


def _mask(indices: frozenset[int]) -> int:
    return sum(1 << i for i in indices)


def _bits(mask: int) -> list[int]:
    return [i for i in range(mask.bit_length()) if (mask >> i) & 1]


@dataclass(frozen=True)
class Tile:
    """A combinatorial rectangle xs x ys together with an output label z."""

    xs: frozenset[int]
    ys: frozenset[int]
    z: int

    def __post_init__(self):
        if not self.xs or not self.ys:
            raise ValidationError("tile rectangle must be nonempty on both sides")
        if min(self.xs) < 0 or min(self.ys) < 0 or self.z < 0:
            raise ValidationError("tile indices must be nonnegative")

    @classmethod
    def of(cls, xs: Iterable[int], ys: Iterable[int], z: int) -> "Tile":
        return cls(frozenset(xs), frozenset(ys), z)

    def __contains__(self, cell: Cell) -> bool:
        x, y = cell
        return x in self.xs and y in self.ys

    def cells(self) -> Iterator[Cell]:
        for x in sorted(self.xs):
            for y in sorted(self.ys):
                yield (x, y)

    def sort_key(self) -> tuple[int, int, int]:
        return (_mask(self.xs), _mask(self.ys), self.z)

    def check_range(self, x_size: int, y_size: int, z_size: int, where: str = "tile") -> None:
        if max(self.xs) >= x_size or max(self.ys) >= y_size or self.z >= z_size:
            raise ValidationError(
                f"{where} does not fit the {x_size}x{y_size}x{z_size} universe: "
                f"xs={sorted(self.xs)}, ys={sorted(self.ys)}, z={self.z}"
            )

    def __repr__(self) -> str:
        return f"Tile({sorted(self.xs)}, {sorted(self.ys)}, z={self.z})"


def tile_count(x_size: int, y_size: int, z_size: int) -> int:
    return (2**x_size - 1) * (2**y_size - 1) * z_size


def enumerate_tiles(
    x_size: int, y_size: int, z_size: int, cap: int = DEFAULT_TILE_CAP
) -> list[Tile]:
    """Every tile with nonempty sides, in canonical (xs mask, ys mask, z) order."""
    if min(x_size, y_size, z_size) < 1:
        raise ValidationError("alphabet sizes must all be >= 1")
    count = tile_count(x_size, y_size, z_size)
    if count > cap:
        raise SizeLimitError(f"tile universe has {count} tiles, above the cap of {cap}")
    tiles = []
    for xm in range(1, 2**x_size):
        xs = frozenset(_bits(xm))
        for ym in range(1, 2**y_size):
            ys = frozenset(_bits(ym))
            for z in range(z_size):
                tiles.append(Tile(xs, ys, z))
    return tiles


@dataclass(frozen=True, eq=True)
class TileWeighting:
    """Nonnegative rational weights on tiles; tiles absent from the map weigh 0.

    Zero-weight entries are dropped on construction so equal weightings
    compare equal regardless of how they were assembled.
    """

    entries: Mapping[Tile, Fraction]

    def __post_init__(self):
        clean: dict[Tile, Fraction] = {}
        for tile, w in self.entries.items():
            w = Fraction(w)
            if not (ZERO <= w <= ONE):
                raise ValidationError(f"tile weight outside [0,1]: {w} on {tile}")
            if w:
                clean[tile] = w
        object.__setattr__(self, "entries", clean)

    @classmethod
    def of(cls, pairs: Iterable[tuple[Tile, Fraction]]) -> "TileWeighting":
        acc: dict[Tile, Fraction] = {}
        for tile, w in pairs:
            acc[tile] = acc.get(tile, ZERO) + Fraction(w)
        return cls(acc)

    def weight(self, tile: Tile) -> Fraction:
        return self.entries.get(tile, ZERO)

    @property
    def total(self) -> Fraction:
        return sum(self.entries.values(), start=ZERO)

    def tiles(self) -> list[Tile]:
        return sorted(self.entries, key=Tile.sort_key)

    def items(self) -> list[tuple[Tile, Fraction]]:
        return [(t, self.entries[t]) for t in self.tiles()]

    def __len__(self) -> int:
        return len(self.entries)

    def check_range(self, x_size: int, y_size: int, z_size: int) -> None:
        for tile in self.entries:
            tile.check_range(x_size, y_size, z_size, where="weighted tile")


@dataclass(frozen=True)
class InputDistribution:
    """An exact joint distribution over the input cells."""

    probs: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        total = ZERO
        for x, row in enumerate(self.probs):
            if len(row) != len(self.probs[0]):
                raise ValidationError("distribution rows have uneven lengths")
            for y, p in enumerate(row):
                if p < 0:
                    raise ValidationError(f"negative probability at cell ({x},{y}): {p}")
                total += p
        if total != ONE:
            raise ValidationError(f"distribution mass must be exactly 1, got {total}")

    @classmethod
    def uniform(cls, x_size: int, y_size: int) -> "InputDistribution":
        p = Fraction(1, x_size * y_size)
        return cls(tuple(tuple(p for _ in range(y_size)) for _ in range(x_size)))

    @classmethod
    def point(cls, x_size: int, y_size: int, x: int, y: int) -> "InputDistribution":
        return cls(
            tuple(
                tuple(ONE if (i, j) == (x, y) else ZERO for j in range(y_size))
                for i in range(x_size)
            )
        )

    @classmethod
    def from_weights(cls, weights: Sequence[Sequence[int]]) -> "InputDistribution":
        """Normalize a nonnegative integer weight table (total must be positive)."""
        total = sum(sum(row) for row in weights)
        if total <= 0:
            raise ValidationError("weight table must have positive total")
        return cls(
            tuple(tuple(Fraction(w, total) for w in row) for row in weights)
        )

    @property
    def x_size(self) -> int:
        return len(self.probs)

    @property
    def y_size(self) -> int:
        return len(self.probs[0])

    def __call__(self, x: int, y: int) -> Fraction:
        return self.probs[x][y]

    def cells(self) -> Iterator[Cell]:
        for x in range(self.x_size):
            for y in range(self.y_size):
                yield (x, y)


def cover_mass(weighting: TileWeighting, x_size: int, y_size: int) -> dict[Cell, Fraction]:
    """Total tile weight over each cell: sum of w(t) over tiles containing it."""
    mass = {(x, y): ZERO for x in range(x_size) for y in range(y_size)}
    for tile, w in weighting.entries.items():
        for x in tile.xs:
            for y in tile.ys:
                mass[(x, y)] += w
    return mass


def correct_cover_mass(rel: Relation, weighting: TileWeighting) -> dict[Cell, Fraction]:
    """Per-cell weight of tiles whose label is accepted at that cell."""
    weighting.check_range(rel.x_size, rel.y_size, rel.z_size)
    mass = {cell: ZERO for cell in rel.cells()}
    for tile, w in weighting.entries.items():
        for x in tile.xs:
            for y in tile.ys:
                if rel.accepts(x, y, tile.z):
                    mass[(x, y)] += w
    return mass


def tiling_error(rel: Relation, weighting: TileWeighting) -> dict[Cell, Fraction]:
    """Per-cell incorrect mass: sum of w(t) over tiles covering the cell with a
    label the relation rejects there."""
    weighting.check_range(rel.x_size, rel.y_size, rel.z_size)
    err = {cell: ZERO for cell in rel.cells()}
    for tile, w in weighting.entries.items():
        for x in tile.xs:
            for y in tile.ys:
                if not rel.accepts(x, y, tile.z):
                    err[(x, y)] += w
    return err


def average_tiling_error(
    rel: Relation, weighting: TileWeighting, mu: InputDistribution
) -> Fraction:
    """1 minus the mu-average correct mass; exact."""
    if (mu.x_size, mu.y_size) != (rel.x_size, rel.y_size):
        raise ValidationError("distribution shape does not match the relation")
    correct = correct_cover_mass(rel, weighting)
    gained = sum((mu(x, y) * correct[(x, y)] for (x, y) in rel.cells()), start=ZERO)
    return ONE - gained


# ---------------------------------------------------------------------------
# JSON formats
#
# Relation files:
#   { "x_size": n, "y_size": m, "z_size": k,
#     "accept": [[[z, ...], ...], ...],            # accept[x][y] = list of z
#     "error": "1/10" }                            # optional constant bound
# or with "error_matrix": [["0", "1/10", ...], ...] in place of "error".
#
# Tile certificates:
#   { "tiles": [ { "xs": [ints], "ys": [ints], "z": int, "w": "p/q" }, ... ] }
#
# Input distributions:
#   { "probs": [["p/q", ...], ...] }               # probs[x][y]
# ---------------------------------------------------------------------------


def _require(obj: Mapping, key: str, where: str):
    if not isinstance(obj, Mapping):
        raise ParseError("expected a JSON object", where)
    if key not in obj:
        raise ParseError(f"missing required field {key!r}", where)
    return obj[key]


def _require_size(obj: Mapping, key: str, where: str) -> int:
    v = _require(obj, key, where)
    if not isinstance(v, int) or isinstance(v, bool) or v < 1:
        raise ParseError(f"field {key!r} must be a positive integer", where)
    return v


def relation_from_json(obj: Mapping) -> tuple[Relation, ErrorFn | None]:
    where = "relation"
    x_size = _require_size(obj, "x_size", where)
    y_size = _require_size(obj, "y_size", where)
    z_size = _require_size(obj, "z_size", where)
    accept_rows = _require(obj, "accept", where)
    if not isinstance(accept_rows, Sequence) or len(accept_rows) != x_size:
        raise ParseError(f"'accept' must be a list of {x_size} rows", where)
    accept = []
    for x, row in enumerate(accept_rows):
        if not isinstance(row, Sequence) or len(row) != y_size:
            raise ParseError(f"must be a list of {y_size} accept sets", f"accept[{x}]")
        cells = []
        for y, zs in enumerate(row):
            if not isinstance(zs, Sequence) or isinstance(zs, str):
                raise ParseError("accept set must be a list of ints", f"accept[{x}][{y}]")
            for z in zs:
                if not isinstance(z, int) or isinstance(z, bool):
                    raise ParseError("accept set must be a list of ints", f"accept[{x}][{y}]")
            cells.append(frozenset(zs))
        accept.append(tuple(cells))
    rel = Relation(x_size, y_size, z_size, tuple(accept))

    errfn: ErrorFn | None = None
    if "error" in obj and "error_matrix" in obj:
        raise ParseError("give either 'error' or 'error_matrix', not both", where)
    if "error" in obj:
        eps = parse_rational(obj["error"], "error")
        errfn = ErrorFn.constant(x_size, y_size, eps)
    elif "error_matrix" in obj:
        rows = obj["error_matrix"]
        if not isinstance(rows, Sequence) or len(rows) != x_size:
            raise ParseError(f"must be a list of {x_size} rows", "error_matrix")
        values = []
        for x, row in enumerate(rows):
            if not isinstance(row, Sequence) or len(row) != y_size:
                raise ParseError(f"must be a list of {y_size} entries", f"error_matrix[{x}]")
            values.append(
                tuple(
                    parse_rational(v, f"error_matrix[{x}][{y}]") for y, v in enumerate(row)
                )
            )
        errfn = ErrorFn(tuple(values))
    return rel, errfn


def relation_to_json(rel: Relation, errfn: ErrorFn | None = None) -> dict:
    obj: dict = {
        "x_size": rel.x_size,
        "y_size": rel.y_size,
        "z_size": rel.z_size,
        "accept": [[sorted(zs) for zs in row] for row in rel.accept],
    }
    if errfn is not None:
        flat = {v for row in errfn.values for v in row}
        if len(flat) == 1:
            obj["error"] = format_rational(next(iter(flat)))
        else:
            obj["error_matrix"] = [[format_rational(v) for v in row] for row in errfn.values]
    return obj


def weighting_from_json(obj: Mapping) -> TileWeighting:
    tiles = _require(obj, "tiles", "certificate")
    if not isinstance(tiles, Sequence):
        raise ParseError("'tiles' must be a list", "certificate")
    pairs = []
    for i, entry in enumerate(tiles):
        where = f"tiles[{i}]"
        xs = _require(entry, "xs", where)
        ys = _require(entry, "ys", where)
        z = _require(entry, "z", where)
        if not isinstance(z, int) or isinstance(z, bool):
            raise ParseError("'z' must be an int", where)
        try:
            tile = Tile.of(xs, ys, z)
        except (TypeError, ValidationError) as exc:
            raise ParseError(str(exc), where) from None
        pairs.append((tile, parse_rational(_require(entry, "w", where), f"{where}.w")))
    return TileWeighting.of(pairs)


def weighting_to_json(weighting: TileWeighting) -> dict:
    return {
        "tiles": [
            {
                "xs": sorted(tile.xs),
                "ys": sorted(tile.ys),
                "z": tile.z,
                "w": format_rational(w),
            }
            for tile, w in weighting.items()
        ]
    }


def distribution_from_json(obj: Mapping) -> InputDistribution:
    rows = _require(obj, "probs", "distribution")
    if not isinstance(rows, Sequence) or not rows:
        raise ParseError("'probs' must be a nonempty list of rows", "distribution")
    probs = []
    for x, row in enumerate(rows):
        if not isinstance(row, Sequence) or isinstance(row, str):
            raise ParseError("row must be a list of rationals", f"probs[{x}]")
        probs.append(tuple(parse_rational(v, f"probs[{x}][{y}]") for y, v in enumerate(row)))
    return InputDistribution(tuple(probs))


def distribution_to_json(mu: InputDistribution) -> dict:
    return {"probs": [[format_rational(p) for p in row] for row in mu.probs]}


def read_json_file(path: str, where: str | None = None) -> dict:
    where = where or path
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ParseError("file not found", where) from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}, column {exc.colno}", where) from None


def write_json_file(path: str, obj: Mapping) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_relation(path: str) -> tuple[Relation, ErrorFn | None]:
    return relation_from_json(read_json_file(path))


def load_weighting(path: str) -> TileWeighting:
    return weighting_from_json(read_json_file(path))


def load_distribution(path: str) -> InputDistribution:
    return distribution_from_json(read_json_file(path))
