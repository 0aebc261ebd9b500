"""Partition-bound computations: compile a relation to an LP, solve, verify.

Three bound flavors share one variable space (the canonical tile universe):

- exact cover + per-cell correctness (full error-bound matrix);
- relaxed cover (<= 1) + per-cell correctness at a constant error rate;
- relaxed cover + a single mu-averaged correctness row.

Optimal weightings come back as certificates, and `verify_certificate`
re-evaluates the relevant constraint family exactly, so every bound value can
be cross-checked without trusting the solver.

Constraint order is fixed (cover rows for all cells in row-major order, then
correctness rows) so solves are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import lp
from .core import (
    Cell,
    DEFAULT_TILE_CAP,
    ErrorFn,
    InputDistribution,
    ONE,
    Relation,
    Tile,
    TileWeighting,
    ValidationError,
    ZERO,
    average_tiling_error,
    correct_cover_mass,
    cover_mass,
    enumerate_tiles,
    format_rational,
    tiling_error,
)
from .measures import log2_exact

PRT = "prt"
RELAXED = "relaxed"
RELAXED_MU = "relaxed_mu"


@dataclass(frozen=True)
class BoundResult:
    kind: str
    status: str
    value: Fraction | None
    log2_value: float | None
    certificate: TileWeighting | None

    def require_optimal(self) -> "BoundResult":
        if self.status != lp.OPTIMAL:
            raise ValidationError(f"{self.kind} solve ended with status {self.status}")
        return self


def _tile_memberships(rel: Relation, tiles: list[Tile]):
    """For each cell: the covering tile columns, and the correctly-labelled ones."""
    covering: dict[Cell, list[int]] = {cell: [] for cell in rel.cells()}
    correct: dict[Cell, list[int]] = {cell: [] for cell in rel.cells()}
    for j, tile in enumerate(tiles):
        for x in tile.xs:
            for y in tile.ys:
                covering[(x, y)].append(j)
                if rel.accepts(x, y, tile.z):
                    correct[(x, y)].append(j)
    return covering, correct


def _indicator_row(n: int, cols: list[int]) -> tuple[Fraction, ...]:
    row = [ZERO] * n
    for j in cols:
        row[j] = ONE
    return tuple(row)


def build_prt_lp(
    rel: Relation, errfn: ErrorFn, *, tile_cap: int = DEFAULT_TILE_CAP
) -> tuple[lp.LinearProgram, list[Tile]]:
    """Minimize total weight s.t. exact cover and per-cell correct mass >= 1-E."""
    _check_errfn(rel, errfn)
    tiles = enumerate_tiles(rel.x_size, rel.y_size, rel.z_size, cap=tile_cap)
    n = len(tiles)
    covering, correct = _tile_memberships(rel, tiles)
    constraints = []
    for cell in rel.cells():
        constraints.append(lp.Constraint(_indicator_row(n, covering[cell]), lp.EQ, ONE))
    for cell in rel.cells():
        constraints.append(
            lp.Constraint(_indicator_row(n, correct[cell]), lp.GE, ONE - errfn(*cell))
        )
    return lp.LinearProgram((ONE,) * n, tuple(constraints)), tiles


def build_relaxed_prt_lp(
    rel: Relation, eps: Fraction, *, tile_cap: int = DEFAULT_TILE_CAP
) -> tuple[lp.LinearProgram, list[Tile]]:
    """Same objective with cover <= 1 and per-cell correct mass >= 1-eps."""
    eps = _check_eps(eps)
    tiles = enumerate_tiles(rel.x_size, rel.y_size, rel.z_size, cap=tile_cap)
    n = len(tiles)
    covering, correct = _tile_memberships(rel, tiles)
    constraints = []
    for cell in rel.cells():
        constraints.append(lp.Constraint(_indicator_row(n, covering[cell]), lp.LE, ONE))
    for cell in rel.cells():
        constraints.append(
            lp.Constraint(_indicator_row(n, correct[cell]), lp.GE, ONE - eps)
        )
    return lp.LinearProgram((ONE,) * n, tuple(constraints)), tiles


def build_relaxed_prt_mu_lp(
    rel: Relation,
    eps: Fraction,
    mu: InputDistribution,
    *,
    tile_cap: int = DEFAULT_TILE_CAP,
) -> tuple[lp.LinearProgram, list[Tile]]:
    """Cover <= 1 per cell, one mu-averaged correctness row >= 1-eps."""
    eps = _check_eps(eps)
    if (mu.x_size, mu.y_size) != (rel.x_size, rel.y_size):
        raise ValidationError("distribution shape does not match the relation")
    tiles = enumerate_tiles(rel.x_size, rel.y_size, rel.z_size, cap=tile_cap)
    n = len(tiles)
    covering, correct = _tile_memberships(rel, tiles)
    constraints = []
    for cell in rel.cells():
        constraints.append(lp.Constraint(_indicator_row(n, covering[cell]), lp.LE, ONE))
    averaged = [ZERO] * n
    for cell in rel.cells():
        weight = mu(*cell)
        if weight:
            for j in correct[cell]:
                averaged[j] += weight
    constraints.append(lp.Constraint(tuple(averaged), lp.GE, ONE - eps))
    return lp.LinearProgram((ONE,) * n, tuple(constraints)), tiles


def _solve_to_bound(kind: str, program: lp.LinearProgram, tiles: list[Tile]) -> BoundResult:
    solution = lp.solve(program)
    if solution.status != lp.OPTIMAL:
        return BoundResult(kind, solution.status, None, None, None)
    certificate = TileWeighting(
        {tiles[j]: w for j, w in solution.assignment.items()}
    )
    return BoundResult(
        kind, lp.OPTIMAL, solution.value, log2_exact(solution.value), certificate
    )


def prt(
    rel: Relation, errfn: ErrorFn | None = None, *, tile_cap: int = DEFAULT_TILE_CAP
) -> BoundResult:
    """Partition bound; errfn defaults to the zero-error bound."""
    if errfn is None:
        errfn = ErrorFn.zero(rel.x_size, rel.y_size)
    program, tiles = build_prt_lp(rel, errfn, tile_cap=tile_cap)
    return _solve_to_bound(PRT, program, tiles)


def relaxed_prt(
    rel: Relation, eps: Fraction, *, tile_cap: int = DEFAULT_TILE_CAP
) -> BoundResult:
    program, tiles = build_relaxed_prt_lp(rel, eps, tile_cap=tile_cap)
    return _solve_to_bound(RELAXED, program, tiles)


def relaxed_prt_mu(
    rel: Relation,
    eps: Fraction,
    mu: InputDistribution,
    *,
    tile_cap: int = DEFAULT_TILE_CAP,
) -> BoundResult:
    program, tiles = build_relaxed_prt_mu_lp(rel, eps, mu, tile_cap=tile_cap)
    return _solve_to_bound(RELAXED_MU, program, tiles)


def _check_eps(eps: Fraction) -> Fraction:
    eps = Fraction(eps)
    if not (ZERO <= eps <= ONE):
        raise ValidationError(f"error rate must lie in [0,1], got {eps}")
    return eps


def _check_errfn(rel: Relation, errfn: ErrorFn) -> None:
    if (errfn.x_size, errfn.y_size) != (rel.x_size, rel.y_size):
        raise ValidationError("error-bound shape does not match the relation")


@dataclass(frozen=True)
class CertificateReport:
    mode: str
    total_weight: Fraction
    cover: dict[Cell, Fraction]
    error: dict[Cell, Fraction]
    average_error: Fraction | None
    violations: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return not self.violations

    def format_report(self) -> str:
        lines = [
            f"mode: {self.mode}",
            f"total weight: {format_rational(self.total_weight)}",
        ]
        for cell in sorted(self.cover):
            lines.append(
                f"cell {cell}: cover {format_rational(self.cover[cell])}, "
                f"error {format_rational(self.error[cell])}"
            )
        if self.average_error is not None:
            lines.append(f"average error: {format_rational(self.average_error)}")
        for v in self.violations:
            lines.append(f"VIOLATION: {v}")
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)


def verify_certificate(
    rel: Relation,
    weighting: TileWeighting,
    *,
    errfn: ErrorFn | None = None,
    eps: Fraction | None = None,
    mu: InputDistribution | None = None,
) -> CertificateReport:
    """Exact re-check of a certificate against one constraint family.

    Exactly one mode applies: errfn alone checks the exact-cover bound,
    eps alone the relaxed bound, eps with mu the distributional relaxed
    bound.
    """
    if errfn is not None and eps is None and mu is None:
        mode = PRT
        _check_errfn(rel, errfn)
    elif errfn is None and eps is not None and mu is None:
        mode = RELAXED
        eps = _check_eps(eps)
    elif errfn is None and eps is not None and mu is not None:
        mode = RELAXED_MU
        eps = _check_eps(eps)
        if (mu.x_size, mu.y_size) != (rel.x_size, rel.y_size):
            raise ValidationError("distribution shape does not match the relation")
    else:
        raise ValidationError(
            "pass errfn (exact-cover mode), eps (relaxed mode), or eps and mu"
        )
    weighting.check_range(rel.x_size, rel.y_size, rel.z_size)

    cover = cover_mass(weighting, rel.x_size, rel.y_size)
    error = tiling_error(rel, weighting)
    correct = correct_cover_mass(rel, weighting)
    violations: list[str] = []

    if mode == PRT:
        for cell in rel.cells():
            if cover[cell] != ONE:
                violations.append(
                    f"cover at {cell} is {format_rational(cover[cell])}, not 1"
                )
            bound = errfn(*cell)
            if error[cell] > bound:
                violations.append(
                    f"error at {cell} is {format_rational(error[cell])}, "
                    f"above the bound {format_rational(bound)}"
                )
        average = None
    else:
        for cell in rel.cells():
            if cover[cell] > ONE:
                violations.append(
                    f"cover at {cell} is {format_rational(cover[cell])}, above 1"
                )
        if mode == RELAXED:
            for cell in rel.cells():
                if correct[cell] < ONE - eps:
                    violations.append(
                        f"correct mass at {cell} is {format_rational(correct[cell])}, "
                        f"below {format_rational(ONE - eps)}"
                    )
            average = None
        else:
            average = average_tiling_error(rel, weighting, mu)
            if average > eps:
                violations.append(
                    f"average error {format_rational(average)} exceeds "
                    f"{format_rational(eps)}"
                )

    return CertificateReport(
        mode, weighting.total, cover, error, average, tuple(violations)
    )
