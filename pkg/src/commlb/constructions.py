"""Explicit conversions between tilings and pseudotranscripts, plus pruning.

Three constructions:

- `lift`: an exact-cover tiling becomes a pseudotranscript with one outcome
  per positive-weight tile, constant mass w(t) on its rectangle.  The order-
  infinity argument of the result equals the total tile weight.

- `slice_pseudotranscript`: the reverse direction.  For each outcome, inputs
  are sorted by their alpha (resp. beta) factor, ties broken by index, with a
  zero sentinel below the smallest value.  Upper sets of the two orders form
  tiles t_ij; sigma and tau are the strictly positive increments of alpha and
  beta along the orders, and omega = sigma * tau is the tile weight
  contributed by this outcome.  Telescoping gives, exactly,

      sum of omega over tiles of q containing (x,y)  =  p(q | x,y),

  so the aggregate weighting is an exact cover with the same per-cell error
  as the pseudotranscript, and its total weight is the sum over outcomes of
  the maximum conditional mass (the order-infinity argument).

- `prune`: starting from the sliced weighting, pairs (q, t) whose minimum
  conditional mass on the tile is at least theta_q = p(q) * 2^Delta, with
  Delta = (I(XY;Q) + 1) / delta, are discarded.  A Markov argument bounds the
  discarded probability mass by delta; a hyperbola-area argument bounds the
  log of the surviving weight by Delta + log2 log2(|X||Y|) + 2.  The surviving
  weighting is a distributional relaxed-partition certificate at error
  eps + delta, which yields the information-cost lower bound on the relaxed
  partition value.  All four statements are re-verified numerically on the
  actual discarded set, instance by instance.

Exactness policy: sigma, tau, omega, probability masses and certificate
weights are exact rationals end to end.  Delta and theta_q involve a Shannon
quantity and are floats; the bad-set comparison rounds the exact rational
side *down* to the nearest double, which can only bias borderline pairs out
of the bad set, and the a-posteriori claim checks make any such bias visible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from . import bounds
from .core import (
    Cell,
    DEFAULT_TILE_CAP,
    InputDistribution,
    ONE,
    Relation,
    Tile,
    TileWeighting,
    ValidationError,
    ZERO,
    cover_mass,
    format_rational,
    weighting_to_json,
)
from .measures import log2_exact, shannon_cost_of_pseudotranscript
from .pseudotranscript import (
    Factorization,
    Pseudotranscript,
    average_pseudotranscript_error,
    _check_shapes,
)

LOG_TOLERANCE = 1e-6


def float_rounded_down(value: Fraction) -> float:
    """Largest double <= value (the plain float() conversion rounds to nearest)."""
    f = float(value)
    if Fraction(f) > value:
        f = math.nextafter(f, -math.inf)
    return f


def _two_pow(exponent: float) -> float:
    try:
        return 2.0**exponent
    except OverflowError:
        return math.inf


def lift(rel: Relation, weighting: TileWeighting) -> Pseudotranscript:
    """Exact-cover tiling -> pseudotranscript with one outcome per tile."""
    weighting.check_range(rel.x_size, rel.y_size, rel.z_size)
    cover = cover_mass(weighting, rel.x_size, rel.y_size)
    for cell in rel.cells():
        if cover[cell] != ONE:
            raise ValidationError(
                f"weighting is not an exact cover: cell {cell} carries mass "
                f"{format_rational(cover[cell])}, not 1"
            )
    outcomes = []
    for tile, w in weighting.items():
        matrix = tuple(
            tuple(w if (x, y) in tile else ZERO for y in range(rel.y_size))
            for x in range(rel.x_size)
        )
        outcomes.append((tile.z, matrix))
    return Pseudotranscript.of(rel.x_size, rel.y_size, rel.z_size, outcomes)


@dataclass(frozen=True)
class SlicedTile:
    """One tile in the slicing of a single outcome, with its exact increments."""

    tile: Tile
    sigma: Fraction
    tau: Fraction
    omega: Fraction
    alpha_min: Fraction  # smallest alpha inside the tile (positive)
    beta_min: Fraction


@dataclass(frozen=True)
class OutcomeSlice:
    outcome_index: int
    z: int
    x_order: tuple[int, ...]
    y_order: tuple[int, ...]
    factorization: Factorization
    tiles: tuple[SlicedTile, ...]
    alpha_star: Fraction
    beta_star: Fraction

    @property
    def max_mass(self) -> Fraction:
        """Maximum conditional mass of this outcome: alpha* times beta*."""
        return self.alpha_star * self.beta_star

    def surviving_mass(self, bad: frozenset[tuple[int, Tile]]) -> Fraction:
        return sum(
            (st.omega for st in self.tiles if (self.outcome_index, st.tile) not in bad),
            start=ZERO,
        )


@dataclass(frozen=True)
class SliceResult:
    outcome_slices: tuple[OutcomeSlice, ...]
    weighting: TileWeighting
    total: Fraction

    def pairs(self) -> Iterator[tuple[OutcomeSlice, SlicedTile]]:
        for sl in self.outcome_slices:
            for st in sl.tiles:
                yield sl, st


def _positive_steps(values, order) -> list[tuple[int, Fraction]]:
    """(position, increment) pairs where the sorted values strictly increase;
    the sentinel below the first value is zero."""
    steps = []
    prev = ZERO
    for pos, idx in enumerate(order):
        v = values[idx]
        if v > prev:
            steps.append((pos, v - prev))
            prev = v
    return steps


def _slice_outcome(qi: int, z: int, fact: Factorization) -> OutcomeSlice:
    alpha, beta = fact.alpha, fact.beta
    x_order = tuple(sorted(range(len(alpha)), key=lambda x: (alpha[x], x)))
    y_order = tuple(sorted(range(len(beta)), key=lambda y: (beta[y], y)))
    x_steps = _positive_steps(alpha, x_order)
    y_steps = _positive_steps(beta, y_order)
    tiles = []
    for i, sigma in x_steps:
        xs = frozenset(x_order[i:])
        alpha_min = alpha[x_order[i]]
        for j, tau in y_steps:
            tile = Tile(xs, frozenset(y_order[j:]), z)
            tiles.append(
                SlicedTile(tile, sigma, tau, sigma * tau, alpha_min, beta[y_order[j]])
            )
    alpha_star = max(alpha) if alpha else ZERO
    beta_star = max(beta) if beta else ZERO
    return OutcomeSlice(qi, z, x_order, y_order, fact, tuple(tiles), alpha_star, beta_star)


def slice_pseudotranscript(rel: Relation, q_transcript: Pseudotranscript) -> SliceResult:
    """Pseudotranscript -> exact-cover tiling of total weight equal to the
    order-infinity argument, preserving the error function cell by cell."""
    _check_shapes(rel, q_transcript)
    slices = []
    aggregate: dict[Tile, Fraction] = {}
    total = ZERO
    for qi, (outcome, fact) in enumerate(
        zip(q_transcript.outcomes, q_transcript.factorizations)
    ):
        sl = _slice_outcome(qi, outcome.z, fact)
        slices.append(sl)
        for st in sl.tiles:
            aggregate[st.tile] = aggregate.get(st.tile, ZERO) + st.omega
            total += st.omega
    return SliceResult(tuple(slices), TileWeighting(aggregate), total)


def hyperbola_area_bound(outcome_slice: OutcomeSlice, theta: float) -> float:
    """Area of the alpha* x beta* rectangle lying under the hyperbola xy = theta.

    This dominates the surviving (non-discarded) omega mass of the outcome,
    because every surviving tile's rectangle sits entirely under the
    hyperbola.  Natural log appears only inside this area formula; every
    reported quantity stays base 2.
    """
    if theta <= 0:
        raise ValidationError(f"hyperbola threshold must be positive, got {theta}")
    full = float(outcome_slice.max_mass)
    if theta >= full:
        return full
    return theta * (1.0 + math.log(full / theta))


@dataclass(frozen=True)
class ClaimReport:
    name: str
    passed: bool
    lhs: float
    rhs: float
    detail: str

    def to_json_dict(self) -> dict:
        return {
            "pass": self.passed,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class PruneResult:
    delta: Fraction
    Delta: float
    info_bits: float
    epsilon: Fraction
    eps_plus: Fraction
    p_q: dict[int, Fraction]
    theta: dict[int, float]
    bad_pairs: frozenset[tuple[int, Tile]]
    slice_result: SliceResult
    pruned: TileWeighting
    removed_mass: Fraction
    surviving_total: Fraction
    relaxed_mu_value: Fraction | None
    claim_missingmass: ClaimReport
    claim_tilebound: ClaimReport
    claim_feasibility: ClaimReport
    final_inequality: ClaimReport
    hyperbola_checks: tuple[tuple[int, float, float], ...]
    trivial: bool

    @property
    def claims(self) -> tuple[ClaimReport, ...]:
        return (
            self.claim_missingmass,
            self.claim_tilebound,
            self.claim_feasibility,
            self.final_inequality,
        )

    @property
    def passed(self) -> bool:
        hyperbola_ok = all(
            bound + LOG_TOLERANCE >= surviving
            for _, bound, surviving in self.hyperbola_checks
        )
        return hyperbola_ok and all(c.passed for c in self.claims)

    def to_json_dict(self) -> dict:
        return {
            "delta": format_rational(self.delta),
            "Delta": self.Delta,
            "epsilon": format_rational(self.epsilon),
            "eps_plus": format_rational(self.eps_plus),
            "info_bits": self.info_bits,
            "removed_mass": format_rational(self.removed_mass),
            "surviving_total": format_rational(self.surviving_total),
            "trivial": self.trivial,
            "claim_missingmass": self.claim_missingmass.to_json_dict(),
            "claim_tilebound": self.claim_tilebound.to_json_dict(),
            "claim_feasibility": self.claim_feasibility.to_json_dict(),
            "final_inequality": self.final_inequality.to_json_dict(),
            "certificate": weighting_to_json(self.pruned),
        }


def prune(
    rel: Relation,
    q_transcript: Pseudotranscript,
    mu: InputDistribution,
    delta: Fraction,
    *,
    tile_cap: int = DEFAULT_TILE_CAP,
) -> PruneResult:
    """Discard heavy (outcome, tile) pairs and verify the four resulting claims.

    Claims, checked on the instance: the discarded probability mass is at
    most delta; the log of the surviving weight obeys the hyperbola bound;
    the surviving weighting is feasible for the distributional relaxed bound
    at error eps + delta; and the Shannon cost dominates
    delta * log2(relaxed value) - (delta * log2 log2(|X||Y|) + 3).
    """
    delta = Fraction(delta)
    if not (ZERO < delta <= ONE):
        raise ValidationError(f"delta must lie in (0,1], got {delta}")
    _check_shapes(rel, q_transcript)
    if (mu.x_size, mu.y_size) != (rel.x_size, rel.y_size):
        raise ValidationError("distribution shape does not match the relation")

    epsilon = average_pseudotranscript_error(rel, q_transcript, mu)
    info_bits = shannon_cost_of_pseudotranscript(q_transcript, mu)
    Delta = (info_bits + 1.0) / float(delta)
    sliced = slice_pseudotranscript(rel, q_transcript)

    p_q: dict[int, Fraction] = {}
    for qi, outcome in enumerate(q_transcript.outcomes):
        p_q[qi] = sum(
            (mu(x, y) * outcome.matrix[x][y] for (x, y) in rel.cells()), start=ZERO
        )
    two_Delta = _two_pow(Delta)
    theta = {qi: float(mass) * two_Delta for qi, mass in p_q.items()}

    mu_on_tile: dict[Tile, Fraction] = {}

    def tile_mass(tile: Tile) -> Fraction:
        if tile not in mu_on_tile:
            mu_on_tile[tile] = sum(
                (mu(x, y) for x in tile.xs for y in tile.ys), start=ZERO
            )
        return mu_on_tile[tile]

    bad: set[tuple[int, Tile]] = set()
    removed = ZERO
    surviving_total = ZERO
    pruned_weights: dict[Tile, Fraction] = {}
    for sl, st in sliced.pairs():
        if float_rounded_down(st.alpha_min * st.beta_min) >= theta[sl.outcome_index]:
            bad.add((sl.outcome_index, st.tile))
            removed += st.omega * tile_mass(st.tile)
        else:
            surviving_total += st.omega
            pruned_weights[st.tile] = pruned_weights.get(st.tile, ZERO) + st.omega
    bad_pairs = frozenset(bad)
    pruned = TileWeighting(pruned_weights)
    eps_plus = min(epsilon + delta, ONE)

    trivial = rel.x_size * rel.y_size == 1
    loglog = (
        math.log2(math.log2(rel.x_size * rel.y_size)) if not trivial else float("-inf")
    )

    claim_missingmass = ClaimReport(
        "missingmass",
        removed <= delta,
        float(removed),
        float(delta),
        f"removed mass {format_rational(removed)} vs delta {format_rational(delta)}",
    )

    if trivial:
        claim_tilebound = ClaimReport(
            "tilebound", True, 0.0, 0.0, "single-cell domain: bound holds trivially"
        )
    else:
        lhs = log2_exact(surviving_total)
        rhs = Delta + loglog + 2.0
        claim_tilebound = ClaimReport(
            "tilebound",
            lhs <= rhs + LOG_TOLERANCE,
            lhs,
            rhs,
            "log2 surviving weight vs Delta + log2 log2(|X||Y|) + 2",
        )

    report = bounds.verify_certificate(rel, pruned, eps=eps_plus, mu=mu)
    claim_feasibility = ClaimReport(
        "feasibility",
        report.passed,
        float(report.average_error),
        float(eps_plus),
        "pruned weighting satisfies relaxed cover and average error <= eps + delta",
    )

    relaxed_value: Fraction | None = None
    if trivial:
        final_inequality = ClaimReport(
            "final_inequality", True, info_bits, 0.0,
            "single-cell domain: bound holds trivially",
        )
    else:
        relaxed = bounds.relaxed_prt_mu(rel, eps_plus, mu, tile_cap=tile_cap)
        relaxed.require_optimal()
        relaxed_value = relaxed.value
        rhs = float(delta) * relaxed.log2_value - (float(delta) * loglog + 3.0)
        final_inequality = ClaimReport(
            "final_inequality",
            info_bits >= rhs - LOG_TOLERANCE,
            info_bits,
            rhs,
            "Shannon cost vs delta * log2(relaxed value) - (delta*log2log2(|X||Y|) + 3)",
        )

    hyperbola_checks = []
    for sl in sliced.outcome_slices:
        th = theta[sl.outcome_index]
        if th <= 0 or math.isinf(Delta):
            continue
        surviving_q = float(sl.surviving_mass(bad_pairs))
        hyperbola_checks.append((sl.outcome_index, hyperbola_area_bound(sl, th), surviving_q))

    return PruneResult(
        delta=delta,
        Delta=Delta,
        info_bits=info_bits,
        epsilon=epsilon,
        eps_plus=eps_plus,
        p_q=p_q,
        theta=theta,
        bad_pairs=bad_pairs,
        slice_result=sliced,
        pruned=pruned,
        removed_mass=removed,
        surviving_total=surviving_total,
        relaxed_mu_value=relaxed_value,
        claim_missingmass=claim_missingmass,
        claim_tilebound=claim_tilebound,
        claim_feasibility=claim_feasibility,
        final_inequality=final_inequality,
        hyperbola_checks=tuple(hyperbola_checks),
        trivial=trivial,
    )
