"""Self-contained exact-rational linear programming.

Solver: two-phase primal simplex on a dense tableau with Bland's anti-cycling
rule (entering variable: smallest index with negative reduced cost; leaving
row: among minimum ratios, the one whose basic variable has the smallest
index).  Bland's rule guarantees termination; no performance pivoting
heuristics are used.

All arithmetic is exact.  The public interface speaks `fractions.Fraction`;
pivoting internally runs on `gmpy2.mpq`, which is an order of magnitude
faster for small rationals, and converts back on exit.  Results are
deterministic: identical inputs produce the identical pivot sequence and a
bit-identical solution.

Problem form: minimize c.w subject to rows of =, <= or >= constraints, with
all variables implicitly bounded below by 0.  Inequalities become equalities
through slack/surplus columns; equality rows (and surplus rows) receive
artificial variables for phase 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from gmpy2 import mpq

from .core import SizeLimitError, ValidationError, ZERO

EQ = "="
LE = "<="
GE = ">="
SENSES = (EQ, LE, GE)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

DEFAULT_VARIABLE_CAP = 200_000


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple[Fraction, ...]
    sense: str
    rhs: Fraction

    def __post_init__(self):
        if self.sense not in SENSES:
            raise ValidationError(f"unknown constraint sense {self.sense!r}")


@dataclass(frozen=True)
class LinearProgram:
    """minimize objective . w  subject to constraints, w >= 0."""

    objective: tuple[Fraction, ...]
    constraints: tuple[Constraint, ...]

    def __post_init__(self):
        n = len(self.objective)
        for i, c in enumerate(self.constraints):
            if len(c.coeffs) != n:
                raise ValidationError(
                    f"constraint {i} has {len(c.coeffs)} coefficients, expected {n}"
                )

    @classmethod
    def minimize(
        cls,
        objective: Sequence[Fraction],
        constraints: Iterable[tuple[Sequence[Fraction], str, Fraction]],
    ) -> "LinearProgram":
        return cls(
            tuple(Fraction(v) for v in objective),
            tuple(
                Constraint(tuple(Fraction(v) for v in coeffs), sense, Fraction(rhs))
                for coeffs, sense, rhs in constraints
            ),
        )

    @property
    def n_vars(self) -> int:
        return len(self.objective)


@dataclass(frozen=True)
class LpSolution:
    status: str
    value: Fraction | None
    assignment: dict[int, Fraction]

    def dense(self, n_vars: int) -> list[Fraction]:
        out = [ZERO] * n_vars
        for j, v in self.assignment.items():
            out[j] = v
        return out


@dataclass(frozen=True)
class ConstraintCheck:
    index: int
    sense: str
    lhs: Fraction
    rhs: Fraction
    satisfied: bool

    @property
    def slack(self) -> Fraction:
        """Signed surplus: rhs - lhs for <=, lhs - rhs for >= and = rows."""
        if self.sense == LE:
            return self.rhs - self.lhs
        return self.lhs - self.rhs


@dataclass(frozen=True)
class FeasibilityReport:
    checks: tuple[ConstraintCheck, ...]
    negative_vars: tuple[int, ...]
    objective_value: Fraction

    @property
    def all_satisfied(self) -> bool:
        return not self.negative_vars and all(c.satisfied for c in self.checks)

    def failures(self) -> list[str]:
        out = [f"variable {j} is negative" for j in self.negative_vars]
        for c in self.checks:
            if not c.satisfied:
                out.append(
                    f"constraint {c.index}: lhs {c.lhs} {c.sense} rhs {c.rhs} violated "
                    f"(slack {c.slack})"
                )
        return out


def _to_q(value: Fraction):
    return mpq(value.numerator, value.denominator)


def _to_fraction(value) -> Fraction:
    return Fraction(int(value.numerator), int(value.denominator))


class _Tableau:
    """Mutable simplex state: rows, right-hand sides and the current basis."""

    def __init__(self, rows, rhs, basis):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis

    def pivot(self, leave: int, enter: int, reduced: list | None) -> None:
        prow = self.rows[leave]
        piv = prow[enter]
        if piv != 1:
            inv = 1 / piv
            prow = [v * inv for v in prow]
            self.rows[leave] = prow
            self.rhs[leave] *= inv
        prhs = self.rhs[leave]
        # touch only the pivot row's nonzero columns in every other row
        support = [(j, v) for j, v in enumerate(prow) if v]
        for k, row in enumerate(self.rows):
            if k == leave:
                continue
            f = row[enter]
            if f:
                for j, v in support:
                    row[j] -= f * v
                self.rhs[k] -= f * prhs
        if reduced is not None:
            f = reduced[enter]
            if f:
                for j, v in support:
                    reduced[j] -= f * v
        self.basis[leave] = enter

    def run(self, cost: list) -> str:
        """Bland-rule simplex to optimality; cost has one entry per column."""
        reduced = list(cost)
        for i, bj in enumerate(self.basis):
            f = reduced[bj]
            if f:
                row = self.rows[i]
                reduced = [r - f * a for r, a in zip(reduced, row)]
        rows, rhs, basis = self.rows, self.rhs, self.basis
        while True:
            enter = -1
            for j, r in enumerate(reduced):
                if r < 0:
                    enter = j
                    break
            if enter < 0:
                return OPTIMAL
            leave = -1
            best = None
            for i, row in enumerate(rows):
                a = row[enter]
                if a > 0:
                    ratio = rhs[i] / a
                    if (
                        best is None
                        or ratio < best
                        or (ratio == best and basis[i] < basis[leave])
                    ):
                        best = ratio
                        leave = i
            if leave < 0:
                return UNBOUNDED
            self.pivot(leave, enter, reduced)

    def basic_value(self, cost: list):
        total = mpq(0)
        for i, bj in enumerate(self.basis):
            if cost[bj]:
                total += cost[bj] * self.rhs[i]
        return total


def solve(lp: LinearProgram, *, variable_cap: int = DEFAULT_VARIABLE_CAP) -> LpSolution:
    """Exact optimum of the program, or an infeasible/unbounded status."""
    n = lp.n_vars
    if n > variable_cap:
        raise SizeLimitError(
            f"linear program has {n} variables, above the cap of {variable_cap}"
        )
    m = len(lp.constraints)
    zero, one = mpq(0), mpq(1)

    slack_col: dict[int, int] = {}
    width = n
    for i, c in enumerate(lp.constraints):
        if c.sense != EQ:
            slack_col[i] = width
            width += 1

    rows: list[list] = []
    rhs: list = []
    basis: list[int] = []
    for i, c in enumerate(lp.constraints):
        row = [_to_q(v) for v in c.coeffs] + [zero] * (width - n)
        b = _to_q(c.rhs)
        if c.sense == LE:
            row[slack_col[i]] = one
        elif c.sense == GE:
            row[slack_col[i]] = -one
        if b < 0:
            row = [-v for v in row]
            b = -b
        rows.append(row)
        rhs.append(b)
        j = slack_col.get(i)
        # a +1 slack column with nonnegative rhs can serve as the initial basis
        basis.append(j if j is not None and rows[i][j] == one else -1)

    art_start = width
    n_art = basis.count(-1)
    if n_art:
        k = 0
        for i in range(m):
            art = [zero] * n_art
            if basis[i] == -1:
                art[k] = one
                basis[i] = art_start + k
                k += 1
            rows[i] = rows[i] + art
        width += n_art

    tableau = _Tableau(rows, rhs, basis)

    if n_art:
        phase1_cost = [zero] * art_start + [one] * n_art
        status = tableau.run(phase1_cost)
        assert status == OPTIMAL, "phase 1 objective is bounded below by zero"
        if tableau.basic_value(phase1_cost) != 0:
            return LpSolution(INFEASIBLE, None, {})
        # Drive leftover artificials out of the basis; their rows sit at zero,
        # so pivoting on any nonzero structural entry preserves feasibility.
        keep = []
        for i in range(m):
            if tableau.basis[i] >= art_start:
                enter = next(
                    (j for j in range(art_start) if tableau.rows[i][j] != 0), None
                )
                if enter is None:
                    continue  # redundant row
                tableau.pivot(i, enter, None)
            keep.append(i)
        tableau.rows = [tableau.rows[i][:art_start] for i in keep]
        tableau.rhs = [tableau.rhs[i] for i in keep]
        tableau.basis = [tableau.basis[i] for i in keep]
        width = art_start

    phase2_cost = [_to_q(v) for v in lp.objective] + [zero] * (width - n)
    status = tableau.run(phase2_cost)
    if status == UNBOUNDED:
        return LpSolution(UNBOUNDED, None, {})

    assignment: dict[int, Fraction] = {}
    for i, bj in enumerate(tableau.basis):
        if bj < n and tableau.rhs[i] != 0:
            assignment[bj] = _to_fraction(tableau.rhs[i])
    value = sum((lp.objective[j] * v for j, v in assignment.items()), start=ZERO)
    return LpSolution(OPTIMAL, value, assignment)


def check_feasible(
    lp: LinearProgram, assignment: Mapping[int, Fraction] | Sequence[Fraction]
) -> FeasibilityReport:
    """Exact re-evaluation of every constraint (and the w >= 0 bounds)."""
    n = lp.n_vars
    dense = [ZERO] * n
    if isinstance(assignment, Mapping):
        for j, v in assignment.items():
            if not (0 <= j < n):
                raise ValidationError(f"assignment index {j} out of range for {n} variables")
            dense[j] = Fraction(v)
    else:
        if len(assignment) != n:
            raise ValidationError(
                f"assignment has {len(assignment)} entries, expected {n}"
            )
        dense = [Fraction(v) for v in assignment]

    negative = tuple(j for j, v in enumerate(dense) if v < 0)
    checks = []
    for i, c in enumerate(lp.constraints):
        lhs = sum((a * v for a, v in zip(c.coeffs, dense) if a and v), start=ZERO)
        if c.sense == EQ:
            ok = lhs == c.rhs
        elif c.sense == LE:
            ok = lhs <= c.rhs
        else:
            ok = lhs >= c.rhs
        checks.append(ConstraintCheck(i, c.sense, lhs, c.rhs, ok))
    objective_value = sum((a * v for a, v in zip(lp.objective, dense)), start=ZERO)
    return FeasibilityReport(tuple(checks), negative, objective_value)
