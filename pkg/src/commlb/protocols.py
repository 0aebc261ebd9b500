"""Deterministic protocol trees, tiny-scale exhaustive search, transcripts.

A tree alternates freely between the two speakers; each internal node maps
the speaking party's input value to one bit and routes to the corresponding
child, each leaf carries an output label.  Messages are single bits per
round; a multi-bit message is consecutive rounds by the same speaker.

Only deterministic trees plus explicit public-coin mixtures are represented.
Private randomness folds into the public coin without changing the bit count,
so no private-coin machinery exists.  The worst-case bit count of a mixture
excludes the coin itself; the transcript-as-pseudotranscript construction
includes the coin value in the outcome.

Exhaustive search canonicalizes trees: a node's message map must split the
inputs still possible at that node into two nonempty parts (a constant
message wastes a bit, so this loses no generality for worst-case bit
counts), and unreachable leaves are never generated.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .core import (
    Cell,
    ONE,
    ParseError,
    Relation,
    SizeLimitError,
    ValidationError,
    ZERO,
    _require,
)
from .pseudotranscript import Pseudotranscript

ALICE = "A"
BOB = "B"

MAX_ENUM_INPUT = 3
MAX_ENUM_BITS = 4
MAX_ENUM_TREES = 10**6


@dataclass(frozen=True)
class Leaf:
    z: int


@dataclass(frozen=True)
class Node:
    speaker: str
    msg: tuple[int, ...]
    children: tuple["ProtocolNode", "ProtocolNode"]


ProtocolNode = Leaf | Node


@dataclass(frozen=True)
class RunResult:
    leaf_id: str
    bits: tuple[int, ...]
    z: int


@dataclass(frozen=True)
class ProtocolTree:
    x_size: int
    y_size: int
    z_size: int
    root: ProtocolNode

    def __post_init__(self):
        if min(self.x_size, self.y_size, self.z_size) < 1:
            raise ValidationError("alphabet sizes must all be >= 1")
        self._validate(self.root)

    def _validate(self, node: ProtocolNode) -> None:
        if isinstance(node, Leaf):
            if not (0 <= node.z < self.z_size):
                raise ValidationError(f"leaf label {node.z} out of range")
            return
        if node.speaker not in (ALICE, BOB):
            raise ValidationError(f"unknown speaker {node.speaker!r}")
        expected = self.x_size if node.speaker == ALICE else self.y_size
        if len(node.msg) != expected:
            raise ValidationError(
                f"message map has {len(node.msg)} entries, expected {expected} "
                f"for speaker {node.speaker}"
            )
        if any(b not in (0, 1) for b in node.msg):
            raise ValidationError("message bits must be 0 or 1")
        if len(node.children) != 2:
            raise ValidationError("internal nodes must have exactly two children")
        for child in node.children:
            self._validate(child)

    def run(self, x: int, y: int) -> RunResult:
        if not (0 <= x < self.x_size and 0 <= y < self.y_size):
            raise ValidationError(f"input ({x},{y}) out of range")
        node = self.root
        bits: list[int] = []
        while isinstance(node, Node):
            b = node.msg[x if node.speaker == ALICE else y]
            bits.append(b)
            node = node.children[b]
        return RunResult("".join(map(str, bits)), tuple(bits), node.z)

    def leaf_rectangles(self) -> dict[str, tuple[frozenset[int], frozenset[int], int]]:
        """Reachable leaves in DFS order: path -> (xs, ys, label)."""
        out: dict[str, tuple[frozenset[int], frozenset[int], int]] = {}

        def walk(node: ProtocolNode, path: str, xs: frozenset[int], ys: frozenset[int]):
            if isinstance(node, Leaf):
                out[path] = (xs, ys, node.z)
                return
            for b in (0, 1):
                if node.speaker == ALICE:
                    part = frozenset(v for v in xs if node.msg[v] == b)
                    if part:
                        walk(node.children[b], path + str(b), part, ys)
                else:
                    part = frozenset(v for v in ys if node.msg[v] == b)
                    if part:
                        walk(node.children[b], path + str(b), xs, part)

        walk(self.root, "", frozenset(range(self.x_size)), frozenset(range(self.y_size)))
        return out

    def worst_case_bits(self) -> int:
        return max(len(path) for path in self.leaf_rectangles())


def run(tree: ProtocolTree, x: int, y: int) -> RunResult:
    return tree.run(x, y)


def _check_enum_caps(x_size: int, y_size: int, max_bits: int) -> None:
    if x_size > MAX_ENUM_INPUT or y_size > MAX_ENUM_INPUT:
        raise SizeLimitError(
            f"protocol search supports input alphabets up to {MAX_ENUM_INPUT}, "
            f"got {x_size}x{y_size}"
        )
    if max_bits > MAX_ENUM_BITS:
        raise SizeLimitError(
            f"protocol search supports at most {MAX_ENUM_BITS} bits, got {max_bits}"
        )


def _proper_splits(values: tuple[int, ...], *, unordered: bool):
    """Bipartitions (part0, part1) of values with both sides nonempty.

    With unordered=True the first value stays in part0, halving the space;
    child subtrees are interchangeable there, so nothing is lost.
    """
    k = len(values)
    for mask in range(1, 2**k - 1):
        if unordered and mask & 1:
            continue
        part1 = tuple(values[i] for i in range(k) if (mask >> i) & 1)
        part0 = tuple(values[i] for i in range(k) if not (mask >> i) & 1)
        yield part0, part1


def _common_labels(rel: Relation, xs: tuple[int, ...], ys: tuple[int, ...]) -> frozenset[int]:
    labels = frozenset(range(rel.z_size))
    for x in xs:
        for y in ys:
            labels &= rel.accept[x][y]
            if not labels:
                return labels
    return labels


@dataclass(frozen=True)
class ZeroErrorResult:
    found: bool
    bits: int | None
    witness: "ProtocolTree | None"


def enumerate_zero_error(rel: Relation, max_bits: int) -> ZeroErrorResult:
    """Minimum worst-case bit count of a zero-error tree, if one fits the cap.

    Memoized search over reachable input rectangles; every canonical tree
    shape is implicitly explored, and one optimal witness is reconstructed.
    """
    _check_enum_caps(rel.x_size, rel.y_size, max_bits)
    memo: dict[tuple[tuple[int, ...], tuple[int, ...]], tuple[int, tuple]] = {}

    def best(xs: tuple[int, ...], ys: tuple[int, ...]) -> tuple[int, tuple]:
        key = (xs, ys)
        if key in memo:
            return memo[key]
        labels = _common_labels(rel, xs, ys)
        if labels:
            result = (0, ("leaf", min(labels)))
        else:
            result = None
            for speaker, values in ((ALICE, xs), (BOB, ys)):
                if len(values) < 2:
                    continue
                for part0, part1 in _proper_splits(values, unordered=True):
                    if speaker == ALICE:
                        d0, plan0 = best(part0, ys)
                        d1, plan1 = best(part1, ys)
                    else:
                        d0, plan0 = best(xs, part0)
                        d1, plan1 = best(xs, part1)
                    depth = 1 + max(d0, d1)
                    if result is None or depth < result[0]:
                        result = (depth, ("node", speaker, frozenset(part1), plan0, plan1))
            assert result is not None, "singleton rectangles always admit a common label"
        memo[key] = result
        return result

    bits, plan = best(tuple(range(rel.x_size)), tuple(range(rel.y_size)))
    if bits > max_bits:
        return ZeroErrorResult(False, None, None)

    def build(plan) -> ProtocolNode:
        if plan[0] == "leaf":
            return Leaf(plan[1])
        _, speaker, part1, plan0, plan1 = plan
        size = rel.x_size if speaker == ALICE else rel.y_size
        msg = tuple(1 if v in part1 else 0 for v in range(size))
        return Node(speaker, msg, (build(plan0), build(plan1)))

    witness = ProtocolTree(rel.x_size, rel.y_size, rel.z_size, build(plan))
    return ZeroErrorResult(True, bits, witness)


def _count_trees(x_size: int, y_size: int, z_size: int, max_bits: int) -> int:
    memo: dict = {}

    def count(nx: int, ny: int, depth: int) -> int:
        # only the part sizes matter for counting
        key = (nx, ny, depth)
        if key in memo:
            return memo[key]
        total = z_size
        if depth:
            for size, is_alice in ((nx, True), (ny, False)):
                if size < 2:
                    continue
                from math import comb

                for k in range(1, size):
                    pairs = comb(size, k)
                    child0 = count(size - k, ny, depth - 1) if is_alice else count(nx, size - k, depth - 1)
                    child1 = count(k, ny, depth - 1) if is_alice else count(nx, k, depth - 1)
                    total += pairs * child0 * child1
        memo[key] = total
        return total

    return count(x_size, y_size, max_bits)


def enumerate_trees(
    x_size: int, y_size: int, z_size: int, max_bits: int
) -> list[ProtocolTree]:
    """Every canonical tree of depth at most max_bits (all leaves reachable)."""
    _check_enum_caps(x_size, y_size, max_bits)
    total = _count_trees(x_size, y_size, z_size, max_bits)
    if total > MAX_ENUM_TREES:
        raise SizeLimitError(f"{total} canonical trees exceed the cap of {MAX_ENUM_TREES}")

    memo: dict = {}

    def gen(xs: tuple[int, ...], ys: tuple[int, ...], depth: int) -> list[ProtocolNode]:
        key = (xs, ys, depth)
        if key in memo:
            return memo[key]
        nodes: list[ProtocolNode] = [Leaf(z) for z in range(z_size)]
        if depth:
            for speaker, values, size in ((ALICE, xs, x_size), (BOB, ys, y_size)):
                if len(values) < 2:
                    continue
                for part0, part1 in _proper_splits(values, unordered=False):
                    msg = tuple(1 if v in part1 else 0 for v in range(size))
                    if speaker == ALICE:
                        subs0 = gen(part0, ys, depth - 1)
                        subs1 = gen(part1, ys, depth - 1)
                    else:
                        subs0 = gen(xs, part0, depth - 1)
                        subs1 = gen(xs, part1, depth - 1)
                    for c0 in subs0:
                        for c1 in subs1:
                            nodes.append(Node(speaker, msg, (c0, c1)))
        memo[key] = nodes
        return nodes

    roots = gen(tuple(range(x_size)), tuple(range(y_size)), max_bits)
    return [ProtocolTree(x_size, y_size, z_size, root) for root in roots]


def transcript_pseudotranscript(
    trees: Sequence[ProtocolTree], weights: Sequence[Fraction]
) -> Pseudotranscript:
    """Public-coin mixture -> pseudotranscript over (coin, leaf) outcomes."""
    if not trees:
        raise ValidationError("mixture needs at least one tree")
    if len(trees) != len(weights):
        raise ValidationError("one weight per tree required")
    shape = (trees[0].x_size, trees[0].y_size, trees[0].z_size)
    for t in trees[1:]:
        if (t.x_size, t.y_size, t.z_size) != shape:
            raise ValidationError("mixture trees have mismatched alphabets")
    weights = tuple(Fraction(w) for w in weights)
    if any(w < 0 for w in weights):
        raise ValidationError("coin weights must be nonnegative")
    if sum(weights, start=ZERO) != ONE:
        raise ValidationError("coin weights must sum to exactly 1")

    x_size, y_size, z_size = shape
    outcomes = []
    for w, tree in zip(weights, trees):
        if not w:
            continue
        for _, (xs, ys, z) in tree.leaf_rectangles().items():
            matrix = tuple(
                tuple(w if (x in xs and y in ys) else ZERO for y in range(y_size))
                for x in range(x_size)
            )
            outcomes.append((z, matrix))
    return Pseudotranscript.of(x_size, y_size, z_size, outcomes)


def protocol_error(
    rel: Relation, trees: Sequence[ProtocolTree], weights: Sequence[Fraction]
) -> dict[Cell, Fraction]:
    """Pointwise error function of a public-coin mixture; exact."""
    err = {cell: ZERO for cell in rel.cells()}
    for w, tree in zip(weights, trees):
        if not w:
            continue
        for x, y in rel.cells():
            if not rel.accepts(x, y, tree.run(x, y).z):
                err[(x, y)] += Fraction(w)
    return err


def worst_case_bits(trees: Sequence[ProtocolTree], weights: Sequence[Fraction]) -> int:
    """Worst-case transcript length over inputs and coins with positive weight."""
    counted = [t for t, w in zip(trees, weights) if w]
    if not counted:
        raise ValidationError("mixture has no positive-weight tree")
    return max(t.worst_case_bits() for t in counted)


# JSON format: nested nodes { "speaker": "A"|"B", "msg": [bit, ...],
# "children": [node, node] } with leaves { "z": int }.  Alphabet sizes come
# from the surrounding context (e.g. the relation file).


def protocol_tree_to_json(tree: ProtocolTree) -> dict:
    def encode(node: ProtocolNode) -> dict:
        if isinstance(node, Leaf):
            return {"z": node.z}
        return {
            "speaker": node.speaker,
            "msg": list(node.msg),
            "children": [encode(c) for c in node.children],
        }

    return encode(tree.root)


def protocol_tree_from_json(
    obj: Mapping, *, x_size: int, y_size: int, z_size: int
) -> ProtocolTree:
    def decode(node, where: str) -> ProtocolNode:
        if not isinstance(node, Mapping):
            raise ParseError("expected a JSON object", where)
        if "z" in node:
            z = node["z"]
            if not isinstance(z, int) or isinstance(z, bool):
                raise ParseError("'z' must be an int", where)
            return Leaf(z)
        speaker = _require(node, "speaker", where)
        msg = _require(node, "msg", where)
        children = _require(node, "children", where)
        if not isinstance(children, Sequence) or len(children) != 2:
            raise ParseError("'children' must be a list of two nodes", where)
        if not isinstance(msg, Sequence) or any(
            not isinstance(b, int) or isinstance(b, bool) for b in msg
        ):
            raise ParseError("'msg' must be a list of bits", where)
        return Node(
            speaker,
            tuple(msg),
            (
                decode(children[0], f"{where}.children[0]"),
                decode(children[1], f"{where}.children[1]"),
            ),
        )

    return ProtocolTree(x_size, y_size, z_size, decode(obj, "protocol"))
