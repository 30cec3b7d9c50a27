"""Cube of resolutions of the annular closure of a braid word.

Diagram model: with ``c`` letters and ``n`` strands the closure is cut into
nodes ``(level, p)`` for ``level in range(max(c, 1))`` and ``p in range(n)``;
node ``(level, p)`` is the arc of strand position ``p`` just below crossing
``level``.  Node ``(c, p)`` is identified with ``(0, p)`` through the closure
arc, so the nodes at level 0 are exactly the closure arcs.  The seam from the
axis to the outer boundary crosses every closure arc once, hence a circle is
nontrivial iff it contains an odd number of level-0 nodes.

Position ``n - 1`` is innermost (closest to the axis); this makes
``annular_compose(outer, inner)`` put ``inner`` inside.

For a positive letter the 0-smoothing is the braid-like one and the
1-smoothing is the cap-cup; for a negative letter it is the other way round.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations

from .braid import BraidWord

DEFAULT_GENERATOR_CAP = 1 << 26
CAP_ENV_VAR = "ANNULAR_DT_GENERATOR_CAP"


class ResourceLimitError(RuntimeError):
    def __init__(self, count: int, cap: int):
        super().__init__(
            f"complex needs {count} generators, above the cap of {cap}; "
            f"raise it with --cap or ${CAP_ENV_VAR}"
        )
        self.count = count
        self.cap = cap


def default_cap() -> int:
    value = os.environ.get(CAP_ENV_VAR)
    return int(value) if value else DEFAULT_GENERATOR_CAP


def node_index(level: int, pos: int, n: int) -> int:
    return level * n + pos


def crossing_nodes(w: BraidWord, r: int) -> tuple[int, int, int, int]:
    """Nodes ``(below-left, below-right, above-left, above-right)`` of crossing r."""
    n, c = w.strands, len(w.letters)
    i = abs(w.letters[r]) - 1
    up = (r + 1) % c
    return (
        node_index(r, i, n),
        node_index(r, i + 1, n),
        node_index(up, i, n),
        node_index(up, i + 1, n),
    )


def is_braidlike(letter: int, bit: int) -> bool:
    return (bit == 0) == (letter > 0)


@dataclass(frozen=True)
class CircleSet:
    circle_count: int
    circle_of_node: tuple[int, ...]
    nontrivial: tuple[bool, ...]
    # None for trivial circles; 0 is the innermost nontrivial circle
    nesting_index: tuple[int | None, ...]

    @property
    def n_nontrivial(self) -> int:
        return sum(self.nontrivial)

    def first_node(self, circle: int) -> int:
        return self.circle_of_node.index(circle)

    def to_json(self) -> dict:
        return {
            "circle_count": self.circle_count,
            "circle_of_node": list(self.circle_of_node),
            "nontrivial": list(self.nontrivial),
            "nesting_index": list(self.nesting_index),
        }


def resolve(w: BraidWord, bits) -> CircleSet:
    bits = tuple(bits)
    c, n = len(w.letters), w.strands
    if len(bits) != c:
        raise ValueError(f"resolution has {len(bits)} bits, word has {c} letters")
    levels = max(c, 1)
    parent = list(range(levels * n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for r, letter in enumerate(w.letters):
        i = abs(letter) - 1
        up = (r + 1) % c
        for p in range(n):
            if p != i and p != i + 1:
                union(node_index(r, p, n), node_index(up, p, n))
        bl, br, al, ar = crossing_nodes(w, r)
        if is_braidlike(letter, bits[r]):
            union(bl, al)
            union(br, ar)
        else:
            union(bl, br)
            union(al, ar)

    # circles numbered by their smallest node
    label: dict[int, int] = {}
    circle_of_node = []
    for x in range(levels * n):
        root = find(x)
        if root not in label:
            label[root] = len(label)
        circle_of_node.append(label[root])
    count = len(label)

    seam_hits = [0] * count
    for p in range(n):
        seam_hits[circle_of_node[p]] += 1
    nontrivial = tuple(h % 2 == 1 for h in seam_hits)

    nesting: list[int | None] = [None] * count
    depth = 0
    for p in reversed(range(n)):
        circle = circle_of_node[p]
        if nontrivial[circle] and nesting[circle] is None:
            nesting[circle] = depth
            depth += 1
    return CircleSet(count, tuple(circle_of_node), nontrivial, tuple(nesting))


def braidlike_resolution(w: BraidWord) -> tuple[int, ...]:
    return tuple(0 if x > 0 else 1 for x in w.letters)


@dataclass(frozen=True)
class State:
    """One resolution with its circles, placed inside a degree table."""

    bits: tuple[int, ...]
    circles: CircleSet
    offset: int

    @property
    def size(self) -> int:
        return 1 << self.circles.circle_count

    @cached_property
    def nontrivial_mask(self) -> int:
        return sum(self.circle_bit(c) for c, nt in enumerate(self.circles.nontrivial) if nt)

    def circle_bit(self, circle: int) -> int:
        # marks are an integer whose most significant bit is circle 0; bit set = v-
        return 1 << (self.circles.circle_count - 1 - circle)


@dataclass
class DegreeTable:
    """Generators of one homological degree, ordered lexicographically by
    (resolution bits, marks) with v+ before v-."""

    degree: int
    states: list[State] = field(default_factory=list)
    state_index: dict[tuple[int, ...], int] = field(default_factory=dict)
    state_of: list[int] = field(default_factory=list)
    marks: list[int] = field(default_factory=list)
    j: list[int] = field(default_factory=list)
    k: list[int] = field(default_factory=list)

    def __len__(self):
        return len(self.marks)

    def index(self, bits, marks: int) -> int:
        return self.states[self.state_index[tuple(bits)]].offset + marks

    def lattice(self, g: int) -> tuple[int, int]:
        """The (j0, j2) = (j, j - 2k) lattice point of generator g."""
        return self.j[g], self.j[g] - 2 * self.k[g]

    def describe(self, g: int) -> dict:
        st = self.states[self.state_of[g]]
        m = self.marks[g]
        signs = ["-" if m & st.circle_bit(c) else "+" for c in range(st.circles.circle_count)]
        return {"bits": list(st.bits), "marks": "".join(signs), "j": self.j[g], "k": self.k[g]}


@dataclass
class GeneratorTables:
    word: BraidWord
    degrees: dict[int, DegreeTable]

    @property
    def total(self) -> int:
        return sum(len(t) for t in self.degrees.values())

    def __getitem__(self, degree: int) -> DegreeTable:
        return self.degrees[degree]


def resolutions_in_degree(w: BraidWord, degree: int) -> list[tuple[int, ...]]:
    c = len(w.letters)
    ones = degree + w.n_negative
    if ones < 0 or ones > c:
        return []
    out = []
    for chosen in combinations(range(c), ones):
        bits = [0] * c
        for r in chosen:
            bits[r] = 1
        out.append(tuple(bits))
    out.sort()
    return out


def build_degree(w: BraidWord, degree: int, resolved=None) -> DegreeTable:
    if resolved is None:
        resolved = [(bits, resolve(w, bits)) for bits in resolutions_in_degree(w, degree)]
    table = DegreeTable(degree)
    shift = w.n_positive - 2 * w.n_negative
    for bits, circles in resolved:
        st = State(bits, circles, len(table.marks))
        si = len(table.states)
        table.states.append(st)
        table.state_index[bits] = si
        r = sum(bits)
        m = circles.circle_count
        nt_bits = [st.circle_bit(c) for c, nt in enumerate(circles.nontrivial) if nt]
        for marks in range(1 << m):
            minus = bin(marks).count("1")
            kk = sum(-1 if marks & b else 1 for b in nt_bits)
            table.state_of.append(si)
            table.marks.append(marks)
            table.j.append((m - 2 * minus) + r + shift)
            table.k.append(kk)
    return table


def enumerate_generators(w: BraidWord, degrees=None, cap: int | None = None) -> GeneratorTables:
    """Generator tables for the requested homological degrees (all by default).

    Circles are computed for every resolution first so the cap is checked
    before any generator list is materialized.
    """
    if cap is None:
        cap = default_cap()
    if degrees is None:
        degrees = range(-w.n_negative, len(w.letters) - w.n_negative + 1)
    resolved = {}
    total = 0
    for i in sorted(set(degrees)):
        resolved[i] = [(bits, resolve(w, bits)) for bits in resolutions_in_degree(w, i)]
        total += sum(1 << circles.circle_count for _, circles in resolved[i])
        if total > cap:
            raise ResourceLimitError(total, cap)
    return GeneratorTables(w, {i: build_degree(w, i, res) for i, res in resolved.items()})
