"""The annular Khovanov-Lee complex of a braid closure.

The Frobenius algebra is Q[x]/(x^2 - 1) with v+ = 1 and v- = x:

    merge  v+v+ -> v+   v+v- -> v-   v-v+ -> v-   v-v- -> v+ (Lee)
    split  v+ -> v+v- + v-v+         v- -> v-v- + v+v+ (Lee)

Entries are split into four pieces by their (j, k) degree: D0 (0, 0),
Dminus (0, -2), Phi0 (4, 0) and Phiplus (4, 2).  All structure constants are
integers, so the matrices are stored as integer scipy.sparse arrays; chain
vectors carry Fraction coefficients.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Mapping

import numpy as np
import scipy.sparse as sps

from .braid import BraidWord
from .statecube import (
    DegreeTable,
    GeneratorTables,
    braidlike_resolution,
    crossing_nodes,
    enumerate_generators,
)

PIECES = ("D0", "Dminus", "Phi0", "Phiplus")
PIECE_DEGREE = {"D0": (1, 0, 0), "Dminus": (1, 0, -2), "Phi0": (1, 4, 0), "Phiplus": (1, 4, 2)}


class DegreeAuditError(AssertionError):
    pass


class ChainVector:
    """Sparse rational combination of generators in one homological degree."""

    __slots__ = ("degree", "coeffs")

    def __init__(self, degree: int, coeffs: Mapping[int, object] | None = None):
        self.degree = degree
        self.coeffs: dict[int, Fraction] = {}
        for g, v in (coeffs or {}).items():
            v = Fraction(v)
            if v:
                self.coeffs[int(g)] = v

    @classmethod
    def unit(cls, degree: int, g: int) -> "ChainVector":
        return cls(degree, {g: 1})

    def __bool__(self):
        return bool(self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, ChainVector):
            return NotImplemented
        return self.degree == other.degree and self.coeffs == other.coeffs

    def __repr__(self):
        body = ", ".join(f"{g}: {v}" for g, v in sorted(self.coeffs.items()))
        return f"ChainVector(degree={self.degree}, {{{body}}})"

    def _check(self, other):
        if self.degree != other.degree:
            raise ValueError(f"degree mismatch: {self.degree} vs {other.degree}")

    def __add__(self, other: "ChainVector") -> "ChainVector":
        self._check(other)
        out = dict(self.coeffs)
        for g, v in other.coeffs.items():
            out[g] = out.get(g, 0) + v
        return ChainVector(self.degree, out)

    def __neg__(self):
        return ChainVector(self.degree, {g: -v for g, v in self.coeffs.items()})

    def __sub__(self, other: "ChainVector") -> "ChainVector":
        return self + (-other)

    def scale(self, c) -> "ChainVector":
        c = Fraction(c)
        return ChainVector(self.degree, {g: c * v for g, v in self.coeffs.items()})

    def __rmul__(self, c):
        return self.scale(c)

    def support(self) -> list[int]:
        return sorted(self.coeffs)


def _merge(a_minus: bool, b_minus: bool):
    """(khovanov, lee) outputs of merging two marks; each is None or the output mark."""
    if not a_minus and not b_minus:
        return False, None
    if a_minus and b_minus:
        return None, False
    return True, None


@dataclass
class LeeComplex:
    word: BraidWord
    tables: GeneratorTables
    # pieces[name][i] maps degree i to degree i + 1 (rows: target, cols: source)
    pieces: dict[str, dict[int, sps.csc_array]] = field(default_factory=dict)
    _full: dict[int, sps.csc_array] = field(default_factory=dict, repr=False)
    # memo for derived data (reduced boundaries, column lists), keyed by the user
    cache: dict = field(default_factory=dict, repr=False)

    @property
    def degrees(self) -> list[int]:
        return sorted(self.tables.degrees)

    def table(self, i: int) -> DegreeTable:
        return self.tables[i]

    def has_map(self, i: int) -> bool:
        return i in self.pieces["D0"]

    def piece(self, name: str, i: int) -> sps.csc_array:
        return self.pieces[name][i]

    def khovanov(self, i: int) -> sps.csc_array:
        return (self.pieces["D0"][i] + self.pieces["Dminus"][i]).tocsc()

    def lee_deformation(self, i: int) -> sps.csc_array:
        return (self.pieces["Phi0"][i] + self.pieces["Phiplus"][i]).tocsc()

    def full(self, i: int) -> sps.csc_array:
        if i not in self._full:
            total = self.pieces["D0"][i]
            for name in PIECES[1:]:
                total = total + self.pieces[name][i]
            self._full[i] = total.tocsc()
        return self._full[i]

    def apply(self, matrix: sps.csc_array, v: ChainVector) -> ChainVector:
        out: dict[int, Fraction] = {}
        indptr, indices, data = matrix.indptr, matrix.indices, matrix.data
        for g, c in v.coeffs.items():
            for pos in range(indptr[g], indptr[g + 1]):
                r = int(indices[pos])
                out[r] = out.get(r, 0) + c * int(data[pos])
        return ChainVector(v.degree + 1, out)

    def differential(self, v: ChainVector, kind: str = "full") -> ChainVector:
        i = v.degree
        if not self.has_map(i):
            return ChainVector(i + 1)
        if kind == "full":
            matrix = self.full(i)
        elif kind == "khovanov":
            matrix = self.khovanov(i)
        elif kind == "lee":
            matrix = self.lee_deformation(i)
        else:
            matrix = self.pieces[kind][i]
        return self.apply(matrix, v)

    def dump_triplets(self, i: int) -> str:
        """Sparse (row, col, value) triplets of every piece from degree i, as JSON."""
        doc = {"degree": i, "rows": len(self.tables[i + 1]), "cols": len(self.tables[i])}
        for name in PIECES:
            m = self.pieces[name][i].tocoo()
            doc[name] = [[int(r), int(c), int(v)] for r, c, v in zip(m.row, m.col, m.data)]
        return json.dumps(doc)


def _edge_entries(w: BraidWord, src: DegreeTable, dst: DegreeTable):
    """Yield (row, col, value, is_lee) for every cube edge out of ``src``."""
    for st in src.states:
        bits = st.bits
        circ = st.circles
        ones_before = 0
        for r, bit in enumerate(bits):
            if bit:
                ones_before += 1
                continue
            sign = -1 if ones_before % 2 else 1
            tbits = bits[:r] + (1,) + bits[r + 1:]
            tst = dst.states[dst.state_index[tbits]]
            tcirc = tst.circles
            nodes = crossing_nodes(w, r)
            s_touch = sorted({circ.circle_of_node[x] for x in nodes})
            t_touch = sorted({tcirc.circle_of_node[x] for x in nodes})
            # circles away from the crossing keep their nodes
            carry = []
            for c in range(circ.circle_count):
                if c in s_touch:
                    continue
                tc = tcirc.circle_of_node[circ.first_node(c)]
                carry.append((st.circle_bit(c), tst.circle_bit(tc)))
            for marks in range(st.size):
                base = 0
                for sb, tb in carry:
                    if marks & sb:
                        base |= tb
                col = st.offset + marks
                if len(s_touch) == 2 and len(t_touch) == 1:
                    a, b = (bool(marks & st.circle_bit(c)) for c in s_touch)
                    tb = tst.circle_bit(t_touch[0])
                    kh, lee = _merge(a, b)
                    if kh is not None:
                        yield tst.offset + (base | (tb if kh else 0)), col, sign, False
                    if lee is not None:
                        yield tst.offset + (base | (tb if lee else 0)), col, sign, True
                elif len(s_touch) == 1 and len(t_touch) == 2:
                    minus = bool(marks & st.circle_bit(s_touch[0]))
                    b1, b2 = (tst.circle_bit(c) for c in t_touch)
                    if minus:
                        yield tst.offset + (base | b1 | b2), col, sign, False
                        yield tst.offset + base, col, sign, True
                    else:
                        yield tst.offset + (base | b2), col, sign, False
                        yield tst.offset + (base | b1), col, sign, False
                else:
                    raise AssertionError(
                        f"crossing {r} of {bits} is neither a merge nor a split"
                    )


def build_complex(w: BraidWord, degrees=None, cap: int | None = None) -> LeeComplex:
    """Build the complex on the given homological degrees (all by default).

    Maps are assembled from every degree ``i`` whose successor ``i + 1`` is
    also present.
    """
    tables = enumerate_generators(w, degrees=degrees, cap=cap)
    cx = LeeComplex(w, tables, {name: {} for name in PIECES})
    for i in sorted(tables.degrees):
        if i + 1 not in tables.degrees:
            continue
        src, dst = tables[i], tables[i + 1]
        buckets = {name: ([], [], []) for name in PIECES}
        for row, col, val, is_lee in _edge_entries(w, src, dst):
            dk = dst.k[row] - src.k[col]
            if is_lee:
                name = "Phi0" if dk == 0 else "Phiplus" if dk == 2 else None
            else:
                name = "D0" if dk == 0 else "Dminus" if dk == -2 else None
            if name is None:
                raise DegreeAuditError(
                    f"edge entry {col}->{row} in degree {i} has k-degree {dk}"
                )
            rows, cols, vals = buckets[name]
            rows.append(row)
            cols.append(col)
            vals.append(val)
        shape = (len(dst), len(src))
        for name, (rows, cols, vals) in buckets.items():
            m = sps.coo_array(
                (np.array(vals, dtype=np.int64), (np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64))),
                shape=shape,
            ).tocsc()
            m.sum_duplicates()
            m.eliminate_zeros()
            cx.pieces[name][i] = m
    return cx


def audit_degrees(cx: LeeComplex) -> None:
    """Check every stored entry against the (i, j, k) degree of its piece."""
    for name in PIECES:
        _, dj, dk = PIECE_DEGREE[name]
        for i, m in cx.pieces[name].items():
            src, dst = cx.table(i), cx.table(i + 1)
            coo = m.tocoo()
            for r, c in zip(coo.row, coo.col):
                if dst.j[r] - src.j[c] != dj or dst.k[r] - src.k[c] != dk:
                    raise DegreeAuditError(
                        f"{name} entry {c}->{r} in degree {i} has degree "
                        f"({dst.j[r] - src.j[c]}, {dst.k[r] - src.k[c]}), expected ({dj}, {dk})"
                    )


def square_defects(cx: LeeComplex) -> dict[str, int]:
    """Number of nonzero entries in each composite that must vanish."""
    out = {}
    for i in cx.degrees:
        if not (cx.has_map(i) and cx.has_map(i + 1)):
            continue
        kh0, kh1 = cx.khovanov(i), cx.khovanov(i + 1)
        lee0, lee1 = cx.lee_deformation(i), cx.lee_deformation(i + 1)
        checks = {
            "full^2": cx.full(i + 1) @ cx.full(i),
            "khovanov^2": kh1 @ kh0,
            "lee^2": lee1 @ lee0,
            "anticommutator": kh1 @ lee0 + lee1 @ kh0,
        }
        for name, m in checks.items():
            m = sps.csc_array(m)
            m.eliminate_zeros()
            out[f"{name}@{i}"] = int(m.count_nonzero())
    return out


# --- distinguished vectors -------------------------------------------------

def _braidlike_state(cx: LeeComplex):
    bits = braidlike_resolution(cx.word)
    table = cx.table(0)
    return table, table.states[table.state_index[bits]]


def plamenevskaya_class(cx: LeeComplex) -> ChainVector:
    """All circles of the braid-like resolution marked v-."""
    table, st = _braidlike_state(cx)
    return ChainVector.unit(0, st.offset + st.size - 1)


def canonical_class(cx: LeeComplex, direction: str = "up") -> ChainVector:
    """Lee's canonical cycle for a braid-like orientation.

    With a = v- + v+ and b = v- - v+, the outermost braid-like circle gets b
    for ``up`` and the labels alternate inward; ``down`` swaps a and b.
    """
    if direction not in ("up", "down"):
        raise ValueError(f"direction must be 'up' or 'down', got {direction!r}")
    table, st = _braidlike_state(cx)
    n = cx.word.strands
    nesting = st.circles.nesting_index
    is_b = [((n - 1 - nesting[c]) % 2 == 0) == (direction == "up") for c in range(n)]
    coeffs = {}
    for marks in range(st.size):
        sign = 1
        for c in range(n):
            if is_b[c] and not marks & st.circle_bit(c):
                sign = -sign
        coeffs[st.offset + marks] = sign
    return ChainVector(0, coeffs)


def theta(cx: LeeComplex, v: ChainVector) -> ChainVector:
    """Swap v+ and v- on nontrivial circles; trivial circles are untouched."""
    table = cx.table(v.degree)
    out = {}
    for g, c in v.coeffs.items():
        st = table.states[table.state_of[g]]
        out[st.offset + (table.marks[g] ^ st.nontrivial_mask)] = c
    return ChainVector(v.degree, out)


def apply_e(cx: LeeComplex, v: ChainVector) -> ChainVector:
    """The sl2 raising operator on the braid-like resolution.

    Circle C at nesting depth X(C) carries V when X(C) is even and V* when it
    is odd; e(v-) = v+ in V and e(v-) = -v+ in V*, e(v+) = 0 in both.
    """
    table, st = _braidlike_state(cx)
    if v.degree != 0:
        raise ValueError("apply_e acts on degree 0 only")
    lo, hi = st.offset, st.offset + st.size
    out: dict[int, Fraction] = {}
    nesting = st.circles.nesting_index
    for g, c in v.coeffs.items():
        if not lo <= g < hi:
            raise ValueError(f"generator {g} is not on the braid-like resolution")
        marks = g - lo
        for circle in range(st.circles.circle_count):
            bit = st.circle_bit(circle)
            if marks & bit:
                eps = 1 if nesting[circle] % 2 == 0 else -1
                tgt = lo + (marks ^ bit)
                out[tgt] = out.get(tgt, 0) + eps * c
    return ChainVector(0, out)


def divided_power(cx: LeeComplex, v: ChainVector, k: int) -> ChainVector:
    """e^(k) v = e^k v / k!."""
    for _ in range(k):
        v = apply_e(cx, v)
    return v.scale(Fraction(1, factorial(k)))


def e_series(cx: LeeComplex, sign: int = 1) -> ChainVector:
    """sum_k sign^k e^(k)(v-) over k = 0..n."""
    v = plamenevskaya_class(cx)
    total = ChainVector(0)
    term = v
    for k in range(cx.word.strands + 1):
        total = total + term.scale(sign ** k)
        term = apply_e(cx, term).scale(Fraction(1, k + 1))
    return total


def j_mod4_classes(cx: LeeComplex, v: ChainVector) -> set[int]:
    table = cx.table(v.degree)
    return {table.j[g] % 4 for g in v.coeffs}


def theta_matrix(cx: LeeComplex, i: int) -> sps.csc_array:
    """theta on degree i as a permutation matrix."""
    table = cx.table(i)
    size = len(table)
    image = np.empty(size, dtype=np.int64)
    for st in table.states:
        for marks in range(st.size):
            image[st.offset + marks] = st.offset + (marks ^ st.nontrivial_mask)
    return sps.csc_array((np.ones(size, dtype=np.int64), (image, np.arange(size))), shape=(size, size))


def theta_defects(cx: LeeComplex) -> dict[int, int]:
    """Per degree, the number of nonzero entries of d theta - theta d."""
    out = {}
    for i in cx.degrees:
        if not cx.has_map(i):
            continue
        diff = sps.csc_array(cx.full(i) @ theta_matrix(cx, i) - theta_matrix(cx, i + 1) @ cx.full(i))
        diff.eliminate_zeros()
        out[i] = int(diff.count_nonzero())
    return out
