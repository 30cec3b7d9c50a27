"""Filtration grading of homology classes in the j_t filtrations.

For a cycle z the grading of [z] is the largest s such that some
representative z + dy is supported in levels >= s.  ``class_grading`` finds
it by reducing the incoming boundary matrix so every column has a distinct
lowest row (rows ordered by level, ties by index) and then cancelling the
lowest term of z for as long as a column owns it.  ``class_grading_oracle``
answers the same question level by level with rank tests.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cancellation import cancel_around
from .leecomplex import ChainVector, LeeComplex
from .linalg import bareiss_rank, first_row, integral, reduce_columns, reduce_vector

T_MIN, T_MAX = Fraction(0), Fraction(2)


class ZeroClassError(ValueError):
    """The cycle is a boundary (or zero); its grading is undefined."""


def as_t(t) -> Fraction:
    t = Fraction(t)
    if not T_MIN <= t <= T_MAX:
        raise ValueError(f"t must lie in [0, 2], got {t}")
    return t


def jt_of_lattice(a: int, b: int, t) -> Fraction:
    """j_t level of the lattice point (j0, j2) = (a, b)."""
    t = as_t(t)
    return (1 - t / 2) * a + (t / 2) * b


@dataclass(frozen=True)
class FiltrationOrder:
    """j_t levels of a set of generators and a total order refining them
    (ties broken by generator index)."""

    t: Fraction
    levels: dict[int, Fraction]
    rank: dict[int, int]

    @classmethod
    def build(cls, cx: LeeComplex, degree: int, t, rows=None) -> "FiltrationOrder":
        t = as_t(t)
        table = cx.table(degree)
        if rows is None:
            rows = range(len(table))
        by_point: dict[tuple[int, int], Fraction] = {}
        levels = {}
        for g in rows:
            point = (table.j[g], table.k[g])
            lv = by_point.get(point)
            if lv is None:
                lv = by_point[point] = point[0] - t * point[1]
            levels[g] = lv
        order = sorted(levels, key=lambda g: (levels[g], g))
        return cls(t, levels, {g: pos for pos, g in enumerate(order)})

    @property
    def signature(self) -> tuple[int, ...]:
        return tuple(sorted(self.rank, key=self.rank.__getitem__))

    def distinct_levels(self) -> list[Fraction]:
        return sorted(set(self.levels.values()))


@dataclass(frozen=True)
class ReducedBoundary:
    degree: int
    order: FiltrationOrder
    pivots: dict[int, dict[int, int]]

    def min_level(self, vec: dict) -> Fraction:
        return self.order.levels[first_row(vec, self.order.rank)]


def incoming_columns(cx: LeeComplex, degree: int, kind: str = "full"):
    """Columns of the differential into ``degree`` as integer dicts."""
    if not cx.has_map(degree - 1):
        return []
    if kind == "full":
        m = cx.full(degree - 1)
    elif kind == "khovanov":
        m = cx.khovanov(degree - 1)
    else:
        raise ValueError(f"unknown differential {kind!r}")
    indptr, indices, data = m.indptr, m.indices, m.data
    cols = []
    for c in range(m.shape[1]):
        lo, hi = indptr[c], indptr[c + 1]
        if lo < hi:
            cols.append({int(r): int(v) for r, v in zip(indices[lo:hi], data[lo:hi]) if v})
    return cols


def reduced_boundary(cx: LeeComplex, degree: int, t, method: str = "cancel") -> ReducedBoundary:
    """Echelon basis of the boundary image in ``degree``, cached per row order.

    ``method="cancel"`` reduces the image after same-lattice-point
    cancellation (see ``cancellation``); ``"plain"`` uses the raw matrix.
    The row order only changes at finitely many t, so many t share one
    reduction.
    """
    rows = cancel_around(cx, degree).rows if method == "cancel" else None
    order = FiltrationOrder.build(cx, degree, t, rows)
    cache = cx.cache.setdefault("reductions", {})
    key = (degree, method, order.signature)
    pivots = cache.get(key)
    if pivots is None:
        pivots = reduce_columns(_columns(cx, degree, method), order.rank)
        cache[key] = pivots
    return ReducedBoundary(degree, order, pivots)


def _columns(cx: LeeComplex, degree: int, method: str):
    if method == "cancel":
        return cancel_around(cx, degree).columns
    if method == "plain":
        cols = cx.cache.setdefault("incoming", {})
        if degree not in cols:
            cols[degree] = incoming_columns(cx, degree)
        return cols[degree]
    raise ValueError(f"unknown method {method!r}")


def best_representative(cx: LeeComplex, z: ChainVector, t, method: str = "cancel"):
    """Grading of [z] and the integer-scaled representative realizing it.

    With ``method="cancel"`` the representative lives in the cancelled
    complex; its minimum level is still the class grading.
    """
    if not z:
        raise ZeroClassError("the zero vector has no grading")
    red = reduced_boundary(cx, z.degree, t, method)
    vec = cancel_around(cx, z.degree).transport(z) if method == "cancel" else integral(z.coeffs)
    rest = reduce_vector(vec, red.pivots, red.order.rank)
    if not rest:
        raise ZeroClassError("cycle is a boundary; its class is zero")
    return red.min_level(rest), rest


def class_grading(cx: LeeComplex, z: ChainVector, t, method: str = "cancel") -> Fraction:
    return best_representative(cx, z, t, method)[0]


def in_boundary_image(cx: LeeComplex, z: ChainVector, kind: str = "full") -> bool:
    """Whether z lies in the image of the differential (``full`` or
    ``khovanov``) into its degree."""
    if not z:
        return True
    reduced = cancel_around(cx, z.degree, kind)
    rank = list(range(len(cx.table(z.degree))))
    pivots = reduce_columns(reduced.columns, rank)
    return not reduce_vector(reduced.transport(z), pivots, rank)


def class_grading_oracle(cx: LeeComplex, z: ChainVector, t, rank=bareiss_rank) -> Fraction:
    """Same contract as ``class_grading``, by rank tests.

    z is in F_s + im(d) iff its part below level s lies in the span of the
    boundary columns restricted below s.  That holds for every s up to the
    grading and fails above it, so the levels are bisected.
    """
    t = as_t(t)
    if not z:
        raise ZeroClassError("the zero vector has no grading")
    table = cx.table(z.degree)
    levels = [jj - t * kk for jj, kk in zip(table.j, table.k)]
    cols = incoming_columns(cx, z.degree)
    zi = integral(z.coeffs)

    def passes(rows) -> bool:
        rows = sorted(rows)
        if not any(r in zi for r in rows):
            return True
        keep = set(rows)
        sub = [c for c in cols if any(r in keep for r in c)]
        a = [[c.get(r, 0) for c in sub] for r in rows]
        b = [row + [zi.get(r, 0)] for row, r in zip(a, rows)]
        return rank(a) == rank(b)

    if passes(range(len(levels))):
        raise ZeroClassError("cycle is a boundary; its class is zero")
    distinct = sorted(set(levels))
    lo, hi = 0, len(distinct) - 1  # distinct[lo] always passes
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if passes([g for g, lv in enumerate(levels) if lv < distinct[mid]]):
            lo = mid
        else:
            hi = mid - 1
    return distinct[lo]


def chain_min_level(cx: LeeComplex, z: ChainVector, t) -> Fraction:
    """Minimum j_t level over the support of the chain itself."""
    t = as_t(t)
    table = cx.table(z.degree)
    return min(table.j[g] - t * table.k[g] for g in z.coeffs)
