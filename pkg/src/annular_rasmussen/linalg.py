"""Exact integer linear algebra used by the grading code.

Two independent routes:

* ``reduce_columns`` - sparse, fraction-free column reduction that gives each
  column a distinct pivot (its first nonzero row under a supplied order);
* ``bareiss_rank`` - dense fraction-free elimination, used only for rank
  tests in the oracle.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence, Union

Column = dict[int, int]
# position of each row in a total order, as a list or a row -> position dict
Rank = Union[Sequence[int], Mapping[int, int]]


def primitive(col: Column) -> Column:
    """Divide out the content of an integer column and make its sign canonical."""
    g = 0
    for v in col.values():
        g = gcd(g, v)
        if g == 1:
            break
    if g > 1:
        col = {r: v // g for r, v in col.items()}
    return col


def integral(coeffs: Mapping[int, Fraction]) -> Column:
    """Scale a rational vector to a primitive integer one (support unchanged)."""
    den = 1
    for v in coeffs.values():
        den = lcm(den, Fraction(v).denominator)
    return primitive({g: int(Fraction(v) * den) for g, v in coeffs.items() if v})


def first_row(col: Column, rank: Rank) -> int:
    return min(col, key=rank.__getitem__)


def eliminate(target: Column, pivot_col: Column, p: int) -> Column:
    """``a*target - b*pivot_col`` with the entry at row ``p`` cancelled."""
    a, b = pivot_col[p], target[p]
    g = gcd(a, b)
    a, b = a // g, b // g
    out = {r: a * v for r, v in target.items()}
    for r, v in pivot_col.items():
        nv = out.get(r, 0) - b * v
        if nv:
            out[r] = nv
        else:
            out.pop(r, None)
    return primitive(out)


def reduce_columns(columns: Iterable[Column], rank: Rank) -> dict[int, Column]:
    """Column echelon form keyed by pivot row.

    ``rank[row]`` is the position of ``row`` in the total order; a column's
    pivot is its row of smallest rank.  Returned columns span the same space
    as the input and have pairwise distinct pivots.
    """
    pivots: dict[int, Column] = {}
    for col in columns:
        col = {r: v for r, v in col.items() if v}
        while col:
            p = first_row(col, rank)
            other = pivots.get(p)
            if other is None:
                pivots[p] = primitive(col)
                break
            col = eliminate(col, other, p)
    return pivots


def reduce_vector(vec: Column, pivots: Mapping[int, Column], rank: Rank) -> Column:
    """Cancel leading entries of ``vec`` against pivot columns while possible.

    Returns the remainder; its first row (if any) is not a pivot.
    """
    while vec:
        p = first_row(vec, rank)
        other = pivots.get(p)
        if other is None:
            return vec
        vec = eliminate(vec, other, p)
    return vec


def bareiss_rank(rows: Sequence[Sequence[int]]) -> int:
    """Rank of an integer matrix by fraction-free (Bareiss) elimination."""
    m = [list(r) for r in rows if any(r)]
    if not m:
        return 0
    ncols = len(m[0])
    nrows = len(m)
    rank = 0
    prev = 1
    for c in range(ncols):
        piv = next((r for r in range(rank, nrows) if m[r][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        pr = m[rank]
        pv = pr[c]
        for r in range(rank + 1, nrows):
            row = m[r]
            f = row[c]
            for cc in range(c, ncols):
                row[cc] = (pv * row[cc] - f * pr[cc]) // prev
        prev = pv
        rank += 1
        if rank == nrows:
            break
    return rank
