"""Filtered Gaussian elimination around one homological degree.

An entry ``phi = d(x)[y] = +-1`` between generators on the same (j, j - 2k)
lattice point can be cancelled: the complex without x and y, with the map
into y's degree corrected by ``-gamma phi^-1 delta``, is chain homotopy
equivalent to the original through maps that do not lower any j_t level, for
every t at once.  Class gradings are therefore unchanged, and the chain map
on the middle degree is recorded so cycles can be carried across.

Three maps are tracked: ``P`` (degree i-2 -> i-1), ``M`` (i-1 -> i) and
``N`` (i -> i+1).  Only ``M`` and the transported cycles are needed for
grading; ``P`` and ``N`` supply extra cancellations that shrink ``M``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .leecomplex import ChainVector, LeeComplex
from .linalg import integral


class SparseMap:
    """Integer matrix kept as both column and row dictionaries."""

    def __init__(self):
        self.cols: dict[int, dict[int, int]] = {}
        self.rows: dict[int, dict[int, int]] = {}

    @classmethod
    def from_csc(cls, m) -> "SparseMap":
        out = cls()
        indptr, indices, data = m.indptr, m.indices, m.data
        for c in range(m.shape[1]):
            for pos in range(indptr[c], indptr[c + 1]):
                v = int(data[pos])
                if v:
                    out.set(int(indices[pos]), c, v)
        return out

    def set(self, r: int, c: int, v: int):
        if v:
            self.cols.setdefault(c, {})[r] = v
            self.rows.setdefault(r, {})[c] = v
        else:
            col = self.cols.get(c)
            if col is not None:
                col.pop(r, None)
            row = self.rows.get(r)
            if row is not None:
                row.pop(c, None)

    def drop_row(self, r: int):
        for c in self.rows.pop(r, {}):
            self.cols[c].pop(r, None)

    def drop_col(self, c: int):
        for r in self.cols.pop(c, {}):
            self.rows[r].pop(c, None)

    def cancel(self, r: int, c: int) -> dict[int, int]:
        """Eliminate pivot (r, c) = +-1: every other column with an entry in
        row r absorbs a multiple of column c; then row r and column c go.
        Returns column c (without row r) as it was before removal."""
        phi = self.cols[c][r]
        pivot_col = {rr: v for rr, v in self.cols[c].items() if rr != r}
        for cc, delta in list(self.rows[r].items()):
            if cc == c:
                continue
            f = delta * phi  # delta / phi with phi = +-1
            col = self.cols[cc]
            rows = self.rows
            for rr, g in pivot_col.items():
                v = col.get(rr, 0) - f * g
                if v:
                    col[rr] = v
                    rows.setdefault(rr, {})[cc] = v
                else:
                    col.pop(rr, None)
                    rows[rr].pop(cc, None)
        self.drop_col(c)
        self.drop_row(r)
        return pivot_col


@dataclass
class CancelledDegree:
    """Result of cancelling around ``degree`` in one differential."""

    degree: int
    kind: str
    rows: list[int]  # surviving generators of ``degree`` (original indices)
    columns: list[dict[int, int]]  # surviving columns of M over original row indices
    # chronological log: ("pivot", y, phi, column) or ("drop", y)
    log: list = field(default_factory=list)

    def transport(self, z: ChainVector) -> dict[int, int]:
        """Image of an integer-scaled cycle under the recorded chain maps."""
        if z.degree != self.degree:
            raise ValueError(f"cycle is in degree {z.degree}, not {self.degree}")
        vec = dict(integral(z.coeffs))
        for entry in self.log:
            if entry[0] == "drop":
                vec.pop(entry[1], None)
                continue
            _, y, phi, col = entry
            a = vec.pop(y, 0)
            if a:
                f = a * phi
                for r, g in col.items():
                    nv = vec.get(r, 0) - f * g
                    if nv:
                        vec[r] = nv
                    else:
                        vec.pop(r, None)
        return vec


def _matrix(cx: LeeComplex, i: int, kind: str):
    if not cx.has_map(i):
        return None
    if kind == "full":
        return cx.full(i)
    if kind == "khovanov":
        return cx.khovanov(i)
    raise ValueError(f"unknown differential {kind!r}")


def _same_point(src, dst, c: int, r: int) -> bool:
    return src.j[c] == dst.j[r] and src.k[c] == dst.k[r]


def cancel_around(cx: LeeComplex, degree: int = 0, kind: str = "full") -> CancelledDegree:
    """Cancel every unit same-lattice-point entry in P, M and N (iterated)."""
    key = ("cancelled", degree, kind)
    if key in cx.cache:
        return cx.cache[key]
    tables = cx.tables.degrees
    mid = tables[degree]
    maps = {}
    for name, i in (("P", degree - 2), ("M", degree - 1), ("N", degree)):
        m = _matrix(cx, i, kind) if i in tables and i + 1 in tables else None
        maps[name] = (SparseMap.from_csc(m) if m is not None else SparseMap(), i)
    log = []
    alive_rows = set(range(len(mid)))

    def sweep(name) -> bool:
        sm, i = maps[name]
        src, dst = tables.get(i), tables.get(i + 1)
        if src is None or dst is None:
            return False
        progress = False
        # short columns and short rows first keeps fill-in down
        for c in sorted(sm.cols, key=lambda c: len(sm.cols[c])):
            col = sm.cols.get(c)
            if not col:
                continue
            units = [r for r, v in col.items() if v in (1, -1) and _same_point(src, dst, c, r)]
            if not units:
                continue
            r = min(units, key=lambda r: len(sm.rows[r]))
            phi = col[r]
            pivot_col = sm.cancel(r, c)
            progress = True
            if name == "M":
                # x = c leaves degree-1, y = r leaves degree: P loses row c, N loses column r
                maps["P"][0].drop_row(c)
                maps["N"][0].drop_col(r)
                log.append(("pivot", r, phi, pivot_col))
                alive_rows.discard(r)
            elif name == "N":
                # y = c leaves degree: M loses row c
                maps["M"][0].drop_row(c)
                log.append(("drop", c))
                alive_rows.discard(c)
            else:
                # x = r leaves degree-1: M loses column r
                maps["M"][0].drop_col(r)
        return progress

    while True:
        moved = sweep("M")
        moved = sweep("N") or moved
        moved = sweep("P") or moved
        if not moved:
            break

    m_map = maps["M"][0]
    columns = [dict(col) for _, col in sorted(m_map.cols.items()) if col]
    result = CancelledDegree(degree, kind, sorted(alive_rows), columns, log)
    cx.cache[key] = result
    return result
