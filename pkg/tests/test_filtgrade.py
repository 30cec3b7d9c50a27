import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from annular_rasmussen.braid import BraidWord, parse_braid
from annular_rasmussen.cancellation import cancel_around
from annular_rasmussen.filtgrade import (
    FiltrationOrder,
    ZeroClassError,
    as_t,
    chain_min_level,
    class_grading,
    class_grading_oracle,
    in_boundary_image,
    jt_of_lattice,
)
from annular_rasmussen.leecomplex import ChainVector, build_complex, canonical_class
from annular_rasmussen.linalg import bareiss_rank, integral, reduce_columns, reduce_vector

from conftest import braids, random_word, sympy_rank

matrices = st.integers(1, 6).flatmap(
    lambda c: st.lists(st.lists(st.integers(-3, 3), min_size=c, max_size=c), min_size=0, max_size=6)
)


@given(matrices)
def test_bareiss_rank_matches_sympy(rows):
    expected = sympy.Matrix(rows).rank() if rows else 0
    assert bareiss_rank(rows) == expected
    assert sympy_rank(rows) == expected


def test_oracle_rank_backends_agree():
    cx = build_complex(parse_braid("3: 1 -2 1 -2"), degrees=range(-2, 2))
    z = canonical_class(cx, "up")
    for t in (0, Fraction(1, 2), 1):
        assert class_grading_oracle(cx, z, t) == class_grading_oracle(cx, z, t, rank=sympy_rank)


@given(st.lists(st.dictionaries(st.integers(0, 7), st.integers(-4, 4), max_size=5), max_size=6),
       st.permutations(list(range(8))))
def test_reduce_columns_keeps_span(cols, perm):
    rank = list(perm)
    pivots = reduce_columns(cols, rank)
    as_rows = lambda cs: [[c.get(r, 0) for c in cs] for r in range(8)]
    original = sympy.Matrix(as_rows(cols)).rank() if cols else 0
    assert len(pivots) == original
    if pivots:
        both = sympy.Matrix(as_rows(list(pivots.values()) + cols))
        assert both.rank() == original
    for p, col in pivots.items():
        assert min(col, key=rank.__getitem__) == p
    # every input column reduces to zero
    for c in cols:
        assert not reduce_vector({r: v for r, v in c.items() if v}, pivots, rank)


def test_integral_scaling():
    assert integral({0: Fraction(1, 2), 3: Fraction(-3, 4)}) == {0: 2, 3: -3}
    assert integral({1: 6, 2: 4}) == {1: 3, 2: 2}


def test_t_range():
    assert as_t("1/2") == Fraction(1, 2)
    with pytest.raises(ValueError):
        as_t(Fraction(-1, 3))
    with pytest.raises(ValueError):
        as_t(3)
    assert jt_of_lattice(4, 2, 1) == 3


def test_filtration_order():
    cx = build_complex(parse_braid("2: 1 1"), degrees=[0])
    order = FiltrationOrder.build(cx, 0, Fraction(1, 2))
    table = cx.table(0)
    ranked = order.signature
    levels = [table.j[g] - Fraction(1, 2) * table.k[g] for g in ranked]
    assert levels == sorted(levels)
    assert order.distinct_levels() == sorted(set(levels))


def _gradings_agree(w, ts):
    cx = build_complex(w, degrees=range(-2, 2))
    for z in (canonical_class(cx, "up"), canonical_class(cx, "down"),
              canonical_class(cx, "up") + canonical_class(cx, "down")):
        for t in ts:
            oracle = class_grading_oracle(cx, z, t, rank=sympy_rank)
            assert class_grading(cx, z, t) == oracle, (w, t)
            assert class_grading(cx, z, t, method="plain") == oracle, (w, t)
            assert chain_min_level(cx, z, t) <= oracle


@given(braids(max_strands=3, max_letters=5), st.sampled_from([0, Fraction(1, 3), Fraction(1, 2), 1, Fraction(3, 2)]))
def test_grading_matches_oracle(w, t):
    _gradings_agree(w, [Fraction(t)])


def test_grading_matches_oracle_random_braids():
    rng = random.Random(7)
    ts = [Fraction(k, 6) for k in range(0, 13, 2)] + [Fraction(1, 4), Fraction(2, 3)]
    for _ in range(50):
        n = rng.randint(1, 4)
        _gradings_agree(random_word(rng, n, rng.randint(0, 5)), ts)


def test_boundary_has_no_grading():
    cx = build_complex(parse_braid("2: 1 -1"), degrees=range(-2, 2))
    boundary = cx.differential(ChainVector.unit(-1, 0))
    assert boundary
    assert in_boundary_image(cx, boundary)
    with pytest.raises(ZeroClassError):
        class_grading(cx, boundary, 0)
    with pytest.raises(ZeroClassError):
        class_grading_oracle(cx, boundary, 0)
    with pytest.raises(ZeroClassError):
        class_grading_oracle(cx, boundary, 0, rank=sympy_rank)
    with pytest.raises(ZeroClassError):
        class_grading(cx, ChainVector(0), 0)


def test_cancellation_keeps_homology_rank():
    w = parse_braid("3: 1 -2 1 -2 -1")
    cx = build_complex(w, degrees=range(-2, 2))
    red = cancel_around(cx, 0)
    dim = lambda i: len(cx.table(i))
    full_rank = lambda i: sympy.Matrix(cx.full(i).toarray()).rank()
    homology = dim(0) - full_rank(0) - full_rank(-1)
    # rows left after cancelling, minus the rank of what remains of the incoming map
    index = {r: pos for pos, r in enumerate(red.rows)}
    m = sympy.zeros(len(red.rows), len(red.columns))
    for c, col in enumerate(red.columns):
        for r, v in col.items():
            m[index[r], c] = v
    # the outgoing map's surviving rank equals the full outgoing rank minus N pivots
    n_pivots = sum(1 for e in red.log if e[0] == "drop")
    assert len(red.rows) - m.rank() - (full_rank(0) - n_pivots) == homology


def test_transport_preserves_cycle_class():
    cx = build_complex(BraidWord(3, (1, -2, 1, 2)), degrees=range(-2, 2))
    z = canonical_class(cx, "up")
    red = cancel_around(cx, 0)
    moved = red.transport(z)
    assert set(moved) <= set(red.rows)
