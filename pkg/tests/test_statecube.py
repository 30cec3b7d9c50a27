from collections import Counter
from itertools import product

import pytest
from hypothesis import given

from annular_rasmussen.braid import BraidWord, annular_compose, parse_braid
from annular_rasmussen.statecube import (
    CAP_ENV_VAR,
    ResourceLimitError,
    braidlike_resolution,
    enumerate_generators,
    resolutions_in_degree,
    resolve,
)

from conftest import braids


def euler_characteristic(w: BraidWord) -> dict[int, int]:
    """sum over (i, j) of (-1)^i q^j rank C^{i,j}: the unnormalized Jones polynomial."""
    tables = enumerate_generators(w)
    out = Counter()
    for i, table in tables.degrees.items():
        for j in table.j:
            out[j] += 1 if i % 2 == 0 else -1
    return {j: v for j, v in out.items() if v}


def poly_mul(a, b):
    out = Counter()
    for i, x in a.items():
        for j, y in b.items():
            out[i + j] += x * y
    return {k: v for k, v in out.items() if v}


# unnormalized Jones polynomials (unknot = q + q^-1), exponent -> coefficient
JONES = {
    "1:": {1: 1, -1: 1},
    "2: 1": {1: 1, -1: 1},
    "2: 1 1 1": {1: 1, 3: 1, 5: 1, 9: -1},
    "2: -1 -1 -1": {-1: 1, -3: 1, -5: 1, -9: -1},
    "3: 1 -2 1 -2": {-5: 1, 5: 1},
    "2: 1 1": {0: 1, 2: 1, 4: 1, 6: 1},
    "2:": {-2: 1, 0: 2, 2: 1},
}


@pytest.mark.parametrize("text", sorted(JONES))
def test_euler_characteristic_is_jones(text):
    assert euler_characteristic(parse_braid(text)) == JONES[text]


@given(braids(max_strands=3, max_letters=4), braids(max_strands=2, max_letters=3))
def test_euler_characteristic_multiplicative(a, b):
    assert euler_characteristic(annular_compose(a, b)) == poly_mul(
        euler_characteristic(a), euler_characteristic(b)
    )


@given(braids(max_strands=4, max_letters=6))
def test_nontrivial_parity_and_nesting(w):
    for bits in product((0, 1), repeat=len(w)):
        cs = resolve(w, bits)
        assert cs.n_nontrivial % 2 == w.strands % 2
        assert sorted(x for x in cs.nesting_index if x is not None) == list(range(cs.n_nontrivial))
        assert all((x is None) != nt for x, nt in zip(cs.nesting_index, cs.nontrivial))


@given(braids(max_strands=5, max_letters=7))
def test_braidlike_resolution_has_n_essential_circles(w):
    cs = resolve(w, braidlike_resolution(w))
    assert cs.circle_count == w.strands
    assert all(cs.nontrivial)


def test_trivial_braid_nesting():
    cs = resolve(BraidWord(3, ()), ())
    # the innermost closure arc is the last position
    assert cs.nesting_index[cs.circle_of_node[2]] == 0
    assert cs.nesting_index[cs.circle_of_node[0]] == 2


def test_one_crossing_trivial_smoothing():
    cs = resolve(BraidWord(2, (1,)), (1,))
    assert cs.circle_count == 1
    assert cs.nontrivial == (False,)


@given(braids(max_strands=4, max_letters=6))
def test_generator_counts(w):
    tables = enumerate_generators(w)
    n_minus = w.n_negative
    assert set(tables.degrees) == set(range(-n_minus, len(w) - n_minus + 1))
    for i, table in tables.degrees.items():
        states = resolutions_in_degree(w, i)
        assert len(table.states) == len(states)
        assert len(table) == sum(2 ** resolve(w, b).circle_count for b in states)
        for g in range(len(table)):
            assert (table.k[g] - w.strands) % 2 == 0
            assert abs(table.k[g]) <= w.strands
            assert table.index(table.states[table.state_of[g]].bits, table.marks[g]) == g


def test_gradings_of_braidlike_state():
    w = parse_braid("2: 1 1 1")
    table = enumerate_generators(w, degrees=[0])[0]
    # all-v+ marking: j = 2 + 0 + 3, k = 2
    g = table.index((0, 0, 0), 0)
    assert (table.j[g], table.k[g]) == (5, 2)
    assert table.lattice(g) == (5, 1)


def test_resource_cap(monkeypatch):
    w = parse_braid("3: 1 2 1 2")
    with pytest.raises(ResourceLimitError) as exc:
        enumerate_generators(w, cap=10)
    assert exc.value.count > 10 and exc.value.cap == 10
    monkeypatch.setenv(CAP_ENV_VAR, "5")
    with pytest.raises(ResourceLimitError):
        enumerate_generators(w)
    monkeypatch.setenv(CAP_ENV_VAR, "100000")
    assert enumerate_generators(w).total > 10


def test_resolution_length_checked():
    with pytest.raises(ValueError):
        resolve(BraidWord(2, (1, 1)), (0,))
