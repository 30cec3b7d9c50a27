from fractions import Fraction as F

import pytest

from annular_rasmussen.braid import BraidWord, annular_compose, parse_braid, stabilize
from annular_rasmussen.invariants import (
    DtProfile,
    InternalConsistencyError,
    Segment,
    SuiteOptions,
    band_rank_lower_bound,
    candidate_breakpoints,
    dt_at,
    dt_span,
    monoid_memberships,
    profile,
    property_suite,
    psi_is_nonzero,
    qp_obstruction,
    rv_sufficient,
    s_invariant,
    self_linking,
)

TREFOIL = BraidWord(2, (1, 1, 1))
A00 = parse_braid("4: 3 -2 -2 3 3 2 -3 -1 2 1 1")
S71 = BraidWord(3, (-1,) * 5 + (2, 1, 1, 1, 2))


def tent(n, w, t):
    return -n * abs(1 - F(t)) + w


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_trivial_braid(n):
    w = BraidWord(n, ())
    for k in range(9):
        t = F(k, 4)
        assert dt_at(w, t) == tent(n, 0, t)


def test_trefoil_tent():
    for k in range(13):
        t = F(k, 6)
        assert dt_at(TREFOIL, t) == tent(2, 3, t)
        assert dt_at(TREFOIL, t, use_symmetry=False) == tent(2, 3, t)


def test_span_route_agrees():
    for w in (TREFOIL, S71, parse_braid("3: 1 -2 1 -2")):
        for t in (0, F(1, 3), 1, F(5, 3)):
            assert dt_span(w, t) == dt_at(w, t)


def test_candidate_breakpoints_have_small_denominators():
    for w in (A00, S71, parse_braid("3: 1 -2 1 -2")):
        cands = candidate_breakpoints(w)
        assert all(0 < c < 1 and c.denominator <= 2 * w.strands for c in cands)


def test_a00_profile():
    prof = profile(A00)
    assert prof.fully_certified
    assert prof.sample(0) == 1 and prof.sample(1) == 3
    assert prof.sample(F(1, 2)) == 2 and prof.sample(F(2, 3)) == F(5, 3)
    assert prof.breakpoints() == [F(1, 2), F(2, 3), 1, F(4, 3), F(3, 2)]
    assert [s.slope for s in prof.segments] == [2, -2, 4, -4, 2, -2]
    assert prof.value(F(7, 12)) == F(11, 6)
    assert prof.right_slope(F(2, 3)) == 4


def test_profile_is_mirrored():
    prof = profile(S71, denominator=8)
    values = dict(prof.samples)
    for t, d in prof.samples:
        assert values[2 - t] == d
    assert [s.slope for s in prof.segments] == [3, -3]


def test_profile_without_refinement_flags_gaps():
    prof = profile(A00, denominator=1, max_refine=0)
    assert not prof.fully_certified
    with pytest.raises(ValueError):
        prof.value(F(1, 2))
    refined = profile(A00, denominator=1, max_refine=1)
    assert refined.fully_certified
    assert refined.breakpoints() == profile(A00).breakpoints()


def test_bad_denominator():
    with pytest.raises(ValueError):
        profile(TREFOIL, denominator=0)


@pytest.mark.parametrize("w,s", [(TREFOIL, 2), (A00, 2), (S71, -2), (BraidWord(3, ()), -2)])
def test_s_invariant(w, s):
    assert s_invariant(w) == s


def test_s_invariant_rejects_fraction():
    with pytest.raises(InternalConsistencyError):
        s_invariant(TREFOIL, F(1, 2))


def test_qp_obstruction():
    assert qp_obstruction(BraidWord(3, (1, 2) * 3 + (-2,) * 5)) == "not_quasipositive"
    assert qp_obstruction(S71) == "consistent"
    assert qp_obstruction(parse_braid("4: 1 2 3 2 1")) == "consistent"
    assert self_linking(TREFOIL) == 1


def _fake(segments, n=3, samples=None):
    return DtProfile(n, 0, samples or [(F(0), F(-3)), (F(1), F(0)), (F(2), F(-3))], segments)


def test_rv_ternary():
    assert rv_sufficient(profile(S71, denominator=8)) is True
    assert rv_sufficient(profile(A00)) is True
    assert rv_sufficient(profile(BraidWord(3, ()), denominator=4)) is True
    assert rv_sufficient(profile(BraidWord(3, (1, 2) * 3 + (-2,) * 5), denominator=6)) is False
    open_end = _fake([Segment(F(0), F(1), F(3), F(-3), False), Segment(F(1), F(2), F(-3), F(3), False)])
    assert rv_sufficient(open_end) is None


def test_band_rank_bound():
    assert band_rank_lower_bound(profile(TREFOIL, denominator=4)) == (3, True)
    assert band_rank_lower_bound(profile(BraidWord(3, ()), denominator=4)) == (0, True)
    bound, certified = band_rank_lower_bound(profile(A00))
    assert bound == 5 and certified
    assert bound >= abs(profile(A00).sample(1))


def test_memberships():
    m = monoid_memberships(BraidWord(2, (1,)), profile(BraidWord(2, (1,)), denominator=4), [0, F(1, 2)])
    assert m.in_S and m.in_M[F(1, 2)] and m.in_M[0]
    prof = profile(A00)
    m = monoid_memberships(A00, prof, [0, F(2, 3)])
    assert not m.in_S and m.in_M[0] is False
    assert m.in_M_prime[F(2, 3)] is True and m.in_M_prime[0] is False
    k5 = BraidWord(3, (1, 2) * 3 + (-2,) * 5)
    assert monoid_memberships(k5, profile(k5, denominator=6)).in_S is False
    with pytest.raises(ValueError):
        monoid_memberships(A00, prof, [1])


def test_memberships_indeterminate():
    prof = _fake([Segment(F(0), F(1), F(3), F(-3), False), Segment(F(1), F(2), F(-3), F(3), False)])
    m = monoid_memberships(BraidWord(3, ()), prof, [0])
    assert m.in_S and m.in_M[0] is None


def test_psi():
    assert psi_is_nonzero(TREFOIL)
    assert not psi_is_nonzero(BraidWord(3, (1, 2) * 3 + (-2,) * 5))


def test_property_suite_examples():
    res = property_suite(TREFOIL, SuiteOptions(
        denominator=4,
        conjugators=[BraidWord(2, (-1,))],
        partners=[BraidWord(1, ())],
    ))
    assert all(r.passed for r in res.values()), res
    assert "stabilization[-1]" in res and "additivity[0]" in res
    comp = annular_compose(BraidWord(2, (1,)), BraidWord(1, ()))
    for k in range(9):
        t = F(k, 4)
        assert dt_at(comp, t) == dt_at(BraidWord(2, (1,)), t) - abs(1 - t)
    base, stab = dt_at(TREFOIL, F(1, 2)), dt_at(stabilize(TREFOIL, -1), F(1, 2))
    assert base - F(1, 2) <= stab <= base + F(1, 2)


def test_property_suite_reports_failures_as_data(monkeypatch):
    import annular_rasmussen.invariants as inv

    real = inv.dt_at
    monkeypatch.setattr(inv, "dt_at", lambda w, t, **kw: real(w, t, **kw) + (1 if t == 1 else 0))
    res = property_suite(TREFOIL, SuiteOptions(denominator=2, stabilizations=(), check_span=False))
    assert not res["d1_equals_writhe"].passed
    assert "d_1" in res["d1_equals_writhe"].witness
