"""d_t profiles of braid closures and the reports built on them.

Certification.  For t inside an open interval on which no two lattice points
of the (cancelled) degree-0 complex swap j_t order, the grading computation
runs identically and returns the level of one fixed lattice point, so d_t is
linear there with slope -k.  Swaps happen only at t = (j - j')/(k - k'), a
finite set with denominators at most n.  A gap between samples is certified
exactly when no such point lies strictly inside it; refinement inserts those
points as extra samples.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import ceil
from typing import Iterable, Sequence

from .braid import BraidWord, annular_compose, conjugate, stabilize, writhe
from .cancellation import cancel_around
from .filtgrade import as_t, class_grading, in_boundary_image
from .leecomplex import build_complex, canonical_class, plamenevskaya_class

DEFAULT_DENOMINATOR = 24
DEFAULT_MAX_REFINE = 4


class InternalConsistencyError(RuntimeError):
    """A computed value contradicts a structural theorem (d0 != d2, bad slope...)."""


@lru_cache(maxsize=32)
def complex_for(w: BraidWord, cap: int | None = None):
    """Complex on degrees -2..1, enough to grade and cancel around degree 0."""
    return build_complex(w, degrees=range(-2, 2), cap=cap)


def dt_at(w: BraidWord, t, *, use_symmetry: bool = True, method: str = "cancel",
          cap: int | None = None) -> Fraction:
    """d_t of the closure with its braid-like orientation.

    For t > 1 the value at 2 - t is returned unless ``use_symmetry`` is off.
    """
    t = as_t(t)
    if use_symmetry and t > 1:
        t = 2 - t
    cx = complex_for(w, cap)
    return class_grading(cx, canonical_class(cx, "up"), t, method)


def dt_span(w: BraidWord, t, cap: int | None = None) -> Fraction:
    """min of the gradings of s_o - s_obar and s_o + s_obar (an independent
    route to d_t through the two j mod 4 summands)."""
    cx = complex_for(w, cap)
    up, down = canonical_class(cx, "up"), canonical_class(cx, "down")
    return min(class_grading(cx, up - down, t), class_grading(cx, up + down, t))


def candidate_breakpoints(w: BraidWord, cap: int | None = None) -> list[Fraction]:
    """All t in (0, 1) where two surviving degree-0 lattice points tie in j_t."""
    cx = complex_for(w, cap)
    table = cx.table(0)
    points = {(table.j[g], table.k[g]) for g in cancel_around(cx, 0).rows}
    out = set()
    pts = sorted(points)
    for a in range(len(pts)):
        ja, ka = pts[a]
        for b in range(a + 1, len(pts)):
            jb, kb = pts[b]
            if ka != kb:
                t = Fraction(ja - jb, ka - kb)
                if 0 < t < 1:
                    out.add(t)
    return sorted(out)


@dataclass(frozen=True)
class Segment:
    t0: Fraction
    t1: Fraction
    slope: Fraction
    intercept: Fraction
    certified: bool

    def value(self, t) -> Fraction:
        return self.intercept + self.slope * Fraction(t)

    def to_json(self) -> dict:
        return {
            "t0": str(self.t0),
            "t1": str(self.t1),
            "slope": str(self.slope),
            "intercept": str(self.intercept),
            "certified": self.certified,
        }


@dataclass
class DtProfile:
    strands: int
    writhe: int
    samples: list[tuple[Fraction, Fraction]]
    segments: list[Segment]
    breakpoint_candidates: list[Fraction] = field(default_factory=list)

    @property
    def fully_certified(self) -> bool:
        return all(s.certified for s in self.segments)

    @property
    def d0(self) -> Fraction:
        return self.samples[0][1]

    def sample(self, t) -> Fraction:
        t = Fraction(t)
        for tt, d in self.samples:
            if tt == t:
                return d
        raise KeyError(f"t = {t} was not sampled")

    def segment_at(self, t) -> Segment:
        """The segment covering [t, t + eps)."""
        t = Fraction(t)
        for seg in self.segments:
            if seg.t0 <= t < seg.t1:
                return seg
        raise ValueError(f"t = {t} is not in [0, 2)")

    def right_slope(self, t):
        """m_t, or None when the covering segment is not certified."""
        seg = self.segment_at(t)
        return seg.slope if seg.certified else None

    def breakpoints(self) -> list[Fraction]:
        """Interior points where the slope changes, on the whole of (0, 2)."""
        return [a.t1 for a, b in zip(self.segments, self.segments[1:]) if a.slope != b.slope]

    def value(self, t) -> Fraction:
        t = Fraction(t)
        for seg in self.segments:
            if seg.t0 <= t <= seg.t1:
                if not seg.certified:
                    raise ValueError(f"d_t at {t} lies in an uncertified gap")
                return seg.value(t)
        raise ValueError(f"t = {t} is not in [0, 2]")

    def to_json(self) -> dict:
        return {
            "samples": [{"t": str(t), "d": str(d)} for t, d in self.samples],
            "segments": [s.to_json() for s in self.segments],
        }


def allowed_slopes(n: int) -> set[int]:
    return set(range(-n, n + 1, 2))


def _segments(points: Sequence[tuple[Fraction, Fraction]], certified: Sequence[bool]) -> list[Segment]:
    out: list[Segment] = []
    for (ta, da), (tb, db), ok in zip(points, points[1:], certified):
        slope = (db - da) / (tb - ta)
        if out and out[-1].certified == ok and out[-1].slope == slope and ok:
            prev = out[-1]
            out[-1] = Segment(prev.t0, tb, slope, prev.intercept, True)
        else:
            out.append(Segment(ta, tb, slope, da - slope * ta, ok))
    return out


def _evaluate(w: BraidWord, ts: Sequence[Fraction], cap, workers: int) -> list[Fraction]:
    if workers > 1 and len(ts) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_dt_worker, [(w, t, cap) for t in ts]))
    return [dt_at(w, t, cap=cap) for t in ts]


def _dt_worker(args):
    w, t, cap = args
    return dt_at(w, t, cap=cap)


def profile(w: BraidWord, denominator: int = DEFAULT_DENOMINATOR,
            max_refine: int = DEFAULT_MAX_REFINE, cap: int | None = None,
            workers: int = 1) -> DtProfile:
    """Sample d_t at t = k/denominator on [0, 1], certify, mirror to [1, 2]."""
    if denominator < 1:
        raise ValueError(f"denominator must be >= 1, got {denominator}")
    n = w.strands
    ts = [Fraction(k, denominator) for k in range(denominator + 1)]
    values = dict(zip(ts, _evaluate(w, ts, cap, workers)))
    candidates = candidate_breakpoints(w, cap)

    def uncertified_gaps(keys):
        return [(a, b) for a, b in zip(keys, keys[1:]) if any(a < c < b for c in candidates)]

    for _ in range(max_refine):
        keys = sorted(values)
        gaps = uncertified_gaps(keys)
        if not gaps:
            break
        extra = sorted({c for a, b in gaps for c in candidates if a < c < b})
        values.update(zip(extra, _evaluate(w, extra, cap, workers)))

    keys = sorted(values)
    bad = set(uncertified_gaps(keys))
    half = [(t, values[t]) for t in keys]
    certified = [(a, b) not in bad for a, b in zip(keys, keys[1:])]
    left = _segments(half, certified)

    slopes = allowed_slopes(n)
    for seg in left:
        if seg.certified and (seg.slope.denominator != 1 or int(seg.slope) not in slopes):
            raise InternalConsistencyError(
                f"certified slope {seg.slope} on [{seg.t0}, {seg.t1}] is not in {sorted(slopes)}"
            )
    reached = False
    for seg in left:
        if seg.certified and seg.slope == n:
            reached = True
        elif reached and seg.certified:
            raise InternalConsistencyError(
                f"slope {seg.slope} on [{seg.t0}, {seg.t1}] after the slope reached {n}"
            )
    right = [Segment(2 - s.t1, 2 - s.t0, -s.slope, s.value(0) + 2 * s.slope, s.certified)
             for s in reversed(left)]
    mirrored = [(2 - t, d) for t, d in reversed(half[:-1])]
    return DtProfile(n, writhe(w), half + mirrored, left + right, candidates)


# --- derived reports -------------------------------------------------------

def self_linking(w: BraidWord) -> int:
    return -w.strands + writhe(w)


def s_invariant(w: BraidWord, d0: Fraction | None = None) -> int:
    """s = d_0 + 1."""
    if d0 is None:
        d0 = dt_at(w, 0)
    if d0.denominator != 1:
        raise InternalConsistencyError(f"d_0 = {d0} is not an integer")
    return int(d0) + 1


def qp_obstruction(w: BraidWord, d0: Fraction | None = None) -> str:
    """``not_quasipositive`` iff d_0 differs from sl = -n + w."""
    if d0 is None:
        d0 = dt_at(w, 0)
    return "consistent" if d0 == self_linking(w) else "not_quasipositive"


def rv_sufficient(prof: DtProfile):
    """True if the slope just below t = 1 is n (the braid is right-veering),
    False if it is certified and smaller (criterion not met), None if the
    last segment before 1 is uncertified."""
    seg = next(s for s in prof.segments if s.t1 == 1)
    if not seg.certified:
        return None
    return seg.slope == prof.strands


def band_rank_lower_bound(prof: DtProfile) -> tuple[Fraction, bool]:
    """max over [0, 2] of |d_t + n|1 - t||; exact when the profile is certified.

    Both terms are piecewise linear with kinks among the sample points, so the
    maximum is attained at a sample.
    """
    n = prof.strands
    best = max(abs(d + n * abs(1 - t)) for t, d in prof.samples)
    return best, prof.fully_certified


@dataclass
class Memberships:
    in_S: bool
    in_M: dict[Fraction, bool | None]
    in_M_prime: dict[Fraction, bool | None]


def monoid_memberships(w: BraidWord, prof: DtProfile, t0_list: Iterable = (0,)) -> Memberships:
    """Membership in S (sl = s - 1), M_t0 (slope n on [0, t0), with M_0 read as
    slope n at 0) and M'_t0 (slope n on [t0, 1))."""
    n = prof.strands
    in_S = prof.d0 == self_linking(w)
    in_M, in_M_prime = {}, {}
    for t0 in t0_list:
        t0 = Fraction(t0)
        if not 0 <= t0 < 1:
            raise ValueError(f"t0 must lie in [0, 1), got {t0}")
        lower = [prof.segment_at(0)] if t0 == 0 else [s for s in prof.segments if s.t0 < t0]
        upper = [s for s in prof.segments if s.t1 > t0 and s.t0 < 1]
        in_M[t0] = _all_slope(lower, n)
        in_M_prime[t0] = _all_slope(upper, n)
        # M_0 = S, and M_t0 only shrinks as t0 grows
        if in_M[t0] is not None and (in_M[t0] != in_S if t0 == 0 else in_M[t0] and not in_S):
            raise InternalConsistencyError(
                f"M_{t0} membership {in_M[t0]} disagrees with S membership {in_S}"
            )
    return Memberships(in_S, in_M, in_M_prime)


def _all_slope(segments, n):
    if any(s.certified and s.slope != n for s in segments):
        return False
    if all(s.certified for s in segments):
        return True
    return None


def psi_is_nonzero(w: BraidWord, cap: int | None = None) -> bool:
    """Whether Plamenevskaya's cycle survives in Khovanov homology of the diagram."""
    cx = complex_for(w, cap)
    return not in_boundary_image(cx, plamenevskaya_class(cx), kind="khovanov")


@dataclass
class BraidReport:
    braid: BraidWord
    writhe: int
    self_linking: int
    s_invariant: int
    profile: DtProfile
    qp_obstruction: str
    rv_sufficient: bool | None
    band_rank_lower_bound: Fraction
    band_rank_certified: bool
    in_S: bool
    in_M: dict[Fraction, bool | None]
    in_M_prime: dict[Fraction, bool | None]
    psi_nonzero: bool | None = None

    @property
    def band_rank_bound_int(self) -> int:
        return ceil(self.band_rank_lower_bound)


def report(w: BraidWord, denominator: int = DEFAULT_DENOMINATOR,
           max_refine: int = DEFAULT_MAX_REFINE, t0_list: Iterable = (0,),
           cap: int | None = None, workers: int = 1, with_psi: bool = True) -> BraidReport:
    prof = profile(w, denominator, max_refine, cap=cap, workers=workers)
    d2 = dt_at(w, 2, use_symmetry=False, cap=cap)
    if d2 != prof.d0:
        raise InternalConsistencyError(f"d_0 = {prof.d0} but d_2 = {d2}")
    d1 = prof.sample(1)
    if d1 != writhe(w):
        raise InternalConsistencyError(f"d_1 = {d1} but the writhe is {writhe(w)}")
    mem = monoid_memberships(w, prof, t0_list)
    bound, certified = band_rank_lower_bound(prof)
    return BraidReport(
        braid=w,
        writhe=writhe(w),
        self_linking=self_linking(w),
        s_invariant=s_invariant(w, prof.d0),
        profile=prof,
        qp_obstruction=qp_obstruction(w, prof.d0),
        rv_sufficient=rv_sufficient(prof),
        band_rank_lower_bound=bound,
        band_rank_certified=certified,
        in_S=mem.in_S,
        in_M=mem.in_M,
        in_M_prime=mem.in_M_prime,
        psi_nonzero=psi_is_nonzero(w, cap) if with_psi else None,
    )


# --- property suite --------------------------------------------------------

@dataclass
class SuiteOptions:
    denominator: int = 6
    conjugators: Sequence[BraidWord] = ()
    partners: Sequence[BraidWord] = ()
    stabilizations: Sequence[int] = (1, -1)
    direct_mirror: bool = True
    check_span: bool = True


@dataclass
class PropertyResult:
    name: str
    passed: bool
    witness: str = ""


def property_suite(w: BraidWord, options: SuiteOptions | None = None) -> dict[str, PropertyResult]:
    """Evaluate the structural properties of d_t for one braid.

    Failures are returned as data, never raised.
    """
    opts = options or SuiteOptions()
    n, wr = w.strands, writhe(w)
    ts = [Fraction(k, opts.denominator) for k in range(opts.denominator + 1)]
    full_ts = ts + [2 - t for t in reversed(ts[:-1])]
    results: dict[str, PropertyResult] = {}

    def record(name, failures):
        results[name] = PropertyResult(name, not failures, "; ".join(failures[:3]))

    d = {t: dt_at(w, t) for t in ts}

    record("d1_equals_writhe", [] if d[Fraction(1)] == wr else [f"d_1 = {d[Fraction(1)]}, w = {wr}"])

    d2 = dt_at(w, 2, use_symmetry=False)
    record("d0_equals_d2", [] if d2 == d[Fraction(0)] else [f"d_0 = {d[Fraction(0)]}, d_2 = {d2}"])

    fails = []
    if opts.direct_mirror:
        for t in ts:
            direct = dt_at(w, 2 - t, use_symmetry=False)
            if direct != d[t]:
                fails.append(f"d_{1 - (1 - t)} = {d[t]} but d_{2 - t} = {direct}")
    record("mirror_symmetry", fails)

    fails = []
    slopes = allowed_slopes(n)
    for a, b in zip(ts, ts[1:]):
        if abs(d[b] - d[a]) > n * (b - a):
            fails.append(f"|d_{b} - d_{a}| exceeds n * {b - a}")
    try:
        prof = profile(w, opts.denominator)
    except InternalConsistencyError as exc:
        prof = None
        fails.append(str(exc))
    record("slope_quantization", fails)

    fails = [f"d_{t} = {d[t]} < {-n * abs(1 - t) + wr}" for t in ts if d[t] < -n * abs(1 - t) + wr]
    record("qp_lower_bound", fails)

    fails = []
    d0 = d[Fraction(0)]
    in_S = d0 == -n + wr
    first = prof.segment_at(0) if prof else None
    if first is None:
        fails.append("no profile")
    elif first.certified and (first.slope == n) != in_S:
        fails.append(f"in_S = {in_S} but m_0 = {first.slope}")
    record("M0_equals_S", fails)

    if opts.check_span:
        fails = [f"span minimum at t = {t} is {dt_span(w, t)}, d_t = {d[t]}"
                 for t in ts if dt_span(w, t) != d[t]]
        record("span_minimum", fails)

    for idx, g in enumerate(opts.conjugators):
        wg = conjugate(w, g)
        fails = [f"t = {t}: {dt_at(wg, t)} vs {d[t]}" for t in ts if dt_at(wg, t) != d[t]]
        record(f"conjugation_invariance[{idx}]", fails)

    for sign in opts.stabilizations:
        ws = stabilize(w, sign)
        fails = []
        for t in full_ts:
            base = dt_at(w, t)
            val = dt_at(ws, t)
            if not base - t <= val <= base + t:
                fails.append(f"t = {t}: {val} not in [{base - t}, {base + t}]")
        record(f"stabilization[{sign:+d}]", fails)

    for idx, other in enumerate(opts.partners):
        comp = annular_compose(w, other)
        fails = [f"t = {t}: {dt_at(comp, t)} != {d[t]} + {dt_at(other, t)}"
                 for t in ts if dt_at(comp, t) != d[t] + dt_at(other, t)]
        record(f"additivity[{idx}]", fails)

    return results
