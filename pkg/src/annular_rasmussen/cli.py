"""annular-dt: compute d_t profiles and reports for braid closures.

Exit codes: 0 success, 1 bad input, 2 generator cap exceeded, 3 internal
consistency failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

from .braid import BraidParseError, BraidValidationError, BraidWord, parse_braid, writhe
from .filtgrade import as_t
from .invariants import (
    DEFAULT_DENOMINATOR,
    DEFAULT_MAX_REFINE,
    DtProfile,
    InternalConsistencyError,
    SuiteOptions,
    complex_for,
    dt_at,
    profile,
    property_suite,
    report,
    self_linking,
)
from .leecomplex import audit_degrees, canonical_class, square_defects, theta_defects
from .statecube import CAP_ENV_VAR, ResourceLimitError, braidlike_resolution, default_cap, resolve

EXIT_OK, EXIT_INPUT, EXIT_CAP, EXIT_INTERNAL = 0, 1, 2, 3
FORMATS = ("json", "csv", "text", "svg")


@dataclass
class RunConfig:
    command: str
    braid: str
    t: str | None = None
    denominator: int = DEFAULT_DENOMINATOR
    max_refine: int = DEFAULT_MAX_REFINE
    fmt: str = "json"
    cap: int | None = None
    threads: int = 1
    t0: list[str] = field(default_factory=lambda: ["0"])
    dump: str | None = None

    def validate(self):
        if self.denominator < 1:
            raise ValueError(f"--den must be >= 1, got {self.denominator}")
        if self.max_refine < 0:
            raise ValueError(f"--max-refine must be >= 0, got {self.max_refine}")
        if self.threads < 1:
            raise ValueError(f"--threads must be >= 1, got {self.threads}")
        if self.fmt not in FORMATS:
            raise ValueError(f"unknown format {self.fmt!r}")
        if self.command == "dt":
            if self.t is None:
                raise ValueError("dt needs --t")
            as_t(parse_rational(self.t))


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not a rational number: {text!r}") from None


def q(x) -> str:
    """Lowest-terms rational as a string ("3", "-5/3")."""
    return str(Fraction(x))


def braid_json(w: BraidWord) -> dict:
    return {"strands": w.strands, "letters": list(w.letters)}


# --- commands --------------------------------------------------------------

def cmd_dt(cfg: RunConfig, w: BraidWord) -> dict:
    t = parse_rational(cfg.t)
    return {"braid": braid_json(w), "t": q(t), "d": q(dt_at(w, t, cap=cfg.cap))}


def _profile_doc(w: BraidWord, prof: DtProfile) -> dict:
    return {
        "braid": braid_json(w),
        "writhe": writhe(w),
        "sl": self_linking(w),
        "s_invariant": int(prof.d0) + 1,
        **prof.to_json(),
        "certified": prof.fully_certified,
    }


def cmd_profile(cfg: RunConfig, w: BraidWord):
    prof = profile(w, cfg.denominator, cfg.max_refine, cap=cfg.cap, workers=cfg.threads)
    return _profile_doc(w, prof), prof


def cmd_report(cfg: RunConfig, w: BraidWord):
    t0s = [parse_rational(x) for x in cfg.t0]
    rep = report(w, cfg.denominator, cfg.max_refine, t0_list=t0s, cap=cfg.cap, workers=cfg.threads)
    doc = _profile_doc(w, rep.profile)
    doc["reports"] = {
        "qp": rep.qp_obstruction,
        "rv": rep.rv_sufficient,
        "band_rank": q(rep.band_rank_lower_bound),
        "band_rank_certified": rep.band_rank_certified,
        "in_S": rep.in_S,
        "in_M": {q(k): v for k, v in rep.in_M.items()},
        "in_M_prime": {q(k): v for k, v in rep.in_M_prime.items()},
        "psi_nonzero": rep.psi_nonzero,
    }
    return doc, rep.profile


def cmd_verify(cfg: RunConfig, w: BraidWord) -> dict:
    cx = complex_for(w, cfg.cap)
    audit_degrees(cx)
    squares = square_defects(cx)
    thetas = theta_defects(cx)
    results = property_suite(w, SuiteOptions(denominator=cfg.denominator))
    checks = {name: {"passed": r.passed, "witness": r.witness} for name, r in results.items()}
    checks["d_squared_zero"] = {"passed": not any(squares.values()),
                                "witness": ", ".join(k for k, v in squares.items() if v)}
    checks["theta_commutes"] = {"passed": not any(thetas.values()),
                                "witness": ", ".join(str(k) for k, v in thetas.items() if v)}
    cx0 = canonical_class(cx)
    checks["canonical_class_cycle"] = {"passed": not cx.differential(cx0), "witness": ""}
    return {
        "braid": braid_json(w),
        "checks": checks,
        "passed": all(c["passed"] for c in checks.values()),
    }


def debug_dump(w: BraidWord, cap) -> dict:
    cx = complex_for(w, cap)
    circles = resolve(w, braidlike_resolution(w))
    return {
        "braid": braid_json(w),
        "braidlike_circles": circles.to_json(),
        "generators": {str(i): len(cx.table(i)) for i in cx.degrees},
        "differentials": {str(i): json.loads(cx.dump_triplets(i)) for i in cx.degrees if cx.has_map(i)},
    }


# --- formatting ------------------------------------------------------------

def to_csv(prof: DtProfile) -> str:
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["t", "d"])
    for t, d in prof.samples:
        out.writerow([q(t), q(d)])
    return buf.getvalue()


def to_text(doc: dict) -> str:
    lines = []
    b = doc.get("braid")
    if b:
        lines.append(f"braid: {b['strands']}: {' '.join(map(str, b['letters']))}")
    for key in ("t", "d", "writhe", "sl", "s_invariant", "certified", "passed"):
        if key in doc:
            lines.append(f"{key}: {_plain(doc[key])}")
    for seg in doc.get("segments", []):
        flag = "" if seg["certified"] else "  (uncertified)"
        lines.append(f"  [{seg['t0']}, {seg['t1']}]  d = {seg['slope']}*t + {seg['intercept']}{flag}")
    for key, val in doc.get("reports", {}).items():
        lines.append(f"{key}: {_plain(val)}")
    for name, c in doc.get("checks", {}).items():
        lines.append(f"{'PASS' if c['passed'] else 'FAIL'} {name}" + (f": {c['witness']}" if c["witness"] else ""))
    return "\n".join(lines) + "\n"


def _plain(v) -> str:
    if v is None:
        return "indeterminate"
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, dict):
        return ", ".join(f"{k}={_plain(x)}" for k, x in v.items())
    return str(v)


def to_svg(prof: DtProfile, title: str) -> str:
    """Profile polyline in exact integer user units, labels at breakpoints."""
    pts = prof.samples
    sx = lcm(*(t.denominator for t, _ in pts))
    sy = lcm(*(d.denominator for _, d in pts))
    ds = [d for _, d in pts]
    lo, hi = min(ds), max(ds)
    if lo == hi:
        lo, hi = lo - 1, hi + 1
    y0, y1 = int(lo * sy), int(hi * sy)
    coords = " ".join(f"{int(t * sx)},{int(-d * sy)}" for t, d in pts)
    width, height, pad = 640, 360, 40

    def px(t, d):
        x = pad + (width - 2 * pad) * Fraction(t) / 2
        y = pad + (height - 2 * pad) * (hi - Fraction(d)) / (hi - lo)
        return round(x), round(y)

    labels = []
    for t in [Fraction(0)] + prof.breakpoints() + [Fraction(2)]:
        d = prof.sample(t)  # breakpoints are always sample points
        x, y = px(t, d)
        labels.append(f'<circle cx="{x}" cy="{y}" r="3"/>'
                      f'<text x="{x}" y="{y - 8}" font-size="11" text-anchor="middle">({q(t)}, {q(d)})</text>')
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">\n'
        f'<title>{title}</title>\n'
        f'<svg x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" '
        f'viewBox="0 {-y1} {2 * sx} {y1 - y0}" preserveAspectRatio="none">\n'
        f'<polyline fill="none" stroke="black" stroke-width="2" vector-effect="non-scaling-stroke" '
        f'points="{coords}"/>\n</svg>\n'
        + "\n".join(labels)
        + "\n</svg>\n"
    )


def render(cfg: RunConfig, doc: dict, prof: DtProfile | None) -> str:
    if cfg.fmt == "json":
        return json.dumps(doc, indent=2) + "\n"
    if cfg.fmt == "text":
        return to_text(doc)
    if prof is None:
        raise ValueError(f"format {cfg.fmt} needs a profile (use the profile or report command)")
    if cfg.fmt == "csv":
        return to_csv(prof)
    return to_svg(prof, cfg.braid)


# --- entry points ----------------------------------------------------------

def run(cfg: RunConfig, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        cfg.validate()
        w = parse_braid(cfg.braid)
        prof = None
        if cfg.command == "dt":
            doc = cmd_dt(cfg, w)
        elif cfg.command == "profile":
            doc, prof = cmd_profile(cfg, w)
        elif cfg.command == "report":
            doc, prof = cmd_report(cfg, w)
        elif cfg.command == "verify":
            doc = cmd_verify(cfg, w)
        else:
            raise ValueError(f"unknown command {cfg.command!r}")
        text = render(cfg, doc, prof)
        if cfg.dump:
            with open(cfg.dump, "w") as fh:
                json.dump(debug_dump(w, cfg.cap), fh, indent=1)
    except (BraidParseError, BraidValidationError, ValueError) as exc:
        _error(err, "invalid_input", str(exc))
        return EXIT_INPUT
    except ResourceLimitError as exc:
        _error(err, "resource_cap", str(exc), generators=exc.count, cap=exc.cap)
        return EXIT_CAP
    except (InternalConsistencyError, AssertionError) as exc:
        _error(err, "internal_consistency", str(exc))
        return EXIT_INTERNAL
    out.write(text)
    if cfg.command == "verify" and not doc["passed"]:
        return EXIT_INTERNAL
    return EXIT_OK


def _error(err, kind: str, message: str, **extra):
    err.write(json.dumps({"error": kind, "message": message, **extra}) + "\n")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="annular-dt",
        description="Annular Rasmussen invariants d_t of braid closures.",
        epilog=f"Braids are written 'n: l1 l2 ...' with signed 1-based generators. "
               f"The default generator cap comes from ${CAP_ENV_VAR}.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("braid", help='braid word, e.g. "3: 1 -2 1"')
        sp.add_argument("--format", dest="fmt", choices=FORMATS, default="json")
        sp.add_argument("--cap", type=int, default=None, help="maximum number of generators")
        sp.add_argument("--threads", type=int, default=1, help="worker processes for sampling")
        sp.add_argument("--dump", metavar="PATH", help="write circles and differentials as JSON")

    def sampling(sp, den=DEFAULT_DENOMINATOR):
        sp.add_argument("--den", dest="denominator", type=int, default=den,
                        help="sample at t = k/den")
        sp.add_argument("--max-refine", type=int, default=DEFAULT_MAX_REFINE)

    sp = sub.add_parser("dt", help="d_t at one t")
    common(sp)
    sp.add_argument("--t", required=True, help="rational t in [0, 2], e.g. 2/3")
    sp = sub.add_parser("profile", help="sampled and certified profile on [0, 2]")
    common(sp)
    sampling(sp)
    sp = sub.add_parser("report", help="profile plus derived reports")
    common(sp)
    sampling(sp)
    sp.add_argument("--t0", nargs="+", default=["0"], help="t0 values for the slope memberships")
    sp = sub.add_parser("verify", help="run algebraic audits and the property suite")
    common(sp)
    sampling(sp, den=6)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(
        command=args.command,
        braid=args.braid,
        t=getattr(args, "t", None),
        denominator=getattr(args, "denominator", DEFAULT_DENOMINATOR),
        max_refine=getattr(args, "max_refine", DEFAULT_MAX_REFINE),
        fmt=args.fmt,
        cap=args.cap if args.cap is not None else default_cap(),
        threads=args.threads,
        t0=getattr(args, "t0", ["0"]),
        dump=args.dump,
    )
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
