"""Command-line front end: ``hotspots prove|certify|scan|fem|check-certificate``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
import time
from fractions import Fraction
from pathlib import Path

from . import bounds
from .bounds import SYM, UNIT, TriParam
from .certifier import Rect, check_certificate, certify_nonpos
from .config import ConfigError, RunConfig, load_config
from .exactq import PiQuad, format_scalar
from .polytext import PolyParseError, parse_poly
from .proofs import CASE_IDS, check_case_certificate, run_all

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    with os.fdopen(fd, "w") as f:
        f.write(text)
    os.replace(tmp, path)


def _scalar(s: str):
    """Exact constant from polynomial text, e.g. ``1/2`` or ``1/2*sqrt(3)``."""
    p = parse_poly(s, ("_u", "_v"))
    if p.total_degree() > 0:
        raise PolyParseError(f"{s!r} is not a constant")
    c = PiQuad.coerce(p.coeff(0, 0))
    if c.c1 != 0 or c.c2 != 0:
        raise PolyParseError(f"{s!r} involves pi2")
    return c.c0


def _config(args) -> RunConfig:
    return load_config(
        getattr(args, "config", None),
        pi_bits=getattr(args, "pi_bits", None),
        max_depth=getattr(args, "max_depth", None),
        cap_bits=getattr(args, "cap_bits", None),
        fem_levels=getattr(args, "levels", None),
        grid=getattr(args, "grid", None),
        outdir=getattr(args, "outdir", None),
        jobs=getattr(args, "jobs", None),
    )


# ---------------------------------------------------------------------------
# prove


def cmd_prove(args) -> int:
    cfg = _config(args)
    ids = [i.upper() for i in args.cases]
    if ids == ["ALL"]:
        ids = list(CASE_IDS)
    bad = [i for i in ids if i not in CASE_IDS]
    if bad:
        print(f"unknown case ids: {', '.join(bad)}", file=sys.stderr)
        return EXIT_USAGE
    rep = run_all(cfg.pi_bits, cfg.max_depth, ids=ids, cap_bits=cfg.cap_bits, strategy=args.strategy,
                  jobs=cfg.jobs)
    out = Path(cfg.outdir)
    for c in rep.cases:
        c.certificate_path = f"certificates/{c.id}.json"
        _atomic_write(out / c.certificate_path,
                      json.dumps(c.certificate_json(), sort_keys=True, separators=(",", ":")) + "\n")
    _atomic_write(out / "report.json", rep.dumps() + "\n")
    _atomic_write(out / "timings.json", json.dumps(rep.timings(), indent=2, sort_keys=True) + "\n")
    print(rep.summary())
    for c in rep.cases:
        for note in c.notes:
            print(f"note {c.id}: {note}")
    return rep.exit_code


# ---------------------------------------------------------------------------
# certify


def cmd_certify(args) -> int:
    cfg = _config(args)
    names = tuple(v.strip() for v in args.vars.split(","))
    if len(names) != 2:
        print("--vars needs two names", file=sys.stderr)
        return EXIT_USAGE
    text = args.expr if args.expr is not None else Path(args.file).read_text()
    p = parse_poly(text, names)
    vals = [_scalar(s) for s in args.rect]
    if len(vals) == 2:
        if p.degree[1] > 0:
            print("a one-dimensional rectangle needs a polynomial in the first variable only", file=sys.stderr)
            return EXIT_USAGE
        rect = Rect.from_bounds(vals[0], vals[1])
    elif len(vals) == 4:
        rect = Rect.from_bounds(vals[0], vals[2], vals[1], vals[3])
    else:
        print("--rect takes x0 x1 (1-D) or x0 y0 x1 y1", file=sys.stderr)
        return EXIT_USAGE
    cert = certify_nonpos(p, rect, cfg.max_depth, pi_bits=cfg.pi_bits, cap_bits=cfg.cap_bits, label="adhoc")
    if args.out:
        _atomic_write(Path(args.out), cert.dumps() + "\n")
    if cert.ok:
        print(f"certified ({'strict' if cert.strict else 'non-strict'}) with {len(cert.leaves())} leaves")
        return EXIT_OK
    w = getattr(cert, "worst", None)
    print("not certified" + (f": worst leaf {w.rect} bound {format_scalar(w.bound.hi)}" if w else ""))
    return EXIT_FAIL


# ---------------------------------------------------------------------------
# scan


def _grid_points(n: int):
    """a = i/(2n) in [0, 1/2], b = j/n in (0, 1]."""
    for i in range(n + 1):
        for j in range(1, n + 1):
            yield TriParam(Fraction(i, 2 * n), Fraction(j, n))


def _points(args, n, admissible_only=False):
    if args.point:
        return [TriParam(_scalar(a), _scalar(b)) for a, b in (p.split(",") for p in args.point)]
    if getattr(args, "angles", None):
        from .fem import triangle_from_angles

        out = []
        for s in args.angles:
            al, be = (float(_scalar(x)) * math.pi / 180 for x in s.split(","))
            out.append(triangle_from_angles(al, be))
        return out
    return [t for t in _grid_points(n) if t.admissible()] if admissible_only else list(_grid_points(n))


def _fq(x) -> str:
    return format_scalar(x) if not isinstance(x, float) else repr(x)


def _iv_cols(f, t):
    try:
        iv = f(t)
        return [f"{float(iv.lo):.12g}", f"{float(iv.hi):.12g}"]
    except ValueError:
        return ["", ""]


def _min_angle(t: TriParam) -> float:
    a, b = float(t.a), float(t.b)
    A = math.atan2(b, a)
    B = math.atan2(b, 1 - a)
    return min(A, B, math.pi - A - B)


def _scan_fig1(pts, cfg):
    head = ["a", "b", "a_float", "b_float", "admissible", "kite_sym", "mu_cond", "acute", "small_angle",
            "small_angle_pi4", "gray"]
    rows = []
    for t in pts:
        fl = bounds.region_classify(t).as_dict()
        rows.append([_fq(t.a), _fq(t.b), f"{float(t.a):.6f}", f"{float(t.b):.6f}", t.admissible(),
                     *fl.values(), bounds.in_gray_region(t)])
    return head, rows


def _scan_bounds(pts, cfg):
    head = ["a", "b", "gray", "mu_a_lower_lo", "mu_a_lower_hi", "kite_upper_lo", "kite_upper_hi",
            "mu2_lemma_lo", "mu2_lemma_hi", "pi2_over_b2", "u1_lo", "u1_hi", "u2_lo", "u2_hi", "chain_holds"]
    rows = []
    bits = cfg.pi_bits
    for t in pts:
        if not t.admissible():
            continue
        s = bounds.to_sym(t)
        gray = bounds.in_gray_region(t)
        chain = ""
        if gray and 0 < t.a < Fraction(1, 2):
            chain = bounds.chain_holds(t, bits)
        rows.append([
            _fq(t.a), _fq(t.b), gray,
            *_iv_cols(lambda x: bounds.mu_a_lower(x, bits), t),
            *_iv_cols(lambda x: bounds.kite_upper_ABC(x, bits), t),
            *_iv_cols(lambda x: bounds.mu2_upper_lemma(x, bits), t),
            f"{math.pi ** 2 / float(t.b) ** 2:.12g}",
            *_iv_cols(lambda x: bounds.u1(x, bits), s),
            *_iv_cols(lambda x: bounds.u2(x, bits), s),
            chain,
        ])
    return head, rows


def _scan_hotspots(pts, cfg):
    from .fem import analyze_hot_spots, solve_neumann, triangle

    head = ["a", "b", "min_angle_deg", "mu2", "mu3", "status", "argmax", "argmin", "stable", "verdict"]
    rows = []
    for t in pts:
        if not t.b > 0:
            continue
        r = solve_neumann(triangle(t), 4, cfg.fem_levels)
        h = analyze_hot_spots(r)
        if h.status != "ok":
            verdict = "refused"
        elif h.extrema_at_vertices:
            verdict = "extrema at vertices"
        elif h.interior_extrema:
            verdict = "interior extremum"
        else:
            verdict = "extremum on edge"
        rows.append([_fq(t.a), _fq(t.b), f"{math.degrees(_min_angle(t)):.4f}", f"{r.values[1]:.8g}",
                     f"{r.values[2]:.8g}", h.status, h.argmax.get("class", ""), h.argmin.get("class", ""),
                     h.stable, verdict])
    return head, rows


def cmd_scan(args) -> int:
    cfg = _config(args)
    pts = _points(args, cfg.grid, admissible_only=args.mode == "hotspots")
    fn = {"fig1": _scan_fig1, "bounds": _scan_bounds, "hotspots": _scan_hotspots}[args.mode]
    head, rows = fn(pts, cfg)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(head)
    for r in rows:
        w.writerow(["true" if v is True else "false" if v is False else v for v in r])
    if args.out:
        _atomic_write(Path(args.out), buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    if args.mode == "bounds":
        return EXIT_OK if all(r[-1] is not False for r in rows) else EXIT_FAIL
    return EXIT_OK


# ---------------------------------------------------------------------------
# fem


def parse_domain(s: str):
    """``square[:side]``, ``equilateral``, ``triangle:a,b[,sym]``, ``kite:a,b``, ``rhombus:h``."""
    from . import fem

    kind, _, rest = s.partition(":")
    vals = [v for v in rest.split(",") if v]
    if kind == "square":
        return fem.square(float(_scalar(vals[0])) if vals else 1.0)
    if kind == "equilateral":
        return fem.triangle(TriParam(0, _scalar("sqrt(3)"), SYM))
    if kind in ("triangle", "kite"):
        conv = SYM if len(vals) == 3 and vals[2] == "sym" else UNIT
        if len(vals) not in (2, 3):
            raise ValueError(f"{kind} needs a,b")
        t = TriParam(_scalar(vals[0]), _scalar(vals[1]), conv)
        return fem.triangle(t) if kind == "triangle" else fem.kite(t)
    if kind == "rhombus":
        return fem.rhombus(_scalar(vals[0]))
    raise ValueError(f"unknown domain {s!r}")


def cmd_fem(args) -> int:
    from . import fem

    cfg = _config(args)
    d = parse_domain(args.domain)
    if args.dirichlet:
        sides = [int(x) for x in args.dirichlet.split(",")]
        r = fem.solve_mixed(d, sides, args.modes, cfg.fem_levels)
    else:
        r = fem.solve_neumann(d, args.modes, cfg.fem_levels)
    out = {"result": r.to_json()}
    if d.kind == "kite":
        out["symmetry"] = [g.tag for g in fem.classify_symmetry(r)]
    if not args.dirichlet and args.modes >= 3:
        h = fem.analyze_hot_spots(r)
        out["hot_spots"] = h.to_json()
        if args.traces:
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(["side", "arc_length", "value", "tangential_derivative"])
            for tr in h.traces:
                for row in tr.rows():
                    w.writerow([row[0], f"{row[1]:.10g}", f"{row[2]:.10g}", f"{row[3]:.10g}"])
            _atomic_write(Path(args.traces), buf.getvalue())
    text = json.dumps(out, indent=2, sort_keys=True)
    if args.out:
        _atomic_write(Path(args.out), text + "\n")
    print(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# check-certificate


def cmd_check(args) -> int:
    ok_all = True
    for f in args.files:
        data = json.loads(Path(f).read_text())
        if data.get("kind") == "certificate":
            res = check_certificate(data)
            ok, errs = res.ok, res.errors
        else:
            ok, errs = check_case_certificate(data, rebuild=not args.no_catalog)
        print(f"{f}: {'accepted' if ok else 'REJECTED'}")
        for e in errs[:20]:
            print(f"  {e}")
        ok_all &= ok
    return EXIT_OK if ok_all else EXIT_FAIL


# ---------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="key=value configuration file")
    p.add_argument("--pi-bits", type=int, dest="pi_bits")
    p.add_argument("--max-depth", type=int, dest="max_depth")
    p.add_argument("--cap-bits", type=int, dest="cap_bits")
    p.add_argument("--levels", help="FEM refinement levels, e.g. 5,6")
    p.add_argument("--grid", type=int)
    p.add_argument("--outdir")
    p.add_argument("--jobs", type=int)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hotspots", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("prove", help="certify catalog cases")
    p.add_argument("cases", nargs="+", help="case ids or 'all'")
    p.add_argument("--strategy", choices=["paper", "subdivide", "tactic"])
    _common(p)
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("certify", help="certify poly <= 0 on a rectangle")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("file", nargs="?", help="file holding a polynomial")
    src.add_argument("-e", "--expr", help="polynomial text")
    p.add_argument("--rect", nargs="+", required=True, metavar="V", help="x0 y0 x1 y1, or x0 x1")
    p.add_argument("--vars", default="x,y")
    p.add_argument("--out", help="write the certificate JSON here")
    _common(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("scan", help="grid scans written as CSV")
    p.add_argument("mode", choices=["fig1", "hotspots", "bounds"])
    p.add_argument("--point", action="append", help="a,b (repeatable); replaces the grid")
    p.add_argument("--angles", action="append", help="two base angles in degrees, e.g. 180/7,72")
    p.add_argument("--out", help="CSV path (default stdout)")
    _common(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("fem", help="finite-element eigenvalues of one domain")
    p.add_argument("domain", help="square[:s] | equilateral | triangle:a,b[,sym] | kite:a,b | rhombus:h")
    p.add_argument("--modes", type=int, default=6)
    p.add_argument("--dirichlet", help="comma-separated side ids")
    p.add_argument("--out", help="JSON path")
    p.add_argument("--traces", help="CSV path for boundary traces of mode 2")
    _common(p)
    p.set_defaults(func=cmd_fem)

    p = sub.add_parser("check-certificate", help="re-verify certificate files")
    p.add_argument("files", nargs="+")
    p.add_argument("--no-catalog", action="store_true", help="skip comparison with the rebuilt case")
    p.set_defaults(func=cmd_check)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, PolyParseError, ValueError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
