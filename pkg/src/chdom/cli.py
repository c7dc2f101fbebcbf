"""``chdom`` command line: classify, dominate, appendix, zinv."""

from __future__ import annotations

import argparse
import cmath
import hashlib
import json
import math
import re
import sys
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .chgeom import BoundaryPoint, classify, heis_to_lift, translation_length, INF
from .cx3 import ScaledMat33, eig3
from .errors import (
    BadConfig,
    ChdomError,
    Degenerate,
    DegeneratePair,
    DegenerateTriple,
    DivisionByZero,
    ForbiddenInvariant,
    NotBipartite,
    NotNull,
    NotRealTriangle,
    ParseError,
    TopologyError,
    ZeroVector,
)
from .repdom import (
    RNG_ALGORITHM,
    BentRep,
    DominationReport,
    appendix_experiment,
    check_domination,
    parse_invariants,
)
from .surface import (
    bipartite_coloring,
    builtin_text,
    compile_word,
    format_walk,
    parse_triangulation,
    parse_walks,
    peripheral_word,
    random_closed_walk,
)
from .zgeom import TrianglePair, z_invariant

EXIT_OK = 0
EXIT_VERDICT = 1
EXIT_PARSE = 2
EXIT_NOT_ISOMETRY = 3
EXIT_NOT_BIPARTITE = 4
EXIT_DEGENERATE = 5

_FLOAT = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_REAL = re.compile(rf"({_FLOAT})")
_RECT = re.compile(rf"({_FLOAT})([+-])((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)i")
_POLAR = re.compile(rf"({_FLOAT})@({_FLOAT})")


def parse_complex(tok: str) -> complex:
    """``re``, ``re+imi``, ``re-imi`` or polar ``r@theta``."""
    tok = tok.strip()
    if m := _REAL.fullmatch(tok):
        z = complex(float(m.group(1)), 0.0)
    elif m := _RECT.fullmatch(tok):
        im = float(m.group(3))
        z = complex(float(m.group(1)), im if m.group(2) == "+" else -im)
    elif m := _POLAR.fullmatch(tok):
        z = cmath.rect(float(m.group(1)), float(m.group(2)))
    else:
        raise ParseError(f"bad complex literal {tok!r}")
    if not cmath.isfinite(z):
        raise ParseError(f"complex literal {tok!r} is not finite")
    return z


def format_complex(z: complex) -> str:
    re_, im = z.real + 0.0, z.imag + 0.0  # drop negative zeros
    return f"{re_:.17g}{'-' if im < 0 else '+'}{abs(im):.17g}i"


def parse_point(tok: str) -> BoundaryPoint:
    """``inf``, Heisenberg ``[zeta,t]`` or a lift ``(a,b,c)``."""
    tok = tok.strip()
    if tok.lower() in ("inf", "∞"):
        return BoundaryPoint(heis_to_lift(INF))
    if tok.startswith("[") and tok.endswith("]"):
        parts = tok[1:-1].split(",")
        if len(parts) != 2:
            raise ParseError(f"Heisenberg point needs [zeta,t]: {tok!r}")
        zeta = parse_complex(parts[0])
        try:
            t = float(parts[1])
        except ValueError:
            raise ParseError(f"bad height in {tok!r}") from None
        return BoundaryPoint(heis_to_lift((zeta, t)))
    if tok.startswith("(") and tok.endswith(")"):
        parts = tok[1:-1].split(",")
        if len(parts) != 3:
            raise ParseError(f"lift needs three coordinates: {tok!r}")
        return BoundaryPoint(np.array([parse_complex(p) for p in parts]))
    raise ParseError(f"bad boundary point {tok!r}")


# -- reports ---------------------------------------------------------------


def digest(text: str) -> str:
    return "sha256:" + hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass
class RunReport:
    version: str
    command: list
    input_digests: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    wall_time: float = 0.0
    header: dict = field(default_factory=dict)

    def tally(self) -> None:
        passed = sum(1 for r in self.rows if r.get("ok", True))
        self.summary = {"checked": len(self.rows), "passed": passed, "failed": len(self.rows) - passed}

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, ensure_ascii=False)

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        return cls(**json.loads(text))


def _write(out: str | None, text: str) -> None:
    if out is None:
        return
    if out == "-":
        sys.stdout.write(text + "\n")
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


# -- classify --------------------------------------------------------------


def cmd_classify(args) -> int:
    toks = list(args.entries)
    if args.file:
        toks += _read(args.file).split()
    try:
        if len(toks) != 9:
            raise ParseError(f"need 9 complex entries, got {len(toks)}")
        a = np.array([parse_complex(t) for t in toks]).reshape(3, 3)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        m = ScaledMat33.of(a)
        cls_ = classify(m, args.tol)
        ell = translation_length(m, args.tol)
    except ChdomError as exc:
        print(f"not an isometry: {exc}", file=sys.stderr)
        return EXIT_NOT_ISOMETRY
    eig = eig3(m, isometry=True).values()
    print(f"{cls_.kind.value}, f = {cls_.f:.6f}, ℓ = {ell:.6f}")
    print("eigenvalues: " + " ".join(format_complex(z) for z in eig))
    if args.json:
        rep = RunReport(__version__, ["classify", *toks], rows=[{
            "kind": cls_.kind.value, "f": cls_.f, "su_trace": [cls_.su_trace.real, cls_.su_trace.imag],
            "eigenvalues": [[z.real, z.imag] for z in eig], "ell": ell,
        }])
        rep.tally()
        _write(args.json, rep.to_json())
    return EXIT_OK


# -- dominate --------------------------------------------------------------


def _load_triangulation(spec: str):
    if spec.startswith("builtin:"):
        text = builtin_text(spec.split(":", 1)[1])
    else:
        text = _read(spec)
    return parse_triangulation(text), text


def _row(report: DominationReport) -> str:
    flag = "ok  " if report.ok else "FAIL"
    per = "" if report.peripheral_equal is None else f" peripheral={report.peripheral_equal}"
    return (f"{flag} {report.word}: ℓρ={report.ell:.9g} ℓρ0={report.ell0:.9g} "
            f"|trρ|={report.tr_abs:.9g} |trρ0|={report.tr0_abs:.9g} "
            f"length={report.length_ok} trace={report.trace_ok} sign={report.sign_ok} "
            f"entrywise={report.entrywise_ok}{per}")


def cmd_dominate(args) -> int:
    t0 = time.perf_counter()
    rng = np.random.default_rng(args.seed)
    digests = {}
    try:
        t, ttext = _load_triangulation(args.triangulation)
        digests["triangulation"] = digest(ttext)
        bipartite_coloring(t)
        if args.invariants:
            itext = _read(args.invariants)
            digests["invariants"] = digest(itext)
            rep = BentRep(t, parse_invariants(itext))
        else:
            rep = BentRep.random(t, rng)
        walks = []
        if args.walks:
            wtext = _read(args.walks)
            digests["walks"] = digest(wtext)
            walks += parse_walks(wtext)
        for i in range(args.random_walks):
            steps = 2 * int(rng.integers(1, args.max_steps // 2 + 1))
            walks.append((f"random{i}", random_closed_walk(t, steps, rng)))
        words = [(name, compile_word(t, path), format_walk(name, path)) for name, path in walks]
    except NotBipartite as exc:
        print(f"triangulation is not bipartite: {exc}", file=sys.stderr)
        return EXIT_NOT_BIPARTITE
    except (ParseError, TopologyError, OSError, KeyError, ChdomError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    for p in range(t.punctures):
        words.append((f"peripheral{p}", peripheral_word(t, p), None))
    reports = []
    for name, w, _ in words:
        reports.append(check_domination(rep, w, name))
    if args.inject_failure and reports:
        reports[0].length_ok = False
    for r, (_, w, walk) in zip(reports, words):
        print(_row(r))
        if not r.ok:
            print(f"  counterexample: word {w}" + (f"; {walk}" if walk else ""))
            print("  invariants: " + rep.to_text().strip().replace("\n", "; "))
    run = RunReport(
        __version__,
        ["dominate", *args.argv],
        digests,
        [r.to_dict() for r in reports],
        header={"rng": f"numpy.default_rng(PCG64) seed={args.seed}",
                "invariants": {f"e{e}": [x, a] for e, (x, a) in rep.invariants.items()}},
    )
    run.tally()
    run.wall_time = time.perf_counter() - t0
    print(f"checked {run.summary['checked']}, passed {run.summary['passed']}, failed {run.summary['failed']}")
    _write(args.json, run.to_json())
    return EXIT_OK if run.summary["failed"] == 0 else EXIT_VERDICT


# -- appendix --------------------------------------------------------------

CSV_HEADER = "x,y,a,b,f_trace,f_TRACE,violation"


def _csv_line(row) -> str:
    vals = (row.x, row.y, row.a, row.b, row.f_trace, row.f_TRACE)
    return ",".join(f"{v:.17g}" for v in vals) + ("," + ("true" if row.violation else "false"))


def cmd_appendix(args) -> int:
    try:
        if args.tuple:
            tuples = []
            for tok in args.tuple:
                parts = tok.split(",")
                if len(parts) != 4:
                    raise BadConfig(f"--tuple needs x,y,a,b: {tok!r}")
                tuples.append(tuple(float(p) for p in parts))
            rows = appendix_experiment(tuples=tuples)
        else:
            rows = appendix_experiment(args.samples, args.seed, args.xmax, args.amax)
    except (BadConfig, ValueError) as exc:
        print(f"bad configuration: {exc}", file=sys.stderr)
        return EXIT_PARSE
    text = "\n".join([CSV_HEADER, *(_csv_line(r) for r in rows)]) + "\n"
    if args.csv and args.csv != "-":
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    n_viol = sum(r.violation for r in rows)
    if not args.tuple:
        print(f"# rng: {RNG_ALGORITHM}; seed={args.seed}", file=sys.stderr)
    print(f"# violations: {n_viol}/{len(rows)}", file=sys.stderr)
    return EXIT_OK


# -- zinv ------------------------------------------------------------------


def cmd_zinv(args) -> int:
    try:
        pts = [parse_point(tok) for tok in args.points]
    except (ParseError, NotNull, ZeroVector) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        z = z_invariant(TrianglePair(*pts))
    except (DivisionByZero, ForbiddenInvariant, NotRealTriangle, DegenerateTriple,
            DegeneratePair, Degenerate) as exc:
        print(f"degenerate configuration: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    print(f"Z = {format_complex(z)}")
    print(f"modulus = {abs(z):.17g}, angle = {cmath.phase(z) + 0.0:.17g}")
    return EXIT_OK


# -- entry point -----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="chdom", description=__doc__)
    p.add_argument("--version", action="version", version=f"chdom {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="classify a 3x3 matrix as an isometry")
    c.add_argument("entries", nargs="*", help="9 complex literals, row-major")
    c.add_argument("--file", help="read the entries from a file")
    c.add_argument("--tol", type=float, default=1e-9, help="form-preservation tolerance")
    c.add_argument("--json", help="write a JSON report ('-' for stdout)")
    c.set_defaults(func=cmd_classify)

    d = sub.add_parser("dominate", help="check length/trace domination on closed curves")
    d.add_argument("--triangulation", required=True, help="file or builtin:S11 / builtin:S03")
    g = d.add_mutually_exclusive_group(required=True)
    g.add_argument("--invariants", help="edge invariant file")
    g.add_argument("--random-invariants", action="store_true")
    d.add_argument("--walks", help="walk file")
    d.add_argument("--random-walks", type=int, default=0, metavar="N")
    d.add_argument("--max-steps", type=int, default=12, help="longest random walk, in steps")
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--json", help="write the RunReport ('-' for stdout)")
    d.add_argument("--inject-failure", action="store_true", help=argparse.SUPPRESS)
    d.set_defaults(func=cmd_dominate)

    a = sub.add_parser("appendix", help="discriminator comparison on two-letter words")
    a.add_argument("--samples", type=int, default=10_000)
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--xmax", type=float, default=5.0)
    a.add_argument("--amax", type=float, default=math.pi / 2)
    a.add_argument("--csv", help="output path (default stdout)")
    a.add_argument("--tuple", action="append", metavar="x,y,a,b")
    a.set_defaults(func=cmd_appendix)

    z = sub.add_parser("zinv", help="Z-invariant of four boundary points")
    z.add_argument("points", nargs=4, help="inf, [zeta,t] or (a,b,c)")
    z.set_defaults(func=cmd_zinv)
    return p


def _protect_literals(argv: list) -> list:
    """Insert ``--`` so literals like ``-1.5+2i`` are not taken for options."""
    if not argv or argv[0] not in ("classify", "zinv") or "--" in argv:
        return argv
    for i, tok in enumerate(argv[1:], 1):
        if tok.startswith("-") and not tok.startswith("--") and re.match(r"-[\d.]", tok):
            return argv[:i] + ["--"] + argv[i:]
    return argv


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_protect_literals(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    args.argv = argv[1:]
    if getattr(args, "random_walks", 0) < 0 or getattr(args, "max_steps", 2) < 2:
        print("walk counts must be non-negative and --max-steps >= 2", file=sys.stderr)
        return EXIT_PARSE
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
