"""Command-line entry point: ``medianspace <command> INPUT [options]``.

INPUT is a SpaceFile or PocSetFile path, a name looked up in the directory
named by ``MEDIANSPACE_FIXTURE_DIR``, or ``fixture:SPEC`` (e.g. ``fixture:grid:4``).
Point sets are ``;``-separated labels, since grid labels contain commas.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import analysis, duality, fileio, fixtures, halfspaces as hs, structure, verify
from .errors import InconsistentWeights, MedianSpaceError, NonMedian
from .rational import format_rational, parse_rational
from .report import Report, canonical_json, check, digest
from .space import MedianSpace, convex_hull, ensure_valid, gate_project

FIXTURE_DIR_ENV = "MEDIANSPACE_FIXTURE_DIR"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- inputs --------------------------------------------------------------------------


def _read_text(arg: str) -> str:
    path = Path(arg)
    if not path.is_file():
        base = os.environ.get(FIXTURE_DIR_ENV)
        candidates = [Path(base) / arg, Path(base) / f"{arg}.json"] if base else []
        path = next((c for c in candidates if c.is_file()), None)
        if path is None:
            raise UsageError(f"no such input: {arg}")
    return path.read_text(encoding="utf-8")


_loaded: dict = {}  # per-run memo, cleared by cli_run


def load_input(arg: str):
    """(object, canonical text) for a space or poc set input."""
    if arg not in _loaded:
        _loaded[arg] = _load_input(arg)
    return _loaded[arg]


def _load_input(arg: str):
    if arg.startswith("fixture:"):
        S = fixtures.parse_fixture(arg[len("fixture:"):])
        return S, fileio.serialize_space(S)
    text = _read_text(arg)
    kind = fileio.sniff(text)
    if kind == "space":
        S = fileio.parse_space(text, name=Path(arg).stem)
        return S, fileio.serialize_space(S)
    if kind == "pocset":
        P = fileio.parse_pocset(text)
        return P, fileio.serialize_pocset(P)
    raise UsageError(f"{arg} is a report, not a space or poc set")


def load_space(arg: str, validate: bool = True) -> tuple[MedianSpace, str]:
    obj, text = load_input(arg)
    if not isinstance(obj, MedianSpace):
        raise UsageError(f"{arg} is a poc set; this command needs a space")
    if validate:
        ensure_valid(obj)
    return obj, text


def _labels(S: MedianSpace, raw: str | None, what: str, default_all=False) -> list[str]:
    if raw is None:
        if default_all:
            return list(S.points)
        raise UsageError(f"--{what} is required")
    out = [p.strip() for p in raw.split(";") if p.strip()]
    unknown = [p for p in out if p not in S.index]
    if unknown:
        raise UsageError(f"unknown point(s) in --{what}: {', '.join(unknown)}")
    if not out:
        raise UsageError(f"--{what} is empty")
    return out


def _point(S: MedianSpace, raw: str | None, what: str) -> str:
    pts = _labels(S, raw, what)
    if len(pts) != 1:
        raise UsageError(f"--{what} takes a single point")
    return pts[0]


def _rational_arg(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _fmt_set(S: MedianSpace, members) -> str:
    return "{" + ", ".join(sorted(members, key=S.index.__getitem__)) + "}"


# -- commands ----------------------------------------------------------------------
# Each returns (report, text); text is what gets printed without --json.


def cmd_validate(args):
    S, _ = load_space(args.input, validate=False)
    rep = Report("validate")
    try:
        diag = ensure_valid(S)
        rep.add(check("unique medians", "|[a,b] ∩ [b,c] ∩ [a,c]| = 1", True,
                      form=diag.form, points=diag.points, triples=diag.triples_checked))
    except NonMedian as exc:
        rep.add(check("unique medians", "|[a,b] ∩ [b,c] ∩ [a,c]| = 1", False,
                      witness={"triple": exc.witness, "axiom": exc.axiom, "message": str(exc)}))
        return rep, rep.summary()
    try:
        walls = hs.enumerate_walls(S)
        rep.add(check("distance equals wall measure", "d(x,y) = μ(W(x,y))", True,
                      walls=len(walls), rank=hs.rank(S)))
    except (NonMedian, InconsistentWeights) as exc:
        rep.add(check("distance equals wall measure", "d(x,y) = μ(W(x,y))", False,
                      witness=str(exc)))
    return rep, rep.summary()


def cmd_walls(args):
    S, _ = load_space(args.input)
    walls = hs.enumerate_walls(S)
    rows = [{"index": w.index, "weight": w.weight,
             "sides": [sorted(S.labels(m), key=S.index.__getitem__) for m in w.sides]}
            for w in walls]
    rep = Report("walls")
    rep.add(check("walls enumerated", "d(x,y) = μ(W(x,y))", True, count=len(walls), walls=rows))
    text = "\n".join(
        f"w{w.index}  weight {format_rational(w.weight)}  "
        f"{_fmt_set(S, S.labels(w.sides[0]))} | {_fmt_set(S, S.labels(w.sides[1]))}"
        for w in walls
    )
    return rep, text


def cmd_rank(args):
    S, _ = load_space(args.input)
    n = hs.rank(S)
    rep = Report("rank")
    rep.add(check("rank", "max pairwise transverse family", True, rank=n))
    return rep, str(n)


def cmd_hull(args):
    S, _ = load_space(args.input)
    A = _labels(S, args.set, "set")
    H = convex_hull(S, A)
    rep = Report("hull")
    rep.add(check("convex hull", "Conv(A) = J^n(A)", True, size=len(H), members=list(H)))
    text = _fmt_set(S, H.members)
    if args.radius is not None:
        sub = structure.hull_neighborhood_check(S, H.members, args.radius)
        rep.extend(sub)
        text += "\n" + sub.summary()
    return rep, text


def cmd_project(args):
    S, _ = load_space(args.input)
    C = _labels(S, args.set, "set")
    x = _point(S, args.point, "point")
    g = gate_project(S, C, x)
    rep = Report("project")
    rep.add(check("gate projection", "π_C(x)", True, point=x, gate=g))
    return rep, g


def cmd_dualize(args):
    S, _ = load_space(args.input)
    base = _point(S, args.basepoint, "basepoint") if args.basepoint else None
    P = duality.pocset_of(S, base)
    rep = Report("dualize")
    rep.add(check("poc set of halfspaces", duality.ANCHOR_DUALITY, True,
                  walls=P.walls, pocset=fileio.pocset_to_dict(P)))
    return rep, fileio.serialize_pocset(P).rstrip("\n")


def cmd_realize(args):
    P, _ = load_input(args.input)
    if isinstance(P, MedianSpace):
        P = duality.pocset_of(P)
    S = duality.realize(P)
    rep = Report("realize")
    rep.add(check("space of ultrafilters", duality.ANCHOR_DUALITY, True,
                  points=S.n, space=S.to_dict()))
    return rep, fileio.serialize_space(S).rstrip("\n")


def cmd_roundtrip(args):
    S, _ = load_space(args.input)
    rep = duality.roundtrip_check(S)
    return rep, rep.summary()


def cmd_embed_check(args):
    S, _ = load_space(args.input)
    C1, C2 = _labels(S, args.c1, "c1"), _labels(S, args.c2, "c2")
    _, rep = structure.bridge(S, C1, C2)
    rep.command = "embed-check"
    rep.extend(structure.embed_check(S, C1, C2))
    return rep, rep.summary()


def cmd_decompose(args):
    S, _ = load_space(args.input)
    C1, C2 = _labels(S, args.c1, "c1"), _labels(S, args.c2, "c2")
    x = _point(S, args.x, "x")
    if args.y is not None:
        rep = structure.wall_decomposition_check(S, C1, C2, x, _point(S, args.y, "y"))
    else:
        rep = structure.interval_product_check(S, C1, C2, x)
    rep.command = "decompose"
    return rep, rep.summary()


def cmd_profile(args):
    S, _ = load_space(args.input)
    C = _labels(S, args.set, "set", default_all=True)
    eps_list = sorted(set(args.eps or [Fraction(1, 10)]))
    prof = analysis.compactness_profile(S, C, eps_list)
    rep = Report("profile")
    for eps, n in prof.entries:
        fam = prof.families[eps]
        rep.add(check(f"N({format_rational(eps)})", analysis.A_PROFILE, True, eps=eps, N=n,
                      family=[sorted(h.members, key=S.index.__getitem__) for h in fam]))
    text = "\n".join(f"N({format_rational(e)}) = {n}" for e, n in prof.entries)
    return rep, text


def cmd_cover(args):
    S, _ = load_space(args.input)
    C = _labels(S, args.set, "set", default_all=True)
    x0 = _point(S, args.x0, "x0")
    eps = args.eps[0] if args.eps else Fraction(0)
    k, ends = analysis.interval_cover_check(S, C, x0, eps)
    rep = analysis.cover_bound_check(S, C, x0, eps)
    rep.checks.insert(0, check("interval cover", analysis.A_COVER, True, k=k, endpoints=ends))
    return rep, f"k = {k}\nendpoints: {_fmt_set(S, ends)}\n{rep.summary()}"


def cmd_rigidity(args):
    S, _ = load_space(args.input)
    x0 = _point(S, args.x0, "x0")
    v = analysis.rigidity_detect(S, x0)
    numbers = {"verdict": v.verdict.value, "x0": x0}
    if v.triple is not None:
        numbers["triple"] = [sorted(h.members, key=S.index.__getitem__) for h in v.triple.halfspaces]
    else:
        numbers["lines"] = [sorted(m, key=S.index.__getitem__) for m in v.lines]
        numbers["defects"] = list(v.defects)
    rep = Report("rigidity")
    rep.add(check("verdict witness re-verifies", analysis.A_RIGID, v.verify(S), witness=numbers,
                  **numbers))
    return rep, f"{v.verdict.value}\n{rep.summary()}"


def cmd_group(args):
    S, _ = load_space(args.input)
    G = analysis.automorphism_group(S)
    rep = Report("group")
    rep.add(check("automorphism group", analysis.A_STAB, True, order=G.order))
    lines = [f"|Aut| = {G.order}"]
    if args.x0 is not None:
        x0 = _point(S, args.x0, "x0")
        lines.append(f"|Stab({x0})| = {G.stabilizer(x0).order}")
        rep.extend(analysis.stabilizer_wall_check(S, G, x0))
        rep.extend(analysis.orbit_report(S, G, x0))
        for x in S.points:
            orbit = analysis.stabilizer_orbit(S, G, x0, x)
            lines.append(f"orbit of {x}: {_fmt_set(S, orbit)}")
    return rep, "\n".join(lines + [rep.summary()])


def cmd_verify_all(args):
    only = None
    if args.only:
        try:
            only = {int(k) for k in args.only.split(",")}
        except ValueError:
            raise UsageError("--only takes comma-separated criterion numbers") from None
        if not only <= set(verify.CRITERIA):
            raise UsageError(f"criteria are numbered {min(verify.CRITERIA)}..{max(verify.CRITERIA)}")
    cfg = verify.VerifyConfig(seed=args.seed, refine=args.refine)
    rep = verify.verify_all(cfg, only)
    return rep, rep.summary()


COMMANDS = {
    "validate": cmd_validate,
    "walls": cmd_walls,
    "rank": cmd_rank,
    "hull": cmd_hull,
    "project": cmd_project,
    "dualize": cmd_dualize,
    "realize": cmd_realize,
    "roundtrip": cmd_roundtrip,
    "embed-check": cmd_embed_check,
    "decompose": cmd_decompose,
    "profile": cmd_profile,
    "cover": cmd_cover,
    "rigidity": cmd_rigidity,
    "group": cmd_group,
    "verify-all": cmd_verify_all,
}

# flags each command accepts beyond INPUT
_FLAGS = {
    "hull": ("set", "radius"),
    "project": ("set", "point"),
    "dualize": ("basepoint",),
    "embed-check": ("c1", "c2"),
    "decompose": ("c1", "c2", "x", "y"),
    "profile": ("set", "eps"),
    "cover": ("set", "x0", "eps"),
    "rigidity": ("x0",),
    "group": ("x0",),
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="medianspace", description="Finite median spaces: checks and analysis.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        if name == "verify-all":
            p.add_argument("--seed", type=int, default=0, help="seed for random spaces")
            p.add_argument("--refine", type=int, default=3, metavar="L",
                           help="eps-grids at spacing 1/2 .. 1/2^L")
            p.add_argument("--only", help="comma-separated criterion numbers")
        else:
            p.add_argument("input", help="space/poc set file, fixture name, or fixture:SPEC")
        flags = _FLAGS.get(name, ())
        for flag in ("set", "point", "basepoint", "c1", "c2", "x", "y", "x0"):
            if flag in flags:
                p.add_argument(f"--{flag}", help="';'-separated point labels")
        if "radius" in flags:
            p.add_argument("--radius", type=_rational_arg)
        if "eps" in flags:
            p.add_argument("--eps", type=_rational_arg, action="append", help="rational, repeatable")
        p.add_argument("--json", action="store_true", help="print the canonical JSON report")
        p.add_argument("-o", "--output", help="also write the JSON report here")
    return parser


def _flags_digest(args, input_text: str) -> str:
    flags = {k: (format_rational(v) if isinstance(v, Fraction) else
                 [format_rational(e) for e in v] if isinstance(v, list) else v)
             for k, v in sorted(vars(args).items())
             if k not in ("input", "json", "output", "command")}
    return digest(input_text + canonical_json({"command": args.command, "flags": flags}))


def cli_run(argv=None) -> tuple[Report | None, int, str]:
    """Parse and run; returns (report, exit code, stdout text). Never exits."""
    _loaded.clear()
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        return None, 2, f"error: {exc}"
    try:
        if args.command != "verify-all" and args.input.startswith("-"):
            raise UsageError(f"bad input {args.input!r}")
        rep, text = COMMANDS[args.command](args)
    except UsageError as exc:
        return None, 2, f"error: {exc}"
    except (NonMedian, InconsistentWeights) as exc:
        rep = Report(args.command)
        rep.add(check("input is a median space", "|[a,b] ∩ [b,c] ∩ [a,c]| = 1", False,
                      witness=str(exc)))
        return rep, 1, f"error: {exc}"
    except MedianSpaceError as exc:
        return None, 2, f"error: {exc}"
    input_text = "" if args.command == "verify-all" else load_input(args.input)[1]
    rep.inputs_digest = _flags_digest(args, input_text)
    out = fileio.serialize_report(rep).rstrip("\n") if args.json else text
    if args.output:
        Path(args.output).write_text(fileio.serialize_report(rep), encoding="utf-8")
    return rep, rep.exit_status, out


def main(argv=None) -> int:
    rep, code, text = cli_run(argv)
    stream = sys.stderr if text.startswith("error:") else sys.stdout
    if text:
        print(text, file=stream)
    return code


if __name__ == "__main__":
    sys.exit(main())
