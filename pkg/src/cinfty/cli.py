"""Command-line driver over workspace files.

Exit codes: 0 success or passing check, 1 failed check, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from . import geom
from .cmodule import cotangent, sequence_check
from .cring import localize, pushout
from .linalg import RANK_ATOL, RANK_RTOL
from .points import ACCEPT_TOL, CLUSTER_RADIUS, NEWTON_TOL, SearchParams, is_r_point, \
    morphism_check, spread
from .quotient import (coarse_moduli, equivariant_cotangent, equivariant_module_check,
                       groupoid_check, groupoid_from_action, invariant_generators,
                       orbit_space, quotient_stack, stabilizer)
from .workspace import WorkspaceError, load

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def fmt(v: float) -> str:
    """Fixed float format; values below 1e-12 in magnitude print as 0."""
    v = float(v)
    if v != v:
        return "nan"
    if abs(v) < 1e-12:
        return "0"
    return f"{v:.12g}"


def fmt_point(p: Sequence[float]) -> str:
    return "(" + ", ".join(fmt(v) for v in p) + ")"


def _box(text: Optional[str], arity: int, half_width: float):
    if text is None:
        return tuple((-half_width, half_width) for _ in range(arity))
    parts = [p for p in text.split(",") if p]
    try:
        box = tuple((float(a), float(b)) for a, b in (p.split(":") for p in parts))
    except ValueError:
        raise UsageError(f"bad --box {text!r}; expected lo:hi,lo:hi,...") from None
    if len(box) != arity:
        raise UsageError(f"--box has {len(box)} intervals but arity is {arity}")
    return box


def _search(args, arity: int) -> SearchParams:
    return SearchParams(step=args.step, newton_iters=args.iters, newton_tol=args.tol,
                        cluster_radius=args.radius, seed=args.seed,
                        box=_box(args.box, arity, args.half_width), max_samples=args.max_samples)


def _header(out, args, extra: str = ""):
    out.append(f"# cinfty {args.command}"
               f"{' ' + args.sub if getattr(args, 'sub', None) else ''}"
               f" | accept_tol={ACCEPT_TOL:g} newton_tol={args.tol:g} rank_rtol={RANK_RTOL:g}"
               f" rank_atol={RANK_ATOL:g} cluster={args.radius:g} seed={args.seed}{extra}")


def _lookup(ws, name, *kinds):
    try:
        return ws.get(name, *kinds)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None


def _ring(ws, name):
    _lookup(ws, name, "ring", "manifold")
    return ws.ring(name)


# --- commands -------------------------------------------------------------------

def cmd_parse(ws, args, out):
    # no header: the echo itself must stay a valid, idempotent workspace
    out.extend(d.text for d in ws.decls.values())
    return EXIT_OK


def cmd_pushout(ws, args, out):
    phi = _lookup(ws, args.phi, "mor").value
    psi = _lookup(ws, args.psi, "mor").value
    if phi.source != psi.source:
        raise UsageError("morphisms must share their source ring")
    po = pushout(phi, psi)
    _header(out, args)
    out.append(f"ring = {po.ring.canonical()}")
    out.append(f"left = {po.left.canonical()}")
    out.append(f"right = {po.right.canonical()}")
    return EXIT_OK


def cmd_localize(ws, args, out):
    R = _ring(ws, args.ring)
    d = ws.decls.get(args.element)
    el = d.value if d is not None and d.kind == "elem" else None
    if el is None:
        try:
            el = R.element(args.element)
        except ValueError as exc:
            raise UsageError(f"unknown element {args.element!r}: {exc}") from None
    if el.owner != R:
        raise UsageError("element does not belong to the ring")
    L, inc = localize(R, el)
    _header(out, args)
    out.append(f"ring = {L.canonical()}")
    out.append(f"inclusion = {inc.canonical()}")
    return EXIT_OK


def cmd_cotangent(ws, args, out):
    R = _ring(ws, args.ring)
    _header(out, args)
    out.append(cotangent(R).canonical())
    return EXIT_OK


def cmd_points(ws, args, out):
    R = _ring(ws, args.name)
    pts = _search(args, R.arity).search(R)
    _header(out, args, f" step={args.step:g} iters={args.iters}")
    out.append(f"{len(pts)} points")
    for p in pts:
        out.append(f"{fmt_point(p.coordinates)} residual {fmt(p.residual)}")
    return EXIT_OK


def cmd_fibre_product(ws, args, out):
    g = _lookup(ws, args.g, "map").value
    h = _lookup(ws, args.h, "map").value
    if g.target != h.target:
        raise UsageError("maps must have the same target")
    fp = geom.fibre_product(g, h)
    W = fp.manifold
    pts = _search(args, W.arity).search(W.ring)
    _header(out, args, f" step={args.step:g} iters={args.iters}")
    out.append(f"ring = {W.ring.canonical()}")
    out.append(f"expected dim {W.dim}")
    out.append(f"{len(pts)} points")
    for p in pts:
        out.append(fmt_point(p.coordinates))
    return EXIT_OK


def _desc(ws, args, name):
    a = _lookup(ws, name, "action").value
    R = ws.ring(a.ring_name)
    return quotient_stack(R, a.action, _search(args, R.arity), args.points)


def _parse_at(text: str, arity: int):
    try:
        x = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise UsageError(f"bad --at {text!r}") from None
    if len(x) != arity:
        raise UsageError(f"--at needs {arity} coordinates")
    return x


def cmd_quotient(ws, args, out):
    desc = _desc(ws, args, args.action)
    R = desc.ring
    _header(out, args)
    out.append(f"group order {desc.group.order}, status {desc.status.verdict}"
               f" (max residual {fmt(desc.status.max_residual)} at {desc.status.checked} points)")
    sub = args.sub
    if sub == "stabilizer":
        if args.at is None:
            raise UsageError("stabilizer needs --at")
        x = _parse_at(args.at, R.arity)
        if is_r_point(R, x) is None:
            raise UsageError(f"{fmt_point(x)} is not an R-point of the ring")
        H = stabilizer(desc, x, args.radius)
        out.append(f"stabilizer order {len(H)}")
        out.append("elements " + " ".join(map(str, H)))
        return EXIT_OK
    if sub == "invariants":
        gens = invariant_generators(desc.action, args.bound)
        out.append(f"{len(gens)} generators")
        out.extend(g.printed for g in gens)
        return EXIT_OK
    if desc.status.verdict == "fail":
        out.append("relations are not invariant")
        return EXIT_FAIL
    if sub == "orbits":
        pts = spread(_search(args, R.arity).search(R), args.points)
        orbits = orbit_space(desc, pts, args.radius)
        out.append(f"{len(orbits)} orbits from {len(pts)} points")
        for o in orbits:
            out.append(" ".join(fmt_point(p) for p in o))
        return EXIT_OK
    if sub == "coarse":
        cm = coarse_moduli(desc, args.bound)
        out.append(f"ring = {cm.ring.canonical()}")
        for i, p in enumerate(cm.generators):
            out.append(f"p{i} = {p.printed}")
        for r in cm.annotations:
            out.append(f"annotation: not rewritten {r.printed}")
        return EXIT_OK
    # groupoid
    pts = spread(_search(args, R.arity).search(R), args.points)
    rep = groupoid_check(groupoid_from_action(desc), pts, args.check_tol)
    out.append(f"checked {rep.checked} points, tol {fmt(rep.tol)}")
    for k, v in rep.residuals.items():
        out.append(f"{k} residual {fmt(v)}")
    out.append("GROUPOID OK" if rep.passed else "GROUPOID FAILED")
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_check(ws, args, out):
    sub = args.sub
    if sub == "morphism":
        phi = _lookup(ws, args.name, "mor").value
        rep = morphism_check(phi, args.points, _search(args, phi.target.arity), args.check_tol)
        _header(out, args)
        out.append(f"{rep.verdict.upper()} at {rep.checked} points,"
                   f" max residual {fmt(rep.max_residual)}, tol {fmt(rep.tol)}")
        if rep.witness is not None:
            out.append(f"witness {fmt_point(rep.witness)}")
        return EXIT_OK if rep.passed else EXIT_FAIL
    if sub == "pushout-cotangent":
        d = _lookup(ws, args.name, "manifold")
        fp = d.value.fibre
        if fp is None:
            raise UsageError(f"{args.name!r} is not declared as a fibre_product")
        W = fp.manifold
        pts = spread(_search(args, W.arity).search(W.ring), args.points)
        first, second = geom.cotangent_sequence(fp)
        full = not args.right_exact_only
        reps = sequence_check([first, second], pts, args.check_tol, left_zero=full, right_zero=full)
        _header(out, args, f" complex_tol={args.check_tol:g}"
                           f" sequence={'0->A->B->C->0' if full else 'A->B->C->0'}")
        bad = 0
        for r in reps:
            ok = r.exact
            bad += not ok
            out.append(f"{fmt_point(r.point)} {'exact' if ok else 'NOT exact'}"
                       f" dims {r.fiber_dims} ranks {r.map_ranks}"
                       f" residual {fmt(r.complex_residual)}")
        n = len(reps)
        if n == 0:
            out.append("INCONCLUSIVE: no points found")
            return EXIT_FAIL
        if bad:
            out.append(f"NOT EXACT at {bad}/{n} points")
            return EXIT_FAIL
        out.append(f"EXACT at {n}/{n} points")
        return EXIT_OK
    # equivariant
    desc = _desc(ws, args, args.name)
    E = equivariant_cotangent(desc)
    pts = spread(_search(args, desc.ring.arity).search(desc.ring), args.points)
    rep = equivariant_module_check(E, pts, args.check_tol)
    _header(out, args)
    out.append(f"cocycle max residual {fmt(rep.max_residual)} at {rep.checked} points,"
               f" tol {fmt(rep.tol)}")
    out.append("COCYCLE OK" if rep.passed else "COCYCLE FAILED")
    return EXIT_OK if rep.passed else EXIT_FAIL


# --- argument parsing -------------------------------------------------------------

def _search_options(p: argparse.ArgumentParser, points: Optional[int] = None):
    p.add_argument("--box", help="search box lo:hi,lo:hi,... (default [-2,2] per axis)")
    p.add_argument("--half-width", type=float, default=2.0)
    p.add_argument("--step", type=float, default=0.5, help="grid step")
    p.add_argument("--iters", type=int, default=60, help="Gauss-Newton iterations")
    p.add_argument("--tol", type=float, default=NEWTON_TOL, help="Newton residual tolerance")
    p.add_argument("--radius", type=float, default=CLUSTER_RADIUS, help="clustering radius")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-samples", type=int, default=None)
    if points is not None:
        p.add_argument("--points", type=int, default=points or None,
                       help="maximum sampled points" + ("" if points else " (default: all found)"))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cinfty", description=__doc__.splitlines()[0])
    ap.add_argument("-w", "--workspace", help="workspace file (default: FILE argument of parse)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="canonical echo of a workspace")
    p.add_argument("file", nargs="?")
    _search_options(p)

    p = sub.add_parser("pushout", help="pushout of two morphisms with a common source")
    p.add_argument("phi")
    p.add_argument("psi")
    _search_options(p)

    p = sub.add_parser("localize", help="localize a ring at an element")
    p.add_argument("ring")
    p.add_argument("element", help="elem name or expression")
    _search_options(p)

    p = sub.add_parser("cotangent", help="Jacobian presentation of the cotangent module")
    p.add_argument("ring")
    _search_options(p)

    p = sub.add_parser("points", help="R-points of a ring or manifold")
    p.add_argument("name")
    _search_options(p)

    p = sub.add_parser("fibre-product", help="fibre product of two maps")
    p.add_argument("g")
    p.add_argument("h")
    _search_options(p)

    p = sub.add_parser("quotient", help="quotient-stack data of an action")
    p.add_argument("sub", choices=["stabilizer", "orbits", "invariants", "coarse", "groupoid"])
    p.add_argument("action")
    p.add_argument("--at", help="comma separated point for stabilizer")
    p.add_argument("--bound", type=int, default=None, help="invariant degree bound")
    p.add_argument("--check-tol", type=float, default=1e-12)
    _search_options(p, points=0)

    p = sub.add_parser("check", help="sampled checks")
    p.add_argument("sub", choices=["morphism", "pushout-cotangent", "equivariant"])
    p.add_argument("name", help="morphism, fibre-product manifold or action name")
    p.add_argument("--check-tol", type=float, default=None)
    p.add_argument("--right-exact-only", action="store_true",
                   help="drop the leading 0 -> from the cotangent sequence")
    _search_options(p, points=20)
    return ap


_CHECK_TOLS = {"morphism": ACCEPT_TOL, "pushout-cotangent": 1e-8, "equivariant": 1e-10}


def _glue_negative_values(argv: Sequence[str]) -> list[str]:
    """Let ``--box -2:2,...`` and ``--at -1,0`` through argparse."""
    out = []
    it = iter(argv)
    for a in it:
        if a in ("--box", "--at"):
            v = next(it, None)
            out.append(a if v is None else f"{a}={v}")
        else:
            out.append(a)
    return out


_COMMANDS = {"parse": cmd_parse, "pushout": cmd_pushout, "localize": cmd_localize,
             "cotangent": cmd_cotangent, "points": cmd_points,
             "fibre-product": cmd_fibre_product, "quotient": cmd_quotient, "check": cmd_check}


def run(argv: Sequence[str]) -> tuple[int, str, str]:
    """Run the CLI; returns (exit code, stdout text, stderr text)."""
    ap = build_parser()
    try:
        args = ap.parse_args(_glue_negative_values(argv))
    except SystemExit as exc:
        return (EXIT_USAGE if exc.code else EXIT_OK), "", ""
    if args.command == "check" and args.check_tol is None:
        args.check_tol = _CHECK_TOLS[args.sub]
    path = args.workspace or (getattr(args, "file", None) if args.command == "parse" else None)
    if path is None:
        return EXIT_USAGE, "", "error: no workspace given (use -w FILE)\n"
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        return EXIT_USAGE, "", f"error: cannot read {path}: {exc.strerror}\n"
    try:
        ws = load(text)
    except WorkspaceError as exc:
        return EXIT_USAGE, "", f"{path}:{exc.line}:{exc.column}: error: {exc.message}\n"
    out: list[str] = []
    try:
        code = _COMMANDS[args.command](ws, args, out)
    except UsageError as exc:
        return EXIT_USAGE, "", f"error: {exc}\n"
    return code, "".join(line + "\n" for line in out), ""


def main(argv: Optional[Sequence[str]] = None) -> int:
    code, stdout, stderr = run(sys.argv[1:] if argv is None else argv)
    sys.stdout.write(stdout)
    sys.stderr.write(stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
