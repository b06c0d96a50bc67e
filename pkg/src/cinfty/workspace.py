"""Line-oriented workspace files: named rings, elements, morphisms, manifolds,
maps, groups and actions.

    ring S1 = gens 2 ; rels x0^2 + x1^2 - 1 ;
    elem f in S1 = x0 * x1 ;
    mor phi : S1 -> S1 = -x0 , -x1 ;
    manifold C = circle ;
    manifold L = ring LINE dim 1 ;
    map inc : C -> E2 = x0 , x1 ;
    group Z2 = table [[0,1],[1,0]] ;
    action A = group Z2 on S1 by [[[1,0],[0,1]],[[1,0],[0,-1]]] ;

Names are single-assignment and must be declared before use.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from . import geom
from .cring import RingMorphism, RingPresentation, make_ring
from .expr import SmoothExpr
from .parser import ParseError, parse
from .quotient import FiniteGroup, LinearAction, cyclic


class WorkspaceError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Decl:
    kind: str
    name: str
    value: Any
    text: str                # canonical echo
    line: int


@dataclass(frozen=True)
class ActionDecl:
    action: LinearAction
    ring_name: str
    group_name: str


_NAME = r"([A-Za-z_][A-Za-z_0-9]*)"
_PATTERNS = {
    "ring": re.compile(rf"ring\s+{_NAME}\s*=\s*gens\s+(\d+)\s*;\s*rels\b(.*);\s*$"),
    "elem": re.compile(rf"elem\s+{_NAME}\s+in\s+{_NAME}\s*=(.*);\s*$"),
    "mor": re.compile(rf"mor\s+{_NAME}\s*:\s*{_NAME}\s*->\s*{_NAME}\s*=(.*);\s*$"),
    "manifold": re.compile(rf"manifold\s+{_NAME}\s*=(.*);\s*$"),
    "map": re.compile(rf"map\s+{_NAME}\s*:\s*{_NAME}\s*->\s*{_NAME}\s*=(.*);\s*$"),
    "group": re.compile(rf"group\s+{_NAME}\s*=(.*);\s*$"),
    "action": re.compile(rf"action\s+{_NAME}\s*=\s*group\s+{_NAME}\s+on\s+{_NAME}\s+by\b(.*);\s*$"),
}


def _strip_comment(line: str) -> str:
    i = line.find("#")
    return line if i < 0 else line[:i]


def split_top(text: str, sep: str = ",") -> list[tuple[str, int]]:
    """Split on ``sep`` outside brackets; returns (piece, offset) pairs."""
    out, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif ch == sep and depth == 0:
            out.append((text[start:i], start))
            start = i + 1
    out.append((text[start:], start))
    return out


_NUM_TOKEN = re.compile(r"\s*(\[|\]|,|-?\d+(?:/\d+)?)")


def parse_nested(text: str) -> Any:
    """Nested bracket lists of integers or fractions ``p/q``."""
    pos = 0
    tokens = []
    text = text.strip()
    while pos < len(text):
        m = _NUM_TOKEN.match(text, pos)
        if m is None:
            raise ValueError(f"unexpected {text[pos:pos + 8]!r} in matrix literal")
        tokens.append(m.group(1))
        pos = m.end()
    it = iter(tokens)

    def value(tok):
        if tok == "[":
            items = []
            tok = next(it, None)
            if tok == "]":
                return items
            while True:
                items.append(value(tok))
                tok = next(it, None)
                if tok == "]":
                    return items
                if tok != ",":
                    raise ValueError("expected ',' or ']' in matrix literal")
                tok = next(it, None)
        if tok is None or tok in "],":
            raise ValueError("malformed matrix literal")
        return Fraction(tok)

    first = next(it, None)
    result = value(first)
    if next(it, None) is not None:
        raise ValueError("trailing tokens after matrix literal")
    return result


def _fmt_nested(v) -> str:
    if isinstance(v, (list, tuple)):
        return "[" + ",".join(_fmt_nested(x) for x in v) + "]"
    return str(Fraction(v))


class Workspace:
    def __init__(self):
        self.decls: dict[str, Decl] = {}

    # lookups
    def get(self, name: str, *kinds: str) -> Decl:
        d = self.decls.get(name)
        if d is None:
            raise KeyError(f"unknown name {name!r}")
        if kinds and d.kind not in kinds:
            raise KeyError(f"{name!r} is a {d.kind}, expected {' or '.join(kinds)}")
        return d

    def ring(self, name: str) -> RingPresentation:
        d = self.get(name, "ring", "manifold")
        return d.value.ring if d.kind == "manifold" else d.value

    def manifold(self, name: str) -> geom.ManifoldPresentation:
        return self.get(name, "manifold").value.manifold_presentation

    def echo(self) -> str:
        return "".join(d.text + "\n" for d in self.decls.values())


@dataclass(frozen=True)
class ManifoldDecl:
    manifold_presentation: geom.ManifoldPresentation
    fibre: Any = None        # geom.FibreProduct when built from two maps

    @property
    def ring(self) -> RingPresentation:
        return self.manifold_presentation.ring


def _expr(text: str, arity: int, line: int, col: int) -> SmoothExpr:
    try:
        return parse(text, arity)
    except ParseError as exc:
        prefix = text.encode("utf-8")[:exc.offset].decode("utf-8", errors="ignore")
        raise WorkspaceError(exc.message, line, col + len(prefix)) from None


def _expr_list(text: str, arity: int, line: int, col: int, allow_empty: bool) -> list[SmoothExpr]:
    if not text.strip():
        if allow_empty:
            return []
        raise WorkspaceError("expected at least one expression", line, col)
    return [_expr(piece, arity, line, col + off) for piece, off in split_top(text)]


_STDLIB_CALL = re.compile(rf"{_NAME}\s*(?:\((.*)\))?\s*$")


def load(text: str) -> Workspace:
    ws = Workspace()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        body = line.strip()
        keyword = body.split(None, 1)[0]
        pat = _PATTERNS.get(keyword)
        if pat is None:
            raise WorkspaceError(f"unknown declaration {keyword!r}", lineno, indent + 1)
        m = pat.match(body)
        if m is None:
            raise WorkspaceError(f"malformed {keyword} declaration", lineno, indent + 1)
        name = m.group(1)
        if name in ws.decls:
            raise WorkspaceError(f"name {name!r} is already declared on line "
                                 f"{ws.decls[name].line}", lineno, indent + m.start(1) + 1)
        try:
            decl = _DECLARE[keyword](ws, m, lineno, indent + 1)
        except KeyError as exc:
            raise WorkspaceError(exc.args[0], lineno, indent + 1) from None
        except WorkspaceError:
            raise
        except ValueError as exc:
            raise WorkspaceError(str(exc), lineno, indent + 1) from None
        ws.decls[name] = decl
    return ws


def _ref(ws: Workspace, m, group: int, *kinds, line: int, col: int) -> Decl:
    try:
        return ws.get(m.group(group), *kinds)
    except KeyError as exc:
        raise WorkspaceError(exc.args[0], line, col + m.start(group)) from None


def _decl_ring(ws, m, line, col):
    name, n = m.group(1), int(m.group(2))
    rels = _expr_list(m.group(3), n, line, col + m.start(3), allow_empty=True)
    R = make_ring(n, rels)
    text = f"ring {name} = {R.canonical()}"
    return Decl("ring", name, R, text, line)


def _decl_elem(ws, m, line, col):
    name = m.group(1)
    _ref(ws, m, 2, "ring", "manifold", line=line, col=col)
    R = ws.ring(m.group(2))
    e = _expr(m.group(3), R.arity, line, col + m.start(3))
    el = R.element(e)
    return Decl("elem", name, el, f"elem {name} in {m.group(2)} = {el.ambient.printed} ;", line)


def _decl_mor(ws, m, line, col):
    name = m.group(1)
    for g in (2, 3):
        _ref(ws, m, g, "ring", "manifold", line=line, col=col)
    A, B = ws.ring(m.group(2)), ws.ring(m.group(3))
    ims = _expr_list(m.group(4), B.arity, line, col + m.start(4), allow_empty=True)
    if len(ims) != A.arity:
        raise WorkspaceError(f"morphism needs {A.arity} images, got {len(ims)}", line, col + m.start(4))
    phi = RingMorphism(A, B, tuple(ims))
    body = " , ".join(e.printed for e in phi.image_exprs)
    return Decl("mor", name, phi, f"mor {name} : {m.group(2)} -> {m.group(3)} = {body} ;", line)


def _decl_manifold(ws, m, line, col):
    name = m.group(1)
    rhs = m.group(2).strip()
    rcol = col + m.start(2) + (len(m.group(2)) - len(m.group(2).lstrip()))
    rm = re.match(rf"ring\s+{_NAME}\s+dim\s+(\d+)\s*$", rhs)
    if rm:
        try:
            R = ws.ring(rm.group(1))
        except KeyError as exc:
            raise WorkspaceError(exc.args[0], line, rcol + rm.start(1)) from None
        M = geom.from_ring(R, int(rm.group(2)), name)
        text = f"manifold {name} = ring {rm.group(1)} dim {M.dim} ;"
        return Decl("manifold", name, ManifoldDecl(M), text, line)
    cm = _STDLIB_CALL.match(rhs)
    if cm is None:
        raise WorkspaceError("expected a manifold constructor", line, rcol)
    kind, args = cm.group(1), cm.group(2)
    pieces = split_top(args) if args is not None and args.strip() else []
    acol = rcol + (cm.start(2) if args is not None else 0)
    if kind == "fibre_product":
        if len(pieces) != 2:
            raise WorkspaceError("fibre_product takes two map names", line, acol)
        maps = []
        for piece, off in pieces:
            try:
                maps.append(ws.get(piece.strip(), "map").value)
            except KeyError as exc:
                raise WorkspaceError(exc.args[0], line, acol + off) from None
        fp = geom.fibre_product(maps[0], maps[1], name)
        text = f"manifold {name} = fibre_product({pieces[0][0].strip()}, {pieces[1][0].strip()}) ;"
        return Decl("manifold", name, ManifoldDecl(fp.manifold, fp), text, line)
    if kind == "open_subset":
        if len(pieces) != 2:
            raise WorkspaceError("open_subset takes a dimension and an expression", line, acol)
        n = _int(pieces[0][0], line, acol)
        f = _expr(pieces[1][0], n, line, acol + pieces[1][1])
        M = geom.open_subset(n, f)
        text = f"manifold {name} = open_subset({n}, {f.printed}) ;"
    else:
        params = [_int(p, line, acol + off) for p, off in pieces]
        try:
            M = geom.stdlib(kind, *params)
        except TypeError:
            raise WorkspaceError(f"wrong number of parameters for {kind}", line, acol) from None
        text = f"manifold {name} = {kind}" + (f"({', '.join(map(str, params))})" if args is not None else "") + " ;"
    M = geom.ManifoldPresentation(M.ring, M.dim, name)
    return Decl("manifold", name, ManifoldDecl(M), text, line)


def _int(text: str, line: int, col: int) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise WorkspaceError(f"expected an integer, got {text.strip()!r}", line, col) from None


def _decl_map(ws, m, line, col):
    name = m.group(1)
    src = _ref(ws, m, 2, "manifold", line=line, col=col).value.manifold_presentation
    tgt = _ref(ws, m, 3, "manifold", line=line, col=col).value.manifold_presentation
    comps = _expr_list(m.group(4), src.arity, line, col + m.start(4), allow_empty=True)
    if len(comps) != tgt.arity:
        raise WorkspaceError(f"map needs {tgt.arity} components, got {len(comps)}", line, col + m.start(4))
    h = geom.SmoothMap(src, tgt, tuple(comps))
    body = " , ".join(e.printed for e in h.components)
    return Decl("map", name, h, f"map {name} : {m.group(2)} -> {m.group(3)} = {body} ;", line)


def _decl_group(ws, m, line, col):
    name = m.group(1)
    rhs = m.group(2).strip()
    cm = re.match(r"cyclic\s*\(\s*(\d+)\s*\)$", rhs)
    if cm:
        G = cyclic(int(cm.group(1)))
        return Decl("group", name, G, f"group {name} = cyclic({G.order}) ;", line)
    tm = re.match(r"table\b(.*)$", rhs)
    if tm is None:
        raise WorkspaceError("expected 'table [[...]]' or 'cyclic(n)'", line, col + m.start(2))
    G = FiniteGroup(tuple(tuple(int(x) for x in row) for row in parse_nested(tm.group(1))), name)
    return Decl("group", name, G, f"group {name} = table {_fmt_nested(G.table)} ;", line)


def _decl_action(ws, m, line, col):
    name = m.group(1)
    G = _ref(ws, m, 2, "group", line=line, col=col).value
    _ref(ws, m, 3, "ring", "manifold", line=line, col=col)
    R = ws.ring(m.group(3))
    mats = parse_nested(m.group(4))
    A = LinearAction(G, R.arity, tuple(mats))
    text = f"action {name} = group {m.group(2)} on {m.group(3)} by {_fmt_nested(A.matrices)} ;"
    return Decl("action", name, ActionDecl(A, m.group(3), m.group(2)), text, line)


_DECLARE = {"ring": _decl_ring, "elem": _decl_elem, "mor": _decl_mor, "manifold": _decl_manifold,
            "map": _decl_map, "group": _decl_group, "action": _decl_action}
