"""Text format for workspaces of named entities, with a canonical printer.

The format is line-oriented; `#` starts a comment and `;` separates
statements inside `{ ... }` blocks.  Identities are implicit everywhere:
declaring an object `x` creates `id_x`, and composition entries involving an
identity are synthesized.  All composites of non-identity pairs must be
declared, which keeps parsing and law-checking decoupled.

    category C { objects: a b ; arrows: f: a -> b ; compose: g.f = h ; }
    category P = product(C, D)          # also: discrete(n) terminal()
                                        # walking_arrow() walking_iso() chain(n)
                                        # poset(a b : a<b) delooping(e a : a.a=e)
                                        # opposite(C) slice(C, c) coslice(C, c)
    functor T : C -> D { ob: a |-> x ; arr: f |-> g ; }
    functor I = identity(C)             # also: compose(G, H), constant(C, D, x)
    nattrans n : T => S { at a = m ; }
    diagram F on A { at a = C ; at f = T ; }
    diagram F on A = constant(B)        # also: representable(C, c) with A = opposite(C)
    dmor al : F => G { at a = T ; }
    cleavage cl for P { lift (E, f) |-> e ; }
    opfib phi { over: F ; total: G ; component a = (p_a, cl_a) ; }
    cocone s for F { vertex: U ; leg a = t_a ; cell f = n_f ; }

Entities must be declared before they are referenced.  Parsing validates
every entity with its module's validator; diagnostics carry file, line,
column and an error class (lexical, syntax, reference, semantic).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable

from . import build
from .fincat import (
    CatDiagram,
    DiagramMor,
    FinCat,
    FunctorData,
    NatTransData,
    compose_functors,
    id_name,
    identity_functor,
    identity_nat_trans,
    make_category,
    validate_diagram,
    validate_diagram_mor,
    validate_functor,
    validate_nat_trans,
)
from .groth import LaxCocone, validate_lax_cocone
from .indexed import DiagramOpfib, diagram_opfib
from .opfib import Cleavage, cleaved_opfib
from .report import ValidationError

NAME_RE = re.compile(r"^[^\s;:.={}#|]+$")
RESERVED_MEMBERS = {"objects", "arrows", "compose", "ob", "arr"}
KINDS = ("category", "functor", "nattrans", "diagram", "dmor", "cleavage", "opfib", "cocone")


@dataclass(frozen=True)
class Diagnostic:
    file: str
    line: int
    col: int
    kind: str  # lexical | syntax | reference | semantic
    message: str

    def describe(self) -> str:
        return f"{self.file}:{self.line}:{self.col}: {self.kind}: {self.message}"


class WorkspaceParseError(Exception):
    def __init__(self, diagnostics: list[Diagnostic]):
        super().__init__("\n".join(d.describe() for d in diagnostics))
        self.diagnostics = diagnostics

    def only_semantic(self) -> bool:
        return all(d.kind == "semantic" for d in self.diagnostics)


@dataclass
class Entity:
    kind: str
    name: str
    refs: dict
    value: object


@dataclass
class Workspace:
    entities: dict[tuple[str, str], Entity] = field(default_factory=dict)

    def add(self, entity: Entity) -> None:
        key = (entity.kind, entity.name)
        if key in self.entities:
            raise KeyError(f"duplicate {entity.kind} {entity.name}")
        self.entities[key] = entity

    def has(self, kind: str, name: str) -> bool:
        return (kind, name) in self.entities

    def get(self, kind: str, name: str):
        return self.entities[(kind, name)].value

    def names(self, kind: str) -> list[str]:
        return sorted(n for k, n in self.entities if k == kind)

    def of_kind(self, kind: str) -> list[Entity]:
        return [self.entities[(k, n)] for k, n in sorted(self.entities) if k == kind]

    def kind_of(self, name: str) -> list[str]:
        return [k for k, n in self.entities if n == name]


def split_top(s: str, sep: str = ",") -> list[str]:
    """Split on separators not nested inside parentheses or brackets."""
    parts, depth, cur = [], 0, []
    for ch in s:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts]


def _valid_name(tok: str) -> bool:
    return bool(NAME_RE.match(tok)) and "->" not in tok and tok not in RESERVED_MEMBERS


# ---------------------------------------------------------------------------
# parsing


@dataclass
class _Stmt:
    text: str
    line: int
    col: int


class _Parser:
    def __init__(self, text: str, filename: str):
        self.filename = filename
        self.diags: list[Diagnostic] = []
        self.ws = Workspace()
        # strip comments but keep line structure for positions
        self.lines = [ln.split("#", 1)[0] for ln in text.splitlines()]

    # -- diagnostics --------------------------------------------------------

    def err(self, kind: str, line: int, col: int, message: str) -> None:
        self.diags.append(Diagnostic(self.filename, line, col, kind, message))

    # -- statement stream ---------------------------------------------------

    def _stmts(self, body: list[tuple[int, str]]) -> list[_Stmt]:
        out = []
        for line_no, text in body:
            col = 1
            for piece in text.split(";"):
                stripped = piece.strip()
                if stripped:
                    out.append(_Stmt(stripped, line_no, col + piece.index(stripped[0])))
                col += len(piece) + 1
        return out

    def parse(self) -> Workspace:
        i = 0
        n = len(self.lines)
        while i < n:
            line = self.lines[i]
            stripped = line.strip()
            if not stripped:
                i += 1
                continue
            head = stripped.split(None, 1)[0]
            if head not in KINDS:
                self.err("syntax", i + 1, line.index(head) + 1, f"expected an entity keyword, got {head!r}")
                i += 1
                continue
            if "{" in stripped:
                header = stripped[: stripped.index("{")].strip()
                rest = stripped[stripped.index("{") + 1 :]
                body: list[tuple[int, str]] = []
                closed = False
                if "}" in rest:
                    body.append((i + 1, rest[: rest.index("}")]))
                    closed = True
                else:
                    body.append((i + 1, rest))
                j = i + 1
                while not closed and j < n:
                    ln = self.lines[j]
                    if "}" in ln:
                        body.append((j + 1, ln[: ln.index("}")]))
                        closed = True
                    else:
                        body.append((j + 1, ln))
                    j += 1
                if not closed:
                    self.err("syntax", i + 1, 1, f"unterminated block for {header!r}")
                    return self._finish()
                self._entity(header, self._stmts(body), i + 1)
                i = j if "}" not in stripped else i + 1
            elif "=" in stripped:
                header, expr = stripped.split("=", 1)
                self._builder(header.strip(), expr.strip(), i + 1)
                i += 1
            else:
                self.err("syntax", i + 1, 1, f"expected '{{' or '=' in declaration {stripped!r}")
                i += 1
        return self._finish()

    def _finish(self) -> Workspace:
        if self.diags:
            raise WorkspaceParseError(self.diags)
        return self.ws

    # -- helpers ------------------------------------------------------------

    def _declare(self, kind: str, name: str, refs: dict, value, line: int) -> None:
        if not _valid_name(name):
            self.err("lexical", line, 1, f"invalid {kind} name {name!r}")
            return
        if self.ws.has(kind, name):
            self.err("reference", line, 1, f"duplicate {kind} name {name!r}")
            return
        self.ws.add(Entity(kind, name, refs, value))

    def _lookup(self, kind: str, name: str, stmt_line: int, stmt_col: int):
        if not self.ws.has(kind, name):
            self.err("reference", stmt_line, stmt_col, f"unknown {kind} {name!r}")
            return None
        return self.ws.get(kind, name)

    def _check_member(self, tok: str, line: int, col: int, what: str) -> bool:
        if not _valid_name(tok) or tok.startswith("id_") and what in ("arrow",):
            self.err("lexical", line, col, f"invalid {what} name {tok!r}")
            return False
        return True

    # -- entities -----------------------------------------------------------

    def _entity(self, header: str, stmts: list[_Stmt], line: int) -> None:
        words = header.split()
        kind = words[0]
        try:
            if kind == "category":
                self._category(words, stmts, line)
            elif kind == "functor":
                self._functor(header, stmts, line)
            elif kind == "nattrans":
                self._nattrans(header, stmts, line)
            elif kind == "diagram":
                self._diagram(words, stmts, line)
            elif kind == "dmor":
                self._dmor(header, stmts, line)
            elif kind == "cleavage":
                self._cleavage(words, stmts, line)
            elif kind == "opfib":
                self._opfib(words, stmts, line)
            elif kind == "cocone":
                self._cocone(words, stmts, line)
        except ValidationError as err:
            first = err.report.first_failure()
            detail = f"{first.name}: {first.counterexample}" if first else err.report.title
            self.err("semantic", line, 1, f"{header!r}: {detail}")

    def _category(self, words: list[str], stmts: list[_Stmt], line: int) -> None:
        if len(words) != 2:
            self.err("syntax", line, 1, "expected: category NAME { ... }")
            return
        name = words[1]
        objects: list[str] = []
        arrows: list[tuple[str, str, str]] = []
        comp: dict[tuple[str, str], str] = {}
        section = None
        ok = True
        for st in stmts:
            text = st.text
            for label in ("objects", "arrows", "compose"):
                if text == label + ":" or text.startswith(label + ":"):
                    section = label
                    text = text[len(label) + 1 :].strip()
                    break
            if not text:
                continue
            if section == "objects":
                for tok in text.split():
                    if self._check_member(tok, st.line, st.col, "object"):
                        objects.append(tok)
                    else:
                        ok = False
            elif section == "arrows":
                m = re.match(r"^(\S+?)\s*:\s*(\S+)\s*->\s*(\S+)$", text)
                if not m:
                    self.err("syntax", st.line, st.col, f"expected 'name: src -> tgt', got {text!r}")
                    ok = False
                    continue
                nm, s, t = m.groups()
                if self._check_member(nm, st.line, st.col, "arrow"):
                    arrows.append((nm, s, t))
                else:
                    ok = False
            elif section == "compose":
                m = re.match(r"^(\S+)\.(\S+)\s*=\s*(\S+)$", text)
                if not m:
                    self.err("syntax", st.line, st.col, f"expected 'g.f = h', got {text!r}")
                    ok = False
                    continue
                g, f, h = m.groups()
                comp[(g, f)] = h
            else:
                self.err("syntax", st.line, st.col, f"statement outside a section: {text!r}")
                ok = False
        if not ok:
            return
        declared = {a for a, _, _ in arrows} | {id_name(x) for x in objects}
        for (g, f), h in comp.items():
            for tok in (g, f, h):
                if tok not in declared:
                    self.err("reference", line, 1, f"compose entry uses undeclared morphism {tok!r}")
                    return
        self._declare("category", name, {}, make_category(name, objects, arrows, comp), line)

    def _builder(self, header: str, expr: str, line: int) -> None:
        words = header.split()
        kind = words[0]
        m = re.match(r"^(\w+)\s*\((.*)\)$", expr, re.DOTALL)
        if not m:
            self.err("syntax", line, 1, f"expected BUILDER(...), got {expr!r}")
            return
        builder, argtext = m.group(1), m.group(2).strip()
        try:
            if kind == "category":
                if len(words) != 2:
                    self.err("syntax", line, 1, "expected: category NAME = builder(...)")
                    return
                value = self._category_builder(words[1], builder, argtext, line)
                if value is not None:
                    self._declare("category", words[1], {}, value, line)
            elif kind == "functor":
                if len(words) != 2:
                    self.err("syntax", line, 1, "expected: functor NAME = builder(...)")
                    return
                self._functor_builder(words[1], builder, argtext, line)
            elif kind == "diagram":
                if len(words) != 4 or words[2] != "on":
                    self.err("syntax", line, 1, "expected: diagram NAME on BASE = builder(...)")
                    return
                self._diagram_builder(words[1], words[3], builder, argtext, line)
            else:
                self.err("syntax", line, 1, f"{kind} has no builder shorthand")
        except ValidationError as err:
            first = err.report.first_failure()
            detail = f"{first.name}: {first.counterexample}" if first else err.report.title
            self.err("semantic", line, 1, f"{header!r}: {detail}")

    def _category_builder(self, name: str, builder: str, argtext: str, line: int) -> FinCat | None:
        # translate the surface syntax into build_category arguments
        args: list = split_top(argtext) if argtext else []
        if builder in ("discrete", "chain"):
            if len(args) != 1 or not args[0].isdigit():
                self.err("syntax", line, 1, f"{builder}(n) needs one integer argument")
                return None
        elif builder in ("terminal", "walking_arrow", "walking_iso"):
            if argtext:
                self.err("syntax", line, 1, f"{builder}() takes no arguments")
                return None
            args = []
        elif builder == "poset":
            elems_text, _, rel_text = argtext.partition(":")
            rel = []
            for item in rel_text.split():
                if "<" not in item:
                    self.err("syntax", line, 1, f"poset relation item {item!r} must be x<y")
                    return None
                x, y = item.split("<", 1)
                rel.append((x, y))
            args = [elems_text.split(), rel]
        elif builder == "delooping":
            elems_text, _, prod_text = argtext.partition(":")
            table = {}
            for item in prod_text.split():
                m = re.match(r"^(\S+?)\.(\S+?)=(\S+)$", item)
                if not m:
                    self.err("syntax", line, 1, f"delooping product item {item!r} must be x.y=z")
                    return None
                table[(m.group(1), m.group(2))] = m.group(3)
            args = [elems_text.split(), table]
        elif builder not in ("product", "opposite", "slice", "coslice"):
            self.err("syntax", line, 1, f"unknown category builder {builder!r}")
            return None
        named = {n: self.ws.get("category", n) for k, n in self.ws.entities if k == "category"}
        try:
            return build.build_category(builder, args, named, name)
        except KeyError as err:
            self.err("reference", line, 1, f"unknown category {err.args[0]!r}")
            return None

    def _functor_builder(self, name: str, builder: str, argtext: str, line: int) -> None:
        args = split_top(argtext) if argtext else []
        if builder == "identity":
            c = self._lookup("category", args[0], line, 1) if args else None
            if c is None:
                return
            t = identity_functor(c)
            refs = {"dom": args[0], "cod": args[0]}
        elif builder == "compose":
            if len(args) != 2:
                self.err("syntax", line, 1, "compose(G, H) needs two functor arguments")
                return
            g = self._lookup("functor", args[0], line, 1)
            h = self._lookup("functor", args[1], line, 1)
            if g is None or h is None:
                return
            t = compose_functors(g, h, name=name)
            ge = self.ws.entities[("functor", args[0])]
            he = self.ws.entities[("functor", args[1])]
            refs = {"dom": he.refs["dom"], "cod": ge.refs["cod"]}
        elif builder == "constant":
            if len(args) != 3:
                self.err("syntax", line, 1, "constant(C, D, x) needs category, category, object")
                return
            c = self._lookup("category", args[0], line, 1)
            d = self._lookup("category", args[1], line, 1)
            if c is None or d is None:
                return
            x = args[2]
            t = validate_functor(
                c, d,
                {y: x for y in c.objects},
                {m: d.identity[x] for m in c.mors},
                name=name,
            )
            refs = {"dom": args[0], "cod": args[1]}
        else:
            self.err("syntax", line, 1, f"unknown functor builder {builder!r}")
            return
        self._declare(
            "functor",
            name,
            refs,
            FunctorData(name, t.dom, t.cod, t.ob_map, t.mor_map),
            line,
        )

    def _diagram_builder(self, name: str, base_name: str, builder: str, argtext: str, line: int) -> None:
        base = self._lookup("category", base_name, line, 1)
        if base is None:
            return
        args = split_top(argtext) if argtext else []
        if builder == "constant":
            fibre = self._lookup("category", args[0], line, 1) if args else None
            if fibre is None:
                return
            value = build.constant_diagram(base, fibre, name=name)
            ident = f"__id_{args[0]}"
            if not self.ws.has("functor", ident):
                self.ws.add(Entity("functor", ident, {"dom": args[0], "cod": args[0]},
                                   identity_functor(fibre)))
            refs = {
                "base": base_name,
                "at_ob": {x: args[0] for x in base.objects},
                "at_mor": {f: ident for f in base.non_identity_mors()},
            }
        elif builder == "representable":
            if len(args) != 2:
                self.err("syntax", line, 1, "representable(C, c) needs a category and an object")
                return
            c = self._lookup("category", args[0], line, 1)
            if c is None:
                return
            fresh_base, diagram = build.representable_diagram(c, args[1], name=name)
            if not fresh_base.tables_equal(base):
                self.err("semantic", line, 1,
                         f"base {base_name!r} is not opposite({args[0]})")
                return
            value = validate_diagram(base, dict(diagram.at_ob), dict(diagram.at_mor), name=name)
            at_ob_refs = {}
            for x in base.objects:
                sub = f"__{name}_at_{x}"
                self.ws.add(Entity("category", sub, {}, value.at_ob[x]))
                at_ob_refs[x] = sub
            at_mor_refs = {}
            for f in base.non_identity_mors():
                sub = f"__{name}_arr_{f}"
                self.ws.add(Entity("functor", sub,
                                   {"dom": at_ob_refs[base.src[f]], "cod": at_ob_refs[base.tgt[f]]},
                                   value.at_mor[f]))
                at_mor_refs[f] = sub
            refs = {"base": base_name, "at_ob": at_ob_refs, "at_mor": at_mor_refs}
        else:
            self.err("syntax", line, 1, f"unknown diagram builder {builder!r}")
            return
        self._declare("diagram", name, refs, value, line)

    def _functor(self, header: str, stmts: list[_Stmt], line: int) -> None:
        m = re.match(r"^functor\s+(\S+)\s*:\s*(\S+)\s*->\s*(\S+)$", header)
        if not m:
            self.err("syntax", line, 1, "expected: functor NAME : C -> D { ... }")
            return
        name, dom_name, cod_name = m.groups()
        dom = self._lookup("category", dom_name, line, 1)
        cod = self._lookup("category", cod_name, line, 1)
        if dom is None or cod is None:
            return
        ob_map: dict[str, str] = {}
        mor_map: dict[str, str] = {}
        section = None
        for st in stmts:
            text = st.text
            for label in ("ob", "arr"):
                if text == label + ":" or text.startswith(label + ":"):
                    section = label
                    text = text[len(label) + 1 :].strip()
                    break
            if not text:
                continue
            m = re.match(r"^(\S+)\s*\|->\s*(\S+)$", text)
            if not m or section is None:
                self.err("syntax", st.line, st.col, f"expected 'x |-> y' in ob/arr section, got {text!r}")
                return
            k, v = m.groups()
            (ob_map if section == "ob" else mor_map)[k] = v
        for x in dom.objects:
            if x in ob_map:
                mor_map.setdefault(dom.identity[x], cod.identity.get(ob_map[x], ""))
        self._declare(
            "functor",
            name,
            {"dom": dom_name, "cod": cod_name},
            validate_functor(dom, cod, ob_map, mor_map, name=name),
            line,
        )

    def _nattrans(self, header: str, stmts: list[_Stmt], line: int) -> None:
        m = re.match(r"^nattrans\s+(\S+)\s*:\s*(\S+)\s*=>\s*(\S+)$", header)
        if not m:
            self.err("syntax", line, 1, "expected: nattrans NAME : F => G { ... }")
            return
        name, f_name, g_name = m.groups()
        f = self._lookup("functor", f_name, line, 1)
        g = self._lookup("functor", g_name, line, 1)
        if f is None or g is None:
            return
        comps = self._at_block(stmts)
        if comps is None:
            return
        self._declare(
            "nattrans",
            name,
            {"dom": f_name, "cod": g_name},
            validate_nat_trans(f, g, comps, name=name),
            line,
        )

    def _at_block(self, stmts: list[_Stmt]) -> dict[str, str] | None:
        out: dict[str, str] = {}
        for st in stmts:
            m = re.match(r"^at\s+(\S+)\s*=\s*(\S+)$", st.text)
            if not m:
                self.err("syntax", st.line, st.col, f"expected 'at key = value', got {st.text!r}")
                return None
            out[m.group(1)] = m.group(2)
        return out

    def _diagram(self, words: list[str], stmts: list[_Stmt], line: int) -> None:
        if len(words) != 4 or words[2] != "on":
            self.err("syntax", line, 1, "expected: diagram NAME on BASE { ... }")
            return
        name, base_name = words[1], words[3]
        base = self._lookup("category", base_name, line, 1)
        if base is None:
            return
        entries = self._at_block(stmts)
        if entries is None:
            return
        at_ob: dict[str, FinCat] = {}
        at_mor: dict[str, FunctorData] = {}
        at_ob_refs: dict[str, str] = {}
        at_mor_refs: dict[str, str] = {}
        for key, ref in entries.items():
            if key in set(base.objects):
                v = self._lookup("category", ref, line, 1)
                if v is None:
                    return
                at_ob[key] = v
                at_ob_refs[key] = ref
            elif key in set(base.mors):
                v = self._lookup("functor", ref, line, 1)
                if v is None:
                    return
                at_mor[key] = v
                at_mor_refs[key] = ref
            else:
                self.err("reference", line, 1, f"{key!r} is neither an object nor a morphism of {base_name}")
                return
        for x in base.objects:
            if x in at_ob:
                at_mor.setdefault(base.identity[x], identity_functor(at_ob[x]))
        self._declare(
            "diagram",
            name,
            {"base": base_name, "at_ob": at_ob_refs, "at_mor": at_mor_refs},
            validate_diagram(base, at_ob, at_mor, name=name),
            line,
        )

    def _dmor(self, header: str, stmts: list[_Stmt], line: int) -> None:
        m = re.match(r"^dmor\s+(\S+)\s*:\s*(\S+)\s*=>\s*(\S+)$", header)
        if not m:
            self.err("syntax", line, 1, "expected: dmor NAME : F => G { ... }")
            return
        name, f_name, g_name = m.groups()
        f = self._lookup("diagram", f_name, line, 1)
        g = self._lookup("diagram", g_name, line, 1)
        if f is None or g is None:
            return
        entries = self._at_block(stmts)
        if entries is None:
            return
        comps: dict[str, FunctorData] = {}
        refs: dict[str, str] = {}
        for key, ref in entries.items():
            v = self._lookup("functor", ref, line, 1)
            if v is None:
                return
            comps[key] = v
            refs[key] = ref
        self._declare(
            "dmor",
            name,
            {"dom": f_name, "cod": g_name, "at": refs},
            validate_diagram_mor(f, g, comps, name=name),
            line,
        )

    def _cleavage(self, words: list[str], stmts: list[_Stmt], line: int) -> None:
        if len(words) != 4 or words[2] != "for":
            self.err("syntax", line, 1, "expected: cleavage NAME for FUNCTOR { ... }")
            return
        name, p_name = words[1], words[3]
        p = self._lookup("functor", p_name, line, 1)
        if p is None:
            return
        lifts: dict[tuple[str, str], str] = {}
        for st in stmts:
            m = re.match(r"^lift\s*\((.*)\)\s*\|->\s*(\S+)$", st.text)
            if not m:
                self.err("syntax", st.line, st.col, f"expected 'lift (E, f) |-> e', got {st.text!r}")
                return
            parts = split_top(m.group(1))
            if len(parts) != 2:
                self.err("syntax", st.line, st.col, f"expected two entries in lift key, got {m.group(1)!r}")
                return
            lifts[(parts[0], parts[1])] = m.group(2)
        total, base = p.dom, p.cod
        for e in total.objects:
            lifts.setdefault((e, base.identity[p.ob_map[e]]), total.identity[e])
        # accept either orientation: opfibration lifts, or the co-lifts of a dual
        try:
            value = cleaved_opfib(p, lifts).cleavage
        except ValidationError:
            from .indexed import _validate_fibration_lifts

            bad = _validate_fibration_lifts(p, lifts)
            if bad is not None:
                raise
            value = Cleavage(dict(lifts))
        self._declare("cleavage", name, {"functor": p_name}, value, line)

    def _opfib(self, words: list[str], stmts: list[_Stmt], line: int) -> None:
        if len(words) != 2:
            self.err("syntax", line, 1, "expected: opfib NAME { ... }")
            return
        name = words[1]
        over_name = total_name = None
        flavor = "opfibration"
        comps: dict[str, tuple[str, str]] = {}
        for st in stmts:
            m = re.match(r"^over\s*:\s*(\S+)$", st.text)
            if m:
                over_name = m.group(1)
                continue
            m = re.match(r"^total\s*:\s*(\S+)$", st.text)
            if m:
                total_name = m.group(1)
                continue
            m = re.match(r"^flavor\s*:\s*(\S+)$", st.text)
            if m:
                flavor = m.group(1)
                if flavor not in ("opfibration", "fibration"):
                    self.err("syntax", st.line, st.col, f"unknown flavor {flavor!r}")
                    return
                continue
            m = re.match(r"^component\s+(\S+)\s*=\s*\((.*)\)$", st.text)
            if m:
                parts = split_top(m.group(2))
                if len(parts) != 2:
                    self.err("syntax", st.line, st.col, "component needs (functor, cleavage)")
                    return
                comps[m.group(1)] = (parts[0], parts[1])
                continue
            self.err("syntax", st.line, st.col, f"unexpected statement {st.text!r} in opfib block")
            return
        if over_name is None or total_name is None:
            self.err("syntax", line, 1, "opfib block needs 'over:' and 'total:' entries")
            return
        over = self._lookup("diagram", over_name, line, 1)
        total = self._lookup("diagram", total_name, line, 1)
        if over is None or total is None:
            return
        components: dict[str, FunctorData] = {}
        cleavages: dict[str, Cleavage] = {}
        for a, (fn, cn) in comps.items():
            f = self._lookup("functor", fn, line, 1)
            c = self._lookup("cleavage", cn, line, 1)
            if f is None or c is None:
                return
            components[a] = f
            cleavages[a] = c
        self._declare(
            "opfib",
            name,
            {"over": over_name, "total": total_name, "components": comps},
            diagram_opfib(over, total, components, cleavages, name=name, flavor=flavor),
            line,
        )

    def _cocone(self, words: list[str], stmts: list[_Stmt], line: int) -> None:
        if len(words) != 4 or words[2] != "for":
            self.err("syntax", line, 1, "expected: cocone NAME for DIAGRAM { ... }")
            return
        name, d_name = words[1], words[3]
        diagram = self._lookup("diagram", d_name, line, 1)
        if diagram is None:
            return
        vertex_name = None
        leg_refs: dict[str, str] = {}
        cell_refs: dict[str, str] = {}
        for st in stmts:
            m = re.match(r"^vertex\s*:\s*(\S+)$", st.text)
            if m:
                vertex_name = m.group(1)
                continue
            m = re.match(r"^leg\s+(\S+)\s*=\s*(\S+)$", st.text)
            if m:
                leg_refs[m.group(1)] = m.group(2)
                continue
            m = re.match(r"^cell\s+(\S+)\s*=\s*(\S+)$", st.text)
            if m:
                cell_refs[m.group(1)] = m.group(2)
                continue
            self.err("syntax", st.line, st.col, f"unexpected statement {st.text!r} in cocone block")
            return
        if vertex_name is None:
            self.err("syntax", line, 1, "cocone block needs a 'vertex:' entry")
            return
        vertex = self._lookup("category", vertex_name, line, 1)
        if vertex is None:
            return
        legs: dict[str, FunctorData] = {}
        for a, ref in leg_refs.items():
            v = self._lookup("functor", ref, line, 1)
            if v is None:
                return
            legs[a] = v
        cells: dict[str, NatTransData] = {}
        for f, ref in cell_refs.items():
            v = self._lookup("nattrans", ref, line, 1)
            if v is None:
                return
            cells[f] = v
        base = diagram.base
        for x in base.objects:
            if x in legs:
                cells.setdefault(base.identity[x], identity_nat_trans(legs[x]))
        self._declare(
            "cocone",
            name,
            {"diagram": d_name, "vertex": vertex_name, "legs": leg_refs, "cells": cell_refs},
            validate_lax_cocone(diagram, vertex, legs, cells, name=name),
            line,
        )


def parse_workspace(text: str, filename: str = "<input>") -> Workspace:
    """Parse and validate a workspace; raises WorkspaceParseError with diagnostics."""
    return _Parser(text, filename).parse()


def parse_files(paths: Iterable[str]) -> Workspace:
    """Parse several files into one workspace (later files see earlier entities)."""
    parser: _Parser | None = None
    ws = Workspace()
    for path in paths:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
        parser = _Parser(text, path)
        parser.ws = ws
        parser.parse()
    return ws


# ---------------------------------------------------------------------------
# printing


def _print_category(c: FinCat, name: str, out: list[str]) -> None:
    out.append(f"category {name} {{")
    out.append("  objects: " + " ".join(c.objects) + " ;")
    non_ids = [m for m in c.mors if not c.is_identity(m)]
    if non_ids:
        out.append("  arrows:")
        for m in non_ids:
            out.append(f"    {m}: {c.src[m]} -> {c.tgt[m]} ;")
        entries = sorted(
            ((g, f, h) for (g, f), h in c.comp.items() if not c.is_identity(g) and not c.is_identity(f))
        )
        if entries:
            out.append("  compose:")
            for g, f, h in entries:
                out.append(f"    {g}.{f} = {h} ;")
    out.append("}")


def _print_functor(e: Entity, out: list[str]) -> None:
    t: FunctorData = e.value
    out.append(f"functor {e.name} : {e.refs['dom']} -> {e.refs['cod']} {{")
    out.append("  ob:")
    for x in t.dom.objects:
        out.append(f"    {x} |-> {t.ob_map[x]} ;")
    non_ids = [m for m in t.dom.mors if not t.dom.is_identity(m)]
    if non_ids:
        out.append("  arr:")
        for m in non_ids:
            out.append(f"    {m} |-> {t.mor_map[m]} ;")
    out.append("}")


def print_workspace(ws: Workspace) -> str:
    """Canonical serialization; parse(print(ws)) rebuilds equal tables."""
    out: list[str] = []
    for e in ws.of_kind("category"):
        _print_category(e.value, e.name, out)
    for e in ws.of_kind("functor"):
        _print_functor(e, out)
    for e in ws.of_kind("nattrans"):
        t: NatTransData = e.value
        out.append(f"nattrans {e.name} : {e.refs['dom']} => {e.refs['cod']} {{")
        for x in t.dom.dom.objects:
            out.append(f"  at {x} = {t.components[x]} ;")
        out.append("}")
    for e in ws.of_kind("diagram"):
        d: CatDiagram = e.value
        out.append(f"diagram {e.name} on {e.refs['base']} {{")
        for x in d.base.objects:
            out.append(f"  at {x} = {e.refs['at_ob'][x]} ;")
        for f in d.base.non_identity_mors():
            out.append(f"  at {f} = {e.refs['at_mor'][f]} ;")
        out.append("}")
    for e in ws.of_kind("dmor"):
        d: DiagramMor = e.value
        out.append(f"dmor {e.name} : {e.refs['dom']} => {e.refs['cod']} {{")
        for x in d.dom.base.objects:
            out.append(f"  at {x} = {e.refs['at'][x]} ;")
        out.append("}")
    for e in ws.of_kind("cleavage"):
        cl: Cleavage = e.value
        p: FunctorData = ws.get("functor", e.refs["functor"])
        out.append(f"cleavage {e.name} for {e.refs['functor']} {{")
        for (obj, f), m in sorted(cl.lifts.items()):
            if p.cod.is_identity(f) and m == p.dom.identity[obj]:
                continue
            out.append(f"  lift ({obj}, {f}) |-> {m} ;")
        out.append("}")
    for e in ws.of_kind("opfib"):
        out.append(f"opfib {e.name} {{")
        out.append(f"  over: {e.refs['over']} ;")
        out.append(f"  total: {e.refs['total']} ;")
        phi: DiagramOpfib = e.value
        if phi.flavor != "opfibration":
            out.append(f"  flavor: {phi.flavor} ;")
        for a in phi.base.objects:
            fn, cn = e.refs["components"][a]
            out.append(f"  component {a} = ({fn}, {cn}) ;")
        out.append("}")
    for e in ws.of_kind("cocone"):
        s: LaxCocone = e.value
        out.append(f"cocone {e.name} for {e.refs['diagram']} {{")
        out.append(f"  vertex: {e.refs['vertex']} ;")
        for a in s.diagram.base.objects:
            out.append(f"  leg {a} = {e.refs['legs'][a]} ;")
        for f in s.diagram.base.non_identity_mors():
            out.append(f"  cell {f} = {e.refs['cells'][f]} ;")
        out.append("}")
    return "\n".join(out) + ("\n" if out else "")


# ---------------------------------------------------------------------------
# programmatic workspace assembly (used by the CLI's output paths)


def ws_add_category(ws: Workspace, name: str, cat: FinCat) -> str:
    if not ws.has("category", name):
        ws.add(Entity("category", name, {}, cat))
    return name


def ws_add_functor(ws: Workspace, name: str, t: FunctorData, dom_name: str, cod_name: str) -> str:
    if not ws.has("functor", name):
        ws.add(Entity("functor", name, {"dom": dom_name, "cod": cod_name}, t))
    return name


def ws_add_nattrans(ws: Workspace, name: str, t: NatTransData, dom_name: str, cod_name: str) -> str:
    if not ws.has("nattrans", name):
        ws.add(Entity("nattrans", name, {"dom": dom_name, "cod": cod_name}, t))
    return name


def ws_add_cleavage(ws: Workspace, name: str, cleavage: Cleavage, functor_name: str) -> str:
    if not ws.has("cleavage", name):
        ws.add(Entity("cleavage", name, {"functor": functor_name}, cleavage))
    return name


def ws_add_diagram(
    ws: Workspace,
    name: str,
    d: CatDiagram,
    base_name: str,
    at_ob_names: dict[str, str],
    at_mor_names: dict[str, str],
) -> str:
    if not ws.has("diagram", name):
        ws.add(Entity("diagram", name, {"base": base_name, "at_ob": at_ob_names, "at_mor": at_mor_names}, d))
    return name


def ws_add_dmor(
    ws: Workspace, name: str, d: DiagramMor, dom_name: str, cod_name: str, at_names: dict[str, str]
) -> str:
    if not ws.has("dmor", name):
        ws.add(Entity("dmor", name, {"dom": dom_name, "cod": cod_name, "at": at_names}, d))
    return name


def ws_add_opfib(
    ws: Workspace,
    name: str,
    phi: DiagramOpfib,
    over_name: str,
    total_name: str,
    component_names: dict[str, tuple[str, str]],
) -> str:
    if not ws.has("opfib", name):
        ws.add(Entity("opfib", name, {"over": over_name, "total": total_name, "components": component_names}, phi))
    return name


def export_diagram(ws: Workspace, prefix: str, d: CatDiagram, base_name: str | None = None) -> str:
    """Add a diagram with freshly named fibre categories and action functors."""
    bname = base_name or ws_add_category(ws, f"{prefix}_base", d.base)
    at_ob_names = {}
    for x in d.base.objects:
        at_ob_names[x] = ws_add_category(ws, f"{prefix}_at_{x}", d.at_ob[x])
    at_mor_names = {}
    for f in d.base.non_identity_mors():
        at_mor_names[f] = ws_add_functor(
            ws, f"{prefix}_arr_{f}", d.at_mor[f], at_ob_names[d.base.src[f]], at_ob_names[d.base.tgt[f]]
        )
    return ws_add_diagram(ws, prefix, d, bname, at_ob_names, at_mor_names)


def export_opfib(ws: Workspace, prefix: str, phi: DiagramOpfib, over_name: str | None = None) -> str:
    """Add an opfibration candidate plus every entity it references."""
    base_name = ws_add_category(ws, f"{prefix}_idx", phi.base)
    oname = over_name or export_diagram(ws, f"{prefix}_over", phi.over, base_name)
    tname = export_diagram(ws, f"{prefix}_total", phi.total, base_name)
    comp_names = {}
    for a in phi.base.objects:
        fn = ws_add_functor(
            ws,
            f"{prefix}_p_{a}",
            phi.components[a],
            ws.entities[("diagram", tname)].refs["at_ob"][a],
            ws.entities[("diagram", oname)].refs["at_ob"][a],
        )
        cn = ws_add_cleavage(ws, f"{prefix}_cl_{a}", phi.cleavages[a], fn)
        comp_names[a] = (fn, cn)
    return ws_add_opfib(ws, prefix, phi, oname, tname, comp_names)


def render_dot(c: FinCat) -> str:
    """A plain digraph rendering: objects as nodes, non-identity morphisms as edges."""
    lines = [f'digraph "{c.name}" {{']
    for x in c.objects:
        lines.append(f'  "{x}";')
    for m in c.non_identity_mors():
        lines.append(f'  "{c.src[m]}" -> "{c.tgt[m]}" [label="{m}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
