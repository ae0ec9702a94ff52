"""Stock categories and diagrams: everything the worked examples need."""

from __future__ import annotations

from typing import Mapping, Sequence

from .fincat import (
    CatDiagram,
    FinCat,
    FunctorData,
    id_name,
    identity_functor,
    make_category,
    pair_id,
    validate_diagram,
    validate_functor,
)
from .report import Report, ValidationError


def discrete(n: int, prefix: str = "x") -> FinCat:
    objects = [f"{prefix}{i}" for i in range(n)]
    return make_category(f"discrete({n})", objects, [], {})


def terminal() -> FinCat:
    return make_category("terminal", ["*"], [], {})


def walking_arrow() -> FinCat:
    return make_category("walking_arrow", ["a", "b"], [("f", "a", "b")], {})


def walking_iso() -> FinCat:
    comp = {("g", "f"): id_name("a"), ("f", "g"): id_name("b")}
    return make_category("walking_iso", ["a", "b"], [("f", "a", "b"), ("g", "b", "a")], comp)


def poset(elements: Sequence[str], relation: Sequence[tuple[str, str]], name: str | None = None) -> FinCat:
    """Poset category; the relation is closed reflexively and transitively first."""
    elems = list(elements)
    le = {(x, x) for x in elems} | {p for p in relation}
    changed = True
    while changed:
        changed = False
        for x, y in list(le):
            for y2, z in list(le):
                if y2 == y and (x, z) not in le:
                    le.add((x, z))
                    changed = True
    for x, y in le:
        if x != y and (y, x) in le:
            rep = Report("build poset")
            rep.fail("antisymmetry", f"{x} <= {y} and {y} <= {x}")
            raise ValidationError(rep)

    def mor(x: str, y: str) -> str:
        return id_name(x) if x == y else f"le({x},{y})"

    arrows = [(mor(x, y), x, y) for x, y in sorted(le) if x != y]
    comp: dict[tuple[str, str], str] = {}
    for x, y in sorted(le):
        for y2, z in sorted(le):
            if y2 == y and x != y and y != z:
                comp[(mor(y, z), mor(x, y))] = mor(x, z)
    return make_category(name or f"poset({len(elems)})", elems, arrows, comp)


def chain(n: int) -> FinCat:
    """The n-chain poset 0 <= 1 <= ... <= n-1."""
    elems = [str(i) for i in range(n)]
    return poset(elems, [(str(i), str(i + 1)) for i in range(n - 1)], name=f"chain({n})")


def commuting_square_poset() -> FinCat:
    return poset(["bot", "x", "y", "top"], [("bot", "x"), ("bot", "y"), ("x", "top"), ("y", "top")],
                 name="commuting_square")


def delooping(
    elements: Sequence[str],
    table: Mapping[tuple[str, str], str],
    name: str | None = None,
) -> FinCat:
    """One-object category from a group Cayley table.

    `table[(a, b)]` is the product a·b; entries involving the unit may be
    omitted.  The unit is detected; group axioms are checked and violations
    reported with a witness.
    """
    elems = list(elements)
    rep = Report(f"delooping {name or ''}".strip())
    full: dict[tuple[str, str], str] = dict(table)
    # a unit must satisfy e·a = a·e = a wherever entries exist; omitted entries count as a
    units = [
        e
        for e in elems
        if all(full.get((e, a), a) == a and full.get((a, e), a) == a for a in elems)
    ]
    if len(units) != 1:
        rep.fail("unit", f"expected exactly one unit element, candidates: {units}")
        raise ValidationError(rep)
    unit = units[0]
    for a in elems:
        full.setdefault((unit, a), a)
        full.setdefault((a, unit), a)
    for a in elems:
        for b in elems:
            if (a, b) not in full:
                rep.fail("total", f"missing product {a}·{b}")
            elif full[(a, b)] not in set(elems):
                rep.fail("closed", f"{a}·{b} = {full[(a, b)]} is not an element")
    if not rep.passed:
        raise ValidationError(rep)
    for a in elems:
        for b in elems:
            for c in elems:
                if full[(a, full[(b, c)])] != full[(full[(a, b)], c)]:
                    rep.fail("associativity", f"({a}·{b})·{c} != {a}·({b}·{c})")
    for a in elems:
        if not any(full[(a, b)] == unit and full[(b, a)] == unit for b in elems):
            rep.fail("inverses", f"no inverse for {a}")
    if not rep.passed:
        raise ValidationError(rep)

    def mor(a: str) -> str:
        return id_name("*") if a == unit else a

    arrows = [(a, "*", "*") for a in elems if a != unit]
    comp = {
        (mor(a), mor(b)): mor(full[(a, b)])
        for a in elems
        for b in elems
        if a != unit and b != unit
    }
    return make_category(name or "delooping", ["*"], arrows, comp)


def cyclic_table(n: int, prefix: str = "r") -> tuple[list[str], dict[tuple[str, str], str]]:
    """Cayley table of Z/n with elements r0..r{n-1}; r0 is the unit."""
    elems = [f"{prefix}{i}" for i in range(n)]
    table = {
        (f"{prefix}{i}", f"{prefix}{j}"): f"{prefix}{(i + j) % n}"
        for i in range(n)
        for j in range(n)
    }
    return elems, table


def product(c: FinCat, d: FinCat, name: str | None = None) -> FinCat:
    objects = [pair_id(x, y) for x in c.objects for y in d.objects]

    def mor(f: str, g: str) -> str:
        if c.is_identity(f) and d.is_identity(g):
            return id_name(pair_id(c.src[f], d.src[g]))
        return pair_id(f, g)

    arrows = [
        (mor(f, g), pair_id(c.src[f], d.src[g]), pair_id(c.tgt[f], d.tgt[g]))
        for f in c.mors
        for g in d.mors
        if not (c.is_identity(f) and d.is_identity(g))
    ]
    comp = {}
    for f1 in c.mors:
        for g1 in d.mors:
            for f2 in c.mors:
                for g2 in d.mors:
                    if c.tgt[f1] == c.src[f2] and d.tgt[g1] == d.src[g2]:
                        if c.is_identity(f1) and d.is_identity(g1) or c.is_identity(f2) and d.is_identity(g2):
                            continue
                        comp[(mor(f2, g2), mor(f1, g1))] = mor(c.comp[(f2, f1)], d.comp[(g2, g1)])
    return make_category(name or f"product({c.name},{d.name})", objects, arrows, comp)


def product_projections(c: FinCat, d: FinCat) -> tuple[FinCat, FunctorData, FunctorData]:
    p = product(c, d)
    fst_ob = {pair_id(x, y): x for x in c.objects for y in d.objects}
    snd_ob = {pair_id(x, y): y for x in c.objects for y in d.objects}
    fst_mor: dict[str, str] = {}
    snd_mor: dict[str, str] = {}
    for f in c.mors:
        for g in d.mors:
            n = id_name(pair_id(c.src[f], d.src[g])) if c.is_identity(f) and d.is_identity(g) else pair_id(f, g)
            fst_mor[n] = f
            snd_mor[n] = g
    fst = validate_functor(p, c, fst_ob, fst_mor, name=f"fst[{p.name}]")
    snd = validate_functor(p, d, snd_ob, snd_mor, name=f"snd[{p.name}]")
    return p, fst, snd


def opposite(c: FinCat, name: str | None = None) -> FinCat:
    arrows = [(m, c.tgt[m], c.src[m]) for m in c.mors if not c.is_identity(m)]
    comp = {
        (f, g): h
        for (g, f), h in c.comp.items()
        if not (c.is_identity(g) or c.is_identity(f))
    }
    return make_category(name or f"op({c.name})", list(c.objects), arrows, comp)


def slice_category(c: FinCat, target: str, name: str | None = None) -> FinCat:
    """Objects are morphisms into `target`; a map m1 -> m2 is w with m2∘w = m1."""
    if target not in set(c.objects):
        rep = Report("build slice")
        rep.fail("object-exists", f"{target} is not an object of {c.name}")
        raise ValidationError(rep)
    objects = [m for m in c.mors if c.tgt[m] == target]

    def mor(w: str, m1: str) -> str:
        # w: src(m1) -> src(m2) witnessing m2∘w = m1
        if c.is_identity(w):
            return id_name(m1)
        return f"sl({w},{m1})"

    triples = []  # (w, m1, m2)
    for m1 in objects:
        for m2 in objects:
            for w in c.hom(c.src[m1], c.src[m2]):
                if c.comp[(m2, w)] == m1:
                    triples.append((w, m1, m2))
    arrows = [(mor(w, m1), m1, m2) for w, m1, m2 in triples if not c.is_identity(w)]
    comp = {}
    for w1, m1, m2 in triples:
        for w2, m2b, m3 in triples:
            if m2b == m2 and not c.is_identity(w1) and not c.is_identity(w2):
                comp[(mor(w2, m2), mor(w1, m1))] = mor(c.comp[(w2, w1)], m1)
    return make_category(name or f"slice({c.name},{target})", objects, arrows, comp)


def coslice_category(c: FinCat, source: str, name: str | None = None) -> FinCat:
    """Objects are morphisms out of `source`; dual to slice_category."""
    if source not in set(c.objects):
        rep = Report("build coslice")
        rep.fail("object-exists", f"{source} is not an object of {c.name}")
        raise ValidationError(rep)
    objects = [m for m in c.mors if c.src[m] == source]

    def mor(w: str, m1: str) -> str:
        if c.is_identity(w):
            return id_name(m1)
        return f"cosl({w},{m1})"

    triples = []
    for m1 in objects:
        for m2 in objects:
            for w in c.hom(c.tgt[m1], c.tgt[m2]):
                if c.comp[(w, m1)] == m2:
                    triples.append((w, m1, m2))
    arrows = [(mor(w, m1), m1, m2) for w, m1, m2 in triples if not c.is_identity(w)]
    comp = {}
    for w1, m1, m2 in triples:
        for w2, m2b, m3 in triples:
            if m2b == m2 and not c.is_identity(w1) and not c.is_identity(w2):
                comp[(mor(w2, m2), mor(w1, m1))] = mor(c.comp[(w2, w1)], m1)
    return make_category(name or f"coslice({c.name},{source})", objects, arrows, comp)


# ---------------------------------------------------------------------------
# diagram builders


def constant_diagram(base: FinCat, fibre: FinCat, name: str | None = None) -> CatDiagram:
    """The diagram constant at `fibre`: every base morphism acts as the identity."""
    ident = identity_functor(fibre)
    return validate_diagram(
        base,
        {x: fibre for x in base.objects},
        {f: ident for f in base.mors},
        name=name or f"const({base.name},{fibre.name})",
    )


def terminal_diagram(base: FinCat, name: str | None = None) -> CatDiagram:
    return constant_diagram(base, terminal(), name=name or f"const1({base.name})")


def one_object_diagram(fibre: FinCat, name: str | None = None) -> CatDiagram:
    """A diagram on the terminal base picking out `fibre`."""
    return constant_diagram(terminal(), fibre, name=name or f"pick({fibre.name})")


def arrow_diagram(t: FunctorData, name: str | None = None) -> CatDiagram:
    """A diagram on the walking arrow encoding the single functor `t`."""
    base = walking_arrow()
    return validate_diagram(
        base,
        {"a": t.dom, "b": t.cod},
        {id_name("a"): identity_functor(t.dom), id_name("b"): identity_functor(t.cod), "f": t},
        name=name or f"arrow({t.name})",
    )


def iso_diagram(t: FunctorData, t_inv: FunctorData, name: str | None = None) -> CatDiagram:
    """A diagram on the walking isomorphism encoding an invertible functor."""
    base = walking_iso()
    return validate_diagram(
        base,
        {"a": t.dom, "b": t.cod},
        {
            id_name("a"): identity_functor(t.dom),
            id_name("b"): identity_functor(t.cod),
            "f": t,
            "g": t_inv,
        },
        name=name or f"iso({t.name})",
    )


def representable_diagram(c: FinCat, at: str, name: str | None = None) -> tuple[FinCat, CatDiagram]:
    """The presheaf Hom(-, at) as a Set-valued diagram on opposite(c).

    Returns (opposite base, diagram); each fibre is the discrete category on
    the morphisms into `at`, and a base arrow acts by precomposition.
    """
    if at not in set(c.objects):
        rep = Report("build representable")
        rep.fail("object-exists", f"{at} is not an object of {c.name}")
        raise ValidationError(rep)
    base = opposite(c)
    fibres = {
        x: make_category(f"Hom({x},{at})", list(c.hom(x, at)), [], {})
        for x in c.objects
    }
    at_mor: dict[str, FunctorData] = {}
    for m in base.mors:
        # m: x -> y in opposite(c) is m: y -> x in c; act by precomposition with m
        x, y = base.src[m], base.tgt[m]
        ob_map = {h: c.comp[(h, m)] for h in c.hom(x, at)}
        mor_map = {id_name(h): id_name(ob_map[h]) for h in c.hom(x, at)}
        at_mor[m] = validate_functor(fibres[x], fibres[y], ob_map, mor_map, name=f"pre({m})")
    diagram = validate_diagram(base, fibres, at_mor, name=name or f"y({c.name},{at})")
    return base, diagram


# ---------------------------------------------------------------------------
# named dispatcher (used by the DSL's builder shorthand)


def build_category(spec: str, args: list, named: dict[str, FinCat], name: str) -> FinCat:
    """Dispatch a builder by name; `named` resolves category references."""
    def cat(ref) -> FinCat:
        if isinstance(ref, FinCat):
            return ref
        if ref not in named:
            raise KeyError(ref)
        return named[ref]

    if spec == "discrete":
        return make_category(name, [f"x{i}" for i in range(int(args[0]))], [], {})
    if spec == "terminal":
        c = terminal()
    elif spec == "walking_arrow":
        c = walking_arrow()
    elif spec == "walking_iso":
        c = walking_iso()
    elif spec == "chain":
        c = chain(int(args[0]))
    elif spec == "poset":
        elements, relation = args
        c = poset(elements, relation)
    elif spec == "delooping":
        elements, table = args
        c = delooping(elements, table)
    elif spec == "product":
        c = product(cat(args[0]), cat(args[1]))
    elif spec == "opposite":
        c = opposite(cat(args[0]))
    elif spec == "slice":
        c = slice_category(cat(args[0]), args[1])
    elif spec == "coslice":
        c = coslice_category(cat(args[0]), args[1])
    else:
        raise ValueError(f"unknown category builder {spec!r}")
    return FinCat(name, c.objects, c.mors, c.src, c.tgt, c.identity, c.comp,
                  c.hom_table, c.factorizations)
