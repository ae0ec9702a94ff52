"""Finite categories, functors, natural transformations, and Cat-valued diagrams.

Everything is a plain lookup table: a category is a total composition table
over named objects and morphisms, a functor is a pair of total maps, and so
on.  Validators check every law exhaustively and report each violation with
a concrete witness.  Values are immutable after validation.

Only finite categories are supported; see the README for the consequences.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

from .report import Report, ValidationError


def id_name(obj: str) -> str:
    """Canonical identity-morphism name; every construction in this package uses it."""
    return "id_" + obj


def pair_id(a: str, b: str) -> str:
    """Canonical name for a pair, used for products, pullbacks and totals."""
    return f"({a},{b})"


# ---------------------------------------------------------------------------
# FinCat


@dataclass(frozen=True, eq=False)
class FinCat:
    """A finite category as explicit tables.

    `comp[(g, f)]` is the composite g∘f, defined exactly when tgt(f) = src(g).
    """

    name: str
    objects: tuple[str, ...]
    mors: tuple[str, ...]
    src: Mapping[str, str]
    tgt: Mapping[str, str]
    identity: Mapping[str, str]
    comp: Mapping[tuple[str, str], str]
    # derived lookups, filled by validate_category
    hom_table: Mapping[tuple[str, str], tuple[str, ...]] = field(default_factory=dict)
    factorizations: Mapping[str, tuple[tuple[str, str], ...]] = field(default_factory=dict)

    # -- basic queries ------------------------------------------------------

    def hom(self, x: str, y: str) -> tuple[str, ...]:
        return self.hom_table.get((x, y), ())

    def id_of(self, x: str) -> str:
        return self.identity[x]

    def is_identity(self, m: str) -> bool:
        return self.identity.get(self.src[m]) == m

    def compose(self, g: str, f: str) -> str:
        """g∘f; requires tgt(f) = src(g)."""
        return self.comp[(g, f)]

    def non_identity_mors(self) -> tuple[str, ...]:
        return tuple(m for m in self.mors if not self.is_identity(m))

    def composable_pairs(self) -> Iterator[tuple[str, str]]:
        """All (g, f) with tgt(f) = src(g)."""
        for f in self.mors:
            for g in self.mors:
                if self.src[g] == self.tgt[f]:
                    yield g, f

    def inverse(self, m: str) -> str | None:
        """Two-sided inverse of m, or None."""
        x, y = self.src[m], self.tgt[m]
        for n in self.hom(y, x):
            if self.comp[(n, m)] == self.identity[x] and self.comp[(m, n)] == self.identity[y]:
                return n
        return None

    def is_discrete(self) -> bool:
        return all(self.is_identity(m) for m in self.mors)

    # -- structural comparison ---------------------------------------------

    def canonical_key(self):
        return (
            tuple(sorted(self.objects)),
            tuple(sorted(self.mors)),
            tuple(sorted(self.src.items())),
            tuple(sorted(self.tgt.items())),
            tuple(sorted(self.identity.items())),
            tuple(sorted(self.comp.items())),
        )

    def tables_equal(self, other: "FinCat") -> bool:
        """Table equality after sorting identifiers (names of entities aside)."""
        return self.canonical_key() == other.canonical_key()

    def __repr__(self) -> str:
        return f"FinCat({self.name!r}, {len(self.objects)} objects, {len(self.mors)} morphisms)"


def validate_category(
    objects: Sequence[str],
    arrows: Sequence[tuple[str, str, str]],
    identity: Mapping[str, str],
    comp: Mapping[tuple[str, str], str],
    name: str = "category",
) -> FinCat:
    """Check raw tables against every category law; raise with all violations.

    `arrows` lists (morphism, src, tgt) triples.  Each law class is checked
    exhaustively and the report names a concrete witness per violation.
    """
    rep = Report(f"validate category {name}")
    obj_set = set(objects)
    if len(obj_set) != len(objects):
        rep.fail("object-names-unique", "duplicate object identifier")
    mors = tuple(a[0] for a in arrows)
    if len(set(mors)) != len(mors):
        rep.fail("morphism-names-unique", "duplicate morphism identifier")
    src = {m: s for m, s, _ in arrows}
    tgt = {m: t for m, _, t in arrows}

    dangling = [m for m, s, t in arrows if s not in obj_set or t not in obj_set]
    for m in dangling:
        rep.fail("dangling-identifier", f"morphism {m}: {src[m]} -> {tgt[m]} uses undeclared object")
    for x in objects:
        if x not in identity:
            rep.fail("identity-total", f"no identity declared for object {x}")
        elif identity[x] not in src:
            rep.fail("dangling-identifier", f"identity of {x} is undeclared morphism {identity[x]}")
    if not rep.passed:
        raise ValidationError(rep)

    for x in objects:
        i = identity[x]
        if src[i] != x or tgt[i] != x:
            rep.fail("identity-endo", f"identity {i} of {x} has boundary {src[i]} -> {tgt[i]}")

    mor_set = set(mors)
    for (g, f), h in comp.items():
        if g not in mor_set or f not in mor_set or h not in mor_set:
            rep.fail("dangling-identifier", f"compose entry ({g},{f}) = {h} uses undeclared morphism")
    if not rep.passed:
        raise ValidationError(rep)

    for f in mors:
        for g in mors:
            key = (g, f)
            if src[g] == tgt[f]:
                if key not in comp:
                    rep.fail("composition-total", f"missing composite {g}∘{f}")
                else:
                    h = comp[key]
                    if src[h] != src[f] or tgt[h] != tgt[g]:
                        rep.fail(
                            "composition-boundary",
                            f"{g}∘{f} = {h} has boundary {src[h]} -> {tgt[h]}, "
                            f"expected {src[f]} -> {tgt[g]}",
                        )
            elif key in comp:
                rep.fail("composition-domain", f"entry for non-composable pair ({g},{f})")
    if not rep.passed:
        raise ValidationError(rep)

    for f in mors:
        left = comp[(identity[tgt[f]], f)]
        if left != f:
            rep.fail("identity-law", f"{identity[tgt[f]]}∘{f} = {left}, expected {f}")
        right = comp[(f, identity[src[f]])]
        if right != f:
            rep.fail("identity-law", f"{f}∘{identity[src[f]]} = {right}, expected {f}")

    for f in mors:
        for g in mors:
            if src[g] != tgt[f]:
                continue
            gf = comp[(g, f)]
            for h in mors:
                if src[h] != tgt[g]:
                    continue
                if comp[(h, gf)] != comp[(comp[(h, g)], f)]:
                    rep.fail(
                        "associativity",
                        f"({h}∘{g})∘{f} = {comp[(comp[(h, g)], f)]} but "
                        f"{h}∘({g}∘{f}) = {comp[(h, gf)]}",
                    )
    if not rep.passed:
        raise ValidationError(rep)

    hom: dict[tuple[str, str], list[str]] = {}
    for m in mors:
        hom.setdefault((src[m], tgt[m]), []).append(m)
    fact: dict[str, list[tuple[str, str]]] = {m: [] for m in mors}
    for (g, f), h in comp.items():
        fact[h].append((g, f))
    return FinCat(
        name=name,
        objects=tuple(objects),
        mors=mors,
        src=dict(src),
        tgt=dict(tgt),
        identity=dict(identity),
        comp=dict(comp),
        hom_table={k: tuple(v) for k, v in hom.items()},
        factorizations={m: tuple(v) for m, v in fact.items()},
    )


def make_category(
    name: str,
    objects: Sequence[str],
    arrows: Sequence[tuple[str, str, str]],
    comp: Mapping[tuple[str, str], str],
) -> FinCat:
    """Build a category whose identities follow the id_<object> convention.

    Identity morphisms and identity-composition entries are synthesized;
    `comp` needs only the composites of non-identity pairs.
    """
    identity = {x: id_name(x) for x in objects}
    all_arrows = [(id_name(x), x, x) for x in objects] + list(arrows)
    full: dict[tuple[str, str], str] = dict(comp)
    for m, s, t in all_arrows:
        # dangling boundaries are left for validate_category to report
        if t in identity:
            full[(identity[t], m)] = m
        if s in identity:
            full[(m, identity[s])] = m
    return validate_category(objects, all_arrows, identity, full, name=name)


# ---------------------------------------------------------------------------
# FunctorData


@dataclass(frozen=True, eq=False)
class FunctorData:
    """A functor between finite categories, given by total object/morphism maps."""

    name: str
    dom: FinCat
    cod: FinCat
    ob_map: Mapping[str, str]
    mor_map: Mapping[str, str]

    def ob(self, x: str) -> str:
        return self.ob_map[x]

    def mor(self, m: str) -> str:
        return self.mor_map[m]

    def tables_equal(self, other: "FunctorData") -> bool:
        return (
            self.dom.tables_equal(other.dom)
            and self.cod.tables_equal(other.cod)
            and dict(self.ob_map) == dict(other.ob_map)
            and dict(self.mor_map) == dict(other.mor_map)
        )

    def is_identity_functor(self) -> bool:
        return (
            self.dom.tables_equal(self.cod)
            and all(self.ob_map[x] == x for x in self.dom.objects)
            and all(self.mor_map[m] == m for m in self.dom.mors)
        )

    def __repr__(self) -> str:
        return f"FunctorData({self.name!r}: {self.dom.name} -> {self.cod.name})"


def validate_functor(
    dom: FinCat,
    cod: FinCat,
    ob_map: Mapping[str, str],
    mor_map: Mapping[str, str],
    name: str = "functor",
) -> FunctorData:
    rep = Report(f"validate functor {name}")
    for x in dom.objects:
        if x not in ob_map:
            rep.fail("object-map-total", f"no image for object {x}")
        elif ob_map[x] not in set(cod.objects):
            rep.fail("dangling-identifier", f"object image {ob_map[x]} not in codomain")
    for m in dom.mors:
        if m not in mor_map:
            rep.fail("morphism-map-total", f"no image for morphism {m}")
        elif mor_map[m] not in set(cod.mors):
            rep.fail("dangling-identifier", f"morphism image {mor_map[m]} not in codomain")
    if not rep.passed:
        raise ValidationError(rep)

    for m in dom.mors:
        n = mor_map[m]
        if cod.src[n] != ob_map[dom.src[m]] or cod.tgt[n] != ob_map[dom.tgt[m]]:
            rep.fail(
                "boundary-preserved",
                f"image of {m}: {dom.src[m]} -> {dom.tgt[m]} is {n}: {cod.src[n]} -> {cod.tgt[n]}",
            )
    for x in dom.objects:
        if mor_map.get(dom.identity[x]) != cod.identity.get(ob_map.get(x, "")):
            rep.fail("identities-preserved", f"image of id at {x} is {mor_map.get(dom.identity[x])}")
    if not rep.passed:
        raise ValidationError(rep)

    for g, f in dom.composable_pairs():
        lhs = mor_map[dom.comp[(g, f)]]
        rhs = cod.comp[(mor_map[g], mor_map[f])]
        if lhs != rhs:
            rep.fail("composition-preserved", f"image of {g}∘{f} is {lhs}, but images compose to {rhs}")
    if not rep.passed:
        raise ValidationError(rep)
    return FunctorData(name, dom, cod, dict(ob_map), dict(mor_map))


def identity_functor(c: FinCat) -> FunctorData:
    return FunctorData(f"id[{c.name}]", c, c, {x: x for x in c.objects}, {m: m for m in c.mors})


def compose_functors(g: FunctorData, f: FunctorData, name: str | None = None) -> FunctorData:
    """g∘f; the composite of valid functors needs no re-validation."""
    if g.dom is not f.cod and not g.dom.tables_equal(f.cod):
        raise ValueError(f"cannot compose {g.name} after {f.name}: boundary mismatch")
    return FunctorData(
        name or f"{g.name}∘{f.name}",
        f.dom,
        g.cod,
        {x: g.ob_map[f.ob_map[x]] for x in f.dom.objects},
        {m: g.mor_map[f.mor_map[m]] for m in f.dom.mors},
    )


# ---------------------------------------------------------------------------
# NatTransData


@dataclass(frozen=True, eq=False)
class NatTransData:
    """A natural transformation between parallel functors, one component per object."""

    name: str
    dom: FunctorData
    cod: FunctorData
    components: Mapping[str, str]

    def at(self, x: str) -> str:
        return self.components[x]

    def is_identity_nat(self) -> bool:
        c = self.dom.cod
        return all(c.is_identity(self.components[x]) for x in self.dom.dom.objects)

    def tables_equal(self, other: "NatTransData") -> bool:
        return (
            self.dom.tables_equal(other.dom)
            and self.cod.tables_equal(other.cod)
            and dict(self.components) == dict(other.components)
        )


def validate_nat_trans(
    dom: FunctorData,
    cod: FunctorData,
    components: Mapping[str, str],
    name: str = "nattrans",
) -> NatTransData:
    rep = Report(f"validate nattrans {name}")
    if dom.dom is not cod.dom and not dom.dom.tables_equal(cod.dom):
        rep.fail("parallel-functors", "domain categories differ")
    if dom.cod is not cod.cod and not dom.cod.tables_equal(cod.cod):
        rep.fail("parallel-functors", "codomain categories differ")
    if not rep.passed:
        raise ValidationError(rep)

    cat = dom.dom
    target = dom.cod
    for x in cat.objects:
        if x not in components:
            rep.fail("components-total", f"no component at {x}")
            continue
        m = components[x]
        if m not in set(target.mors):
            rep.fail("dangling-identifier", f"component at {x} is undeclared morphism {m}")
        elif target.src[m] != dom.ob_map[x] or target.tgt[m] != cod.ob_map[x]:
            rep.fail(
                "component-boundary",
                f"component at {x} is {m}: {target.src[m]} -> {target.tgt[m]}, "
                f"expected {dom.ob_map[x]} -> {cod.ob_map[x]}",
            )
    if not rep.passed:
        raise ValidationError(rep)

    for f in cat.mors:
        x, y = cat.src[f], cat.tgt[f]
        lhs = target.comp[(components[y], dom.mor_map[f])]
        rhs = target.comp[(cod.mor_map[f], components[x])]
        if lhs != rhs:
            rep.fail("naturality", f"square at {f}: {components[y]}∘{dom.mor_map[f]} = {lhs} "
                                   f"but {cod.mor_map[f]}∘{components[x]} = {rhs}")
    if not rep.passed:
        raise ValidationError(rep)
    return NatTransData(name, dom, cod, dict(components))


def identity_nat_trans(f: FunctorData) -> NatTransData:
    comps = {x: f.cod.identity[f.ob_map[x]] for x in f.dom.objects}
    return NatTransData(f"id[{f.name}]", f, f, comps)


def _same_cat(a: FinCat, b: FinCat) -> bool:
    """Boundary agreement: identical instance or equal tables (lookups are by name)."""
    return a is b or a.tables_equal(b)


# ---------------------------------------------------------------------------
# CatDiagram


@dataclass(frozen=True, eq=False)
class CatDiagram:
    """A strict Cat-valued diagram: a category per base object, a functor per base morphism."""

    name: str
    base: FinCat
    at_ob: Mapping[str, FinCat]
    at_mor: Mapping[str, FunctorData]

    def fibre(self, x: str) -> FinCat:
        return self.at_ob[x]

    def arrow(self, f: str) -> FunctorData:
        return self.at_mor[f]

    def is_set_valued(self) -> bool:
        return all(c.is_discrete() for c in self.at_ob.values())

    def tables_equal(self, other: "CatDiagram") -> bool:
        if not self.base.tables_equal(other.base):
            return False
        if not all(self.at_ob[x].tables_equal(other.at_ob[x]) for x in self.base.objects):
            return False
        return all(
            dict(self.at_mor[f].ob_map) == dict(other.at_mor[f].ob_map)
            and dict(self.at_mor[f].mor_map) == dict(other.at_mor[f].mor_map)
            for f in self.base.mors
        )

    def __repr__(self) -> str:
        return f"CatDiagram({self.name!r} on {self.base.name})"


def validate_diagram(
    base: FinCat,
    at_ob: Mapping[str, FinCat],
    at_mor: Mapping[str, FunctorData],
    name: str = "diagram",
) -> CatDiagram:
    rep = Report(f"validate diagram {name}")
    for x in base.objects:
        if x not in at_ob:
            rep.fail("fibres-total", f"no category at {x}")
    for f in base.mors:
        if f not in at_mor:
            rep.fail("arrows-total", f"no functor at {f}")
    if not rep.passed:
        raise ValidationError(rep)

    for f in base.mors:
        t = at_mor[f]
        if not _same_cat(t.dom, at_ob[base.src[f]]) or not _same_cat(t.cod, at_ob[base.tgt[f]]):
            rep.fail("arrow-boundary", f"functor at {f} does not go {base.src[f]} fibre -> {base.tgt[f]} fibre")
    if not rep.passed:
        raise ValidationError(rep)

    for x in base.objects:
        if not at_mor[base.identity[x]].is_identity_functor():
            rep.fail("strict-identity", f"functor at identity of {x} is not the identity functor")
    for g, f in base.composable_pairs():
        both = compose_functors(at_mor[g], at_mor[f])
        direct = at_mor[base.comp[(g, f)]]
        if dict(both.ob_map) != dict(direct.ob_map) or dict(both.mor_map) != dict(direct.mor_map):
            rep.fail("strict-composition", f"functor at {base.comp[(g, f)]} differs from composite over ({g},{f})")
    if not rep.passed:
        raise ValidationError(rep)
    return CatDiagram(name, base, dict(at_ob), dict(at_mor))


# ---------------------------------------------------------------------------
# DiagramMor: strict morphisms of Cat-valued diagrams


@dataclass(frozen=True, eq=False)
class DiagramMor:
    """A strict morphism of diagrams over a shared base: one functor per base object."""

    name: str
    dom: CatDiagram
    cod: CatDiagram
    components: Mapping[str, FunctorData]

    def at(self, x: str) -> FunctorData:
        return self.components[x]

    def is_identity_mor(self) -> bool:
        return all(self.components[x].is_identity_functor() for x in self.dom.base.objects)


def validate_diagram_mor(
    dom: CatDiagram,
    cod: CatDiagram,
    components: Mapping[str, FunctorData],
    name: str = "dmor",
) -> DiagramMor:
    rep = Report(f"validate diagram morphism {name}")
    if dom.base is not cod.base and not dom.base.tables_equal(cod.base):
        rep.fail("shared-base", "domain and codomain diagrams live on different bases")
        raise ValidationError(rep)
    for x in dom.base.objects:
        if x not in components:
            rep.fail("components-total", f"no component at {x}")
            continue
        t = components[x]
        if not _same_cat(t.dom, dom.at_ob[x]) or not _same_cat(t.cod, cod.at_ob[x]):
            rep.fail("component-boundary", f"component at {x} does not map fibre to fibre")
    if not rep.passed:
        raise ValidationError(rep)

    for h in dom.base.mors:
        a, b = dom.base.src[h], dom.base.tgt[h]
        left = compose_functors(cod.at_mor[h], components[a])
        right = compose_functors(components[b], dom.at_mor[h])
        if dict(left.ob_map) != dict(right.ob_map) or dict(left.mor_map) != dict(right.mor_map):
            rep.fail("naturality", f"square at {h} does not commute strictly")
    if not rep.passed:
        raise ValidationError(rep)
    return DiagramMor(name, dom, cod, dict(components))


def identity_diagram_mor(d: CatDiagram) -> DiagramMor:
    comps = {x: identity_functor(d.at_ob[x]) for x in d.base.objects}
    return DiagramMor(f"id[{d.name}]", d, d, comps)


def compose_diagram_mors(g: DiagramMor, f: DiagramMor, name: str | None = None) -> DiagramMor:
    comps = {x: compose_functors(g.components[x], f.components[x]) for x in f.dom.base.objects}
    return DiagramMor(name or f"{g.name}∘{f.name}", f.dom, g.cod, comps)


def reindex(d: CatDiagram, h: FunctorData, name: str | None = None) -> CatDiagram:
    """Precompose a diagram on A with a functor h: B -> A, giving a diagram on B."""
    if h.cod is not d.base and not h.cod.tables_equal(d.base):
        raise ValueError("reindexing functor does not land in the diagram base")
    return validate_diagram(
        h.dom,
        {b: d.at_ob[h.ob_map[b]] for b in h.dom.objects},
        {u: d.at_mor[h.mor_map[u]] for u in h.dom.mors},
        name=name or f"{d.name}∘{h.name}",
    )


# ---------------------------------------------------------------------------
# IsoWitness


@dataclass(frozen=True, eq=False)
class IsoWitness:
    """A machine-verified invertible comparison; `flavor` says at which level."""

    forward: object  # FunctorData | NatTransData | DiagramMor
    backward: object
    flavor: str  # "category-iso" | "natural-iso" | "over-base-iso" | "diagram-iso"

    def describe(self) -> str:
        fwd = getattr(self.forward, "name", "forward")
        return f"{self.flavor} witness {fwd}"


def verify_category_iso(fwd: FunctorData, bwd: FunctorData, flavor: str = "category-iso") -> IsoWitness:
    """Re-check that two functors compose to identities both ways."""
    rep = Report("verify category iso")
    if not compose_functors(bwd, fwd).is_identity_functor():
        rep.fail("backward∘forward", "composite is not the identity functor")
    if not compose_functors(fwd, bwd).is_identity_functor():
        rep.fail("forward∘backward", "composite is not the identity functor")
    if not rep.passed:
        raise ValidationError(rep)
    return IsoWitness(fwd, bwd, flavor)


def verify_natural_iso(fwd: NatTransData, bwd: NatTransData) -> IsoWitness:
    rep = Report("verify natural iso")
    cat = fwd.dom.cod
    for x in fwd.dom.dom.objects:
        back_forth = cat.comp[(bwd.components[x], fwd.components[x])]
        forth_back = cat.comp[(fwd.components[x], bwd.components[x])]
        if not cat.is_identity(back_forth) or not cat.is_identity(forth_back):
            rep.fail("componentwise-invertible", f"components at {x} do not invert each other")
    if not rep.passed:
        raise ValidationError(rep)
    return IsoWitness(fwd, bwd, "natural-iso")


def verify_diagram_iso(fwd: DiagramMor, bwd: DiagramMor) -> IsoWitness:
    rep = Report("verify diagram iso")
    for x in fwd.dom.base.objects:
        if not compose_functors(bwd.components[x], fwd.components[x]).is_identity_functor():
            rep.fail("backward∘forward", f"component at {x} is not inverted")
        if not compose_functors(fwd.components[x], bwd.components[x]).is_identity_functor():
            rep.fail("forward∘backward", f"component at {x} is not inverted")
    if not rep.passed:
        raise ValidationError(rep)
    return IsoWitness(fwd, bwd, "diagram-iso")
