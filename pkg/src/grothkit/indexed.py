"""Opfibrations between Cat-valued diagrams and the indexed Grothendieck construction.

A morphism of diagrams φ: G ⇒ F over a base A, equipped with one cleavage per
component, is an opfibration in the diagram 2-category exactly when every
component is a split opfibration and every naturality square preserves the
chosen lifts.  `check_diagram_opfib` verifies that finite criterion.

`indexed_fibres` turns such a φ into a Cat-valued diagram on the total
category of F, sending (A, X) to the fibre of the A-component over X;
`indexed_groth` goes back.  Round trips, the discrete restriction, and
pseudonaturality in F are verified per instance by exhaustive search.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping

from .build import opposite
from .fincat import (
    CatDiagram,
    _same_cat,
    reindex,
    DiagramMor,
    FinCat,
    FunctorData,
    NatTransData,
    compose_functors,
    identity_functor,
    identity_nat_trans,
    validate_diagram,
    validate_diagram_mor,
    validate_functor,
    validate_nat_trans,
)
from .groth import GrothTotal, groth, groth_map, inc_cocone
from .isosearch import (
    BUDGET,
    DEFAULT_BUDGET,
    FOUND,
    Budget,
    SearchResult,
    diagram_iso_search,
    iter_iso_tables,
)
from .opfib import (
    Cleavage,
    CleavedOpfib,
    PullbackOpfib,
    check_cleavage_preserving,
    check_discrete_opfib,
    check_split_opfib,
    cleaved_opfib,
    fibre_category,
    pullback_opfib,
)
from .report import Report, ValidationError


@dataclass(eq=False)
class DiagramOpfib:
    """A morphism of diagrams with per-component cleavages; a candidate opfibration.

    `flavor` is flipped by `dualize`; only "opfibration"-flavored values may
    enter the checkers, since the cleavage tables of a dual read backwards.
    """

    name: str
    over: CatDiagram
    total: CatDiagram
    components: Mapping[str, FunctorData]
    cleavages: Mapping[str, Cleavage]
    flavor: str = "opfibration"
    pullback_parts: Mapping[str, PullbackOpfib] | None = field(default=None, repr=False)

    @property
    def base(self) -> FinCat:
        return self.over.base

    def component_opfib(self, a: str) -> CleavedOpfib:
        return CleavedOpfib(self.components[a], self.cleavages[a])

    def as_diagram_mor(self) -> DiagramMor:
        return validate_diagram_mor(self.total, self.over, self.components, name=self.name)


def _validate_fibration_lifts(t: FunctorData, lifts: Mapping[tuple[str, str], str]) -> str | None:
    """Shape check for a fibration-flavored cleavage: lifts land ON the object,
    over morphisms INTO its image."""
    total, base = t.dom, t.cod
    for e in total.objects:
        for f in base.mors:
            if base.tgt[f] != t.ob_map[e]:
                continue
            if (e, f) not in lifts:
                return f"no lift of {f} at {e}"
            m = lifts[(e, f)]
            if m not in set(total.mors):
                return f"lift of {f} at {e} is undeclared morphism {m}"
            if total.tgt[m] != e:
                return f"lift of {f} at {e} ends at {total.tgt[m]}"
            if t.mor_map[m] != f:
                return f"lift of {f} at {e} lies over {t.mor_map[m]}"
    for (e, f) in lifts:
        if e not in set(total.objects) or f not in set(base.mors) or base.tgt[f] != t.ob_map[e]:
            return f"entry ({e},{f}) does not describe a morphism into the image of {e}"
    return None


def diagram_opfib(
    over: CatDiagram,
    total: CatDiagram,
    components: Mapping[str, FunctorData],
    cleavages: Mapping[str, Mapping[tuple[str, str], str] | Cleavage],
    name: str = "opfib",
    flavor: str = "opfibration",
) -> DiagramOpfib:
    """Structural validation only: boundaries and cleavage well-formedness.

    The opfibration laws themselves are the business of check_diagram_opfib.
    Fibration-flavored candidates (as produced by dualize) carry co-lifts,
    which are shape-checked with the dual orientation.
    """
    rep = Report(f"validate opfibration candidate {name}")
    if over.base is not total.base and not over.base.tables_equal(total.base):
        rep.fail("shared-base", "total and base diagrams live on different index categories")
        raise ValidationError(rep)
    clean: dict[str, Cleavage] = {}
    for a in over.base.objects:
        if a not in components:
            rep.fail("components-total", f"no component at {a}")
            continue
        t = components[a]
        if not _same_cat(t.dom, total.at_ob[a]) or not _same_cat(t.cod, over.at_ob[a]):
            rep.fail("component-boundary", f"component at {a} is not a functor G({a}) -> F({a})")
            continue
        if a not in cleavages:
            rep.fail("cleavages-total", f"no cleavage at {a}")
            continue
        raw = cleavages[a]
        lifts = raw.lifts if isinstance(raw, Cleavage) else raw
        if flavor == "fibration":
            bad = _validate_fibration_lifts(t, lifts)
            if bad is None:
                clean[a] = Cleavage(dict(lifts))
            else:
                rep.fail(f"cleavage@{a}", bad)
            continue
        try:
            clean[a] = cleaved_opfib(t, lifts).cleavage
        except ValidationError as err:
            bad = err.report.first_failure()
            rep.fail(f"cleavage@{a}", f"{bad.name}: {bad.counterexample}")
    if not rep.passed:
        raise ValidationError(rep)
    return DiagramOpfib(name, over, total, dict(components), clean, flavor=flavor)


def identity_diagram_opfib(d: CatDiagram, name: str | None = None) -> DiagramOpfib:
    """The identity morphism on a diagram with its tautological cleavages."""
    comps = {a: identity_functor(d.at_ob[a]) for a in d.base.objects}
    cleavs = {
        a: {
            (e, f): f
            for e in d.at_ob[a].objects
            for f in d.at_ob[a].mors
            if d.at_ob[a].src[f] == e
        }
        for a in d.base.objects
    }
    return diagram_opfib(d, d, comps, cleavs, name=name or f"id[{d.name}]")


def _require_opfib_flavor(phi: DiagramOpfib) -> None:
    if phi.flavor != "opfibration":
        raise ValueError(
            f"{phi.name} is {phi.flavor}-flavored; dualize it before using opfibration machinery"
        )


def check_diagram_opfib(phi: DiagramOpfib, discrete: bool = False) -> Report:
    """The componentwise criterion for being a (split or discrete) opfibration of diagrams.

    Per component: a split (or discrete) opfibration check.  Per naturality
    square: strict commutation, plus cleavage preservation in the split case
    (it is automatic in the discrete case and therefore skipped).
    """
    _require_opfib_flavor(phi)
    rep = Report(f"diagram opfibration check for {phi.name}")
    base = phi.base
    for h in base.mors:
        a, b = base.src[h], base.tgt[h]
        left = compose_functors(phi.components[b], phi.total.at_mor[h])
        right = compose_functors(phi.over.at_mor[h], phi.components[a])
        bad = None
        for x in phi.total.at_ob[a].objects:
            if left.ob_map[x] != right.ob_map[x]:
                bad = f"on object {x}"
                break
        if bad is None:
            for m in phi.total.at_ob[a].mors:
                if left.mor_map[m] != right.mor_map[m]:
                    bad = f"on morphism {m}"
                    break
        rep.record(f"naturality@{h}", bad)
    if not rep.passed:
        return rep

    for a in base.objects:
        q = phi.component_opfib(a)
        sub = check_discrete_opfib(q.p) if discrete else check_split_opfib(q)
        fail = sub.first_failure()
        rep.record(
            f"component@{a}",
            None if fail is None else f"{fail.name}: {fail.counterexample}",
        )
    if not discrete:
        for h in base.mors:
            a, b = base.src[h], base.tgt[h]
            sub = check_cleavage_preserving(
                phi.total.at_mor[h],
                phi.over.at_mor[h],
                phi.component_opfib(a),
                phi.component_opfib(b),
            )
            fail = sub.first_failure()
            rep.record(
                f"square@{h}",
                None if fail is None else f"{fail.name}: {fail.counterexample}",
            )
    return rep


# ---------------------------------------------------------------------------
# morphisms of diagram opfibrations


@dataclass(eq=False)
class DiagramOpfibMor:
    """Componentwise functors between the totals of two opfibrations over the same F."""

    name: str
    dom: DiagramOpfib
    cod: DiagramOpfib
    components: Mapping[str, FunctorData]


def check_diagram_opfib_mor(xi: DiagramOpfibMor) -> Report:
    """Triangle over F, naturality, and cleavage preservation per component."""
    rep = Report(f"opfibration morphism check for {xi.name}")
    phi, psi = xi.dom, xi.cod
    base = phi.base
    for a in base.objects:
        through = compose_functors(psi.components[a], xi.components[a])
        bad = None
        for x in phi.total.at_ob[a].objects:
            if through.ob_map[x] != phi.components[a].ob_map[x]:
                bad = f"on object {x}"
                break
        if bad is None:
            for m in phi.total.at_ob[a].mors:
                if through.mor_map[m] != phi.components[a].mor_map[m]:
                    bad = f"on morphism {m}"
                    break
        rep.record(f"triangle@{a}", bad)
    if not rep.passed:
        return rep

    for h in base.mors:
        a, b = base.src[h], base.tgt[h]
        left = compose_functors(xi.components[b], phi.total.at_mor[h])
        right = compose_functors(psi.total.at_mor[h], xi.components[a])
        bad = None
        if dict(left.ob_map) != dict(right.ob_map) or dict(left.mor_map) != dict(right.mor_map):
            bad = "square of totals does not commute"
        rep.record(f"naturality@{h}", bad)

    for a in base.objects:
        sub = check_cleavage_preserving(
            xi.components[a],
            identity_functor(phi.over.at_ob[a]),
            phi.component_opfib(a),
            psi.component_opfib(a),
        )
        fail = sub.first_failure()
        rep.record(
            f"cleavage-preserving@{a}",
            None if fail is None else f"{fail.name}: {fail.counterexample}",
        )
    return rep


# ---------------------------------------------------------------------------
# pullbacks and 2-cells


def pullback_diagram_opfib(alpha: DiagramMor, phi: DiagramOpfib, name: str | None = None) -> DiagramOpfib:
    """Pointwise pullback of an opfibration of diagrams along a diagram morphism."""
    _require_opfib_flavor(phi)
    if alpha.cod is not phi.over and not alpha.cod.tables_equal(phi.over):
        raise ValueError(f"{alpha.name} does not land in the base diagram of {phi.name}")
    base = phi.base
    label = name or f"pb({alpha.name},{phi.name})"
    parts = {
        a: pullback_opfib(alpha.components[a], phi.component_opfib(a))
        for a in base.objects
    }
    at_ob = {a: parts[a].opfib.total for a in base.objects}
    at_mor: dict[str, FunctorData] = {}
    for h in base.mors:
        a, b = base.src[h], base.tgt[h]
        fh = alpha.dom.at_mor[h]
        gh = phi.total.at_mor[h]
        ob_map = {
            v: parts[b].obj_of[(fh.ob_map[x], gh.ob_map[e])]
            for v, (x, e) in parts[a].ob_pair.items()
        }
        mor_map = {
            n: parts[b].mor_of[(fh.mor_map[u], gh.mor_map[m])]
            for n, (u, m) in parts[a].mor_pair.items()
        }
        at_mor[h] = validate_functor(at_ob[a], at_ob[b], ob_map, mor_map, name=f"{label}({h})")
    total = validate_diagram(base, at_ob, at_mor, name=f"total[{label}]")
    return DiagramOpfib(
        label,
        alpha.dom,
        total,
        {a: parts[a].opfib.p for a in base.objects},
        {a: parts[a].opfib.cleavage for a in base.objects},
        pullback_parts=parts,
    )


@dataclass(eq=False)
class DiagramModification:
    """A 2-cell between parallel diagram morphisms: one natural transformation per index."""

    name: str
    dom: DiagramMor
    cod: DiagramMor
    components: Mapping[str, NatTransData]


def validate_diagram_modification(
    alpha: DiagramMor,
    beta: DiagramMor,
    components: Mapping[str, NatTransData],
    name: str = "modification",
) -> DiagramModification:
    rep = Report(f"validate modification {name}")
    if alpha.dom is not beta.dom or alpha.cod is not beta.cod:
        if not (alpha.dom.tables_equal(beta.dom) and alpha.cod.tables_equal(beta.cod)):
            rep.fail("parallel", "boundary diagram morphisms are not parallel")
            raise ValidationError(rep)
    base = alpha.dom.base
    for a in base.objects:
        if a not in components:
            rep.fail("components-total", f"no component at {a}")
            continue
        delta = components[a]
        if not delta.dom.tables_equal(alpha.components[a]) or not delta.cod.tables_equal(beta.components[a]):
            rep.fail("component-boundary", f"component at {a} is not alpha_{a} => beta_{a}")
    if not rep.passed:
        raise ValidationError(rep)
    for h in base.mors:
        a, b = base.src[h], base.tgt[h]
        fh = alpha.cod.at_mor[h]
        f_dash_h = alpha.dom.at_mor[h]
        for x in alpha.dom.at_ob[a].objects:
            if fh.mor_map[components[a].components[x]] != components[b].components[f_dash_h.ob_map[x]]:
                rep.fail(
                    "modification-law",
                    f"at {h}, {x}: whiskered components disagree",
                )
    if not rep.passed:
        raise ValidationError(rep)
    return DiagramModification(name, alpha, beta, dict(components))


def identity_modification(alpha: DiagramMor) -> DiagramModification:
    comps = {a: identity_nat_trans(alpha.components[a]) for a in alpha.dom.base.objects}
    return validate_diagram_modification(alpha, alpha, comps, name=f"id[{alpha.name}]")


def vertical_compose_modifications(
    d2: DiagramModification, d1: DiagramModification, name: str | None = None
) -> DiagramModification:
    comps = {}
    for a in d1.dom.dom.base.objects:
        target = d1.dom.cod.at_ob[a]
        comps[a] = validate_nat_trans(
            d1.components[a].dom,
            d2.components[a].cod,
            {
                x: target.comp[(d2.components[a].components[x], d1.components[a].components[x])]
                for x in d1.dom.dom.at_ob[a].objects
            },
            name=f"({d2.name}∘{d1.name})@{a}",
        )
    return validate_diagram_modification(d1.dom, d2.cod, comps, name=name or f"{d2.name}∘{d1.name}")


def two_cell_action(
    delta: DiagramModification,
    phi: DiagramOpfib,
    pb_dom: DiagramOpfib | None = None,
    pb_cod: DiagramOpfib | None = None,
    name: str | None = None,
) -> DiagramOpfibMor:
    """Lift a 2-cell between diagram morphisms to a comparison of pulled-back opfibrations.

    On objects of each pullback the component of delta is lifted through the
    cleavage of phi; on morphisms the image is the unique cartesian fill-in.
    """
    _require_opfib_flavor(phi)
    alpha, beta = delta.dom, delta.cod
    pba = pb_dom if pb_dom is not None else pullback_diagram_opfib(alpha, phi)
    pbb = pb_cod if pb_cod is not None else pullback_diagram_opfib(beta, phi)
    base = phi.base
    comps: dict[str, FunctorData] = {}
    for a in base.objects:
        q = phi.component_opfib(a)
        total = q.total
        da = delta.components[a]
        part_a, part_b = pba.pullback_parts[a], pbb.pullback_parts[a]
        ob_map = {}
        for v, (x, e) in part_a.ob_pair.items():
            lifted = q.cleavage.lift(e, da.components[x])
            ob_map[v] = part_b.obj_of[(x, total.tgt[lifted])]
        mor_map = {}
        for n, (u, m) in part_a.mor_pair.items():
            x0, e0 = part_a.ob_pair[part_a.opfib.total.src[n]]
            x1, e1 = part_a.ob_pair[part_a.opfib.total.tgt[n]]
            l0 = q.cleavage.lift(e0, da.components[x0])
            l1 = q.cleavage.lift(e1, da.components[x1])
            target = total.comp[(l1, m)]
            over = beta.components[a].mor_map[u]
            fills = [
                v
                for v in total.hom(total.tgt[l0], total.tgt[l1])
                if q.p.mor_map[v] == over and total.comp[(v, l0)] == target
            ]
            if len(fills) != 1:
                raise ValueError(f"two-cell action at {a} on {n}: expected one fill-in, got {fills}")
            mor_map[n] = part_b.mor_of[(u, fills[0])]
        comps[a] = validate_functor(
            part_a.opfib.total, part_b.opfib.total, ob_map, mor_map, name=f"delta*@{a}"
        )
    return DiagramOpfibMor(name or f"({delta.name})*", pba, pbb, comps)


# ---------------------------------------------------------------------------
# the indexed Grothendieck construction, both directions


def indexed_fibres(phi: DiagramOpfib, gt: GrothTotal | None = None, name: str | None = None) -> CatDiagram:
    """Collect the fibres of all components into a diagram on the total category of F.

    (A, X) goes to the fibre of the A-component over X; a total morphism
    (h, α) acts by the h-component of the total diagram followed by the
    pushforward lifting α.
    """
    _require_opfib_flavor(phi)
    rep = check_diagram_opfib(phi)
    if not rep.passed:
        bad = rep.first_failure()
        out = Report(f"indexed fibres of {phi.name}")
        out.fail("input-opfibration", f"{bad.name}: {bad.counterexample}")
        raise ValidationError(out)
    g = gt if gt is not None else groth(phi.over)
    label = name or f"fibres({phi.name})"

    at_ob = {
        v: fibre_category(phi.components[a], x, name=f"{label}@{v}")
        for v, (a, x) in g.ob_pair.items()
    }
    at_mor: dict[str, FunctorData] = {}
    for m, (h, alpha, x) in g.mor_pair.items():
        a, b = g.diagram.base.src[h], g.diagram.base.tgt[h]
        v0 = g.obj_of[(a, x)]
        v1 = g.obj_of[(b, phi.over.at_ob[b].tgt[alpha])]
        gh = phi.total.at_mor[h]
        qb = phi.component_opfib(b)
        total_b = qb.total
        ob_map = {
            e: total_b.tgt[qb.cleavage.lift(gh.ob_map[e], alpha)]
            for e in at_ob[v0].objects
        }
        mor_map = {}
        fib0 = at_ob[v0]
        for e_mor in fib0.mors:
            e0, e1 = fib0.src[e_mor], fib0.tgt[e_mor]
            moved = gh.mor_map[e_mor]
            l0 = qb.cleavage.lift(gh.ob_map[e0], alpha)
            l1 = qb.cleavage.lift(gh.ob_map[e1], alpha)
            target = total_b.comp[(l1, moved)]
            idx = phi.over.at_ob[b].identity[phi.over.at_ob[b].tgt[alpha]]
            fills = [
                v
                for v in total_b.hom(total_b.tgt[l0], total_b.tgt[l1])
                if qb.p.mor_map[v] == idx and total_b.comp[(v, l0)] == target
            ]
            if len(fills) != 1:
                raise ValueError(f"fibre action of {m} on {e_mor}: expected one fill-in, got {fills}")
            mor_map[e_mor] = fills[0]
        at_mor[m] = validate_functor(at_ob[v0], at_ob[v1], ob_map, mor_map, name=f"{label}({m})")
    return validate_diagram(g.total, at_ob, at_mor, name=label)


def indexed_groth(
    z: CatDiagram,
    f: CatDiagram,
    gt: GrothTotal | None = None,
    name: str | None = None,
) -> DiagramOpfib:
    """Collect a diagram on the total category of F into an opfibration over F.

    The component at A is the classical construction applied to the
    restriction of Z along the canonical functor F(A) -> total; the action of
    a base morphism h follows the pair formula (X, ξ) goes to
    (F(h)(X), Z(h, id)(ξ)).
    """
    g = gt if gt is not None else groth(f)
    if z.base is not g.total and not z.base.tables_equal(g.total):
        raise ValueError(f"the base of {z.name} is not the total category of {f.name}")
    label = name or f"groth({z.name})"
    base = f.base
    inc = inc_cocone(f, g)
    parts = {
        a: groth(
            validate_diagram(
                f.at_ob[a],
                {x: z.at_ob[inc.legs[a].ob_map[x]] for x in f.at_ob[a].objects},
                {al: z.at_mor[inc.legs[a].mor_map[al]] for al in f.at_ob[a].mors},
                name=f"{z.name}|{a}",
            )
        )
        for a in base.objects
    }
    at_ob = {a: parts[a].total for a in base.objects}
    at_mor: dict[str, FunctorData] = {}
    for h in base.mors:
        a, b = base.src[h], base.tgt[h]
        fh = f.at_mor[h]
        ob_map = {}
        zh_at: dict[str, FunctorData] = {}
        for x in f.at_ob[a].objects:
            idp = f.at_ob[b].identity[fh.ob_map[x]]
            zh_at[x] = z.at_mor[g.mor_of[(h, idp, x)]]
        for v, (x, xi) in parts[a].ob_pair.items():
            ob_map[v] = parts[b].obj_of[(fh.ob_map[x], zh_at[x].ob_map[xi])]
        mor_map = {}
        for m, (al, big_xi, xi) in parts[a].mor_pair.items():
            x = f.at_ob[a].src[al]
            x1 = f.at_ob[a].tgt[al]
            mor_map[m] = parts[b].mor_of[
                (fh.mor_map[al], zh_at[x1].mor_map[big_xi], zh_at[x].ob_map[xi])
            ]
        at_mor[h] = validate_functor(at_ob[a], at_ob[b], ob_map, mor_map, name=f"{label}({h})")
    total = validate_diagram(base, at_ob, at_mor, name=f"total[{label}]")
    return DiagramOpfib(
        label,
        f,
        total,
        {a: parts[a].projection for a in base.objects},
        {a: Cleavage(parts[a].lifts) for a in base.objects},
    )


def indexed_groth_map(
    zeta: DiagramMor,
    f: CatDiagram,
    phi_dom: DiagramOpfib | None = None,
    phi_cod: DiagramOpfib | None = None,
    gt: GrothTotal | None = None,
    name: str | None = None,
) -> DiagramOpfibMor:
    """Functorial action of indexed_groth on a morphism of diagrams on the total of F."""
    g = gt if gt is not None else groth(f)
    phi1 = phi_dom if phi_dom is not None else indexed_groth(zeta.dom, f, g)
    phi2 = phi_cod if phi_cod is not None else indexed_groth(zeta.cod, f, g)
    inc = inc_cocone(f, g)
    comps: dict[str, FunctorData] = {}
    for a in f.base.objects:
        leg = inc.legs[a]
        fib = f.at_ob[a]
        d1 = validate_diagram(
            fib,
            {x: zeta.dom.at_ob[leg.ob_map[x]] for x in fib.objects},
            {al: zeta.dom.at_mor[leg.mor_map[al]] for al in fib.mors},
            name=f"{zeta.dom.name}|{a}",
        )
        d2 = validate_diagram(
            fib,
            {x: zeta.cod.at_ob[leg.ob_map[x]] for x in fib.objects},
            {al: zeta.cod.at_mor[leg.mor_map[al]] for al in fib.mors},
            name=f"{zeta.cod.name}|{a}",
        )
        restricted = validate_diagram_mor(
            d1, d2, {x: zeta.components[leg.ob_map[x]] for x in fib.objects}, name=f"{zeta.name}|{a}"
        )
        comps[a] = groth_map(restricted, groth(d1), groth(d2), name=f"groth({zeta.name})@{a}")
    return DiagramOpfibMor(name or f"groth({zeta.name})", phi1, phi2, comps)


def indexed_fibres_map(
    xi: DiagramOpfibMor,
    gt: GrothTotal | None = None,
    name: str | None = None,
) -> DiagramMor:
    """Functorial action of indexed_fibres: restrict each component to the fibres."""
    phi, psi = xi.dom, xi.cod
    g = gt if gt is not None else groth(phi.over)
    z1 = indexed_fibres(phi, g)
    z2 = indexed_fibres(psi, g)
    comps: dict[str, FunctorData] = {}
    for v, (a, x) in g.ob_pair.items():
        t = xi.components[a]
        comps[v] = validate_functor(
            z1.at_ob[v],
            z2.at_ob[v],
            {e: t.ob_map[e] for e in z1.at_ob[v].objects},
            {m: t.mor_map[m] for m in z1.at_ob[v].mors},
            name=f"fibres({xi.name})@{v}",
        )
    return validate_diagram_mor(z1, z2, comps, name=name or f"fibres({xi.name})")


# ---------------------------------------------------------------------------
# round trips


def _over_base_cleavage_candidates(
    phi1: DiagramOpfib, phi2: DiagramOpfib, a: str, budget: Budget
) -> Iterator[tuple[dict, dict]]:
    """Isos G1(A) -> G2(A) over F(A) carrying the first cleavage to the second."""
    p1, p2 = phi1.components[a], phi2.components[a]
    c1, c2 = phi1.cleavages[a], phi2.cleavages[a]
    ob_allowed = lambda x, u: p1.ob_map[x] == p2.ob_map[u]
    mor_allowed = lambda m, n: p1.mor_map[m] == p2.mor_map[n]
    for ob_map, mor_map in iter_iso_tables(
        phi1.total.at_ob[a], phi2.total.at_ob[a], budget, ob_allowed, mor_allowed
    ):
        if all(
            mor_map[m] == c2.lift(ob_map[e], f) for (e, f), m in c1.lifts.items()
        ):
            yield ob_map, mor_map


def diagram_opfib_iso_search(
    phi1: DiagramOpfib,
    phi2: DiagramOpfib,
    budget: int = DEFAULT_BUDGET,
) -> SearchResult:
    """Search for an isomorphism of opfibrations over F: componentwise over-base,
    cleavage preserving, and natural across the base."""
    _require_opfib_flavor(phi1)
    _require_opfib_flavor(phi2)
    result = diagram_iso_search(
        phi1.total,
        phi2.total,
        budget=budget,
        component_candidates=lambda a, b: _over_base_cleavage_candidates(phi1, phi2, a, b),
    )
    if result.status != FOUND:
        return result
    fwd: DiagramMor = result.witness.forward
    for a in phi1.base.objects:
        sub = check_cleavage_preserving(
            fwd.components[a],
            identity_functor(phi1.over.at_ob[a]),
            phi1.component_opfib(a),
            phi2.component_opfib(a),
        )
        if not sub.passed:
            raise ValidationError(sub)
    return result


def indexed_roundtrip_opfib(phi: DiagramOpfib, budget: int = DEFAULT_BUDGET) -> Report:
    """Verify indexed_groth(indexed_fibres(phi)) is isomorphic to phi over F."""
    rep = Report(f"indexed round trip (opfibration side) for {phi.name}")
    gt = groth(phi.over)
    z = indexed_fibres(phi, gt)
    phi2 = indexed_groth(z, phi.over, gt)
    sub = check_diagram_opfib(phi2)
    fail = sub.first_failure()
    rep.record("reconstructed-passes-criterion", None if fail is None else f"{fail.name}: {fail.counterexample}")
    result = diagram_opfib_iso_search(phi2, phi, budget=budget)
    rep.budget_used = result.nodes
    rep.budget_limit = budget
    if result.status == BUDGET:
        rep.budget_exceeded = True
        return rep
    rep.record(
        "roundtrip-isomorphism",
        None if result.found else "no over-base cleavage-preserving isomorphism exists",
    )
    if result.found:
        rep.witnesses.append(result.witness.describe())
    return rep


def indexed_roundtrip_diagram(z: CatDiagram, f: CatDiagram, budget: int = DEFAULT_BUDGET) -> Report:
    """Verify indexed_fibres(indexed_groth(Z)) is naturally isomorphic to Z."""
    rep = Report(f"indexed round trip (diagram side) for {z.name}")
    gt = groth(f)
    phi = indexed_groth(z, f, gt)
    sub = check_diagram_opfib(phi)
    fail = sub.first_failure()
    rep.record("image-passes-criterion", None if fail is None else f"{fail.name}: {fail.counterexample}")
    z2 = indexed_fibres(phi, gt)
    result = diagram_iso_search(z2, z, budget=budget)
    rep.budget_used = result.nodes
    rep.budget_limit = budget
    if result.status == BUDGET:
        rep.budget_exceeded = True
        return rep
    rep.record(
        "roundtrip-isomorphism",
        None if result.found else "no strict natural isomorphism exists",
    )
    if result.found:
        rep.witnesses.append(result.witness.describe())
    return rep


# ---------------------------------------------------------------------------
# discrete restriction


def discrete_check_opfib(phi: DiagramOpfib) -> Report:
    """Is phi discrete, and does the fibre diagram agree (Set-valued iff discrete)?"""
    _require_opfib_flavor(phi)
    rep = Report(f"discrete restriction check for {phi.name}")
    sub = check_diagram_opfib(phi, discrete=True)
    discrete = sub.passed
    rep.ok(f"components-{'discrete' if discrete else 'not-discrete'}")
    z = indexed_fibres(phi)
    set_valued = z.is_set_valued()
    rep.record(
        "set-valued-iff-discrete",
        None
        if set_valued == discrete
        else f"fibre diagram set-valued={set_valued} but discrete={discrete}",
    )
    if not discrete:
        bad = sub.first_failure()
        rep.witnesses.append(f"non-discrete witness: {bad.counterexample}")
    return rep


def discrete_check_diagram(z: CatDiagram, f: CatDiagram) -> Report:
    """Is Z Set-valued, and is its opfibration discrete exactly then?"""
    rep = Report(f"discrete restriction check for {z.name}")
    set_valued = z.is_set_valued()
    rep.ok(f"diagram-{'set-valued' if set_valued else 'not-set-valued'}")
    phi = indexed_groth(z, f)
    sub = check_diagram_opfib(phi, discrete=True)
    discrete = sub.passed
    rep.record(
        "discrete-iff-set-valued",
        None
        if discrete == set_valued
        else f"image discrete={discrete} but set-valued={set_valued}",
    )
    if not set_valued:
        witness = next(
            (v for v in z.at_ob if not z.at_ob[v].is_discrete()),
            None,
        )
        rep.witnesses.append(f"non-discrete fibre at {witness}")
    return rep


# ---------------------------------------------------------------------------
# pseudonaturality in F


def pseudonat_check(alpha: DiagramMor, phi: DiagramOpfib, budget: int = DEFAULT_BUDGET) -> Report:
    """Compare the two paths around the pseudonaturality square of the equivalence.

    Taking fibres after pulling back along alpha must agree, up to strict
    natural isomorphism, with reindexing the fibre diagram along the functor
    that alpha induces between the total categories.
    """
    _require_opfib_flavor(phi)
    rep = Report(f"pseudonaturality check for ({alpha.name},{phi.name})")
    g_dash = groth(alpha.dom)
    g = groth(alpha.cod)
    pulled = pullback_diagram_opfib(alpha, phi)
    path1 = indexed_fibres(pulled, g_dash, name=f"fibres∘pullback({phi.name})")
    int_alpha = groth_map(alpha, g_dash, g)
    path2 = reindex(
        indexed_fibres(phi, g), int_alpha, name=f"reindexed-fibres({phi.name})"
    )
    result = diagram_iso_search(path1, path2, budget=budget)
    rep.budget_used = result.nodes
    rep.budget_limit = budget
    if result.status == BUDGET:
        rep.budget_exceeded = True
        return rep
    rep.record(
        "pseudonaturality-square",
        None if result.found else "the two paths are not naturally isomorphic",
    )
    if result.found:
        rep.witnesses.append(result.witness.describe())
    return rep


# ---------------------------------------------------------------------------
# dualization


def dualize_functor(t: FunctorData, name: str | None = None) -> FunctorData:
    return validate_functor(
        opposite(t.dom), opposite(t.cod), dict(t.ob_map), dict(t.mor_map),
        name=name or f"op({t.name})",
    )


def dualize_diagram(d: CatDiagram, name: str | None = None) -> CatDiagram:
    """Pointwise opposite: same base, each fibre and each action dualized."""
    at_ob = {a: opposite(d.at_ob[a], name=f"op({d.at_ob[a].name})") for a in d.base.objects}
    at_mor = {
        h: validate_functor(
            at_ob[d.base.src[h]],
            at_ob[d.base.tgt[h]],
            dict(d.at_mor[h].ob_map),
            dict(d.at_mor[h].mor_map),
            name=f"op({d.at_mor[h].name})",
        )
        for h in d.base.mors
    }
    return validate_diagram(d.base, at_ob, at_mor, name=name or f"op({d.name})")


def dualize_opfib(phi: DiagramOpfib, name: str | None = None) -> DiagramOpfib:
    """Dualize everything in sight and flip the flavor.

    The cleavage tables are carried verbatim; in the dual they read as chosen
    lifts of a fibration, which is why the result is not fed back into the
    opfibration checkers until dualized again.
    """
    over = dualize_diagram(phi.over)
    total = dualize_diagram(phi.total)
    comps = {
        a: validate_functor(
            total.at_ob[a],
            over.at_ob[a],
            dict(phi.components[a].ob_map),
            dict(phi.components[a].mor_map),
            name=f"op({phi.components[a].name})",
        )
        for a in phi.base.objects
    }
    cleavs = {a: Cleavage(dict(phi.cleavages[a].lifts)) for a in phi.base.objects}
    flavor = "fibration" if phi.flavor == "opfibration" else "opfibration"
    return DiagramOpfib(name or f"op({phi.name})", over, total, comps, cleavs, flavor=flavor)
