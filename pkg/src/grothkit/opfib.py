"""Split and discrete opfibration machinery: lifts, cleavage laws, fibres, pullbacks.

A cleaved opfibration is a functor p: E -> C together with a chosen lift for
every (object of E, morphism out of its image).  Nothing is assumed: the
checkers verify cartesianity by the full universal property and the split
laws exhaustively, reporting a minimal counterexample on failure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .fincat import (
    CatDiagram,
    FinCat,
    FunctorData,
    NatTransData,
    compose_functors,
    id_name,
    make_category,
    pair_id,
    validate_diagram,
    validate_functor,
)
from .report import Report, ValidationError


@dataclass(frozen=True, eq=False)
class Cleavage:
    """Chosen lifts: (total object E, base morphism f out of p(E)) -> total morphism."""

    lifts: Mapping[tuple[str, str], str]

    def lift(self, e: str, f: str) -> str:
        return self.lifts[(e, f)]


@dataclass(eq=False)
class CleavedOpfib:
    """A functor equipped with a cleavage; split/discrete status caches are filled by checkers."""

    p: FunctorData
    cleavage: Cleavage
    split_report: Report | None = field(default=None, repr=False)
    discrete_report: Report | None = field(default=None, repr=False)

    @property
    def total(self) -> FinCat:
        return self.p.dom

    @property
    def base(self) -> FinCat:
        return self.p.cod


def cleaved_opfib(p: FunctorData, lifts: Mapping[tuple[str, str], str]) -> CleavedOpfib:
    """Validate a cleavage table for p: totality plus boundary conditions."""
    rep = Report(f"validate cleavage for {p.name}")
    total, base = p.dom, p.cod
    for e in total.objects:
        for f in base.mors:
            if base.src[f] != p.ob_map[e]:
                continue
            if (e, f) not in lifts:
                rep.fail("cleavage-total", f"no lift of {f} at {e}")
                continue
            m = lifts[(e, f)]
            if m not in set(total.mors):
                rep.fail("dangling-identifier", f"lift of {f} at {e} is undeclared morphism {m}")
            elif total.src[m] != e:
                rep.fail("lift-source", f"lift of {f} at {e} starts at {total.src[m]}")
            elif p.mor_map[m] != f:
                rep.fail("lift-over", f"lift of {f} at {e} lies over {p.mor_map[m]}")
    for (e, f) in lifts:
        if e not in set(total.objects) or f not in set(base.mors):
            rep.fail("dangling-identifier", f"lift entry ({e},{f}) names unknown data")
        elif base.src[f] != p.ob_map[e]:
            rep.fail("lift-rooted", f"entry ({e},{f}) but {f} does not start at p({e})")
    if not rep.passed:
        raise ValidationError(rep)
    return CleavedOpfib(p, Cleavage(dict(lifts)))


def _cartesian_failure(p: FunctorData, lift_mor: str, f: str) -> str | None:
    """Full universal property: unique fill-in v for every commuting (e, w) pair."""
    total, base = p.dom, p.cod
    e_obj = total.src[lift_mor]
    fe = total.tgt[lift_mor]
    c = base.tgt[f]
    for e in total.mors:
        if total.src[e] != e_obj:
            continue
        e_prime = total.tgt[e]
        for w in base.hom(c, p.ob_map[e_prime]):
            if base.comp[(w, f)] != p.mor_map[e]:
                continue
            fills = [
                v
                for v in total.hom(fe, e_prime)
                if p.mor_map[v] == w and total.comp[(v, lift_mor)] == e
            ]
            if len(fills) != 1:
                return (
                    f"lift {lift_mor} of {f}: {len(fills)} fill-ins for "
                    f"(e={e}, w={w}), expected exactly one"
                )
    return None


def find_cartesian_lifts(p: FunctorData, e: str, f: str) -> list[str]:
    """All cartesian morphisms out of `e` lying over `f`; empty means no lift exists."""
    base = p.cod
    if base.src[f] != p.ob_map[e]:
        raise ValueError(f"{f} does not start at p({e}) = {p.ob_map[e]}")
    out = []
    for m in p.dom.mors:
        if p.dom.src[m] == e and p.mor_map[m] == f:
            if _cartesian_failure(p, m, f) is None:
                out.append(m)
    return out


def check_split_opfib(q: CleavedOpfib) -> Report:
    """Three verdicts: every lift cartesian, identity law, composition law."""
    rep = Report(f"split opfibration check for {q.p.name}")
    p, cleav = q.p, q.cleavage
    total, base = p.dom, p.cod

    cart_fail = None
    for (e, f), m in sorted(cleav.lifts.items()):
        cart_fail = _cartesian_failure(p, m, f)
        if cart_fail is not None:
            cart_fail = f"at ({e},{f}): {cart_fail}"
            break
    rep.record("lifts-cartesian", cart_fail)

    id_fail = None
    for e in total.objects:
        m = cleav.lift(e, base.identity[p.ob_map[e]])
        if not total.is_identity(m):
            id_fail = f"lift of identity at {e} is {m}, not {total.identity[e]}"
            break
    rep.record("identity-law", id_fail)

    comp_fail = None
    for e in total.objects:
        for f in base.mors:
            if base.src[f] != p.ob_map[e]:
                continue
            mf = cleav.lift(e, f)
            for g in base.mors:
                if base.src[g] != base.tgt[f]:
                    continue
                mg = cleav.lift(total.tgt[mf], g)
                direct = cleav.lift(e, base.comp[(g, f)])
                if total.comp[(mg, mf)] != direct:
                    comp_fail = (
                        f"lift of {g}∘{f} at {e} is {direct}, but composing the "
                        f"lifts gives {total.comp[(mg, mf)]}"
                    )
                    break
            if comp_fail:
                break
        if comp_fail:
            break
    rep.record("composition-law", comp_fail)

    q.split_report = rep
    return rep


def check_discrete_opfib(p: FunctorData) -> Report:
    """Pass iff every (E, f out of p(E)) has exactly one morphism over f out of E."""
    rep = Report(f"discrete opfibration check for {p.name}")
    total, base = p.dom, p.cod
    fail = None
    for e in total.objects:
        for f in base.mors:
            if base.src[f] != p.ob_map[e]:
                continue
            lifts = [m for m in total.mors if total.src[m] == e and p.mor_map[m] == f]
            if len(lifts) != 1:
                fail = f"object {e}, morphism {f}: {len(lifts)} lifts {lifts}"
                break
        if fail:
            break
    rep.record("unique-lifts", fail)
    return rep


def check_cleavage_preserving(
    h: FunctorData,
    k: FunctorData,
    q1: CleavedOpfib,
    q2: CleavedOpfib,
) -> Report:
    """Square (h over k) between cleaved opfibrations: commutes and preserves chosen lifts."""
    rep = Report(f"cleavage preservation for ({h.name},{k.name})")
    left = compose_functors(q2.p, h)
    right = compose_functors(k, q1.p)
    square_fail = None
    for x in q1.total.objects:
        if left.ob_map[x] != right.ob_map[x]:
            square_fail = f"on object {x}: {left.ob_map[x]} != {right.ob_map[x]}"
            break
    if square_fail is None:
        for m in q1.total.mors:
            if left.mor_map[m] != right.mor_map[m]:
                square_fail = f"on morphism {m}: {left.mor_map[m]} != {right.mor_map[m]}"
                break
    rep.record("square-commutes", square_fail)
    if square_fail is not None:
        return rep

    lift_fail = None
    for (e, f), m in sorted(q1.cleavage.lifts.items()):
        expected = q2.cleavage.lift(h.ob_map[e], k.mor_map[f])
        if h.mor_map[m] != expected:
            lift_fail = f"H(lift({e},{f})) = {h.mor_map[m]} but lift({h.ob_map[e]},{k.mor_map[f]}) = {expected}"
            break
    rep.record("lifts-preserved", lift_fail)
    return rep


# ---------------------------------------------------------------------------
# fibres (the quasi-inverse of the Grothendieck construction)


def _require_split(q: CleavedOpfib) -> None:
    rep = q.split_report if q.split_report is not None else check_split_opfib(q)
    if not rep.passed:
        bad = rep.first_failure()
        out = Report(f"fibres of {q.p.name}")
        out.fail("input-split", f"{bad.name}: {bad.counterexample}")
        raise ValidationError(out)


def fibre_category(p: FunctorData, x: str, name: str | None = None) -> FinCat:
    """The subcategory of the total category over x and its identity."""
    total, base = p.dom, p.cod
    objects = [e for e in total.objects if p.ob_map[e] == x]
    idx = base.identity[x]
    mors = [m for m in total.mors if p.mor_map[m] == idx and not total.is_identity(m)]
    arrows = [(m, total.src[m], total.tgt[m]) for m in mors]
    comp = {
        (g, f): total.comp[(g, f)]
        for f in mors
        for g in mors
        if total.src[g] == total.tgt[f]
    }
    return make_category(name or f"fibre({p.name},{x})", objects, arrows, comp)


def _pushforward_mor(q: CleavedOpfib, f: str, e_mor: str) -> str:
    """Image of a fibre morphism under f_*, solved from the universal property."""
    p, cleav = q.p, q.cleavage
    total, base = p.dom, p.cod
    e0, e1 = total.src[e_mor], total.tgt[e_mor]
    lift0 = cleav.lift(e0, f)
    lift1 = cleav.lift(e1, f)
    target = total.comp[(lift1, e_mor)]
    idy = base.identity[base.tgt[f]]
    fills = [
        v
        for v in total.hom(total.tgt[lift0], total.tgt[lift1])
        if p.mor_map[v] == idy and total.comp[(v, lift0)] == target
    ]
    if len(fills) != 1:
        raise ValueError(
            f"pushforward of {e_mor} along {f}: expected exactly one fill-in, got {fills}"
        )
    return fills[0]


def fibres(q: CleavedOpfib, name: str | None = None) -> CatDiagram:
    """The Cat-valued diagram of fibres of a split opfibration."""
    _require_split(q)
    p, cleav = q.p, q.cleavage
    base = p.cod
    at_ob = {x: fibre_category(p, x) for x in base.objects}
    at_mor: dict[str, FunctorData] = {}
    for f in base.mors:
        x, y = base.src[f], base.tgt[f]
        ob_map = {e: p.dom.tgt[cleav.lift(e, f)] for e in at_ob[x].objects}
        mor_map = {
            m: _pushforward_mor(q, f, m) if not at_ob[x].is_identity(m) else at_ob[y].identity[ob_map[at_ob[x].src[m]]]
            for m in at_ob[x].mors
        }
        at_mor[f] = validate_functor(at_ob[x], at_ob[y], ob_map, mor_map, name=f"push({f})")
    return validate_diagram(base, at_ob, at_mor, name=name or f"fibres({q.p.name})")


# ---------------------------------------------------------------------------
# pullback


@dataclass(eq=False)
class PullbackOpfib:
    """Strict pullback of a cleaved opfibration, with its universal square."""

    opfib: CleavedOpfib              # projection to dom(h) with transported cleavage
    to_total: FunctorData            # second projection, over h
    ob_pair: Mapping[str, tuple[str, str]]
    mor_pair: Mapping[str, tuple[str, str]]
    obj_of: Mapping[tuple[str, str], str]
    mor_of: Mapping[tuple[str, str], str]


def pullback_opfib(h: FunctorData, q: CleavedOpfib, name: str | None = None) -> PullbackOpfib:
    """Pull back q: E -> C along h: D -> C; the cleavage transports componentwise."""
    if h.cod is not q.base and not h.cod.tables_equal(q.base):
        raise ValueError(f"{h.name} does not land in the base of {q.p.name}")
    _require_split(q)
    total, base_d = q.total, h.dom
    label = name or f"pb({h.name},{q.p.name})"

    pairs = [(x, e) for x in base_d.objects for e in total.objects if h.ob_map[x] == q.p.ob_map[e]]
    obj_of = {pe: pair_id(*pe) for pe in pairs}
    ob_pair = {v: k for k, v in obj_of.items()}

    mor_pairs = [
        (u, m)
        for u in base_d.mors
        for m in total.mors
        if h.mor_map[u] == q.p.mor_map[m]
    ]

    def mor_name(u: str, m: str) -> str:
        if base_d.is_identity(u) and total.is_identity(m):
            return id_name(pair_id(base_d.src[u], total.src[m]))
        return pair_id(u, m)

    mor_of = {um: mor_name(*um) for um in mor_pairs}
    mor_pair = {v: k for k, v in mor_of.items()}
    arrows = [
        (mor_of[(u, m)], obj_of[(base_d.src[u], total.src[m])], obj_of[(base_d.tgt[u], total.tgt[m])])
        for (u, m) in mor_pairs
        if not (base_d.is_identity(u) and total.is_identity(m))
    ]
    comp = {}
    for (u1, m1) in mor_pairs:
        for (u2, m2) in mor_pairs:
            if base_d.tgt[u1] == base_d.src[u2] and total.tgt[m1] == total.src[m2]:
                if base_d.is_identity(u1) and total.is_identity(m1):
                    continue
                if base_d.is_identity(u2) and total.is_identity(m2):
                    continue
                comp[(mor_of[(u2, m2)], mor_of[(u1, m1)])] = mor_of[
                    (base_d.comp[(u2, u1)], total.comp[(m2, m1)])
                ]
    pb_total = make_category(label, [obj_of[pe] for pe in pairs], arrows, comp)

    proj = validate_functor(
        pb_total,
        base_d,
        {obj_of[(x, e)]: x for (x, e) in pairs},
        {mor_of[(u, m)]: u for (u, m) in mor_pairs},
        name=f"proj[{label}]",
    )
    snd = validate_functor(
        pb_total,
        total,
        {obj_of[(x, e)]: e for (x, e) in pairs},
        {mor_of[(u, m)]: m for (u, m) in mor_pairs},
        name=f"into[{label}]",
    )
    lifts = {
        (obj_of[(x, e)], g): mor_of[(g, q.cleavage.lift(e, h.mor_map[g]))]
        for (x, e) in pairs
        for g in base_d.mors
        if base_d.src[g] == x
    }
    return PullbackOpfib(
        opfib=cleaved_opfib(proj, lifts),
        to_total=snd,
        ob_pair=ob_pair,
        mor_pair=mor_pair,
        obj_of=obj_of,
        mor_of=mor_of,
    )


def cell_transport(
    delta: NatTransData,
    q: CleavedOpfib,
    pb_dom: PullbackOpfib,
    pb_cod: PullbackOpfib,
    name: str | None = None,
) -> FunctorData:
    """The comparison H*E -> K*E induced by a natural transformation delta: H => K.

    On objects it pushes the total component forward along the chosen lift of
    the delta component; on morphisms it is solved from cartesianity.
    """
    p, cleav = q.p, q.cleavage
    total, base = p.dom, p.cod
    h, k = delta.dom, delta.cod
    ob_map = {}
    for v, (x, e) in pb_dom.ob_pair.items():
        lifted = cleav.lift(e, delta.components[x])
        ob_map[v] = pb_cod.obj_of[(x, total.tgt[lifted])]
    mor_map = {}
    for n, (u, m) in pb_dom.mor_pair.items():
        x0, e0 = pb_dom.ob_pair[pb_dom.opfib.total.src[n]]
        x1, e1 = pb_dom.ob_pair[pb_dom.opfib.total.tgt[n]]
        l0 = cleav.lift(e0, delta.components[x0])
        l1 = cleav.lift(e1, delta.components[x1])
        target = total.comp[(l1, m)]
        over = k.mor_map[u]
        fills = [
            v
            for v in total.hom(total.tgt[l0], total.tgt[l1])
            if p.mor_map[v] == over and total.comp[(v, l0)] == target
        ]
        if len(fills) != 1:
            raise ValueError(f"cell transport of {n}: expected one fill-in, got {fills}")
        mor_map[n] = pb_cod.mor_of[(u, fills[0])]
    return validate_functor(
        pb_dom.opfib.total,
        pb_cod.opfib.total,
        ob_map,
        mor_map,
        name=name or f"transport[{delta.name}]",
    )
