"""Independent oracles shared by the test modules.

Everything here recomputes expected values by brute force, without touching
the code paths under test.
"""

from __future__ import annotations

import itertools

from grothkit.fincat import CatDiagram, FinCat, FunctorData


def group_axiom_failures(elements, table, unit) -> list[str]:
    """Brute-force group axioms on a raw Cayley table."""
    out = []
    for a in elements:
        for b in elements:
            if (a, b) not in table or table[(a, b)] not in elements:
                out.append(f"closure at ({a},{b})")
    if out:
        return out
    for a in elements:
        if table[(unit, a)] != a or table[(a, unit)] != a:
            out.append(f"unit at {a}")
    for a, b, c in itertools.product(elements, repeat=3):
        if table[(table[(a, b)], c)] != table[(a, table[(b, c)])]:
            out.append(f"associativity at ({a},{b},{c})")
    for a in elements:
        if not any(table[(a, b)] == unit and table[(b, a)] == unit for b in elements):
            out.append(f"inverse of {a}")
    return out


def associativity_witnesses(cat: FinCat) -> list[tuple[str, str, str]]:
    """Exhaustive scan for failing associativity triples on validated-shape tables."""
    bad = []
    for f in cat.mors:
        for g in cat.mors:
            if cat.src[g] != cat.tgt[f]:
                continue
            for h in cat.mors:
                if cat.src[h] != cat.tgt[g]:
                    continue
                if cat.comp[(h, cat.comp[(g, f)])] != cat.comp[(cat.comp[(h, g)], f)]:
                    bad.append((h, g, f))
    return bad


def semidirect_table(n: int, invert: bool = True):
    """Cayley table of Z/n x| Z/2, the action inverting when `invert`."""
    els = [(h, s) for h in range(n) for s in range(2)]
    names = {e: f"h{e[0]}s{e[1]}" for e in els}
    table = {}
    for h1, s1 in els:
        for h2, s2 in els:
            h2r = h2 if (s1 == 0 or not invert) else (-h2) % n
            prod = ((h1 + h2r) % n, (s1 + s2) % 2)
            table[(names[(h1, s1)], names[(h2, s2)])] = names[prod]
    return [names[e] for e in els], table, names[(0, 0)]


def center_size(cat: FinCat) -> int:
    """Number of endomorphisms of a one-object category commuting with everything."""
    (obj,) = cat.objects
    return sum(
        1
        for m in cat.mors
        if all(cat.comp[(m, n)] == cat.comp[(n, m)] for n in cat.mors)
    )


def all_functor_tables(c: FinCat, d: FinCat):
    """Every functor c -> d as (ob_map, mor_map) tables, by brute force."""
    results = []
    for images in itertools.product(d.objects, repeat=len(c.objects)):
        ob_map = dict(zip(c.objects, images))
        non_ids = [m for m in c.mors if not c.is_identity(m)]
        pools = []
        for m in non_ids:
            pools.append(list(d.hom(ob_map[c.src[m]], ob_map[c.tgt[m]])))
        for choice in itertools.product(*pools):
            mor_map = {c.identity[x]: d.identity[ob_map[x]] for x in c.objects}
            mor_map.update(dict(zip(non_ids, choice)))
            ok = True
            for g, f in c.composable_pairs():
                if mor_map[c.comp[(g, f)]] != d.comp[(mor_map[g], mor_map[f])]:
                    ok = False
                    break
            if ok:
                results.append((ob_map, mor_map))
    return results


def groth_object_count(d: CatDiagram) -> int:
    return sum(len(d.at_ob[c].objects) for c in d.base.objects)


def groth_morphism_count(d: CatDiagram) -> int:
    total = 0
    for f in d.base.mors:
        c, dd = d.base.src[f], d.base.tgt[f]
        push = d.at_mor[f]
        for x in d.at_ob[c].objects:
            for xp in d.at_ob[dd].objects:
                total += len(d.at_ob[dd].hom(push.ob_map[x], xp))
    return total


def cross_morphism_count(t: FunctorData) -> int:
    """Objects of the comma category of a functor over its codomain."""
    return sum(
        len(t.cod.hom(t.ob_map[x], y)) for x in t.dom.objects for y in t.cod.objects
    )


def functors_table_equal(a: FunctorData, b: FunctorData) -> bool:
    return dict(a.ob_map) == dict(b.ob_map) and dict(a.mor_map) == dict(b.mor_map)
