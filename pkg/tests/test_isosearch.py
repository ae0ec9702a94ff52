import random

from grothkit import build
from grothkit.fincat import compose_functors, id_name, identity_functor, validate_functor
from grothkit.isosearch import (
    BUDGET,
    FOUND,
    NONE,
    diagram_iso_search,
    iso_search,
    nat_iso_search,
    over_base_iso_search,
)

from helpers import center_size, semidirect_table


def bz(n):
    elems, table = build.cyclic_table(n)
    return build.delooping(elems, table, name=f"BZ{n}")


def bs3():
    elems, table, unit = semidirect_table(3)
    return build.delooping(elems, table, name="BS3")


class TestIsoSearch:
    def test_identity_witness(self):
        c = build.chain(3)
        res = iso_search(c, c)
        assert res.status == FOUND
        assert compose_functors(res.witness.backward, res.witness.forward).is_identity_functor()

    def test_morphism_count_precheck(self):
        res = iso_search(build.walking_arrow(), build.discrete(2))
        assert res.status == NONE
        assert res.nodes == 0  # refuted by the invariant precheck alone

    def test_z6_vs_relabeled_s3(self):
        z6, s3 = bz(6), bs3()
        # oracle: the centers have different sizes, so no iso can exist
        assert center_size(z6) == 6 and center_size(s3) == 1
        res = iso_search(z6, s3)
        assert res.status == NONE
        assert res.nodes > 0  # same counts, so the search had to run

    def test_budget_exceeded_is_distinct(self):
        z6 = bz(6)
        res = iso_search(z6, bz(6), budget=3)
        assert res.status == BUDGET
        assert res.witness is None

    def test_seeded_order_still_finds(self):
        c = build.product(build.walking_arrow(), build.walking_iso())
        res = iso_search(c, c, rng=random.Random(7))
        assert res.status == FOUND

    def test_found_witness_is_machine_checked(self):
        a = build.product(build.walking_arrow(), build.discrete(2))
        b = build.product(build.discrete(2), build.walking_arrow())
        res = iso_search(a, b)
        assert res.status == FOUND
        fwd, bwd = res.witness.forward, res.witness.backward
        assert compose_functors(bwd, fwd).is_identity_functor()
        assert compose_functors(fwd, bwd).is_identity_functor()


class TestNatIsoSearch:
    def test_identity_components(self):
        t = identity_functor(build.chain(3))
        res = nat_iso_search(t, t)
        assert res.status == FOUND
        assert res.witness.forward.is_identity_nat()

    def test_constants_in_groupoid(self):
        wi = build.walking_iso()
        term = build.terminal()
        at_a = validate_functor(term, wi, {"*": "a"}, {id_name("*"): id_name("a")})
        at_b = validate_functor(term, wi, {"*": "b"}, {id_name("*"): id_name("b")})
        res = nat_iso_search(at_a, at_b)
        assert res.status == FOUND
        assert res.witness.forward.components["*"] == "f"

    def test_constants_with_empty_hom(self):
        wa = build.walking_arrow()
        term = build.terminal()
        at_b = validate_functor(term, wa, {"*": "b"}, {id_name("*"): id_name("b")})
        at_a = validate_functor(term, wa, {"*": "a"}, {id_name("*"): id_name("a")})
        res = nat_iso_search(at_b, at_a)  # hom(b, a) is empty
        assert res.status == NONE

    def test_noninvertible_component_rejected(self):
        wa = build.walking_arrow()
        term = build.terminal()
        at_a = validate_functor(term, wa, {"*": "a"}, {id_name("*"): id_name("a")})
        at_b = validate_functor(term, wa, {"*": "b"}, {id_name("*"): id_name("b")})
        res = nat_iso_search(at_a, at_b)  # only candidate f is not invertible
        assert res.status == NONE


class TestStructuredSearches:
    def test_over_base_respects_projection(self):
        wa = build.walking_arrow()
        d2 = build.discrete(2)
        p, fst, snd = build.product_projections(wa, d2)
        res = over_base_iso_search(p, fst, p, fst)
        assert res.status == FOUND
        fwd = res.witness.forward
        assert all(fst.ob_map[fwd.ob_map[x]] == fst.ob_map[x] for x in p.objects)

    def test_diagram_iso_constant_vs_constant(self):
        base = build.chain(3)
        d1 = build.constant_diagram(base, build.walking_iso())
        d2 = build.constant_diagram(base, build.walking_iso())
        res = diagram_iso_search(d1, d2)
        assert res.status == FOUND

    def test_diagram_iso_refuted_on_fibre_mismatch(self):
        base = build.walking_arrow()
        d1 = build.constant_diagram(base, build.walking_iso())
        d2 = build.constant_diagram(base, build.walking_arrow())
        res = diagram_iso_search(d1, d2)
        assert res.status == NONE
