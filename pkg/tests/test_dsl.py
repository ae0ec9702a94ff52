import pytest

from grothkit import build, examples
from grothkit.dsl import (
    Workspace,
    WorkspaceParseError,
    export_opfib,
    parse_workspace,
    print_workspace,
    render_dot,
    split_top,
    ws_add_category,
)
from grothkit.groth import groth
from grothkit.indexed import check_diagram_opfib, identity_diagram_opfib


class TestParse:
    def test_walking_arrow_sample(self):
        ws = parse_workspace(examples.shipped_examples()["walking_arrow.cat"])
        c = ws.get("category", "WA")
        assert len(c.objects) == 2 and len(c.mors) == 3

    def test_undeclared_morphism_reference_has_position(self):
        text = "category C {\n  objects: a ;\n  arrows: f: a -> a ;\n  compose: f.q = f ;\n}\n"
        with pytest.raises(WorkspaceParseError) as err:
            parse_workspace(text, "ref.cat")
        d = err.value.diagnostics[0]
        assert d.kind == "reference" and d.file == "ref.cat" and d.line >= 1
        assert "q" in d.message

    def test_semidirect_file_matches_builder_tables(self):
        ws = parse_workspace(examples.shipped_examples()["semidirect.cat"])
        d = ws.get("diagram", "F")
        built = examples.semidirect_diagram()
        assert d.base.tables_equal(built.base)
        assert d.at_ob["*"].tables_equal(built.at_ob["*"])
        assert dict(d.at_mor["s1"].mor_map) == dict(built.at_mor["s1"].mor_map)

    def test_builders_match_library(self):
        text = (
            "category P = poset(a b c : a<b b<c)\n"
            "category PR = product(P, P)\n"
            "category OP = opposite(P)\n"
            "category SL = slice(P, c)\n"
        )
        ws = parse_workspace(text)
        lib = build.poset(["a", "b", "c"], [("a", "b"), ("b", "c")])
        assert ws.get("category", "P").tables_equal(lib)
        assert ws.get("category", "PR").tables_equal(build.product(lib, lib))
        assert ws.get("category", "OP").tables_equal(build.opposite(lib))
        assert ws.get("category", "SL").tables_equal(build.slice_category(lib, "c"))

    def test_one_line_block(self):
        ws = parse_workspace("category C { objects: a b ; arrows: f: a -> b ; }")
        assert len(ws.get("category", "C").mors) == 3

    def test_duplicate_name_rejected(self):
        with pytest.raises(WorkspaceParseError) as err:
            parse_workspace("category C { objects: a ; }\ncategory C { objects: b ; }")
        assert err.value.diagnostics[0].kind == "reference"

    def test_identity_cleavage_entries_default(self):
        files = examples.shipped_examples()
        ws = parse_workspace(files["mutated_cleavage.cat"])
        cl = ws.get("cleavage", "canonical")
        p = ws.get("functor", "p")
        for e in p.dom.objects:
            ident = p.cod.identity[p.ob_map[e]]
            assert (e, ident) in cl.lifts

    def test_error_classes_distinguished(self):
        cases = {
            "category C { objects: a ; arrows: f a -> a ; }": "syntax",
            "functor F : X -> X { }": "reference",
            "category C { objects: a ; arrows: id_a: a -> a ; }": "lexical",
            "category C { objects: a ; arrows: f: a -> b ; }": "semantic",
        }
        for text, expected in cases.items():
            with pytest.raises(WorkspaceParseError) as err:
                parse_workspace(text)
            assert err.value.diagnostics[0].kind == expected, text


class TestPrint:
    def test_round_trip_idempotent_on_shipped_files(self):
        for name, text in examples.shipped_examples().items():
            if name == "broken_assoc.cat":
                continue
            ws = parse_workspace(text, name)
            printed = print_workspace(ws)
            ws2 = parse_workspace(printed, name)
            assert print_workspace(ws2) == printed, name

    def test_groth_output_reparses_byte_stably(self):
        ws = parse_workspace(examples.shipped_examples()["deltaB.cat"])
        d = ws.get("diagram", "F")
        gt = groth(d)
        ws_add_category(ws, "F_total", gt.total)
        printed = print_workspace(ws)
        ws2 = parse_workspace(printed)
        assert ws2.get("category", "F_total").tables_equal(gt.total)
        assert print_workspace(ws2) == printed

    def test_empty_workspace_prints_empty(self):
        assert print_workspace(Workspace()) == ""

    def test_exported_opfib_roundtrips(self):
        phi = identity_diagram_opfib(build.terminal_diagram(build.walking_arrow()), name="phi")
        ws = Workspace()
        export_opfib(ws, "phi", phi)
        printed = print_workspace(ws)
        ws2 = parse_workspace(printed)
        again = ws2.get("opfib", "phi")
        assert check_diagram_opfib(again).passed
        assert print_workspace(ws2) == printed


class TestHelpers:
    def test_split_top_respects_nesting(self):
        assert split_top("(a,b), c") == ["(a,b)", "c"]
        assert split_top("sl(w,(x,y)), (f,g)") == ["sl(w,(x,y))", "(f,g)"]

    def test_render_dot_lists_objects_and_edges(self):
        dot = render_dot(build.walking_arrow())
        assert '"a" -> "b" [label="f"];' in dot
        assert dot.startswith("digraph")


COCONE_FILE = """
category A = walking_arrow()
category ONE = terminal()
category U = chain(3)
diagram F on A = constant(ONE)
functor leg_a : ONE -> U { ob: * |-> 0 ; }
functor leg_b : ONE -> U { ob: * |-> 2 ; }
nattrans cell_f : leg_a => leg_b { at * = le(0,2) ; }
cocone s for F {
  vertex: U ;
  leg a = leg_a ;
  leg b = leg_b ;
  cell f = cell_f ;
}
"""


class TestCoconeEntity:
    def test_cocone_parses_and_factorizes(self):
        from grothkit.groth import cocone_factorize

        ws = parse_workspace(COCONE_FILE, "cocone.cat")
        sigma = ws.get("cocone", "s")
        s = cocone_factorize(sigma)
        gt = groth(sigma.diagram)
        assert s.ob_map[gt.obj_of[("a", "*")]] == "0"
        assert s.ob_map[gt.obj_of[("b", "*")]] == "2"
        assert s.mor_map[gt.mor_of[("f", "id_*", "*")]] == "le(0,2)"

    def test_cocone_round_trips(self):
        ws = parse_workspace(COCONE_FILE, "cocone.cat")
        printed = print_workspace(ws)
        ws2 = parse_workspace(printed)
        assert print_workspace(ws2) == printed

    def test_invalid_cocone_rejected(self):
        bad = COCONE_FILE.replace("at * = le(0,2)", "at * = le(0,1)").replace(
            "ob: * |-> 2", "ob: * |-> 2"
        )
        # the cell now lands at 1 instead of 2: component boundary breaks
        with pytest.raises(WorkspaceParseError) as err:
            parse_workspace(bad)
        assert err.value.diagnostics[0].kind == "semantic"


class TestDmorEntity:
    def test_dmor_parses(self):
        text = (
            "category A = walking_arrow()\n"
            "category ONE = terminal()\n"
            "category B = discrete(2)\n"
            "diagram F1 on A = constant(ONE)\n"
            "diagram F2 on A = constant(B)\n"
            "functor pick : ONE -> B { ob: * |-> x0 ; }\n"
            "dmor al : F1 => F2 { at a = pick ; at b = pick ; }\n"
        )
        ws = parse_workspace(text)
        al = ws.get("dmor", "al")
        assert al.components["a"].ob_map["*"] == "x0"

    def test_dmor_round_trips(self):
        text = (
            "category A = walking_arrow()\n"
            "category ONE = terminal()\n"
            "diagram F1 on A = constant(ONE)\n"
            "functor pick = identity(ONE)\n"
            "dmor al : F1 => F1 { at a = pick ; at b = pick ; }\n"
        )
        ws = parse_workspace(text)
        printed = print_workspace(ws)
        assert print_workspace(parse_workspace(printed)) == printed
