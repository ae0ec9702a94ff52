import json

import pytest

from grothkit.cli import run_command
from grothkit.dsl import parse_workspace
from grothkit.examples import shipped_examples


@pytest.fixture(scope="module")
def exdir(tmp_path_factory):
    target = tmp_path_factory.mktemp("examples")
    rc = run_command(["examples", "-o", str(target)])
    assert rc == 0
    return target


def path(exdir, name):
    return str(exdir / name)


class TestExitCodes:
    def test_validate_ok(self, exdir, capsys):
        assert run_command(["validate", "-i", path(exdir, "walking_arrow.cat")]) == 0
        assert "category WA: ok" in capsys.readouterr().out

    def test_validate_broken_assoc_exits_1_with_witness(self, exdir, capsys):
        rc = run_command(["validate", "-i", path(exdir, "broken_assoc.cat")])
        out = capsys.readouterr().out
        assert rc == 1
        assert "associativity" in out

    def test_check_opfib_mutated_exits_1(self, exdir, capsys):
        rc = run_command(["check-opfib", "-i", path(exdir, "mutated_cleavage.cat"), "p", "mutated"])
        out = capsys.readouterr().out
        assert rc == 1 and "FAIL" in out

    def test_check_cleavage_bad_square_exits_1(self, exdir, capsys):
        rc = run_command([
            "check-cleavage", "-i", path(exdir, "mutated_cleavage.cat"),
            "idT", "idA", "p", "canonical", "p", "mutated",
        ])
        assert rc == 1
        assert "lifts-preserved" in capsys.readouterr().out

    def test_check_discrete_non_discrete_exits_1(self, exdir, capsys):
        rc = run_command(["check-discrete", "-i", path(exdir, "nondiscrete.cat"), "proj"])
        out = capsys.readouterr().out
        assert rc == 1 and "2 lifts" in out

    def test_unknown_entity_exits_2(self, exdir, capsys):
        rc = run_command(["check-discrete", "-i", path(exdir, "nondiscrete.cat"), "missing"])
        assert rc == 2

    def test_parse_error_exits_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.cat"
        bad.write_text("wibble X { }\n")
        assert run_command(["validate", "-i", str(bad)]) == 2

    def test_budget_exceeded_exits_3(self, exdir, capsys):
        rc = run_command([
            "indexed", "-i", path(exdir, "identity_opfib.cat"), "roundtrip", "phi",
            "--budget", "1",
        ])
        assert rc == 3

    def test_env_budget_respected(self, exdir, monkeypatch, capsys):
        monkeypatch.setenv("GROTHKIT_BUDGET", "1")
        rc = run_command(["indexed", "-i", path(exdir, "identity_opfib.cat"), "roundtrip", "phi"])
        assert rc == 3


class TestPipelines:
    def test_groth_delta1_output_is_iso_to_base(self, exdir, tmp_path, capsys):
        out = tmp_path / "total.cat"
        rc = run_command(["groth", "-i", path(exdir, "delta1.cat"), "F", "-o", str(out)])
        assert rc == 0
        capsys.readouterr()
        rc = run_command(["iso", "-i", str(out), "F_total", "A"])
        assert rc == 0
        assert "isomorphic" in capsys.readouterr().out

    def test_groth_semidirect(self, exdir, tmp_path, capsys):
        out = tmp_path / "semi.cat"
        rc = run_command(["groth", "-i", path(exdir, "semidirect.cat"), "F", "-o", str(out)])
        assert rc == 0
        ws = parse_workspace(out.read_text())
        total = ws.get("category", "F_total")
        assert len(total.objects) == 1 and len(total.mors) == 6

    def test_ungroth_roundtrip(self, exdir, tmp_path, capsys):
        mid = tmp_path / "total.cat"
        assert run_command(["groth", "-i", path(exdir, "deltaB.cat"), "F", "-o", str(mid)]) == 0
        capsys.readouterr()
        out = tmp_path / "fibres.cat"
        rc = run_command(["ungroth", "-i", str(mid), "F_proj", "F_cleav", "-o", str(out)])
        assert rc == 0
        ws = parse_workspace(out.read_text())
        assert "F_proj_fibres" in ws.names("diagram")

    def test_indexed_roundtrip_identity_opfib(self, exdir, capsys):
        rc = run_command(["indexed", "-i", path(exdir, "identity_opfib.cat"), "roundtrip", "phi"])
        out = capsys.readouterr().out
        assert rc == 0 and "roundtrip-isomorphism" in out

    def test_indexed_discrete(self, exdir, capsys):
        rc = run_command(["indexed", "-i", path(exdir, "identity_opfib.cat"), "discrete", "phi"])
        assert rc == 0

    def test_factorize(self, exdir, capsys):
        rc = run_command([
            "factorize", "-i", path(exdir, "a2_collapse.cat"), "F", "(f,id_a)@a",
        ])
        out = capsys.readouterr().out
        assert rc == 0 and "cartesian" in out

    def test_base_change_command(self, exdir, tmp_path, capsys):
        extra = tmp_path / "h.cat"
        extra.write_text(
            "functor H : TWO -> TWO {\n  ob: a |-> a ; b |-> b ;\n  arr: f |-> f ;\n}\n"
        )
        rc = run_command([
            "base-change", "-i", path(exdir, "a2_collapse.cat"), "-i", str(extra), "H", "F",
        ])
        assert rc == 0

    def test_build_command_and_dot(self, tmp_path, capsys):
        rc = run_command(["build", "--name", "P", "--spec", "product(C, C)", "-i", str(_write(tmp_path))])
        out = capsys.readouterr().out
        assert rc == 0 and "4 objects" in out
        rc = run_command(["build", "--name", "P", "--spec", "walking_arrow()", "--dot"])
        out = capsys.readouterr().out
        assert rc == 0 and "digraph" in out

    def test_validate_dot_flag(self, exdir, capsys):
        rc = run_command(["validate", "-i", path(exdir, "walking_arrow.cat"), "--dot", "WA"])
        out = capsys.readouterr().out
        assert rc == 0 and 'digraph "WA"' in out


def _write(tmp_path):
    p = tmp_path / "c.cat"
    p.write_text("category C { objects: a b ; arrows: f: a -> b ; }\n")
    return p


class TestJsonReports:
    def test_schema_keys(self, exdir, capsys):
        rc = run_command([
            "check-discrete", "-i", path(exdir, "nondiscrete.cat"), "proj", "--json",
        ])
        payload = json.loads(capsys.readouterr().out)
        assert rc == 1
        assert set(payload) == {"command", "inputs", "verdict", "witnesses", "counterexamples", "budget"}
        assert payload["verdict"] == "fail"
        assert payload["counterexamples"]
        assert set(payload["budget"]) == {"used", "limit"}

    def test_pass_verdict(self, exdir, capsys):
        rc = run_command([
            "indexed", "-i", path(exdir, "identity_opfib.cat"), "roundtrip", "phi", "--json",
        ])
        payload = json.loads(capsys.readouterr().out)
        assert rc == 0 and payload["verdict"] == "pass" and payload["witnesses"]

    def test_examples_list(self, capsys):
        rc = run_command(["examples", "--list"])
        out = capsys.readouterr().out
        assert rc == 0
        for name in shipped_examples():
            assert name in out


COCONE_FILE = """
category A = walking_arrow()
category ONE = terminal()
category U = chain(3)
diagram F on A = constant(ONE)
functor leg_a : ONE -> U { ob: * |-> 0 ; }
functor leg_b : ONE -> U { ob: * |-> 2 ; }
nattrans cell_f : leg_a => leg_b { at * = le(0,2) ; }
cocone s for F { vertex: U ; leg a = leg_a ; leg b = leg_b ; cell f = cell_f ; }
"""


class TestRemainingPathways:
    def test_cocone_factorize_command(self, tmp_path, capsys):
        src = tmp_path / "cocone.cat"
        src.write_text(COCONE_FILE)
        out = tmp_path / "out.cat"
        rc = run_command(["cocone-factorize", "-i", str(src), "s", "-o", str(out)])
        assert rc == 0
        ws = parse_workspace(out.read_text())
        assert "s_factor" in ws.names("functor")

    def test_pullback_command(self, exdir, tmp_path, capsys):
        mid = tmp_path / "total.cat"
        assert run_command(["groth", "-i", path(exdir, "deltaB.cat"), "F", "-o", str(mid)]) == 0
        capsys.readouterr()
        extra = tmp_path / "h.cat"
        extra.write_text(
            "functor H : B -> A {\n  ob: a |-> 0 ; b |-> 2 ;\n  arr: f |-> le(0,2) ;\n}\n"
        )
        out = tmp_path / "pb.cat"
        rc = run_command([
            "pullback", "-i", str(mid), "-i", str(extra), "H", "F_proj", "F_cleav",
            "-o", str(out),
        ])
        assert rc == 0
        ws = parse_workspace(out.read_text())
        assert "pb_H_F_proj_total" in ws.names("category")

    def test_indexed_groth_and_fibres_commands(self, exdir, tmp_path, capsys):
        mid = tmp_path / "total.cat"
        assert run_command(["groth", "-i", path(exdir, "delta1.cat"), "F", "-o", str(mid)]) == 0
        capsys.readouterr()
        extra = tmp_path / "z.cat"
        extra.write_text(
            "category W = walking_arrow()\ndiagram Z on F_total = constant(W)\n"
        )
        out = tmp_path / "phi.cat"
        rc = run_command([
            "indexed", "-i", str(mid), "-i", str(extra), "groth", "Z", "F", "-o", str(out),
        ])
        assert rc == 0
        ws = parse_workspace(out.read_text())
        assert "Z_groth" in ws.names("opfib")
        capsys.readouterr()
        back = tmp_path / "z2.cat"
        rc = run_command(["indexed", "-i", str(out), "fibres", "Z_groth", "-o", str(back)])
        assert rc == 0
        ws2 = parse_workspace(back.read_text())
        assert "Z_groth_fibres" in ws2.names("diagram")

    def test_indexed_check_command(self, exdir, capsys):
        rc = run_command(["indexed", "-i", path(exdir, "identity_opfib.cat"), "check", "phi"])
        assert rc == 0

    def test_indexed_dualize_command(self, exdir, tmp_path, capsys):
        out = tmp_path / "dual.cat"
        rc = run_command([
            "indexed", "-i", path(exdir, "identity_opfib.cat"), "dualize", "phi_over",
            "-o", str(out),
        ])
        assert rc == 0
        assert "phi_over_op" in parse_workspace(out.read_text()).names("diagram")

    def test_indexed_pseudonat_command(self, tmp_path, capsys):
        from grothkit.dsl import Workspace, export_opfib, print_workspace as pw
        from grothkit.dsl import ws_add_dmor, ws_add_functor
        from grothkit import build, examples
        from grothkit.fincat import id_name, validate_diagram_mor, validate_functor
        from grothkit.groth import groth
        from grothkit.indexed import indexed_groth

        coll = build.arrow_diagram(examples.collapse_functor(), name="collapse")
        gtc = groth(coll)
        zc = build.constant_diagram(gtc.total, build.walking_arrow(), name="zc")
        phi = indexed_groth(zc, coll, gtc, name="phi")
        ws = Workspace()
        export_opfib(ws, "phi", phi)
        d1 = build.terminal_diagram(coll.base, name="D1")
        from grothkit.dsl import export_diagram

        export_diagram(ws, "D1", d1, base_name="phi_idx")
        pt_a = validate_functor(d1.at_ob["a"], coll.at_ob["a"], {"*": "a"},
                                {id_name("*"): id_name("a")}, name="pt_a")
        pt_b = validate_functor(d1.at_ob["b"], coll.at_ob["b"], {"*": "a"},
                                {id_name("*"): id_name("a")}, name="pt_b")
        alpha = validate_diagram_mor(d1, coll, {"a": pt_a, "b": pt_b}, name="alpha")
        na = ws_add_functor(ws, "pt_a", pt_a, "D1_at_a", "phi_over_at_a")
        nb = ws_add_functor(ws, "pt_b", pt_b, "D1_at_b", "phi_over_at_b")
        ws_add_dmor(ws, "alpha", alpha, "D1", "phi_over", {"a": na, "b": nb})
        src = tmp_path / "pn.cat"
        src.write_text(pw(ws))
        rc = run_command(["indexed", "-i", str(src), "pseudonat", "alpha", "phi"])
        out = capsys.readouterr().out
        assert rc == 0 and "pseudonaturality-square" in out

    def test_indexed_dualize_opfib_round_trips(self, exdir, tmp_path, capsys):
        out = tmp_path / "dual.cat"
        rc = run_command([
            "indexed", "-i", path(exdir, "identity_opfib.cat"), "dualize", "phi",
            "-o", str(out),
        ])
        assert rc == 0
        ws = parse_workspace(out.read_text())
        dual = ws.get("opfib", "phi_op")
        assert dual.flavor == "fibration"
        from grothkit.indexed import check_diagram_opfib, dualize_opfib

        back = dualize_opfib(dual)
        assert check_diagram_opfib(back).passed
