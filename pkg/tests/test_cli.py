import json
import os
import random

from acpair.cli import main
from acpair.constructions import lustig, witness_to_json
from acpair.homology import chain_to_json
from acpair.moves import MoveScript, SlideRel, script_to_json
from acpair.presentations import (format_presentation, make_presentation,
                                  parse_presentation)

from chain_fixtures import random_gn_fixture
from lustig_fixtures import lustig_witness_pair


def write(path, text):
    with open(path, "w") as fh:
        fh.write(text)
    return str(path)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_normalize_golden(tmp_path, capsys):
    path = tmp_path / "k1.pres"
    code, out, _ = run(capsys, "lustig", "1", "-o", path)
    assert code == 0
    code, out, _ = run(capsys, "normalize", path)
    assert code == 0
    assert out == ("3\n"
                   "g2^2 g3^-3\n"
                   "g1^2 g2^3 g1^-2 g2^-3\n"
                   "g1^2 g3^4 g1^-2 g3^-4\n")


def test_normalize_is_conjugation_invariant(tmp_path, capsys):
    a = write(tmp_path / "a.pres", "gens: x y\nrel: y x y^-1\n")
    b = write(tmp_path / "b.pres", "gens: x y\nrel: x\n")
    _, out_a, _ = run(capsys, "normalize", a)
    _, out_b, _ = run(capsys, "normalize", b)
    assert out_a == out_b


def test_apply_and_roundtrip(tmp_path, capsys):
    pres = write(tmp_path / "p.pres", "gens: x y\nrel: x\nrel: y\n")
    script = tmp_path / "s.json"
    p = parse_presentation(open(pres).read())
    write(script, json.dumps(script_to_json(
        MoveScript((SlideRel(1, 0, "right"),)), p.gens)))
    code, out, _ = run(capsys, "apply", pres, script)
    assert code == 0
    assert parse_presentation(out).relators == ((1,), (2, 1))


def test_apply_illegal_move_exit_2(tmp_path, capsys):
    pres = write(tmp_path / "p.pres", "gens: x\nrel: x\n")
    script = write(tmp_path / "s.json",
                   json.dumps([{"op": "RemoveTrivialRel", "j": 1}]))
    code, out, err = run(capsys, "apply", pres, script)
    assert code == 2
    assert "move 1" in err


def test_product_cli(tmp_path, capsys):
    a = write(tmp_path / "a.pres", "gens: x\nrel: x\n")
    b = write(tmp_path / "b.pres", "gens: x\nrel: x^2\n")
    code, out, _ = run(capsys, "product", a, b)
    assert code == 0
    assert parse_presentation(out).relators == ((1,), (1, 1))
    c = write(tmp_path / "c.pres", "gens: x y\n")
    code, _, err = run(capsys, "product", a, c)
    assert code == 2


def test_witness_cli(tmp_path, capsys):
    pres = write(tmp_path / "p.pres", "gens: x\nrel: x\n")
    code, out, _ = run(capsys, "witness", pres, "--target", "x^2",
                       "--max-factors", "4", "--max-conj", "2")
    assert code == 0
    data = json.loads(out)
    assert len(data["factors"]) == 2
    code, out, _ = run(capsys, "witness", write(tmp_path / "q.pres",
                                                "gens: x\nrel: x^2\n"),
                       "--target", "x", "--max-factors", "4", "--max-conj", "2",
                       "--max-states", "2000")
    assert code == 1
    assert "unknown" in out


def test_pipeline_and_verify_null_with_supplied_witnesses(tmp_path, capsys):
    k1 = write(tmp_path / "k1.pres", format_presentation(lustig(1)))
    k2 = write(tmp_path / "k2.pres", format_presentation(lustig(2)))
    wdir = tmp_path / "wits"
    os.makedirs(wdir)
    w12, w21 = lustig_witness_pair(1, 2)
    names = lustig(1).gens
    for i, wit in enumerate(w12):
        write(wdir / f"second_over_first_{i+1}.json",
              json.dumps(witness_to_json(wit, names)))
    for i, wit in enumerate(w21):
        write(wdir / f"first_over_second_{i+1}.json",
              json.dumps(witness_to_json(wit, names)))
    bundle = tmp_path / "bundle"
    code, out, _ = run(capsys, "pipeline", k1, k2, "--witnesses", wdir,
                       "-o", bundle)
    assert code == 0, out
    assert "stabilizations: 3" in out
    assert (bundle / "x.sum").exists()
    assert sorted(p.name for p in (bundle / "certs").iterdir()) == [
        "cross.json", "first_self.json", "second_self.json",
        "stabilized_bridge.json"]
    code, out, _ = run(capsys, "verify-null", bundle)
    assert code == 0
    assert "null vector: yes" in out
    code, out, _ = run(capsys, "verify-null", bundle, "--format", "json")
    assert code == 0
    assert json.loads(out)["null"] is True


def test_pipeline_unknown_exits_1(tmp_path, capsys):
    k1 = write(tmp_path / "k1.pres", format_presentation(lustig(1)))
    k2 = write(tmp_path / "k2.pres", format_presentation(lustig(2)))
    bundle = tmp_path / "bundle"
    code, out, _ = run(capsys, "pipeline", k1, k2, "--max-factors", "2",
                       "--max-conj", "1", "--max-states", "200", "-o", bundle)
    assert code == 1
    assert "unknown witnesses" in out
    assert (bundle / "report.txt").exists()


def test_verify_null_detects_broken_bundle(tmp_path, capsys):
    # a sum with no certificates has a surviving self-product
    bundle = tmp_path / "b"
    os.makedirs(bundle / "certs")
    p = make_presentation("x", ["x"])
    write(bundle / "x.sum",
          json.dumps([{"coeff": 1, "presentation": format_presentation(p)}]))
    code, out, _ = run(capsys, "verify-null", bundle)
    assert code == 1
    assert "null vector: NO" in out


def test_search_equiv_cli(tmp_path, capsys):
    a = write(tmp_path / "a.pres", "gens: x y\nrel: x y\nrel: y\n")
    b = write(tmp_path / "b.pres", "gens: x y\nrel: x\nrel: y\n")
    out_script = tmp_path / "s.json"
    code, out, _ = run(capsys, "search-equiv", a, b, "--depth", "2",
                       "-o", out_script)
    assert code == 0
    data = json.loads(open(out_script).read())
    assert data["moves"]
    k1 = write(tmp_path / "k1.pres", format_presentation(lustig(1)))
    k2 = write(tmp_path / "k2.pres", format_presentation(lustig(2)))
    code, out, _ = run(capsys, "search-equiv", k1, k2, "--depth", "3",
                       "--max-states", "400", "--conj-len", "1")
    assert code == 1
    assert "no claim" in out


def test_verify_smove_cli(tmp_path, capsys):
    l1 = make_presentation("x y", ["x", "y x"])
    l2_path = write(tmp_path / "l2.pres", format_presentation(l1))
    l1_path = write(tmp_path / "l1.pres", format_presentation(l1))
    sdir = tmp_path / "scripts"
    os.makedirs(sdir)
    names = ("x", "y")
    write(sdir / "to_l1l1_1.json",
          json.dumps(script_to_json(MoveScript((), "k_prime"), names)))
    write(sdir / "to_l2l2_1.json",
          json.dumps(script_to_json(MoveScript((), "k_prime"), names)))
    code, out, _ = run(capsys, "verify-smove", l1_path, l2_path,
                       "--scripts", sdir)
    assert code == 0
    # perturb: a raw slide is rejected
    write(sdir / "to_l1l1_1.json", json.dumps(
        {"regime": "k_prime",
         "moves": [{"op": "SlideRel", "j": 3, "k": 1, "side": "right"}]}))
    code, out, _ = run(capsys, "verify-smove", l1_path, l2_path,
                       "--scripts", sdir)
    assert code == 1
    assert "rejected" in out


def test_homology_and_glue_cli(tmp_path, capsys):
    rng = random.Random(60)
    c = random_gn_fixture("c2", 3, rng)
    chain = write(tmp_path / "c.json", json.dumps(chain_to_json(c)))
    code, out, _ = run(capsys, "homology", chain, "--at", "2")
    assert code == 0
    assert out.strip() == "H_2 = 0"
    code, out, _ = run(capsys, "homology", chain, "--at", "0", "--format", "json")
    assert code == 0
    assert json.loads(out)["free_rank"] == 1
    glued_path = tmp_path / "g.json"
    code, out, _ = run(capsys, "glue", chain, chain, "-o", glued_path)
    assert code == 0
    code, out, _ = run(capsys, "homology", glued_path, "--at", "2")
    assert code == 0
    assert out.strip() == "H_2 = 0"


def test_homology_group_file_reference(tmp_path, capsys):
    from acpair.homology import dump_group_csv, chain_to_json, FiniteGroup
    rng = random.Random(61)
    c = random_gn_fixture("c3", 3, rng)
    data = chain_to_json(c)
    data["group"] = "c3.csv"
    write(tmp_path / "c3.csv", dump_group_csv(FiniteGroup.cyclic(3)))
    chain = write(tmp_path / "c.json", json.dumps(data))
    code, out, _ = run(capsys, "homology", chain, "--at", "2")
    assert code == 0
    assert out.strip() == "H_2 = 0"


def test_cli_roundtrip_property(tmp_path, capsys):
    # every presentation printed by a subcommand re-parses to an equal value
    for i in (1, 2, 3):
        path = tmp_path / f"k{i}.pres"
        code, out, _ = run(capsys, "lustig", str(i), "-o", path)
        assert code == 0
        text = open(path).read()
        assert format_presentation(parse_presentation(text)) == text


def test_repl_session(tmp_path, capsys, monkeypatch):
    pres = write(tmp_path / "p.pres", "gens: x y\nrel: x\nrel: y\n")
    log = tmp_path / "log.json"
    lines = iter(["slide 2 1 right", "key", "chi", "undo", "inv 1",
                  "bogus", "quit"])
    monkeypatch.setattr("builtins.input", lambda *_: next(lines))
    code, out, _ = run(capsys, "repl", pres, "--log", log)
    assert code == 0
    assert "error" in out  # the bogus command reports, session continues
    data = json.loads(open(log).read())
    assert [m["op"] for m in data["moves"]] == ["InvRel"]


def test_input_error_exit_codes(tmp_path, capsys):
    code, _, err = run(capsys, "normalize", tmp_path / "missing.pres")
    assert code == 2
    bad = write(tmp_path / "bad.pres", "gens: x\nrel: zz\n")
    code, _, err = run(capsys, "normalize", bad)
    assert code == 2
