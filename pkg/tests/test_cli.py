import csv
import io
import json

import pytest

from ncpit.circuit import (
    CircuitProfile,
    Gate,
    PlusRegularCircuit,
    build_power_circuit,
    random_circuit,
    save_circuit,
)
from ncpit.cli import main
from ncpit.field import MERSENNE61, SeededRng, make_prime_field
from ncpit.pit import pit_oracle


def write_power(tmp_path, k=2):
    path = tmp_path / "pow.json"
    save_circuit(build_power_circuit(2, k), path)
    return str(path)


# ---- run ----


def test_run_auto_on_power_circuit(tmp_path, capsys):
    code = main(["run", write_power(tmp_path)])
    out = capsys.readouterr().out
    assert code == 0
    rep = json.loads(out)
    assert rep["verdict"] == "NONZERO"
    assert rep["strategy"] == "depth3"
    assert rep["field"] == MERSENNE61
    assert set(rep) == {
        "N",
        "field",
        "seed",
        "stages",
        "strategy",
        "sweep",
        "trials",
        "verdict",
        "witness",
    }


def test_run_output_is_byte_stable(tmp_path, capsys):
    path = write_power(tmp_path)
    main(["run", path, "--seed", "7"])
    first = capsys.readouterr().out
    main(["run", path, "--seed", "7"])
    assert capsys.readouterr().out == first
    main(["run", path, "--seed", "8"])
    assert capsys.readouterr().out != first


def test_run_writes_to_file(tmp_path, capsys):
    path = write_power(tmp_path)
    out = tmp_path / "report.json"
    assert main(["run", path, "--out", str(out)]) == 0
    assert capsys.readouterr().out == ""
    assert json.loads(out.read_text())["verdict"] == "NONZERO"


def test_run_rejects_unparseable_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "input", "id": 0, "var": "x1"}\nnot json at all\n')
    assert main(["run", str(bad)]) == 2
    assert "error:" in capsys.readouterr().err


def test_run_missing_file(tmp_path, capsys):
    assert main(["run", str(tmp_path / "absent.json")]) == 2
    assert "no such file" in capsys.readouterr().err


def test_run_lists_violations(tmp_path, capsys):
    fld = make_prime_field(MERSENNE61)
    gates = {
        0: Gate(0, "input", var="x1"),
        1: Gate(1, "input", var="x2"),
        2: Gate(2, "times", args=((0, 1), (1, 1))),
        3: Gate(3, "plus", args=((0, 1), (2, 1))),
    }
    circ = PlusRegularCircuit(fld, ["x1", "x2"], gates, 3, layers={3: 1})
    path = tmp_path / "mixed.json"
    save_circuit(circ, path)
    assert main(["run", str(path)]) == 2
    err = capsys.readouterr().err
    assert "violation:" in err


def test_run_dim_cap_exits_3(tmp_path, capsys):
    prof = CircuitProfile(depth=5, n=2, degrees=(2, 2), top_fanin=2)
    circ = random_circuit(prof, make_prime_field(MERSENNE61), SeededRng(5))
    path = tmp_path / "d5.json"
    save_circuit(circ, path)
    assert main(["run", str(path), "--strategy", "depth5", "--dim-cap", "10"]) == 3
    assert "error:" in capsys.readouterr().err


def test_run_oracle_strategy(tmp_path, capsys):
    assert main(["run", write_power(tmp_path), "--strategy", "oracle"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["verdict"] == "NONZERO" and rep["strategy"] == "oracle"


def test_run_depth5_with_degree_override(tmp_path, capsys):
    prof = CircuitProfile(depth=5, n=2, degrees=(2, 2), top_fanin=2)
    circ = random_circuit(prof, make_prime_field(MERSENNE61), SeededRng(6))
    path = tmp_path / "d5.json"
    save_circuit(circ, path)
    assert main(["run", str(path), "--degrees", "2,2"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["strategy"] == "general"
    assert rep["verdict"] == pit_oracle(circ).verdict


def test_nonprime_field_rejected(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["run", write_power(tmp_path), "--field", "10"])
    assert exc.value.code == 2


# ---- gen ----


def test_gen_is_deterministic_and_truthful(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    for outdir in (a, b):
        assert (
            main(
                [
                    "gen",
                    str(outdir),
                    "--depth",
                    "3",
                    "--count",
                    "6",
                    "--seed",
                    "11",
                ]
            )
            == 0
        )
    capsys.readouterr()
    files_a = sorted(p.name for p in a.iterdir())
    assert files_a == sorted(p.name for p in b.iterdir())
    assert "manifest.json" in files_a
    assert sum(1 for n in files_a if n.startswith("circuit_")) == 6
    for name in files_a:
        assert (a / name).read_bytes() == (b / name).read_bytes()
    manifest = json.loads((a / "manifest.json").read_text())
    assert manifest["count"] == 6 and manifest["seed"] == 11
    fld = make_prime_field(manifest["field"])
    planted = 0
    for inst in manifest["instances"]:
        from ncpit.circuit import load_circuit

        circ = load_circuit(a / inst["file"], fld)
        want = pit_oracle(circ).verdict
        assert inst["truth"] == want
        if inst["zero_planted"]:
            planted += 1
            assert want == "ZERO"
    assert planted == 3


def test_gen_infeasible_profile_exits_2(tmp_path, capsys):
    code = main(
        ["gen", str(tmp_path / "x"), "--depth", "4", "--count", "1"]
    )
    assert code == 2
    assert "error:" in capsys.readouterr().err


# ---- expand ----


def test_expand_planted_prints_zero(tmp_path, capsys):
    fld = make_prime_field(101)
    prof = CircuitProfile(depth=3, n=2, degrees=(3,), top_fanin=2, zero_planted=True)
    circ = random_circuit(prof, fld, SeededRng(9))
    path = tmp_path / "z.json"
    save_circuit(circ, path)
    assert main(["expand", str(path), "--field", "101"]) == 0
    assert capsys.readouterr().out.strip() == "0"


def test_expand_shows_monomials(tmp_path, capsys):
    path = tmp_path / "sq.json"
    save_circuit(build_power_circuit(2, 1), path)
    assert main(["expand", str(path)]) == 0
    out = capsys.readouterr().out.strip()
    for mono in ("x1*x1", "x1*x2", "x2*x1", "x2*x2"):
        assert mono in out


# ---- dump-automaton ----


def test_dump_automaton_text(capsys):
    assert main(["dump-automaton", "comtrans", "--s", "2", "--arity", "2"]) == 0
    out = capsys.readouterr().out
    lines = out.splitlines()
    assert lines[0] == "name comtrans(b=2,k=2)"
    assert lines[1] == "dim 4"
    assert lines[3] == "accepts 0 1 2 3"
    assert "transitions" in lines and "matrices" in lines


def test_dump_automaton_seeded_scalars(capsys):
    assert main(["dump-automaton", "step1", "--s", "2", "--n", "1", "--seed", "3"]) == 0
    first = capsys.readouterr().out
    assert main(["dump-automaton", "step1", "--s", "2", "--n", "1", "--seed", "3"]) == 0
    assert capsys.readouterr().out == first
    assert main(["dump-automaton", "step1", "--s", "2", "--n", "1", "--seed", "4"]) == 0
    assert capsys.readouterr().out != first


# ---- bench ----


def test_bench_csv_matches_manifest(tmp_path, capsys):
    corpus = tmp_path / "corpus"
    assert (
        main(["gen", str(corpus), "--depth", "3", "--count", "4", "--seed", "2"]) == 0
    )
    capsys.readouterr()
    assert main(["bench", str(corpus), "--strategy", "depth3", "--jobs", "2"]) == 0
    out = capsys.readouterr().out
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 4
    manifest = json.loads((corpus / "manifest.json").read_text())
    truth = {i["file"]: i["truth"] for i in manifest["instances"]}
    for row in rows:
        want = truth[row["instance"]]
        got = row["verdict"]
        assert got == ("ZERO(probabilistic)" if want == "ZERO" else want)
        assert row["strategy"] == "depth3"
        assert int(row["millis"]) >= 0


def test_bench_empty_corpus(tmp_path, capsys):
    (tmp_path / "empty").mkdir()
    assert main(["bench", str(tmp_path / "empty")]) == 2
    assert "error:" in capsys.readouterr().err
