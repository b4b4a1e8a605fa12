import json
from pathlib import Path

import pytest
from conftest import table_instance

from vecpen.cli import EXIT_INVALID, EXIT_IO, EXIT_OK, EXIT_VIOLATION, main
from vecpen.fixtures import identity_instance
from vecpen.io import instance_to_dict, save_instance
from vecpen.problem import generate_random_instance

CORPUS = Path(__file__).parent.parent / "corpus"


@pytest.fixture
def identity_file(tmp_path):
    path = tmp_path / "identity.json"
    save_instance(identity_instance(), path)
    return path


def run(argv, capsys):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr().out


def test_solve_identity(identity_file, capsys):
    code, out = run(["solve", identity_file], capsys)
    assert code == EXIT_OK
    report = json.loads(out)
    inst = identity_instance()
    zero = [i for i in inst.feasible if inst.points[i, 0] == 0]
    assert report["problems"]["S"]["peff"] == zero
    assert zero[0] not in report["problems"]["D_ext"]["peff"]


def test_solve_csv(identity_file, capsys):
    code, out = run(["solve", identity_file, "--format", "csv"], capsys)
    lines = out.splitlines()
    assert code == EXIT_OK
    assert lines[0].startswith("index,feasible,eff_S")
    assert len(lines) == identity_instance().n_points + 1


def test_empty_feasible_set_is_invalid(tmp_path, capsys):
    doc = instance_to_dict(identity_instance())
    doc.pop("topo_tags", None)
    doc["feasible"] = []
    path = tmp_path / "empty.json"
    path.write_text(json.dumps(doc))
    assert main(["solve", str(path)]) == EXIT_INVALID
    assert "$.feasible" in capsys.readouterr().err


def test_missing_file_is_io_error(tmp_path, capsys):
    assert run(["solve", tmp_path / "nope.json"], capsys)[0] == EXIT_IO


def test_bad_arguments_exit_invalid(identity_file, capsys):
    assert run(["solve", identity_file, "--format", "xml"], capsys)[0] == EXIT_INVALID
    assert run(["solve", identity_file, "--eps-grid", "1,-2"], capsys)[0] == EXIT_INVALID


def test_repro(capsys):
    code, out = run(["repro", "all"], capsys)
    assert code == EXIT_OK
    assert {v["theorem"] for v in json.loads(out)["examples"]} == {
        "example:halfspace", "example:bp", "example:sqrt", "example:identity", "example:saturn"}
    assert run(["repro", "torus"], capsys)[0] == EXIT_INVALID


def test_verify_against_corrupted_report(identity_file, tmp_path, capsys):
    code, out = run(["solve", identity_file], capsys)
    report = json.loads(out)
    report["problems"]["S"]["peff"] = []
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(report))
    code, out = run(["verify", identity_file, "--against", bad], capsys)
    assert code == EXIT_VIOLATION
    good = tmp_path / "good.json"
    run(["solve", identity_file, "--report", good], capsys)
    assert run(["verify", identity_file, "--against", good], capsys)[0] == EXIT_OK


def test_verify_skips_when_tags_are_missing(tmp_path, capsys):
    path = tmp_path / "table.json"
    save_instance(table_instance([[1.0], [0.0], [2.0]]), path)
    code, out = run(["verify", path, "--theorems", "convex_barrier"], capsys)
    assert code == EXIT_OK
    verdict = json.loads(out)["instances"][0]["verdicts"][0]
    assert verdict["conclusion"] == "skipped_hypothesis_failed"
    assert run(["verify", path, "--theorems", "fermat"], capsys)[0] == EXIT_INVALID


def test_verify_lemma_flag(identity_file, capsys):
    code, out = run(["verify", identity_file, "--theorems", "subset", "--lemma"], capsys)
    assert code == EXIT_OK
    assert json.loads(out)["lifted_cone_lemma"]["conclusion"] == "verified"


def test_plot_data_one_dimensional(identity_file, capsys):
    code, out = run(["plot-data", identity_file], capsys)
    rows = out.splitlines()
    assert code == EXIT_OK
    assert rows[0] == "index,f1,label,tag"
    assert rows[1].split(",")[2] == "peff"


def test_plot_data_svg(tmp_path, capsys):
    path = tmp_path / "two.json"
    save_instance(generate_random_instance(1, (2, 2)), path)
    svg = tmp_path / "plot.svg"
    code, out = run(["plot-data", path, "--svg", svg], capsys)
    assert code == EXIT_OK
    assert out.splitlines()[0] == "index,f1,f2,label,tag"
    assert svg.read_text().startswith("<svg")


def test_plot_data_rejects_high_dimension(tmp_path, capsys):
    path = tmp_path / "four.json"
    save_instance(generate_random_instance(1, (2, 4), sizes=(5, 4)), path)
    assert run(["plot-data", path], capsys)[0] == EXIT_INVALID


def test_verify_corpus_directory(capsys):
    code, out = run(["verify", CORPUS], capsys)
    assert code == EXIT_OK
    assert len(json.loads(out)["instances"]) == len(list(CORPUS.glob("*.json")))
