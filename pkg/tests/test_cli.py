import json

import pytest

from qcaindex.cli import EXIT_NUMERICAL, EXIT_OK, EXIT_VALIDATION, Report, main, render
from qcaindex.gnvw import RationalIndex
from qcaindex.specfile import matrix_to_json


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def json_block(text):
    return json.loads(text.split("--- json ---", 1)[1])


def test_index_of_shift(capsys):
    code, out, _ = run_cli(capsys, "index", "--d", "2", "--sites", "6", "--qca", "shift:1")
    assert code == EXIT_OK
    data = json_block(out)
    assert data["results"]["ind"]["rational"] == "2/1"
    assert all(c["passed"] for c in data["checks"])


def test_classify_witness(capsys):
    code, out, _ = run_cli(capsys, "classify-z2", "--d", "4", "--chi", "2", "--pi0", "1", "--pi1", "2")
    assert code == EXIT_OK
    assert json_block(out)["results"]["witness"] == [1, 2, 4, 0, 9, 7]


def test_collision_pair(capsys):
    code, out, _ = run_cli(capsys, "search-collisions", "--N", "4", "--max-dim", "4")
    assert code == EXIT_OK
    res = json_block(out)["results"]
    assert [(p["a"], p["b"]) for p in res["pairs"]] == [([2, 1, 1, 0], [1, 2, 0, 1])]
    assert res["n4_diagonal_example"]["collides"] is False


def test_report_is_deterministic(capsys, tmp_path):
    argv = ["index", "--qca", "shift:1*brickwork:4", "--seed", "3"]
    first = run_cli(capsys, *argv)[1]
    out = tmp_path / "r.txt"
    code, second, _ = run_cli(capsys, *argv, "--out", str(out))
    assert code == EXIT_OK and first == second
    assert out.read_text() == first


def test_json_spec_file(capsys, tmp_path):
    swap = [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]]
    spec = {"chain": {"d": 2, "n_sites": 6},
            "composition": [{"brickwork": {"layer1": [matrix_to_json(swap), None, None],
                                           "layer2": [None, None, None]}},
                            "shift:1", {"dag": {"shift": 1}}, {"shift": 1}]}
    path = tmp_path / "qca.json"
    path.write_text(json.dumps(spec))
    code, out, _ = run_cli(capsys, "index", "--qca", str(path))
    assert code == EXIT_OK
    assert json_block(out)["results"]["ind"]["rational"] == "2/1"


def test_spi_on_z3_example(capsys):
    code, out, _ = run_cli(capsys, "spi", "--d", "3", "--sites", "12", "--qca", "spi-example:1,0,2/1,0,2", "--rep", "Z3:0,1,1")
    assert code == EXIT_OK
    res = json_block(out)["results"]
    assert res["rind_g_exact"] == {"0": "1+0i", "1": "-1+0i", "2": "-1+0i"}


@pytest.mark.parametrize("argv", [
    ["index", "--qca", "twist:1"],
    ["index", "--qca", "shift:x"],
    ["classify-z2", "--d", "2", "--chi", "0", "--pi0", "1", "--pi1", "2"],
    ["classify-z2", "--d", "4", "--chi", "2", "--pi0", "one", "--pi1", "2"],
    ["transport", "--sites", "6", "--qca", "shift:1"],
    ["index", "--qca", "shift:1", "--interval", "C:0:2"],
    ["nonsense"],
])
def test_invalid_input_exits_with_validation_code(capsys, argv):
    code, _, err = run_cli(capsys, *argv)
    assert code == EXIT_VALIDATION
    assert err


def test_commands_run_clean(capsys):
    for argv in (["doubled-check", "--qca", "shift:1*brickwork:2"],
                 ["transport", "--sites", "8", "--qca", "shift:-1"]):
        assert run_cli(capsys, *argv)[0] == EXIT_OK


def test_failed_check_exits_numerical():
    rep = Report("index", {})
    rep.check("always_false", False)
    assert not rep.ok
    assert EXIT_NUMERICAL == 2


def test_render():
    assert render(RationalIndex(2, 1, 2.0000000001)) == {
        "rational": "2/1", "float": 2.0000000001}
    assert render(complex(-1, -1e-17)) == "-1-1e-17i"
    assert render(complex(0.5, 0.25)) == "0.5+0.25i"
    assert render(1 / 3) == 0.333333333333
    assert render((1, None)) == [1, None]
