import json
import subprocess
import sys

import pytest

from wittkit import cli
from wittkit.errors import LemmaViolation

S13 = {"set": [1, 3]}
SIX = {"divisors_of": 6}


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(path)


def run(capsys, *argv):
    code = cli.main(list(argv))
    return code, capsys.readouterr().out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


# --- validate ----------------------------------------------------------------

def test_validate_divisor_poset(tmp_path, capsys):
    code, rep = run_json(capsys, "validate", write(tmp_path, "p.json", SIX))
    assert code == 0 and rep["valid"] and rep["elements"] == 4 and rep["has_joins"]


def test_validate_broken_norm(tmp_path, capsys):
    bad = {"elements": [{"id": 0, "norm": 1}, {"id": 1, "norm": 2}, {"id": 2, "norm": 3}],
           "divides": [[0, 1], [1, 2]]}
    code, rep = run_json(capsys, "validate", write(tmp_path, "p.json", bad))
    assert code == 1
    assert rep["error"] == "AxiomViolation" and rep["axiom"] == 1


def test_validate_non_monotone_map(tmp_path, capsys):
    m = {"source": {"set": [1, 2]},
         "target": {"coproduct": [{"set": [1]}, {"set": [1, 2]}]},
         "assign": [[1, 0], [2, 2]]}
    code, rep = run_json(capsys, "validate", write(tmp_path, "m.json", m))
    assert code == 1 and rep["error"] == "NotMonotone"


def test_validate_map_flags(tmp_path, capsys):
    m = {"mult": {"poset": S13, "n": 2}}
    code, rep = run_json(capsys, "validate", write(tmp_path, "m.json", m))
    assert code == 0 and rep["flags"] == {"R": True, "T": True, "N": True}


def test_parse_error_reports_position(tmp_path, capsys):
    code, rep = run_json(capsys, "validate", write(tmp_path, "p.json", '{"divisors_of": 6,,}'))
    assert code == 2
    assert rep["line"] == 1 and rep["column"] > 1


def test_missing_file_is_a_parse_error(tmp_path, capsys):
    code, _ = run(capsys, "validate", str(tmp_path / "nope.json"))
    assert code == 2


# --- eval --------------------------------------------------------------------

def test_eval_fold_adds(tmp_path, capsys):
    bundle = {
        "posets": {"S": {"set": [1, 2]}},
        "maps": {"nabla": {"fold": "S"}},
        "word": {"legs": [{"kind": "T", "map": "nabla"}]},
        "vector": {"poset": {"coproduct": ["S", "S"]}, "ring": "Z", "coords": [1, 1, 1, 1]},
    }
    code, out = run(capsys, "eval", write(tmp_path, "b.json", bundle), "--text")
    assert code == 0 and out.strip() == "(2, 1)"


def test_eval_norm_on_ghost_coordinates(tmp_path, capsys):
    word = {"legs": [{"kind": "N", "map": {"mult": {"poset": S13, "n": 2}}}]}
    vec = {"poset": S13, "ring": {"kind": "Poly"}, "ghost": True, "coords": {"1": "x_1", "3": "x_3"}}
    code, out = run(capsys, "eval", write(tmp_path, "w.json", word), write(tmp_path, "v.json", vec), "--text")
    assert code == 0 and out.strip() == "<x_1, x_1^2, x_3, x_3^2>"


def test_eval_witt_input_with_ghost_flag(tmp_path, capsys):
    word = {"legs": [{"kind": "N", "map": {"mult": {"poset": S13, "n": 2}}}]}
    vec = {"poset": S13, "ring": {"kind": "Poly"}, "coords": {"1": "a", "3": "b"}}
    code, out = run(capsys, "eval", write(tmp_path, "w.json", word), write(tmp_path, "v.json", vec),
                    "--ghost", "--text")
    assert code == 0 and out.strip() == "<a, a^2, a^3 + 3*b, a^6 + 6*a^3*b + 9*b^2>"


def test_eval_empty_word_echoes(tmp_path, capsys):
    vec = {"poset": {"set": [1, 2]}, "ring": "Z", "coords": [3, 9]}
    code, rep = run_json(capsys, "eval", write(tmp_path, "w.json", {"legs": []}),
                         write(tmp_path, "v.json", vec))
    assert code == 0 and rep["coords"] == {"1": "3", "2": "9"}


def test_eval_bad_leg_names_position(tmp_path, capsys):
    m = {"mult": {"poset": {"set": [1]}, "n": 2}}
    word = {"legs": [{"kind": "T", "map": m}, {"kind": "T", "map": m}]}
    vec = {"poset": {"set": [1]}, "ring": "Z", "coords": [1]}
    code, rep = run_json(capsys, "eval", write(tmp_path, "w.json", word), write(tmp_path, "v.json", vec))
    assert code == 1 and rep["witness"] == 1


# --- verify ------------------------------------------------------------------

def test_verify_dwork(capsys):
    code, rep = run_json(capsys, "verify", "dwork", "--size", "4", "--seed", "7", "--count", "20")
    assert code == 0 and rep["failed"] == 0 and rep["passed"] > 0 and rep["seed"] == 7


def test_verify_tn(capsys):
    code, rep = run_json(capsys, "verify", "tn", "--size", "3", "--count", "10")
    assert code == 0 and rep["failed"] == 0


@pytest.mark.parametrize("suite", ["rt", "nr", "bispan", "roundtrip"])
def test_verify_other_suites(capsys, suite):
    code, rep = run_json(capsys, "verify", suite, "--size", "3", "--count", "5")
    assert code == 0 and rep["failed"] == 0


def test_verify_nr_on_impossible_pullback(tmp_path, capsys):
    ws = {"posets": {"U": S13, "A": SIX, "T": {"set": [1, 2, 3]}},
          "maps": {"f": {"mult": {"poset": "U", "n": 2, "target": "A"}},
                   "g": {"inclusion": ["T", "A"]}}}
    code, rep = run_json(capsys, "verify", "nr", "--maps", write(tmp_path, "ws.json", ws))
    assert code == 0
    assert rep["status"] == "does_not_exist" and rep["expected"] is True


def test_verify_given_maps_law_holds(tmp_path, capsys):
    ws = {"posets": {"U": S13, "A": SIX, "T": {"set": [1, 2]}},
          "maps": {"f": {"mult": {"poset": "U", "n": 2, "target": "A"}},
                   "g": {"inclusion": ["T", "A"]}}}
    code, rep = run_json(capsys, "verify", "nr", "--maps", write(tmp_path, "ws.json", ws))
    assert code == 0 and rep["status"] == "ok"


def test_verify_is_deterministic(capsys):
    _, first = run(capsys, "verify", "rt", "--seed", "3", "--size", "4", "--count", "5")
    _, second = run(capsys, "verify", "rt", "--seed", "3", "--size", "4", "--count", "5")
    assert first == second


def test_internal_assertion_exit_code(capsys, monkeypatch):
    def boom(*args, **kwargs):
        raise LemmaViolation("broken invariant")
    monkeypatch.setattr(cli, "run_suite", boom)
    code, rep = run_json(capsys, "verify", "rt")
    assert code == 3 and rep["error"] == "LemmaViolation"


# --- show / universal --------------------------------------------------------

def test_show_text(tmp_path, capsys):
    code, out = run(capsys, "--text", "show", write(tmp_path, "p.json", SIX))
    assert code == 0
    assert out.splitlines()[0] == "component 1: 1[1], 2[2], 3[3], 6[6]"
    assert "  1 -> 2" in out and "  3 -> 6" in out


def test_show_json(tmp_path, capsys):
    code, rep = run_json(capsys, "show", write(tmp_path, "p.json", {"set": [1, 2, 3]}))
    assert code == 0 and sorted(rep["covers"]) == [["1", "2"], ["1", "3"]]


def test_universal_sum(tmp_path, capsys):
    code, out = run(capsys, "universal", write(tmp_path, "m.json", {"fold": {"set": [1, 2]}}),
                    "--kind", "transfer", "--text")
    assert code == 0
    assert out.splitlines() == ["1: a_0 + a_2", "2: -a_0*a_2 + a_1 + a_3"]


def test_universal_needs_class(tmp_path, capsys):
    m = {"inclusion": [S13, SIX]}
    code, rep = run_json(capsys, "universal", write(tmp_path, "m.json", m), "--kind", "norm")
    assert code == 1 and rep["error"] == "NotNMap"


def test_console_entry_point(tmp_path):
    path = write(tmp_path, "p.json", SIX)
    res = subprocess.run([sys.executable, "-m", "wittkit.cli", "validate", path, "--text"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == "valid poset"
