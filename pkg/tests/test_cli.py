import json
import subprocess
import sys

import numpy as np
import pytest

from chaincert.cli import main
from chaincert.errors import ParseError
from chaincert.io import parse_chain_json, parse_graph_tsv, parse_input

ROTATION = {"n": 3, "convention": "column", "P": [[0, 0, 1], [1, 0, 0], [0, 1, 0]]}
TWO_STATE = {"n": 2, "convention": "column", "P": [[0.9, 0.1], [0.1, 0.9]]}


def run(capsys, argv, stdin=None, monkeypatch=None):
    if stdin is not None:
        import io

        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


@pytest.fixture
def write(tmp_path):
    def _write(name, content):
        path = tmp_path / name
        path.write_text(content if isinstance(content, str) else json.dumps(content))
        return str(path)

    return _write


class TestParsing:
    def test_row_convention_transposed(self):
        loaded = parse_chain_json(json.dumps({"n": 2, "convention": "row", "P": [[0.8, 0.2], [0.1, 0.9]]}))
        np.testing.assert_array_equal(loaded.matrix, [[0.8, 0.1], [0.2, 0.9]])

    def test_default_convention_is_column(self):
        assert parse_chain_json(json.dumps({"P": [[1.0]]})).convention == "column"

    @pytest.mark.parametrize("text", [
        "{not json",
        '{"n": 2}',
        '{"n": 3, "P": [[1.0, 0.0], [0.0, 1.0]]}',
        '{"n": 2, "convention": "diagonal", "P": [[1, 0], [0, 1]]}',
        '{"n": 2, "P": [["a", 0], [0, 1]]}',
    ])
    def test_bad_json(self, text):
        with pytest.raises(ParseError):
            parse_chain_json(text)

    def test_tsv(self):
        loaded = parse_graph_tsv("# triangle\n0\t1\t1.0\n1\t2\t2\n2\t0\t0.5\n")
        assert loaded.kind == "graph" and loaded.n == 3 and len(loaded.edges) == 3

    @pytest.mark.parametrize("text", ["", "0\t1\n", "0\t1\t-2\n", "a\tb\t1\n", "-1\t0\t1\n"])
    def test_bad_tsv(self, text):
        with pytest.raises(ParseError):
            parse_graph_tsv(text)

    def test_sniffing(self):
        assert parse_input('  {"P": [[1.0]]}').kind == "chain"
        assert parse_input("0\t1\t1\n").kind == "graph"


class TestAnalyze:
    def test_two_state_report(self, capsys, write):
        code, doc = run(capsys, ["analyze", write("c.json", TWO_STATE)])
        assert code == 0
        assert doc["schema_version"] == "1"
        assert doc["conductance"]["phi"] == pytest.approx(0.1, abs=1e-12)
        assert doc["conductance"]["method"] == "exact"
        assert doc["spectrum"]["positive_nontrivial"] == pytest.approx([0.8], abs=1e-12)
        assert doc["certificate"]["eigen"][0]["new_slack"] == pytest.approx(0.35, abs=1e-9)
        assert doc["bounds"]["classical"] == pytest.approx(0.995)
        assert doc["mixing_time"]["heuristic"] is True
        assert "eigenvectors" not in doc["spectrum"]

    def test_full_includes_eigenvectors(self, capsys, write):
        _, doc = run(capsys, ["analyze", "--full", write("c.json", TWO_STATE)])
        assert len(doc["spectrum"]["eigenvectors"]) == 2

    def test_rotation_not_reversible(self, capsys, write):
        code, doc = run(capsys, ["analyze", write("r.json", ROTATION)])
        assert code == 2
        assert doc["error"] == "NotReversible"
        assert doc["max_violation"] == pytest.approx(1 / 3)

    def test_single_state(self, capsys, write):
        code, doc = run(capsys, ["analyze", write("one.json", {"n": 1, "convention": "column", "P": [[1.0]]})])
        assert code == 0
        assert doc["conductance"] == "undefined (n=1)"
        assert doc["certificate"] is None

    def test_row_convention_recorded(self, capsys, write):
        code, doc = run(capsys, ["analyze", write("r.json", {"n": 2, "convention": "row",
                                                             "P": [[0.8, 0.2], [0.1, 0.9]]})])
        assert code == 0
        assert doc["chain"]["convention"] == "row" and doc["chain"]["transposed_on_load"]
        assert doc["stationary"] == pytest.approx([1 / 3, 2 / 3])

    def test_graph_input(self, capsys, write):
        code, doc = run(capsys, ["analyze", write("g.tsv", "0\t1\t1\n1\t2\t1\n2\t0\t1\n")])
        assert code == 0
        assert doc["chain"]["convention"] == "graph"
        assert doc["stationary"] == pytest.approx([1 / 3] * 3)

    def test_bipartite_graph_not_ergodic(self, capsys, write):
        code, doc = run(capsys, ["analyze", write("g.tsv", "0\t1\t1\n1\t2\t1\n")])
        assert code == 2 and doc["error"] == "NotErgodic"

    def test_column_sum_error(self, capsys, write):
        code, doc = run(capsys, ["analyze", write("c.json", {"n": 2, "P": [[0.9, 0.2], [0.2, 0.8]]})])
        assert code == 2 and doc["error"] == "ColumnSumOff"

    def test_parse_error(self, capsys, write):
        code, doc = run(capsys, ["analyze", write("c.json", "{oops")])
        assert code == 2 and doc["error"] == "ParseError"

    def test_too_large_without_sweep(self, capsys, write):
        code, doc = run(capsys, ["analyze", "--max-exact-n", "1", write("c.json", TWO_STATE)])
        assert code == 2 and doc["error"] == "TooLarge"

    def test_sweep_only(self, capsys, write):
        code, doc = run(capsys, ["analyze", "--sweep-only", write("c.json", TWO_STATE)])
        assert code == 0
        assert doc["conductance"]["method"] == "sweep"
        assert doc["certificate"]["rigorous"] is False

    def test_deterministic_modulo_timing(self, capsys, write):
        path = write("c.json", TWO_STATE)
        _, a = run(capsys, ["analyze", path])
        _, b = run(capsys, ["analyze", path])
        a.pop("timing"), b.pop("timing")
        assert json.dumps(a) == json.dumps(b)

    def test_stdin(self, capsys, monkeypatch):
        code, doc = run(capsys, ["analyze"], stdin=json.dumps(TWO_STATE), monkeypatch=monkeypatch)
        assert code == 0 and doc["chain"]["source"] == "<stdin>"


class TestVerify:
    def test_lazy_k4(self, capsys, write):
        P = np.full((4, 4), 1 / 6)
        np.fill_diagonal(P, 0.5)
        code, doc = run(capsys, ["verify", write("k4.json", {"n": 4, "convention": "column", "P": P.tolist()})])
        assert code == 0 and doc["status"] == "PASS"
        assert doc["min_slacks"]["strengthened"] == pytest.approx(7 / 9, abs=1e-8)

    def test_rotation(self, capsys, write):
        code, doc = run(capsys, ["verify", write("r.json", ROTATION)])
        assert code == 2 and doc["error"] == "NotReversible"

    def test_generated_seed_42(self, capsys, write, tmp_path):
        code, gen = run(capsys, ["generate", "--family", "random_reversible", "--n", "8", "--seed", "42"])
        code, doc = run(capsys, ["verify", write("g.json", gen)])
        assert code == 0 and doc["status"] == "PASS"


class TestGenerate:
    def test_two_state(self, capsys):
        code, doc = run(capsys, ["generate", "--family", "two_state", "--a", "0.1", "--b", "0.1"])
        assert code == 0
        assert doc["n"] == 2 and doc["convention"] == "column"
        assert doc["P"] == [[0.9, 0.1], [0.1, 0.9]]

    def test_periodic_rejected(self, capsys):
        code, doc = run(capsys, ["generate", "--family", "cycle", "--n", "4"])
        assert code == 2 and doc["error"] == "Periodic"

    def test_graph_file(self, capsys, write):
        code, doc = run(capsys, ["generate", "--family", "walk_on_graph", "--graph", write("g.tsv", "0\t1\t1\n1\t2\t1\n"),
                                 "--alpha", "0.5"])
        assert code == 0 and doc["n"] == 3

    def test_metropolis(self, capsys):
        code, doc = run(capsys, ["generate", "--family", "metropolis", "--target", "1,2,3"])
        assert code == 0 and doc["n"] == 3


class TestFuzz:
    def test_small_run(self, capsys, tmp_path):
        code, doc = run(capsys, ["fuzz", "--count", "25", "--seed", "3", "--emit-witnesses", str(tmp_path / "w")])
        assert code == 0 and doc["status"] == "PASS"
        assert doc["chains_tested"] == 25
        assert all(v >= -1e-9 for v in doc["min_slacks"].values())
        witness = json.loads((tmp_path / "w" / "worst_strengthened.json").read_text())
        assert witness["convention"] == "column"

    def test_single_chain_matches_verify(self, capsys, write):
        _, fuzz = run(capsys, ["fuzz", "--count", "1", "--seed", "5"])
        chain = fuzz["witnesses"]["strengthened"]["chain"]
        _, verify = run(capsys, ["verify", write("w.json", chain)])
        for key, value in fuzz["min_slacks"].items():
            assert verify["min_slacks"][key] == pytest.approx(value, abs=1e-9)

    def test_two_state_closed_form(self, capsys):
        _, doc = run(capsys, ["fuzz", "--count", "30", "--n-min", "2", "--n-max", "2", "--seed", "1"])
        from chaincert.generators import build, corpus_specs

        expected = []
        for spec in corpus_specs(30, 2, 2, 1):
            P = build(spec).matrix
            a, b = P[1, 0], P[0, 1]
            lam = 1 - a - b
            if lam <= 1e-9:
                continue
            # both singletons are the only candidates; the lighter one has mass <= 1/2
            phi = min(a if b / (a + b) <= 0.5 else np.inf, b if a / (a + b) <= 0.5 else np.inf)
            expected.append(1 - phi ** 2 - lam ** 2)
        assert doc["min_slacks"]["strengthened"] == pytest.approx(min(expected), abs=1e-9)

    def test_parallel_matches_serial(self, capsys):
        _, serial = run(capsys, ["fuzz", "--count", "12", "--seed", "2"])
        _, parallel = run(capsys, ["fuzz", "--count", "12", "--seed", "2", "--workers", "2"])
        assert serial == parallel

    def test_bad_count(self):
        with pytest.raises(SystemExit):
            main(["fuzz", "--count", "0"])


def test_pipe_round_trip():
    gen = subprocess.run([sys.executable, "-m", "chaincert", "generate", "--family", "two_state",
                          "--a", "0.1", "--b", "0.1"], capture_output=True, text=True, check=True)
    out = subprocess.run([sys.executable, "-m", "chaincert", "analyze"], input=gen.stdout,
                         capture_output=True, text=True)
    assert out.returncode == 0
    doc = json.loads(out.stdout)
    assert doc["certificate"]["eigen"][0]["claim2_slack"] == pytest.approx(0.05, abs=1e-9)
