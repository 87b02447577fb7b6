import json
import subprocess
import sys

import pytest

from kroommates.cli import main
from kroommates.formats import fixture_text, load_fixture, loads_instance, loads_matching, read_instance
from kroommates.knet import k_extend


@pytest.fixture
def fx(tmp_path):
    def path(name):
        p = tmp_path / f"{name}.json"
        if not p.exists():
            p.write_text(fixture_text(name), encoding="utf-8")
        return str(p)

    return path


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def split_matchings(out):
    return [loads_matching(block) for block in out.split("\n\n") if block.strip()]


class TestSolve:
    def test_table2_k1(self, capsys, fx):
        code, out, _ = run(capsys, "solve", "--input", fx("table2"), "--k", "1")
        assert code == 0
        assert out == "a\t-\nb\tc\nc\tb\nd\te\ne\td\n"

    def test_table1_unsat(self, capsys, fx):
        code, out, err = run(capsys, "solve", "--input", fx("table1"), "--k", "0")
        assert code == 1 and out == "" and "unsatisfiable" in err

    def test_table3_all(self, capsys, fx):
        code, out, _ = run(capsys, "solve", "--input", fx("table3"), "--k", "1", "--all")
        assert code == 0
        assert len(split_matchings(out)) == 2

    def test_oracle_agrees(self, capsys, fx):
        _, a, _ = run(capsys, "solve", "--input", fx("table3"), "--k", "1", "--all")
        _, b, _ = run(capsys, "solve", "--input", fx("table3"), "--k", "1", "--all", "--oracle")
        assert a == b

    def test_budget_exit_3(self, capsys, fx):
        code, _, err = run(capsys, "solve", "--input", fx("table3"), "--k", "1", "--max-nodes", "1", "--irving-attempts", "0")
        assert code == 3 and "timeout" in err

    def test_writes_file(self, capsys, fx, tmp_path):
        out = tmp_path / "m.tsv"
        assert run(capsys, "solve", "--input", fx("table4"), "--out", str(out))[0] == 0
        assert loads_matching(out.read_text()).pairs() == (("a", "b"), ("c", "d"))


class TestVerify:
    def write(self, tmp_path, text):
        p = tmp_path / "m.tsv"
        p.write_text(text)
        return str(p)

    def test_blocked(self, capsys, fx, tmp_path):
        m = self.write(tmp_path, "a\tb\nb\ta\nc\td\nd\tc\ne\t-\n")
        code, out, _ = run(capsys, "verify", "--input", fx("table4"), "--k", "1", "--matching", m)
        assert code == 1
        assert "b\te" in out

    def test_stable(self, capsys, fx, tmp_path):
        m = self.write(tmp_path, "a\tb\nb\ta\nc\td\nd\tc\ne\t-\n")
        assert run(capsys, "verify", "--input", fx("table4"), "--k", "0", "--matching", m)[0] == 0

    def test_forbidden_pair_exit_2(self, capsys, fx, tmp_path):
        # b declared d unwanted in the running example
        m = self.write(tmp_path, "a\t-\nb\td\nd\tb\nc\t-\ne\t-\n")
        code, _, err = run(capsys, "verify", "--input", fx("table2"), "--k", "2", "--matching", m)
        assert code == 2 and "error" in err

    def test_malformed_exit_2(self, capsys, fx, tmp_path):
        m = self.write(tmp_path, "a\tb\nb\tc\nc\ta\nd\t-\ne\t-\n")
        assert run(capsys, "verify", "--input", fx("table4"), "--matching", m)[0] == 2

    def test_unknown_agent_exit_2(self, capsys, fx, tmp_path):
        m = self.write(tmp_path, "a\tz\nz\ta\nb\t-\nc\t-\nd\t-\ne\t-\n")
        assert run(capsys, "verify", "--input", fx("table4"), "--matching", m)[0] == 2


class TestExtend:
    def test_table2_k2(self, capsys, fx):
        code, out, _ = run(capsys, "extend", "--input", fx("table2"), "--k", "2")
        assert code == 0
        doc = json.loads(out)
        assert doc["preferences"]["e"] == [["d"], ["a", "b"], ["c"]]
        assert doc["provenance"]["a"] == {"e": "stated", "b": "inferred", "d": "network:2"}
        assert loads_instance(out).stated == k_extend(load_fixture("table2"), 2).lists

    def test_table3_k1_b(self, capsys, fx):
        _, out, _ = run(capsys, "extend", "--input", fx("table3"), "--k", "1")
        assert json.loads(out)["preferences"]["b"] == [["f"], ["e"], ["a", "c"]]

    def test_k0_profile_free(self, capsys, fx):
        _, out, _ = run(capsys, "extend", "--input", fx("table4"), "--k", "0")
        assert loads_instance(out).stated == load_fixture("table4").stated

    @pytest.mark.parametrize("name", ["table2", "table3", "table4"])
    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_pipeline_consistency(self, capsys, fx, tmp_path, name, k):
        ext = tmp_path / f"{name}_k{k}.json"
        assert run(capsys, "extend", "--input", fx(name), "--k", str(k), "--output", str(ext))[0] == 0
        direct = run(capsys, "solve", "--input", fx(name), "--k", str(k), "--all")
        piped = run(capsys, "solve", "--input", str(ext), "--k", "0", "--all")
        assert direct[:2] == piped[:2]

    def test_parse_failure_exit_2(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"agents": ["a"], "extra": 1}')
        assert run(capsys, "extend", "--input", str(bad), "--k", "1")[0] == 2


class TestGenerate:
    def test_lma_preset(self, capsys, tmp_path):
        out = tmp_path / "lma.json"
        code, text, _ = run(capsys, "generate", "--preset", "lma", "--agents", "40", "--seed", "7", "--out", str(out))
        assert code == 0
        inst = read_instance(out)
        assert len(inst.agents) == 40
        assert "cd=" in text and "map=" in text and "class=" in text

    def test_empty_lists(self, capsys, tmp_path):
        out = tmp_path / "e.json"
        assert run(capsys, "generate", "--agents", "10", "--edge-prob", "0", "--seed", "1", "--out", str(out))[0] == 0
        assert all(len(l) == 0 for l in read_instance(out).stated.values())

    def test_hma_recipe(self, capsys, tmp_path):
        out = tmp_path / "h.json"
        argv = ["generate", "--agents", "40", "--edge-prob", "0.075", "--seed", "3", "--truncate", "5",
                "--criteria", "5", "--response", "0.5", "--out", str(out)]
        assert run(capsys, *argv)[0] == 0
        inst = read_instance(out)
        assert len(inst.profiles) == 20
        assert max(len(l) for l in inst.stated.values()) <= 5

    def test_deterministic(self, capsys, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        run(capsys, "generate", "--preset", "hma", "--agents", "40", "--seed", "5", "--out", str(a))
        run(capsys, "generate", "--preset", "hma", "--agents", "40", "--seed", "5", "--out", str(b))
        assert a.read_bytes() == b.read_bytes()

    def test_batch(self, capsys, tmp_path):
        d = tmp_path / "batch"
        assert run(capsys, "generate", "--preset", "lma", "--agents", "12", "--count", "3", "--out", str(d))[0] == 0
        assert len(list(d.glob("*.json"))) == 3

    @pytest.mark.parametrize(
        "argv",
        [
            ["generate", "--preset", "lma", "--agents", "40", "--edge-prob", "0.2"],
            ["generate", "--agents", "40"],
            ["generate", "--agents", "1", "--edge-prob", "0.5"],
            ["generate", "--agents", "x"],
            ["solve"],
            ["nonsense"],
            ["solve", "--input", "/nonexistent.json"],
        ],
    )
    def test_invalid_exit_2(self, capsys, tmp_path, argv):
        with_out = argv + (["--out", str(tmp_path / "o.json")] if argv[0] == "generate" else [])
        try:
            code = main(with_out)
        except SystemExit as e:
            code = e.code
        assert code == 2


def test_module_entry_point(fx):
    r = subprocess.run(
        [sys.executable, "-m", "kroommates", "solve", "--input", fx("table1")],
        capture_output=True, text=True,
    )
    assert r.returncode == 1
