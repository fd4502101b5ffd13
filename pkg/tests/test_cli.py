import json
from pathlib import Path

import pytest

from credalve import Query, enumerate_strong_extension, is_polytree, load_network
from credalve.cli import main

DATA = Path(__file__).resolve().parent.parent / "data" / "fig1.json"


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestInfer:
    def test_json_report_schema_and_oracle_agreement(self, capsys, fig1_net):
        code, out, _ = run(
            capsys,
            "infer", "--network", str(DATA), "--target", "F",
            "--method", "separable",
        )
        assert code == 0
        report = json.loads(out)
        assert set(report) == {
            "target", "evidence", "method", "bounds", "diagnostics", "version",
        }
        assert report["method"] == "separable"
        for key in ("candidates_examined", "re_removed", "max_slice_size", "ms"):
            assert key in report["diagnostics"]
        oracle = enumerate_strong_extension(fig1_net, Query.from_names(fig1_net, "F"))
        for label, (lo, hi) in report["bounds"].items():
            want = oracle.bounds_by_label()[label]
            assert lo == pytest.approx(want[0], abs=1e-6)
            assert hi == pytest.approx(want[1], abs=1e-6)

    def test_text_output_carries_the_same_numbers(self, capsys):
        code, js, _ = run(
            capsys, "infer", "--network", str(DATA), "--target", "F",
            "--method", "separable",
        )
        report = json.loads(js)
        code, txt, _ = run(
            capsys, "infer", "--network", str(DATA), "--target", "F",
            "--method", "separable", "--output", "text",
        )
        assert code == 0
        for label, (lo, hi) in report["bounds"].items():
            assert f"P({label}) in [{lo:.9f}, {hi:.9f}]" in txt

    def test_evidence_by_label(self, capsys):
        code, out, _ = run(
            capsys, "infer", "--network", str(DATA), "--target", "F",
            "--evidence", "E=e0,H=h1", "--method", "separable",
        )
        assert code == 0
        report = json.loads(out)
        assert report["evidence"] == {"E": "e0", "H": "h1"}

    def test_auto_records_which_path_ran(self, capsys, tmp_path):
        out_file = tmp_path / "pt.json"
        run(capsys, "gen-random", "--nodes", "6", "--polytree", "--binary",
            "--seed", "7", "--out", str(out_file))
        code, out, _ = run(
            capsys, "infer", "--network", str(out_file), "--target", "N5",
            "--method", "auto",
        )
        assert code == 0
        assert json.loads(out)["method"] == "binary-polytree"

    def test_target_in_evidence_exits_2(self, capsys):
        code, _, err = run(
            capsys, "infer", "--network", str(DATA), "--target", "F",
            "--evidence", "F=f0",
        )
        assert code == 2
        assert "evidence" in err

    def test_unknown_value_label_exits_2(self, capsys):
        code, _, err = run(
            capsys, "infer", "--network", str(DATA), "--target", "F",
            "--evidence", "E=nope",
        )
        assert code == 2
        assert "nope" in err

    def test_oracle_guard_exits_3_with_count(self, capsys):
        code, _, err = run(
            capsys, "infer", "--network", str(DATA), "--target", "F",
            "--method", "enumerate", "--max-oracle", "1000",
        )
        assert code == 3
        assert str(2 ** 18) in err

    def test_candidate_guard_exits_3(self, capsys):
        code, _, err = run(
            capsys, "infer", "--network", str(DATA), "--target", "F",
            "--method", "separable", "--max-candidates", "4",
        )
        assert code == 3
        assert "limit" in err


class TestGenSubsetsum:
    def test_network_shape_and_roundtrip(self, capsys, tmp_path):
        out_file = tmp_path / "ss.json"
        code, out, _ = run(
            capsys, "gen-subsetsum", "--set", "1,2", "--target", "3",
            "--out", str(out_file),
        )
        assert code == 0
        suggestion = json.loads(out)
        net = load_network(out_file.read_bytes())
        assert net.n == 3
        assert all(v.cardinality == 4 for v in net.variables)
        assert suggestion["target"] == "Y1"
        code, out, _ = run(
            capsys, "infer", "--network", str(out_file), "--target", "Y1",
            "--method", "separable",
        )
        assert code == 0
        assert json.loads(out)["bounds"]["3"][1] == pytest.approx(1.0)

    def test_empty_set_exits_2(self, capsys, tmp_path):
        code, _, err = run(
            capsys, "gen-subsetsum", "--set", "", "--target", "3",
            "--out", str(tmp_path / "x.json"),
        )
        assert code == 2
        assert err


class TestGenRandom:
    def test_deterministic_bytes(self, capsys, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        run(capsys, "gen-random", "--nodes", "6", "--polytree", "--binary",
            "--seed", "7", "--out", str(a))
        run(capsys, "gen-random", "--nodes", "6", "--polytree", "--binary",
            "--seed", "7", "--out", str(b))
        assert a.read_bytes() == b.read_bytes()

    def test_generated_networks_load(self, capsys, tmp_path):
        out = tmp_path / "n.json"
        run(capsys, "gen-random", "--nodes", "6", "--seed", "7", "--out", str(out))
        net = load_network(out.read_bytes())
        assert net.n == 6

    def test_polytree_flag_holds_across_seeds(self, capsys, tmp_path):
        for seed in range(100):
            out = tmp_path / f"p{seed}.json"
            run(capsys, "gen-random", "--nodes", "7", "--polytree",
                "--seed", str(seed), "--out", str(out))
            assert is_polytree(load_network(out.read_bytes()).dag), seed

    def test_bad_flags_exit_2(self, capsys, tmp_path):
        code, _, err = run(
            capsys, "gen-random", "--nodes", "0", "--seed", "1",
            "--out", str(tmp_path / "x.json"),
        )
        assert code == 2


class TestReportProperties:
    def test_reports_deterministic_except_wall_time(self, capsys):
        _, out1, _ = run(
            capsys, "infer", "--network", str(DATA), "--target", "F",
            "--method", "separable",
        )
        _, out2, _ = run(
            capsys, "infer", "--network", str(DATA), "--target", "F",
            "--method", "separable",
        )
        a, b = json.loads(out1), json.loads(out2)
        a["diagnostics"].pop("ms")
        b["diagnostics"].pop("ms")
        assert a == b

    def test_methods_agree_on_generated_network(self, capsys, tmp_path):
        netfile = tmp_path / "gen.json"
        run(capsys, "gen-random", "--nodes", "5", "--seed", "11",
            "--out", str(netfile))
        _, sep_out, _ = run(
            capsys, "infer", "--network", str(netfile), "--target", "N4",
            "--method", "separable",
        )
        _, enum_out, _ = run(
            capsys, "infer", "--network", str(netfile), "--target", "N4",
            "--method", "enumerate",
        )
        sep, enum = json.loads(sep_out), json.loads(enum_out)
        for label, (lo, hi) in sep["bounds"].items():
            assert lo == pytest.approx(enum["bounds"][label][0], abs=1e-6)
            assert hi == pytest.approx(enum["bounds"][label][1], abs=1e-6)
