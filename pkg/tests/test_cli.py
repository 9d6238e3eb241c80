import json
import os
import sys

import pytest

from relaug.cli import RunConfig, main
from relaug.corpus import read_corpus
from relaug.pairgen import read_manifest, read_pairs


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestParsing:
    def test_version(self, capsys):
        code, out, _ = run_cli(capsys, "--version")
        assert code == 0
        assert "relaug" in out and "0.1.0" in out

    def test_no_subcommand_is_usage_error(self, capsys):
        code, _, err = run_cli(capsys)
        assert code == 2
        assert "usage" in err.lower()

    def test_unknown_flag_is_usage_error(self, capsys, toy12_path):
        code, _, err = run_cli(capsys, "ingest", toy12_path, "--frobnicate")
        assert code == 2
        assert "usage" in err.lower()

    def test_negative_lambda_is_usage_error(self, capsys, toy12_path, tmp_path):
        code, _, _ = run_cli(
            capsys, "pairs", toy12_path, "--lambda", "-1", "--out", str(tmp_path)
        )
        assert code == 2

    def test_zero_multiple_is_usage_error(self, capsys, toy12_path, tmp_path):
        code, _, _ = run_cli(
            capsys, "augment", toy12_path, "--multiple", "0", "--out", str(tmp_path)
        )
        assert code == 2

    def test_bad_backend_is_usage_error(self, capsys, toy12_path, tmp_path):
        code, _, _ = run_cli(
            capsys,
            "augment", toy12_path, "--backend", "quantum", "--out", str(tmp_path),
        )
        assert code == 2

    def test_run_config_invariants(self):
        with pytest.raises(ValueError):
            RunConfig("pairs", "x", threshold=-1)
        with pytest.raises(ValueError):
            RunConfig("augment", "x", multiple=0)


class TestIngest:
    def test_report_on_stdout(self, capsys, toy12_path):
        code, out, err = run_cli(capsys, "ingest", toy12_path)
        assert code == 0
        doc = json.loads(out)
        assert doc["instances"] == 12
        assert doc["relations"]["Cause-Effect"] == 4
        assert doc["unparsed"] == 0
        assert "ok: 12 instances" in err

    def test_missing_file_is_validation_error(self, capsys):
        code, _, err = run_cli(capsys, "ingest", "/nonexistent/corpus.conllu")
        assert code == 1
        assert "error:" in err

    def test_malformed_file_reports_line(self, capsys, tmp_path):
        bad = tmp_path / "bad.conllu"
        bad.write_text("# id r1\n", encoding="utf-8")
        code, _, err = run_cli(capsys, "ingest", str(bad))
        assert code == 1
        assert "line 1" in err

    def test_report_to_out_dir(self, capsys, toy12_path, tmp_path):
        code, out, _ = run_cli(capsys, "ingest", toy12_path, "--out", str(tmp_path))
        assert code == 0
        assert out == ""
        doc = json.loads((tmp_path / "ingest.json").read_text(encoding="utf-8"))
        assert doc["instances"] == 12


class TestPairs:
    def test_default_run(self, capsys, toy12_path, tmp_path):
        code, _, err = run_cli(capsys, "pairs", toy12_path, "--out", str(tmp_path))
        assert code == 0
        manifest = read_manifest(str(tmp_path / "manifest.json"))
        assert manifest.threshold == 3
        assert manifest.epochs_per_task == 5
        assert len(read_pairs(str(tmp_path / "restructure_pairs.jsonl"))) == 12
        assert len(read_pairs(str(tmp_path / "approximate_pairs.jsonl"))) == 28
        assert "12 restructure" in err and "28 approximation" in err

    def test_lambda_flag_controls_matching(self, capsys, toy12_path, tmp_path):
        code, _, _ = run_cli(
            capsys, "pairs", toy12_path, "--lambda", "2", "--out", str(tmp_path)
        )
        assert code == 0
        manifest = read_manifest(str(tmp_path / "manifest.json"))
        assert manifest.threshold == 2
        assert len(read_pairs(str(tmp_path / "approximate_pairs.jsonl"))) == 12

    def test_custom_rules_file(self, capsys, toy12_path, tmp_path):
        rules = tmp_path / "rules.tsv"
        rules.write_text("*\tnmod\tMoveBeforeHead\n", encoding="utf-8")
        out_dir = tmp_path / "out"
        code, _, _ = run_cli(
            capsys,
            "pairs", toy12_path, "--rules", str(rules), "--out", str(out_dir),
        )
        assert code == 0
        records = read_pairs(str(out_dir / "restructure_pairs.jsonl"))
        by_id = {r.source_id: r for r in records}
        # nmod rule fires on r2d, obl-bearing sentences stay put
        assert by_id["r2d"].target_text != by_id["r2d"].source_text
        assert by_id["r2a"].target_text == by_id["r2a"].source_text

    def test_bad_rules_file(self, capsys, toy12_path, tmp_path):
        rules = tmp_path / "rules.tsv"
        rules.write_text("only-one-column\n", encoding="utf-8")
        code, _, err = run_cli(
            capsys,
            "pairs", toy12_path, "--rules", str(rules), "--out", str(tmp_path / "o"),
        )
        assert code == 1
        assert "line 1" in err


class TestAugment:
    def test_template_run(self, capsys, toy12_path, tmp_path):
        code, _, err = run_cli(
            capsys,
            "augment", toy12_path,
            "--multiple", "2", "--backend", "template", "--seed", "3",
            "--out", str(tmp_path),
        )
        assert code == 0
        assert "requested 24, accepted 24, rejected 0" in err
        corpus = read_corpus(str(tmp_path / "augmented.conllu"), allow_unparsed=True)
        assert len(corpus) == 24
        assert (tmp_path / "rejects.jsonl").read_text(encoding="utf-8") == ""

    def test_provenance_recorded(self, capsys, toy12_path, tmp_path):
        run_cli(
            capsys,
            "augment", toy12_path, "--multiple", "1", "--out", str(tmp_path),
        )
        corpus = read_corpus(str(tmp_path / "augmented.conllu"), allow_unparsed=True)
        for inst in corpus.instances:
            assert inst.provenance is not None
            assert inst.provenance.backend == "template"

    def test_command_backend_flag(self, capsys, toy12_path, tmp_path):
        script = tmp_path / "echo.py"
        script.write_text(
            "import json, sys\n"
            "for line in sys.stdin:\n"
            "    req = json.loads(line)\n"
            "    print(json.dumps({'request_id': req['request_id'],"
            " 'generated_text': req['source_text']}), flush=True)\n",
            encoding="utf-8",
        )
        out_dir = tmp_path / "out"
        code, _, err = run_cli(
            capsys,
            "augment", toy12_path,
            "--multiple", "1",
            "--backend", f"command:{sys.executable} {script}",
            "--out", str(out_dir),
        )
        assert code == 0
        assert "accepted 12" in err

    def test_strict_hint_flag_accepted(self, capsys, toy12_path, tmp_path):
        code, _, err = run_cli(
            capsys,
            "augment", toy12_path,
            "--multiple", "1", "--strict-hint", "--out", str(tmp_path),
        )
        assert code == 0
        assert "rejected 0" in err


class TestMetrics:
    def test_json_on_stdout(self, capsys, toy12_path):
        code, out, err = run_cli(capsys, "metrics", toy12_path)
        assert code == 0
        doc = json.loads(out)
        assert doc["macro_ttr"]["exact"] == "13/20"
        assert "relation" in err  # table goes to stderr

    def test_out_dir_files(self, capsys, toy12_path, tmp_path):
        code, out, _ = run_cli(capsys, "metrics", toy12_path, "--out", str(tmp_path))
        assert code == 0
        assert out == ""
        doc = json.loads((tmp_path / "metrics.json").read_text(encoding="utf-8"))
        assert doc["ttr"]["Component-Whole"]["percent"] == "60.0"
        table = (tmp_path / "metrics.txt").read_text(encoding="utf-8")
        assert table.startswith("relation")

    def test_pairs_folded_in(self, capsys, toy12_path, tmp_path):
        pairs_dir = tmp_path / "pairs"
        run_cli(capsys, "pairs", toy12_path, "--out", str(pairs_dir))
        code, out, _ = run_cli(
            capsys, "metrics", toy12_path, "--pairs", str(pairs_dir)
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["pair_stats"]["approximate"] == 28

    def test_scorer_flag(self, capsys, toy12_path, tmp_path):
        scorer = tmp_path / "one.py"
        scorer.write_text("import sys\nfor _ in sys.stdin: print('1.0')\n", encoding="utf-8")
        code, out, _ = run_cli(
            capsys,
            "metrics", toy12_path, "--scorer", f"{sys.executable} {scorer}",
        )
        assert code == 0
        assert json.loads(out)["perplexity"] == 1.0

    def test_unparsed_corpus_is_validation_error(self, capsys, toy12_path, tmp_path):
        aug_dir = tmp_path / "aug"
        run_cli(
            capsys,
            "augment", toy12_path, "--multiple", "1", "--out", str(aug_dir),
        )
        code, _, err = run_cli(capsys, "metrics", str(aug_dir / "augmented.conllu"))
        assert code == 1
        assert "error:" in err


class TestEndToEndDeterminism:
    def test_full_pipeline_byte_reproducible(self, capsys, toy12_path, tmp_path):
        def pipeline(base):
            run_cli(capsys, "pairs", toy12_path, "--out", str(base / "pairs"))
            run_cli(
                capsys,
                "augment", toy12_path,
                "--multiple", "3", "--seed", "7", "--out", str(base / "aug"),
            )
            run_cli(
                capsys,
                "metrics", toy12_path,
                "--pairs", str(base / "pairs"), "--out", str(base / "metrics"),
            )

        a, b = tmp_path / "a", tmp_path / "b"
        pipeline(a)
        pipeline(b)
        for rel in (
            "pairs/restructure_pairs.jsonl",
            "pairs/approximate_pairs.jsonl",
            "pairs/manifest.json",
            "aug/augmented.conllu",
            "aug/rejects.jsonl",
            "metrics/metrics.json",
            "metrics/metrics.txt",
        ):
            assert (a / rel).read_bytes() == (b / rel).read_bytes(), rel
