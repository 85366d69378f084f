import json
import os
from pathlib import Path

import pytest

from graphswap.cli import main
from graphswap.fileio import read_json, sha256_file


def run_cli(*args) -> int:
    return main([str(a) for a in args])


def make_fixture(tmp_path: Path, seed=5, nodes=120) -> Path:
    fixture = tmp_path / "fixture"
    code = run_cli(
        "synth", "--out", fixture, "--nodes", nodes, "--attachment", 2,
        "--seed", seed, "--n-chains", 20,
    )
    assert code == 0
    return fixture


def test_synth_writes_fixture_files(tmp_path):
    fixture = make_fixture(tmp_path)
    for name in ("corpus.jsonl", "queries.jsonl", "chains.jsonl", "gazetteer.json",
                 "manifest.json", "timings.json"):
        assert (fixture / name).exists()
    manifest = read_json(fixture / "manifest.json")
    assert manifest["command"] == "synth"
    assert "corpus.jsonl" in manifest["artifacts"]
    assert manifest["volatile"] == ["timings.json"]


def test_poison_full_pipeline(tmp_path):
    fixture = make_fixture(tmp_path)
    out = tmp_path / "attack"
    code = run_cli(
        "poison", "--corpus", fixture / "corpus.jsonl",
        "--queries", fixture / "queries.jsonl",
        "--gazetteer", fixture / "gazetteer.json",
        "--budget", 10, "--strategy", "full", "--out", out,
    )
    assert code == 0
    for name in ("plan.json", "poisoned.jsonl", "rewrite_log.json", "manifest.json"):
        assert (out / name).exists()
    log = read_json(out / "rewrite_log.json")
    assert log["totals"]["mentions_modified"] > 0
    assert log["totals"]["vocabulary_subset"] is True


def test_poison_global_needs_no_query_files(tmp_path):
    fixture = make_fixture(tmp_path)
    out = tmp_path / "attack"
    code = run_cli(
        "poison", "--corpus", fixture / "corpus.jsonl",
        "--gazetteer", fixture / "gazetteer.json",
        "--budget", 10, "--strategy", "global", "--out", out,
    )
    assert code == 0


def test_budget_out_of_range_exits_validation(tmp_path, capsys):
    fixture = make_fixture(tmp_path)
    code = run_cli(
        "poison", "--corpus", fixture / "corpus.jsonl",
        "--budget", 150, "--out", tmp_path / "bad",
    )
    assert code == 1
    assert "budget" in capsys.readouterr().err


def test_missing_corpus_exits_io(tmp_path):
    code = run_cli("poison", "--corpus", tmp_path / "nope.jsonl", "--out", tmp_path / "x",
                   "--strategy", "global")
    assert code == 3


def test_failed_run_leaves_no_partial_poisoned_corpus(tmp_path):
    fixture = make_fixture(tmp_path)
    out = tmp_path / "attack"
    # full strategy without query inputs -> validation failure mid-run
    code = run_cli(
        "poison", "--corpus", fixture / "corpus.jsonl",
        "--gazetteer", fixture / "gazetteer.json",
        "--strategy", "full", "--out", out,
    )
    assert code == 1
    assert not (out / "poisoned.jsonl").exists()
    assert not list(out.glob("*.tmp"))


def test_lock_file_prevents_concurrent_runs(tmp_path):
    fixture = make_fixture(tmp_path)
    out = tmp_path / "attack"
    out.mkdir()
    (out / ".lock").touch()
    code = run_cli(
        "poison", "--corpus", fixture / "corpus.jsonl", "--strategy", "global",
        "--gazetteer", fixture / "gazetteer.json", "--out", out,
    )
    assert code == 1
    (out / ".lock").unlink()


def test_run_all_and_reports(tmp_path):
    fixture = make_fixture(tmp_path)
    out = tmp_path / "run"
    code = run_cli(
        "run-all", "--corpus", fixture / "corpus.jsonl",
        "--queries", fixture / "queries.jsonl",
        "--chains", fixture / "chains.jsonl",
        "--gazetteer", fixture / "gazetteer.json",
        "--budget", 10, "--out", out,
    )
    assert code == 0
    report = read_json(out / "eval_report.json")
    assert "path_severance" in report
    assert report["asr"]["source"] == "path_simulator"
    assert "stealth" in report
    assert report["efficiency"]["external_tokens"]["input_tokens"] == 0
    graph_report = read_json(out / "graph_report.json")
    assert "hub_attack" in graph_report
    assert (out / "graph_clean_edges.csv").exists()
    assert (out / "graph_poisoned_edges.csv").exists()


def test_eval_with_responses_file(tmp_path):
    fixture = make_fixture(tmp_path)
    attack = tmp_path / "attack"
    assert run_cli(
        "poison", "--corpus", fixture / "corpus.jsonl",
        "--gazetteer", fixture / "gazetteer.json",
        "--budget", 10, "--strategy", "global", "--out", attack,
    ) == 0
    responses = tmp_path / "responses.jsonl"
    queries = [json.loads(line) for line in (fixture / "queries.jsonl").read_text().splitlines()]
    responses.write_text(
        "\n".join(json.dumps({"query_id": q["id"], "prediction": "no idea"}) for q in queries)
        + "\n"
    )
    out = tmp_path / "eval"
    code = run_cli(
        "eval", "--corpus", fixture / "corpus.jsonl",
        "--poisoned", attack / "poisoned.jsonl",
        "--queries", fixture / "queries.jsonl",
        "--responses", responses,
        "--rewrite-log", attack / "rewrite_log.json",
        "--out", out,
    )
    assert code == 0
    report = read_json(out / "eval_report.json")
    assert report["asr"]["rate"] == 1.0
    assert report["asr"]["source"] == "responses_file"


def test_eval_aggregates_judgments_file(tmp_path):
    fixture = make_fixture(tmp_path)
    attack = tmp_path / "attack"
    assert run_cli(
        "poison", "--corpus", fixture / "corpus.jsonl",
        "--gazetteer", fixture / "gazetteer.json",
        "--budget", 10, "--strategy", "global", "--out", attack,
    ) == 0
    queries = [json.loads(line) for line in (fixture / "queries.jsonl").read_text().splitlines()]
    responses = tmp_path / "responses.jsonl"
    responses.write_text(
        "\n".join(json.dumps({"query_id": q["id"], "prediction": "x"}) for q in queries) + "\n"
    )
    # hand count: of 20 queries, 6 NO, 12 YES, 2 UNJUDGED -> rate 6/18
    judgments = tmp_path / "judgments.jsonl"
    verdicts = ["NO"] * 6 + ["YES"] * 12 + ["UNJUDGED"] * 2
    judgments.write_text(
        "\n".join(
            json.dumps({"query_id": q["id"], "judgment": v})
            for q, v in zip(queries, verdicts)
        )
        + "\n"
    )
    out = tmp_path / "eval"
    code = run_cli(
        "eval", "--corpus", fixture / "corpus.jsonl",
        "--poisoned", attack / "poisoned.jsonl",
        "--queries", fixture / "queries.jsonl",
        "--responses", responses,
        "--judgments", judgments,
        "--out", out,
    )
    assert code == 0
    report = read_json(out / "eval_report.json")
    assert report["asr_judged"]["rate"] == pytest.approx(6 / 18)
    assert report["asr_judged"]["judged"] == 18
    assert report["asr_judged"]["unjudged"] == 2


def test_config_file_with_flag_override(tmp_path):
    fixture = make_fixture(tmp_path)
    config = tmp_path / "config.json"
    config.write_text(json.dumps({
        "corpus": str(fixture / "corpus.jsonl"),
        "gazetteer": str(fixture / "gazetteer.json"),
        "strategy": "global",
        "budget": 5,
    }))
    out = tmp_path / "attack"
    code = run_cli("poison", "--config", config, "--budget", 20, "--out", out)
    assert code == 0
    manifest = read_json(out / "manifest.json")
    assert manifest["config"]["budget"] == 20
    assert manifest["config"]["strategy"] == "global"


def test_unknown_config_key_rejected(tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"no_such_key": 1}))
    assert run_cli("synth", "--config", config, "--out", tmp_path / "x") == 1


def test_same_seed_runs_are_byte_identical(tmp_path):
    fixture = make_fixture(tmp_path)
    outputs = []
    for name in ("one", "two"):
        out = tmp_path / name
        code = run_cli(
            "run-all", "--corpus", fixture / "corpus.jsonl",
            "--queries", fixture / "queries.jsonl",
            "--chains", fixture / "chains.jsonl",
            "--gazetteer", fixture / "gazetteer.json",
            "--budget", 10, "--seed", 7, "--out", out,
        )
        assert code == 0
        outputs.append(out)
    one, two = outputs
    manifest = read_json(one / "manifest.json")
    volatile = set(manifest["volatile"])
    names_one = {p.name for p in one.iterdir()} - volatile - {".lock"}
    names_two = {p.name for p in two.iterdir()} - volatile - {".lock"}
    assert names_one == names_two
    for name in sorted(names_one):
        assert sha256_file(one / name) == sha256_file(two / name), name


def test_queries_file_untouched_by_pipeline(tmp_path):
    fixture = make_fixture(tmp_path)
    qfile = fixture / "queries.jsonl"
    before = sha256_file(qfile)
    out = tmp_path / "run"
    assert run_cli(
        "run-all", "--corpus", fixture / "corpus.jsonl",
        "--queries", qfile,
        "--chains", fixture / "chains.jsonl",
        "--gazetteer", fixture / "gazetteer.json",
        "--budget", 10, "--out", out,
    ) == 0
    assert sha256_file(qfile) == before
