"""Command-line pipeline: poison, graph, eval, synth, run-all.

Stages communicate only through files. Each run writes into an output
directory guarded by a lock file, and finishes with a manifest listing the
effective configuration and the sha256 of every deterministic artifact.
Wall-clock timings go to a separate timings.json, which is the one
non-deterministic file a run produces.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from . import chains as chains_mod
from . import evaluate as ev
from . import swap
from .corpus import Corpus, load_corpus, load_queries, save_corpus, save_queries
from .errors import GraphSwapError, ValidationError
from .fileio import read_json, sha256_file, sha256_text, write_json, write_jsonl
from .global_pool import build_global_pool
from .graph import kernels
from .graph.build import build_graph, export_edgelist
from .graph.metrics import hub_attack_report, metrics, centrality, spectral
from .graph.synth import synth_corpus
from .inventory import extract_builtin, import_annotations
from .query_pool import fallback_query_entities, import_query_entities, verify_against_corpus

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2
EXIT_IO = 3


@dataclass
class RunConfig:
    corpus: str | None = None
    queries: str | None = None
    annotations: str | None = None
    query_entities: str | None = None
    gazetteer: str | None = None
    chains: str | None = None
    poisoned: str | None = None
    plan: str | None = None
    rewrite_log: str | None = None
    responses: str | None = None
    judgments: str | None = None
    spend: str | None = None
    out: str = "run"
    budget: float = 5.0
    strategy: str = "full"
    direction: str = "backward"
    window: str = "document"
    seed: int = 0
    hop_slack: int = 1
    ngram_order: int = 3
    missing_policy: str = "strict"
    centrality_limit: int = 2000
    nodes: int = 500
    attachment: int = 2
    docs: int | None = None
    n_chains: int = 50

    def validate(self) -> None:
        if not 0 <= self.budget <= 100:
            raise ValidationError(f"budget must be in [0, 100], got {self.budget}")
        if self.strategy not in swap.STRATEGIES:
            raise ValidationError(f"strategy must be one of {swap.STRATEGIES}")
        if self.direction not in swap.DIRECTIONS:
            raise ValidationError(f"direction must be one of {swap.DIRECTIONS}")
        if self.window not in ("document", "sentence"):
            raise ValidationError("window must be 'document' or 'sentence'")
        if self.missing_policy not in ev.MISSING_POLICIES:
            raise ValidationError(f"missing_policy must be one of {ev.MISSING_POLICIES}")


def effective_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, overridden by the config file, overridden by explicit flags."""
    config = RunConfig()
    if getattr(args, "config", None):
        file_values = read_json(args.config)
        known = {f.name for f in fields(RunConfig)}
        for key, value in file_values.items():
            if key not in known:
                raise ValidationError(f"unknown config key {key!r}")
            setattr(config, key, value)
    for f in fields(RunConfig):
        value = getattr(args, f.name, None)
        if value is not None:
            setattr(config, f.name, value)
    config.validate()
    return config


_PATH_FIELDS = (
    "corpus", "queries", "annotations", "query_entities", "gazetteer", "chains",
    "poisoned", "plan", "rewrite_log", "responses", "judgments", "spend",
)


def _semantic_config(config: RunConfig) -> dict:
    """Config as run identity: the output location is not part of it, and
    inputs that live inside the run directory reduce to their basenames."""
    payload = asdict(config)
    payload.pop("out", None)
    out_dir = Path(config.out).resolve()
    for name in _PATH_FIELDS:
        value = payload.get(name)
        if value:
            resolved = Path(value).resolve()
            if resolved.is_relative_to(out_dir):
                payload[name] = resolved.name
    return payload


def config_hash(config: RunConfig) -> str:
    return sha256_text(json.dumps(_semantic_config(config), sort_keys=True))[:16]


class RunDirectory:
    """Output directory with single-flight locking and a manifest."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.mkdir(parents=True, exist_ok=True)
        self._lock = self.path / ".lock"
        self.artifacts: list[str] = []
        self.volatile: list[str] = []

    def __enter__(self) -> "RunDirectory":
        try:
            fd = os.open(self._lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise ValidationError(
                f"run directory {self.path} is locked (stale {self._lock}?)"
            ) from None
        os.close(fd)
        return self

    def __exit__(self, *exc) -> None:
        if self._lock.exists():
            self._lock.unlink()

    def file(self, name: str, volatile: bool = False) -> Path:
        (self.volatile if volatile else self.artifacts).append(name)
        return self.path / name

    def write_manifest(self, config: RunConfig, command: str) -> None:
        manifest = {
            "command": command,
            "config": _semantic_config(config),
            "config_hash": config_hash(config),
            "kernel_backend": kernels.BACKEND,
            "artifacts": {
                name: sha256_file(self.path / name)
                for name in sorted(self.artifacts)
                if (self.path / name).exists()
            },
            "volatile": sorted(self.volatile),
        }
        write_json(self.path / "manifest.json", manifest)


def _load_inventory(config: RunConfig, corpus: Corpus):
    if config.annotations:
        return import_annotations(corpus, config.annotations)
    gazetteer = read_json(config.gazetteer) if config.gazetteer else None
    return extract_builtin(corpus, gazetteer=gazetteer)


def _require(config: RunConfig, *names: str) -> None:
    for name in names:
        if not getattr(config, name):
            raise ValidationError(f"--{name.replace('_', '-')} is required for this command")


def _build_plan(config: RunConfig, inventory) -> swap.PoisonPlan:
    global_pool = None
    query_pool = None
    if config.strategy in ("global", "full"):
        global_pool = build_global_pool(inventory, config.budget)
    if config.strategy in ("query", "full"):
        if config.query_entities:
            candidates = import_query_entities(config.query_entities)
        else:
            _require(config, "queries")
            candidates = fallback_query_entities(load_queries(config.queries), inventory)
        query_pool = verify_against_corpus(candidates, inventory)
    return swap.build_plan(
        inventory,
        global_pool=global_pool,
        query_pool=query_pool,
        strategy=config.strategy,
        direction=config.direction,
    )


def cmd_poison(config: RunConfig, run: RunDirectory) -> dict[str, float]:
    _require(config, "corpus")
    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    corpus = load_corpus(config.corpus)
    inventory = _load_inventory(config, corpus)
    timings["extract"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    plan = _build_plan(config, inventory)
    timings["plan"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    poisoned, log = swap.rewrite_corpus(corpus, inventory, plan)
    timings["rewrite"] = time.perf_counter() - t0

    swap.save_plan(plan, run.file("plan.json"))
    save_corpus(poisoned, run.file("poisoned.jsonl"))
    swap.save_log(log, run.file("rewrite_log.json"))
    logger.info(
        "poisoned %d mentions across %d documents (injected tokens: %d)",
        log.mentions_modified,
        len(log.by_doc),
        len(log.injected_tokens),
    )
    return timings


def _metrics_payload(graph, config: RunConfig) -> dict:
    m = metrics(graph)
    payload = {
        "nodes": graph.n,
        "edges": graph.n_edges,
        "mean_degree": m.mean_degree,
        "second_moment": m.second_moment,
        "kappa": m.kappa,
        "giant_fraction": m.giant_fraction,
        "giant_size": m.giant_size,
        "degree_histogram": {str(k): v for k, v in m.degree_histogram.items()},
        "powerlaw_gamma": m.powerlaw_gamma,
        "avg_path_length_giant": m.avg_path_length_giant,
    }
    if graph.n_edges >= 1:
        s = spectral(graph)
        payload["lambda_max"] = s.lambda_max
        payload["spectral_iterations"] = s.iterations
        payload["spectral_residual"] = s.residual
    if graph.n <= config.centrality_limit:
        c = centrality(graph)
        payload["centrality"] = {
            "component_restricted": c.component_restricted,
            "top_betweenness": [
                {"surface": e.surface, "type": e.etype, "value": v}
                for e, v in sorted(c.betweenness.items(), key=lambda kv: (-kv[1], kv[0]))[:25]
            ],
        }
    else:
        payload["centrality"] = {"skipped": f"graph exceeds {config.centrality_limit} nodes"}
    return payload


def cmd_graph(config: RunConfig, run: RunDirectory) -> dict[str, float]:
    _require(config, "corpus")
    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    corpus = load_corpus(config.corpus)
    inventory = _load_inventory(config, corpus)
    clean_graph = build_graph(corpus, inventory, window=config.window)
    export_edgelist(clean_graph, run.file("graph_clean_edges.csv"))
    report = {"clean": _metrics_payload(clean_graph, config)}
    timings["clean_graph"] = time.perf_counter() - t0

    if config.poisoned:
        t0 = time.perf_counter()
        poisoned_corpus = load_corpus(config.poisoned)
        poisoned_inventory = _load_inventory(config, poisoned_corpus)
        poisoned_graph = build_graph(poisoned_corpus, poisoned_inventory, window=config.window)
        export_edgelist(poisoned_graph, run.file("graph_poisoned_edges.csv"))
        report["poisoned"] = _metrics_payload(poisoned_graph, config)
        targets = set()
        if config.plan:
            targets = swap.load_plan(config.plan).targets()
        hub = hub_attack_report(clean_graph, poisoned_graph, targets)
        report["hub_attack"] = {
            "targets": hub.targets,
            "nodes": list(hub.nodes),
            "edges": list(hub.edges),
            "giant_fraction": list(hub.giant_fraction),
            "kappa": list(hub.kappa),
            "lambda_max": list(hub.lambda_max),
            "avg_path_length": list(hub.avg_path_length),
            "target_edge_preservation": hub.target_edge_preservation,
            "deltas": hub.deltas,
        }
        timings["poisoned_graph"] = time.perf_counter() - t0

    write_json(run.file("graph_report.json"), report)
    return timings


def cmd_eval(config: RunConfig, run: RunDirectory) -> dict[str, float]:
    _require(config, "corpus", "poisoned")
    timings: dict[str, float] = {}
    report: dict = {
        "seed": config.seed,
        "budget_percent": config.budget,
        "strategy": config.strategy,
        "config_hash": config_hash(config),
    }

    t0 = time.perf_counter()
    corpus = load_corpus(config.corpus)
    poisoned_corpus = load_corpus(config.poisoned)

    clean_graph = poisoned_graph = None
    gold_chains = None
    if config.chains:
        inventory = _load_inventory(config, corpus)
        poisoned_inventory = _load_inventory(config, poisoned_corpus)
        clean_graph = build_graph(corpus, inventory, window=config.window)
        poisoned_graph = build_graph(poisoned_corpus, poisoned_inventory, window=config.window)
        gold_chains = chains_mod.load_chains(config.chains)
        rate, outcomes, excluded = ev.chain_severance(
            gold_chains, clean_graph, poisoned_graph, hop_slack=config.hop_slack
        )
        report["path_severance"] = {
            "rate": rate,
            "hop_slack": config.hop_slack,
            "chains_evaluated": len(outcomes),
            "chains_excluded": excluded,
            "severed": [o.query_id for o in outcomes if o.severed],
        }
    timings["severance"] = time.perf_counter() - t0

    if config.queries:
        t0 = time.perf_counter()
        queries = load_queries(config.queries)
        if config.responses:
            responses = ev.load_responses(config.responses)
            source = "responses_file"
        elif gold_chains is not None and poisoned_graph is not None:
            responses = ev.simulate_responses(
                gold_chains, poisoned_graph, hop_slack=config.hop_slack
            )
            ev.save_responses(responses, run.file("simulated_responses.jsonl"))
            source = "path_simulator"
        else:
            raise ValidationError("eval needs --responses, or --chains to simulate them")
        rate, outcomes = ev.asr(responses, queries, missing_policy=config.missing_policy)
        report["asr"] = {
            "rate": rate,
            "source": source,
            "missing_policy": config.missing_policy,
            "missing": [o.query_id for o in outcomes if o.missing],
        }
        if config.judgments:
            judgments = ev.load_judgments(config.judgments)
            judged = {q: j for q, j in judgments.items() if j != "UNJUDGED"}
            report["asr_judged"] = {
                "rate": (
                    sum(1 for j in judged.values() if j == "NO") / len(judged)
                    if judged
                    else None
                ),
                "judged": len(judged),
                "unjudged": len(judgments) - len(judged),
            }
        timings["asr"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    stealth_report = ev.stealth(corpus, poisoned_corpus, ngram_order=config.ngram_order)
    report["stealth"] = {
        "auc": stealth_report.auc,
        "ngram_order": stealth_report.ngram_order,
        "scored_docs": stealth_report.scored_docs,
    }
    timings["stealth"] = time.perf_counter() - t0

    log = swap.load_log(config.rewrite_log) if config.rewrite_log else None
    if log is not None:
        spend = read_json(config.spend) if config.spend else None
        eff = ev.efficiency_report(log, timings=None, external_tokens=spend)
        report["efficiency"] = {
            "mentions_modified": eff.mentions_modified,
            "net_token_delta": eff.net_token_delta,
            "injected_token_count": eff.injected_token_count,
            "vocabulary_subset": eff.vocabulary_subset,
            "external_tokens": eff.external_tokens,
        }

    write_json(run.file("eval_report.json"), report)
    return timings


def cmd_synth(config: RunConfig, run: RunDirectory) -> dict[str, float]:
    t0 = time.perf_counter()
    fixture = synth_corpus(
        nodes=config.nodes,
        attachment=config.attachment,
        docs=config.docs,
        seed=config.seed,
        n_chains=config.n_chains,
    )
    save_corpus(fixture.corpus, run.file("corpus.jsonl"))
    save_queries(fixture.queries(), run.file("queries.jsonl"))
    chains_mod.save_chains(list(fixture.chains), run.file("chains.jsonl"))
    write_json(run.file("gazetteer.json"), fixture.gazetteer)
    return {"synth": time.perf_counter() - t0}


def cmd_run_all(config: RunConfig, run: RunDirectory) -> dict[str, float]:
    timings = cmd_poison(config, run)
    chained = RunConfig(**asdict(config))
    chained.poisoned = str(run.path / "poisoned.jsonl")
    chained.plan = str(run.path / "plan.json")
    chained.rewrite_log = str(run.path / "rewrite_log.json")
    timings.update(cmd_graph(chained, run))
    timings.update(cmd_eval(chained, run))
    return timings


_COMMANDS = {
    "poison": cmd_poison,
    "graph": cmd_graph,
    "eval": cmd_eval,
    "synth": cmd_synth,
    "run-all": cmd_run_all,
}


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file; flags override its values")
    parser.add_argument("--corpus", help="clean corpus file (jsonl: id, text)")
    parser.add_argument("--queries", help="queries file (jsonl: id, question, answer)")
    parser.add_argument("--annotations", help="external annotations file")
    parser.add_argument("--query-entities", dest="query_entities", help="query entities file")
    parser.add_argument("--gazetteer", help="surface-to-type map (json) for the builtin extractor")
    parser.add_argument("--chains", help="gold chains file")
    parser.add_argument("--poisoned", help="poisoned corpus file")
    parser.add_argument("--plan", help="poison plan file")
    parser.add_argument("--rewrite-log", dest="rewrite_log", help="rewrite log file")
    parser.add_argument("--responses", help="responses file (jsonl: query_id, prediction)")
    parser.add_argument("--judgments", help="judgments file (jsonl: query_id, judgment)")
    parser.add_argument("--spend", help="external token spend report (json)")
    parser.add_argument("--out", help="output directory (default: run)")
    parser.add_argument("--budget", type=float, help="top-n%% budget per type (default 5)")
    parser.add_argument("--strategy", choices=swap.STRATEGIES, help="pool strategy (default full)")
    parser.add_argument("--direction", choices=swap.DIRECTIONS, help="rotation direction")
    parser.add_argument("--window", choices=("document", "sentence"), help="co-occurrence window")
    parser.add_argument("--seed", type=int, help="random seed (default 0)")
    parser.add_argument("--hop-slack", dest="hop_slack", type=int, help="chain hop slack (default 1)")
    parser.add_argument("--ngram-order", dest="ngram_order", type=int, help="stealth n-gram order")
    parser.add_argument(
        "--missing-policy",
        dest="missing_policy",
        choices=ev.MISSING_POLICIES,
        help="how asr treats absent responses",
    )
    parser.add_argument("--nodes", type=int, help="synth: node count")
    parser.add_argument("--attachment", type=int, help="synth: edges per new node")
    parser.add_argument("--docs", type=int, help="synth: document count (default: one per edge)")
    parser.add_argument("--n-chains", dest="n_chains", type=int, help="synth: gold chain count")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphswap",
        description="Entity-swap corpus poisoning and graph corruption analysis.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        _add_common(p)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        config = effective_config(args)
        with RunDirectory(config.out) as run:
            timings = _COMMANDS[args.command](config, run)
            write_json(run.file("timings.json", volatile=True), timings)
            run.write_manifest(config, args.command)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except GraphSwapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
