"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line with its runtime. Tolerances are pinned here and nowhere
else. Run with `pytest tests/test_acceptance.py -s` to see the lines."""
import math
import random
import time

import numpy as np
import pytest

from graphswap.cli import main as cli_main
from graphswap.corpus import save_corpus, save_queries, tokenize
from graphswap.evaluate import chain_severance, efficiency_report, stealth
from graphswap.fileio import sha256_file, write_json
from graphswap.global_pool import build_global_pool, build_random_pool
from graphswap.graph.build import build_graph
from graphswap.graph.metrics import centrality, metrics, perturbation, spectral
from graphswap.graph.synth import synth_corpus
from graphswap.chains import save_chains
from graphswap.inventory import TypedEntity, extract_builtin
from graphswap.query_pool import fallback_query_entities, verify_against_corpus
from graphswap.swap import build_permutation, build_plan, revert_corpus, rewrite_corpus

from oracles import (
    brute_betweenness,
    brute_closeness,
    brute_giant_fraction,
    brute_kappa,
    dense_lambda_max,
    graph_from_adj,
    random_adj,
    spearman,
)

# Attachment 1 keeps chain endpoints single-document, so severance responds
# to the budget monotonically instead of fluctuating with coincidental edge
# re-creation (possible at attachment >= 2 when a chain endpoint also
# neighbors the bridge's rotation successor).
STANDARD_NODES = 500
STANDARD_ATTACHMENT = 1
STANDARD_SEEDS = range(20)


def _report(name: str, ok: bool, elapsed: float, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    suffix = f" [{detail}]" if detail else ""
    print(f"ACCEPTANCE {status} {name} ({elapsed:.1f}s){suffix}")


@pytest.fixture(scope="session")
def standard_fixtures():
    """The 20-seed preferential-attachment fixture set shared by the
    statistical criteria."""
    data = {}
    for seed in STANDARD_SEEDS:
        fx = synth_corpus(
            nodes=STANDARD_NODES,
            attachment=STANDARD_ATTACHMENT,
            seed=seed,
            n_chains=50,
        )
        inv = extract_builtin(fx.corpus, gazetteer=fx.gazetteer)
        graph = build_graph(fx.corpus, inv)
        data[seed] = (fx, inv, graph)
    return data


def _poisoned_graph(fx, inv, plan):
    poisoned, log = rewrite_corpus(fx.corpus, inv, plan)
    pinv = extract_builtin(poisoned, gazetteer=fx.gazetteer)
    return build_graph(poisoned, pinv), poisoned, log


def _severance(fx, inv, clean_graph, plan) -> float:
    pg, _, _ = _poisoned_graph(fx, inv, plan)
    rate, _, _ = chain_severance(list(fx.chains), clean_graph, pg)
    return rate


def test_permutation_laws():
    """1,000 randomized mixed-type pools: bijective, fixed-point-free,
    type-preserving, and an exact m-cycle. 100% pass in under 5 s."""
    t0 = time.perf_counter()
    rng = random.Random(2024)
    types = ["PERSON", "ORG", "GPE", "DATE", "EVENT", "WORK_OF_ART"]
    failures = 0
    for trial in range(1000):
        size = rng.randrange(2, 201)
        members = []
        seen = set()
        while len(members) < size:
            surface = f"e{rng.randrange(10_000)}"
            etype = rng.choice(types)
            if (surface, etype) in seen:
                continue
            seen.add((surface, etype))
            members.append(TypedEntity(surface, etype))
        freqs = {e: rng.randrange(1, 500) for e in members}
        for etype in {e.etype for e in members}:
            bucket = [e for e in members if e.etype == etype]
            seq, pi = build_permutation(bucket, lambda e: freqs[e])
            m = len(seq)
            if m < 2:
                if pi != {}:
                    failures += 1
                continue
            ok = (
                sorted(pi) == sorted(seq)
                and sorted(pi.values()) == sorted(seq)
                and all(pi[e] != e for e in seq)
                and all(pi[e].etype == e.etype for e in seq)
            )
            walk = {e: e for e in seq}
            for _ in range(m):
                walk = {e: pi[walk[e]] for e in seq}
            ok = ok and all(walk[e] == e for e in seq)
            if not ok:
                failures += 1
    elapsed = time.perf_counter() - t0
    ok = failures == 0 and elapsed < 5.0
    _report("permutation-laws", ok, elapsed, f"failures={failures}")
    assert failures == 0
    assert elapsed < 5.0


def test_rewrite_invertibility():
    """25 seeded synthetic corpora: revert-from-log restores the clean corpus
    byte-exactly, and bytes outside logged spans never change."""
    t0 = time.perf_counter()
    bad = 0
    for seed in range(25):
        fx = synth_corpus(nodes=60, attachment=2, seed=100 + seed, n_chains=10)
        inv = extract_builtin(fx.corpus, gazetteer=fx.gazetteer)
        budget = (seed % 4 + 1) * 10
        plan = build_plan(inv, global_pool=build_global_pool(inv, budget), strategy="global")
        poisoned, log = rewrite_corpus(fx.corpus, inv, plan)
        restored = revert_corpus(poisoned, log)
        if [d.text for d in restored] != [d.text for d in fx.corpus]:
            bad += 1
            continue
        for doc, pdoc in zip(fx.corpus, poisoned):
            subs = sorted(log.by_doc.get(doc.id, ()), key=lambda s: s.start)
            delta = 0
            cursor = 0
            for sub in subs:
                if doc.text[cursor : sub.start] != pdoc.text[cursor + delta : sub.start + delta]:
                    bad += 1
                delta += len(sub.new) - len(sub.old)
                cursor = sub.end
            if doc.text[cursor:] != pdoc.text[cursor + delta :]:
                bad += 1
    elapsed = time.perf_counter() - t0
    _report("rewrite-invertibility", bad == 0, elapsed, f"bad={bad}")
    assert bad == 0


def test_zero_injection(standard_fixtures):
    """Poisoned token vocabulary is a subset of the clean vocabulary, the
    document count never changes, and the builtin path spends no tokens."""
    t0 = time.perf_counter()
    fx, inv, graph = standard_fixtures[0]
    qpool = verify_against_corpus(fallback_query_entities(fx.queries(), inv), inv)
    plan = build_plan(
        inv, global_pool=build_global_pool(inv, 5), query_pool=qpool, strategy="full"
    )
    poisoned, log = rewrite_corpus(fx.corpus, inv, plan)
    clean_vocab = {t.surface for d in fx.corpus for t in tokenize(d.text)}
    poisoned_vocab = {t.surface for d in poisoned for t in tokenize(d.text)}
    report = efficiency_report(log)
    ok = (
        poisoned_vocab <= clean_vocab
        and log.vocabulary_subset
        and log.injected_tokens == []
        and len(poisoned) == len(fx.corpus)
        and report.external_tokens == {"requests": 0, "input_tokens": 0, "output_tokens": 0}
        and log.mentions_modified > 0
    )
    elapsed = time.perf_counter() - t0
    _report("zero-injection", ok, elapsed, f"mentions={log.mentions_modified}")
    assert poisoned_vocab <= clean_vocab
    assert log.vocabulary_subset and log.injected_tokens == []
    assert len(poisoned) == len(fx.corpus)
    assert report.external_tokens == {"requests": 0, "input_tokens": 0, "output_tokens": 0}
    assert log.mentions_modified > 0


def test_answer_and_query_preservation(tmp_path):
    """A full pipeline run leaves the queries file hash untouched."""
    t0 = time.perf_counter()
    fx = synth_corpus(nodes=150, attachment=2, seed=77, n_chains=20)
    fixture_dir = tmp_path / "fixture"
    fixture_dir.mkdir()
    corpus_path = fixture_dir / "corpus.jsonl"
    queries_path = fixture_dir / "queries.jsonl"
    chains_path = fixture_dir / "chains.jsonl"
    gaz_path = fixture_dir / "gazetteer.json"
    save_corpus(fx.corpus, corpus_path)
    save_queries(fx.queries(), queries_path)
    save_chains(list(fx.chains), chains_path)
    write_json(gaz_path, fx.gazetteer)
    before = sha256_file(queries_path)
    code = cli_main(
        [
            "run-all",
            "--corpus", str(corpus_path),
            "--queries", str(queries_path),
            "--chains", str(chains_path),
            "--gazetteer", str(gaz_path),
            "--budget", "10",
            "--out", str(tmp_path / "run"),
        ]
    )
    after = sha256_file(queries_path)
    elapsed = time.perf_counter() - t0
    ok = code == 0 and before == after
    _report("answer-query-preservation", ok, elapsed)
    assert code == 0
    assert before == after


def test_graph_lab_oracle_equivalence():
    """Centralities, kappa, giant fraction, and lambda_max agree with
    brute-force oracles on every connected graph (<= 12 nodes) drawn from a
    200-graph seeded sample; closed forms hit exactly. Under 60 s."""
    t0 = time.perf_counter()
    rng = random.Random(55)
    connected = 0
    for _ in range(200):
        n = rng.randrange(2, 13)
        adj = random_adj(n, rng.uniform(0.25, 0.95), rng)
        if adj.sum() == 0 or brute_giant_fraction(adj) < 1.0:
            continue
        connected += 1
        g = graph_from_adj(adj)
        m = metrics(g)
        c = centrality(g)
        deg = (adj > 0).sum(axis=1)
        assert m.kappa == pytest.approx(brute_kappa(adj), abs=0)
        assert m.giant_fraction == 1.0
        cb = brute_betweenness(adj)
        cc = brute_closeness(adj)
        for i, node in enumerate(g.nodes):
            assert c.degree[node] == int(deg[i])
            assert c.betweenness[node] == pytest.approx(cb[i], abs=1e-9)
            assert c.closeness[node] == pytest.approx(cc[i], abs=1e-12)
        lam = spectral(g, tol=1e-9).lambda_max
        assert lam == pytest.approx(dense_lambda_max(adj), abs=1e-6)

    # closed forms
    k3 = graph_from_adj(np.array([[0, 1, 1], [1, 0, 1], [1, 1, 0]], float))
    assert spectral(k3, tol=1e-9).lambda_max == pytest.approx(2.0, abs=1e-9)
    star = np.zeros((5, 5))
    star[0, 1:] = star[1:, 0] = 1.0
    star_g = graph_from_adj(star)
    assert spectral(star_g, tol=1e-9).lambda_max == pytest.approx(2.0, abs=1e-8)
    assert metrics(star_g).kappa == pytest.approx(2.5)
    assert centrality(star_g).betweenness[star_g.nodes[0]] == pytest.approx(6.0)
    p3 = graph_from_adj(np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], float))
    assert metrics(p3).kappa == pytest.approx(1.5)

    elapsed = time.perf_counter() - t0
    ok = connected >= 100 and elapsed < 60.0
    _report("graph-oracle-equivalence", ok, elapsed, f"connected={connected}")
    assert connected >= 100
    assert elapsed < 60.0


def test_first_order_spectral_estimate():
    """100 seeded small perturbations (||dA||_F <= 0.05 ||A||_F): the
    first-order estimate lands within 20% of the exact shift in >= 90%."""
    t0 = time.perf_counter()
    rng = random.Random(303)
    good = 0
    total = 0
    while total < 100:
        n = rng.randrange(8, 24)
        adj = random_adj(n, rng.uniform(0.25, 0.5), rng)
        if adj.sum() == 0 or brute_giant_fraction(adj) < 1.0:
            continue
        g = graph_from_adj(adj)
        edges = list(g.edge_pairs())
        chosen = rng.sample(edges, min(rng.randrange(1, 4), len(edges)))
        fro_a = math.sqrt(float((adj**2).sum()))
        eps = rng.uniform(0.5, 1.0) * 0.05 * fro_a / math.sqrt(2 * len(chosen))
        delta = {(g.nodes[i], g.nodes[j]): eps for i, j, _ in chosen}
        d_fro = math.sqrt(2 * len(chosen)) * eps
        assert d_fro <= 0.05 * fro_a + 1e-12
        report = perturbation(g, delta)
        total += 1
        if abs(report.exact) < 1e-12:
            good += abs(report.first_order) < 1e-12
        elif abs(report.first_order - report.exact) / abs(report.exact) <= 0.2:
            good += 1
    elapsed = time.perf_counter() - t0
    ok = good >= 90
    _report("first-order-spectral", ok, elapsed, f"good={good}/100")
    assert good >= 90


def test_hub_targeting_superiority(standard_fixtures):
    """Over 20 seeds: hub removal shrinks the giant component more than
    random removal, and severance orders full >= global-only >= random."""
    t0 = time.perf_counter()
    hub_drops, random_drops = [], []
    full_rates, global_rates, random_rates = [], [], []
    for seed, (fx, inv, graph) in standard_fixtures.items():
        clean_giant = metrics(graph).giant_fraction
        hub_pool = build_global_pool(inv, 5)
        rand_pool = build_random_pool(inv, 5, seed=seed)
        hub_drops.append(
            clean_giant - metrics(graph.without_nodes(set(hub_pool.all_entities()))).giant_fraction
        )
        random_drops.append(
            clean_giant - metrics(graph.without_nodes(set(rand_pool.all_entities()))).giant_fraction
        )
        qpool = verify_against_corpus(fallback_query_entities(fx.queries(), inv), inv)
        full_rates.append(
            _severance(fx, inv, graph,
                       build_plan(inv, global_pool=hub_pool, query_pool=qpool, strategy="full"))
        )
        global_rates.append(
            _severance(fx, inv, graph, build_plan(inv, global_pool=hub_pool, strategy="global"))
        )
        random_rates.append(
            _severance(fx, inv, graph, build_plan(inv, global_pool=rand_pool, strategy="global"))
        )
    mean = lambda xs: sum(xs) / len(xs)
    elapsed = time.perf_counter() - t0
    ok = (
        mean(hub_drops) > mean(random_drops)
        and mean(full_rates) >= mean(global_rates) >= mean(random_rates)
    )
    _report(
        "hub-targeting-superiority",
        ok,
        elapsed,
        f"giant-drop hub={mean(hub_drops):.3f} rand={mean(random_drops):.3f}; "
        f"severance full={mean(full_rates):.2f} global={mean(global_rates):.2f} "
        f"rand={mean(random_rates):.2f}",
    )
    assert mean(hub_drops) > mean(random_drops)
    assert mean(full_rates) >= mean(global_rates) >= mean(random_rates)


def test_budget_saturation(standard_fixtures):
    """Seed-mean severance is non-decreasing over budgets {1,2,5,10,20}% and
    the 5->10 gain is smaller than the 1->5 gain."""
    t0 = time.perf_counter()
    budgets = (1, 2, 5, 10, 20)
    sweep_seeds = list(STANDARD_SEEDS)[:10]
    means = {}
    for budget in budgets:
        rates = []
        for seed in sweep_seeds:
            fx, inv, graph = standard_fixtures[seed]
            plan = build_plan(inv, global_pool=build_global_pool(inv, budget), strategy="global")
            rates.append(_severance(fx, inv, graph, plan))
        means[budget] = sum(rates) / len(rates)
    elapsed = time.perf_counter() - t0
    non_decreasing = all(means[a] <= means[b] + 1e-12 for a, b in zip(budgets, budgets[1:]))
    gain_1_5 = means[5] - means[1]
    gain_5_10 = means[10] - means[5]
    ok = non_decreasing and gain_5_10 < gain_1_5
    _report(
        "budget-saturation",
        ok,
        elapsed,
        "means=" + ", ".join(f"{b}%:{means[b]:.3f}" for b in budgets),
    )
    assert non_decreasing
    assert gain_5_10 < gain_1_5


def test_stealth_band(standard_fixtures):
    """The builtin n-gram detector sits near chance on swap output
    (AUC in [0.45, 0.65]) but catches the gibberish positive control
    (AUC >= 0.9). Under 30 s."""
    t0 = time.perf_counter()
    fx, inv, graph = standard_fixtures[0]
    qpool = verify_against_corpus(fallback_query_entities(fx.queries(), inv), inv)
    plan = build_plan(
        inv, global_pool=build_global_pool(inv, 5), query_pool=qpool, strategy="full"
    )
    poisoned, _ = rewrite_corpus(fx.corpus, inv, plan)
    swap_report = stealth(fx.corpus, poisoned, ngram_order=3)

    rng = random.Random(1)
    from graphswap.corpus import Corpus, Document

    # injection-sized gibberish: long suffixes over characters the clean
    # corpus never uses (injected-content attacks add hundreds of tokens)
    noisy = Corpus(
        [
            Document(d.id, d.text + " " + "".join(rng.choice("zq0x9j1wv7") for _ in range(150)))
            for d in fx.corpus
        ]
    )
    control_report = stealth(fx.corpus, noisy, ngram_order=3)
    elapsed = time.perf_counter() - t0
    ok = 0.45 <= swap_report.auc <= 0.65 and control_report.auc >= 0.9 and elapsed < 30.0
    _report(
        "stealth-band",
        ok,
        elapsed,
        f"swap-auc={swap_report.auc:.3f} control-auc={control_report.auc:.3f}",
    )
    assert 0.45 <= swap_report.auc <= 0.65
    assert control_report.auc >= 0.9
    assert elapsed < 30.0


def test_frequency_degree_coupling(standard_fixtures):
    """Mean Spearman correlation between document frequency and degree
    exceeds 0.5 across 10 synthetic fixtures."""
    t0 = time.perf_counter()
    rhos = []
    for seed in list(STANDARD_SEEDS)[:10]:
        fx, inv, graph = standard_fixtures[seed]
        degrees = graph.degrees()
        freqs = [inv.frequency(e) for e in graph.nodes]
        rhos.append(spearman(freqs, [int(d) for d in degrees]))
    mean_rho = sum(rhos) / len(rhos)
    elapsed = time.perf_counter() - t0
    ok = mean_rho > 0.5
    _report("frequency-degree-coupling", ok, elapsed, f"mean-rho={mean_rho:.3f}")
    assert mean_rho > 0.5
