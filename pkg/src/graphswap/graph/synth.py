"""Synthetic scale-free corpora for experiments and acceptance fixtures.

A preferential-attachment graph is realized as text: one short sentence per
edge, each sentence naming the two endpoint entities. The generator also
emits two-hop gold chains (question / bridge / answer) routed through
high-degree bridges, plus a gazetteer so the builtin extractor recovers the
intended types. Everything is deterministic given the seed.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from ..chains import GoldChain
from ..corpus import Corpus, Document, Query
from ..errors import ValidationError
from ..inventory import TypedEntity

DEFAULT_TYPES = ("PERSON", "ORG", "GPE", "EVENT", "PRODUCT")

_ONSETS = [
    "b", "d", "f", "g", "k", "l", "m", "p", "r", "s",
    "t", "v", "z", "br", "dr", "gr", "kr", "pl", "st", "tr",
]
_VOWELS = ["a", "e", "i", "o", "u", "ar", "el", "in", "or", "us"]

_TEMPLATES = [
    "{u} worked closely with {v} on a long running initiative.",
    "{u} signed a cooperation agreement with {v} near the old harbor.",
    "{u} credited {v} for steady support during a difficult season.",
    "{u} exchanged a series of letters with {v} about the shared project.",
    "{u} hosted a private meeting with {v} before the annual review.",
    "{u} relied on {v} throughout the lengthy negotiation process.",
    "{u} announced a joint venture with {v} at the spring gathering.",
    "{u} maintained close ties with {v} according to the archived notes.",
]

_QUESTION = "Which partner did {a} reach through {b}?"


@dataclass(frozen=True)
class SynthFixture:
    corpus: Corpus
    chains: tuple[GoldChain, ...]
    gazetteer: dict[str, str]
    edges: tuple[tuple[TypedEntity, TypedEntity], ...]

    def queries(self) -> list[Query]:
        return [Query(c.query_id, c.question, c.answer) for c in self.chains]


def _make_names(count: int, rng: random.Random) -> list[str]:
    names: list[str] = []
    seen: set[str] = set()
    while len(names) < count:
        parts = [rng.choice(_ONSETS) + rng.choice(_VOWELS) for _ in range(rng.choice((2, 3)))]
        name = "".join(parts).capitalize()
        if name in seen:
            continue
        seen.add(name)
        names.append(name)
    return names


def _preferential_attachment(
    nodes: int, attachment: int, rng: random.Random
) -> list[tuple[int, int]]:
    """Repeated-nodes preferential attachment; (nodes - m) * m distinct edges."""
    m = attachment
    edges: list[tuple[int, int]] = []
    repeated: list[int] = []
    targets = list(range(m))
    for v in range(m, nodes):
        for t in targets:
            edges.append((t, v) if t < v else (v, t))
        repeated.extend(targets)
        repeated.extend([v] * m)
        chosen: set[int] = set()
        while len(chosen) < m:
            chosen.add(rng.choice(repeated))
        targets = sorted(chosen)
    return edges


def synth_corpus(
    nodes: int,
    attachment: int,
    docs: int | None = None,
    seed: int = 0,
    n_chains: int = 50,
    chains_per_bridge: int = 3,
    types: tuple[str, ...] = DEFAULT_TYPES,
) -> SynthFixture:
    if attachment < 1:
        raise ValidationError("attachment must be >= 1")
    if nodes < attachment + 1:
        raise ValidationError("need nodes >= attachment + 1")
    if docs is not None and docs < 1:
        raise ValidationError("docs must be >= 1")
    if n_chains < 0:
        raise ValidationError("n_chains must be >= 0")

    rng = random.Random(seed)
    names = _make_names(nodes, rng)
    entities = [TypedEntity(names[i], types[i % len(types)]) for i in range(nodes)]
    raw_edges = _preferential_attachment(nodes, attachment, rng)
    if docs is None:
        docs = len(raw_edges)

    documents: list[Document] = []
    covered: list[tuple[int, int]] = []
    covered_set: set[tuple[int, int]] = set()
    for j in range(docs):
        i_u, i_v = raw_edges[j % len(raw_edges)]
        if (i_u, i_v) not in covered_set:
            covered_set.add((i_u, i_v))
            covered.append((i_u, i_v))
        template = _TEMPLATES[j % len(_TEMPLATES)]
        text = template.format(u=entities[i_u].surface, v=entities[i_v].surface)
        documents.append(Document(id=f"d{j:05d}", text=text))
    corpus = Corpus(documents)

    adjacency: dict[int, set[int]] = {i: set() for i in range(nodes)}
    for i_u, i_v in covered:
        adjacency[i_u].add(i_v)
        adjacency[i_v].add(i_u)

    bridges = sorted(
        (i for i in range(nodes) if len(adjacency[i]) >= 2),
        key=lambda i: (-len(adjacency[i]), entities[i].surface),
    )
    # Chains concentrate on the highest-degree bridges first (multi-hop
    # questions in entity-centric corpora overwhelmingly route through hubs)
    # and pick the bridge's lowest-degree neighbors as endpoints, the
    # canonical question-entity -> bridge -> answer pattern.
    chains: list[GoldChain] = []
    for b in bridges:
        if len(chains) >= n_chains:
            break
        neigh = sorted(
            adjacency[b], key=lambda i: (len(adjacency[i]), entities[i].surface)
        )
        for k in range(min(len(neigh) - 1, chains_per_bridge)):
            if len(chains) >= n_chains:
                break
            a, c = neigh[k], neigh[k + 1]
            qid = f"q{len(chains):04d}"
            question = _QUESTION.format(a=entities[a].surface, b=entities[b].surface)
            chains.append(
                GoldChain(
                    query_id=qid,
                    question=question,
                    answer=entities[c].surface,
                    entities=(entities[a], entities[b], entities[c]),
                )
            )

    gazetteer = {e.surface: e.etype for e in entities}
    edge_entities = tuple((entities[u], entities[v]) for u, v in covered)
    return SynthFixture(
        corpus=corpus,
        chains=tuple(chains),
        gazetteer=gazetteer,
        edges=edge_entities,
    )
