"""Co-occurrence entity graphs.

Nodes are every inventory entity (isolated ones included); an undirected
edge (u, v) carries the number of windows — whole documents by default,
sentences optionally — in which both entities have at least one mention.
Graphs are immutable once built.
"""
from __future__ import annotations

import csv
import io
import re
from pathlib import Path
from typing import Iterator

import numpy as np

from ..corpus import Corpus
from ..errors import UnknownDocumentError, ValidationError
from ..fileio import atomic_write_text
from ..inventory import EntityInventory, TypedEntity

WINDOWS = ("document", "sentence")

_SENTENCE_BOUNDARY = re.compile(r"[.!?]+(?:\s+|$)")


class EntityGraph:
    """Symmetric CSR adjacency over a fixed, sorted node list."""

    def __init__(
        self,
        nodes: list[TypedEntity],
        pair_weights: dict[tuple[int, int], float],
    ):
        n = len(nodes)
        self.nodes: tuple[TypedEntity, ...] = tuple(nodes)
        self._index = {e: i for i, e in enumerate(self.nodes)}
        rows: list[list[tuple[int, float]]] = [[] for _ in range(n)]
        for (i, j), w in pair_weights.items():
            if i == j:
                raise ValidationError("self-loops are not allowed")
            if w <= 0:
                raise ValidationError("edge weights must be positive")
            rows[i].append((j, float(w)))
            rows[j].append((i, float(w)))
        indptr = np.zeros(n + 1, np.int64)
        indices = np.empty(sum(len(r) for r in rows), np.int64)
        weights = np.empty(indices.shape[0], np.float64)
        pos = 0
        for i, row in enumerate(rows):
            row.sort()
            for j, w in row:
                indices[pos] = j
                weights[pos] = w
                pos += 1
            indptr[i + 1] = pos
        self.indptr = indptr
        self.indices = indices
        self.weights = weights

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return int(self.indices.shape[0] // 2)

    def index_of(self, entity: TypedEntity) -> int | None:
        return self._index.get(entity)

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    def has_edge(self, i: int, j: int) -> bool:
        row = self.neighbors(i)
        pos = int(np.searchsorted(row, j))
        return pos < row.shape[0] and row[pos] == j

    def edge_pairs(self) -> Iterator[tuple[int, int, float]]:
        for i in range(self.n):
            for ei in range(self.indptr[i], self.indptr[i + 1]):
                j = int(self.indices[ei])
                if i < j:
                    yield i, j, float(self.weights[ei])

    def entity_edges(self) -> set[tuple[TypedEntity, TypedEntity]]:
        return {(self.nodes[i], self.nodes[j]) for i, j, _ in self.edge_pairs()}

    def pair_weights(self) -> dict[tuple[int, int], float]:
        return {(i, j): w for i, j, w in self.edge_pairs()}

    def adjacency_dense(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), np.float64)
        for i, j, w in self.edge_pairs():
            a[i, j] = w
            a[j, i] = w
        return a

    def without_nodes(self, drop: set[TypedEntity]) -> "EntityGraph":
        keep = [e for e in self.nodes if e not in drop]
        keep_index = {e: i for i, e in enumerate(keep)}
        pw: dict[tuple[int, int], float] = {}
        for i, j, w in self.edge_pairs():
            u, v = self.nodes[i], self.nodes[j]
            if u in keep_index and v in keep_index:
                a, b = keep_index[u], keep_index[v]
                pw[(min(a, b), max(a, b))] = w
        return EntityGraph(keep, pw)


def sentence_spans(text: str) -> list[tuple[int, int]]:
    spans = []
    start = 0
    for m in _SENTENCE_BOUNDARY.finditer(text):
        spans.append((start, m.end()))
        start = m.end()
    if start < len(text):
        spans.append((start, len(text)))
    return spans


def build_graph(
    corpus: Corpus, inventory: EntityInventory, window: str = "document"
) -> EntityGraph:
    """Co-occurrence graph over the inventory's entities."""
    if window not in WINDOWS:
        raise ValidationError(f"window must be one of {WINDOWS}, got {window!r}")
    for doc_id in inventory.doc_ids():
        if doc_id not in corpus:
            raise UnknownDocumentError(f"inventory references unknown document {doc_id!r}")

    nodes = inventory.entities()
    index = {e: i for i, e in enumerate(nodes)}
    pair_weights: dict[tuple[int, int], float] = {}

    def add_window(entities: set[TypedEntity]) -> None:
        idx = sorted(index[e] for e in entities)
        for a in range(len(idx)):
            for b in range(a + 1, len(idx)):
                key = (idx[a], idx[b])
                pair_weights[key] = pair_weights.get(key, 0.0) + 1.0

    for doc in corpus:
        if window == "document":
            ents = inventory.doc_entities(doc.id)
            if len(ents) > 1:
                add_window(ents)
            continue
        mentions = inventory.mentions_in(doc.id)
        if not mentions:
            continue
        for s_start, s_end in sentence_spans(doc.text):
            ents = {m.entity for m in mentions if s_start <= m.start < s_end}
            if len(ents) > 1:
                add_window(ents)

    return EntityGraph(nodes, pair_weights)


def export_edgelist(graph: EntityGraph, path: str | Path) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["u_surface", "u_type", "v_surface", "v_type", "weight"])
    for i, j, w in graph.edge_pairs():
        u, v = graph.nodes[i], graph.nodes[j]
        writer.writerow([u.surface, u.etype, v.surface, v.etype, w])
    atomic_write_text(path, buf.getvalue())
