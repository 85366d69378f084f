"""Type-preserving entity swapping.

Pools merge per type into a unified target set. Each type's targets are
ordered by descending document frequency (surface ascending on ties) and
swapped through a single-cycle rotation: every entity is replaced by its
predecessor in the sequence, the first by the last. The rotation is a
bijection on the sequence, so rewrites are invertible from the log alone.

Rewriting is mention-index-driven: only spans the inventory marked are
touched, which keeps word boundaries safe and makes the injected-token
accounting exact. Queries and gold answers are never inputs here.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable

from .corpus import Corpus, Document, token_surfaces, tokenize
from .errors import StaleAnnotationError, UnknownDocumentError, ValidationError
from .fileio import read_json, write_json
from .global_pool import GlobalPool
from .inventory import EntityInventory, TypedEntity, check_entity_type
from .query_pool import QueryPool

logger = logging.getLogger(__name__)

STRATEGIES = ("global", "query", "full")
DIRECTIONS = ("backward", "forward")


@dataclass(frozen=True)
class Substitution:
    """One logged replacement, in clean-corpus coordinates."""

    start: int
    end: int
    old: str
    new: str


@dataclass
class RewriteLog:
    by_doc: dict[str, list[Substitution]]
    mentions_modified: int = 0
    net_token_delta: int = 0
    injected_tokens: list[str] = field(default_factory=list)
    overlaps_skipped: int = 0

    @property
    def vocabulary_subset(self) -> bool:
        return not self.injected_tokens


@dataclass
class PoisonPlan:
    sequences: dict[str, list[TypedEntity]]
    mapping: dict[TypedEntity, TypedEntity]
    budget_percent: float
    strategy: str
    frequencies: dict[TypedEntity, int]
    skipped_types: list[str] = field(default_factory=list)
    direction: str = "backward"
    sources: dict[str, bool] = field(default_factory=dict)

    def targets(self) -> set[TypedEntity]:
        return set(self.mapping)

    def inverse(self) -> "PoisonPlan":
        return PoisonPlan(
            sequences={t: list(seq) for t, seq in self.sequences.items()},
            mapping={v: k for k, v in self.mapping.items()},
            budget_percent=self.budget_percent,
            strategy=self.strategy,
            frequencies=dict(self.frequencies),
            skipped_types=list(self.skipped_types),
            direction="forward" if self.direction == "backward" else "backward",
            sources=dict(self.sources),
        )


def unify_pools(
    global_pool: GlobalPool | None, query_pool: QueryPool | None
) -> dict[str, list[TypedEntity]]:
    """Per-type union of the two pools; duplicates collapse."""
    merged: dict[str, set[TypedEntity]] = {}
    for pool_buckets in (
        global_pool.buckets if global_pool else {},
        query_pool.buckets if query_pool else {},
    ):
        for etype, members in pool_buckets.items():
            merged.setdefault(etype, set()).update(members)
    return {etype: sorted(members) for etype, members in sorted(merged.items())}


def build_permutation(
    entities: Iterable[TypedEntity],
    freq_of: Callable[[TypedEntity], int],
    direction: str = "backward",
) -> tuple[list[TypedEntity], dict[TypedEntity, TypedEntity]]:
    """Order a type bucket and build its rotation.

    Returns the ordered sequence and the mapping; a bucket with fewer than
    two members yields an empty mapping (skip signal, not fatal).
    """
    if direction not in DIRECTIONS:
        raise ValidationError(f"direction must be one of {DIRECTIONS}, got {direction!r}")
    seq = sorted(set(entities), key=lambda e: (-freq_of(e), e.surface))
    if len({e.etype for e in seq}) > 1:
        raise ValidationError("permutation bucket mixes entity types")
    if len(seq) < 2:
        logger.warning("bucket of size %d cannot be rotated; skipping", len(seq))
        return seq, {}
    mapping: dict[TypedEntity, TypedEntity] = {}
    m = len(seq)
    for i, ent in enumerate(seq):
        if direction == "backward":
            mapping[ent] = seq[i - 1] if i > 0 else seq[m - 1]
        else:
            mapping[ent] = seq[(i + 1) % m]
    return seq, mapping


def build_plan(
    inventory: EntityInventory,
    global_pool: GlobalPool | None = None,
    query_pool: QueryPool | None = None,
    strategy: str = "full",
    direction: str = "backward",
) -> PoisonPlan:
    if strategy not in STRATEGIES:
        raise ValidationError(f"strategy must be one of {STRATEGIES}, got {strategy!r}")
    if strategy == "global":
        query_pool = None
    elif strategy == "query":
        global_pool = None
    unified = unify_pools(global_pool, query_pool)

    sequences: dict[str, list[TypedEntity]] = {}
    mapping: dict[TypedEntity, TypedEntity] = {}
    skipped: list[str] = []
    for etype, members in unified.items():
        seq, pi = build_permutation(members, inventory.frequency, direction)
        if not pi:
            if members:
                skipped.append(etype)
            continue
        sequences[etype] = seq
        mapping.update(pi)

    frequencies = {e: inventory.frequency(e) for seq in sequences.values() for e in seq}
    return PoisonPlan(
        sequences=sequences,
        mapping=mapping,
        budget_percent=global_pool.budget_percent if global_pool else 0.0,
        strategy=strategy,
        frequencies=frequencies,
        skipped_types=skipped,
        direction=direction,
        sources={"global": global_pool is not None, "query": query_pool is not None},
    )


def _select_spans(mentions, mapping) -> tuple[list, int]:
    """Pick non-overlapping target mentions: longest span first, then earliest."""
    candidates = [m for m in mentions if m.entity in mapping]
    candidates.sort(key=lambda m: (-(m.end - m.start), m.start, m.end))
    accepted: list = []
    skipped = 0
    for m in candidates:
        if any(m.start < a.end and a.start < m.end for a in accepted):
            skipped += 1
            continue
        accepted.append(m)
    accepted.sort(key=lambda m: m.start)
    return accepted, skipped


def rewrite_corpus(
    corpus: Corpus, inventory: EntityInventory, plan: PoisonPlan
) -> tuple[Corpus, RewriteLog]:
    """Apply the plan's rotation to every indexed mention of a target entity.

    Document count and order are preserved; bytes outside logged spans are
    untouched. Token accounting compares poisoned token surfaces against the
    clean vocabulary — replacements only reuse strings already in the corpus,
    so the injected-token list is expected to stay empty.
    """
    for doc_id in inventory.doc_ids():
        if doc_id not in corpus:
            raise UnknownDocumentError(f"inventory references unknown document {doc_id!r}")

    docs: list[Document] = []
    by_doc: dict[str, list[Substitution]] = {}
    mentions_modified = 0
    overlaps_skipped = 0
    for doc in corpus:
        accepted, skipped = _select_spans(inventory.mentions_in(doc.id), plan.mapping)
        overlaps_skipped += skipped
        if skipped:
            logger.debug("%s: %d overlapping mention(s) skipped", doc.id, skipped)
        if not accepted:
            docs.append(doc)
            continue
        parts: list[str] = []
        subs: list[Substitution] = []
        cursor = 0
        for m in accepted:
            if doc.text[m.start : m.end] != m.surface:
                raise StaleAnnotationError(
                    f"mention {m.surface!r} at [{m.start},{m.end}) does not match "
                    f"document {doc.id!r}; inventory is stale"
                )
            replacement = plan.mapping[m.entity].surface
            parts.append(doc.text[cursor : m.start])
            parts.append(replacement)
            subs.append(Substitution(m.start, m.end, m.surface, replacement))
            cursor = m.end
        parts.append(doc.text[cursor:])
        docs.append(Document(id=doc.id, text="".join(parts)))
        by_doc[doc.id] = subs
        mentions_modified += len(subs)

    poisoned = Corpus(docs)
    clean_vocab = token_surfaces(corpus)
    clean_count = sum(len(tokenize(d.text)) for d in corpus)
    poisoned_count = 0
    injected: set[str] = set()
    for doc in poisoned:
        spans = tokenize(doc.text)
        poisoned_count += len(spans)
        for span in spans:
            if span.surface not in clean_vocab:
                injected.add(span.surface)
    log = RewriteLog(
        by_doc=by_doc,
        mentions_modified=mentions_modified,
        net_token_delta=poisoned_count - clean_count,
        injected_tokens=sorted(injected),
        overlaps_skipped=overlaps_skipped,
    )
    return poisoned, log


def revert_corpus(poisoned: Corpus, log: RewriteLog) -> Corpus:
    """Undo a rewrite using only the log (the rotation is bijective)."""
    docs: list[Document] = []
    for doc in poisoned:
        subs = sorted(log.by_doc.get(doc.id, ()), key=lambda s: s.start)
        if not subs:
            docs.append(doc)
            continue
        parts: list[str] = []
        cursor = 0
        delta = 0
        for sub in subs:
            pstart = sub.start + delta
            pend = pstart + len(sub.new)
            if doc.text[pstart:pend] != sub.new:
                raise ValidationError(
                    f"log does not match document {doc.id!r} at [{pstart},{pend})"
                )
            parts.append(doc.text[cursor:pstart])
            parts.append(sub.old)
            cursor = pend
            delta += len(sub.new) - len(sub.old)
        parts.append(doc.text[cursor:])
        docs.append(Document(id=doc.id, text="".join(parts)))
    return Corpus(docs)


def save_plan(plan: PoisonPlan, path: str | Path) -> None:
    payload = {
        "budget_percent": plan.budget_percent,
        "strategy": plan.strategy,
        "direction": plan.direction,
        "pools": plan.sources,
        "skipped_types": plan.skipped_types,
        "types": {
            etype: {
                "sequence": [
                    {
                        "surface": e.surface,
                        "type": e.etype,
                        "frequency": plan.frequencies.get(e, 0),
                    }
                    for e in seq
                ],
                "mapping": [
                    [e.surface, plan.mapping[e].surface] for e in seq
                ],
            }
            for etype, seq in plan.sequences.items()
        },
    }
    write_json(path, payload)


def load_plan(path: str | Path) -> PoisonPlan:
    payload = read_json(path)
    sequences: dict[str, list[TypedEntity]] = {}
    mapping: dict[TypedEntity, TypedEntity] = {}
    frequencies: dict[TypedEntity, int] = {}
    for etype, spec in payload.get("types", {}).items():
        check_entity_type(etype)
        seq = [TypedEntity(item["surface"], item["type"]) for item in spec["sequence"]]
        sequences[etype] = seq
        for item in spec["sequence"]:
            frequencies[TypedEntity(item["surface"], item["type"])] = int(item["frequency"])
        for src, dst in spec["mapping"]:
            mapping[TypedEntity(src, etype)] = TypedEntity(dst, etype)
    return PoisonPlan(
        sequences=sequences,
        mapping=mapping,
        budget_percent=float(payload.get("budget_percent", 0)),
        strategy=str(payload.get("strategy", "full")),
        frequencies=frequencies,
        skipped_types=list(payload.get("skipped_types", [])),
        direction=str(payload.get("direction", "backward")),
        sources=dict(payload.get("pools", {})),
    )


def save_log(log: RewriteLog, path: str | Path) -> None:
    payload = {
        "totals": {
            "mentions_modified": log.mentions_modified,
            "net_token_delta": log.net_token_delta,
            "injected_tokens": log.injected_tokens,
            "vocabulary_subset": log.vocabulary_subset,
            "overlaps_skipped": log.overlaps_skipped,
        },
        "documents": [
            {
                "doc_id": doc_id,
                "substitutions": [
                    {"start": s.start, "end": s.end, "from": s.old, "to": s.new}
                    for s in subs
                ],
            }
            for doc_id, subs in log.by_doc.items()
        ],
    }
    write_json(path, payload)


def load_log(path: str | Path) -> RewriteLog:
    payload = read_json(path)
    by_doc: dict[str, list[Substitution]] = {}
    for rec in payload.get("documents", []):
        by_doc[rec["doc_id"]] = [
            Substitution(int(s["start"]), int(s["end"]), s["from"], s["to"])
            for s in rec["substitutions"]
        ]
    totals = payload.get("totals", {})
    return RewriteLog(
        by_doc=by_doc,
        mentions_modified=int(totals.get("mentions_modified", 0)),
        net_token_delta=int(totals.get("net_token_delta", 0)),
        injected_tokens=list(totals.get("injected_tokens", [])),
        overlaps_skipped=int(totals.get("overlaps_skipped", 0)),
    )
