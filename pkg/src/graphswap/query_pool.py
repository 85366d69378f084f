"""Query-centric replacement pool.

Per-query reasoning-chain entities come either from an external
query-entities file (produced out of process) or from the built-in fallback
that scans question text for inventory surfaces. Pooling verifies every
candidate against the corpus inventory — entities with zero document
frequency are hallucinations and are dropped, not swapped.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .corpus import Query
from .errors import ParseError
from .fileio import read_jsonl
from .inventory import EntityInventory, TypedEntity, check_entity_type

REASONING_ROLES = frozenset({"bridge", "target", "alias", "other"})

# Records without an explicit role get one derived from the entity type.
_ROLE_FOR_TYPE = {"BRIDGE": "bridge", "ALIAS": "alias"}


@dataclass(frozen=True)
class QueryEntity:
    query_id: str
    hop: int
    entity: TypedEntity
    role: str


@dataclass
class QueryPool:
    buckets: dict[str, list[TypedEntity]]
    provenance: dict[TypedEntity, list[str]]
    rejected: list[QueryEntity] = field(default_factory=list)

    def all_entities(self) -> list[TypedEntity]:
        return [e for etype in sorted(self.buckets) for e in self.buckets[etype]]

    def size(self) -> int:
        return sum(len(b) for b in self.buckets.values())


def import_query_entities(path: str | Path) -> list[QueryEntity]:
    """Load per-query reasoning entities; file order is preserved."""
    out: list[QueryEntity] = []
    for lineno, rec in read_jsonl(path):
        if "query_id" not in rec or "entities" not in rec:
            raise ParseError(f"{path}:{lineno}: record needs 'query_id' and 'entities'")
        qid = str(rec["query_id"])
        for ent in rec["entities"]:
            try:
                hop = int(ent["hop"])
                surface = str(ent["entity"])
                etype = str(ent["type"])
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"{path}:{lineno}: bad entity record: {exc}") from exc
            check_entity_type(etype)
            if hop < 1:
                raise ParseError(f"{path}:{lineno}: hop must be >= 1, got {hop}")
            role = str(ent.get("role") or _ROLE_FOR_TYPE.get(etype, "target"))
            if role not in REASONING_ROLES:
                raise ParseError(f"{path}:{lineno}: unknown role {role!r}")
            out.append(QueryEntity(qid, hop, TypedEntity(surface, etype), role))
    return out


def verify_against_corpus(
    entities: list[QueryEntity], inventory: EntityInventory
) -> QueryPool:
    """Keep exactly the candidates with document frequency > 0.

    Aggregation is a set union per type; provenance accumulates the distinct
    queries that named each retained entity.
    """
    provenance: dict[TypedEntity, list[str]] = {}
    rejected: list[QueryEntity] = []
    for qe in entities:
        if inventory.frequency(qe.entity) > 0:
            ids = provenance.setdefault(qe.entity, [])
            if qe.query_id not in ids:
                ids.append(qe.query_id)
        else:
            rejected.append(qe)
    buckets: dict[str, list[TypedEntity]] = {}
    for ent in provenance:
        buckets.setdefault(ent.etype, []).append(ent)
    for etype in buckets:
        buckets[etype].sort()
    return QueryPool(buckets=buckets, provenance=provenance, rejected=rejected)


def fallback_query_entities(
    queries: list[Query], inventory: EntityInventory
) -> list[QueryEntity]:
    """No-LLM fallback: every inventory surface occurring in a question
    (word-bounded, case-sensitive) becomes a hop-1 target entity."""
    from .inventory import _word_boundary_pattern

    patterns = [(ent, _word_boundary_pattern(ent.surface)) for ent in inventory.entities()]
    out: list[QueryEntity] = []
    for query in queries:
        for ent, pattern in patterns:
            if pattern.search(query.question):
                out.append(QueryEntity(query.id, 1, ent, "target"))
    return out
