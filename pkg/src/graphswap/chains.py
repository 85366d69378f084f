"""Gold reasoning chains: the entity path a multi-hop query must traverse."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .errors import ParseError
from .fileio import read_jsonl, write_jsonl
from .inventory import TypedEntity, check_entity_type


@dataclass(frozen=True)
class GoldChain:
    query_id: str
    question: str
    answer: str
    entities: tuple[TypedEntity, ...]


def save_chains(chains: list[GoldChain], path: str | Path) -> None:
    write_jsonl(
        path,
        (
            {
                "query_id": c.query_id,
                "question": c.question,
                "answer": c.answer,
                "chain": [{"surface": e.surface, "type": e.etype} for e in c.entities],
            }
            for c in chains
        ),
    )


def load_chains(path: str | Path) -> list[GoldChain]:
    chains = []
    for lineno, rec in read_jsonl(path):
        try:
            entities = tuple(
                TypedEntity(str(e["surface"]), check_entity_type(str(e["type"])))
                for e in rec["chain"]
            )
            chains.append(
                GoldChain(
                    query_id=str(rec["query_id"]),
                    question=str(rec.get("question", "")),
                    answer=str(rec.get("answer", "")),
                    entities=entities,
                )
            )
        except KeyError as exc:
            raise ParseError(f"{path}:{lineno}: chain record missing {exc}") from exc
    return chains
