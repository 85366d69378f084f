"""Reasoning-chain entity extraction via the LLM endpoint.

Each query's question is slotted into the verbatim extraction prompt; the
model must return a Python-style list of {hop, entity, type} dicts.
Malformed output is retried once, then the query is logged and skipped.

Progress is appended to ``<out>.partial.jsonl`` after every query, so an
endpoint failure leaves a resume marker: re-running skips completed query
ids and never duplicates records. The final file is written atomically and
the partial removed on success.
"""
from __future__ import annotations

import ast
import logging
from pathlib import Path

from .client import EndpointError, LlmClient
from .prompts import entity_extraction_prompt
from .records import (
    ENTITY_TYPES,
    ROLE_FOR_TYPE,
    atomic_write_jsonl,
    load_queries,
    read_jsonl,
)

logger = logging.getLogger(__name__)


def parse_entity_list(text: str) -> list[dict]:
    """Parse the model's list-of-dicts output; raises ValueError when it
    does not follow the contract."""
    start = text.find("[")
    end = text.rfind("]")
    if start < 0 or end <= start:
        raise ValueError("no list found in response")
    parsed = ast.literal_eval(text[start : end + 1])
    if not isinstance(parsed, list):
        raise ValueError("response is not a list")
    entities = []
    for item in parsed:
        if not isinstance(item, dict):
            raise ValueError(f"list item is not a dict: {item!r}")
        hop = int(item["hop"])
        entity = str(item["entity"]).strip()
        etype = str(item["type"]).strip()
        if hop < 1:
            raise ValueError(f"hop must be >= 1, got {hop}")
        if not entity:
            raise ValueError("empty entity surface")
        if etype not in ENTITY_TYPES:
            raise ValueError(f"type {etype!r} outside the closed set")
        entities.append(
            {
                "hop": hop,
                "entity": entity,
                "type": etype,
                "role": ROLE_FOR_TYPE.get(etype, "target"),
            }
        )
    return entities


def _partial_path(out_path: Path) -> Path:
    return out_path.with_name(out_path.name + ".partial.jsonl")


def _load_partial(partial: Path) -> list[dict]:
    if not partial.exists():
        return []
    return list(read_jsonl(partial))


def extract_cot(
    queries_path: str | Path,
    out_path: str | Path,
    client: LlmClient,
) -> dict:
    """Returns a summary dict: queries processed, skipped, resumed."""
    out_path = Path(out_path)
    partial = _partial_path(out_path)
    done_records = _load_partial(partial)
    done_ids = {rec["query_id"] for rec in done_records}
    if done_ids:
        logger.info("resuming: %d queries already done", len(done_ids))

    queries = load_queries(queries_path)
    skipped: list[str] = []
    try:
        with open(partial, "a", encoding="utf-8", newline="\n") as partial_fh:
            import json

            for query in queries:
                if query["id"] in done_ids:
                    continue
                prompt = entity_extraction_prompt(query["question"])
                entities = None
                for attempt in (1, 2):
                    response = client.complete(prompt)
                    try:
                        entities = parse_entity_list(response)
                        break
                    except (ValueError, KeyError, SyntaxError, TypeError) as exc:
                        logger.warning(
                            "query %s: unparseable response (attempt %d): %s",
                            query["id"], attempt, exc,
                        )
                if entities is None:
                    skipped.append(query["id"])
                    continue
                record = {"query_id": query["id"], "entities": entities}
                done_records.append(record)
                done_ids.add(query["id"])
                partial_fh.write(json.dumps(record, ensure_ascii=False) + "\n")
                partial_fh.flush()
    except EndpointError:
        logger.error("endpoint failed; partial results kept at %s", partial)
        raise

    atomic_write_jsonl(out_path, done_records)
    partial.unlink(missing_ok=True)
    return {
        "queries": len(queries),
        "written": len(done_records),
        "skipped": skipped,
        "resumed": bool(done_ids) and len(done_records) != len(queries),
    }
