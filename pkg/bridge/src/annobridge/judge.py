"""LLM answer judging: one YES/NO per query.

Any response other than a bare YES or NO is retried once, then the query is
marked UNJUDGED — the file never contains free text.
"""
from __future__ import annotations

import logging
from pathlib import Path

from .client import LlmClient
from .prompts import judge_prompt
from .records import BridgeError, atomic_write_jsonl, load_queries, read_jsonl

logger = logging.getLogger(__name__)

VERDICTS = ("YES", "NO")


def load_responses(path: str | Path) -> dict[str, str]:
    responses = {}
    for rec in read_jsonl(path):
        if "query_id" not in rec or "prediction" not in rec:
            raise BridgeError(f"{path}: response records need 'query_id' and 'prediction'")
        responses[str(rec["query_id"])] = str(rec["prediction"])
    return responses


def _normalize_verdict(text: str) -> str | None:
    cleaned = text.strip().strip('"').strip(".").upper()
    return cleaned if cleaned in VERDICTS else None


def judge_answers(
    queries_path: str | Path,
    responses_path: str | Path,
    out_path: str | Path,
    client: LlmClient,
) -> dict:
    queries = load_queries(queries_path)
    responses = load_responses(responses_path)
    records = []
    unjudged = 0
    for query in queries:
        if query["id"] not in responses:
            logger.warning("no response for query %s; marking UNJUDGED", query["id"])
            records.append({"query_id": query["id"], "judgment": "UNJUDGED"})
            unjudged += 1
            continue
        prompt = judge_prompt(query["question"], responses[query["id"]], query["answer"])
        verdict = None
        for attempt in (1, 2):
            verdict = _normalize_verdict(client.complete(prompt))
            if verdict is not None:
                break
            logger.warning("query %s: non-verdict judge output (attempt %d)", query["id"], attempt)
        if verdict is None:
            verdict = "UNJUDGED"
            unjudged += 1
        records.append({"query_id": query["id"], "judgment": verdict})
    atomic_write_jsonl(out_path, records)
    return {"queries": len(queries), "unjudged": unjudged}
