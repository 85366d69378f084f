"""Shared record IO and the closed entity-type set.

The schemas here mirror the core toolkit's external interfaces exactly:
corpus records are {id, text}, queries {id, question, answer}, annotations
{doc_id, mentions: [{surface, type, start, end}]}, query entities
{query_id, entities: [{hop, entity, type, role}]}, and judgments
{query_id, judgment}.
"""
from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Iterable, Iterator

ENTITY_TYPES = frozenset(
    {
        "PERSON", "NORP", "FAC", "ORG", "GPE", "LOC", "PRODUCT", "EVENT",
        "WORK_OF_ART", "LAW", "LANGUAGE", "DATE", "TIME", "PERCENT", "MONEY",
        "QUANTITY", "ORDINAL", "CARDINAL", "ALIAS", "BRIDGE",
    }
)

ROLE_FOR_TYPE = {"BRIDGE": "bridge", "ALIAS": "alias"}


class BridgeError(Exception):
    pass


def read_jsonl(path: str | Path) -> Iterator[dict]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                yield json.loads(line)
            except json.JSONDecodeError as exc:
                raise BridgeError(f"{path}:{lineno}: malformed record: {exc.msg}") from exc


def atomic_write_jsonl(path: str | Path, records: Iterable[dict]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            for rec in records:
                fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_json(path: str | Path, obj) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(json.dumps(obj, ensure_ascii=False, indent=2, sort_keys=True) + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_corpus(path: str | Path) -> list[dict]:
    docs = []
    for rec in read_jsonl(path):
        if "id" not in rec or "text" not in rec:
            raise BridgeError(f"{path}: corpus records need 'id' and 'text'")
        docs.append({"id": str(rec["id"]), "text": str(rec["text"])})
    return docs


def load_queries(path: str | Path) -> list[dict]:
    queries = []
    for rec in read_jsonl(path):
        for field in ("id", "question", "answer"):
            if field not in rec:
                raise BridgeError(f"{path}: query records need {field!r}")
        queries.append(
            {
                "id": str(rec["id"]),
                "question": str(rec["question"]),
                "answer": str(rec["answer"]),
            }
        )
    return queries
