"""NER annotation producer.

Two backends: ``spacy`` (external model, the production path) and ``regex``
(self-contained heuristics, the offline path used in tests). Either way,
every mention's offsets are re-sliced against the source text before the
record is written; drifting records are dropped with a warning rather than
emitted, because the consumer hard-fails on stale spans.
"""
from __future__ import annotations

import logging
import re
from pathlib import Path

from .records import ENTITY_TYPES, BridgeError, atomic_write_jsonl, load_corpus

logger = logging.getLogger(__name__)

_TOKEN_RE = re.compile(r"\w+|[^\w\s]", re.UNICODE)
_YEAR_RE = re.compile(r"[12]\d{3}")
_DIGITS_RE = re.compile(r"\d+")


def _regex_mentions(text: str) -> list[dict]:
    tokens = list(_TOKEN_RE.finditer(text))
    mentions: list[dict] = []
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        surface = tok.group()
        if _DIGITS_RE.fullmatch(surface):
            nxt = tokens[i + 1] if i + 1 < len(tokens) else None
            if nxt is not None and nxt.group() == "%" and nxt.start() == tok.end():
                mentions.append(
                    {"surface": text[tok.start() : nxt.end()], "type": "PERCENT",
                     "start": tok.start(), "end": nxt.end()}
                )
                i += 2
                continue
            etype = "DATE" if _YEAR_RE.fullmatch(surface) else "CARDINAL"
            mentions.append(
                {"surface": surface, "type": etype, "start": tok.start(), "end": tok.end()}
            )
            i += 1
            continue
        if surface[0].isalpha() and surface[0].isupper():
            j = i
            end = tok.end()
            while (
                j + 1 < len(tokens)
                and tokens[j + 1].group()[0].isalpha()
                and tokens[j + 1].group()[0].isupper()
                and text[end : tokens[j + 1].start()] == " "
            ):
                j += 1
                end = tokens[j].end()
            mentions.append(
                {"surface": text[tok.start() : end], "type": "PERSON",
                 "start": tok.start(), "end": end}
            )
            i = j + 1
            continue
        i += 1
    return mentions


def _spacy_mentions(texts: list[str], model: str) -> list[list[dict]]:
    try:
        import spacy
    except ImportError as exc:  # pragma: no cover - optional backend
        raise BridgeError("spacy backend requested but spacy is not installed") from exc
    nlp = spacy.load(model)
    out = []
    for doc in nlp.pipe(texts):
        mentions = []
        for span in doc.ents:
            if span.label_ not in ENTITY_TYPES:
                continue
            mentions.append(
                {
                    "surface": span.text,
                    "type": span.label_,
                    "start": span.start_char,
                    "end": span.end_char,
                }
            )
        out.append(mentions)
    return out


def annotate_ner(
    corpus_path: str | Path,
    out_path: str | Path,
    backend: str = "regex",
    model: str = "en_core_web_sm",
) -> int:
    """Write one annotation record per document; returns the mention count."""
    docs = load_corpus(corpus_path)
    if backend == "regex":
        per_doc = [_regex_mentions(d["text"]) for d in docs]
    elif backend == "spacy":
        per_doc = _spacy_mentions([d["text"] for d in docs], model)
    else:
        raise BridgeError(f"unknown NER backend {backend!r}")

    records = []
    total = 0
    for doc, mentions in zip(docs, per_doc):
        validated = []
        for m in mentions:
            if doc["text"][m["start"] : m["end"]] != m["surface"]:
                logger.warning(
                    "dropping drifted mention %r at [%d,%d) in %s",
                    m["surface"], m["start"], m["end"], doc["id"],
                )
                continue
            validated.append(m)
        total += len(validated)
        records.append({"doc_id": doc["id"], "mentions": validated})
    atomic_write_jsonl(out_path, records)
    return total
