"""Corpus and query storage.

Corpora are line-delimited record files (one document per line, ``id`` +
``text``), kept in file order because poisoned rewrites must stay diffable
against the clean corpus. Loaded corpora are immutable; rewriting produces
a new corpus value.

Offsets throughout the toolkit are Python string indices (code points),
and every span contract is "the slice equals the surface".
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple

from .errors import ParseError, ValidationError
from .fileio import read_jsonl, write_jsonl


class TokenSpan(NamedTuple):
    start: int
    end: int
    surface: str


@dataclass(frozen=True)
class Document:
    id: str
    text: str


@dataclass(frozen=True)
class Query:
    id: str
    question: str
    answer: str


class Corpus:
    """Ordered, immutable collection of documents with unique ids."""

    def __init__(self, documents: Iterable[Document]):
        docs = tuple(documents)
        by_id: dict[str, Document] = {}
        for doc in docs:
            if not doc.id:
                raise ValidationError("document id must be non-empty")
            if not doc.text.strip():
                raise ValidationError(f"document {doc.id!r} has empty text")
            if doc.id in by_id:
                raise ValidationError(f"duplicate document id {doc.id!r}")
            by_id[doc.id] = doc
        self._docs = docs
        self._by_id = by_id

    def __len__(self) -> int:
        return len(self._docs)

    def __iter__(self) -> Iterator[Document]:
        return iter(self._docs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Corpus):
            return NotImplemented
        return self._docs == other._docs

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self._by_id

    def __getitem__(self, doc_id: str) -> Document:
        return self._by_id[doc_id]

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(d.id for d in self._docs)


def load_corpus(path: str | Path) -> Corpus:
    docs = []
    seen: set[str] = set()
    for lineno, rec in read_jsonl(path):
        if "id" not in rec or "text" not in rec:
            raise ParseError(f"{path}:{lineno}: record needs 'id' and 'text' fields")
        doc_id = str(rec["id"])
        if doc_id in seen:
            raise ValidationError(f"{path}:{lineno}: duplicate document id {doc_id!r}")
        seen.add(doc_id)
        docs.append(Document(id=doc_id, text=str(rec["text"])))
    return Corpus(docs)


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    write_jsonl(path, ({"id": d.id, "text": d.text} for d in corpus))


def load_queries(path: str | Path) -> list[Query]:
    queries = []
    seen: set[str] = set()
    for lineno, rec in read_jsonl(path):
        for field in ("id", "question", "answer"):
            if field not in rec:
                raise ParseError(f"{path}:{lineno}: record needs {field!r} field")
        qid = str(rec["id"])
        if qid in seen:
            raise ValidationError(f"{path}:{lineno}: duplicate query id {qid!r}")
        if not str(rec["question"]).strip() or not str(rec["answer"]).strip():
            raise ValidationError(f"{path}:{lineno}: question and answer must be non-empty")
        seen.add(qid)
        queries.append(Query(id=qid, question=str(rec["question"]), answer=str(rec["answer"])))
    return queries


def save_queries(queries: Iterable[Query], path: str | Path) -> None:
    write_jsonl(path, ({"id": q.id, "question": q.question, "answer": q.answer} for q in queries))


# Word runs, or single non-word non-space characters. Keeping punctuation
# one char per token makes the percent rule in the builtin extractor local.
_TOKEN_RE = re.compile(r"\w+|[^\w\s]", re.UNICODE)


def tokenize(text: str) -> list[TokenSpan]:
    """Deterministic word/punctuation split; spans partition the non-space text."""
    return [TokenSpan(m.start(), m.end(), m.group()) for m in _TOKEN_RE.finditer(text)]


def token_surfaces(corpus: Corpus) -> set[str]:
    """Set of token surface forms over a whole corpus (for injection accounting)."""
    vocab: set[str] = set()
    for doc in corpus:
        for span in tokenize(doc.text):
            vocab.add(span.surface)
    return vocab
