"""Typed entity inventories over a corpus.

An inventory records, for every (surface, type) pair, the documents it
occurs in, all occurrence spans, and its document frequency (number of
distinct documents with at least one mention — not the raw mention count;
the mention index keeps every occurrence because the rewriter needs them).

Inventories come from an external annotations file or from the built-in
heuristic extractor, which needs no external tooling.
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple

from .corpus import Corpus, tokenize
from .errors import (
    StaleAnnotationError,
    UnknownDocumentError,
    ValidationError,
)
from .fileio import read_jsonl

logger = logging.getLogger(__name__)

# Closed label set: spaCy's NER types plus two reasoning-specific labels
# (ALIAS for descriptive references, BRIDGE for implicit connector entities).
ENTITY_TYPES = frozenset(
    {
        "PERSON", "NORP", "FAC", "ORG", "GPE", "LOC", "PRODUCT", "EVENT",
        "WORK_OF_ART", "LAW", "LANGUAGE", "DATE", "TIME", "PERCENT", "MONEY",
        "QUANTITY", "ORDINAL", "CARDINAL", "ALIAS", "BRIDGE",
    }
)


class TypedEntity(NamedTuple):
    surface: str
    etype: str


@dataclass(frozen=True)
class Mention:
    doc_id: str
    start: int
    end: int
    entity: TypedEntity

    @property
    def surface(self) -> str:
        return self.entity.surface


def check_entity_type(label: str) -> str:
    if label not in ENTITY_TYPES:
        raise ValidationError(f"unknown entity type {label!r}")
    return label


class EntityInventory:
    """Immutable mention index with per-entity document frequencies."""

    def __init__(self, corpus_size: int, mentions: Iterable[Mention]):
        by_entity: dict[TypedEntity, list[Mention]] = {}
        by_doc: dict[str, list[Mention]] = {}
        doc_entities: dict[str, set[TypedEntity]] = {}
        for m in mentions:
            by_entity.setdefault(m.entity, []).append(m)
            by_doc.setdefault(m.doc_id, []).append(m)
            doc_entities.setdefault(m.doc_id, set()).add(m.entity)
        freq = {
            ent: len({m.doc_id for m in ms}) for ent, ms in by_entity.items()
        }
        self.corpus_size = corpus_size
        self._by_entity = by_entity
        self._by_doc = by_doc
        self._doc_entities = doc_entities
        self._freq = freq

    def frequency(self, entity: TypedEntity) -> int:
        return self._freq.get(entity, 0)

    def entities(self) -> list[TypedEntity]:
        return sorted(self._freq)

    def entities_of_type(self, etype: str) -> list[TypedEntity]:
        return sorted(e for e in self._freq if e.etype == etype)

    def types(self) -> list[str]:
        return sorted({e.etype for e in self._freq})

    def mentions_of(self, entity: TypedEntity) -> list[Mention]:
        return list(self._by_entity.get(entity, ()))

    def mentions_in(self, doc_id: str) -> list[Mention]:
        return list(self._by_doc.get(doc_id, ()))

    def doc_entities(self, doc_id: str) -> set[TypedEntity]:
        return set(self._doc_entities.get(doc_id, ()))

    def doc_ids(self) -> list[str]:
        return sorted(self._by_doc)

    def __len__(self) -> int:
        return len(self._freq)

    def __contains__(self, entity: TypedEntity) -> bool:
        return entity in self._freq


def import_annotations(corpus: Corpus, path: str | Path) -> EntityInventory:
    """Build an inventory from an external annotations file.

    One record per document: ``doc_id`` plus ``mentions`` of
    {surface, type, start, end}. Every span must still slice to its surface,
    otherwise the annotations are stale and the import hard-fails.
    """
    mentions: list[Mention] = []
    seen_docs: set[str] = set()
    for lineno, rec in read_jsonl(path):
        doc_id = str(rec.get("doc_id", ""))
        if doc_id not in corpus:
            raise UnknownDocumentError(f"{path}:{lineno}: unknown doc_id {doc_id!r}")
        if doc_id in seen_docs:
            raise ValidationError(f"{path}:{lineno}: duplicate annotation record for {doc_id!r}")
        seen_docs.add(doc_id)
        text = corpus[doc_id].text
        doc_mentions = []
        for m in rec.get("mentions", []):
            surface = str(m["surface"])
            etype = check_entity_type(str(m["type"]))
            start, end = int(m["start"]), int(m["end"])
            if not surface:
                raise ValidationError(f"{path}:{lineno}: empty mention surface in {doc_id!r}")
            if not (0 <= start < end <= len(text)):
                raise ValidationError(
                    f"{path}:{lineno}: span [{start},{end}) out of range for {doc_id!r}"
                )
            if text[start:end] != surface:
                raise StaleAnnotationError(
                    f"{path}:{lineno}: span [{start},{end}) in {doc_id!r} reads "
                    f"{text[start:end]!r}, annotation says {surface!r}"
                )
            doc_mentions.append(Mention(doc_id, start, end, TypedEntity(surface, etype)))
        doc_mentions.sort(key=lambda m: (m.start, m.end))
        mentions.extend(doc_mentions)
    return EntityInventory(len(corpus), mentions)


_YEAR_RE = re.compile(r"[12]\d{3}")
_DIGITS_RE = re.compile(r"\d+")


def _word_boundary_pattern(surface: str) -> re.Pattern[str]:
    return re.compile(r"(?<!\w)" + re.escape(surface) + r"(?!\w)")


def extract_builtin(
    corpus: Corpus,
    gazetteer: Mapping[str, str] | None = None,
    default_type: str = "PERSON",
) -> EntityInventory:
    """Deterministic heuristic extractor.

    Gazetteer surfaces (matched case-sensitively at word boundaries, longest
    first) take their given type. Remaining text is scanned token-wise:
    4-digit years become DATE, other pure numerals CARDINAL, a numeral glued
    to a ``%`` sign PERCENT, and maximal runs of capitalized tokens take
    ``default_type``.
    """
    check_entity_type(default_type)
    gaz = dict(gazetteer or {})
    for surface, etype in gaz.items():
        if not surface:
            raise ValidationError("gazetteer surface must be non-empty")
        check_entity_type(etype)
    gaz_order = sorted(gaz, key=lambda s: (-len(s), s))
    gaz_patterns = [(s, gaz[s], _word_boundary_pattern(s)) for s in gaz_order]

    mentions: list[Mention] = []
    for doc in corpus:
        text = doc.text
        claimed: list[tuple[int, int]] = []

        def overlaps(start: int, end: int) -> bool:
            return any(start < ce and cs < end for cs, ce in claimed)

        doc_mentions: list[Mention] = []
        for surface, etype, pattern in gaz_patterns:
            for m in pattern.finditer(text):
                if overlaps(m.start(), m.end()):
                    continue
                claimed.append((m.start(), m.end()))
                doc_mentions.append(
                    Mention(doc.id, m.start(), m.end(), TypedEntity(surface, etype))
                )

        tokens = [t for t in tokenize(text) if not overlaps(t.start, t.end)]
        i = 0
        while i < len(tokens):
            tok = tokens[i]
            if _DIGITS_RE.fullmatch(tok.surface):
                nxt = tokens[i + 1] if i + 1 < len(tokens) else None
                if nxt is not None and nxt.surface == "%" and nxt.start == tok.end:
                    surface = text[tok.start : nxt.end]
                    doc_mentions.append(
                        Mention(doc.id, tok.start, nxt.end, TypedEntity(surface, "PERCENT"))
                    )
                    i += 2
                    continue
                etype = "DATE" if _YEAR_RE.fullmatch(tok.surface) else "CARDINAL"
                doc_mentions.append(
                    Mention(doc.id, tok.start, tok.end, TypedEntity(tok.surface, etype))
                )
                i += 1
                continue
            if tok.surface[0].isalpha() and tok.surface[0].isupper():
                j = i
                end = tok.end
                while (
                    j + 1 < len(tokens)
                    and tokens[j + 1].surface[0].isalpha()
                    and tokens[j + 1].surface[0].isupper()
                    and text[end : tokens[j + 1].start] == " "
                ):
                    j += 1
                    end = tokens[j].end
                surface = text[tok.start : end]
                doc_mentions.append(
                    Mention(doc.id, tok.start, end, TypedEntity(surface, default_type))
                )
                i = j + 1
                continue
            i += 1

        doc_mentions.sort(key=lambda m: (m.start, m.end))
        mentions.extend(doc_mentions)
    return EntityInventory(len(corpus), mentions)
