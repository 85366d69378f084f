"""File-producing annotation bridge.

Generates the three record files the poisoning core consumes — NER
annotations, per-query reasoning entities, and answer judgments — from an
external NER backend and an LLM endpoint. Strictly out of process: the only
contract with the core is the file schemas.
"""

from .client import LlmClient, SpendCounter
from .cot import extract_cot
from .judge import judge_answers
from .ner import annotate_ner

__version__ = "0.1.0"

__all__ = ["LlmClient", "SpendCounter", "annotate_ner", "extract_cot", "judge_answers"]
