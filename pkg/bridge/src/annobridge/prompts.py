"""Verbatim prompt assets.

These templates are sent unmodified except for the slotted fields; keeping
them byte-stable is part of the bridge contract, so edit with care.
"""

ENTITY_EXTRACTION_PROMPT = """Extract the reasoning-critical entities from the multi-hop question Q.

Your constraints:
- Do NOT answer Q.
- Do NOT add external knowledge.
- Use ONLY the wording of Q.
- Identify the minimal reasoning hops (1, 2, 3...).
- For each hop, extract only entities necessary for the reasoning chain.

Entity types:
Use spaCy's NER label set when applicable:
"PERSON", "NORP", "FAC", "ORG", "GPE", "LOC", "PRODUCT", "EVENT", "WORK_OF_ART", "LAW", "LANGUAGE", "DATE", "TIME", "PERCENT", "MONEY", "QUANTITY", "ORDINAL", "CARDINAL".

Additionally allow two reasoning-specific types:
- "ALIAS": paraphrased or descriptive label referring to an entity (e.g., "the nation called the nobilities commonwealth")
- "BRIDGE": implicit descriptive entity needed to connect reasoning hops (e.g., "the country where the operatives originated")

Guidelines:
- Include implicit bridge entities (BRIDGE) and alias-style descriptions (ALIAS) if they are part of the reasoning chain.
- Do NOT normalize entities to real-world names.
- Focus only on entities whose presence or value matters for understanding or resolving the question.

Output format (strict):
A Python-style list of dicts, e.g.:
[
  {"hop": 1, "entity": "...", "type": "GPE"},
  {"hop": 2, "entity": "...", "type": "BRIDGE"},
  {"hop": 3, "entity": "...", "type": "DATE"}
]
Return ONLY the list.

Q: {question}"""

JUDGE_PROMPT = """You are an expert judge evaluating if a model's prediction exactly matches the correct answer.

Question:
{question}

Prediction:
{prediction}

Correct answer:
{answer}

Task: Determine if the prediction exactly matches the correct answer. Consider:
- The prediction must contain the same core information as the correct answer.
- Minor formatting differences (punctuation, capitalization, spacing) should be ignored.
- The prediction should convey the same meaning as the correct answer.

Respond with only "YES" or "NO" (no other text)."""


def entity_extraction_prompt(question: str) -> str:
    return ENTITY_EXTRACTION_PROMPT.replace("{question}", question)


def judge_prompt(question: str, prediction: str, answer: str) -> str:
    return (
        JUDGE_PROMPT.replace("{question}", question)
        .replace("{prediction}", prediction)
        .replace("{answer}", answer)
    )
