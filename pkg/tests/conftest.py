import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from graphswap.corpus import Corpus, Document


@pytest.fixture
def tiny_corpus() -> Corpus:
    return Corpus(
        [
            Document("doc1", "Marie Curie met Pierre Curie in Paris. Paris welcomed them."),
            Document("doc2", "Pierre Curie lectured in Warsaw during 1903."),
            Document("doc3", "Paris hosted the 1900 exposition."),
        ]
    )
