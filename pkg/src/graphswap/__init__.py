"""Corpus poisoning via type-preserving entity swapping, plus the graph
analysis and evaluation harness that quantifies the induced damage."""

from .chains import GoldChain, load_chains, save_chains
from .corpus import (
    Corpus,
    Document,
    Query,
    TokenSpan,
    load_corpus,
    load_queries,
    save_corpus,
    save_queries,
    tokenize,
)
from .errors import (
    GraphSwapError,
    ParseError,
    SpectralConvergenceError,
    StaleAnnotationError,
    UnknownDocumentError,
    ValidationError,
)
from .global_pool import GlobalPool, build_global_pool, build_random_pool
from .inventory import (
    ENTITY_TYPES,
    EntityInventory,
    Mention,
    TypedEntity,
    extract_builtin,
    import_annotations,
)
from .query_pool import (
    QueryEntity,
    QueryPool,
    fallback_query_entities,
    import_query_entities,
    verify_against_corpus,
)
from .swap import (
    PoisonPlan,
    RewriteLog,
    Substitution,
    build_permutation,
    build_plan,
    load_log,
    load_plan,
    revert_corpus,
    rewrite_corpus,
    save_log,
    save_plan,
    unify_pools,
)

__version__ = "0.1.0"

__all__ = [
    "Corpus",
    "Document",
    "ENTITY_TYPES",
    "EntityInventory",
    "GlobalPool",
    "GoldChain",
    "GraphSwapError",
    "Mention",
    "ParseError",
    "PoisonPlan",
    "Query",
    "QueryEntity",
    "QueryPool",
    "RewriteLog",
    "SpectralConvergenceError",
    "StaleAnnotationError",
    "Substitution",
    "TokenSpan",
    "TypedEntity",
    "UnknownDocumentError",
    "ValidationError",
    "build_global_pool",
    "build_permutation",
    "build_plan",
    "build_random_pool",
    "extract_builtin",
    "fallback_query_entities",
    "import_annotations",
    "import_query_entities",
    "load_chains",
    "load_corpus",
    "load_log",
    "load_plan",
    "load_queries",
    "revert_corpus",
    "rewrite_corpus",
    "save_chains",
    "save_corpus",
    "save_log",
    "save_plan",
    "save_queries",
    "tokenize",
    "unify_pools",
    "verify_against_corpus",
]
