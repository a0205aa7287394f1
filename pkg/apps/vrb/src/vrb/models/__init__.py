"""VRB models module."""

from .bench import (
    BenchConfig,
    CorpusConfig,
    IndexFamily,
    IndexParams,
    IndexSpec,
    Metric,
    TokenizerConfig,
    TokenizerMode,
    VectorArm,
    default_grid,
)
from .corpus import ATTRACTION_COLUMNS, Attraction, KnowledgeEntry, Prompt, PromptSet
from .evaluation import (
    ComponentScores,
    CompositeWeights,
    EvalReport,
    GapRow,
    QueryHits,
    QueryResults,
    RetrievedDoc,
    ScoreRow,
)
from .rag import FunctionField, FunctionSchema, GenParams, RagAnswer

__all__ = [
    # Corpus
    "ATTRACTION_COLUMNS",
    "Attraction",
    "KnowledgeEntry",
    "Prompt",
    "PromptSet",
    # Bench
    "BenchConfig",
    "CorpusConfig",
    "IndexFamily",
    "IndexParams",
    "IndexSpec",
    "Metric",
    "TokenizerConfig",
    "TokenizerMode",
    "VectorArm",
    "default_grid",
    # Evaluation
    "ComponentScores",
    "CompositeWeights",
    "EvalReport",
    "GapRow",
    "QueryHits",
    "QueryResults",
    "RetrievedDoc",
    "ScoreRow",
    # RAG
    "FunctionField",
    "FunctionSchema",
    "GenParams",
    "RagAnswer",
]
