"""Keyword-hit evaluation and composite score models."""

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field


class RetrievedDoc(BaseModel):
    """One retrieved attraction as stored in a results file."""

    description: str = ""
    name: str = ""


class QueryResults(BaseModel):
    """A query and its ranked results; results files map query text to these."""

    query: str
    results: list[RetrievedDoc]


class QueryHits(BaseModel):
    """Hits scored for each retrieved result of one query."""

    query: str
    per_result_hits: list[int] = Field(default_factory=list)


class EvalReport(BaseModel):
    """Keyword-hit statistics for one configuration."""

    config_name: str
    avg_hit_count: float = Field(ge=0)
    avg_hit_rate: float = Field(ge=0)
    total_hits: int = 0
    total_results: int = 0
    per_query: list[QueryHits] = Field(default_factory=list)


class ComponentScores(BaseModel):
    """Fluency, accuracy and relevance judgements for a response, each in [0, 1].

    Range checks happen in the scorer so they surface as ComponentOutOfRange.
    """

    model_config = ConfigDict(frozen=True)

    fluency: float
    accuracy: float
    relevance: float


class CompositeWeights(BaseModel):
    """Weights of the composite score; relevance carries the most weight."""

    model_config = ConfigDict(frozen=True)

    d1: float = Field(default=0.3, gt=0)
    d2: float = Field(default=0.2, gt=0)
    d3: float = Field(default=0.4, gt=0)


Group = Literal["RAG", "Fine-tuning"]


class ScoreRow(BaseModel):
    """One model/group row of the generation comparison."""

    model: str
    group: Group
    components: ComponentScores
    overall: float | None = None
    overall_pct: float | None = None
    improvement: float | None = None


class GapRow(BaseModel):
    """One index row of the vectorizer comparison."""

    index: str
    tfidf_hit_count: float | None = None
    tfidf_hit_rate: float | None = None
    embedding_hit_count: float | None = None
    embedding_hit_rate: float | None = None
    avg_gap: float | None = None
