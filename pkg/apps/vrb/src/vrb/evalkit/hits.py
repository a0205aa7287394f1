"""Keyword-hit evaluation of retrieval results.

For every query, each retrieved result's text (description followed by name)
is scored by how many query keywords it contains. The configuration's
average hit count is the total over all results divided by the number of
results, and 0 when nothing was retrieved.
"""

import json
from collections.abc import Mapping
from pathlib import Path
from typing import Any, Literal

from pydantic import TypeAdapter, ValidationError

from ..core.errors import MalformedResults
from ..core.logging import get_logger
from ..models.corpus import PromptSet
from ..models.evaluation import EvalReport, QueryHits, QueryResults
from ..textproc.tokenizer import TokenizerSpec, extract_keywords
from .stats import hit_rate

logger = get_logger(__name__)

HitMode = Literal["text", "features"]

_RESULTS = TypeAdapter(dict[str, QueryResults])


def hit_score(query_keywords: set[str], result_keywords: set[str]) -> int:
    """Number of query keywords present in the result."""
    return len(query_keywords & result_keywords)


def feature_hit_score(features: list[set[str]], result_keywords: set[str]) -> int:
    """Number of declared features whose keywords all occur in the result."""
    return sum(1 for keywords in features if keywords and keywords <= result_keywords)


def parse_results(raw: Any) -> dict[str, QueryResults]:
    """Validate the query -> {query, results} shape.

    Raises:
        MalformedResults: On any schema violation
    """
    try:
        return _RESULTS.validate_python(raw)
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(part) for part in first["loc"])
        raise MalformedResults(f"{where}: {first['msg']}") from e


def load_results(path: Path | str) -> dict[str, QueryResults]:
    """Read and validate a results file."""
    try:
        with open(path, encoding="utf-8") as f:
            raw = json.load(f)
    except json.JSONDecodeError as e:
        raise MalformedResults(f"{path}: {e}") from e
    return parse_results(raw)


def dump_results(results: Mapping[str, QueryResults]) -> str:
    """Serialize results deterministically: UTF-8 text, keys sorted."""
    payload = {text: entry.model_dump() for text, entry in results.items()}
    return json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def assess_all_queries(
    results: Mapping[str, QueryResults] | Mapping[str, Any],
    tokenizer: TokenizerSpec,
    config_name: str = "",
    prompts: PromptSet | None = None,
    mode: HitMode = "text",
) -> EvalReport:
    """Score every retrieved result of every query.

    In ``text`` mode the query keywords come from the query text. In
    ``features`` mode they come from the prompt's declared features; queries
    missing from ``prompts`` fall back to text mode.

    Raises:
        MalformedResults: If ``results`` does not follow the results shape
    """
    if not isinstance(results, Mapping):
        raise MalformedResults("results must map query text to {query, results}")
    parsed = parse_results(dict(results))
    declared = {p.text: p.features for p in prompts.prompts} if prompts is not None else {}

    per_query: list[QueryHits] = []
    total_hits = 0
    total_results = 0
    fallbacks = 0
    for entry in parsed.values():
        features = declared.get(entry.query) if mode == "features" else None
        if mode == "features" and features is None:
            fallbacks += 1
        feature_keywords = [extract_keywords(tokenizer, f) for f in features] if features else []
        query_keywords = extract_keywords(tokenizer, entry.query)

        hits: list[int] = []
        for doc in entry.results:
            result_keywords = extract_keywords(tokenizer, f"{doc.description}{doc.name}")
            if feature_keywords:
                hits.append(feature_hit_score(feature_keywords, result_keywords))
            else:
                hits.append(hit_score(query_keywords, result_keywords))
        per_query.append(QueryHits(query=entry.query, per_result_hits=hits))
        total_hits += sum(hits)
        total_results += len(hits)

    if fallbacks:
        logger.warning("feature_mode_fallback", config=config_name, queries=fallbacks)

    average = total_hits / total_results if total_results > 0 else 0.0
    report = EvalReport(
        config_name=config_name,
        avg_hit_count=average,
        avg_hit_rate=hit_rate(average),
        total_hits=total_hits,
        total_results=total_results,
        per_query=per_query,
    )
    logger.debug(
        "queries_assessed",
        config=config_name,
        queries=len(per_query),
        avg_hit_count=round(average, 4),
    )
    return report
