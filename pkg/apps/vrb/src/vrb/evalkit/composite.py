"""Composite response score and the RAG vs fine-tuning comparison.

score = d1 * fluency + d2 * log2(accuracy + 1) + d3 * exp(relevance)

With the default weights 0.3 / 0.2 / 0.4 a perfect response scores
0.3 + 0.2 + 0.4e = 1.5873, the denominator of the percentage column.
"""

import csv
import math
from collections.abc import Iterable
from pathlib import Path

from pydantic import ValidationError

from ..core.errors import ComponentOutOfRange, MalformedRow
from ..core.logging import get_logger
from ..models.evaluation import ComponentScores, CompositeWeights, ScoreRow
from .stats import relative_gap

logger = get_logger(__name__)

DEFAULT_WEIGHTS = CompositeWeights()
COMPONENT_COLUMNS = ("model", "group", "fluency", "accuracy", "relevance")


def composite_score(scores: ComponentScores, weights: CompositeWeights = DEFAULT_WEIGHTS) -> float:
    """Weighted composite of one response's component scores.

    Raises:
        ComponentOutOfRange: If a component lies outside [0, 1]
    """
    for name in ("fluency", "accuracy", "relevance"):
        value = getattr(scores, name)
        if not 0.0 <= value <= 1.0:
            raise ComponentOutOfRange(name, value)
    return (
        weights.d1 * scores.fluency
        + weights.d2 * math.log2(scores.accuracy + 1.0)
        + weights.d3 * math.exp(scores.relevance)
    )


def full_score(weights: CompositeWeights = DEFAULT_WEIGHTS) -> float:
    return composite_score(ComponentScores(fluency=1.0, accuracy=1.0, relevance=1.0), weights)


def percentize(score: float, weights: CompositeWeights = DEFAULT_WEIGHTS) -> float:
    """Score as a fraction of the full score."""
    return score / full_score(weights)


def score_rows(rows: Iterable[ScoreRow], weights: CompositeWeights = DEFAULT_WEIGHTS) -> list[ScoreRow]:
    """Fill overall, overall % and improvement; rows out of range are skipped with a warning.

    Improvement is set on a model's RAG row as (RAG - fine-tuning) / fine-tuning
    when the model also has a fine-tuning row.
    """
    scored: list[ScoreRow] = []
    for row in rows:
        try:
            overall = composite_score(row.components, weights)
        except ComponentOutOfRange as e:
            logger.warning("score_row_skipped", model=row.model, group=row.group, reason=str(e))
            continue
        scored.append(
            row.model_copy(update={"overall": overall, "overall_pct": percentize(overall, weights)})
        )

    fine_tuned = {r.model: r.overall for r in scored if r.group == "Fine-tuning"}
    result = []
    for row in scored:
        base = fine_tuned.get(row.model)
        if row.group == "RAG" and base is not None and row.overall is not None:
            row = row.model_copy(update={"improvement": relative_gap(row.overall, base)})
        result.append(row)
    return result


def load_components(path: Path | str) -> list[ScoreRow]:
    """Read component rows ``model,group,fluency,accuracy,relevance``.

    A blank model cell repeats the previous row's model.

    Raises:
        MalformedRow: On unparseable values or an unknown group
    """
    rows: list[ScoreRow] = []
    previous_model = ""
    with open(path, encoding="utf-8-sig", newline="") as f:
        reader = csv.DictReader(f)
        missing = [c for c in COMPONENT_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise MalformedRow(1, reason=f"missing columns {', '.join(missing)}")
        for record in reader:
            if not any((value or "").strip() for value in record.values()):
                continue
            model = (record["model"] or "").strip() or previous_model
            previous_model = model
            try:
                rows.append(
                    ScoreRow(
                        model=model,
                        group=(record["group"] or "").strip(),
                        components=ComponentScores(
                            fluency=float(record["fluency"]),
                            accuracy=float(record["accuracy"]),
                            relevance=float(record["relevance"]),
                        ),
                    )
                )
            except (TypeError, ValueError, ValidationError) as e:
                raise MalformedRow(reader.line_num, reason=str(e).splitlines()[0]) from e
    return rows
