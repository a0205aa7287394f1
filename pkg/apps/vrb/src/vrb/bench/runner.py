"""Benchmark sweep: every (arm, index spec) configuration over the prompt set.

Each configuration builds its index, retrieves the top-k attractions for
every prompt, writes ``{arm}_{family}_{metric}.json`` and is assessed for
keyword hits. A failing configuration is recorded and the sweep carries on.
Configurations run in worker threads, at most ``jobs`` at a time; the
summary is reduced in configuration-name order so repeated runs with the
same seed write byte-identical result and summary files. Wall-clock timings
go to a separate ``timings.json``.
"""

import asyncio
import json
import os
import time
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ..core.errors import VrbError
from ..core.logging import bind_context, clear_context, get_logger
from ..corpus.loader import load_attractions, load_prompts
from ..evalkit.hits import assess_all_queries, dump_results
from ..evalkit.report import gap_table, render_text, write_gap_csv
from ..evalkit.stats import table1_from_counts
from ..index import SearchResult, build_index, recall_at_k
from ..index.base import QueryInput
from ..models.bench import BenchConfig, IndexFamily, IndexSpec, Metric, VectorArm
from ..models.corpus import Attraction, PromptSet
from ..models.evaluation import EvalReport, GapRow, QueryResults, RetrievedDoc
from ..textproc.tokenizer import TokenizerSpec
from ..vectorize.embeddings import load_embeddings
from ..vectorize.tfidf import fit_transform

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_STARTUP = 2


@dataclass(frozen=True)
class ArmData:
    """Doc matrix and one query vector per prompt for one vectorization arm."""

    arm: VectorArm
    docs: Any
    queries: Sequence[QueryInput]


@dataclass
class ConfigOutcome:
    """Result of one configuration of the sweep."""

    arm: VectorArm
    spec: IndexSpec
    report: EvalReport | None = None
    error: str | None = None
    results_file: str | None = None
    ids: list[SearchResult] = field(default_factory=list, repr=False)
    build_seconds: float = 0.0
    mean_query_ms: float = 0.0
    recall: float | None = None

    @property
    def name(self) -> str:
        return config_name(self.arm, self.spec)

    @property
    def ok(self) -> bool:
        return self.error is None

    def summary(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "arm": self.arm.value,
            "family": self.spec.family.value,
            "metric": self.spec.metric.value,
            "status": "ok" if self.ok else "failed",
            "error": self.error,
            "results_file": self.results_file,
            "avg_hit_count": self.report.avg_hit_count if self.report else None,
            "avg_hit_rate": self.report.avg_hit_rate if self.report else None,
            "total_hits": self.report.total_hits if self.report else None,
            "total_results": self.report.total_results if self.report else None,
            "recall_at_k": self.recall,
        }


@dataclass
class BenchSummary:
    """All outcomes of a sweep plus the comparison table."""

    config: BenchConfig
    outcomes: list[ConfigOutcome]
    table: list[GapRow]

    @property
    def exit_code(self) -> int:
        return EXIT_OK if all(o.ok for o in self.outcomes) else EXIT_PARTIAL

    def to_dict(self) -> dict[str, Any]:
        return {
            "k": self.config.k,
            "seed": self.config.seed,
            "arms": [arm.value for arm in self.config.arms],
            "hit_mode": self.config.hit_mode,
            "configs": [o.summary() for o in self.outcomes],
            "table": [row.model_dump() for row in self.table],
        }


def config_name(arm: VectorArm, spec: IndexSpec) -> str:
    return f"{arm.value}_{spec.family.value}_{spec.metric.value}"


def row_labels(grid: Sequence[IndexSpec]) -> dict[tuple[IndexFamily, Metric], str]:
    """Family name alone when the grid uses it with one metric, else family_metric."""
    metrics_per_family: dict[IndexFamily, set[Metric]] = {}
    for spec in grid:
        metrics_per_family.setdefault(spec.family, set()).add(spec.metric)
    return {
        (spec.family, spec.metric): (
            spec.family.value if len(metrics_per_family[spec.family]) == 1 else spec.label
        )
        for spec in grid
    }


def prepare_arms(
    config: BenchConfig,
    attractions: Sequence[Attraction],
    prompts: PromptSet,
    tokenizer: TokenizerSpec,
) -> list[ArmData]:
    """Vectorize docs and prompts for every enabled arm.

    Raises:
        VrbError: If the embedding arm is enabled without embedding files, or
            the query file does not cover every prompt
    """
    arms: list[ArmData] = []
    for arm in config.arms:
        if arm is VectorArm.TFIDF:
            model, docs = fit_transform(attractions, tokenizer, normalize=config.normalize_tfidf)
            arms.append(ArmData(arm, docs, [model.transform(text) for text in prompts.texts]))
            continue
        corpus = config.corpus
        if corpus.doc_embeddings is None or corpus.query_embeddings is None:
            raise VrbError("embedding arm needs corpus.doc_embeddings and corpus.query_embeddings")
        table = load_embeddings(corpus.doc_embeddings, corpus.query_embeddings, n_docs=len(attractions))
        queries = table.query_matrix()
        if queries.shape[0] != len(prompts):
            raise VrbError(
                f"query embeddings cover {queries.shape[0]} prompts, prompt file has {len(prompts)}"
            )
        arms.append(ArmData(arm, table.doc_matrix(), list(queries)))
    return arms


def run_config(
    arm: ArmData,
    spec: IndexSpec,
    attractions: Sequence[Attraction],
    prompts: PromptSet,
    tokenizer: TokenizerSpec,
    config: BenchConfig,
) -> ConfigOutcome:
    """Build, search, write and assess one configuration; errors are captured."""
    outcome = ConfigOutcome(arm=arm.arm, spec=spec)
    bind_context(config=outcome.name)
    try:
        started = time.perf_counter()
        index = build_index(spec, arm.docs)
        outcome.build_seconds = time.perf_counter() - started

        started = time.perf_counter()
        results: dict[str, QueryResults] = {}
        for text, vector in zip(prompts.texts, arm.queries, strict=True):
            found = index.search(vector, config.k)
            outcome.ids.append(found)
            results[text] = QueryResults(
                query=text,
                results=[
                    RetrievedDoc(description=attractions[i].description, name=attractions[i].name)
                    for i in found.ids
                ],
            )
        outcome.mean_query_ms = 1000 * (time.perf_counter() - started) / max(len(prompts), 1)

        path = config.out / f"{outcome.name}.json"
        path.write_text(dump_results(results), encoding="utf-8")
        outcome.results_file = path.name
        outcome.report = assess_all_queries(
            results, tokenizer, outcome.name, prompts=prompts, mode=config.hit_mode
        )
        logger.info(
            "config_completed",
            avg_hit_count=round(outcome.report.avg_hit_count, 4),
            build_seconds=round(outcome.build_seconds, 3),
        )
    except Exception as e:
        outcome.error = f"{type(e).__name__}: {e}"
        logger.error("config_failed", error=outcome.error)
    finally:
        clear_context()
    return outcome


def _exact_reference(
    arm: ArmData, metric: Metric, k: int, seed: int
) -> list[SearchResult]:
    flat = build_index(IndexSpec(family=IndexFamily.FLAT, metric=metric, seed=seed), arm.docs)
    return [flat.search(q, k) for q in arm.queries]


def _attach_recall(outcomes: Sequence[ConfigOutcome], arms: Sequence[ArmData], config: BenchConfig) -> None:
    references: dict[tuple[VectorArm, Metric], list[SearchResult]] = {}
    by_arm = {a.arm: a for a in arms}
    for outcome in outcomes:
        if not outcome.ok:
            continue
        key = (outcome.arm, outcome.spec.metric)
        if key not in references:
            references[key] = _exact_reference(by_arm[outcome.arm], outcome.spec.metric, config.k, config.seed)
        outcome.recall = recall_at_k(outcome.ids, references[key], config.k)


def build_table(outcomes: Sequence[ConfigOutcome], grid: Sequence[IndexSpec]) -> list[GapRow]:
    """Comparison rows in grid order; the embedding arm is the gap base.

    Counts are used exactly as measured (no grid snapping).
    """
    labels = row_labels(grid)
    found = {(o.arm, o.spec.family, o.spec.metric): o for o in outcomes}
    counts: dict[str, tuple[float | None, float | None]] = {}
    for spec in grid:
        key = (spec.family, spec.metric)
        values = []
        for arm in (VectorArm.TFIDF, VectorArm.EMBEDDING):
            outcome = found.get((arm, *key))
            values.append(outcome.report.avg_hit_count if outcome and outcome.report else None)
        counts[labels[key]] = (values[0], values[1])
    return table1_from_counts(counts, n_results=None)


async def run_bench_async(config: BenchConfig) -> BenchSummary:
    """Run the sweep described by ``config``.

    Raises:
        VrbError: Startup failures (unreadable corpus or prompts, missing
            embedding files, bad index parameters)
    """
    attractions = load_attractions(config.corpus.attractions)
    prompts = load_prompts(config.corpus.prompts)
    tokenizer = TokenizerSpec.from_config(config.tokenizer)
    grid = config.index_grid()
    for spec in grid:
        spec.resolved(len(attractions))
    arms = prepare_arms(config, attractions, prompts, tokenizer)
    config.out.mkdir(parents=True, exist_ok=True)

    jobs = config.jobs or os.cpu_count() or 1
    semaphore = asyncio.Semaphore(jobs)
    logger.info(
        "bench_started",
        configs=len(grid) * len(arms),
        attractions=len(attractions),
        prompts=len(prompts),
        jobs=jobs,
    )

    async def run_with_limit(arm: ArmData, spec: IndexSpec) -> ConfigOutcome:
        async with semaphore:
            return await asyncio.to_thread(run_config, arm, spec, attractions, prompts, tokenizer, config)

    outcomes = await asyncio.gather(*[run_with_limit(arm, spec) for arm in arms for spec in grid])
    ordered = sorted(outcomes, key=lambda o: o.name)
    _attach_recall(ordered, arms, config)

    summary = BenchSummary(config=config, outcomes=ordered, table=build_table(ordered, grid))
    write_summary(summary)
    logger.info(
        "bench_completed",
        ok=sum(o.ok for o in ordered),
        failed=sum(not o.ok for o in ordered),
        exit_code=summary.exit_code,
    )
    return summary


def run_bench(config: BenchConfig) -> BenchSummary:
    """Synchronous entry point of the sweep."""
    return asyncio.run(run_bench_async(config))


def write_summary(summary: BenchSummary) -> None:
    """summary.json, summary.csv, summary.txt and timings.json in the output directory."""
    out: Path = summary.config.out
    (out / "summary.json").write_text(
        json.dumps(summary.to_dict(), ensure_ascii=False, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    write_gap_csv(out / "summary.csv", summary.table)
    (out / "summary.txt").write_text(render_text(gap_table(summary.table)), encoding="utf-8")
    timings = {
        o.name: {"build_seconds": o.build_seconds, "mean_query_ms": o.mean_query_ms}
        for o in summary.outcomes
    }
    (out / "timings.json").write_text(json.dumps(timings, indent=2, sort_keys=True) + "\n", encoding="utf-8")
