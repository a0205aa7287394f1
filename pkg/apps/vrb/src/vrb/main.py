"""
vrb command-line entry point.

Commands build and query single indexes, run the full benchmark sweep,
score results files and component judgements, render reports and drive the
RAG flow. Command output goes to stdout; structured logs go to stderr.
Exit codes: 0 success, 1 sweep finished with failed configurations,
2 startup error (unreadable inputs, invalid configuration).
"""

import asyncio
import functools
import json
import math
from collections.abc import Callable
from pathlib import Path
from typing import Any, TypeVar

import click
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from . import __version__
from .bench.config import load_bench_config, read_document
from .bench.runner import EXIT_STARTUP, run_bench
from .core.config import Settings, get_settings
from .core.errors import ConfigError, VrbError
from .core.logging import configure_logging, get_logger
from .corpus.loader import load_attractions, load_knowledge, load_prompts, save_knowledge
from .evalkit.composite import load_components, score_rows
from .evalkit.hits import assess_all_queries, load_results
from .evalkit.report import (
    fmt_count,
    fmt_pct,
    gap_table,
    render_text,
    score_table,
    write_gap_csv,
    write_score_csv,
)
from .index import SearchResult, VectorIndex, build_index, load_index, save_index
from .models.bench import IndexFamily, IndexSpec, Metric, TokenizerConfig, VectorArm
from .models.corpus import Attraction
from .models.evaluation import GapRow
from .models.rag import GenParams
from .ragflow.client import EchoLlmClient, HttpLlmClient, LlmClient
from .ragflow.extraction import FallbackExtractor, extract_all
from .ragflow.pipeline import Retriever, answer
from .textproc.tokenizer import TokenizerSpec
from .vectorize.embeddings import load_embeddings
from .vectorize.tfidf import fit_transform

logger = get_logger(__name__)
console = Console()

F = TypeVar("F", bound=Callable[..., Any])


def startup_errors(func: F) -> F:
    """Report bench and I/O errors on stderr and exit with the startup code."""

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return func(*args, **kwargs)
        except (VrbError, OSError, ValidationError) as e:
            logger.error("command_failed", command=func.__name__, error=str(e))
            click.echo(f"error: {e}", err=True)
            raise SystemExit(EXIT_STARTUP) from e

    return wrapper  # type: ignore[return-value]


def corpus_options(func: F) -> F:
    """Shared --config and input file flags."""
    options = [
        click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), help="TOML bench document."),
        click.option("--attractions", type=click.Path(path_type=Path), help="Attraction CSV."),
        click.option("--prompts", type=click.Path(path_type=Path), help="Prompt set JSON."),
        click.option("--knowledge", type=click.Path(path_type=Path), help="Knowledge store JSON."),
        click.option("--doc-embeddings", type=click.Path(path_type=Path), help="Per-attraction embedding file."),
        click.option("--query-embeddings", type=click.Path(path_type=Path), help="Per-prompt embedding file."),
        click.option("--stopwords", type=click.Path(path_type=Path), help="Stop-word list."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def index_options(func: F) -> F:
    """Arm, family and metric of a single index."""
    options = [
        click.option("--arm", type=click.Choice([a.value for a in VectorArm]), default=VectorArm.TFIDF.value, show_default=True),
        click.option("--family", type=click.Choice([f.value for f in IndexFamily]), default=IndexFamily.FLAT.value, show_default=True),
        click.option("--metric", type=click.Choice([m.value for m in Metric]), default=Metric.L2.value, show_default=True),
        click.option("--seed", type=int, default=None, help="Seed for randomized index stages."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


class Inputs:
    """Input paths and tokenizer resolved from --config plus flags."""

    def __init__(self, config_path: Path | None, **flags: Any) -> None:
        document = read_document(config_path) if config_path is not None else {}
        self.document = document
        self.corpus: dict[str, Any] = dict(document.get("corpus", {}))
        self.corpus.update(
            {k: v for k, v in flags.items() if v is not None and k != "stopwords"}
        )
        tokenizer = dict(document.get("tokenizer", {}))
        if flags.get("stopwords") is not None:
            tokenizer["stopwords"] = flags["stopwords"]
        self.tokenizer = TokenizerSpec.from_config(TokenizerConfig.model_validate(tokenizer))

    def path(self, key: str) -> Path:
        value = self.corpus.get(key)
        if value is None:
            raise ConfigError(f"--{key.replace('_', '-')} (or corpus.{key}) is required")
        return Path(value)

    def seed(self, flag: int | None, settings: Settings) -> int:
        if flag is not None:
            return flag
        return int(self.document.get("seed", settings.default_seed))

    def attractions(self) -> list[Attraction]:
        return load_attractions(self.path("attractions"))


def _spec(family: str, metric: str, seed: int) -> IndexSpec:
    return IndexSpec(family=IndexFamily(family), metric=Metric(metric), seed=seed)


def _shown_score(metric: Metric, score: float) -> float:
    return math.sqrt(max(score, 0.0)) if metric is Metric.L2 else score


def _print_hits(result: SearchResult, attractions: list[Attraction], metric: Metric) -> None:
    table = Table(title=f"Top {len(result)} ({metric.value})")
    table.add_column("Rank", justify="right")
    table.add_column("Id", justify="right")
    table.add_column("Name")
    table.add_column("Distance" if metric.ascending else "Score", justify="right")
    for rank, (doc_id, score) in enumerate(zip(result.ids, result.scores, strict=True), start=1):
        table.add_row(
            str(rank), str(doc_id), attractions[doc_id].name, f"{_shown_score(metric, score):.4f}"
        )
    console.print(table)


def _client(settings: Settings, stub: bool) -> LlmClient:
    return EchoLlmClient() if stub else HttpLlmClient.from_settings(settings)


async def _close(client: LlmClient) -> None:
    if isinstance(client, HttpLlmClient):
        await client.close()


@click.group()
@click.version_option(__version__, prog_name="vrb")
@click.option("--log-level", default=None, help="Overrides LOG_LEVEL.")
@click.pass_context
def cli(ctx: click.Context, log_level: str | None) -> None:
    """Vector index benchmark, keyword-hit evaluation and RAG answering."""
    settings = get_settings()
    configure_logging(log_level or settings.log_level, settings.is_development)
    ctx.obj = settings


@cli.command("build-index")
@corpus_options
@index_options
@click.option("--out", "out_path", type=click.Path(dir_okay=False, path_type=Path), required=True)
@click.pass_obj
@startup_errors
def build_index_command(
    settings: Settings,
    config_path: Path | None,
    arm: str,
    family: str,
    metric: str,
    seed: int | None,
    out_path: Path,
    **paths: Any,
) -> None:
    """Build one index over the attraction corpus and save it."""
    inputs = Inputs(config_path, **paths)
    attractions = inputs.attractions()
    spec = _spec(family, metric, inputs.seed(seed, settings))
    if VectorArm(arm) is VectorArm.TFIDF:
        _, docs = fit_transform(attractions, inputs.tokenizer)
    else:
        docs = load_embeddings(
            inputs.path("doc_embeddings"), None, n_docs=len(attractions)
        ).doc_matrix()
    index = build_index(spec, docs)
    save_index(index, out_path)
    click.echo(f"{spec.label} index over {index.ntotal} attractions (dim {index.dim}) -> {out_path}")


@cli.command("query")
@corpus_options
@index_options
@click.option("--k", type=click.IntRange(min=1), default=3, show_default=True)
@click.option("--index", "index_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), help="Saved index to search instead of building one.")
@click.argument("text")
@click.pass_obj
@startup_errors
def query_command(
    settings: Settings,
    config_path: Path | None,
    arm: str,
    family: str,
    metric: str,
    seed: int | None,
    k: int,
    index_path: Path | None,
    text: str,
    **paths: Any,
) -> None:
    """Print the top-k attractions for TEXT.

    The embedding arm has no text encoder; TEXT must then be one of the
    prompts, whose precomputed query vector is used.
    """
    inputs = Inputs(config_path, **paths)
    attractions = inputs.attractions()
    spec = _spec(family, metric, inputs.seed(seed, settings))

    if VectorArm(arm) is VectorArm.TFIDF:
        model, docs = fit_transform(attractions, inputs.tokenizer)
        vector: Any = model.transform(text)
    else:
        prompts = load_prompts(inputs.path("prompts"))
        if text not in prompts.texts:
            raise ConfigError("embedding arm queries must be prompt texts")
        table = load_embeddings(
            inputs.path("doc_embeddings"), inputs.path("query_embeddings"), n_docs=len(attractions)
        )
        docs = table.doc_matrix()
        vector = table.query_matrix()[prompts.texts.index(text)]

    index: VectorIndex = load_index(index_path) if index_path else build_index(spec, docs)
    result = index.search(vector, k)
    _print_hits(result, attractions, index.spec.metric)


@cli.command("bench")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), help="TOML bench document.")
@click.option("--attractions", type=click.Path(path_type=Path))
@click.option("--prompts", type=click.Path(path_type=Path))
@click.option("--doc-embeddings", type=click.Path(path_type=Path))
@click.option("--query-embeddings", type=click.Path(path_type=Path))
@click.option("--seed", type=int, default=None)
@click.option("--k", type=int, default=None)
@click.option("--jobs", type=int, default=None, help="Parallel configurations (default: logical cores).")
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), default=None)
@click.option("--arms", default=None, help="Comma-separated subset of tfidf,embedding.")
@click.option("--hit-mode", type=click.Choice(["text", "features"]), default=None)
@click.pass_obj
def bench_command(
    settings: Settings,
    config_path: Path | None,
    attractions: Path | None,
    prompts: Path | None,
    doc_embeddings: Path | None,
    query_embeddings: Path | None,
    seed: int | None,
    k: int | None,
    jobs: int | None,
    out: Path | None,
    arms: str | None,
    hit_mode: str | None,
) -> None:
    """Run every (arm, index) configuration and write results plus a summary."""

    @startup_errors
    def sweep() -> int:
        config = load_bench_config(
            config_path,
            overrides={
                "seed": seed,
                "k": k,
                "jobs": jobs,
                "out": out,
                "arms": [a.strip() for a in arms.split(",") if a.strip()] if arms else None,
                "hit_mode": hit_mode,
            },
            corpus_overrides={
                "attractions": attractions,
                "prompts": prompts,
                "doc_embeddings": doc_embeddings,
                "query_embeddings": query_embeddings,
            },
        )
        summary = run_bench(config)
        console.print(gap_table(summary.table))
        for outcome in summary.outcomes:
            if not outcome.ok:
                console.print(f"[red]failed[/red] {outcome.name}: {outcome.error}")
        console.print(f"Results written to {config.out}")
        return summary.exit_code

    raise SystemExit(sweep())


@cli.command("eval-hits")
@click.argument("results_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--mode", type=click.Choice(["text", "features"]), default="text", show_default=True)
@click.option("--prompts", "prompts_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--stopwords", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--json", "as_json", is_flag=True, help="Print the full report as JSON.")
@startup_errors
def eval_hits_command(
    results_path: Path,
    mode: str,
    prompts_path: Path | None,
    stopwords: Path | None,
    as_json: bool,
) -> None:
    """Score a results file for keyword hits."""
    if mode == "features" and prompts_path is None:
        raise ConfigError("--mode features needs --prompts")
    tokenizer = TokenizerSpec.from_config(TokenizerConfig(stopwords=stopwords))
    prompts = load_prompts(prompts_path) if prompts_path else None
    report = assess_all_queries(
        load_results(results_path), tokenizer, results_path.stem, prompts=prompts, mode=mode  # type: ignore[arg-type]
    )
    if as_json:
        click.echo(report.model_dump_json(indent=2))
        return
    click.echo(f"config          {report.config_name}")
    click.echo(f"results         {report.total_results}")
    click.echo(f"avg hit count   {fmt_count(report.avg_hit_count)}")
    click.echo(f"avg hit rate    {fmt_pct(report.avg_hit_rate)}")


@cli.command("score")
@click.argument("components_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--out", "out_path", type=click.Path(dir_okay=False, path_type=Path), help="Also write the table as CSV.")
@startup_errors
def score_command(components_path: Path, out_path: Path | None) -> None:
    """Composite scores, percentages and RAG-vs-fine-tuning improvement."""
    rows = score_rows(load_components(components_path))
    console.print(score_table(rows))
    if out_path is not None:
        write_score_csv(out_path, rows)


@cli.command("report")
@click.argument("summary_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--components", "components_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), help="Component judgements to add the score table.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False, path_type=Path), help="Directory for the CSV copies (default: beside the summary).")
@startup_errors
def report_command(summary_path: Path, components_path: Path | None, out_dir: Path | None) -> None:
    """Render a sweep summary as tables plus CSV."""
    summary = json.loads(summary_path.read_text(encoding="utf-8"))
    rows = [GapRow.model_validate(row) for row in summary.get("table", [])]
    out_dir = out_dir or summary_path.parent
    out_dir.mkdir(parents=True, exist_ok=True)

    gaps = gap_table(rows)
    console.print(gaps)
    write_gap_csv(out_dir / "report_hits.csv", rows)
    text = render_text(gaps)

    configs = Table(title="Configurations")
    for column in ("Config", "Status", "Avg hit count", "Avg hit rate", "Recall@k"):
        configs.add_column(column)
    for entry in summary.get("configs", []):
        recall = entry.get("recall_at_k")
        configs.add_row(
            entry["name"],
            entry["status"],
            fmt_count(entry.get("avg_hit_count")),
            fmt_pct(entry.get("avg_hit_rate")),
            "-" if recall is None else f"{recall:.4f}",
        )
    console.print(configs)
    text += render_text(configs)

    if components_path is not None:
        scored = score_rows(load_components(components_path))
        scores = score_table(scored)
        console.print(scores)
        write_score_csv(out_dir / "report_scores.csv", scored)
        text += render_text(scores)

    (out_dir / "report.txt").write_text(text, encoding="utf-8")


@cli.command("extract-knowledge")
@corpus_options
@click.option("--out", "out_path", type=click.Path(dir_okay=False, path_type=Path), required=True)
@click.option("--fallback", is_flag=True, help="Offline rule-based extraction, no LLM calls.")
@click.option("--fallback-on-failure", is_flag=True, help="Use the rule-based splitter when the LLM fails.")
@click.option("--stub", is_flag=True, help="Use the echo client instead of the LLM endpoint.")
@click.pass_obj
@startup_errors
def extract_knowledge_command(
    settings: Settings,
    config_path: Path | None,
    out_path: Path,
    fallback: bool,
    fallback_on_failure: bool,
    stub: bool,
    **paths: Any,
) -> None:
    """Split every attraction description into history and geography knowledge."""
    inputs = Inputs(config_path, **paths)
    attractions = inputs.attractions()
    splitter = FallbackExtractor() if fallback or fallback_on_failure else None
    client = None if fallback else _client(settings, stub)

    async def run() -> Any:
        try:
            return await extract_all(
                attractions, client, settings.extraction_concurrency, fallback=splitter
            )
        finally:
            if client is not None:
                await _close(client)

    report = asyncio.run(run())
    save_knowledge(report.entries.values(), out_path)
    click.echo(
        f"{len(report.entries)} entries -> {out_path} "
        f"({len(report.fallback_used)} fallback, {len(report.failed)} failed)"
    )
    if report.failed:
        raise SystemExit(1)


@cli.command("answer")
@corpus_options
@click.option("--family", type=click.Choice([f.value for f in IndexFamily]), default=IndexFamily.HNSW.value, show_default=True)
@click.option("--metric", type=click.Choice([m.value for m in Metric]), default=Metric.L2.value, show_default=True)
@click.option("--k", type=click.IntRange(1, 3), default=3, show_default=True)
@click.option("--stub", is_flag=True, help="Echo client: the answer is the assembled input.")
@click.option("--max-input-tokens", type=click.IntRange(min=1), default=None)
@click.argument("query")
@click.pass_obj
@startup_errors
def answer_command(
    settings: Settings,
    config_path: Path | None,
    family: str,
    metric: str,
    k: int,
    stub: bool,
    max_input_tokens: int | None,
    query: str,
    **paths: Any,
) -> None:
    """Answer QUERY from the knowledge of its top-k TF-IDF retrieved attractions."""
    inputs = Inputs(config_path, **paths)
    attractions = inputs.attractions()
    store = load_knowledge(inputs.path("knowledge"), attractions)
    spec = _spec(family, metric, inputs.seed(None, settings))
    retriever = Retriever.tfidf(attractions, spec, inputs.tokenizer, k=k)
    params = GenParams() if max_input_tokens is None else GenParams(max_input_tokens=max_input_tokens)
    client = _client(settings, stub)

    async def run() -> Any:
        try:
            return await answer(query, retriever, store, client, params, inputs.tokenizer)
        finally:
            await _close(client)

    result = asyncio.run(run())
    click.echo(result.answer)
    click.echo(
        json.dumps(
            {
                "attraction_ids": result.attraction_ids,
                "names": [attractions[i].name for i in result.attraction_ids],
            },
            ensure_ascii=False,
        ),
        err=True,
    )


if __name__ == "__main__":
    cli()
