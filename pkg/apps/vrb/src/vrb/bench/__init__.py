"""Benchmark sweep orchestration."""

from .config import load_bench_config, read_document
from .runner import (
    EXIT_OK,
    EXIT_PARTIAL,
    EXIT_STARTUP,
    BenchSummary,
    ConfigOutcome,
    build_table,
    config_name,
    run_bench,
    run_bench_async,
    run_config,
)

__all__ = [
    "EXIT_OK",
    "EXIT_PARTIAL",
    "EXIT_STARTUP",
    "BenchSummary",
    "ConfigOutcome",
    "build_table",
    "config_name",
    "run_bench",
    "run_bench_async",
    "run_config",
    "load_bench_config",
    "read_document",
]
