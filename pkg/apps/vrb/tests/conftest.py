"""
Viewpoint Retrieval Bench Tests - Shared Fixtures
"""
from pathlib import Path

import numpy as np
import pytest

from vrb.corpus.loader import write_attractions
from vrb.models.bench import BenchConfig, CorpusConfig
from vrb.models.corpus import Attraction, KnowledgeEntry, PromptSet
from vrb.textproc.tokenizer import TokenizerSpec

from synthetic import (
    make_attractions,
    make_prompts,
    write_embedding_files,
    write_prompts,
)


# =============================================================================
# Corpus Fixtures
# =============================================================================

@pytest.fixture(scope="session")
def attractions() -> list[Attraction]:
    """Sixty synthetic attractions."""
    return make_attractions(60, seed=7)


@pytest.fixture(scope="session")
def prompts() -> PromptSet:
    """Twelve synthetic prompts with three features each."""
    return make_prompts(12, seed=7)


@pytest.fixture
def tokenizer() -> TokenizerSpec:
    """Default unicode_mixed tokenizer without stop-words."""
    return TokenizerSpec()


@pytest.fixture
def knowledge(attractions: list[Attraction]) -> dict[int, KnowledgeEntry]:
    """One manual knowledge entry per attraction."""
    return {
        a.id: KnowledgeEntry(
            attraction_id=a.id,
            history=f"{a.name}的历史记录{a.id}",
            geography=f"{a.name}位于{a.province}{a.city}",
        )
        for a in attractions
    }


# =============================================================================
# On-Disk Fixtures
# =============================================================================

@pytest.fixture
def corpus_dir(tmp_path: Path, attractions: list[Attraction], prompts: PromptSet) -> Path:
    """Attraction CSV, prompts and embedding files in one directory."""
    write_attractions(attractions, tmp_path / "attractions.csv")
    write_prompts(tmp_path / "prompts.json", prompts)
    write_embedding_files(tmp_path, attractions, prompts)
    return tmp_path


@pytest.fixture
def bench_config(corpus_dir: Path) -> BenchConfig:
    """Both arms, default grid, two jobs."""
    return BenchConfig(
        corpus=CorpusConfig(
            attractions=corpus_dir / "attractions.csv",
            prompts=corpus_dir / "prompts.json",
            doc_embeddings=corpus_dir / "doc_embeddings.txt",
            query_embeddings=corpus_dir / "query_embeddings.txt",
        ),
        out=corpus_dir / "out",
        jobs=2,
        seed=3,
    )


# =============================================================================
# Vector Fixtures
# =============================================================================

@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)

