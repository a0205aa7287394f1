"""Bench configuration document loading.

The document is TOML. Sweep fields of ``BenchConfig`` (``arms``, ``k``,
``seed``, ``jobs``, ``out``, ``normalize_tfidf``, ``hit_mode``) live under
``[bench]``, input files under ``[corpus]``, tokenizer options under
``[tokenizer]`` and an optional explicit grid as ``[[bench.grid]]`` tables::

    [corpus]
    attractions = "data/attractions.csv"
    prompts = "data/prompts.json"

    [bench]
    arms = ["tfidf", "embedding"]
    k = 3

    [[bench.grid]]
    family = "HNSW"
    metric = "IP"
    params = { M = 32, ef_search = 128 }

Relative paths resolve against the document's directory.
"""

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from ..core.errors import ConfigError
from ..models.bench import BenchConfig

_CORPUS_PATHS = ("attractions", "prompts", "knowledge", "doc_embeddings", "query_embeddings")


def read_document(path: Path | str) -> dict[str, Any]:
    """Parse a TOML bench document into ``BenchConfig`` shape.

    ``[bench]`` keys are lifted to the top level and relative paths resolve
    against the document's directory.

    Raises:
        ConfigError: If the file is not valid TOML
    """
    path = Path(path)
    try:
        with open(path, "rb") as f:
            document = tomllib.load(f)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"{path}: {e}") from e

    document.update(document.pop("bench", {}))
    base = path.parent
    corpus = document.get("corpus", {})
    for key in _CORPUS_PATHS:
        if isinstance(corpus.get(key), str):
            corpus[key] = str(base / corpus[key])
    tokenizer = document.get("tokenizer", {})
    if isinstance(tokenizer.get("stopwords"), str):
        tokenizer["stopwords"] = str(base / tokenizer["stopwords"])
    if isinstance(document.get("out"), str):
        document["out"] = str(base / document["out"])
    return document


def load_bench_config(
    path: Path | str | None = None,
    overrides: dict[str, Any] | None = None,
    corpus_overrides: dict[str, Any] | None = None,
) -> BenchConfig:
    """Build a BenchConfig from an optional document plus flag overrides.

    Overrides whose value is None are ignored, so unset flags keep the
    document's value (or the model default).

    Raises:
        ConfigError: If the document is unreadable or the merged config is invalid
    """
    document = read_document(path) if path is not None else {}
    document.update({k: v for k, v in (overrides or {}).items() if v is not None})
    corpus = dict(document.get("corpus", {}))
    corpus.update({k: v for k, v in (corpus_overrides or {}).items() if v is not None})
    document["corpus"] = corpus
    try:
        return BenchConfig.model_validate(document)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors()
        )
        raise ConfigError(f"invalid bench config: {problems}") from e
