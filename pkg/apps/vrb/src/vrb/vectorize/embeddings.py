"""Precomputed dense embeddings (the encoder arm) and a hashing stand-in for tests.

File format (UTF-8 text)::

    n d
    id v1 v2 ... vd      (n lines)

Doc files must cover attraction ids 0..n-1 and query files prompt ids 0..m-1.
"""

import hashlib
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..core.errors import DimensionMismatch, MalformedRow, MissingDoc
from ..core.logging import get_logger
from ..textproc.tokenizer import TokenizerSpec, tokenize

logger = get_logger(__name__)


@dataclass(frozen=True)
class EmbeddingTable:
    """Doc and query vectors sharing one dimension."""

    dim: int
    doc_vectors: dict[int, np.ndarray]
    query_vectors: dict[int, np.ndarray]

    def doc_matrix(self) -> np.ndarray:
        """(n_docs, dim) matrix in doc id order."""
        return _stack(self.doc_vectors, self.dim)

    def query_matrix(self) -> np.ndarray:
        """(n_queries, dim) matrix in prompt id order."""
        return _stack(self.query_vectors, self.dim)


def load_embeddings(
    doc_path: Path | str,
    query_path: Path | str | None = None,
    n_docs: int | None = None,
) -> EmbeddingTable:
    """Load doc and query embedding files.

    Args:
        doc_path: Doc embedding file
        query_path: Query embedding file; omitted when only docs are needed
        n_docs: Expected number of attractions; defaults to the file header

    Raises:
        DimensionMismatch: A row's component count differs from d, or the two files disagree on d
        MissingDoc: An id in 0..n-1 has no row
        MalformedRow: Unparseable or non-finite values
    """
    doc_dim, docs = _read_vectors(Path(doc_path), n_docs)
    query_dim, queries = (
        _read_vectors(Path(query_path), None) if query_path is not None else (doc_dim, {})
    )
    if queries and query_dim != doc_dim:
        raise DimensionMismatch(doc_dim, query_dim, row="query header")
    logger.info("embeddings_loaded", dim=doc_dim, docs=len(docs), queries=len(queries))
    return EmbeddingTable(dim=doc_dim, doc_vectors=docs, query_vectors=queries)


def write_embeddings(path: Path | str, vectors: np.ndarray) -> Path:
    """Write an (n, d) matrix in the embedding file format; row i gets id i."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    matrix = np.asarray(vectors, dtype=np.float64)
    if matrix.ndim != 2:
        raise ValueError("vectors must be a 2-d matrix")
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"{matrix.shape[0]} {matrix.shape[1]}\n")
        for i, row in enumerate(matrix):
            f.write(" ".join([str(i), *(repr(float(v)) for v in row)]) + "\n")
    return path


@dataclass
class HashingEmbedder:
    """Seeded, non-semantic pseudo-embedder.

    Each token maps to a hash-seeded random sign vector in ``dim`` dimensions;
    a text's embedding is the length-normalized sum over its tokens. Texts
    sharing tokens land near each other, which is all the test-suite needs.
    It is not a model of meaning.
    """

    tokenizer: TokenizerSpec
    dim: int = 64
    seed: int = 0
    _cache: dict[str, np.ndarray] = field(default_factory=dict, repr=False)

    def embed(self, text: str) -> np.ndarray:
        total = np.zeros(self.dim, dtype=np.float64)
        for token in tokenize(self.tokenizer, text):
            total += self._token_vector(token)
        norm = float(np.linalg.norm(total))
        return total / norm if norm > 0 else total

    def embed_many(self, texts: Sequence[str]) -> np.ndarray:
        if not texts:
            return np.zeros((0, self.dim), dtype=np.float64)
        return np.vstack([self.embed(t) for t in texts])

    def _token_vector(self, token: str) -> np.ndarray:
        cached = self._cache.get(token)
        if cached is None:
            digest = hashlib.blake2b(
                token.encode("utf-8"), digest_size=8, key=(self.seed % 2**64).to_bytes(8, "little")
            ).digest()
            rng = np.random.default_rng(int.from_bytes(digest, "little"))
            cached = rng.choice([-1.0, 1.0], size=self.dim) / np.sqrt(self.dim)
            self._cache[token] = cached
        return cached


def _read_vectors(path: Path, expected: int | None) -> tuple[int, dict[int, np.ndarray]]:
    with open(path, encoding="utf-8") as f:
        lines = [line for line in f.read().splitlines() if line.strip()]
    if not lines:
        raise MalformedRow(1, reason=f"{path} is empty")
    try:
        n, dim = (int(part) for part in lines[0].split())
    except ValueError as e:
        raise MalformedRow(1, reason="header must be 'n d'") from e

    limit = expected if expected is not None else n
    vectors: dict[int, np.ndarray] = {}
    for line_no, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if len(parts) - 1 != dim:
            raise DimensionMismatch(dim, len(parts) - 1, row=line_no)
        try:
            row_id = int(parts[0])
            values = np.array([float(v) for v in parts[1:]], dtype=np.float64)
        except ValueError as e:
            raise MalformedRow(line_no, reason="non-numeric value") from e
        if not np.all(np.isfinite(values)):
            raise MalformedRow(line_no, reason="non-finite component")
        if not 0 <= row_id < limit:
            raise MalformedRow(line_no, reason=f"id {row_id} outside 0..{limit - 1}")
        vectors[row_id] = values

    for doc_id in range(limit):
        if doc_id not in vectors:
            raise MissingDoc(doc_id)
    return dim, vectors


def _stack(vectors: dict[int, np.ndarray], dim: int) -> np.ndarray:
    if not vectors:
        return np.zeros((0, dim), dtype=np.float64)
    return np.vstack([vectors[i] for i in sorted(vectors)])
