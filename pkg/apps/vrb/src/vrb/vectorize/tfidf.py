"""TF-IDF vectorization: w = tf * log(N / df).

Raw term counts, no IDF smoothing, no sublinear tf. Row normalization exists
behind a flag and is off by default. The natural log is used unless a base is
given; changing the base rescales every weight by one constant, so rankings
under L2, L1 and inner product do not depend on it.
"""

import math
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from ..core.errors import DomainError, EmptyVocabulary
from ..core.logging import get_logger
from ..models.corpus import Attraction
from ..textproc.tokenizer import TokenizerSpec, tokenize

logger = get_logger(__name__)


def tfidf_weight(tf: int, df: int, n_docs: int, log_base: float | None = None) -> float:
    """Weight of a term occurring ``tf`` times in a document.

    Raises:
        DomainError: If df < 1, df > n_docs or tf < 0
    """
    if df < 1 or df > n_docs:
        raise DomainError(f"df must be in [1, N={n_docs}], got {df}")
    if tf < 0:
        raise DomainError(f"tf must be >= 0, got {tf}")
    if tf == 0:
        return 0.0
    idf = math.log(n_docs / df) if log_base is None else math.log(n_docs / df, log_base)
    return tf * idf


@dataclass(frozen=True)
class SparseVector:
    """Sorted (index, weight) pairs over ``dim`` columns; zero weights are never stored."""

    dim: int
    indices: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        indices = np.asarray(self.indices, dtype=np.int64)
        weights = np.asarray(self.weights, dtype=np.float64)
        if indices.shape != weights.shape or indices.ndim != 1:
            raise ValueError("indices and weights must be 1-d arrays of equal length")
        if indices.size and (np.any(np.diff(indices) <= 0) or indices[0] < 0 or indices[-1] >= self.dim):
            raise ValueError("indices must be strictly increasing and < dim")
        if np.any(weights == 0):
            raise ValueError("explicit zero weights are not stored")
        indices.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def from_dict(cls, dim: int, values: dict[int, float]) -> "SparseVector":
        """Build from an index -> weight map, dropping zeros."""
        items = sorted((i, w) for i, w in values.items() if w != 0)
        return cls(
            dim=dim,
            indices=np.array([i for i, _ in items], dtype=np.int64),
            weights=np.array([w for _, w in items], dtype=np.float64),
        )

    @property
    def entries(self) -> list[tuple[int, float]]:
        return list(zip(self.indices.tolist(), self.weights.tolist(), strict=True))

    @property
    def nnz(self) -> int:
        return int(self.indices.size)

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dim, dtype=np.float64)
        out[self.indices] = self.weights
        return out

    def to_csr(self) -> sparse.csr_matrix:
        """One-row CSR matrix."""
        return sparse.csr_matrix(
            (self.weights, self.indices, np.array([0, self.nnz])), shape=(1, self.dim)
        )


@dataclass(frozen=True)
class TfIdfModel:
    """Fitted vocabulary and document frequencies."""

    vocabulary: dict[str, int]
    doc_freq: dict[str, int]
    n_docs: int
    tokenizer: TokenizerSpec
    log_base: float | None = None
    normalize: bool = False
    _idf: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        idf = np.zeros(len(self.vocabulary), dtype=np.float64)
        for term, column in self.vocabulary.items():
            idf[column] = tfidf_weight(1, self.doc_freq[term], self.n_docs, self.log_base)
        idf.setflags(write=False)
        object.__setattr__(self, "_idf", idf)

    @property
    def dim(self) -> int:
        return len(self.vocabulary)

    def transform(self, text: str) -> SparseVector:
        return transform(self, text)


def fit_tfidf(
    corpus: Sequence[Attraction],
    tokenizer: TokenizerSpec,
    log_base: float | None = None,
    normalize: bool = False,
) -> TfIdfModel:
    """Fit vocabulary and document frequencies over ``name + " " + description``.

    Vocabulary columns are assigned in lexicographic term order.

    Raises:
        EmptyVocabulary: If no document yields a token
        ValueError: If the corpus is empty
    """
    if not corpus:
        raise ValueError("corpus must not be empty")

    doc_freq: Counter[str] = Counter()
    for attraction in corpus:
        doc_freq.update(set(tokenize(tokenizer, attraction.document_text)))
    if not doc_freq:
        raise EmptyVocabulary("no document produced a token")

    vocabulary = {term: column for column, term in enumerate(sorted(doc_freq))}
    model = TfIdfModel(
        vocabulary=vocabulary,
        doc_freq=dict(doc_freq),
        n_docs=len(corpus),
        tokenizer=tokenizer,
        log_base=log_base,
        normalize=normalize,
    )
    logger.info("tfidf_fitted", n_docs=model.n_docs, vocabulary=model.dim)
    return model


def transform(model: TfIdfModel, text: str) -> SparseVector:
    """Vectorize ``text``; out-of-vocabulary tokens are dropped."""
    counts = Counter(
        token for token in tokenize(model.tokenizer, text) if token in model.vocabulary
    )
    values: dict[int, float] = {}
    for term, tf in counts.items():
        column = model.vocabulary[term]
        values[column] = tf * float(model._idf[column])
    vector = SparseVector.from_dict(model.dim, values)
    if model.normalize and vector.nnz:
        norm = float(np.linalg.norm(vector.weights))
        vector = SparseVector(vector.dim, vector.indices, vector.weights / norm)
    return vector


def transform_many(model: TfIdfModel, texts: Sequence[str]) -> sparse.csr_matrix:
    """Stack ``transform`` rows into an (n, V) CSR matrix."""
    rows = [transform(model, text) for text in texts]
    indptr = np.zeros(len(rows) + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([row.nnz for row in rows])
    indices = np.concatenate([row.indices for row in rows]) if rows else np.array([], np.int64)
    data = np.concatenate([row.weights for row in rows]) if rows else np.array([], np.float64)
    return sparse.csr_matrix((data, indices, indptr), shape=(len(rows), model.dim))


def fit_transform(
    corpus: Sequence[Attraction],
    tokenizer: TokenizerSpec,
    log_base: float | None = None,
    normalize: bool = False,
) -> tuple[TfIdfModel, sparse.csr_matrix]:
    """Fit on the corpus and return its document matrix in attraction id order."""
    model = fit_tfidf(corpus, tokenizer, log_base=log_base, normalize=normalize)
    return model, transform_many(model, [a.document_text for a in corpus])
