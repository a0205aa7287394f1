"""Distance metrics, ranking and recall.

L2 is the squared Euclidean distance; it orders candidates exactly like the
true distance and the CLI takes the square root only for display. Every
ranking breaks ties by ascending doc id.
"""

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from ..core.errors import DimensionMismatch
from ..models.bench import Metric
from ..vectorize.tfidf import SparseVector

Vector = np.ndarray | SparseVector


@dataclass(frozen=True)
class SearchResult:
    """Up to k doc ids with their scores, best first."""

    ids: tuple[int, ...]
    scores: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.ids)

    def to_dict(self) -> dict[str, list[int] | list[float]]:
        return {"ids": list(self.ids), "scores": list(self.scores)}


def distance(metric: Metric, a: Vector, b: Vector) -> float:
    """Score of one vector pair: squared L2, L1, or the dot product for IP.

    Raises:
        DimensionMismatch: If the vectors differ in dimension
        TypeError: If one vector is sparse and the other dense
    """
    if isinstance(a, SparseVector) and isinstance(b, SparseVector):
        if a.dim != b.dim:
            raise DimensionMismatch(a.dim, b.dim)
        return float(pairwise_scores(metric, a.to_csr(), b.to_csr())[0])
    if isinstance(a, SparseVector) or isinstance(b, SparseVector):
        raise TypeError("sparse-dense vector pairs are not supported")

    left = np.asarray(a, dtype=np.float64).ravel()
    right = np.asarray(b, dtype=np.float64).ravel()
    if left.size != right.size:
        raise DimensionMismatch(left.size, right.size)
    return float(pairwise_scores(metric, left.reshape(1, -1), right)[0])


def pairwise_scores(
    metric: Metric,
    matrix: np.ndarray | sparse.csr_matrix,
    query: np.ndarray | sparse.csr_matrix,
) -> np.ndarray:
    """Score every row of ``matrix`` against ``query``.

    Dense rows take a dense 1-d query; CSR rows take a one-row CSR query.
    """
    if sparse.issparse(matrix):
        if not sparse.issparse(query):
            raise TypeError("a sparse matrix needs a sparse query")
        return _sparse_scores(metric, sparse.csr_matrix(matrix), sparse.csr_matrix(query))
    if sparse.issparse(query):
        raise TypeError("a dense matrix needs a dense query")

    if metric is Metric.IP:
        return (matrix * query).sum(axis=1)
    diff = matrix - query
    if metric is Metric.L2:
        return (diff**2).sum(axis=1)
    return np.abs(diff).sum(axis=1)


def _sparse_scores(metric: Metric, matrix: sparse.csr_matrix, query: sparse.csr_matrix) -> np.ndarray:
    query.sum_duplicates()
    support = query.indices
    weights = query.data
    n_rows = matrix.shape[0]

    # Columns in the query's support are compared densely
    on_support = matrix[:, support].toarray() if support.size else np.zeros((n_rows, 0))
    if metric is Metric.IP:
        return (on_support * weights).sum(axis=1)

    diff = on_support - weights
    inner = (diff**2).sum(axis=1) if metric is Metric.L2 else np.abs(diff).sum(axis=1)

    # Entries outside the support are compared against zero
    outside = ~np.isin(matrix.indices, support)
    row_of_entry = np.repeat(np.arange(n_rows), np.diff(matrix.indptr))
    values = matrix.data[outside]
    values = values**2 if metric is Metric.L2 else np.abs(values)
    return inner + np.bincount(row_of_entry[outside], weights=values, minlength=n_rows)


def rank(metric: Metric, ids: np.ndarray | Sequence[int], scores: np.ndarray, k: int) -> SearchResult:
    """Order candidates per metric direction, ties by ascending id, and keep the first k."""
    ids = np.asarray(ids, dtype=np.int64)
    scores = np.asarray(scores, dtype=np.float64)
    key = scores if metric.ascending else -scores
    order = np.lexsort((ids, key))[:k]
    return SearchResult(ids=tuple(ids[order].tolist()), scores=tuple(scores[order].tolist()))


def recall_at_k(
    approximate: Sequence[SearchResult],
    exact: Sequence[SearchResult],
    k: int,
) -> float:
    """Mean fraction of each exact top-k recovered by the approximate top-k."""
    if len(approximate) != len(exact):
        raise ValueError("result lists must be aligned query by query")
    if not exact:
        return 0.0
    total = 0.0
    for found, truth in zip(approximate, exact, strict=True):
        wanted = set(truth.ids[:k])
        if wanted:
            total += len(wanted & set(found.ids[:k])) / len(wanted)
    return total / len(exact)
