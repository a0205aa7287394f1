"""Common index interface, input coercion and the family registry."""

from abc import ABC, abstractmethod
from collections.abc import Sequence
from typing import ClassVar

import numpy as np
from scipy import sparse

from ..core.errors import BadParams, DimensionMismatch, EmptyInput
from ..core.logging import get_logger
from ..models.bench import IndexFamily, IndexSpec
from ..vectorize.tfidf import SparseVector
from .metrics import SearchResult

logger = get_logger(__name__)

Matrix = np.ndarray | sparse.csr_matrix
VectorInput = np.ndarray | sparse.spmatrix | Sequence[SparseVector]
QueryInput = np.ndarray | sparse.spmatrix | SparseVector


class VectorIndex(ABC):
    """A built, immutable index over ``ntotal`` vectors of dimension ``dim``.

    Subclasses implement ``build``, ``_search`` and the ``arrays`` /
    ``from_arrays`` pair used by persistence. Families with ``native_sparse``
    keep CSR input as is; all others receive a dense matrix.
    """

    family: ClassVar[IndexFamily]
    native_sparse: ClassVar[bool] = False

    def __init__(self, spec: IndexSpec, dim: int, ntotal: int, is_sparse: bool = False) -> None:
        self.spec = spec
        self.dim = dim
        self.ntotal = ntotal
        self.is_sparse = is_sparse

    @classmethod
    @abstractmethod
    def build(cls, spec: IndexSpec, data: Matrix) -> "VectorIndex":
        """Build from a resolved spec and a coerced data matrix."""

    @abstractmethod
    def _search(self, query: np.ndarray | sparse.csr_matrix, k: int) -> SearchResult: ...

    @abstractmethod
    def arrays(self) -> dict[str, np.ndarray]:
        """Searchable state as named arrays."""

    @classmethod
    @abstractmethod
    def from_arrays(
        cls, spec: IndexSpec, dim: int, ntotal: int, is_sparse: bool, arrays: dict[str, np.ndarray]
    ) -> "VectorIndex":
        """Rebuild an index from ``arrays()`` output."""

    def search(self, query: QueryInput, k: int) -> SearchResult:
        """Top-k doc ids and scores for ``query``.

        Raises:
            DimensionMismatch: If the query dimension differs from the index
            BadParams: If k < 1
        """
        if k < 1:
            raise BadParams(f"k must be >= 1, got {k}")
        return self._search(self._coerce_query(query), k)

    def _coerce_query(self, query: QueryInput) -> np.ndarray | sparse.csr_matrix:
        if isinstance(query, SparseVector):
            if query.dim != self.dim:
                raise DimensionMismatch(self.dim, query.dim)
            return query.to_csr() if self.is_sparse else query.to_dense()
        if sparse.issparse(query):
            row = sparse.csr_matrix(query, dtype=np.float64)
            if row.shape != (1, self.dim):
                raise DimensionMismatch(self.dim, row.shape[1], row="query")
            return row if self.is_sparse else row.toarray().ravel()
        dense = np.asarray(query, dtype=np.float64).ravel()
        if dense.size != self.dim:
            raise DimensionMismatch(self.dim, dense.size)
        return sparse.csr_matrix(dense.reshape(1, -1)) if self.is_sparse else dense

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.spec.label} n={self.ntotal} d={self.dim}>"


_REGISTRY: dict[IndexFamily, type[VectorIndex]] = {}


def register(cls: type[VectorIndex]) -> type[VectorIndex]:
    """Class decorator adding a family implementation to the registry."""
    _REGISTRY[cls.family] = cls
    return cls


def index_class(family: IndexFamily) -> type[VectorIndex]:
    try:
        return _REGISTRY[family]
    except KeyError as e:
        raise BadParams(f"unknown index family {family}") from e


def as_matrix(vectors: VectorInput) -> Matrix:
    """Coerce doc vectors to a float64 dense array or a canonical CSR matrix.

    Raises:
        EmptyInput: If there are no vectors
        DimensionMismatch: If sparse vectors disagree on dimension
    """
    if isinstance(vectors, np.ndarray):
        matrix = np.ascontiguousarray(vectors, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] == 0:
            raise EmptyInput("expected a non-empty (n, d) matrix")
        return matrix
    if sparse.issparse(vectors):
        csr = sparse.csr_matrix(vectors, dtype=np.float64, copy=True)
        if csr.shape[0] == 0:
            raise EmptyInput("expected at least one vector")
        csr.sum_duplicates()
        csr.sort_indices()
        return csr

    rows = list(vectors)
    if not rows:
        raise EmptyInput("expected at least one vector")
    dim = rows[0].dim
    for i, row in enumerate(rows):
        if row.dim != dim:
            raise DimensionMismatch(dim, row.dim, row=i)
    indptr = np.zeros(len(rows) + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([row.nnz for row in rows])
    return sparse.csr_matrix(
        (
            np.concatenate([row.weights for row in rows]),
            np.concatenate([row.indices for row in rows]),
            indptr,
        ),
        shape=(len(rows), dim),
    )


def build_index(spec: IndexSpec, vectors: VectorInput) -> VectorIndex:
    """Build a searchable index of ``spec.family`` over the doc vectors.

    Graph and quantization families densify sparse input; Flat and IVFFlat
    search CSR rows natively.

    Raises:
        EmptyInput: If there are no vectors
        BadParams: If the spec's parameters are out of range for this N
    """
    matrix = as_matrix(vectors)
    n, dim = matrix.shape
    resolved = spec.resolved(n)
    cls = index_class(resolved.family)
    if sparse.issparse(matrix) and not cls.native_sparse:
        matrix = matrix.toarray()
    index = cls.build(resolved, matrix)
    logger.info(
        "index_built",
        index=resolved.label,
        n=n,
        dim=dim,
        sparse=index.is_sparse,
        seed=resolved.seed,
    )
    return index


def search(index: VectorIndex, query: QueryInput, k: int) -> SearchResult:
    """Functional alias of ``VectorIndex.search``."""
    return index.search(query, k)


def pack_matrix(prefix: str, matrix: Matrix) -> dict[str, np.ndarray]:
    """Split a dense or CSR matrix into named arrays."""
    if sparse.issparse(matrix):
        return {
            f"{prefix}_data": matrix.data,
            f"{prefix}_indices": matrix.indices,
            f"{prefix}_indptr": matrix.indptr,
        }
    return {prefix: matrix}


def unpack_matrix(prefix: str, arrays: dict[str, np.ndarray], shape: tuple[int, int]) -> Matrix:
    if prefix in arrays:
        return np.asarray(arrays[prefix], dtype=np.float64)
    return sparse.csr_matrix(
        (arrays[f"{prefix}_data"], arrays[f"{prefix}_indices"], arrays[f"{prefix}_indptr"]),
        shape=shape,
    )
