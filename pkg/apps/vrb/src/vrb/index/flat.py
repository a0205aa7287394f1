"""Exhaustive scan; the exactness oracle for every other family."""

import numpy as np
from scipy import sparse

from ..models.bench import IndexFamily, IndexSpec
from .base import Matrix, VectorIndex, pack_matrix, register, unpack_matrix
from .metrics import SearchResult, pairwise_scores, rank


@register
class FlatIndex(VectorIndex):
    family = IndexFamily.FLAT
    native_sparse = True

    def __init__(self, spec: IndexSpec, data: Matrix) -> None:
        super().__init__(spec, data.shape[1], data.shape[0], is_sparse=sparse.issparse(data))
        self.data = data

    @classmethod
    def build(cls, spec: IndexSpec, data: Matrix) -> "FlatIndex":
        return cls(spec, data)

    def _search(self, query: np.ndarray | sparse.csr_matrix, k: int) -> SearchResult:
        scores = pairwise_scores(self.spec.metric, self.data, query)
        return rank(self.spec.metric, np.arange(self.ntotal), scores, k)

    def arrays(self) -> dict[str, np.ndarray]:
        return pack_matrix("data", self.data)

    @classmethod
    def from_arrays(
        cls, spec: IndexSpec, dim: int, ntotal: int, is_sparse: bool, arrays: dict[str, np.ndarray]
    ) -> "FlatIndex":
        return cls(spec, unpack_matrix("data", arrays, (ntotal, dim)))
