"""Random-hyperplane LSH.

Each vector becomes ``n_bits`` sign bits against seeded Gaussian hyperplanes
through the origin, packed into bytes. Candidates are ranked by Hamming
distance to the query code (ties by id), with no re-ranking on raw vectors.
Scores are the Hamming distance for L2/L1 and ``n_bits - hamming`` for IP.
"""

import numpy as np

from ..models.bench import IndexFamily, IndexSpec
from .base import VectorIndex, register
from .metrics import SearchResult, rank

_POPCOUNT = np.array([bin(i).count("1") for i in range(256)], dtype=np.int64)


def sign_codes(planes: np.ndarray, data: np.ndarray) -> np.ndarray:
    """Packed sign bits of ``data @ planes``; a zero projection counts as negative."""
    bits = np.atleast_2d(data) @ planes > 0
    return np.packbits(bits, axis=1)


def hamming(codes: np.ndarray, code: np.ndarray) -> np.ndarray:
    """Hamming distance of each packed row of ``codes`` to ``code`` (broadcast)."""
    return _POPCOUNT[np.bitwise_xor(codes, code)].sum(axis=-1)


@register
class LSHIndex(VectorIndex):
    family = IndexFamily.LSH

    def __init__(self, spec: IndexSpec, planes: np.ndarray, codes: np.ndarray) -> None:
        super().__init__(spec, planes.shape[0], codes.shape[0])
        self.planes = planes
        self.codes = codes

    @property
    def n_bits(self) -> int:
        return self.planes.shape[1]

    @classmethod
    def build(cls, spec: IndexSpec, data: np.ndarray) -> "LSHIndex":
        rng = np.random.default_rng(spec.seed)
        planes = rng.standard_normal((data.shape[1], spec.params.n_bits))
        return cls(spec, planes, sign_codes(planes, data))

    def encode(self, data: np.ndarray) -> np.ndarray:
        return sign_codes(self.planes, data)

    def _search(self, query: np.ndarray, k: int) -> SearchResult:
        distances = hamming(self.codes, self.encode(query)[0])
        scores = distances if self.spec.metric.ascending else self.n_bits - distances
        return rank(self.spec.metric, np.arange(self.ntotal), scores.astype(np.float64), k)

    def arrays(self) -> dict[str, np.ndarray]:
        return {"planes": self.planes, "codes": self.codes}

    @classmethod
    def from_arrays(
        cls, spec: IndexSpec, dim: int, ntotal: int, is_sparse: bool, arrays: dict[str, np.ndarray]
    ) -> "LSHIndex":
        return cls(spec, arrays["planes"], arrays["codes"])
