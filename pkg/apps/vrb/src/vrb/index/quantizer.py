"""8-bit scalar quantization and the SQ index.

Each dimension j is mapped onto 256 levels between its training min and max:
``q = round(255 * (x - min_j) / (max_j - min_j))``. A constant dimension
encodes to 0 and decodes to its single value. The reconstruction error per
dimension is at most (max_j - min_j) / 510.
"""

from dataclasses import dataclass

import numpy as np

from ..models.bench import IndexFamily, IndexSpec
from .base import VectorIndex, register
from .metrics import SearchResult, pairwise_scores, rank

LEVELS = 255


@dataclass(frozen=True)
class ScalarQuantizer:
    """Per-dimension min and max learned from the indexed vectors."""

    vmin: np.ndarray
    vmax: np.ndarray

    @classmethod
    def train(cls, data: np.ndarray) -> "ScalarQuantizer":
        return cls(vmin=data.min(axis=0), vmax=data.max(axis=0))

    @property
    def span(self) -> np.ndarray:
        return self.vmax - self.vmin

    def encode(self, data: np.ndarray) -> np.ndarray:
        span = self.span
        safe = np.where(span > 0, span, 1.0)
        scaled = np.where(span > 0, LEVELS * (data - self.vmin) / safe, 0.0)
        return np.rint(np.clip(scaled, 0, LEVELS)).astype(np.uint8)

    def decode(self, codes: np.ndarray) -> np.ndarray:
        return self.vmin + codes.astype(np.float64) * (self.span / LEVELS)


@register
class SQIndex(VectorIndex):
    """Stores only the codes; search scores the decoded vectors."""

    family = IndexFamily.SQ

    def __init__(self, spec: IndexSpec, quantizer: ScalarQuantizer, codes: np.ndarray) -> None:
        super().__init__(spec, codes.shape[1], codes.shape[0])
        self.quantizer = quantizer
        self.codes = codes

    @classmethod
    def build(cls, spec: IndexSpec, data: np.ndarray) -> "SQIndex":
        quantizer = ScalarQuantizer.train(data)
        return cls(spec, quantizer, quantizer.encode(data))

    def _search(self, query: np.ndarray, k: int) -> SearchResult:
        scores = pairwise_scores(self.spec.metric, self.quantizer.decode(self.codes), query)
        return rank(self.spec.metric, np.arange(self.ntotal), scores, k)

    def arrays(self) -> dict[str, np.ndarray]:
        return {"codes": self.codes, "vmin": self.quantizer.vmin, "vmax": self.quantizer.vmax}

    @classmethod
    def from_arrays(
        cls, spec: IndexSpec, dim: int, ntotal: int, is_sparse: bool, arrays: dict[str, np.ndarray]
    ) -> "SQIndex":
        quantizer = ScalarQuantizer(vmin=arrays["vmin"], vmax=arrays["vmax"])
        return cls(spec, quantizer, arrays["codes"])
