"""Index families over sparse or dense vectors with L2, L1 and inner-product metrics."""

from .base import VectorIndex, as_matrix, build_index, search
from .flat import FlatIndex
from .hnsw import HNSWIndex, HNSWSQIndex
from .ivf import IVFFlatIndex, IVFSQIndex, kmeans
from .lsh import LSHIndex, hamming, sign_codes
from .metrics import SearchResult, distance, pairwise_scores, rank, recall_at_k
from .nsg import NSGIndex
from .persistence import dumps_index, load_index, loads_index, save_index
from .quantizer import ScalarQuantizer, SQIndex

__all__ = [
    "VectorIndex",
    "SearchResult",
    "build_index",
    "search",
    "distance",
    "pairwise_scores",
    "rank",
    "recall_at_k",
    "as_matrix",
    "FlatIndex",
    "HNSWIndex",
    "HNSWSQIndex",
    "IVFFlatIndex",
    "IVFSQIndex",
    "SQIndex",
    "NSGIndex",
    "LSHIndex",
    "ScalarQuantizer",
    "kmeans",
    "sign_codes",
    "hamming",
    "save_index",
    "load_index",
    "dumps_index",
    "loads_index",
]
