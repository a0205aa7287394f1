"""Hierarchical navigable small-world graphs (HNSW and HNSWSQ).

Node levels are drawn as ``floor(-ln(U) / ln(M))`` from the spec seed. Each
new node descends greedily through the layers above its level, then at each
of its layers collects ``ef_construction`` candidates, keeps up to M of them
with the neighbor-selection heuristic, fills any free slots with the
pruned candidates closest first, and links back. A node holds at most 2*M
edges on layer 0 and M above; overflowing lists are re-pruned the same way. HNSWSQ builds and searches the same graph over
8-bit-quantized vectors.
"""

import math

import numpy as np

from ..models.bench import IndexFamily, IndexSpec, Metric
from .base import VectorIndex, register
from .graph import Adjacency, beam_search, internal_distances, select_neighbors
from .metrics import SearchResult, pairwise_scores, rank
from .quantizer import ScalarQuantizer


def sample_levels(n: int, m: int, rng: np.random.Generator) -> np.ndarray:
    uniform = 1.0 - rng.random(n)  # (0, 1]
    return np.floor(-np.log(uniform) / math.log(m)).astype(np.int64)


def _link_back(graph: Adjacency, metric: Metric, data: np.ndarray, node: int, new: int) -> None:
    current = graph.neighbors(node)
    if current.size < graph.cap:
        graph.set_neighbors(node, [*current.tolist(), new])
        return
    pool = np.append(current, new)
    dists = internal_distances(metric, data, data[node], pool)
    ordered = sorted(zip(dists.tolist(), pool.tolist(), strict=True))
    kept = select_neighbors(metric, data, ordered, graph.cap, keep_pruned=True)
    graph.set_neighbors(node, kept)


class HNSWGraph:
    """Layered adjacency, node levels and the entry point."""

    def __init__(self, layers: list[Adjacency], levels: np.ndarray, entry_point: int) -> None:
        self.layers = layers
        self.levels = levels
        self.entry_point = entry_point

    @property
    def max_level(self) -> int:
        return len(self.layers) - 1

    @classmethod
    def build(cls, spec: IndexSpec, data: np.ndarray) -> "HNSWGraph":
        p = spec.params
        metric = spec.metric
        n = data.shape[0]
        levels = sample_levels(n, p.M, np.random.default_rng(spec.seed))
        layers = [
            Adjacency(n, 2 * p.M if level == 0 else p.M) for level in range(int(levels.max()) + 1)
        ]

        entry_point = 0
        top = int(levels[0])
        for node in range(1, n):
            query = data[node]
            node_level = int(levels[node])
            entries = [entry_point]
            for level in range(top, node_level, -1):
                entries = [beam_search(layers[level], metric, data, query, entries, 1)[0][1]]

            for level in range(min(node_level, top), -1, -1):
                found = beam_search(layers[level], metric, data, query, entries, p.ef_construction)
                chosen = select_neighbors(metric, data, found, p.M, keep_pruned=True)
                layers[level].set_neighbors(node, chosen)
                for other in chosen:
                    _link_back(layers[level], metric, data, other, node)
                entries = [i for _, i in found]

            if node_level > top:
                entry_point = node
                top = node_level

        return cls(layers, levels, entry_point)

    def candidates(self, metric: Metric, data: np.ndarray, query: np.ndarray, ef: int) -> np.ndarray:
        """Ids of the ``ef`` closest nodes reached on layer 0."""
        entries = [self.entry_point]
        for level in range(self.max_level, 0, -1):
            entries = [beam_search(self.layers[level], metric, data, query, entries, 1)[0][1]]
        found = beam_search(self.layers[0], metric, data, query, entries, ef)
        return np.asarray([i for _, i in found], dtype=np.int64)

    def arrays(self) -> dict[str, np.ndarray]:
        out: dict[str, np.ndarray] = {
            "levels": self.levels,
            "entry_point": np.array([self.entry_point], dtype=np.int64),
        }
        for level, layer in enumerate(self.layers):
            out[f"links_{level}"] = layer.links
            out[f"counts_{level}"] = layer.counts
        return out

    @classmethod
    def from_arrays(cls, arrays: dict[str, np.ndarray]) -> "HNSWGraph":
        layers = []
        level = 0
        while f"links_{level}" in arrays:
            layers.append(Adjacency.from_arrays(arrays[f"links_{level}"], arrays[f"counts_{level}"]))
            level += 1
        return cls(layers, arrays["levels"], int(arrays["entry_point"][0]))


@register
class HNSWIndex(VectorIndex):
    family = IndexFamily.HNSW

    def __init__(self, spec: IndexSpec, data: np.ndarray, graph: HNSWGraph) -> None:
        super().__init__(spec, data.shape[1], data.shape[0])
        self.data = data
        self.graph = graph

    @classmethod
    def build(cls, spec: IndexSpec, data: np.ndarray) -> "HNSWIndex":
        return cls(spec, data, HNSWGraph.build(spec, data))

    def _search(self, query: np.ndarray, k: int) -> SearchResult:
        ef = max(self.spec.params.ef_search, k)
        ids = self.graph.candidates(self.spec.metric, self.data, query, ef)
        scores = pairwise_scores(self.spec.metric, self.data[ids], query)
        return rank(self.spec.metric, ids, scores, k)

    def arrays(self) -> dict[str, np.ndarray]:
        return {"data": self.data, **self.graph.arrays()}

    @classmethod
    def from_arrays(
        cls, spec: IndexSpec, dim: int, ntotal: int, is_sparse: bool, arrays: dict[str, np.ndarray]
    ) -> "HNSWIndex":
        return cls(spec, np.asarray(arrays["data"], dtype=np.float64), HNSWGraph.from_arrays(arrays))


@register
class HNSWSQIndex(HNSWIndex):
    """HNSW over decoded 8-bit codes; only the codes are persisted."""

    family = IndexFamily.HNSWSQ

    def __init__(
        self, spec: IndexSpec, quantizer: ScalarQuantizer, codes: np.ndarray, graph: HNSWGraph
    ) -> None:
        super().__init__(spec, quantizer.decode(codes), graph)
        self.quantizer = quantizer
        self.codes = codes

    @classmethod
    def build(cls, spec: IndexSpec, data: np.ndarray) -> "HNSWSQIndex":
        quantizer = ScalarQuantizer.train(data)
        codes = quantizer.encode(data)
        return cls(spec, quantizer, codes, HNSWGraph.build(spec, quantizer.decode(codes)))

    def arrays(self) -> dict[str, np.ndarray]:
        return {
            "codes": self.codes,
            "vmin": self.quantizer.vmin,
            "vmax": self.quantizer.vmax,
            **self.graph.arrays(),
        }

    @classmethod
    def from_arrays(
        cls, spec: IndexSpec, dim: int, ntotal: int, is_sparse: bool, arrays: dict[str, np.ndarray]
    ) -> "HNSWSQIndex":
        quantizer = ScalarQuantizer(vmin=arrays["vmin"], vmax=arrays["vmax"])
        return cls(spec, quantizer, arrays["codes"], HNSWGraph.from_arrays(arrays))
