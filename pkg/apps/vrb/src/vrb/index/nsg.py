"""Navigating spreading-out graph.

Build: an exact knn_k-NN graph, a medoid entry point (the node closest to
the mean vector), then per node a candidate pool from a beam search over the
kNN graph plus its own kNN list, pruned MRNG-style to ``out_degree``.
Reverse edges are added with re-pruning on overflow, and nodes unreachable
from the medoid are attached to their closest reachable node that still has
room. Search is a beam search of width ``ef_search`` from the medoid.
"""

from collections import deque

import numpy as np

from ..core.logging import get_logger
from ..models.bench import IndexFamily, IndexSpec, Metric
from .base import VectorIndex, register
from .graph import Adjacency, beam_search, internal_distances, select_neighbors
from .metrics import SearchResult, pairwise_scores, rank

logger = get_logger(__name__)


def knn_graph(metric: Metric, data: np.ndarray, k: int) -> Adjacency:
    """Exact k nearest neighbors of every node, self excluded, ties by id."""
    n = data.shape[0]
    k = min(k, n - 1)
    graph = Adjacency(n, max(k, 1))
    ids = np.arange(n)
    for node in range(n):
        dists = internal_distances(metric, data, data[node], ids)
        dists[node] = np.inf
        order = np.lexsort((ids, dists))[:k]
        graph.set_neighbors(node, order.tolist())
    return graph


def medoid(metric: Metric, data: np.ndarray) -> int:
    dists = internal_distances(metric, data, data.mean(axis=0), np.arange(data.shape[0]))
    return int(np.lexsort((np.arange(data.shape[0]), dists))[0])


def _reachable(graph: Adjacency, start: int) -> np.ndarray:
    seen = np.zeros(graph.links.shape[0], dtype=bool)
    seen[start] = True
    queue = deque([start])
    while queue:
        node = queue.popleft()
        for other in graph.neighbors(node).tolist():
            if not seen[other]:
                seen[other] = True
                queue.append(other)
    return seen


def build_nsg(spec: IndexSpec, data: np.ndarray) -> tuple[Adjacency, int]:
    p = spec.params
    metric = spec.metric
    n = data.shape[0]
    knn = knn_graph(metric, data, p.knn_k)
    entry = medoid(metric, data)
    graph = Adjacency(n, p.out_degree)

    for node in range(n):
        found = beam_search(knn, metric, data, data[node], [entry], p.ef_construction)
        pool_ids = {i for _, i in found} | set(knn.neighbors(node).tolist())
        pool_ids.discard(node)
        if not pool_ids:
            continue
        pool = np.asarray(sorted(pool_ids), dtype=np.int64)
        dists = internal_distances(metric, data, data[node], pool)
        ordered = sorted(zip(dists.tolist(), pool.tolist(), strict=True))
        graph.set_neighbors(node, select_neighbors(metric, data, ordered, p.out_degree))

    forward = [graph.neighbors(node).tolist() for node in range(n)]
    for node, targets in enumerate(forward):
        for other in targets:
            _add_edge(graph, metric, data, other, node)

    _connect(graph, metric, data, entry)
    return graph, entry


def _add_edge(graph: Adjacency, metric: Metric, data: np.ndarray, source: int, target: int) -> None:
    current = graph.neighbors(source)
    if target in current:
        return
    if current.size < graph.cap:
        graph.set_neighbors(source, [*current.tolist(), target])
        return
    pool = np.append(current, target)
    dists = internal_distances(metric, data, data[source], pool)
    ordered = sorted(zip(dists.tolist(), pool.tolist(), strict=True))
    graph.set_neighbors(source, select_neighbors(metric, data, ordered, graph.cap))


def _connect(graph: Adjacency, metric: Metric, data: np.ndarray, entry: int) -> None:
    """Attach every node unreachable from ``entry`` to its closest reachable node with room."""
    reached = _reachable(graph, entry)
    attached = 0
    while not reached.all():
        orphan = int(np.flatnonzero(~reached)[0])
        hosts = np.flatnonzero(reached & (graph.counts < graph.cap))
        if not hosts.size:
            hosts = np.flatnonzero(reached)
        dists = internal_distances(metric, data, data[orphan], hosts)
        host = int(hosts[np.lexsort((hosts, dists))[0]])
        current = graph.neighbors(host).tolist()
        if len(current) >= graph.cap:
            current = current[:-1]
        graph.set_neighbors(host, [*current, orphan])
        attached += 1
        reached = _reachable(graph, entry)
    if attached:
        logger.debug("nsg_nodes_attached", count=attached)


@register
class NSGIndex(VectorIndex):
    family = IndexFamily.NSG

    def __init__(self, spec: IndexSpec, data: np.ndarray, graph: Adjacency, entry: int) -> None:
        super().__init__(spec, data.shape[1], data.shape[0])
        self.data = data
        self.graph = graph
        self.entry = entry

    @classmethod
    def build(cls, spec: IndexSpec, data: np.ndarray) -> "NSGIndex":
        graph, entry = build_nsg(spec, data)
        return cls(spec, data, graph, entry)

    def _search(self, query: np.ndarray, k: int) -> SearchResult:
        ef = max(self.spec.params.ef_search, k)
        found = beam_search(self.graph, self.spec.metric, self.data, query, [self.entry], ef)
        ids = np.asarray([i for _, i in found], dtype=np.int64)
        scores = pairwise_scores(self.spec.metric, self.data[ids], query)
        return rank(self.spec.metric, ids, scores, k)

    def arrays(self) -> dict[str, np.ndarray]:
        return {
            "data": self.data,
            "links": self.graph.links,
            "counts": self.graph.counts,
            "entry": np.array([self.entry], dtype=np.int64),
        }

    @classmethod
    def from_arrays(
        cls, spec: IndexSpec, dim: int, ntotal: int, is_sparse: bool, arrays: dict[str, np.ndarray]
    ) -> "NSGIndex":
        return cls(
            spec,
            np.asarray(arrays["data"], dtype=np.float64),
            Adjacency.from_arrays(arrays["links"], arrays["counts"]),
            int(arrays["entry"][0]),
        )
