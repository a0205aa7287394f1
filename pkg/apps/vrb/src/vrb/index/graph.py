"""Proximity-graph primitives shared by HNSW and NSG.

Graphs are stored as an (n, cap) int32 adjacency array padded with -1 plus a
per-node edge count. Internally every metric is a distance (smaller is
closer): IP scores are negated.
"""

import heapq

import numpy as np

from ..models.bench import Metric
from .metrics import pairwise_scores


def internal_distances(metric: Metric, data: np.ndarray, query: np.ndarray, ids: np.ndarray) -> np.ndarray:
    scores = pairwise_scores(metric, data[ids], query)
    return scores if metric.ascending else -scores


class Adjacency:
    """Bounded out-degree edge lists."""

    def __init__(self, n: int, cap: int) -> None:
        self.links = np.full((n, cap), -1, dtype=np.int32)
        self.counts = np.zeros(n, dtype=np.int32)

    @classmethod
    def from_arrays(cls, links: np.ndarray, counts: np.ndarray) -> "Adjacency":
        graph = cls.__new__(cls)
        graph.links = links
        graph.counts = counts
        return graph

    @property
    def cap(self) -> int:
        return self.links.shape[1]

    def neighbors(self, node: int) -> np.ndarray:
        return self.links[node, : self.counts[node]]

    def set_neighbors(self, node: int, neighbors: list[int]) -> None:
        count = len(neighbors)
        self.links[node, :count] = neighbors
        self.links[node, count:] = -1
        self.counts[node] = count

    def degree_max(self) -> int:
        return int(self.counts.max()) if self.counts.size else 0


def beam_search(
    graph: Adjacency,
    metric: Metric,
    data: np.ndarray,
    query: np.ndarray,
    entries: list[int],
    ef: int,
) -> list[tuple[float, int]]:
    """Best-first search keeping the ``ef`` closest nodes seen.

    Returns:
        (distance, id) pairs sorted ascending, ties by id.
    """
    visited = np.zeros(graph.links.shape[0], dtype=bool)
    start = np.asarray(sorted(set(entries)), dtype=np.int64)
    visited[start] = True
    start_dists = internal_distances(metric, data, query, start).tolist()

    candidates = list(zip(start_dists, start.tolist(), strict=True))
    heapq.heapify(candidates)
    nearest = [(-d, i) for d, i in candidates]
    heapq.heapify(nearest)
    while len(nearest) > ef:
        heapq.heappop(nearest)

    while candidates:
        dist, node = heapq.heappop(candidates)
        if dist > -nearest[0][0] and len(nearest) >= ef:
            break
        fresh = graph.neighbors(node)
        fresh = fresh[~visited[fresh]]
        if not fresh.size:
            continue
        visited[fresh] = True
        worst = -nearest[0][0]
        for d, other in zip(
            internal_distances(metric, data, query, fresh).tolist(), fresh.tolist(), strict=True
        ):
            if len(nearest) < ef or d < worst:
                heapq.heappush(candidates, (d, other))
                heapq.heappush(nearest, (-d, other))
                if len(nearest) > ef:
                    heapq.heappop(nearest)
                worst = -nearest[0][0]

    return sorted((-d, i) for d, i in nearest)


def select_neighbors(
    metric: Metric,
    data: np.ndarray,
    candidates: list[tuple[float, int]],
    m: int,
    keep_pruned: bool = False,
) -> list[int]:
    """Keep up to ``m`` candidates not dominated by an already kept one.

    ``candidates`` are (distance to base, id) sorted ascending. A candidate
    is dropped when some kept neighbor is strictly closer to it than the
    base is. With the relative-neighborhood rule this is the HNSW heuristic
    and the MRNG pruning of NSG. ``keep_pruned`` refills free slots with the
    dropped candidates, closest first.
    """
    kept: list[int] = []
    pruned: list[int] = []
    for dist, node in candidates:
        if len(kept) >= m:
            break
        if kept:
            to_kept = internal_distances(metric, data, data[node], np.asarray(kept))
            if float(to_kept.min()) < dist:
                pruned.append(node)
                continue
        kept.append(node)
    if keep_pruned:
        kept += pruned[: m - len(kept)]
    return kept
