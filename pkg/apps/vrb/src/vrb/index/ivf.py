"""Inverted-file indexes: IVFFlat and IVFSQ.

A seeded k-means partitions the vectors into ``nlist`` inverted lists. The
coarse quantizer always uses squared L2; the spec's metric applies only when
candidates from the ``nprobe`` nearest lists are scored. IVFSQ keeps 8-bit
codes of the raw vectors (no residuals) in the lists.
"""

import numpy as np
from scipy import sparse

from ..core.logging import get_logger
from ..models.bench import IndexFamily, IndexSpec
from .base import Matrix, VectorIndex, pack_matrix, register, unpack_matrix
from .metrics import SearchResult, pairwise_scores, rank
from .quantizer import ScalarQuantizer

logger = get_logger(__name__)


def _row_norms(data: Matrix) -> np.ndarray:
    if sparse.issparse(data):
        return np.asarray(data.multiply(data).sum(axis=1)).ravel()
    return (data**2).sum(axis=1)


def centroid_distances(data: Matrix, centroids: np.ndarray) -> np.ndarray:
    """(n, nlist) squared L2 distances, clipped at zero."""
    cross = np.asarray(data @ centroids.T)
    dists = _row_norms(data)[:, None] - 2.0 * cross + (centroids**2).sum(axis=1)[None, :]
    return np.maximum(dists, 0.0)


def _mean_rows(data: Matrix, members: np.ndarray) -> np.ndarray:
    if sparse.issparse(data):
        return np.asarray(data[members].mean(axis=0)).ravel()
    return data[members].mean(axis=0)


def _dense_rows(data: Matrix, rows: np.ndarray) -> np.ndarray:
    picked = data[rows]
    return picked.toarray() if sparse.issparse(picked) else np.array(picked, dtype=np.float64)


def kmeans(
    data: Matrix, nlist: int, iters: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Lloyd's algorithm from ``nlist`` distinct random points.

    An emptied cluster is reseeded with the point farthest from its own
    centroid; successive reseeds in one round pick successively farther-ranked
    points.

    Returns:
        (centroids, assignment) with centroids dense (nlist, d).
    """
    n = data.shape[0]
    centroids = _dense_rows(data, np.sort(rng.choice(n, size=nlist, replace=False)))
    assignment = np.zeros(n, dtype=np.int64)

    for iteration in range(iters + 1):
        dists = centroid_distances(data, centroids)
        new_assignment = dists.argmin(axis=1)
        if iteration == iters or (iteration > 0 and np.array_equal(new_assignment, assignment)):
            assignment = new_assignment
            break
        assignment = new_assignment

        sizes = np.bincount(assignment, minlength=nlist)
        own = dists[np.arange(n), assignment].copy()
        for cluster in range(nlist):
            if sizes[cluster]:
                centroids[cluster] = _mean_rows(data, np.flatnonzero(assignment == cluster))
                continue
            far = int(np.lexsort((np.arange(n), -own))[0])
            centroids[cluster] = _dense_rows(data, np.array([far]))[0]
            own[far] = -1.0
            logger.debug("kmeans_cluster_reseeded", cluster=cluster, point=far, iteration=iteration)

    return centroids, assignment


class _InvertedFile(VectorIndex):
    """Shared coarse quantizer, list layout and probing."""

    def __init__(
        self,
        spec: IndexSpec,
        dim: int,
        ntotal: int,
        is_sparse: bool,
        centroids: np.ndarray,
        list_ids: np.ndarray,
        list_offsets: np.ndarray,
    ) -> None:
        super().__init__(spec, dim, ntotal, is_sparse=is_sparse)
        self.centroids = centroids
        self.list_ids = list_ids
        self.list_offsets = list_offsets

    @property
    def nlist(self) -> int:
        return self.centroids.shape[0]

    @staticmethod
    def _partition(spec: IndexSpec, data: Matrix) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        rng = np.random.default_rng(spec.seed)
        nlist = spec.params.nlist or 1
        centroids, assignment = kmeans(data, nlist, spec.params.kmeans_iters, rng)
        list_ids = np.argsort(assignment, kind="stable").astype(np.int64)
        list_offsets = np.zeros(nlist + 1, dtype=np.int64)
        list_offsets[1:] = np.cumsum(np.bincount(assignment, minlength=nlist))
        return centroids, list_ids, list_offsets

    def list_sizes(self) -> np.ndarray:
        return np.diff(self.list_offsets)

    def probe(self, query: np.ndarray | sparse.csr_matrix) -> np.ndarray:
        """Ids in the ``nprobe`` lists nearest to the query, ascending."""
        if not sparse.issparse(query):
            query = np.asarray(query, dtype=np.float64).reshape(1, -1)
        dists = centroid_distances(query, self.centroids)[0]
        nprobe = self.spec.params.nprobe or 1
        nearest = np.lexsort((np.arange(self.nlist), dists))[:nprobe]
        parts = [self.list_ids[self.list_offsets[c] : self.list_offsets[c + 1]] for c in nearest]
        return np.sort(np.concatenate(parts))

    def _layout(self) -> dict[str, np.ndarray]:
        return {
            "centroids": self.centroids,
            "list_ids": self.list_ids,
            "list_offsets": self.list_offsets,
        }


@register
class IVFFlatIndex(_InvertedFile):
    family = IndexFamily.IVFFLAT
    native_sparse = True

    def __init__(
        self,
        spec: IndexSpec,
        data: Matrix,
        centroids: np.ndarray,
        list_ids: np.ndarray,
        list_offsets: np.ndarray,
    ) -> None:
        super().__init__(
            spec,
            data.shape[1],
            data.shape[0],
            sparse.issparse(data),
            centroids,
            list_ids,
            list_offsets,
        )
        self.data = data

    @classmethod
    def build(cls, spec: IndexSpec, data: Matrix) -> "IVFFlatIndex":
        return cls(spec, data, *cls._partition(spec, data))

    def _search(self, query: np.ndarray | sparse.csr_matrix, k: int) -> SearchResult:
        candidates = self.probe(query)
        scores = pairwise_scores(self.spec.metric, self.data[candidates], query)
        return rank(self.spec.metric, candidates, scores, k)

    def arrays(self) -> dict[str, np.ndarray]:
        return {**self._layout(), **pack_matrix("data", self.data)}

    @classmethod
    def from_arrays(
        cls, spec: IndexSpec, dim: int, ntotal: int, is_sparse: bool, arrays: dict[str, np.ndarray]
    ) -> "IVFFlatIndex":
        return cls(
            spec,
            unpack_matrix("data", arrays, (ntotal, dim)),
            arrays["centroids"],
            arrays["list_ids"],
            arrays["list_offsets"],
        )


@register
class IVFSQIndex(_InvertedFile):
    family = IndexFamily.IVFSQ

    def __init__(
        self,
        spec: IndexSpec,
        quantizer: ScalarQuantizer,
        codes: np.ndarray,
        centroids: np.ndarray,
        list_ids: np.ndarray,
        list_offsets: np.ndarray,
    ) -> None:
        super().__init__(
            spec, codes.shape[1], codes.shape[0], False, centroids, list_ids, list_offsets
        )
        self.quantizer = quantizer
        self.codes = codes

    @classmethod
    def build(cls, spec: IndexSpec, data: np.ndarray) -> "IVFSQIndex":
        quantizer = ScalarQuantizer.train(data)
        return cls(spec, quantizer, quantizer.encode(data), *cls._partition(spec, data))

    def _search(self, query: np.ndarray, k: int) -> SearchResult:
        candidates = self.probe(query)
        decoded = self.quantizer.decode(self.codes[candidates])
        scores = pairwise_scores(self.spec.metric, decoded, query)
        return rank(self.spec.metric, candidates, scores, k)

    def arrays(self) -> dict[str, np.ndarray]:
        return {
            **self._layout(),
            "codes": self.codes,
            "vmin": self.quantizer.vmin,
            "vmax": self.quantizer.vmax,
        }

    @classmethod
    def from_arrays(
        cls, spec: IndexSpec, dim: int, ntotal: int, is_sparse: bool, arrays: dict[str, np.ndarray]
    ) -> "IVFSQIndex":
        return cls(
            spec,
            ScalarQuantizer(vmin=arrays["vmin"], vmax=arrays["vmax"]),
            arrays["codes"],
            arrays["centroids"],
            arrays["list_ids"],
            arrays["list_offsets"],
        )
