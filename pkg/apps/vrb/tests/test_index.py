"""
Vector index tests.

Covers:
- Metrics, ranking with id tie-breaks and recall@k
- Flat against an independent brute-force scan
- IVF exactness at nprobe=nlist and recall monotone in nprobe
- HNSW, NSG, SQ and LSH quality properties
- Parameter validation and input coercion for every family
"""
import numpy as np
import pytest
from scipy import sparse, stats

from vrb.core.errors import BadParams, DimensionMismatch, EmptyInput
from vrb.index import (
    SearchResult,
    ScalarQuantizer,
    build_index,
    distance,
    hamming,
    kmeans,
    pairwise_scores,
    rank,
    recall_at_k,
)
from vrb.index.graph import internal_distances, select_neighbors
from vrb.index.nsg import _reachable
from vrb.models.bench import IndexFamily, IndexParams, IndexSpec, Metric
from vrb.models.corpus import Attraction
from vrb.textproc.tokenizer import TokenizerSpec
from vrb.vectorize.tfidf import SparseVector, fit_transform

from synthetic import brute_force, gaussian


pytestmark = pytest.mark.index


def _spec(family: IndexFamily, metric: Metric = Metric.L2, seed: int = 0, **params) -> IndexSpec:
    return IndexSpec(family=family, metric=metric, seed=seed, params=IndexParams(**params))


def _recall(index, exact, queries: np.ndarray, k: int = 3) -> float:
    return recall_at_k([index.search(q, k) for q in queries], [exact.search(q, k) for q in queries], k)


@pytest.fixture(scope="module")
def gaussian_64() -> np.ndarray:
    """2,000 random 64-d vectors."""
    return gaussian(2000, 64, seed=5)


@pytest.fixture(scope="module")
def queries_64() -> np.ndarray:
    return gaussian(200, 64, seed=6)


class TestMetrics:
    """Scores, ranking and recall."""

    def test_dense_distances(self):
        """Squared L2, L1 and the dot product."""
        a, b = np.array([0.0, 0.0]), np.array([3.0, 4.0])
        assert distance(Metric.L2, a, b) == 25.0
        assert distance(Metric.L1, a, b) == 7.0
        assert distance(Metric.IP, np.array([1.0, 2.0]), b) == 11.0

    @pytest.mark.parametrize("metric", list(Metric))
    def test_sparse_matches_dense(self, metric: Metric):
        """Sparse pairs score exactly like their dense forms."""
        a = SparseVector.from_dict(10, {1: 2.0, 4: -1.0, 7: 0.5})
        b = SparseVector.from_dict(10, {4: 3.0, 9: 1.5})
        assert distance(metric, a, b) == pytest.approx(distance(metric, a.to_dense(), b.to_dense()))

    def test_mixed_pair_rejected(self):
        with pytest.raises(TypeError):
            distance(Metric.L2, SparseVector.from_dict(3, {0: 1.0}), np.zeros(3))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            distance(Metric.L1, np.zeros(3), np.zeros(4))

    @pytest.mark.parametrize("metric", list(Metric))
    def test_sparse_matrix_scores(self, metric: Metric):
        """CSR rows score like the dense matrix against the same query."""
        matrix = sparse.random(30, 40, density=0.2, format="csr", random_state=1)
        query = sparse.random(1, 40, density=0.3, format="csr", random_state=2)
        np.testing.assert_allclose(
            pairwise_scores(metric, matrix, query),
            pairwise_scores(metric, matrix.toarray(), query.toarray().ravel()),
        )

    def test_rank_ties_by_id(self):
        """Equal scores order by ascending id in both directions."""
        ids = np.array([3, 2, 1, 0])
        scores = np.array([1.0, 0.0, 1.0, 0.0])
        assert rank(Metric.L2, ids, scores, 3).ids == (0, 2, 1)
        assert rank(Metric.IP, ids, scores, 3).ids == (1, 3, 0)

    def test_recall(self):
        approx = [SearchResult(ids=(1, 2, 3), scores=(0.0, 0.0, 0.0))]
        exact = [SearchResult(ids=(1, 2, 4), scores=(0.0, 0.0, 0.0))]
        assert recall_at_k(approx, exact, 3) == pytest.approx(2 / 3)


class TestFlat:
    """Exhaustive scan."""

    @pytest.mark.parametrize("metric", list(Metric))
    def test_matches_brute_force(self, metric: Metric, gaussian_64: np.ndarray):
        """Ids and order equal an independent scan on 1,000 queries."""
        index = build_index(_spec(IndexFamily.FLAT, metric), gaussian_64)
        for query in gaussian(1000, 64, seed=8):
            assert list(index.search(query, 3).ids) == brute_force(metric.value, gaussian_64, query, 3)

    @pytest.mark.parametrize("metric", list(Metric))
    def test_sparse_scores_match_dense(self, metric: Metric, attractions: list[Attraction]):
        """A CSR Flat index returns the same top scores as its dense copy."""
        model, docs = fit_transform(attractions, TokenizerSpec())
        sparse_index = build_index(_spec(IndexFamily.FLAT, metric), docs)
        dense_index = build_index(_spec(IndexFamily.FLAT, metric), docs.toarray())
        assert sparse_index.is_sparse and not dense_index.is_sparse

        for attraction in attractions[:10]:
            query = model.transform(attraction.description)
            np.testing.assert_allclose(
                sparse_index.search(query, 3).scores,
                dense_index.search(query.to_dense(), 3).scores,
                rtol=1e-9,
                atol=1e-12,
            )

    def test_self_is_nearest(self, gaussian_64: np.ndarray):
        index = build_index(_spec(IndexFamily.FLAT), gaussian_64)
        assert index.search(gaussian_64[17], 1).ids == (17,)

    def test_fewer_than_k(self):
        """k above the collection size returns every vector."""
        index = build_index(_spec(IndexFamily.FLAT), np.eye(4))
        assert len(index.search(np.zeros(4), 10)) == 4


class TestIVF:
    """Inverted-file families."""

    def test_kmeans_partition(self, gaussian_64: np.ndarray):
        """Every point is assigned to one of nlist non-empty clusters."""
        centroids, assignment = kmeans(gaussian_64, 16, 10, np.random.default_rng(0))
        assert centroids.shape == (16, 64)
        assert np.bincount(assignment, minlength=16).min() > 0

    def test_list_layout(self, gaussian_64: np.ndarray):
        """Inverted lists hold every id exactly once."""
        index = build_index(_spec(IndexFamily.IVFFLAT), gaussian_64)
        assert index.nlist == 45
        assert sorted(index.list_ids.tolist()) == list(range(2000))
        assert index.list_sizes().sum() == 2000

    def test_full_probe_equals_flat(self, gaussian_64: np.ndarray, queries_64: np.ndarray):
        """nprobe = nlist visits every list and reproduces Flat."""
        flat = build_index(_spec(IndexFamily.FLAT), gaussian_64)
        ivf = build_index(_spec(IndexFamily.IVFFLAT, nlist=45, nprobe=45), gaussian_64)
        for query in queries_64:
            assert set(ivf.search(query, 3).ids) == set(flat.search(query, 3).ids)

    def test_recall_monotone_in_nprobe(self, gaussian_64: np.ndarray, queries_64: np.ndarray):
        """Probing more lists never lowers recall@3."""
        flat = build_index(_spec(IndexFamily.FLAT), gaussian_64)
        recalls = [
            _recall(build_index(_spec(IndexFamily.IVFFLAT, nlist=45, nprobe=nprobe), gaussian_64), flat, queries_64)
            for nprobe in (1, 2, 4, 8, 45)
        ]
        assert recalls == sorted(recalls)
        assert recalls[-1] == 1.0

    def test_ivfsq_full_probe_recall(self, gaussian_64: np.ndarray, queries_64: np.ndarray):
        flat = build_index(_spec(IndexFamily.FLAT), gaussian_64)
        ivfsq = build_index(_spec(IndexFamily.IVFSQ, nlist=45, nprobe=45), gaussian_64)
        assert _recall(ivfsq, flat, queries_64) >= 0.9

    def test_sparse_input(self, attractions: list[Attraction]):
        """IVFFlat searches TF-IDF rows without densifying."""
        model, docs = fit_transform(attractions, TokenizerSpec())
        index = build_index(_spec(IndexFamily.IVFFLAT), docs)
        assert index.is_sparse
        assert len(index.search(model.transform(attractions[0].description), 3)) == 3

    def test_same_seed_same_lists(self, gaussian_64: np.ndarray):
        a = build_index(_spec(IndexFamily.IVFFLAT, seed=9), gaussian_64)
        b = build_index(_spec(IndexFamily.IVFFLAT, seed=9), gaussian_64)
        np.testing.assert_array_equal(a.list_ids, b.list_ids)
        np.testing.assert_array_equal(a.centroids, b.centroids)

    @pytest.mark.parametrize("params", [{"nlist": 10}, {"nlist": 2, "nprobe": 3}, {"nlist": 0}])
    def test_bad_params(self, params: dict):
        """nlist above N, nprobe above nlist and nlist < 1 are rejected."""
        with pytest.raises(BadParams):
            build_index(_spec(IndexFamily.IVFFLAT, **params), np.eye(5))


class TestHNSW:
    """Layered proximity graph."""

    @pytest.fixture(scope="class")
    def small(self) -> np.ndarray:
        return gaussian(400, 16, seed=2)

    def test_recall_small(self, small: np.ndarray):
        flat = build_index(_spec(IndexFamily.FLAT), small)
        index = build_index(_spec(IndexFamily.HNSW), small)
        assert _recall(index, flat, gaussian(50, 16, seed=3)) >= 0.95

    def test_degree_caps(self, small: np.ndarray):
        """Layer 0 holds at most 2M links per node, upper layers M."""
        index = build_index(_spec(IndexFamily.HNSW, M=4, ef_construction=32), small)
        layers = index.graph.layers
        assert layers[0].degree_max() <= 8
        assert all(layer.degree_max() <= 4 for layer in layers[1:])

    def test_deterministic(self, small: np.ndarray):
        """Same seed, same graph."""
        a = build_index(_spec(IndexFamily.HNSW, seed=4), small[:150]).graph.arrays()
        b = build_index(_spec(IndexFamily.HNSW, seed=4), small[:150]).graph.arrays()
        assert a.keys() == b.keys()
        for name in a:
            np.testing.assert_array_equal(a[name], b[name])

    def test_ef_below_k(self, small: np.ndarray):
        """ef_search is raised to k."""
        index = build_index(_spec(IndexFamily.HNSW, ef_search=1), small)
        assert len(index.search(small[0], 10)) == 10

    @pytest.mark.parametrize("metric", [Metric.L1, Metric.IP])
    def test_other_metrics(self, metric: Metric, small: np.ndarray):
        """L1 and IP graphs; IP over unit vectors."""
        data = small / np.linalg.norm(small, axis=1, keepdims=True)
        flat = build_index(_spec(IndexFamily.FLAT, metric), data)
        index = build_index(_spec(IndexFamily.HNSW, metric), data)
        assert _recall(index, flat, gaussian(30, 16, seed=4)) >= 0.9

    def test_sq_variant(self, small: np.ndarray):
        """HNSWSQ searches decoded codes with high recall."""
        flat = build_index(_spec(IndexFamily.FLAT), small)
        index = build_index(_spec(IndexFamily.HNSWSQ), small)
        assert index.codes.dtype == np.uint8
        assert _recall(index, flat, gaussian(30, 16, seed=4)) >= 0.9

    def test_keep_pruned_fills_free_slots(self):
        """Collinear candidates: the heuristic keeps one, the fill restores the rest in order."""
        data = np.array([[0.0], [1.0], [2.0], [3.0]])
        ids = np.arange(1, 4)
        ordered = sorted(
            zip(internal_distances(Metric.L2, data, data[0], ids).tolist(), ids.tolist(), strict=True)
        )
        assert select_neighbors(Metric.L2, data, ordered, 3) == [1]
        assert select_neighbors(Metric.L2, data, ordered, 3, keep_pruned=True) == [1, 2, 3]
        assert select_neighbors(Metric.L2, data, ordered, 2, keep_pruned=True) == [1, 2]

    def test_layer0_degree_floor(self):
        """In 64-d every node inserted after the first M holds at least M layer-0 links."""
        data = gaussian(300, 64, seed=8)
        index = build_index(_spec(IndexFamily.HNSW, M=4, ef_construction=32), data)
        counts = index.graph.layers[0].counts
        assert int(counts[4:].min()) >= 4
        assert int(counts.max()) <= 8

    @pytest.mark.slow
    def test_recall_acceptance(self):
        """recall@3 >= 0.95 on 5,000 128-d Gaussian vectors, 500 queries."""
        data = gaussian(5000, 128, seed=21)
        queries = gaussian(500, 128, seed=22)
        flat = build_index(_spec(IndexFamily.FLAT, seed=1), data)
        index = build_index(_spec(IndexFamily.HNSW, seed=1), data)
        assert _recall(index, flat, queries) >= 0.95

    @pytest.mark.parametrize("params", [{"M": 1}, {"ef_search": 0}])
    def test_bad_params(self, params: dict):
        with pytest.raises(BadParams):
            build_index(_spec(IndexFamily.HNSW, **params), np.eye(3))


class TestNSG:
    """Navigating spreading-out graph."""

    def test_recall_and_connectivity(self):
        """Every node is reachable from the entry and recall is high."""
        data = gaussian(500, 16, seed=12)
        index = build_index(_spec(IndexFamily.NSG), data)
        assert _reachable(index.graph, index.entry).all()
        assert index.graph.degree_max() <= 16

        flat = build_index(_spec(IndexFamily.FLAT), data)
        assert _recall(index, flat, gaussian(50, 16, seed=13)) >= 0.9

    def test_tiny_collection(self):
        """Two vectors still form a searchable graph."""
        index = build_index(_spec(IndexFamily.NSG), np.array([[0.0, 0.0], [1.0, 1.0]]))
        assert index.search(np.array([0.9, 0.9]), 2).ids == (1, 0)


class TestScalarQuantizer:
    """8-bit scalar quantization."""

    def test_reconstruction_bound(self, rng: np.random.Generator):
        """Per-dimension error is at most (max - min) / 510."""
        data = rng.uniform(-3, 5, size=(1000, 32)) * rng.uniform(0.1, 10, size=32)
        quantizer = ScalarQuantizer.train(data)
        error = np.abs(quantizer.decode(quantizer.encode(data)) - data)
        assert np.all(error <= quantizer.span / 510 + 1e-6)

    def test_constant_dimension(self):
        """A constant column encodes to 0 and decodes exactly."""
        data = np.array([[2.0, 0.0], [2.0, 1.0]])
        quantizer = ScalarQuantizer.train(data)
        codes = quantizer.encode(data)
        assert codes[:, 0].tolist() == [0, 0]
        np.testing.assert_array_equal(quantizer.decode(codes)[:, 0], [2.0, 2.0])

    def test_codes_in_range(self, rng: np.random.Generator):
        """Out-of-range queries clip to the code range."""
        quantizer = ScalarQuantizer.train(rng.standard_normal((100, 4)))
        codes = quantizer.encode(np.array([[100.0, -100.0, 0.0, 0.0]]))
        assert codes[0, 0] == 255 and codes[0, 1] == 0

    def test_sq_recall(self, gaussian_64: np.ndarray, queries_64: np.ndarray):
        flat = build_index(_spec(IndexFamily.FLAT), gaussian_64)
        index = build_index(_spec(IndexFamily.SQ), gaussian_64)
        assert _recall(index, flat, queries_64) >= 0.9

    @pytest.mark.slow
    def test_sq_recall_acceptance(self):
        """recall@3 >= 0.90 on the 5,000 x 128 fixture."""
        data = gaussian(5000, 128, seed=21)
        queries = gaussian(500, 128, seed=22)
        flat = build_index(_spec(IndexFamily.FLAT), data)
        index = build_index(_spec(IndexFamily.SQ), data)
        assert _recall(index, flat, queries) >= 0.90

    def test_only_8_bits(self):
        with pytest.raises(BadParams):
            build_index(_spec(IndexFamily.SQ, bits=4), np.eye(3))


class TestLSH:
    """Random-hyperplane sign codes."""

    def test_hamming_tracks_cosine(self):
        """Spearman(cosine, Hamming) <= -0.8 over 10,000 unit-vector pairs."""
        rng = np.random.default_rng(31)
        n, d = 10_000, 32
        a = rng.standard_normal((n, d))
        a /= np.linalg.norm(a, axis=1, keepdims=True)
        other = rng.standard_normal((n, d))
        other -= (other * a).sum(axis=1, keepdims=True) * a
        other /= np.linalg.norm(other, axis=1, keepdims=True)
        cosines = rng.uniform(-1, 1, size=n)
        b = cosines[:, None] * a + np.sqrt(1 - cosines**2)[:, None] * other

        index = build_index(_spec(IndexFamily.LSH, n_bits=64), a)
        distances = hamming(index.codes, index.encode(b))
        rho, _ = stats.spearmanr((a * b).sum(axis=1), distances)
        assert rho <= -0.8

    def test_identical_vector_first(self, gaussian_64: np.ndarray):
        index = build_index(_spec(IndexFamily.LSH), gaussian_64)
        result = index.search(gaussian_64[42], 5)
        assert result.scores[0] == 0.0
        assert 42 in [i for i, s in zip(result.ids, result.scores) if s == 0.0]

    def test_ip_scores_are_matching_bits(self, gaussian_64: np.ndarray):
        """Under IP the score is n_bits minus the Hamming distance."""
        index = build_index(_spec(IndexFamily.LSH, Metric.IP, n_bits=32), gaussian_64)
        result = index.search(gaussian_64[3], 3)
        assert result.scores[0] == 32.0
        assert list(result.scores) == sorted(result.scores, reverse=True)


class TestBuildIndex:
    """Family-independent behavior."""

    @pytest.mark.parametrize("family", list(IndexFamily))
    @pytest.mark.parametrize("metric", list(Metric))
    def test_every_family_over_tfidf(
        self, family: IndexFamily, metric: Metric, attractions: list[Attraction]
    ):
        """Each family searches TF-IDF vectors and returns valid, ranked ids."""
        model, docs = fit_transform(attractions, TokenizerSpec())
        index = build_index(_spec(family, metric), docs)
        result = index.search(model.transform(attractions[4].description), 3)

        assert len(result) == 3
        assert len(set(result.ids)) == 3
        assert all(0 <= i < len(attractions) for i in result.ids)
        ordered = sorted(result.scores, reverse=not metric.ascending)
        assert list(result.scores) == ordered

    def test_empty_input(self):
        with pytest.raises(EmptyInput):
            build_index(_spec(IndexFamily.FLAT), np.zeros((0, 4)))
        with pytest.raises(EmptyInput):
            build_index(_spec(IndexFamily.FLAT), [])

    def test_k_must_be_positive(self):
        index = build_index(_spec(IndexFamily.FLAT), np.eye(3))
        with pytest.raises(BadParams):
            index.search(np.zeros(3), 0)

    def test_query_dimension(self):
        index = build_index(_spec(IndexFamily.FLAT), np.eye(3))
        with pytest.raises(DimensionMismatch):
            index.search(np.zeros(4), 1)

    def test_sparse_query_on_dense_index(self):
        """A SparseVector query is densified for dense families."""
        index = build_index(_spec(IndexFamily.SQ), np.eye(3))
        assert index.search(SparseVector.from_dict(3, {2: 1.0}), 1).ids == (2,)
