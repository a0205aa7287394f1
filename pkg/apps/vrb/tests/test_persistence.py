"""
Index persistence tests.

Covers:
- Save/load of every family yields identical search results
- Container validation: magic, version and truncation
"""
import struct
from pathlib import Path

import numpy as np
import pytest

from vrb.core.errors import IndexFormatError
from vrb.index import build_index, dumps_index, load_index, loads_index, save_index
from vrb.index.persistence import FORMAT_VERSION, MAGIC
from vrb.models.bench import IndexFamily, IndexSpec, Metric
from vrb.models.corpus import Attraction
from vrb.textproc.tokenizer import TokenizerSpec
from vrb.vectorize.tfidf import fit_transform

from synthetic import gaussian


pytestmark = pytest.mark.index


class TestRoundTrip:
    """Persisted indexes search like the originals."""

    @pytest.mark.parametrize("family", list(IndexFamily))
    def test_dense(self, family: IndexFamily):
        data = gaussian(300, 12, seed=3)
        index = build_index(IndexSpec(family=family, metric=Metric.L2, seed=5), data)
        restored = loads_index(dumps_index(index))

        assert type(restored) is type(index)
        assert restored.spec == index.spec
        assert (restored.dim, restored.ntotal) == (12, 300)
        for query in gaussian(20, 12, seed=4):
            assert restored.search(query, 3) == index.search(query, 3)

    @pytest.mark.parametrize("family", [IndexFamily.FLAT, IndexFamily.IVFFLAT])
    def test_sparse(self, family: IndexFamily, attractions: list[Attraction]):
        """CSR-backed families keep their sparse matrix."""
        model, docs = fit_transform(attractions, TokenizerSpec())
        index = build_index(IndexSpec(family=family, metric=Metric.IP), docs)
        restored = loads_index(dumps_index(index))

        assert restored.is_sparse
        for attraction in attractions[:10]:
            query = model.transform(attraction.name)
            assert restored.search(query, 3) == index.search(query, 3)

    def test_file(self, tmp_path: Path):
        index = build_index(IndexSpec(family=IndexFamily.SQ), np.eye(4))
        path = save_index(index, tmp_path / "nested" / "sq.vrb")
        assert path.read_bytes()[:4] == MAGIC
        assert load_index(path).search(np.eye(4)[1], 1).ids == (1,)


class TestContainerValidation:
    """Corrupt or foreign containers."""

    @pytest.fixture
    def blob(self) -> bytes:
        return dumps_index(build_index(IndexSpec(family=IndexFamily.FLAT), np.eye(3)))

    def test_bad_magic(self, blob: bytes):
        with pytest.raises(IndexFormatError, match="magic"):
            loads_index(b"NOPE" + blob[4:])

    def test_other_version(self, blob: bytes):
        header_len = struct.unpack_from("<I", blob, 6)[0]
        bumped = struct.pack("<4sHI", MAGIC, FORMAT_VERSION + 1, header_len) + blob[10:]
        with pytest.raises(IndexFormatError, match="version"):
            loads_index(bumped)

    def test_truncated(self, blob: bytes):
        with pytest.raises(IndexFormatError):
            loads_index(blob[:5])

    def test_corrupt_payload(self, blob: bytes):
        with pytest.raises(IndexFormatError):
            loads_index(blob[:-40])
