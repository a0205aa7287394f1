"""Index specification and bench sweep configuration models."""

import math
from enum import Enum
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

from ..core.errors import BadParams


class Metric(str, Enum):
    """Distance metric; L2 and L1 rank ascending, IP descending."""

    L2 = "L2"
    L1 = "L1"
    IP = "IP"

    @property
    def ascending(self) -> bool:
        """True when smaller scores are better."""
        return self is not Metric.IP


class IndexFamily(str, Enum):
    """Index families available to the sweep."""

    FLAT = "Flat"
    HNSW = "HNSW"
    IVFFLAT = "IVFFlat"
    SQ = "SQ"
    IVFSQ = "IVFSQ"
    NSG = "NSG"
    LSH = "LSH"
    HNSWSQ = "HNSWSQ"


class VectorArm(str, Enum):
    """Vectorization arm."""

    TFIDF = "tfidf"
    EMBEDDING = "embedding"


class TokenizerMode(str, Enum):
    """Tokenization strategy."""

    UNICODE_MIXED = "unicode_mixed"
    CHAR_BIGRAM = "char_bigram"
    WHITESPACE = "whitespace"


class IndexParams(BaseModel):
    """Family-specific build and search parameters.

    Only the fields relevant to the chosen family are read. nlist and nprobe
    default to round(sqrt(N)) and min(8, nlist) once N is known.
    """

    model_config = ConfigDict(frozen=True)

    # HNSW
    M: int = 16
    ef_construction: int = 200
    ef_search: int = 64
    # IVF*
    nlist: int | None = None
    nprobe: int | None = None
    kmeans_iters: int = 20
    # SQ-bearing
    bits: int = 8
    # NSG
    knn_k: int = 32
    out_degree: int = 16
    # LSH
    n_bits: int = 64


class IndexSpec(BaseModel):
    """A family, a metric, its parameters and the seed for randomized stages."""

    model_config = ConfigDict(frozen=True)

    family: IndexFamily
    metric: Metric = Metric.L2
    params: IndexParams = Field(default_factory=IndexParams)
    seed: int = 0

    @property
    def uses_ivf(self) -> bool:
        return self.family in (IndexFamily.IVFFLAT, IndexFamily.IVFSQ)

    @property
    def uses_hnsw(self) -> bool:
        return self.family in (IndexFamily.HNSW, IndexFamily.HNSWSQ)

    def resolved(self, n_vectors: int) -> "IndexSpec":
        """Return a copy with data-dependent defaults filled in and ranges checked.

        Raises:
            BadParams: If any parameter is outside its documented range.
        """
        p = self.params
        nlist = p.nlist
        nprobe = p.nprobe
        if self.uses_ivf:
            if nlist is None:
                nlist = max(1, round(math.sqrt(n_vectors)))
            if nprobe is None:
                nprobe = min(8, nlist)
            if nlist < 1:
                raise BadParams(f"nlist must be >= 1, got {nlist}")
            if nlist > n_vectors:
                raise BadParams(f"nlist={nlist} exceeds number of vectors {n_vectors}")
            if not 1 <= nprobe <= nlist:
                raise BadParams(f"nprobe must be in [1, nlist={nlist}], got {nprobe}")
            if p.kmeans_iters < 0:
                raise BadParams(f"kmeans_iters must be >= 0, got {p.kmeans_iters}")
        if self.uses_hnsw:
            if p.M < 2:
                raise BadParams(f"M must be >= 2, got {p.M}")
            if p.ef_construction < 1 or p.ef_search < 1:
                raise BadParams("ef_construction and ef_search must be >= 1")
        if self.family in (IndexFamily.SQ, IndexFamily.IVFSQ, IndexFamily.HNSWSQ) and p.bits != 8:
            raise BadParams(f"only 8-bit scalar quantization is supported, got bits={p.bits}")
        if self.family is IndexFamily.NSG and (p.knn_k < 1 or p.out_degree < 1):
            raise BadParams("knn_k and out_degree must be >= 1")
        if self.family is IndexFamily.LSH and p.n_bits < 1:
            raise BadParams(f"n_bits must be >= 1, got {p.n_bits}")
        params = p.model_copy(update={"nlist": nlist, "nprobe": nprobe})
        return self.model_copy(update={"params": params})

    @property
    def label(self) -> str:
        """Family and metric, e.g. ``HNSW_L2``."""
        return f"{self.family.value}_{self.metric.value}"


def default_grid(seed: int = 0) -> list[IndexSpec]:
    """The ten per-arm configurations of the comparison.

    Flat, HNSW under each metric, IVFFlat, SQ, HNSWSQ, IVFSQ, NSG and LSH; all but
    the HNSW rows run under L2.
    """
    grid = [IndexSpec(family=IndexFamily.FLAT, seed=seed)]
    grid += [IndexSpec(family=IndexFamily.HNSW, metric=m, seed=seed) for m in Metric]
    grid += [
        IndexSpec(family=family, seed=seed)
        for family in (
            IndexFamily.IVFFLAT,
            IndexFamily.SQ,
            IndexFamily.HNSWSQ,
            IndexFamily.IVFSQ,
            IndexFamily.NSG,
            IndexFamily.LSH,
        )
    ]
    return grid


class TokenizerConfig(BaseModel):
    """Tokenizer section of the bench document."""

    mode: TokenizerMode = TokenizerMode.UNICODE_MIXED
    stopwords: Path | None = None
    lowercase: bool = True


class CorpusConfig(BaseModel):
    """Input files of the bench."""

    attractions: Path
    prompts: Path
    knowledge: Path | None = None
    doc_embeddings: Path | None = None
    query_embeddings: Path | None = None


class BenchConfig(BaseModel):
    """Full sweep configuration."""

    corpus: CorpusConfig
    tokenizer: TokenizerConfig = Field(default_factory=TokenizerConfig)
    arms: list[VectorArm] = Field(default_factory=lambda: [VectorArm.TFIDF, VectorArm.EMBEDDING])
    grid: list[IndexSpec] | None = None
    k: int = Field(default=3, ge=1)
    seed: int = 0
    jobs: int | None = Field(default=None, ge=1)
    out: Path = Path("bench-out")
    normalize_tfidf: bool = False
    hit_mode: Literal["text", "features"] = "features"

    def index_grid(self) -> list[IndexSpec]:
        """Configured grid, or the default one, with every spec carrying the sweep seed."""
        specs = self.grid if self.grid is not None else default_grid(self.seed)
        return [spec.model_copy(update={"seed": self.seed}) for spec in specs]
