"""Versioned binary container for built indexes.

Layout::

    b"VRB1" | uint16 version | uint32 header length | JSON header | npz payload

The header records the family, metric, params, seed, dim, ntotal and whether
the stored matrix is sparse. Loading rejects any other magic or version.
"""

import io
import json
import struct
import zipfile
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from ..core.errors import IndexFormatError
from ..core.logging import get_logger
from ..models.bench import IndexSpec
from .base import VectorIndex, index_class

logger = get_logger(__name__)

MAGIC = b"VRB1"
FORMAT_VERSION = 1
_PREFIX = struct.Struct("<4sHI")


def dumps_index(index: VectorIndex) -> bytes:
    header = json.dumps(
        {
            "spec": index.spec.model_dump(mode="json"),
            "dim": index.dim,
            "ntotal": index.ntotal,
            "sparse": index.is_sparse,
        },
        sort_keys=True,
    ).encode("utf-8")
    payload = io.BytesIO()
    np.savez(payload, **index.arrays())
    return _PREFIX.pack(MAGIC, FORMAT_VERSION, len(header)) + header + payload.getvalue()


def loads_index(blob: bytes) -> VectorIndex:
    """Rebuild an index from ``dumps_index`` output.

    Raises:
        IndexFormatError: Wrong magic, unsupported version or a corrupt body
    """
    if len(blob) < _PREFIX.size:
        raise IndexFormatError("index container is truncated")
    magic, version, header_len = _PREFIX.unpack_from(blob)
    if magic != MAGIC:
        raise IndexFormatError(f"not an index container (magic {magic!r})")
    if version != FORMAT_VERSION:
        raise IndexFormatError(f"unsupported index format version {version}, expected {FORMAT_VERSION}")

    body = blob[_PREFIX.size :]
    try:
        header = json.loads(body[:header_len].decode("utf-8"))
        spec = IndexSpec.model_validate(header["spec"])
        with np.load(io.BytesIO(body[header_len:]), allow_pickle=False) as npz:
            arrays = {name: npz[name] for name in npz.files}
        cls = index_class(spec.family)
        return cls.from_arrays(spec, int(header["dim"]), int(header["ntotal"]), bool(header["sparse"]), arrays)
    except (ValueError, KeyError, ValidationError, OSError, EOFError, zipfile.BadZipFile) as e:
        raise IndexFormatError(f"corrupt index container: {e}") from e


def save_index(index: VectorIndex, path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(dumps_index(index))
    logger.info("index_saved", index=index.spec.label, path=str(path))
    return path


def load_index(path: Path | str) -> VectorIndex:
    index = loads_index(Path(path).read_bytes())
    logger.info("index_loaded", index=index.spec.label, path=str(path))
    return index
