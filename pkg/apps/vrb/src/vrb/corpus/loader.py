"""Loaders and writers for the attraction CSV, stop-word list, prompts and knowledge store.

Columns of the attraction CSV are matched by header name, so exports with a
different column order load identically. Results are immutable pydantic
records and can be shared across threads.
"""

import csv
import json
from collections.abc import Iterable, Mapping
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from ..core.errors import (
    EmptyCorpus,
    FeatureCountOutOfRange,
    MalformedRecord,
    MalformedRow,
    MissingColumn,
)
from ..core.logging import get_logger
from ..models.corpus import ATTRACTION_COLUMNS, Attraction, KnowledgeEntry, Prompt, PromptSet

logger = get_logger(__name__)

MIN_FEATURES = 1
MAX_FEATURES = 4


def load_attractions(path: Path | str) -> list[Attraction]:
    """Load the attraction CSV.

    Args:
        path: UTF-8 CSV with a header row naming the schema columns (any order)

    Returns:
        One Attraction per data row, ids assigned in row order from 0

    Raises:
        MissingColumn: Header lacks a schema column
        EmptyCorpus: Header present but no data rows
        MalformedRow: Row with the wrong field count or a blank name/description
    """
    path = Path(path)
    with open(path, encoding="utf-8-sig", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None:
            raise EmptyCorpus(str(path))
        header = [h.strip() for h in header]
        for column in ATTRACTION_COLUMNS:
            if column not in header:
                raise MissingColumn(column)
        positions = {column: header.index(column) for column in ATTRACTION_COLUMNS}

        attractions: list[Attraction] = []
        for row in reader:
            if not row:
                continue
            if len(row) != len(header):
                raise MalformedRow(reader.line_num)
            fields = {column: row[pos] for column, pos in positions.items()}
            try:
                attractions.append(Attraction(id=len(attractions), **fields))
            except ValidationError as e:
                raise MalformedRow(reader.line_num, reason=_first_error(e)) from e

    if not attractions:
        raise EmptyCorpus(str(path))

    logger.info("attractions_loaded", path=str(path), count=len(attractions))
    return attractions


def write_attractions(attractions: Iterable[Attraction], path: Path | str) -> Path:
    """Write attractions as CSV in schema column order (ids are implied by row order)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(ATTRACTION_COLUMNS)
        for a in attractions:
            writer.writerow([getattr(a, column) for column in ATTRACTION_COLUMNS])
    return path


def load_stopwords(path: Path | str) -> set[str]:
    """Load a stop-word list, one entry per line.

    Blank lines and lines starting with '#' are skipped; entries are trimmed
    and deduplicated.

    Raises:
        FileNotFoundError: If the file does not exist
    """
    path = Path(path)
    words: set[str] = set()
    for line in path.read_text(encoding="utf-8-sig").splitlines():
        word = line.strip()
        if not word or word.startswith("#"):
            continue
        words.add(word)
    logger.debug("stopwords_loaded", path=str(path), count=len(words))
    return words


def load_prompts(path: Path | str) -> PromptSet:
    """Load benchmark prompts from a JSON array of ``{"text", "features"}`` records.

    Raises:
        FeatureCountOutOfRange: A record declares 0 or more than 4 features (counted
            as written, before duplicates collapse)
        MalformedRecord: A record is not an object with a text and a feature list
    """
    path = Path(path)
    records = _read_json_array(path, "prompts")
    prompts: list[Prompt] = []
    for i, record in enumerate(records):
        if not isinstance(record, Mapping) or not isinstance(record.get("features"), list):
            raise MalformedRecord("prompts", i, "expected {text, features[]}")
        declared = len(record["features"])
        if not MIN_FEATURES <= declared <= MAX_FEATURES:
            raise FeatureCountOutOfRange(i, declared)
        try:
            prompt = Prompt(text=record.get("text"), features=record["features"])
        except ValidationError as e:
            raise MalformedRecord("prompts", i, _first_error(e)) from e
        prompts.append(prompt)

    prompt_set = PromptSet(prompts=tuple(prompts))
    logger.info(
        "prompts_loaded",
        path=str(path),
        count=len(prompt_set),
        mean_features=round(prompt_set.mean_feature_count, 4),
    )
    return prompt_set


def load_knowledge(
    path: Path | str,
    attractions: Iterable[Attraction] | None = None,
) -> dict[int, KnowledgeEntry]:
    """Load the knowledge store keyed by attraction id.

    Args:
        path: JSON array of {"attraction_id", "history", "geography"} records
        attractions: When given, every entry must refer to one of these

    Raises:
        MalformedRecord: Schema violation, duplicate id, or unknown attraction
    """
    path = Path(path)
    known = {a.id for a in attractions} if attractions is not None else None
    store: dict[int, KnowledgeEntry] = {}
    for i, record in enumerate(_read_json_array(path, "knowledge")):
        try:
            entry = KnowledgeEntry.model_validate(record)
        except ValidationError as e:
            raise MalformedRecord("knowledge", i, _first_error(e)) from e
        if known is not None and entry.attraction_id not in known:
            raise MalformedRecord("knowledge", i, f"unknown attraction {entry.attraction_id}")
        if entry.attraction_id in store:
            raise MalformedRecord("knowledge", i, f"duplicate attraction {entry.attraction_id}")
        store[entry.attraction_id] = entry

    logger.info("knowledge_loaded", path=str(path), count=len(store))
    return store


def save_knowledge(entries: Iterable[KnowledgeEntry], path: Path | str) -> Path:
    """Persist knowledge entries as a JSON array ordered by attraction id."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    ordered = sorted(entries, key=lambda e: e.attraction_id)
    payload = [e.model_dump() for e in ordered]
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, ensure_ascii=False, indent=2)
        f.write("\n")
    logger.info("knowledge_saved", path=str(path), count=len(ordered))
    return path


def _read_json_array(path: Path, source: str) -> list[Any]:
    with open(path, encoding="utf-8") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise MalformedRecord(source, -1, f"invalid JSON: {e}") from e
    if not isinstance(data, list):
        raise MalformedRecord(source, -1, "top-level value must be an array")
    return data


def _first_error(error: ValidationError) -> str:
    first = error.errors()[0]
    loc = ".".join(str(part) for part in first["loc"])
    return f"{loc}: {first['msg']}" if loc else first["msg"]
