"""Knowledge extraction: function-calling against an LLM, with a rule-based fallback.

Each attraction's name and description are sent through a two-field function
schema (history, geography). A response with either field empty is retried
once; a second empty response raises ExtractionFailed. The batch job bounds
in-flight requests with a semaphore and can fall back to the offline
sentence splitter per attraction.
"""

import asyncio
import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

from tenacity import AsyncRetrying, retry_if_exception_type, stop_after_attempt

from ..core.errors import ExtractionFailed, VrbError
from ..core.logging import get_logger
from ..models.corpus import Attraction, KnowledgeEntry
from ..models.rag import FunctionField, FunctionSchema
from .client import LlmClient

logger = get_logger(__name__)

KNOWLEDGE_SCHEMA = FunctionSchema(
    name="record_viewpoint_knowledge",
    description="Record the history and the geography of a scenic viewpoint from its description.",
    fields=[
        FunctionField(
            name="history",
            description="Historical and cultural background: origins, dynasties, events, religion.",
        ),
        FunctionField(
            name="geography",
            description="Geographic facts: location, altitude, terrain, climate, distances, access.",
        ),
    ],
)

# Words that mark a sentence as geographic in the fallback splitter
LOCATION_LEXICON: frozenset[str] = frozenset(
    {
        "位于", "地处", "坐落", "海拔", "米", "公里", "千米", "面积", "平方",
        "东", "西", "南", "北", "境内", "交界", "省", "市", "县", "区", "乡", "镇", "村",
        "山", "峰", "湖", "河", "江", "冰川", "峡谷", "草原", "雪山", "盆地", "气候", "交通",
        "located", "altitude", "elevation", "km", "kilometers", "meters", "north", "south",
        "east", "west", "lake", "river", "mountain", "glacier", "valley", "climate",
    }
)

_SENTENCE_END = re.compile(r"(?<=[。！？；!?;])|(?<=\.)\s+|\n+")


class _EmptyFields(VrbError):
    pass


async def extract_knowledge(
    attraction: Attraction,
    client: LlmClient,
    schema: FunctionSchema = KNOWLEDGE_SCHEMA,
) -> KnowledgeEntry:
    """Ask the model for the two knowledge fields of one attraction.

    Raises:
        ExtractionFailed: If both attempts return an empty field
        ClientTimeout: If the client times out
    """
    text = f"{attraction.name}\n{attraction.description}"
    try:
        async for attempt in AsyncRetrying(
            stop=stop_after_attempt(2),
            retry=retry_if_exception_type(_EmptyFields),
            reraise=True,
        ):
            with attempt:
                fields = await client.call_function(schema, text)
                history = (fields.get("history") or "").strip()
                geography = (fields.get("geography") or "").strip()
                if not history or not geography:
                    logger.debug("extraction_empty_fields", attraction_id=attraction.id)
                    raise _EmptyFields(attraction.id)
                return KnowledgeEntry(
                    attraction_id=attraction.id,
                    history=history,
                    geography=geography,
                    source="llm",
                )
    except _EmptyFields as e:
        raise ExtractionFailed(attraction.id) from e
    raise ExtractionFailed(attraction.id)


@dataclass(frozen=True)
class FallbackExtractor:
    """Offline splitter: sentences with a location word go to geography, the rest to history."""

    lexicon: frozenset[str] = field(default=LOCATION_LEXICON)

    def split_sentences(self, text: str) -> list[str]:
        return [s.strip() for s in _SENTENCE_END.split(text) if s and s.strip()]

    def extract(self, attraction: Attraction) -> KnowledgeEntry:
        history: list[str] = []
        geography: list[str] = []
        for sentence in self.split_sentences(attraction.description):
            lowered = sentence.lower()
            target = geography if any(word in lowered for word in self.lexicon) else history
            target.append(sentence)
        sep = "" if _is_cjk_text(attraction.description) else " "
        return KnowledgeEntry(
            attraction_id=attraction.id,
            history=sep.join(history),
            geography=sep.join(geography),
            source="fallback",
        )


def _is_cjk_text(text: str) -> bool:
    return any("\u4e00" <= ch <= "\u9fff" for ch in text)


@dataclass
class ExtractionReport:
    """Outcome of a batch extraction."""

    entries: dict[int, KnowledgeEntry] = field(default_factory=dict)
    failed: list[int] = field(default_factory=list)
    fallback_used: list[int] = field(default_factory=list)


async def extract_all(
    attractions: Iterable[Attraction],
    client: LlmClient | None,
    concurrency: int = 4,
    fallback: FallbackExtractor | None = None,
) -> ExtractionReport:
    """Extract knowledge for every attraction with at most ``concurrency`` requests in flight.

    With no client every attraction goes straight to the fallback. Failed
    extractions use the fallback when one is given and are reported otherwise.
    """
    if client is None and fallback is None:
        raise ValueError("either a client or a fallback extractor is required")
    report = ExtractionReport()
    semaphore = asyncio.Semaphore(concurrency)
    items: Sequence[Attraction] = list(attractions)

    async def extract_with_limit(attraction: Attraction) -> None:
        if client is None:
            assert fallback is not None
            report.entries[attraction.id] = fallback.extract(attraction)
            report.fallback_used.append(attraction.id)
            return
        async with semaphore:
            try:
                report.entries[attraction.id] = await extract_knowledge(attraction, client)
            except ExtractionFailed as e:
                logger.warning("extraction_failed", attraction_id=attraction.id, error=str(e))
                if fallback is None:
                    report.failed.append(attraction.id)
                    return
                report.entries[attraction.id] = fallback.extract(attraction)
                report.fallback_used.append(attraction.id)

    await asyncio.gather(*[extract_with_limit(a) for a in items])

    report.entries = dict(sorted(report.entries.items()))
    report.failed.sort()
    report.fallback_used.sort()
    logger.info(
        "extraction_completed",
        extracted=len(report.entries),
        failed=len(report.failed),
        fallback=len(report.fallback_used),
    )
    return report
