"""Retrieval-augmented answering: vectorize, retrieve top-k, inject knowledge, generate."""

from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from ..core.errors import MissingKnowledge
from ..core.logging import get_logger
from ..index import SearchResult, VectorIndex, build_index
from ..index.base import QueryInput
from ..models.bench import IndexSpec
from ..models.corpus import Attraction, KnowledgeEntry
from ..models.rag import GenParams, RagAnswer
from ..textproc.tokenizer import TokenizerSpec
from ..vectorize.tfidf import fit_transform
from .client import LlmClient
from .prompt import build_rag_prompt

logger = get_logger(__name__)

DEFAULT_K = 3


@dataclass(frozen=True)
class Retriever:
    """A built index plus the function that turns query text into its vector space."""

    attractions: Sequence[Attraction]
    index: VectorIndex
    encode: Callable[[str], QueryInput]
    k: int = DEFAULT_K

    def retrieve(self, query: str) -> SearchResult:
        return self.index.search(self.encode(query), self.k)

    @classmethod
    def tfidf(
        cls,
        attractions: Sequence[Attraction],
        spec: IndexSpec,
        tokenizer: TokenizerSpec,
        k: int = DEFAULT_K,
        normalize: bool = False,
    ) -> "Retriever":
        model, docs = fit_transform(attractions, tokenizer, normalize=normalize)
        return cls(attractions, build_index(spec, docs), model.transform, k)

    @classmethod
    def dense(
        cls,
        attractions: Sequence[Attraction],
        spec: IndexSpec,
        doc_vectors: np.ndarray,
        embed: Callable[[str], np.ndarray],
        k: int = DEFAULT_K,
    ) -> "Retriever":
        return cls(attractions, build_index(spec, doc_vectors), embed, k)


async def answer(
    query: str,
    retriever: Retriever,
    store: Mapping[int, KnowledgeEntry],
    client: LlmClient,
    params: GenParams | None = None,
    tokenizer: TokenizerSpec | None = None,
) -> RagAnswer:
    """Answer ``query`` from the knowledge of its top-k retrieved attractions.

    ``attraction_ids`` are exactly the retrieval ids, in rank order.

    Raises:
        MissingKnowledge: If the store lacks a retrieved attraction
    """
    params = params or GenParams()
    result = retriever.retrieve(query)
    ids = list(result.ids)

    knowledge: list[KnowledgeEntry] = []
    for attraction_id in ids:
        entry = store.get(attraction_id)
        if entry is None:
            raise MissingKnowledge(attraction_id)
        knowledge.append(entry)

    instruction, text = build_rag_prompt(query, knowledge, params, tokenizer)
    reply = await client.generate(instruction, text, params)
    logger.info("rag_answered", attraction_ids=ids, answer_chars=len(reply))
    return RagAnswer(
        query=query,
        attraction_ids=ids,
        knowledge_used=knowledge,
        answer=reply,
        instruction=instruction,
        input=text,
    )
