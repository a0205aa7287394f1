"""RAG prompt assembly, LLM clients and knowledge extraction."""

from .client import EchoLlmClient, HttpLlmClient, LlmClient
from .extraction import (
    KNOWLEDGE_SCHEMA,
    LOCATION_LEXICON,
    ExtractionReport,
    FallbackExtractor,
    extract_all,
    extract_knowledge,
)
from .pipeline import Retriever, answer
from .prompt import RAG_INSTRUCTION, build_rag_prompt

__all__ = [
    "LlmClient",
    "HttpLlmClient",
    "EchoLlmClient",
    "KNOWLEDGE_SCHEMA",
    "LOCATION_LEXICON",
    "ExtractionReport",
    "FallbackExtractor",
    "extract_knowledge",
    "extract_all",
    "RAG_INSTRUCTION",
    "build_rag_prompt",
    "Retriever",
    "answer",
]
