"""Error types raised across the bench.

Every error the CLI can surface derives from ``VrbError`` so that startup
failures map to a single exit code.
"""

from typing import Any


class VrbError(Exception):
    """Base class for all bench errors."""


class DomainError(VrbError, ValueError):
    """Argument outside the mathematical domain of a formula."""


class ConfigError(VrbError):
    """Bench configuration document is unreadable or invalid."""


# Corpus
class MissingColumn(VrbError):
    """Attraction CSV header lacks a schema column."""

    def __init__(self, name: str) -> None:
        super().__init__(f"Missing column: {name}")
        self.name = name


class EmptyCorpus(VrbError):
    """Attraction CSV has a header but no data rows."""

    def __init__(self, path: str) -> None:
        super().__init__(f"No data rows in {path}")
        self.path = path


class MalformedRow(VrbError):
    """A CSV data row has the wrong number of fields or an invalid value."""

    def __init__(self, line_no: int, reason: str = "wrong field count") -> None:
        super().__init__(f"Malformed row at line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


class FeatureCountOutOfRange(VrbError):
    """Prompt record declares 0 or more than 4 features."""

    def __init__(self, index: int, count: int) -> None:
        super().__init__(f"Prompt {index} has {count} features (expected 1-4)")
        self.index = index
        self.count = count


class MalformedRecord(VrbError):
    """JSON record does not match the expected schema."""

    def __init__(self, source: str, index: int, reason: str) -> None:
        super().__init__(f"{source} record {index}: {reason}")
        self.source = source
        self.index = index
        self.reason = reason


# Vectorization
class EmptyVocabulary(VrbError):
    """No document produced a single token."""


class DimensionMismatch(VrbError):
    """Vector dimensions disagree."""

    def __init__(self, expected: int, actual: int, row: Any = None) -> None:
        where = f" (row {row})" if row is not None else ""
        super().__init__(f"Dimension mismatch{where}: expected {expected}, got {actual}")
        self.expected = expected
        self.actual = actual
        self.row = row


class MissingDoc(VrbError):
    """Embedding file lacks a vector for an attraction id."""

    def __init__(self, doc_id: int) -> None:
        super().__init__(f"No embedding for doc {doc_id}")
        self.doc_id = doc_id


# Index
class BadParams(VrbError):
    """Index parameters outside their documented ranges."""


class EmptyInput(VrbError):
    """Index build called without vectors."""


class IndexFormatError(VrbError):
    """Persisted index container is unreadable or from another version."""


# Evaluation
class MalformedResults(VrbError):
    """Results JSON does not follow the query -> {query, results} shape."""


class ComponentOutOfRange(VrbError):
    """A fluency/accuracy/relevance component lies outside [0, 1]."""

    def __init__(self, name: str, value: float) -> None:
        super().__init__(f"{name}={value} outside [0, 1]")
        self.name = name
        self.value = value


# RAG flow
class NoKnowledge(VrbError):
    """RAG prompt requested with no knowledge entries."""


class PromptBudgetExceeded(VrbError):
    """Instruction and input template alone exceed max_input_tokens."""

    def __init__(self, max_input_tokens: int, required: int) -> None:
        super().__init__(f"max_input_tokens={max_input_tokens} is below the {required} tokens of an empty prompt")
        self.max_input_tokens = max_input_tokens
        self.required = required


class MissingKnowledge(VrbError):
    """Knowledge store has no entry for a retrieved attraction."""

    def __init__(self, attraction_id: int) -> None:
        super().__init__(f"No knowledge entry for attraction {attraction_id}")
        self.attraction_id = attraction_id


class ExtractionFailed(VrbError):
    """Function-calling extraction returned empty fields after retry."""

    def __init__(self, attraction_id: int) -> None:
        super().__init__(f"Knowledge extraction failed for attraction {attraction_id}")
        self.attraction_id = attraction_id


class ClientTimeout(VrbError):
    """LLM endpoint did not answer within the configured timeout."""
