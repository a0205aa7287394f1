"""Attraction corpus, knowledge store and prompt set models."""

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator

# Column order used when writing; loading matches by header name.
ATTRACTION_COLUMNS: tuple[str, ...] = (
    "name",
    "province",
    "city",
    "district",
    "address",
    "distance",
    "popularity",
    "ticket_price",
    "description",
    "promotion",
)

KnowledgeSource = Literal["llm", "fallback", "manual"]


class Attraction(BaseModel):
    """One standardized viewpoint record.

    distance, popularity and ticket_price stay free-form text as sourced.
    """

    model_config = ConfigDict(frozen=True)

    id: int = Field(ge=0)
    name: str
    province: str = ""
    city: str = ""
    district: str = ""
    address: str = ""
    distance: str = ""
    popularity: str = ""
    ticket_price: str = ""
    description: str
    promotion: str = ""

    @field_validator("name", "description")
    @classmethod
    def _non_blank(cls, value: str) -> str:
        if not value.strip():
            raise ValueError("must be non-empty")
        return value

    @property
    def document_text(self) -> str:
        """Text indexed by the vectorizers: name, a space, description."""
        return f"{self.name} {self.description}"

    @property
    def result_text(self) -> str:
        """Text scored by keyword hits: description followed by name."""
        return f"{self.description}{self.name}"


class KnowledgeEntry(BaseModel):
    """External knowledge for one attraction: history and geography."""

    model_config = ConfigDict(frozen=True)

    attraction_id: int = Field(ge=0)
    history: str
    geography: str
    source: KnowledgeSource = "manual"


class Prompt(BaseModel):
    """A benchmark prompt and the features it asks for."""

    model_config = ConfigDict(frozen=True)

    text: str
    features: tuple[str, ...]

    @field_validator("features", mode="before")
    @classmethod
    def _dedupe_features(cls, value: object) -> object:
        if not isinstance(value, list | tuple):
            return value
        seen: dict[str, None] = {}
        for feature in value:
            if not isinstance(feature, str) or not feature.strip():
                raise ValueError("features must be non-empty strings")
            seen.setdefault(feature.strip(), None)
        return tuple(seen)


class PromptSet(BaseModel):
    """Ordered benchmark prompts."""

    model_config = ConfigDict(frozen=True)

    prompts: tuple[Prompt, ...] = ()

    def __len__(self) -> int:
        return len(self.prompts)

    @property
    def texts(self) -> list[str]:
        """Prompt texts in file order."""
        return [p.text for p in self.prompts]

    @property
    def mean_feature_count(self) -> float:
        """Average declared features per prompt."""
        if not self.prompts:
            return 0.0
        return sum(len(p.features) for p in self.prompts) / len(self.prompts)
