"""RAG flow models."""

from pydantic import BaseModel, ConfigDict, Field

from .corpus import KnowledgeEntry


class GenParams(BaseModel):
    """Generation parameters passed to the LLM client."""

    model_config = ConfigDict(frozen=True)

    temperature: float = Field(default=0.95, ge=0)
    max_input_tokens: int = Field(default=1024, ge=1)
    max_output_tokens: int = Field(default=512, ge=1)


class FunctionField(BaseModel):
    """One string field of a function-calling schema."""

    name: str
    description: str


class FunctionSchema(BaseModel):
    """Function-calling contract: a named function returning string fields."""

    name: str
    description: str
    fields: list[FunctionField]

    def to_tool(self) -> dict[str, object]:
        """Render as a chat-completions ``tools`` entry."""
        return {
            "type": "function",
            "function": {
                "name": self.name,
                "description": self.description,
                "parameters": {
                    "type": "object",
                    "properties": {
                        f.name: {"type": "string", "description": f.description}
                        for f in self.fields
                    },
                    "required": [f.name for f in self.fields],
                },
            },
        }


class RagAnswer(BaseModel):
    """Generated answer with full retrieval provenance."""

    query: str
    attraction_ids: list[int] = Field(max_length=3)
    knowledge_used: list[KnowledgeEntry]
    answer: str
    instruction: str = ""
    input: str = ""
