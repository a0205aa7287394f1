"""LLM clients: a chat-completions HTTP client and a deterministic offline stub."""

import json
from typing import Any, Protocol, runtime_checkable

import httpx
from tenacity import AsyncRetrying, retry_if_exception, stop_after_attempt, wait_exponential

from ..core.config import Settings
from ..core.errors import ClientTimeout, VrbError
from ..core.logging import get_logger
from ..models.rag import FunctionSchema, GenParams

logger = get_logger(__name__)


@runtime_checkable
class LlmClient(Protocol):
    """What the RAG flow needs from a language model."""

    async def generate(self, instruction: str, input: str, params: GenParams) -> str: ...

    async def call_function(self, schema: FunctionSchema, input: str) -> dict[str, str]: ...


def _is_transient(exc: BaseException) -> bool:
    if isinstance(exc, httpx.TransportError):
        return True
    return isinstance(exc, httpx.HTTPStatusError) and exc.response.status_code >= 500


class HttpLlmClient:
    """Client for an OpenAI-style ``/chat/completions`` endpoint.

    Transport errors and 5xx responses are retried with exponential backoff;
    a request that still times out raises ClientTimeout.
    """

    def __init__(
        self,
        base_url: str,
        model: str,
        token: str | None = None,
        timeout: float = 60.0,
        max_retries: int = 3,
    ) -> None:
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.token = token
        self.timeout = timeout
        self.max_retries = max_retries
        self._client: httpx.AsyncClient | None = None

    @classmethod
    def from_settings(cls, settings: Settings) -> "HttpLlmClient":
        return cls(
            base_url=settings.llm_base_url,
            model=settings.llm_model,
            token=settings.llm_token,
            timeout=settings.llm_timeout,
            max_retries=settings.llm_max_retries,
        )

    async def _get_client(self) -> httpx.AsyncClient:
        if self._client is None:
            self._client = httpx.AsyncClient(
                base_url=self.base_url,
                headers={"Authorization": f"Bearer {self.token}"} if self.token else {},
                timeout=self.timeout,
            )
        return self._client

    async def close(self) -> None:
        if self._client:
            await self._client.aclose()
            self._client = None

    async def __aenter__(self) -> "HttpLlmClient":
        return self

    async def __aexit__(self, *exc_info: object) -> None:
        await self.close()

    async def _complete(self, payload: dict[str, Any]) -> dict[str, Any]:
        client = await self._get_client()
        try:
            async for attempt in AsyncRetrying(
                stop=stop_after_attempt(self.max_retries),
                wait=wait_exponential(multiplier=0.5, max=8),
                retry=retry_if_exception(_is_transient),
                reraise=True,
            ):
                with attempt:
                    response = await client.post("/chat/completions", json=payload)
                    response.raise_for_status()
                    data: dict[str, Any] = response.json()
                    return data
        except httpx.TimeoutException as e:
            logger.error("llm_request_timeout", model=self.model, timeout=self.timeout)
            raise ClientTimeout(f"LLM endpoint did not answer within {self.timeout}s") from e
        except httpx.HTTPError as e:
            logger.error("llm_request_failed", model=self.model, error=str(e))
            raise VrbError(f"LLM request failed: {e}") from e
        raise VrbError("LLM request failed without a response")

    async def generate(self, instruction: str, input: str, params: GenParams) -> str:
        data = await self._complete(
            {
                "model": self.model,
                "messages": [
                    {"role": "system", "content": instruction},
                    {"role": "user", "content": input},
                ],
                "temperature": params.temperature,
                "max_tokens": params.max_output_tokens,
            }
        )
        try:
            return str(data["choices"][0]["message"]["content"] or "")
        except (KeyError, IndexError, TypeError) as e:
            raise VrbError("unexpected chat-completions response shape") from e

    async def call_function(self, schema: FunctionSchema, input: str) -> dict[str, str]:
        data = await self._complete(
            {
                "model": self.model,
                "messages": [{"role": "user", "content": input}],
                "tools": [schema.to_tool()],
                "tool_choice": {"type": "function", "function": {"name": schema.name}},
            }
        )
        try:
            calls = data["choices"][0]["message"].get("tool_calls") or []
            arguments = json.loads(calls[0]["function"]["arguments"]) if calls else {}
        except (KeyError, IndexError, TypeError, json.JSONDecodeError) as e:
            logger.warning("function_call_unparseable", function=schema.name, error=str(e))
            return {}
        return {f.name: str(arguments.get(f.name) or "") for f in schema.fields}


class EchoLlmClient:
    """Offline stub: ``generate`` returns the input verbatim and
    ``call_function`` fills every schema field with the input."""

    async def generate(self, instruction: str, input: str, params: GenParams) -> str:
        return input

    async def call_function(self, schema: FunctionSchema, input: str) -> dict[str, str]:
        return {f.name: input for f in schema.fields}
