"""RAG prompt assembly.

The instruction is fixed. The input is the user's query followed by each
retrieved attraction's history and geography under labeled headings, in
retrieval order. Trailing entries are dropped whole until instruction plus
input fit ``max_input_tokens``; if the first entry alone does not fit, its
texts are shortened, and a query that is over budget by itself is cut too.
Token counts come from the active tokenizer and only approximate model
tokens.
"""

from collections.abc import Callable, Sequence

from jinja2 import Environment, StrictUndefined

from ..core.errors import NoKnowledge, PromptBudgetExceeded
from ..core.logging import get_logger
from ..models.corpus import KnowledgeEntry
from ..models.rag import GenParams
from ..textproc.tokenizer import TokenizerSpec, count_tokens

logger = get_logger(__name__)

RAG_INSTRUCTION = (
    "Please use the provided viewpoint knowledge to introduce the viewpoint to the user. "
    "Always adhere strictly to the provided viewpoint information."
)

_env = Environment(undefined=StrictUndefined, trim_blocks=True, lstrip_blocks=True, autoescape=False)

INPUT_TEMPLATE = _env.from_string(
    """User query: {{ query }}

Viewpoint information:
{% for entry in entries %}

### Viewpoint {{ loop.index }}
History:
{{ entry.history }}
Geography:
{{ entry.geography }}
{% endfor %}
"""
)


def render_input(query: str, entries: Sequence[KnowledgeEntry]) -> str:
    return INPUT_TEMPLATE.render(query=query, entries=entries)


def build_rag_prompt(
    query: str,
    knowledge: Sequence[KnowledgeEntry],
    params: GenParams | None = None,
    tokenizer: TokenizerSpec | None = None,
) -> tuple[str, str]:
    """Return ``(instruction, input)`` for the generation call.

    Raises:
        NoKnowledge: If ``knowledge`` is empty
        PromptBudgetExceeded: If even an empty query with an empty entry does not fit
    """
    if not knowledge:
        raise NoKnowledge("a RAG prompt needs at least one knowledge entry")
    params = params or GenParams()
    tokenizer = tokenizer or TokenizerSpec()
    budget = params.max_input_tokens - count_tokens(tokenizer, RAG_INSTRUCTION)

    def fits(text: str, entries: Sequence[KnowledgeEntry]) -> bool:
        return count_tokens(tokenizer, render_input(text, entries)) <= budget

    entries = list(knowledge)
    while len(entries) > 1 and not fits(query, entries):
        entries.pop()
    if not fits(query, entries):
        first = entries[0]
        longest = max(len(first.history), len(first.geography))
        entries = [_cut(first, _longest_fit(longest, lambda n: fits(query, [_cut(first, n)])))]
    if len(entries) < len(knowledge):
        logger.info("rag_prompt_truncated", kept=len(entries), retrieved=len(knowledge))

    if not fits(query, entries):
        if not fits("", entries):
            required = count_tokens(tokenizer, RAG_INSTRUCTION) + count_tokens(
                tokenizer, render_input("", entries)
            )
            raise PromptBudgetExceeded(params.max_input_tokens, required)
        kept = _longest_fit(len(query), lambda n: fits(query[:n], entries))
        logger.warning("rag_query_truncated", query_chars=len(query), kept_chars=kept)
        query = query[:kept]
    return RAG_INSTRUCTION, render_input(query, entries)


def _longest_fit(limit: int, ok: Callable[[int], bool]) -> int:
    """Largest n in [0, limit] with ok(n), assuming ok is mostly monotone; 0 if none."""
    low, high = 0, limit
    while low < high:
        mid = (low + high + 1) // 2
        if ok(mid):
            low = mid
        else:
            high = mid - 1
    while low > 0 and not ok(low):
        low -= 1
    return low


def _cut(entry: KnowledgeEntry, limit: int) -> KnowledgeEntry:
    return entry.model_copy(update={"history": entry.history[:limit], "geography": entry.geography[:limit]})
