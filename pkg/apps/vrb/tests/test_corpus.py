"""
Corpus ingestion and tokenization tests.

Covers:
- Attraction CSV loading by header name, writer round trip and row errors
- Prompt and knowledge store validation
- Tokenizer modes, stop-words and keyword extraction
"""
import json
from pathlib import Path

import pytest

from vrb.core.errors import (
    EmptyCorpus,
    FeatureCountOutOfRange,
    MalformedRecord,
    MalformedRow,
    MissingColumn,
)
from vrb.corpus.loader import (
    load_attractions,
    load_knowledge,
    load_prompts,
    load_stopwords,
    save_knowledge,
    write_attractions,
)
from vrb.models.bench import TokenizerConfig, TokenizerMode
from vrb.models.corpus import ATTRACTION_COLUMNS, Attraction, KnowledgeEntry
from vrb.textproc.tokenizer import TokenizerSpec, count_tokens, extract_keywords, tokenize


pytestmark = pytest.mark.corpus


def _write_csv(path: Path, header: list[str], rows: list[list[str]]) -> Path:
    lines = [",".join(header)] + [",".join(row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


class TestAttractionCsv:
    """Attraction CSV loading."""

    def test_round_trip(self, tmp_path: Path, attractions: list[Attraction]):
        """write_attractions then load_attractions gives the same records."""
        path = write_attractions(attractions, tmp_path / "a.csv")
        assert load_attractions(path) == attractions

    def test_columns_matched_by_name(self, tmp_path: Path):
        """A reordered header loads the same fields."""
        header = list(reversed(ATTRACTION_COLUMNS))
        values = {c: "" for c in ATTRACTION_COLUMNS} | {"name": "西湖", "description": "湖光山色"}
        path = _write_csv(tmp_path / "a.csv", header, [[values[c] for c in header]])

        loaded = load_attractions(path)

        assert loaded == [Attraction(id=0, name="西湖", description="湖光山色")]

    def test_ids_follow_row_order(self, tmp_path: Path):
        """Ids are assigned 0..n-1 in file order."""
        header = list(ATTRACTION_COLUMNS)
        rows = [[f"name{i}" if c == "name" else "desc" if c == "description" else "" for c in header] for i in range(3)]
        loaded = load_attractions(_write_csv(tmp_path / "a.csv", header, rows))
        assert [(a.id, a.name) for a in loaded] == [(0, "name0"), (1, "name1"), (2, "name2")]

    def test_missing_column(self, tmp_path: Path):
        """A header without description raises MissingColumn."""
        header = [c for c in ATTRACTION_COLUMNS if c != "description"]
        path = _write_csv(tmp_path / "a.csv", header, [["x"] * len(header)])
        with pytest.raises(MissingColumn) as exc:
            load_attractions(path)
        assert exc.value.name == "description"

    def test_header_only(self, tmp_path: Path):
        """Header without data rows raises EmptyCorpus."""
        path = _write_csv(tmp_path / "a.csv", list(ATTRACTION_COLUMNS), [])
        with pytest.raises(EmptyCorpus):
            load_attractions(path)

    def test_short_row(self, tmp_path: Path):
        """A row with too few fields reports its line number."""
        header = list(ATTRACTION_COLUMNS)
        good = ["n" if c == "name" else "d" if c == "description" else "" for c in header]
        path = _write_csv(tmp_path / "a.csv", header, [good, ["only", "two"]])
        with pytest.raises(MalformedRow) as exc:
            load_attractions(path)
        assert exc.value.line_no == 3

    def test_blank_description(self, tmp_path: Path):
        """A whitespace-only description is rejected."""
        header = list(ATTRACTION_COLUMNS)
        row = ["n" if c == "name" else "  " if c == "description" else "" for c in header]
        with pytest.raises(MalformedRow):
            load_attractions(_write_csv(tmp_path / "a.csv", header, [row]))


class TestPrompts:
    """Prompt set validation."""

    def _write(self, tmp_path: Path, records: object) -> Path:
        path = tmp_path / "prompts.json"
        path.write_text(json.dumps(records, ensure_ascii=False), encoding="utf-8")
        return path

    def test_load(self, tmp_path: Path):
        """Records load in order with their features."""
        path = self._write(tmp_path, [{"text": "雪山和湖泊", "features": ["雪山", "湖泊"]}])
        prompts = load_prompts(path)
        assert prompts.texts == ["雪山和湖泊"]
        assert prompts.prompts[0].features == ("雪山", "湖泊")

    def test_duplicate_features_collapse(self, tmp_path: Path):
        """Repeated features count once."""
        path = self._write(tmp_path, [{"text": "q", "features": ["a", "a", "b"]}])
        assert load_prompts(path).prompts[0].features == ("a", "b")

    @pytest.mark.parametrize(
        "features", [[], ["a", "b", "c", "d", "e"], ["a", "a", "b", "c", "d"]]
    )
    def test_feature_count_out_of_range(self, tmp_path: Path, features: list[str]):
        """0 or more than 4 declared features are rejected, duplicates included."""
        path = self._write(tmp_path, [{"text": "q", "features": features}])
        with pytest.raises(FeatureCountOutOfRange) as exc:
            load_prompts(path)
        assert exc.value.count == len(features)

    def test_missing_features(self, tmp_path: Path):
        """A record without a feature list is malformed."""
        with pytest.raises(MalformedRecord):
            load_prompts(self._write(tmp_path, [{"text": "q"}]))

    def test_invalid_json(self, tmp_path: Path):
        """Unparseable JSON is a MalformedRecord."""
        path = tmp_path / "prompts.json"
        path.write_text("[{", encoding="utf-8")
        with pytest.raises(MalformedRecord):
            load_prompts(path)


class TestKnowledgeStore:
    """Knowledge store persistence."""

    def test_round_trip(self, tmp_path: Path, attractions: list[Attraction]):
        """Saved entries load back keyed by attraction id."""
        entries = [
            KnowledgeEntry(attraction_id=2, history="h2", geography="g2", source="fallback"),
            KnowledgeEntry(attraction_id=0, history="h0", geography="g0", source="llm"),
        ]
        path = save_knowledge(entries, tmp_path / "store.json")
        store = load_knowledge(path, attractions)
        assert list(store) == [0, 2]
        assert store[2].source == "fallback"

    def test_unknown_attraction(self, tmp_path: Path, attractions: list[Attraction]):
        """Entries must refer to a loaded attraction."""
        path = save_knowledge(
            [KnowledgeEntry(attraction_id=999, history="h", geography="g")], tmp_path / "s.json"
        )
        with pytest.raises(MalformedRecord):
            load_knowledge(path, attractions)

    def test_duplicate_id(self, tmp_path: Path):
        """Two entries for one attraction are rejected."""
        path = tmp_path / "s.json"
        record = {"attraction_id": 1, "history": "h", "geography": "g"}
        path.write_text(json.dumps([record, record]), encoding="utf-8")
        with pytest.raises(MalformedRecord):
            load_knowledge(path)


class TestTokenizer:
    """Tokenization modes."""

    def test_unicode_mixed_chars_and_bigrams(self):
        """CJK runs give each character and each overlapping bigram."""
        assert tokenize(TokenizerSpec(), "故宫") == ["故", "故宫", "宫"]

    def test_char_bigram(self):
        """char_bigram keeps only the bigrams of a run."""
        spec = TokenizerSpec(mode=TokenizerMode.CHAR_BIGRAM)
        assert tokenize(spec, "故宫博物") == ["故宫", "宫博", "博物"]

    def test_single_character_run(self):
        """A one-character run is a token in both CJK-aware modes."""
        for mode in (TokenizerMode.UNICODE_MIXED, TokenizerMode.CHAR_BIGRAM):
            assert tokenize(TokenizerSpec(mode=mode), "山") == ["山"]

    def test_mixed_script(self):
        """Latin words are lowercased; punctuation separates tokens."""
        tokens = tokenize(TokenizerSpec(), "West Lake, 西湖!")
        assert tokens == ["west", "lake", "西", "西湖", "湖"]

    def test_digits_split_from_cjk(self):
        """Numbers form their own token between CJK runs."""
        assert tokenize(TokenizerSpec(), "海拔3000米") == ["海", "海拔", "拔", "3000", "米"]

    def test_symbols_split_words(self):
        """Outside CJK, tokens are word-character runs; symbols are dropped."""
        spec = TokenizerSpec(mode=TokenizerMode.CHAR_BIGRAM)
        assert tokenize(spec, "c++ wi-fi 5a") == ["c", "wi", "fi", "5a"]

    def test_whitespace_mode(self):
        """whitespace mode splits on spaces only."""
        spec = TokenizerSpec(mode=TokenizerMode.WHITESPACE)
        assert tokenize(spec, "西湖  Scenic area") == ["西湖", "scenic", "area"]

    def test_stopwords_case_insensitive(self):
        """Stop-words are lowercased along with the text."""
        spec = TokenizerSpec(stopwords=frozenset({"The", "的"}))
        assert tokenize(spec, "The lake的") == ["lake"]

    def test_lowercase_off(self):
        """Case is kept when lowercase is disabled."""
        assert tokenize(TokenizerSpec(lowercase=False), "Lake") == ["Lake"]

    def test_keywords_are_distinct(self):
        """extract_keywords is the token set; count_tokens counts repeats."""
        spec = TokenizerSpec()
        assert extract_keywords(spec, "lake lake") == {"lake"}
        assert count_tokens(spec, "lake lake") == 2

    def test_from_config_loads_stopwords(self, tmp_path: Path):
        """The stop-word file skips blanks and comments."""
        path = tmp_path / "stop.txt"
        path.write_text("# comment\n的\n\n了\n", encoding="utf-8")
        assert load_stopwords(path) == {"的", "了"}

        spec = TokenizerSpec.from_config(TokenizerConfig(stopwords=path))
        assert tokenize(spec, "的了山") == ["的了", "了山", "山"]
