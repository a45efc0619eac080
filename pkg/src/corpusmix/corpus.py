"""Canonical document model, text normalization, shard IO, and corpus stats.

Shards are newline-delimited UTF-8 JSON records, one document per line, with
required keys ``id``, ``source``, ``text`` and optional keys ``url``,
``domain``, ``token_count``, ``quality_score``, ``language``. Unknown keys are
preserved on round-trip.
"""

from __future__ import annotations

import json
import math
import re
import unicodedata
from dataclasses import dataclass, field
from typing import IO, Any, Iterable, Iterator, NamedTuple

from .errors import ConfigError, InputError, ParseError

DEFAULT_CHARS_PER_TOKEN = 4.0

# word tokens are maximal runs of letters/digits; underscore counts as
# punctuation and is dropped along with everything else
_WORD_RE = re.compile(r"[^\W_]+", re.UNICODE)

_REQUIRED_KEYS = ("id", "source", "text")
_OPTIONAL_KEYS = ("url", "domain", "token_count", "quality_score", "language")
_KNOWN_KEYS = frozenset(_REQUIRED_KEYS + _OPTIONAL_KEYS)


@dataclass(frozen=True, slots=True)
class Document:
    """One corpus record."""

    id: str
    source: str
    text: str
    url: str | None = None
    domain: str | None = None
    token_count: int | None = None
    quality_score: float | None = None
    language: str | None = None
    extra: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.token_count is not None:
            if self.token_count < 0:
                raise InputError(f"document {self.id!r}: token_count must be >= 0")
            if self.text == "" and self.token_count != 0:
                raise InputError(f"document {self.id!r}: empty text requires token_count 0")
        if self.quality_score is not None and not 0.0 <= self.quality_score <= 5.0:
            raise InputError(f"document {self.id!r}: quality_score must lie in [0, 5]")


def normalize_text(text: str) -> str:
    """Canonical text form: NFC, lowercased, whitespace collapsed and stripped.

    Applied before every n-gram/shingle operation so matching is
    case-insensitive and insensitive to Unicode composition differences.
    """
    text = unicodedata.normalize("NFC", text).lower()
    # lowercasing can leave combining sequences uncomposed; restore NFC
    text = unicodedata.normalize("NFC", text)
    return " ".join(text.split())


def tokenize_words(text: str) -> list[str]:
    """Split on whitespace/punctuation boundaries, discarding the punctuation."""
    return _WORD_RE.findall(text)


def word_tokens(text: str) -> list[str]:
    """Tokens of the normalized text; the unit for n-grams, shingles, and LCS."""
    return tokenize_words(normalize_text(text))


def approx_token_count(text: str, chars_per_token: float = DEFAULT_CHARS_PER_TOKEN) -> int:
    """Character-count stand-in for subword token counts: ceil(chars / rate)."""
    if chars_per_token <= 0:
        raise ConfigError("chars_per_token must be positive")
    return math.ceil(len(text) / chars_per_token)


def effective_token_count(doc: Document, chars_per_token: float = DEFAULT_CHARS_PER_TOKEN) -> int:
    """Recorded token_count when present, otherwise the character estimate."""
    if doc.token_count is not None:
        return doc.token_count
    return approx_token_count(doc.text, chars_per_token)


def score_bucket(score: float) -> int:
    """Integer score bucket used for threshold comparisons: round half up."""
    return max(0, min(5, math.floor(score + 0.5)))


# ---------------------------------------------------------------------------
# Shard IO
# ---------------------------------------------------------------------------


def document_to_record(doc: Document) -> dict[str, Any]:
    """Flat record for the shard format; optional fields omitted when None."""
    record: dict[str, Any] = {"id": doc.id, "source": doc.source, "text": doc.text}
    for key in _OPTIONAL_KEYS:
        value = getattr(doc, key)
        if value is not None:
            record[key] = value
    for key in sorted(doc.extra):
        if key not in _KNOWN_KEYS:
            record[key] = doc.extra[key]
    return record


def _require_str(obj: dict, key: str) -> str:
    value = obj.get(key)
    if not isinstance(value, str):
        raise ValueError(f"key {key!r} must be a string")
    return value


def record_to_document(obj: Any) -> Document:
    """Parse one shard record into a Document, validating field types."""
    if not isinstance(obj, dict):
        raise ValueError("record must be a JSON object")
    for key in _REQUIRED_KEYS:
        if key not in obj:
            raise ValueError(f"missing required key {key!r}")
    known: dict[str, Any] = {key: _require_str(obj, key) for key in _REQUIRED_KEYS}
    for key in ("url", "domain", "language"):
        if key in obj:
            known[key] = _require_str(obj, key)
    if "token_count" in obj:
        value = obj["token_count"]
        if isinstance(value, bool) or not isinstance(value, int):
            raise ValueError("key 'token_count' must be an integer")
        known["token_count"] = value
    if "quality_score" in obj:
        value = obj["quality_score"]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValueError("key 'quality_score' must be a number")
        known["quality_score"] = value
    extra = {key: obj[key] for key in obj if key not in _KNOWN_KEYS}
    return Document(extra=extra, **known)


def dumps_document(doc: Document) -> str:
    return json.dumps(document_to_record(doc), ensure_ascii=False, separators=(",", ":"))


def write_shard(documents: Iterable[Document], stream: IO[str]) -> int:
    """Write documents as one JSON record per line; returns the count."""
    count = 0
    for doc in documents:
        stream.write(dumps_document(doc))
        stream.write("\n")
        count += 1
    return count


def read_shard(
    stream: Iterable[str | bytes],
    *,
    strict: bool = False,
    error_sink: list[ParseError] | None = None,
) -> Iterator[Document]:
    """Stream documents from a shard.

    Malformed lines raise ParseError when ``strict`` is set; otherwise they
    are skipped and reported through ``error_sink`` (web-scale shards always
    contain stragglers). Errors carry 1-based line numbers.
    """
    for line_no, line in enumerate(stream, start=1):
        try:
            if isinstance(line, bytes):
                line = line.decode("utf-8")
            stripped = line.strip("\n").strip("\r")
            if not stripped:
                raise ValueError("blank line")
            yield record_to_document(json.loads(stripped))
        except (ValueError, InputError) as exc:
            err = ParseError(str(exc), line=line_no)
            if strict:
                raise err from exc
            if error_sink is not None:
                error_sink.append(err)


def write_shard_file(path, documents: Iterable[Document]) -> int:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        return write_shard(documents, handle)


def read_shard_file(
    path, *, strict: bool = False, error_sink: list[ParseError] | None = None
) -> list[Document]:
    with open(path, "r", encoding="utf-8") as handle:
        return list(read_shard(handle, strict=strict, error_sink=error_sink))


# ---------------------------------------------------------------------------
# Corpus statistics
# ---------------------------------------------------------------------------


class SourceTally(NamedTuple):
    documents: int
    tokens: int


@dataclass(frozen=True)
class CorpusStats:
    """Exact per-corpus counts; merge is associative and commutative."""

    document_count: int
    total_tokens: int
    per_source: dict[str, SourceTally]
    score_histogram: dict[int, int]

    def merge(self, other: "CorpusStats") -> "CorpusStats":
        per_source = dict(self.per_source)
        for name, tally in other.per_source.items():
            prev = per_source.get(name, SourceTally(0, 0))
            per_source[name] = SourceTally(prev.documents + tally.documents, prev.tokens + tally.tokens)
        histogram = dict(self.score_histogram)
        for bucket, count in other.score_histogram.items():
            histogram[bucket] = histogram.get(bucket, 0) + count
        return CorpusStats(
            document_count=self.document_count + other.document_count,
            total_tokens=self.total_tokens + other.total_tokens,
            per_source=per_source,
            score_histogram=histogram,
        )


def corpus_stats(
    documents: Iterable[Document], chars_per_token: float = DEFAULT_CHARS_PER_TOKEN
) -> CorpusStats:
    """Single-pass corpus statistics; order-invariant."""
    count = 0
    total = 0
    per_source: dict[str, SourceTally] = {}
    histogram: dict[int, int] = {}
    for doc in documents:
        tokens = effective_token_count(doc, chars_per_token)
        count += 1
        total += tokens
        prev = per_source.get(doc.source, SourceTally(0, 0))
        per_source[doc.source] = SourceTally(prev.documents + 1, prev.tokens + tokens)
        if doc.quality_score is not None:
            bucket = score_bucket(doc.quality_score)
            histogram[bucket] = histogram.get(bucket, 0) + 1
    return CorpusStats(
        document_count=count,
        total_tokens=total,
        per_source=per_source,
        score_histogram=histogram,
    )
