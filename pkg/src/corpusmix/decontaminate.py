"""Benchmark decontamination: 13-gram candidate gate plus LCS overlap ratio.

A document is flagged only when (a) it shares an indexed n-gram fingerprint
with some benchmark item and (b) the longest-common-subsequence overlap ratio
against one of those candidate items reaches the minimum ratio. Documents with
no indexed fingerprint are never flagged, whatever their LCS would be.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .corpus import Document, word_tokens
from .errors import ConfigError, InputError
from .hashing import fingerprint64

DEFAULT_NGRAM = 13
DEFAULT_MIN_RATIO = 0.6
DEFAULT_WINDOW_GUARD = 8192
DEFAULT_MAX_CANDIDATES = 1000


@dataclass(frozen=True)
class BenchmarkItem:
    bench_id: str
    suite: str
    tokens: tuple[str, ...]

    def __post_init__(self):
        if not self.tokens:
            raise InputError(f"benchmark item {self.bench_id!r} has no tokens")


def benchmark_items_from_documents(docs: Iterable[Document]) -> list[BenchmarkItem]:
    """Load benchmark items from shard documents (`source` is the suite name).

    Records whose text yields no word tokens are skipped: they cannot be
    matched and would violate the nonempty-tokens invariant.
    """
    items = []
    for doc in docs:
        tokens = tuple(word_tokens(doc.text))
        if tokens:
            items.append(BenchmarkItem(bench_id=doc.id, suite=doc.source, tokens=tokens))
    return items


@dataclass(frozen=True)
class BenchmarkIndex:
    """Postings from n-gram fingerprints to the benchmark items containing them.

    Items shorter than n tokens are indexed by their single full-length
    window; ``window_lengths`` records every window size present so document
    scanning can probe each one.
    """

    n: int
    postings: dict[int, tuple[str, ...]]
    window_lengths: tuple[int, ...]


def _window_fingerprints(tokens: Sequence[str], length: int) -> set[int]:
    return {
        fingerprint64(" ".join(tokens[i : i + length]))
        for i in range(len(tokens) - length + 1)
    }


def build_index(items: Iterable[BenchmarkItem], n: int = DEFAULT_NGRAM) -> BenchmarkIndex:
    if n < 1:
        raise ConfigError("n-gram order must be >= 1")
    items = list(items)
    if not items:
        raise ConfigError("benchmark set is empty")
    seen_ids = set()
    postings: dict[int, list[str]] = {}
    lengths = {n}
    for item in items:
        if item.bench_id in seen_ids:
            raise InputError(f"duplicate bench_id {item.bench_id!r}")
        seen_ids.add(item.bench_id)
        length = min(n, len(item.tokens))
        lengths.add(length)
        for fp in _window_fingerprints(item.tokens, length):
            postings.setdefault(fp, []).append(item.bench_id)
    return BenchmarkIndex(
        n=n,
        postings={fp: tuple(ids) for fp, ids in postings.items()},
        window_lengths=tuple(sorted(lengths)),
    )


def lcs_len(a: Sequence[str], b: Sequence[str]) -> int:
    """Length of the longest common subsequence (token-level, O(|a|·|b|))."""
    if not a or not b:
        return 0
    if len(b) > len(a):
        a, b = b, a
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        append = cur.append
        for j, y in enumerate(b, start=1):
            if x == y:
                append(prev[j - 1] + 1)
            else:
                left = cur[j - 1]
                up = prev[j]
                append(left if left >= up else up)
        prev = cur
    return prev[-1]


def overlap_ratio(
    doc_tokens: Sequence[str],
    bench: BenchmarkItem,
    *,
    denominator: str = "benchmark",
    window_guard: int = DEFAULT_WINDOW_GUARD,
) -> float:
    """LCS length normalized by benchmark item length (or min length).

    Documents longer than ``window_guard`` tokens are scanned in overlapping
    windows of 2x the item length with stride equal to the item length, taking
    the maximum ratio; a contiguous overlap region of item length always falls
    inside one window, so a qualifying match cannot be missed.
    """
    if denominator not in ("benchmark", "min"):
        raise ConfigError(f"unknown denominator {denominator!r}")
    bt = bench.tokens
    if denominator == "benchmark":
        denom = len(bt)
    else:
        denom = min(len(doc_tokens), len(bt))
        if denom == 0:
            return 0.0
    if len(doc_tokens) <= window_guard:
        return lcs_len(doc_tokens, bt) / denom
    window = 2 * len(bt)
    stride = len(bt)
    best = 0
    for start in range(0, len(doc_tokens), stride):
        chunk = doc_tokens[start : start + window]
        best = max(best, lcs_len(chunk, bt))
        if best == len(bt) or start + window >= len(doc_tokens):
            break
    return best / denom


@dataclass
class ContaminationReport:
    flagged: dict[str, list[tuple[str, float]]]
    clean_count: int
    truncated_candidates: dict[str, int] = field(default_factory=dict)


def decontaminate(
    documents: Iterable[Document],
    index: BenchmarkIndex,
    benchmarks: Iterable[BenchmarkItem],
    min_ratio: float = DEFAULT_MIN_RATIO,
    *,
    max_candidates: int = DEFAULT_MAX_CANDIDATES,
    denominator: str = "benchmark",
    window_guard: int = DEFAULT_WINDOW_GUARD,
) -> tuple[list[Document], ContaminationReport]:
    """Remove documents that overlap benchmark items.

    Candidate items are ranked by the number of distinct shared fingerprints
    (ties by bench_id) and at most ``max_candidates`` get the LCS check; the
    per-document count of discarded candidates is reported when truncated.
    """
    if not 0 < min_ratio <= 1:
        raise ConfigError("min_ratio must lie in (0, 1]")
    if max_candidates < 1:
        raise ConfigError("max_candidates must be >= 1")
    bench_by_id: dict[str, BenchmarkItem] = {}
    for item in benchmarks:
        bench_by_id[item.bench_id] = item

    clean: list[Document] = []
    flagged: dict[str, list[tuple[str, float]]] = {}
    truncated: dict[str, int] = {}
    for doc in documents:
        tokens = word_tokens(doc.text)
        hits: Counter[str] = Counter()
        for length in index.window_lengths:
            if len(tokens) < length:
                continue
            for fp in _window_fingerprints(tokens, length):
                for bench_id in index.postings.get(fp, ()):
                    hits[bench_id] += 1
        if not hits:
            clean.append(doc)
            continue
        candidates = sorted(hits.items(), key=lambda kv: (-kv[1], kv[0]))
        if len(candidates) > max_candidates:
            truncated[doc.id] = len(candidates) - max_candidates
            candidates = candidates[:max_candidates]
        matches: list[tuple[str, float]] = []
        for bench_id, _count in candidates:
            bench = bench_by_id.get(bench_id)
            if bench is None:
                raise InputError(f"bench_id {bench_id!r} is indexed but was not supplied")
            ratio = overlap_ratio(
                tokens, bench, denominator=denominator, window_guard=window_guard
            )
            if ratio >= min_ratio:
                matches.append((bench_id, ratio))
        if matches:
            flagged[doc.id] = matches
        else:
            clean.append(doc)

    report = ContaminationReport(
        flagged={doc_id: flagged[doc_id] for doc_id in sorted(flagged)},
        clean_count=len(clean),
        truncated_candidates=dict(sorted(truncated.items())),
    )
    return clean, report
