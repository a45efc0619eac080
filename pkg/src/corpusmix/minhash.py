"""Near-duplicate detection with single-band MinHash LSH over word shingles.

The default configuration is one band of 10 hash rows: two documents are
duplicates only when their entire 10-minimum signatures match (collision
probability J^10 for Jaccard similarity J), so this targets near-exact
duplicates. Band/row layout is configurable.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .corpus import Document, word_tokens
from .errors import ConfigError, InputError
from .hashing import MASK64, derive_seeds, fingerprint64, mix_array

DEFAULT_NUM_HASHES = 10
DEFAULT_SHINGLE_WIDTH = 5


@dataclass(frozen=True)
class MinHashSignature:
    """Per-permutation minima; equality over a band defines LSH candidacy."""

    minima: tuple[int, ...]
    is_sentinel: bool = False

    def __len__(self) -> int:
        return len(self.minima)


def sentinel_signature(num_hashes: int) -> MinHashSignature:
    """Reserved signature for documents with an empty shingle set."""
    return MinHashSignature((MASK64,) * num_hashes, is_sentinel=True)


def shingles(tokens: Sequence[str], width: int = DEFAULT_SHINGLE_WIDTH) -> set[int]:
    """64-bit fingerprints of every contiguous `width`-token window."""
    if width < 1:
        raise ConfigError("shingle width must be >= 1")
    return {
        fingerprint64(" ".join(tokens[i : i + width]))
        for i in range(len(tokens) - width + 1)
    }


def signature(shingle_set: Iterable[int], seeds: Sequence[int]) -> MinHashSignature:
    """MinHash signature: per-seed minimum of a seeded 64-bit hash.

    An empty shingle set maps to the sentinel signature.
    """
    values = shingle_set if isinstance(shingle_set, (set, frozenset, list, tuple)) else list(shingle_set)
    if not values:
        return sentinel_signature(len(seeds))
    arr = np.fromiter(values, dtype=np.uint64, count=len(values))
    seed_arr = np.asarray([s & MASK64 for s in seeds], dtype=np.uint64)
    hashed = mix_array(arr[np.newaxis, :] ^ seed_arr[:, np.newaxis])
    return MinHashSignature(tuple(int(v) for v in hashed.min(axis=1)))


def jaccard_estimate(a: MinHashSignature, b: MinHashSignature) -> float:
    """Unbiased Jaccard estimator: fraction of agreeing coordinates."""
    if a.is_sentinel or b.is_sentinel:
        raise InputError("cannot estimate similarity of a sentinel signature")
    if len(a) != len(b):
        raise InputError(f"signature lengths differ: {len(a)} vs {len(b)}")
    agree = sum(x == y for x, y in zip(a.minima, b.minima))
    return agree / len(a.minima)


@dataclass
class DedupReport:
    kept: list[str]
    dropped: dict[str, str]
    cluster_count: int


def document_signature(
    doc: Document, seeds: Sequence[int], shingle_width: int = DEFAULT_SHINGLE_WIDTH
) -> MinHashSignature:
    return signature(shingles(word_tokens(doc.text), shingle_width), seeds)


def _signatures(docs, shingle_width, seeds, threads):
    def one(doc):
        return document_signature(doc, seeds, shingle_width)

    if threads <= 1 or len(docs) < 2:
        return [one(doc) for doc in docs]
    # ordered map keeps the result independent of worker count
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(one, docs, chunksize=256))


def dedup(
    documents: Iterable[Document],
    *,
    shingle_width: int = DEFAULT_SHINGLE_WIDTH,
    num_hashes: int = DEFAULT_NUM_HASHES,
    master_seed: int = 0,
    seeds: Sequence[int] | None = None,
    bands: int = 1,
    threads: int = 1,
) -> tuple[list[Document], DedupReport]:
    """Drop near-duplicates, keeping the smallest id of each signature cluster.

    With the default single band, a cluster is a set of documents sharing an
    identical full signature. With ``bands`` > 1 documents are linked whenever
    any band matches (connected components). Sentinel-signature documents
    (fewer tokens than the shingle width) are always kept. Output order is the
    input order restricted to kept documents; the result depends only on
    (corpus, seeds, shingle_width), never on ``threads``.
    """
    docs = list(documents)
    ids = [doc.id for doc in docs]
    if len(set(ids)) != len(ids):
        raise InputError("duplicate document ids in dedup input")
    if seeds is None:
        seeds = derive_seeds(master_seed, num_hashes)
    elif len(seeds) != num_hashes:
        raise ConfigError(f"expected {num_hashes} seeds, got {len(seeds)}")
    if bands < 1 or num_hashes % bands != 0:
        raise ConfigError("num_hashes must be a positive multiple of bands")
    rows = num_hashes // bands

    sigs = _signatures(docs, shingle_width, seeds, threads)

    parent = list(range(len(docs)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    buckets: dict[tuple, int] = {}
    for i, sig in enumerate(sigs):
        if sig.is_sentinel:
            continue
        for band in range(bands):
            key = (band, sig.minima[band * rows : (band + 1) * rows])
            j = buckets.setdefault(key, i)
            if j != i:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[ri] = rj

    # representative per cluster: lexicographically smallest id
    rep: dict[int, int] = {}
    for i, doc in enumerate(docs):
        if sigs[i].is_sentinel:
            continue
        root = find(i)
        best = rep.get(root)
        if best is None or doc.id < docs[best].id:
            rep[root] = i

    kept_docs: list[Document] = []
    dropped: dict[str, str] = {}
    for i, doc in enumerate(docs):
        if sigs[i].is_sentinel or rep[find(i)] == i:
            kept_docs.append(doc)
        else:
            dropped[doc.id] = docs[rep[find(i)]].id

    report = DedupReport(
        kept=[doc.id for doc in kept_docs],
        dropped=dropped,
        cluster_count=len(rep),
    )
    return kept_docs, report
