"""Score-threshold filtering, domain aggregation/URL expansion, and a trainable
hashed n-gram quality classifier.

The classifier is a deterministic linear model over sign-hashed bag-of-n-gram
features trained by SGD on user-supplied 0-5 labels. It fills the same
pipeline role as the encoder classifiers behind the published datasets without
any model-annotation dependency.
"""

from __future__ import annotations

import random
import struct
from collections import Counter
from dataclasses import dataclass
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .corpus import Document, score_bucket, word_tokens
from .domains import registrable_domain
from .errors import ConfigError, InputError, ParseError
from .hashing import MASK64, fingerprint64, mix64

DEFAULT_FEATURE_DIM = 1 << 20
DEFAULT_BINARY_THRESHOLD = 3

# per-language overrides for code filtering; unlisted languages use the
# caller's default threshold (3 works for most languages, Java prefers 2)
DEFAULT_LANGUAGE_THRESHOLDS = {"java": 2, "markdown": 3}

_MODEL_MAGIC = b"CMQM"
_MODEL_VERSION = 1


# ---------------------------------------------------------------------------
# Threshold filtering
# ---------------------------------------------------------------------------


@dataclass
class ThresholdReport:
    kept: int
    dropped_low_score: int
    dropped_unscored: int
    min_score: int
    language_thresholds: dict[str, int]


def _check_score(value: int, name: str) -> None:
    if not isinstance(value, int) or isinstance(value, bool) or not 0 <= value <= 5:
        raise ConfigError(f"{name} must be an integer in 0..5, got {value!r}")


def threshold_filter(
    documents: Iterable[Document],
    min_score: int,
    *,
    language_thresholds: Mapping[str, int] | None = None,
) -> tuple[list[Document], ThresholdReport]:
    """Keep documents whose score bucket meets the threshold, order preserved.

    Scores are bucketed with round-half-up before comparison. Documents with
    no quality_score are dropped and counted separately. A per-language map
    (matched case-insensitively on the `language` field) overrides the default
    threshold, e.g. {"java": 2} with default 3.
    """
    _check_score(min_score, "min_score")
    per_language = {}
    if language_thresholds:
        for language, value in language_thresholds.items():
            _check_score(value, f"threshold for {language!r}")
            per_language[language.lower()] = value
    kept: list[Document] = []
    dropped_low = 0
    dropped_unscored = 0
    for doc in documents:
        if doc.quality_score is None:
            dropped_unscored += 1
            continue
        threshold = min_score
        if per_language and doc.language is not None:
            threshold = per_language.get(doc.language.lower(), min_score)
        if score_bucket(doc.quality_score) >= threshold:
            kept.append(doc)
        else:
            dropped_low += 1
    report = ThresholdReport(
        kept=len(kept),
        dropped_low_score=dropped_low,
        dropped_unscored=dropped_unscored,
        min_score=min_score,
        language_thresholds=per_language,
    )
    return kept, report


# ---------------------------------------------------------------------------
# Domain aggregation and URL expansion
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScoredPage:
    url: str
    domain: str
    score: int

    def __post_init__(self):
        if not isinstance(self.score, int) or not 0 <= self.score <= 5:
            raise InputError(f"page score must be an integer in 0..5, got {self.score!r}")

    @classmethod
    def from_url(cls, url: str, score: int) -> "ScoredPage":
        domain = registrable_domain(url)
        if domain is None:
            raise InputError(f"url {url!r} has no registrable domain")
        return cls(url=url, domain=domain, score=score)


def domain_select(
    pages: Iterable[ScoredPage], min_pages: int = 10, min_score: int = 2
) -> list[str]:
    """Domains with at least `min_pages` pages scoring `min_score` or higher."""
    if min_pages < 1:
        raise ConfigError("min_pages must be >= 1")
    _check_score(min_score, "min_score")
    qualifying: Counter[str] = Counter()
    for page in pages:
        if page.score >= min_score:
            qualifying[page.domain] += 1
    return sorted(domain for domain, count in qualifying.items() if count >= min_pages)


@dataclass
class ExpandResult:
    urls: list[str]
    provenance: dict[str, int]
    skipped: int


def expand_urls(
    allowlist: Iterable[str],
    seed_lists: Mapping[str, Sequence[str]],
    min_urls_per_domain: int = 10,
) -> ExpandResult:
    """Select URLs whose domain is allowlisted or well-represented in a seed list.

    A domain qualifies when it is on the allowlist, or when any single named
    seed list contributes at least `min_urls_per_domain` URLs for it. Selected
    URLs are deduplicated first-source-wins in seed-list order; provenance
    counts how many selected URLs each list contributed. Unparseable URLs are
    counted and skipped.
    """
    if min_urls_per_domain < 1:
        raise ConfigError("min_urls_per_domain must be >= 1")
    skipped = 0
    parsed: dict[str, list[tuple[str, str]]] = {}
    for name, urls in seed_lists.items():
        rows = []
        for url in urls:
            domain = registrable_domain(url)
            if domain is None:
                skipped += 1
                continue
            rows.append((url, domain))
        parsed[name] = rows

    qualified = set(allowlist)
    for rows in parsed.values():
        counts = Counter(domain for _, domain in rows)
        qualified.update(d for d, c in counts.items() if c >= min_urls_per_domain)

    selected: dict[str, str] = {}
    for name, rows in parsed.items():
        for url, domain in rows:
            if domain in qualified and url not in selected:
                selected[url] = name
    provenance = {name: 0 for name in seed_lists}
    for name in selected.values():
        provenance[name] += 1
    return ExpandResult(urls=list(selected), provenance=provenance, skipped=skipped)


# ---------------------------------------------------------------------------
# Hashed n-gram classifier
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClassifierConfig:
    feature_dim: int = DEFAULT_FEATURE_DIM
    ngram_orders: tuple[int, ...] = (1, 2)
    seed: int = 0
    epochs: int = 20
    learning_rate: float = 0.5
    l2: float = 1e-8
    holdout_fraction: float = 0.1
    binary_threshold: int = DEFAULT_BINARY_THRESHOLD

    def __post_init__(self):
        if self.feature_dim < 2 or self.feature_dim & (self.feature_dim - 1):
            raise ConfigError("feature_dim must be a power of two")
        orders = tuple(sorted(set(int(o) for o in self.ngram_orders)))
        if not orders or orders[0] < 1:
            raise ConfigError("ngram_orders must be positive integers")
        object.__setattr__(self, "ngram_orders", orders)
        if self.epochs < 1 or self.learning_rate <= 0:
            raise ConfigError("epochs must be >= 1 and learning_rate positive")
        if not 0 <= self.holdout_fraction < 1:
            raise ConfigError("holdout_fraction must lie in [0, 1)")
        _check_score(self.binary_threshold, "binary_threshold")


@dataclass(eq=False)
class ClassifierModel:
    feature_dim: int
    ngram_orders: tuple[int, ...]
    seed: int
    weights: np.ndarray
    bias: float


@dataclass
class TrainReport:
    examples: int
    holdout_size: int
    holdout_f1: float | None
    binary_threshold: int
    epochs: int


def _features(
    text: str, feature_dim: int, ngram_orders: tuple[int, ...], seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """Sign-hashed bag-of-n-gram features, L2-normalized; sparse (idx, value)."""
    tokens = word_tokens(text)
    mask = feature_dim - 1
    accum: dict[int, float] = {}
    for order in ngram_orders:
        for i in range(len(tokens) - order + 1):
            gram = " ".join(tokens[i : i + order])
            h = mix64(fingerprint64(f"{order}\x1f{gram}") ^ seed)
            idx = h & mask
            sign = 1.0 if h >> 63 == 0 else -1.0
            accum[idx] = accum.get(idx, 0.0) + sign
    if not accum:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.float64)
    idx = np.fromiter(accum.keys(), dtype=np.int64, count=len(accum))
    values = np.fromiter(accum.values(), dtype=np.float64, count=len(accum))
    norm = float(np.sqrt(np.dot(values, values)))
    if norm > 0:
        values /= norm
    return idx, values


def _binary_f1(truth: list[bool], predicted: list[bool]) -> float:
    tp = sum(1 for t, p in zip(truth, predicted) if t and p)
    fp = sum(1 for t, p in zip(truth, predicted) if not t and p)
    fn = sum(1 for t, p in zip(truth, predicted) if t and not p)
    if tp == fp == fn == 0:
        return 1.0
    return 2 * tp / (2 * tp + fp + fn)


def train_classifier(
    labeled: Iterable[tuple[str, float]], config: ClassifierConfig | None = None
) -> tuple[ClassifierModel, TrainReport]:
    """Train the linear quality model by SGD on (text, score) pairs.

    Training is bit-deterministic given the input order and the config seed:
    the per-epoch shuffle and all hashing derive from that seed alone. The
    held-out split is stratified by label bucket (every k-th example per
    bucket) and the report carries binary F1 at the configured threshold;
    holdout_f1 is None when the data is too small to spare a holdout.
    """
    cfg = config if config is not None else ClassifierConfig()
    pairs = [(text, float(score)) for text, score in labeled]
    if len(pairs) < 2:
        raise InputError("need at least two labeled examples")
    for _, score in pairs:
        if not 0.0 <= score <= 5.0:
            raise InputError(f"label {score} outside [0, 5]")
    if len({score for _, score in pairs}) < 2:
        raise InputError("training data carries a single label value")

    seed = cfg.seed & MASK64
    feats = [_features(text, cfg.feature_dim, cfg.ngram_orders, seed) for text, _ in pairs]
    labels = [score for _, score in pairs]

    holdout: set[int] = set()
    if cfg.holdout_fraction > 0:
        k = max(2, round(1 / cfg.holdout_fraction))
        position: dict[int, int] = {}
        for i, label in enumerate(labels):
            bucket = score_bucket(label)
            pos = position.get(bucket, 0)
            position[bucket] = pos + 1
            # k-th of every k keeps small classes fully in training
            if pos % k == k - 1:
                holdout.add(i)
    train_idx = [i for i in range(len(pairs)) if i not in holdout]

    weights = np.zeros(cfg.feature_dim, dtype=np.float64)
    bias = 0.0
    rng = random.Random(seed)
    for _epoch in range(cfg.epochs):
        order = train_idx[:]
        rng.shuffle(order)
        for i in order:
            idx, values = feats[i]
            pred = bias + (float(weights[idx] @ values) if idx.size else 0.0)
            err = pred - labels[i]
            if idx.size:
                weights[idx] -= cfg.learning_rate * (err * values + cfg.l2 * weights[idx])
            bias -= cfg.learning_rate * err

    model = ClassifierModel(
        feature_dim=cfg.feature_dim,
        ngram_orders=cfg.ngram_orders,
        seed=seed,
        weights=weights,
        bias=bias,
    )

    f1 = None
    if holdout:
        truth = []
        predicted = []
        for i in sorted(holdout):
            idx, values = feats[i]
            raw = bias + (float(weights[idx] @ values) if idx.size else 0.0)
            raw = min(5.0, max(0.0, raw))
            truth.append(score_bucket(labels[i]) >= cfg.binary_threshold)
            predicted.append(score_bucket(raw) >= cfg.binary_threshold)
        f1 = _binary_f1(truth, predicted)

    report = TrainReport(
        examples=len(pairs),
        holdout_size=len(holdout),
        holdout_f1=f1,
        binary_threshold=cfg.binary_threshold,
        epochs=cfg.epochs,
    )
    return model, report


def classify(model: ClassifierModel, text: str) -> float:
    """Clamped linear prediction in [0, 5]; bucket with score_bucket()."""
    idx, values = _features(text, model.feature_dim, model.ngram_orders, model.seed)
    raw = model.bias + (float(model.weights[idx] @ values) if idx.size else 0.0)
    return min(5.0, max(0.0, raw))


# ---------------------------------------------------------------------------
# Model serialization (versioned binary)
# ---------------------------------------------------------------------------


def save_model(model: ClassifierModel, path: Any) -> None:
    header = struct.pack(
        "<4sHQQd",
        _MODEL_MAGIC,
        _MODEL_VERSION,
        model.feature_dim,
        model.seed & MASK64,
        model.bias,
    )
    orders = struct.pack("<B", len(model.ngram_orders)) + bytes(model.ngram_orders)
    with open(path, "wb") as handle:
        handle.write(header)
        handle.write(orders)
        handle.write(model.weights.astype("<f8", copy=False).tobytes())


def load_model(path: Any) -> ClassifierModel:
    with open(path, "rb") as handle:
        blob = handle.read()
    head_size = struct.calcsize("<4sHQQd")
    if len(blob) < head_size + 1 or blob[:4] != _MODEL_MAGIC:
        raise ParseError("not a quality model file")
    magic, version, feature_dim, seed, bias = struct.unpack("<4sHQQd", blob[:head_size])
    if version != _MODEL_VERSION:
        raise ParseError(f"unsupported model version {version}")
    n_orders = blob[head_size]
    orders_end = head_size + 1 + n_orders
    orders = tuple(blob[head_size + 1 : orders_end])
    weights = np.frombuffer(blob[orders_end:], dtype="<f8")
    if weights.size != feature_dim:
        raise ParseError(f"model weight block has {weights.size} entries, expected {feature_dim}")
    return ClassifierModel(
        feature_dim=feature_dim,
        ngram_orders=orders,
        seed=seed,
        weights=weights.copy(),
        bias=bias,
    )
