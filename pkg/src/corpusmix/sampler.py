"""Deterministic multi-source weighted sampling of a stage plan.

The default mode picks, at every step, the source with the largest remaining
token deficit (target = weight x budget), which tracks the plan weights
exactly and terminates deterministically; a proportional mode draws sources
i.i.d. with probability proportional to the remaining deficit for fidelity
studies. Within a source, documents are visited without replacement in a
seeded per-epoch permutation. The emitted stream is a pure function of
(sources, plan, seed).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .corpus import DEFAULT_CHARS_PER_TOKEN, Document, effective_token_count
from .errors import ConfigError
from .hashing import derive_seed
from .mixture import StagePlan, validate_stage

DEFAULT_MIN_LONG_TOKENS = 8192


@dataclass(frozen=True)
class SampledDocument:
    document: Document
    source: str
    epoch: int


@dataclass
class SourceCursor:
    epoch: int
    cursor: int
    permutation_seed: int


@dataclass
class SamplerState:
    seed: int
    per_source: dict[str, SourceCursor] = field(default_factory=dict)
    tokens_emitted: dict[str, int] = field(default_factory=dict)


class SampleStream:
    """Single-consumer iterator over a plan's weighted document stream."""

    def __init__(
        self,
        sources: Mapping[str, Sequence[Document]],
        plan: StagePlan,
        seed: int,
        *,
        mode: str = "deficit",
        chars_per_token: float = DEFAULT_CHARS_PER_TOKEN,
    ):
        if mode not in ("deficit", "proportional"):
            raise ConfigError(f"unknown sampling mode {mode!r}")
        problems = validate_stage(plan)
        if problems:
            raise ConfigError("; ".join(problems))
        self._plan = plan
        self._mode = mode
        self._chars_per_token = chars_per_token
        self._docs: dict[str, list[Document]] = {}
        self._doc_tokens: dict[str, list[int]] = {}
        self._active: list[str] = []
        for name, weight in plan.weights.items():
            if weight == 0:
                continue
            docs = list(sources.get(name, ()))
            tokens = [effective_token_count(d, chars_per_token) for d in docs]
            if not docs or sum(tokens) == 0:
                raise ConfigError(f"source {name!r} has positive weight but no tokens")
            self._docs[name] = docs
            self._doc_tokens[name] = tokens
            self._active.append(name)

        self._targets = {
            name: float(plan.weights[name] * plan.token_budget) for name in self._active
        }
        # seeded but fixed tie-break ranking over source names
        order = sorted(self._active)
        random.Random(derive_seed(seed, "tiebreak")).shuffle(order)
        self._rank_order = order
        self._draw_rng = random.Random(derive_seed(seed, "draw"))

        self.state = SamplerState(seed=seed)
        for name in self._active:
            self.state.per_source[name] = SourceCursor(
                epoch=0, cursor=0, permutation_seed=derive_seed(seed, "perm", name, "0")
            )
            self.state.tokens_emitted[name] = 0
        self._orders = {
            name: self._permutation(name, 0) for name in self._active
        }

    def _permutation(self, name: str, epoch: int) -> list[int]:
        perm_seed = derive_seed(self.state.seed, "perm", name, str(epoch))
        order = list(range(len(self._docs[name])))
        random.Random(perm_seed).shuffle(order)
        return order

    def _pick_source(self, pending: list[str]) -> str:
        if self._mode == "deficit":
            best = pending[0]
            best_deficit = -1.0
            for name in pending:
                deficit = self._targets[name] - self.state.tokens_emitted[name]
                if deficit > best_deficit:
                    best, best_deficit = name, deficit
            return best
        deficits = [self._targets[n] - self.state.tokens_emitted[n] for n in pending]
        pick = self._draw_rng.random() * sum(deficits)
        acc = 0.0
        for name, deficit in zip(pending, deficits):
            acc += deficit
            if pick < acc:
                return name
        return pending[-1]

    def __iter__(self) -> Iterator[SampledDocument]:
        return self

    def __next__(self) -> SampledDocument:
        pending = [
            name
            for name in self._rank_order
            if self.state.tokens_emitted[name] < self._targets[name]
        ]
        if not pending:
            raise StopIteration
        name = self._pick_source(pending)
        cursor = self.state.per_source[name]
        drawn_epoch = cursor.epoch
        index = self._orders[name][cursor.cursor]
        cursor.cursor += 1
        if cursor.cursor >= len(self._orders[name]):
            # permutation exhausted: reshuffle for the next epoch right away,
            # keeping cursor < source size at all times
            cursor.epoch += 1
            cursor.cursor = 0
            cursor.permutation_seed = derive_seed(
                self.state.seed, "perm", name, str(cursor.epoch)
            )
            self._orders[name] = self._permutation(name, cursor.epoch)
        self.state.tokens_emitted[name] += self._doc_tokens[name][index]
        return SampledDocument(
            document=self._docs[name][index], source=name, epoch=drawn_epoch
        )

    def summary(self) -> dict:
        """Realized shares and epochs for the portion of the stream consumed."""
        emitted = self.state.tokens_emitted
        total = sum(emitted.values())
        source_totals = {name: sum(self._doc_tokens[name]) for name in self._active}
        return {
            "plan": self._plan.name,
            "token_budget": self._plan.token_budget,
            "tokens_emitted": dict(emitted),
            "total_tokens": total,
            "realized_shares": {
                name: (emitted[name] / total if total else 0.0) for name in self._active
            },
            "target_shares": {
                name: float(self._plan.weights[name]) for name in self._active
            },
            "epochs": {
                name: emitted[name] / source_totals[name] for name in self._active
            },
        }


def sample_stream(
    sources: Mapping[str, Sequence[Document]],
    plan: StagePlan,
    seed: int,
    *,
    mode: str = "deficit",
    chars_per_token: float = DEFAULT_CHARS_PER_TOKEN,
) -> SampleStream:
    return SampleStream(sources, plan, seed, mode=mode, chars_per_token=chars_per_token)


def long_context_filter(
    documents: Iterable[Document],
    min_tokens: int = DEFAULT_MIN_LONG_TOKENS,
    chars_per_token: float = DEFAULT_CHARS_PER_TOKEN,
) -> list[Document]:
    """Keep documents of at least `min_tokens` tokens (8k-or-more rule)."""
    if min_tokens < 1:
        raise ConfigError("min_tokens must be >= 1")
    return [
        doc
        for doc in documents
        if effective_token_count(doc, chars_per_token) >= min_tokens
    ]


@dataclass(frozen=True)
class PackReport:
    sequences: int
    boundary_splits: int
    tail_padding: int
    total_tokens: int


def pack_accounting(
    stream: Iterable[Document | SampledDocument],
    sequence_length: int,
    chars_per_token: float = DEFAULT_CHARS_PER_TOKEN,
) -> PackReport:
    """Greedy back-to-back packing arithmetic (no tokenization performed).

    Documents fill fixed-length sequences without document-boundary padding;
    a document contributes one boundary split per sequence border it crosses.
    Tail padding is whatever is left in the final sequence.
    """
    if sequence_length < 1:
        raise ConfigError("sequence_length must be >= 1")
    position = 0
    splits = 0
    for item in stream:
        doc = item.document if isinstance(item, SampledDocument) else item
        tokens = effective_token_count(doc, chars_per_token)
        if tokens == 0:
            continue
        end = position + tokens
        splits += (end - 1) // sequence_length - position // sequence_length
        position = end
    sequences = -(-position // sequence_length)
    return PackReport(
        sequences=sequences,
        boundary_splits=splits,
        tail_padding=sequences * sequence_length - position,
        total_tokens=position,
    )
