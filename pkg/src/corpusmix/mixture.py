"""Multi-stage pretraining mixture plans, epoch budgets, and stage presets.

Weights are exact rationals so that recipes like 0.58 + 0.24 + 0.14 + 0.04 sum
to exactly 1; floats appear only at the reporting interface. Token quantities
accept "T"/"B"/"M"/"k" suffixes (1T = 1e12, 1B = 1e9) in configs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import ConfigError, ParseError
from .lr_schedule import CosineConfig, WsdConfig

CATEGORIES = ("web", "code", "math", "synthetic", "instruction", "other")

DEFAULT_EPOCH_CAP = 5.0  # repetition guideline: warn past ~4-5 passes

WEIGHT_TOLERANCE = Fraction(1, 10**9)

_SUFFIXES = {"k": 10**3, "m": 10**6, "b": 10**9, "t": 10**12}


def parse_token_count(value: int | str) -> int:
    """Parse a token quantity: plain int or string with k/M/B/T suffix."""
    if isinstance(value, bool):
        raise ConfigError(f"not a token count: {value!r}")
    if isinstance(value, int):
        return value
    text = str(value).strip()
    multiplier = 1
    if text and text[-1].lower() in _SUFFIXES:
        multiplier = _SUFFIXES[text[-1].lower()]
        text = text[:-1]
    try:
        amount = Fraction(text) * multiplier
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"cannot parse token count {value!r}") from exc
    if amount.denominator != 1:
        raise ConfigError(f"token count {value!r} is not a whole number of tokens")
    return int(amount)


def as_weight(value) -> Fraction:
    """Exact weight from a Fraction, int, decimal/ratio string, or float.

    Floats go through their shortest decimal repr, so 0.58 means exactly
    58/100 rather than the nearest binary double.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int) and not isinstance(value, bool):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value)
    raise ConfigError(f"cannot interpret weight {value!r}")


@dataclass(frozen=True)
class SourceSpec:
    name: str
    available_tokens: int
    category: str = "other"

    def __post_init__(self):
        if self.available_tokens <= 0:
            raise ConfigError(f"source {self.name!r}: available_tokens must be positive")
        if self.category not in CATEGORIES:
            raise ConfigError(f"source {self.name!r}: unknown category {self.category!r}")


@dataclass(frozen=True)
class StagePlan:
    """A named mixture stage: token budget plus per-source sampling weights."""

    name: str
    token_budget: int
    weights: dict[str, Fraction]
    notes: str = ""
    approximate: bool = False

    def __post_init__(self):
        if self.token_budget <= 0:
            raise ConfigError(f"stage {self.name!r}: token_budget must be positive")
        object.__setattr__(
            self, "weights", {name: as_weight(w) for name, w in self.weights.items()}
        )

    def weight_sum(self) -> Fraction:
        return sum(self.weights.values(), Fraction(0))


def validate_stage(plan: StagePlan, sources: Mapping[str, SourceSpec] | None = None) -> list[str]:
    """All violations of a stage plan (empty list means ok)."""
    problems = []
    for name, weight in plan.weights.items():
        if weight < 0:
            problems.append(f"stage {plan.name!r}: weight for {name!r} is negative")
    total = plan.weight_sum()
    if abs(total - 1) > WEIGHT_TOLERANCE:
        problems.append(
            f"stage {plan.name!r}: weights sum to {float(total):.12g}, expected 1"
        )
    if sources is not None:
        for name in plan.weights:
            if name not in sources:
                problems.append(f"stage {plan.name!r}: unknown source {name!r}")
    return problems


@dataclass(frozen=True)
class SourceDraw:
    tokens_drawn: Fraction
    epochs: Fraction


@dataclass(frozen=True)
class EpochReport:
    per_source: dict[str, SourceDraw]
    violations: list[tuple[str, float, float]]
    cap: float


def epoch_report(
    plan: StagePlan, sources: Mapping[str, SourceSpec], cap: float = DEFAULT_EPOCH_CAP
) -> EpochReport:
    """Per-source tokens drawn and epochs; violations where epochs exceed cap.

    Exceeding the cap is reported, not raised: the threshold is a guideline.
    """
    problems = validate_stage(plan, sources)
    if problems:
        raise ConfigError("; ".join(problems))
    per_source: dict[str, SourceDraw] = {}
    violations: list[tuple[str, float, float]] = []
    for name, weight in plan.weights.items():
        drawn = weight * plan.token_budget
        epochs = drawn / sources[name].available_tokens
        per_source[name] = SourceDraw(tokens_drawn=drawn, epochs=epochs)
        if float(epochs) > cap:
            violations.append((name, float(epochs), cap))
    return EpochReport(per_source=per_source, violations=violations, cap=cap)


def category_shares(plan: StagePlan, sources: Mapping[str, SourceSpec]) -> dict[str, Fraction]:
    """Exact per-category weight totals of a stage."""
    shares: dict[str, Fraction] = {}
    for name, weight in plan.weights.items():
        category = sources[name].category if name in sources else "other"
        shares[category] = shares.get(category, Fraction(0)) + weight
    return shares


def projected_epochs(
    plan: StagePlan, sources: Mapping[str, SourceSpec], schedule_total: int
) -> dict[str, Fraction]:
    """Epochs each source would see if the stage weights ran a full schedule.

    This is the planning view behind per-source repetition budgeting: a code
    source capped at weight 0.10 of an 11T run sees 1.1T / available tokens.
    """
    out: dict[str, Fraction] = {}
    for name, weight in plan.weights.items():
        out[name] = weight * schedule_total / sources[name].available_tokens
    return out


@dataclass(frozen=True)
class TrainingSchedule:
    stages: tuple[StagePlan, ...]
    boundaries: tuple[int, ...]

    @property
    def total_tokens(self) -> int:
        return self.boundaries[-1] if self.boundaries else 0


def compose_schedule(stages: Sequence[StagePlan]) -> TrainingSchedule:
    """Cumulative token boundaries of an ordered stage list."""
    if not stages:
        raise ConfigError("schedule needs at least one stage")
    problems = []
    for stage in stages:
        problems.extend(validate_stage(stage))
    if problems:
        raise ConfigError("; ".join(problems))
    boundaries = []
    offset = 0
    for stage in stages:
        offset += stage.token_budget
        boundaries.append(offset)
    return TrainingSchedule(stages=tuple(stages), boundaries=tuple(boundaries))


# ---------------------------------------------------------------------------
# Built-in presets
# ---------------------------------------------------------------------------

_SMOLTALK_COUNTS = {
    "magpie-ultra": 431_000,
    "smol-rewrite": 56_200,
    "smol-constraints": 36_200,
    "smol-summarization": 101_000,
    "numinamath-cot": 112_000,
    "metamathqa": 50_000,
    "self-oss-starcoder2-instruct": 50_700,
    "apigen-function-calling": 87_500,
    "systemchats-2": 35_900,
    "longalign": 3_730,
    "everyday-conversations": 2_380,
    "explore-instruct-rewriting": 32_000,
    "openhermes-2.5": 100_000,
}

_SMOLTALK_TOTAL = sum(_SMOLTALK_COUNTS.values())  # 1,098,610 samples (~1.1M)


def builtin_sources() -> dict[str, SourceSpec]:
    """Catalog of the dataset sizes the presets refer to.

    Sizes marked "nominal" in the notes below are planning placeholders for
    datasets whose published size is unavailable; instruction sources are
    measured in samples rather than tokens.
    """
    specs = [
        SourceSpec("fineweb-edu", 1_300_000_000_000, "web"),
        SourceSpec("dclm", 3_800_000_000_000, "web"),
        SourceSpec("starcoderdata", 250_000_000_000, "code"),
        SourceSpec("stack-edu", 125_000_000_000, "code"),
        SourceSpec("owm", 12_000_000_000, "math"),
        SourceSpec("infimm-webmath", 40_000_000_000, "math"),
        SourceSpec("finemath-4plus", 10_000_000_000, "math"),
        SourceSpec("infiwebmath-3plus", 20_500_000_000, "math"),
        SourceSpec("cosmopedia-v2", 30_000_000_000, "synthetic"),
        SourceSpec("auggsm8k", 1_000_000_000, "math"),  # nominal
        SourceSpec("fineweb-edu-8k", 50_000_000_000, "web"),  # nominal long-doc subset
        SourceSpec("dclm-8k", 50_000_000_000, "web"),  # nominal long-doc subset
        SourceSpec("dolma-books-8k", 5_000_000_000, "web"),  # nominal long-doc subset
        SourceSpec("general-instruction", 624_400, "instruction"),
        SourceSpec("math-instruction", 162_000, "instruction"),
    ]
    specs.extend(
        SourceSpec(name, count, "instruction") for name, count in _SMOLTALK_COUNTS.items()
    )
    return {spec.name: spec for spec in specs}


def builtin_stages() -> dict[str, StagePlan]:
    """Stage presets for the four-phase schedule plus derived mixtures."""
    stage4_weights = {
        # web at 58%, split 40/60 fineweb-edu/dclm
        "fineweb-edu": Fraction(58, 100) * Fraction(40, 100),
        "dclm": Fraction(58, 100) * Fraction(60, 100),
        "stack-edu": Fraction(24, 100),
        # math totals 14% including the small OWM / AugGSM8K allocations;
        # the split between the two filtered math sets is an even estimate
        "finemath-4plus": Fraction(139, 2000),
        "infiwebmath-3plus": Fraction(139, 2000),
        "owm": Fraction(8, 10000),
        "auggsm8k": Fraction(2, 10000),
        "cosmopedia-v2": Fraction(4, 100),
    }
    context_weights: dict[str, Fraction] = {
        "dclm-8k": Fraction(10, 100),
        "fineweb-edu-8k": Fraction(10, 100),
        "dolma-books-8k": Fraction(20, 100),
    }
    for name, weight in stage4_weights.items():
        context_weights[name] = context_weights.get(name, Fraction(0)) + weight * Fraction(60, 100)

    presets = {
        "stage1": StagePlan(
            name="stage1",
            token_budget=6_000_000_000_000,
            weights={
                "fineweb-edu": Fraction(90, 100) * Fraction(60, 100),
                "dclm": Fraction(90, 100) * Fraction(40, 100),
                "starcoderdata": Fraction(10, 100),
            },
            notes="web 90% split 60/40 fineweb-edu/dclm; code capped at 10%",
        ),
        "stage2": StagePlan(
            name="stage2",
            token_budget=2_000_000_000_000,
            weights={
                "fineweb-edu": Fraction(75, 100) * Fraction(60, 100),
                "dclm": Fraction(75, 100) * Fraction(40, 100),
                "starcoderdata": Fraction(20, 100),
                "owm": Fraction(5, 100),
            },
            notes="web 75% (60/40 split), code 20%, math 5%",
        ),
        "stage3": StagePlan(
            name="stage3",
            token_budget=2_000_000_000_000,
            weights={
                "fineweb-edu": Fraction(75, 100) * Fraction(40, 100),
                "dclm": Fraction(75, 100) * Fraction(60, 100),
                "stack-edu": Fraction(15, 100),
                "owm": Fraction(5, 100),
                "infimm-webmath": Fraction(5, 100),
            },
            notes=(
                "web split flipped to 40/60 fineweb-edu/dclm; math ~10%; "
                "web/code residual split approximate"
            ),
            approximate=True,
        ),
        "stage4": StagePlan(
            name="stage4",
            token_budget=1_000_000_000_000,
            weights=stage4_weights,
            notes="decay-phase mixture: web 58%, code 24%, math 14%, synthetic 4%",
        ),
        "context_extension": StagePlan(
            name="context_extension",
            token_budget=75_000_000_000,
            weights=context_weights,
            notes="40% long-context documents (>=8k tokens) + 60% stage4 mixture",
        ),
        "smoltalk": StagePlan(
            name="smoltalk",
            token_budget=_SMOLTALK_TOTAL,
            weights={
                name: Fraction(count, _SMOLTALK_TOTAL)
                for name, count in _SMOLTALK_COUNTS.items()
            },
            notes="instruction mixture; units are samples, weights from per-set counts",
        ),
        "sft_math_ablation": StagePlan(
            name="sft_math_ablation",
            token_budget=500_000,
            weights={
                "general-instruction": Fraction(4, 5),
                "math-instruction": Fraction(1, 5),
            },
            notes="80% general instruction + 20% math; units are samples, budget nominal",
        ),
    }
    return presets


MATH_ANNEAL_BUDGET = 100_000_000_000
CODE_ANNEAL_BUDGET = 200_000_000_000
CODE_ANNEAL_LANGUAGES = 15


def anneal_plan(
    dataset_under_test: SourceSpec,
    base_mixture: StagePlan,
    kind: str,
    *,
    languages: Sequence[SourceSpec] | None = None,
) -> StagePlan:
    """Annealing-ablation mixture for evaluating one dataset.

    math: 100B-token budget, 60% on the dataset under test and 40% on the
    base mixture (modeled as a single aggregate entry named after it).
    code: 200B tokens split uniformly over exactly 15 per-language sources.
    """
    if kind == "math":
        return StagePlan(
            name=f"anneal-math-{dataset_under_test.name}",
            token_budget=MATH_ANNEAL_BUDGET,
            weights={
                dataset_under_test.name: Fraction(3, 5),
                base_mixture.name: Fraction(2, 5),
            },
            notes=f"60B on {dataset_under_test.name}, 40B from {base_mixture.name}",
        )
    if kind == "code":
        if languages is None or len(languages) != CODE_ANNEAL_LANGUAGES:
            raise ConfigError(
                f"code annealing needs exactly {CODE_ANNEAL_LANGUAGES} language sources"
            )
        share = Fraction(1, CODE_ANNEAL_LANGUAGES)
        return StagePlan(
            name=f"anneal-code-{dataset_under_test.name}",
            token_budget=CODE_ANNEAL_BUDGET,
            weights={spec.name: share for spec in languages},
            notes="200B tokens uniform over 15 languages (~13.33B each)",
        )
    raise ConfigError(f"anneal kind must be 'math' or 'code', got {kind!r}")


# ---------------------------------------------------------------------------
# Plan config files
# ---------------------------------------------------------------------------


@dataclass
class PlanFile:
    sources: dict[str, SourceSpec]
    stages: list[StagePlan]
    schedules: dict[str, WsdConfig | CosineConfig] = field(default_factory=dict)


def _parse_schedule(name: str, row: Mapping) -> WsdConfig | CosineConfig:
    kind = row.get("type", "wsd")
    if kind == "wsd":
        return WsdConfig(
            warmup_steps=int(row.get("warmup_steps", 2000)),
            peak_lr=float(row["peak_lr"]),
            total_steps=int(row["total_steps"]),
            decay_fraction=float(row.get("decay_fraction", 0.10)),
        )
    if kind == "cosine":
        return CosineConfig(
            warmup_steps=int(row.get("warmup_steps", 0)),
            peak_lr=float(row["peak_lr"]),
            total_steps=int(row["total_steps"]),
            final_lr=float(row.get("final_lr", 0.0)),
        )
    raise ConfigError(f"schedule {name!r}: unknown type {kind!r}")


def load_plan_file(path) -> PlanFile:
    """Declarative plan config: sources (name, tokens, category), stages, and
    optional learning-rate schedules.

    Budgets and token counts accept T/B/M/k suffixes; weights may be numbers
    or exact strings like "0.58" or "3/5".
    """
    with open(path, "r", encoding="utf-8") as handle:
        try:
            payload = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid plan file: {exc}") from exc
    if not isinstance(payload, dict):
        raise ParseError("plan file must be a JSON object")
    sources: dict[str, SourceSpec] = {}
    for row in payload.get("sources", []):
        spec = SourceSpec(
            name=str(row["name"]),
            available_tokens=parse_token_count(row["tokens"]),
            category=row.get("category", "other"),
        )
        sources[spec.name] = spec
    stages = []
    for row in payload.get("stages", []):
        stages.append(
            StagePlan(
                name=str(row["name"]),
                token_budget=parse_token_count(row["budget"]),
                weights={str(k): as_weight(v) for k, v in row.get("weights", {}).items()},
                notes=str(row.get("notes", "")),
            )
        )
    schedules = {
        str(name): _parse_schedule(str(name), row)
        for name, row in payload.get("schedules", {}).items()
    }
    return PlanFile(sources=sources, stages=stages, schedules=schedules)
