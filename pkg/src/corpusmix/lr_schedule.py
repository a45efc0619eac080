"""Learning-rate schedules: warmup-stable-decay for long runs, cosine for
ablations. Pure functions of (step, config) so a training loop can query any
step; the stable phase never depends on the eventual total, which is what lets
a run extend without committing to a duration up front.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

from .errors import ConfigError, InputError

Phase = Literal["warmup", "stable", "decay"]

# AdamW betas recorded alongside the presets for provenance; the schedules
# themselves do not use them.
ADAMW_BETAS = (0.9, 0.95)


def _round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


@dataclass(frozen=True)
class WsdConfig:
    warmup_steps: int
    peak_lr: float
    total_steps: int
    decay_fraction: float

    def __post_init__(self):
        if self.warmup_steps < 1:
            raise ConfigError("warmup_steps must be >= 1")
        if self.peak_lr <= 0:
            raise ConfigError("peak_lr must be positive")
        if self.total_steps < 1:
            raise ConfigError("total_steps must be >= 1")
        if not 0.0 < self.decay_fraction < 1.0:
            raise ConfigError("decay_fraction must lie in (0, 1)")
        if self.decay_steps < 1:
            raise ConfigError("decay_fraction rounds to zero decay steps")
        if self.warmup_steps + self.decay_steps > self.total_steps:
            raise ConfigError("warmup plus decay exceeds total_steps")

    @property
    def decay_steps(self) -> int:
        return _round_half_up(self.decay_fraction * self.total_steps)

    @property
    def decay_start(self) -> int:
        return self.total_steps - self.decay_steps


def _check_step(step: int, total_steps: int) -> None:
    if not 0 <= step <= total_steps:
        raise InputError(f"step {step} outside [0, {total_steps}]")


def wsd_lr(step: int, cfg: WsdConfig) -> float:
    """Linear ramp to peak, constant plateau, linear decay to zero."""
    _check_step(step, cfg.total_steps)
    if step < cfg.warmup_steps:
        return cfg.peak_lr * (step / cfg.warmup_steps)
    if step < cfg.decay_start:
        return cfg.peak_lr
    return cfg.peak_lr * ((cfg.total_steps - step) / cfg.decay_steps)


def wsd_phase(step: int, cfg: WsdConfig) -> Phase:
    """Phase of a step; boundary steps belong to the later phase."""
    _check_step(step, cfg.total_steps)
    if step < cfg.warmup_steps:
        return "warmup"
    if step < cfg.decay_start:
        return "stable"
    return "decay"


@dataclass(frozen=True)
class CosineConfig:
    warmup_steps: int
    peak_lr: float
    total_steps: int
    final_lr: float = 0.0

    def __post_init__(self):
        if self.warmup_steps < 0:
            raise ConfigError("warmup_steps must be >= 0")
        if self.peak_lr <= 0:
            raise ConfigError("peak_lr must be positive")
        if self.total_steps < 1 or self.warmup_steps > self.total_steps:
            raise ConfigError("need 0 <= warmup_steps <= total_steps, total_steps >= 1")
        if not 0.0 <= self.final_lr <= self.peak_lr:
            raise ConfigError("final_lr must lie in [0, peak_lr]")


def cosine_lr(step: int, cfg: CosineConfig) -> float:
    """Linear warmup then a half cosine from peak to final_lr."""
    _check_step(step, cfg.total_steps)
    if cfg.warmup_steps > 0 and step < cfg.warmup_steps:
        return cfg.peak_lr * (step / cfg.warmup_steps)
    span = cfg.total_steps - cfg.warmup_steps
    if span == 0:
        return cfg.final_lr
    progress = (step - cfg.warmup_steps) / span
    return cfg.final_lr + (cfg.peak_lr - cfg.final_lr) * 0.5 * (1.0 + math.cos(math.pi * progress))


def small_model_presets() -> dict[str, WsdConfig]:
    """WSD presets: the 1.7B recipe and the shared 135M/360M recipe.

    total_steps values assume the ~2M-token global batch (11T and 4T token
    runs respectively); warmup for the small models mirrors the 1.7B setting.
    """
    return {
        "1.7b": WsdConfig(
            warmup_steps=2_000, peak_lr=5.0e-4, total_steps=5_500_000, decay_fraction=0.10
        ),
        "135m-360m": WsdConfig(
            warmup_steps=2_000, peak_lr=3.0e-3, total_steps=2_000_000, decay_fraction=0.20
        ),
    }


def ablation_cosine_preset() -> CosineConfig:
    """Cosine schedule used for the 350B-token dataset ablation runs."""
    return CosineConfig(warmup_steps=2_000, peak_lr=3.0e-4, total_steps=175_000, final_lr=0.0)
