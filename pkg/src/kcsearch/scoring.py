"""Jumping factor and k-completeness.

High k-completeness marks overcomplete candidates (wide first layer, slow
shrinkage); low values mark undercomplete ones.
"""

from __future__ import annotations

from dataclasses import dataclass

DEFAULT_ALPHA = 0.5


@dataclass(frozen=True)
class ScoreParams:
    input_dim: int
    alpha: float = DEFAULT_ALPHA

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if self.input_dim < 1:
            raise ValueError(f"input_dim must be >= 1, got {self.input_dim}")


def jumping_factor(ihls: int, input_dim: int) -> float:
    if input_dim < 1:
        raise ValueError(f"input_dim must be >= 1, got {input_dim}")
    return ihls / input_dim


def k_completeness(ihls: int, df: int, params: ScoreParams) -> float:
    """``alpha * ihls/input_dim + (1 - alpha) / df``."""
    if df < 1:
        raise ValueError(f"df must be >= 1, got {df}")
    jf = jumping_factor(ihls, params.input_dim)
    return params.alpha * jf + (1.0 - params.alpha) / df


def rounded(score: float) -> float:
    # 4 decimals, as reported in result tables
    return round(score, 4)
