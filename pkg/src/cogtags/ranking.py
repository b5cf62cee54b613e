"""Normalization, linear mixing and deterministic top-k used by every mixed recommender."""

from __future__ import annotations

import math
from typing import Mapping

Ranked = list[tuple[str, float]]

# Scores are rounded to this many significant digits before comparison so that
# float noise from normalization cannot reorder exact ties. Relative rounding
# keeps tiny but genuinely distinct scores apart.
_TIE_DIGITS = 12


def _tie_key(score: float) -> float:
    return float(f"{score:.{_TIE_DIGITS}g}")


def sum_normalize(values: Mapping[str, float]) -> dict[str, float]:
    total = math.fsum(values.values())
    if total <= 0:
        return {j: 0.0 for j in values}
    return {j: v / total for j, v in values.items()}


def top_k(scores: Mapping[str, float], k: int, tiebreak: Mapping[str, float] | None = None) -> Ranked:
    """Rank positive scores descending; ties by ``tiebreak`` descending, then label ascending."""
    if k < 1:
        raise ValueError("k must be >= 1")
    tiebreak = tiebreak or {}
    items = [(j, s) for j, s in scores.items() if s > 0 and math.isfinite(s)]
    items.sort(key=lambda js: (-_tie_key(js[1]), -tiebreak.get(js[0], 0), js[0]))
    return items[:k]


def mix(user_part: Mapping[str, float], resource_counts: Mapping[str, float], beta: float) -> dict[str, float]:
    """``beta * ||user|| + (1 - beta) * ||resource||`` over the union of both key sets."""
    if not 0 <= beta <= 1:
        raise ValueError(f"beta must be in [0, 1], got {beta}")
    nu = sum_normalize(user_part)
    nr = sum_normalize(resource_counts)
    return {j: beta * nu.get(j, 0.0) + (1 - beta) * nr.get(j, 0.0) for j in nu.keys() | nr.keys()}


def mix_rank(user_part: Mapping[str, float], resource_counts: Mapping[str, float], beta: float, k: int) -> Ranked:
    return top_k(mix(user_part, resource_counts, beta), k, tiebreak=resource_counts)
