"""Ranking metrics for one recommendation list against a set of relevant tags.

``rec`` is a ranked sequence of tag labels (best first); ``rel`` is the set of
tags the user actually assigned.
"""

from __future__ import annotations

import math
from typing import Collection, Sequence


def hits_at_k(rec: Sequence[str], rel: Collection[str], k: int) -> int:
    return sum(1 for t in rec[:k] if t in rel)


def precision_at_k(rec: Sequence[str], rel: Collection[str], k: int, strict: bool = False) -> float:
    """Hits in the top ``k`` divided by ``min(k, len(rec))``, or by ``k`` when ``strict``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not rec:
        return 0.0
    denom = k if strict else min(k, len(rec))
    return hits_at_k(rec, rel, k) / denom


def recall_at_k(rec: Sequence[str], rel: Collection[str], k: int) -> float:
    if not rel:
        return 0.0
    return hits_at_k(rec, rel, k) / len(rel)


def f1_at_k(rec: Sequence[str], rel: Collection[str], k: int, strict: bool = False) -> float:
    p = precision_at_k(rec, rel, k, strict)
    r = recall_at_k(rec, rel, k)
    return 0.0 if p + r == 0 else 2 * p * r / (p + r)


def mrr(rec: Sequence[str], rel: Collection[str]) -> float:
    for rank, t in enumerate(rec, 1):
        if t in rel:
            return 1.0 / rank
    return 0.0


def map_metric(rec: Sequence[str], rel: Collection[str]) -> float:
    """Average precision; relevant tags never recommended count as zero."""
    if not rel:
        return 0.0
    hits, total = 0, 0.0
    for rank, t in enumerate(rec, 1):
        if t in rel:
            hits += 1
            total += hits / rank
    return total / len(rel)


def ndcg_at_k(rec: Sequence[str], rel: Collection[str], k: int) -> float:
    """Binary-gain nDCG with ``log2(rank + 1)`` discount."""
    if not rel:
        return 0.0
    dcg = sum(1.0 / math.log2(rank + 1) for rank, t in enumerate(rec[:k], 1) if t in rel)
    ideal = sum(1.0 / math.log2(rank + 1) for rank in range(1, min(len(rel), k) + 1))
    return dcg / ideal
