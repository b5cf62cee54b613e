"""Cognition-inspired tag recommenders: 3L, 3LT and 3LT+MPr.

A user's past posts form a memory of (topic vector, tag set) pairs. The
target resource's topic vector cues every post with its cubed cosine
similarity, activations spread to the post's tags (3L), tags are reweighted
by a power-law recency term (3LT), and the result is mixed with the
resource's popular tags (3LT+MPr).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Folksonomy
from .ranking import Ranked, mix_rank, top_k
from .topics import TopicModel, topic_vector


class ColdUserError(ValueError):
    def __init__(self, user: str):
        super().__init__(f"cold user: {user!r} has no training posts")
        self.user = user


@dataclass(frozen=True)
class MixParams:
    beta: float = 0.5
    k: int = 10

    def __post_init__(self):
        if not 0 <= self.beta <= 1:
            raise ValueError(f"beta must be in [0, 1], got {self.beta}")
        if self.k < 1:
            raise ValueError("k must be >= 1")


@dataclass(frozen=True)
class RecencyTable:
    user: str
    t_ref: int
    last_use: dict[str, int]
    decay: float = 0.5

    def __post_init__(self):
        if self.decay <= 0:
            raise ValueError("decay must be positive")


@dataclass(frozen=True)
class ScoredTags:
    scores: dict[str, float]
    provenance: str

    def __post_init__(self):
        bad = [j for j, s in self.scores.items() if not math.isfinite(s)]
        if bad:
            raise ValueError(f"non-finite scores for tags {bad[:5]}")

    def ranked(self, k: int = 10) -> Ranked:
        return top_k(self.scores, k)


@dataclass(frozen=True)
class UserMemory:
    """Semantic (posts x topics) and lexical (posts x user tags) matrices of one user.

    Rows are the user's training posts in chronological order; lexical columns
    follow ``tags``.
    """

    user: str
    semantic: np.ndarray
    lexical: np.ndarray
    timestamps: np.ndarray
    tags: list[str]

    def recency(self, decay: float = 0.5) -> RecencyTable:
        last_use = {}
        for col, tag in enumerate(self.tags):
            rows = np.flatnonzero(self.lexical[:, col])
            last_use[tag] = int(self.timestamps[rows].max())
        return RecencyTable(self.user, int(self.timestamps.max()), last_use, decay)


def build_user_memory(user: str, train: Folksonomy, model: TopicModel) -> UserMemory:
    u = train.user_index(user)
    if u is None or not train.user_posts[u]:
        raise ColdUserError(user)
    plist = train.user_posts[u]
    tag_ids = sorted({j for p in plist for j in train.post_tags[p]})
    col = {j: c for c, j in enumerate(tag_ids)}

    semantic = np.vstack([topic_vector(model, train.resources.label(int(train.post_resource[p]))) for p in plist])
    lexical = np.zeros((len(plist), len(tag_ids)))
    for i, p in enumerate(plist):
        lexical[i, [col[j] for j in train.post_tags[p]]] = 1.0
    return UserMemory(
        user=user,
        semantic=semantic,
        lexical=lexical,
        timestamps=train.post_time[plist].copy(),
        tags=[train.tags.label(j) for j in tag_ids],
    )


def activate(cue: np.ndarray, memory: UserMemory) -> np.ndarray:
    """Cubed cosine similarity between ``cue`` and every semantic row (0 for zero norms)."""
    cue = np.asarray(cue, dtype=np.float64)
    if cue.ndim != 1 or cue.shape[0] != memory.semantic.shape[1]:
        raise ValueError(f"cue has shape {cue.shape}, memory expects ({memory.semantic.shape[1]},)")
    norms = np.linalg.norm(memory.semantic, axis=1) * np.linalg.norm(cue)
    dots = memory.semantic @ cue
    sim = np.divide(dots, norms, out=np.zeros_like(dots), where=norms > 0)
    return sim**3


def bll_weight(rt: RecencyTable, tag: str) -> float:
    """``ln(dt ** -d)`` with ``dt = max(t_ref - t_last, 1)`` seconds."""
    try:
        t = rt.last_use[tag]
    except KeyError:
        raise KeyError(f"tag never used by user: {tag!r}") from None
    return -rt.decay * math.log(max(rt.t_ref - t, 1))


def recency_weights(rt: RecencyTable) -> dict[str, float]:
    """Softmax of base-level activations over the user's tags, i.e. ``dt**-d`` normalized."""
    tags = list(rt.last_use)
    b = np.array([bll_weight(rt, j) for j in tags])
    e = np.exp(b - b.max())
    e /= e.sum()
    return dict(zip(tags, e.tolist()))


def _spread(memory: UserMemory, cue: np.ndarray) -> np.ndarray:
    return activate(cue, memory) @ memory.lexical


def score_3l(user: str, resource: str, train: Folksonomy, model: TopicModel) -> ScoredTags:
    memory = build_user_memory(user, train, model)
    o = _spread(memory, topic_vector(model, resource))
    return ScoredTags(dict(zip(memory.tags, o.tolist())), "3L")


def score_3lt(user: str, resource: str, train: Folksonomy, model: TopicModel, decay: float = 0.5) -> ScoredTags:
    memory = build_user_memory(user, train, model)
    o = _spread(memory, topic_vector(model, resource))
    nbll = recency_weights(memory.recency(decay))
    return ScoredTags({j: nbll[j] * float(x) for j, x in zip(memory.tags, o)}, "3LT")


def resource_counts(train: Folksonomy, resource: str) -> dict[str, int]:
    r = train.resource_index(resource)
    if r is None:
        return {}
    return {train.tags.label(j): c for j, c in train.resource_tag_counts[r].items()}


def recommend_3lt_mpr(
    user: str,
    resource: str,
    train: Folksonomy,
    model: TopicModel,
    params: MixParams = MixParams(),
    decay: float = 0.5,
) -> Ranked:
    """Top-k tags by ``beta * ||3LT|| + (1 - beta) * ||MPr||``.

    A cold user contributes a zero 3LT component, leaving pure MPr behavior.
    """
    try:
        user_part = score_3lt(user, resource, train, model, decay).scores
    except ColdUserError:
        user_part = {}
    return mix_rank(user_part, resource_counts(train, resource), params.beta, params.k)
