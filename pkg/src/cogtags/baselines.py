"""Reference tag recommenders: popularity family, user-based CF, FolkRank, GIRPTM-style and BLL+C."""

from __future__ import annotations

import math
import weakref
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
import scipy.sparse as sp

from .cognitive import MixParams, RecencyTable, recency_weights, resource_counts
from .core import EntityId, Folksonomy
from .ranking import Ranked, mix_rank, top_k


def _labelled(train: Folksonomy, counts: Mapping[int, float]) -> dict[str, float]:
    return {train.tags.label(j): c for j, c in counts.items()}


def user_counts(train: Folksonomy, user: str) -> dict[str, int]:
    u = train.user_index(user)
    return {} if u is None else _labelled(train, train.user_tag_counts[u])


def mp(train: Folksonomy, k: int = 10) -> Ranked:
    counts = {train.tags.label(j): int(c) for j, c in enumerate(train.global_tag_counts)}
    return top_k(counts, k)


def mp_u(train: Folksonomy, user: str, k: int = 10) -> Ranked:
    return top_k(user_counts(train, user), k)


def mp_r(train: Folksonomy, resource: str, k: int = 10) -> Ranked:
    return top_k(resource_counts(train, resource), k)


def mp_u_r(train: Folksonomy, user: str, resource: str, params: MixParams = MixParams()) -> Ranked:
    return mix_rank(user_counts(train, user), resource_counts(train, resource), params.beta, params.k)


# -- collaborative filtering -------------------------------------------------


@dataclass(frozen=True)
class CfConfig:
    neighborhood_size: int = 20

    def __post_init__(self):
        if self.neighborhood_size < 1:
            raise ValueError("neighborhood_size must be >= 1")


_cache: weakref.WeakKeyDictionary = weakref.WeakKeyDictionary()


def _cached(train: Folksonomy, key, build):
    slot = _cache.setdefault(train, {})
    if key not in slot:
        slot[key] = build()
    return slot[key]


def _user_tag_matrix(train: Folksonomy) -> tuple[sp.csr_matrix, np.ndarray]:
    def build():
        rows, cols, vals = [], [], []
        for u, counts in enumerate(train.user_tag_counts):
            rows.extend([u] * len(counts))
            cols.extend(counts.keys())
            vals.extend(counts.values())
        X = sp.csr_matrix((np.array(vals, dtype=np.float64), (rows, cols)), shape=(len(train.users), len(train.tags)))
        return X, np.sqrt(X.multiply(X).sum(axis=1)).A1

    return _cached(train, "user_tag", build)


def user_similarities(train: Folksonomy, u: int) -> np.ndarray:
    """Cosine similarity of user ``u``'s tag-count vector to every user's."""
    X, norms = _user_tag_matrix(train)
    dots = (X @ X[u].T).toarray().ravel()
    denom = norms * norms[u]
    return np.divide(dots, denom, out=np.zeros_like(dots), where=denom > 0)


def neighbors(train: Folksonomy, u: int, size: int) -> list[tuple[int, float]]:
    sims = user_similarities(train, u)
    order = np.argsort(-sims, kind="stable")
    return [(int(v), float(sims[v])) for v in order if v != u][:size]


def cf_user(train: Folksonomy, user: str, resource: str, cfg: CfConfig = CfConfig(), k: int = 10) -> Ranked:
    """User-based CF: neighbors' tags on ``resource``, else their whole profiles."""
    u = train.user_index(user)
    if u is None:
        return []
    hood = neighbors(train, u, cfg.neighborhood_size)
    r = train.resource_index(resource)
    scores: dict[int, float] = {}
    if r is not None:
        for v, sim in hood:
            p = train.pair_post.get((v, r))
            if p is not None:
                for j in train.post_tags[p]:
                    scores[j] = scores.get(j, 0.0) + sim
    if not scores:
        for v, sim in hood:
            for j, c in train.user_tag_counts[v].items():
                scores[j] = scores.get(j, 0.0) + sim * c
    return top_k(_labelled(train, scores), k)


# -- adapted PageRank / FolkRank ---------------------------------------------


@dataclass
class FolkGraph:
    """Undirected user/resource/tag co-occurrence graph with column-stochastic transitions.

    Node order: users, then resources, then tags.
    """

    n_users: int
    n_resources: int
    tag_labels: list[str]
    transition: sp.csr_matrix
    dangling: np.ndarray

    @property
    def size(self) -> int:
        return self.n_users + self.n_resources + len(self.tag_labels)

    @property
    def tag_offset(self) -> int:
        return self.n_users + self.n_resources

    def node(self, entity: EntityId) -> int:
        offset = {"user": 0, "resource": self.n_users, "tag": self.tag_offset}[entity.kind]
        return offset + entity.index


def folk_graph(train: Folksonomy) -> FolkGraph:
    def build():
        U, R = len(train.users), len(train.resources)
        N = U + R + len(train.tags)
        rows, cols = [], []
        for p, tags in enumerate(train.post_tags):
            u, r = int(train.post_user[p]), U + int(train.post_resource[p])
            rows.append(u)
            cols.append(r)
            for j in tags:
                t = U + R + j
                rows += [u, r]
                cols += [t, t]
        # symmetrize; duplicate entries sum into co-occurrence weights
        A = sp.coo_matrix((np.ones(2 * len(rows)), (rows + cols, cols + rows)), shape=(N, N)).tocsc()
        deg = np.asarray(A.sum(axis=0)).ravel()
        inv = np.divide(1.0, deg, out=np.zeros_like(deg), where=deg > 0)
        return FolkGraph(U, R, train.tags.labels, (A @ sp.diags(inv)).tocsr(), deg == 0)

    return _cached(train, "graph", build)


@dataclass
class GraphWeights:
    weights: np.ndarray
    iterations: int
    residual: float
    converged: bool
    graph: FolkGraph = field(repr=False)
    mass_trace: list[float] = field(default_factory=list, repr=False)

    def tag_weights(self) -> dict[str, float]:
        t0 = self.graph.tag_offset
        return {label: float(self.weights[t0 + j]) for j, label in enumerate(self.graph.tag_labels)}


def _preference_vector(graph: FolkGraph, preference) -> np.ndarray:
    if preference is None:
        p = np.ones(graph.size)
    elif isinstance(preference, np.ndarray):
        p = preference.astype(np.float64, copy=True)
    else:
        p = np.zeros(graph.size)
        for entity, mass in preference.items():
            p[graph.node(entity)] += mass
    if p.shape != (graph.size,) or (p < 0).any() or p.sum() <= 0:
        raise ValueError("preference must be non-negative with positive mass over all graph nodes")
    return p / p.sum()


def adapted_pagerank(
    train: Folksonomy,
    preference: Mapping[EntityId, float] | np.ndarray | None = None,
    damping: float = 0.7,
    tol: float = 1e-8,
    max_iter: int = 200,
) -> GraphWeights:
    """Power iteration ``w <- d * M w + (1 - d) * p`` on the folksonomy graph.

    Stops when the L1 change drops below ``tol`` or after ``max_iter`` sweeps;
    a non-converged result is returned with its residual.
    """
    if not 0 < damping < 1:
        raise ValueError("damping must be in (0, 1)")
    graph = folk_graph(train)
    p = _preference_vector(graph, preference)
    w = np.full(graph.size, 1.0 / graph.size)
    trace = [float(w.sum())]
    residual = math.inf
    it = 0
    while it < max_iter:
        it += 1
        new = damping * (graph.transition @ w + w[graph.dangling].sum() * p) + (1 - damping) * p
        residual = float(np.abs(new - w).sum())
        w = new
        trace.append(float(w.sum()))
        if residual < tol:
            break
    return GraphWeights(w, it, residual, residual < tol, graph, trace)


def folkrank(
    train: Folksonomy,
    user: str,
    resource: str,
    k: int = 10,
    damping: float = 0.7,
    tol: float = 1e-8,
    max_iter: int = 200,
) -> Ranked:
    """Tags ranked by the FolkRank differential between boosted and uniform preferences."""
    graph = folk_graph(train)
    base = _cached(train, ("apr0", damping, tol, max_iter), lambda: adapted_pagerank(train, None, damping, tol, max_iter))
    pref = np.ones(graph.size)
    u, r = train.user_index(user), train.resource_index(resource)
    if u is None and r is None:
        return []
    if u is not None:
        pref[u] += graph.n_users
    if r is not None:
        pref[graph.n_users + r] += graph.n_resources
    boosted = adapted_pagerank(train, pref, damping, tol, max_iter)
    t0 = graph.tag_offset
    diff = boosted.weights[t0:] - base.weights[t0:]
    return top_k(dict(zip(train.tags.labels, diff.tolist())), k)


# -- time-aware popularity mixes ---------------------------------------------


def exponential_recency(train: Folksonomy, user: str, mu: float) -> dict[str, float]:
    u = train.user_index(user)
    if u is None:
        return {}
    t_ref = int(train.post_time[train.user_posts[u]].max())
    g: dict[int, float] = {}
    for p in train.user_posts[u]:
        w = math.exp(-mu * (t_ref - int(train.post_time[p])))
        for j in train.post_tags[p]:
            g[j] = g.get(j, 0.0) + w
    return _labelled(train, g)


def girptm(train: Folksonomy, user: str, resource: str, params: MixParams = MixParams(), mu: float = 1e-6) -> Ranked:
    """GIRPTM-style: exponentially time-decayed user tag frequency mixed with MPr."""
    if mu < 0:
        raise ValueError("mu must be non-negative")
    return mix_rank(exponential_recency(train, user, mu), resource_counts(train, resource), params.beta, params.k)


def recency_table(train: Folksonomy, user: str, decay: float = 0.5) -> RecencyTable | None:
    u = train.user_index(user)
    if u is None:
        return None
    t_ref, last = train.user_tag_times(u)
    return RecencyTable(user, t_ref, _labelled(train, last), decay)


def bll_c(train: Folksonomy, user: str, resource: str, params: MixParams = MixParams(), d: float = 0.5) -> Ranked:
    """Power-law recency of the user's tags (softmaxed base-level activation) mixed with MPr."""
    rt = recency_table(train, user, d)
    user_part = recency_weights(rt) if rt is not None else {}
    return mix_rank(user_part, resource_counts(train, resource), params.beta, params.k)
