"""Per-resource latent topic distributions via collapsed Gibbs LDA over tag documents."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numba
import numpy as np

from .core import Folksonomy

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LdaConfig:
    num_topics: int = 1000
    alpha: float | None = None  # None -> 50 / num_topics
    eta: float = 0.01
    iterations: int = 500
    seed: int = 0

    def __post_init__(self):
        if self.num_topics < 1:
            raise ValueError("num_topics must be >= 1")
        if self.alpha is None:
            object.__setattr__(self, "alpha", 50.0 / self.num_topics)
        if self.alpha <= 0 or self.eta <= 0:
            raise ValueError("alpha and eta must be positive")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")


@dataclass
class TopicModel:
    """Trained topic model.

    ``doc_topic[i]`` is the smoothed topic distribution of ``resources[i]``.
    ``topic_tag_counts`` (Z x V) and ``vocab`` are kept for diagnostics.
    """

    config: LdaConfig
    resources: list[str]
    doc_topic: np.ndarray
    vocab: list[str] = field(default_factory=list)
    topic_tag_counts: np.ndarray | None = None

    def __post_init__(self):
        self._row = {r: i for i, r in enumerate(self.resources)}

    @property
    def num_topics(self) -> int:
        return self.config.num_topics

    def __contains__(self, resource: str) -> bool:
        return resource in self._row

    @property
    def resource_topics(self) -> dict[str, np.ndarray]:
        return {r: self.doc_topic[i] for r, i in self._row.items()}

    def row(self, resource: str) -> int | None:
        return self._row.get(resource)


def build_documents(train: Folksonomy) -> dict[str, list[str]]:
    """Tag multiset of every resource, in post order then tag-label order."""
    docs: dict[str, list[str]] = {}
    for r, plist in enumerate(train.resource_posts):
        words = [train.tags.label(j) for p in plist for j in train.post_tags[p]]
        if words:
            docs[train.resources.label(r)] = words
    return docs


@numba.njit(cache=True)
def _gibbs_sweep(doc_ids, word_ids, z, n_dk, n_kw, n_k, uniforms, alpha, eta, v_eta):
    num_topics = n_k.shape[0]
    p = np.empty(num_topics)
    for i in range(doc_ids.shape[0]):
        d = doc_ids[i]
        w = word_ids[i]
        k = z[i]
        n_dk[d, k] -= 1
        n_kw[k, w] -= 1
        n_k[k] -= 1
        total = 0.0
        for t in range(num_topics):
            total += (n_dk[d, t] + alpha) * (n_kw[t, w] + eta) / (n_k[t] + v_eta)
            p[t] = total
        target = uniforms[i] * total
        k = num_topics - 1
        for t in range(num_topics):
            if p[t] > target:
                k = t
                break
        z[i] = k
        n_dk[d, k] += 1
        n_kw[k, w] += 1
        n_k[k] += 1


def _check_counts(doc_ids, word_ids, z, n_dk, n_kw, n_k):
    assert (n_dk.sum(axis=1) == np.bincount(doc_ids, minlength=n_dk.shape[0])).all()
    assert (n_kw.sum(axis=1) == n_k).all()
    assert (n_k == np.bincount(z, minlength=n_k.shape[0])).all()


def train_lda(docs: dict[str, list[str]], cfg: LdaConfig, check: bool = False) -> TopicModel:
    """Fit LDA by collapsed Gibbs sampling; deterministic given ``(docs, cfg)``.

    Documents are processed in sorted resource order so the result does not
    depend on dict ordering. ``check`` verifies count bookkeeping after every sweep.
    """
    resources = sorted(r for r, words in docs.items() if words)
    if not resources:
        raise ValueError("no documents")
    vocab = sorted({w for r in resources for w in docs[r]})
    widx = {w: i for i, w in enumerate(vocab)}

    lengths = np.array([len(docs[r]) for r in resources], dtype=np.int64)
    doc_ids = np.repeat(np.arange(len(resources), dtype=np.int64), lengths)
    word_ids = np.fromiter((widx[w] for r in resources for w in docs[r]), dtype=np.int64, count=int(lengths.sum()))

    Z, V, D = cfg.num_topics, len(vocab), len(resources)
    rng = np.random.default_rng(cfg.seed)
    z = rng.integers(0, Z, size=doc_ids.shape[0]).astype(np.int64)
    n_dk = np.zeros((D, Z), dtype=np.int64)
    n_kw = np.zeros((Z, V), dtype=np.int64)
    np.add.at(n_dk, (doc_ids, z), 1)
    np.add.at(n_kw, (z, word_ids), 1)
    n_k = n_kw.sum(axis=1)

    log.info("LDA: %d docs, %d tokens, vocab %d, Z=%d, %d sweeps", D, len(z), V, Z, cfg.iterations)
    for _ in range(cfg.iterations):
        uniforms = rng.random(doc_ids.shape[0])
        _gibbs_sweep(doc_ids, word_ids, z, n_dk, n_kw, n_k, uniforms, cfg.alpha, cfg.eta, V * cfg.eta)
        if check:
            _check_counts(doc_ids, word_ids, z, n_dk, n_kw, n_k)

    doc_topic = (n_dk + cfg.alpha) / (lengths[:, None] + Z * cfg.alpha)
    return TopicModel(cfg, resources, doc_topic, vocab, n_kw)


def topic_vector(model: TopicModel, resource: str) -> np.ndarray:
    """Topic distribution of ``resource``; uniform for resources unseen in training."""
    i = model.row(resource)
    if i is None:
        return np.full(model.num_topics, 1.0 / model.num_topics)
    return model.doc_topic[i]


def save_model(model: TopicModel, path: str | Path) -> None:
    """Write ``resource<TAB>w1,...,wZ`` rows after ``# key=value`` config header lines."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for key, value in asdict(model.config).items():
            fh.write(f"# {key}={value!r}\n")
        for r, row in zip(model.resources, model.doc_topic):
            fh.write(r + "\t" + ",".join(repr(float(x)) for x in row) + "\n")


def load_model(path: str | Path) -> TopicModel:
    header: dict[str, object] = {}
    resources, rows = [], []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("# "):
                key, _, value = line[2:].rstrip("\n").partition("=")
                header[key] = float(value) if key in ("alpha", "eta") else int(value)
                continue
            r, _, weights = line.rstrip("\n").partition("\t")
            resources.append(r)
            rows.append([float(x) for x in weights.split(",")])
    cfg = LdaConfig(**header)
    doc_topic = np.array(rows, dtype=np.float64).reshape(len(rows), cfg.num_topics)
    return TopicModel(cfg, resources, doc_topic)
