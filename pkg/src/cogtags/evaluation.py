"""Benchmark driver: top-10 recommendations per evaluation user, metrics for k = 1..10."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from . import baselines, cognitive, metrics
from .core import Folksonomy
from .ingest import SplitResult
from .ranking import Ranked
from .topics import TopicModel

log = logging.getLogger(__name__)

MAX_K = 10

ALGORITHMS = ("mp", "mp_u", "mp_r", "mp_u_r", "cf", "folkrank", "girptm", "bll_c", "3l", "3lt", "3lt_mpr")
NEEDS_TOPICS = frozenset({"3l", "3lt", "3lt_mpr"})

Recommender = Callable[[str, str], Ranked]


@dataclass(frozen=True)
class BenchmarkParams:
    beta: float = 0.5
    decay: float = 0.5
    cf_neighbors: int = 20
    girptm_mu: float = 1e-6
    damping: float = 0.7
    tol: float = 1e-8
    max_iter: int = 200
    strict_precision: bool = False


def make_recommender(name: str, train: Folksonomy, model: TopicModel | None, params: BenchmarkParams) -> Recommender:
    """Bind algorithm ``name`` to the training folksonomy; the result sees only (user, resource)."""
    k = MAX_K
    mix = cognitive.MixParams(params.beta, k)
    if name in NEEDS_TOPICS and model is None:
        raise ValueError("topic model required")
    if name == "mp":
        top = baselines.mp(train, k)
        return lambda u, r: top
    if name == "mp_u":
        return lambda u, r: baselines.mp_u(train, u, k)
    if name == "mp_r":
        return lambda u, r: baselines.mp_r(train, r, k)
    if name == "mp_u_r":
        return lambda u, r: baselines.mp_u_r(train, u, r, mix)
    if name == "cf":
        cfg = baselines.CfConfig(params.cf_neighbors)
        return lambda u, r: baselines.cf_user(train, u, r, cfg, k)
    if name == "folkrank":
        return lambda u, r: baselines.folkrank(train, u, r, k, params.damping, params.tol, params.max_iter)
    if name == "girptm":
        return lambda u, r: baselines.girptm(train, u, r, mix, params.girptm_mu)
    if name == "bll_c":
        return lambda u, r: baselines.bll_c(train, u, r, mix, params.decay)
    if name == "3l":
        return lambda u, r: cognitive.score_3l(u, r, train, model).ranked(k)
    if name == "3lt":
        return lambda u, r: cognitive.score_3lt(u, r, train, model, params.decay).ranked(k)
    if name == "3lt_mpr":
        return lambda u, r: cognitive.recommend_3lt_mpr(u, r, train, model, mix, params.decay)
    raise ValueError(f"unknown algorithm {name!r}; choose from {', '.join(ALGORITHMS)}")


@dataclass
class QueryResult:
    user: str
    resource: str
    recommended: list[str]
    relevant: frozenset[str]
    failed: bool = False


@dataclass
class EvalReport:
    algorithm: str
    precision: np.ndarray  # index k-1
    recall: np.ndarray
    f1_5: float
    mrr: float
    map: float
    ndcg_10: float
    user_count: int
    failures: int = 0
    queries: list[QueryResult] = field(default_factory=list, repr=False)

    def scalar_metrics(self) -> dict[str, float]:
        return {"F1@5": self.f1_5, "MRR": self.mrr, "MAP": self.map, "nDCG@10": self.ndcg_10}


def score_queries(name: str, queries: Sequence[QueryResult], strict: bool = False) -> EvalReport:
    n = len(queries)
    prec = np.zeros((n, MAX_K))
    rec = np.zeros((n, MAX_K))
    f1, rr, ap, ndcg = (np.zeros(n) for _ in range(4))
    for i, q in enumerate(queries):
        for k in range(1, MAX_K + 1):
            prec[i, k - 1] = metrics.precision_at_k(q.recommended, q.relevant, k, strict)
            rec[i, k - 1] = metrics.recall_at_k(q.recommended, q.relevant, k)
        f1[i] = metrics.f1_at_k(q.recommended, q.relevant, 5, strict)
        rr[i] = metrics.mrr(q.recommended, q.relevant)
        ap[i] = metrics.map_metric(q.recommended, q.relevant)
        ndcg[i] = metrics.ndcg_at_k(q.recommended, q.relevant, MAX_K)

    def mean(a):
        return a.mean(axis=0) if n else np.zeros(a.shape[1:])

    return EvalReport(
        algorithm=name,
        precision=mean(prec),
        recall=mean(rec),
        f1_5=float(mean(f1)),
        mrr=float(mean(rr)),
        map=float(mean(ap)),
        ndcg_10=float(mean(ndcg)),
        user_count=n,
        failures=sum(q.failed for q in queries),
        queries=list(queries),
    )


def run_benchmark(
    split: SplitResult,
    algorithms: Sequence[str] | Mapping[str, Recommender],
    model: TopicModel | None = None,
    params: BenchmarkParams = BenchmarkParams(),
) -> list[EvalReport]:
    """Evaluate each algorithm on the test posts of the evaluation users.

    ``algorithms`` holds registry names or ready ``(user, resource) -> ranked``
    callables. A query that raises is scored as an empty list and tallied.
    """
    if not isinstance(algorithms, Mapping):
        algorithms = {name: make_recommender(name, split.train, model, params) for name in algorithms}
    tests = sorted((p for p in split.test if p.user in split.eval_users), key=lambda p: p.user)
    reports = []
    for name, recommend in algorithms.items():
        queries = []
        for post in tests:
            failed = False
            try:
                ranked = recommend(post.user, post.resource)
                recommended = list(dict.fromkeys(t for t, _ in ranked[:MAX_K]))
            except Exception:
                log.exception("%s failed on (%s, %s)", name, post.user, post.resource)
                recommended, failed = [], True
            queries.append(QueryResult(post.user, post.resource, recommended, post.tags, failed))
        report = score_queries(name, queries, params.strict_precision)
        log.info("%s: %d users, R@10=%.4f, %d failures", name, report.user_count, report.recall[-1], report.failures)
        reports.append(report)
    return reports


def write_summary_csv(reports: Sequence[EvalReport], path: str | Path) -> None:
    """Per-k ``algorithm,k,precision,recall`` rows, then ``algorithm,metric,value`` rows."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["algorithm", "k", "precision", "recall"])
        for rep in reports:
            for k in range(1, MAX_K + 1):
                w.writerow([rep.algorithm, k, repr(float(rep.precision[k - 1])), repr(float(rep.recall[k - 1]))])
        for rep in reports:
            for metric, value in rep.scalar_metrics().items():
                w.writerow([rep.algorithm, metric, repr(value)])


def write_query_log(report: EvalReport, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(["user", "resource", "relevant_tags", "recommended_tags"])
        for q in report.queries:
            w.writerow([q.user, q.resource, "|".join(sorted(q.relevant)), "|".join(q.recommended)])


def format_table(reports: Sequence[EvalReport]) -> str:
    """Precision/recall per k for each algorithm, one line per algorithm."""
    head = f"{'algorithm':<10} " + " ".join(f"{'P@' + str(k):>6} {'R@' + str(k):>6}" for k in range(1, MAX_K + 1))
    lines = [head]
    for rep in reports:
        cells = " ".join(f"{p:6.4f} {r:6.4f}" for p, r in zip(rep.precision, rep.recall))
        lines.append(f"{rep.algorithm:<10} {cells}")
    return "\n".join(lines)
