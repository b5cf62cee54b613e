"""Canonical TSV parsing, dataset preprocessing and the leave-last-post-out split."""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from pathlib import Path

from .core import Folksonomy, Post, build_folksonomy

log = logging.getLogger(__name__)

DEFAULT_BLACKLIST = frozenset({"no-tag", "bibtex-import"})


@dataclass(frozen=True)
class PreprocessConfig:
    blacklist: frozenset[str] = DEFAULT_BLACKLIST
    lowercase: bool = True
    user_sample_fraction: float = 1.0
    sample_seed: int = 0
    min_user_posts_for_eval: int = 20

    def __post_init__(self):
        if not 0 < self.user_sample_fraction <= 1:
            raise ValueError(f"user_sample_fraction must be in (0, 1], got {self.user_sample_fraction}")
        if self.min_user_posts_for_eval < 1:
            raise ValueError("min_user_posts_for_eval must be >= 1")
        object.__setattr__(self, "blacklist", frozenset(self.blacklist))


@dataclass
class ParseReport:
    rows: int = 0
    parsed: int = 0
    skipped: int = 0
    errors: list[str] = field(default_factory=list)


@dataclass
class SplitResult:
    train: Folksonomy
    test: list[Post]
    eval_users: set[str]


def parse_line(line: str) -> Post:
    cols = line.rstrip("\r\n").split("\t")
    if len(cols) != 4:
        raise ValueError(f"expected 4 columns, got {len(cols)}")
    user, resource, ts, tag_field = cols
    if not user or not resource:
        raise ValueError("empty user or resource")
    timestamp = int(ts)
    tags = frozenset(t.strip() for t in tag_field.split(",") if t.strip())
    if not tags:
        raise ValueError("empty tag list")
    return Post(user, resource, tags, timestamp)


def parse_dump(path: str | Path, format: str = "tsv") -> tuple[list[Post], ParseReport]:
    """Read a canonical post TSV (``user, resource, unix_timestamp, tag1,tag2,...``).

    Malformed rows are skipped and counted in the returned report.
    """
    if format != "tsv":
        raise ValueError(f"unsupported format {format!r}")
    posts: list[Post] = []
    report = ParseReport()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            report.rows += 1
            try:
                posts.append(parse_line(line))
            except ValueError as exc:
                report.skipped += 1
                if len(report.errors) < 100:
                    report.errors.append(f"line {lineno}: {exc}")
    report.parsed = len(posts)
    if not posts:
        raise ValueError("no posts parsed")
    if report.skipped:
        log.warning("skipped %d malformed rows in %s", report.skipped, path)
    return posts, report


def write_posts(posts: list[Post], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for p in posts:
            fh.write(f"{p.user}\t{p.resource}\t{p.timestamp}\t{','.join(sorted(p.tags))}\n")


def sample_users(users: set[str], fraction: float, seed: int) -> set[str]:
    if fraction >= 1:
        return set(users)
    n = max(1, round(fraction * len(users)))
    return set(random.Random(seed).sample(sorted(users), n))


def preprocess(posts: list[Post], cfg: PreprocessConfig) -> list[Post]:
    """Normalize tags, drop blacklisted ones and optionally sample user profiles."""
    blacklist = {t.lower() for t in cfg.blacklist} if cfg.lowercase else cfg.blacklist
    out = []
    for p in posts:
        tags = {t.lower() for t in p.tags} if cfg.lowercase else set(p.tags)
        tags -= blacklist
        if tags:
            out.append(p if tags == p.tags else Post(p.user, p.resource, frozenset(tags), p.timestamp))
    if cfg.user_sample_fraction < 1:
        keep = sample_users({p.user for p in out}, cfg.user_sample_fraction, cfg.sample_seed)
        out = [p for p in out if p.user in keep]
    return out


def split_train_test(f: Folksonomy, cfg: PreprocessConfig | None = None) -> SplitResult:
    """Move each user's most recent post into the test set.

    Users with a single post keep it in training. Evaluation users are those
    with at least ``cfg.min_user_posts_for_eval`` posts before the split.
    """
    cfg = cfg or PreprocessConfig()
    test_ids = set()
    eval_users = set()
    for u, plist in enumerate(f.user_posts):
        if len(plist) < 2:
            continue
        test_ids.add(plist[-1])
        if len(plist) >= cfg.min_user_posts_for_eval:
            eval_users.add(f.users.label(u))
    train = [p for i, p in enumerate(f.posts) if i not in test_ids]
    test = [f.posts[i] for i in sorted(test_ids)]
    return SplitResult(build_folksonomy(train), test, eval_users)
