"""Folksonomy data model: interned users, resources and tags plus count indices."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Literal, NamedTuple

import numpy as np

Kind = Literal["user", "resource", "tag"]


class UnknownEntityError(KeyError):
    pass


@dataclass(frozen=True)
class EntityId:
    kind: Kind
    index: int
    original: str


@dataclass(frozen=True)
class Post:
    """One bookmark: a user assigning a set of tags to a resource at a time."""

    user: str
    resource: str
    tags: frozenset[str]
    timestamp: int

    def __post_init__(self):
        if not isinstance(self.tags, frozenset):
            object.__setattr__(self, "tags", frozenset(self.tags))
        if not self.tags:
            raise ValueError(f"post ({self.user}, {self.resource}) has an empty tag set")
        if self.timestamp < 0:
            raise ValueError(f"negative timestamp {self.timestamp}")


class Stats(NamedTuple):
    posts: int
    users: int
    resources: int
    tags: int
    tas: int


class Interner:
    """Bijective label <-> dense index mapping for one entity kind.

    Labels are interned in sorted order, so index order is label order and the
    mapping does not depend on input order.
    """

    def __init__(self, kind: Kind, labels: Iterable[str]):
        self.kind = kind
        self.labels: list[str] = sorted(set(labels))
        self._index = {label: i for i, label in enumerate(self.labels)}

    def __len__(self) -> int:
        return len(self.labels)

    def __contains__(self, label: str) -> bool:
        return label in self._index

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise UnknownEntityError(f"unknown entity: {self.kind} {label!r}") from None

    def get(self, label: str) -> int | None:
        return self._index.get(label)

    def label(self, index: int) -> str:
        return self.labels[index]

    def entity(self, label: str) -> EntityId:
        return EntityId(self.kind, self.index(label), label)


@dataclass(eq=False)
class Folksonomy:
    """Immutable training graph. Build with :func:`build_folksonomy`.

    Per-post arrays are parallel to ``posts``. Count indices are keyed by dense
    tag index.
    """

    posts: list[Post]
    users: Interner
    resources: Interner
    tags: Interner
    post_user: np.ndarray
    post_resource: np.ndarray
    post_time: np.ndarray
    post_tags: list[tuple[int, ...]]
    user_posts: list[list[int]]
    resource_posts: list[list[int]]
    resource_tag_counts: list[dict[int, int]]
    user_tag_counts: list[dict[int, int]]
    global_tag_counts: np.ndarray
    pair_post: dict[tuple[int, int], int] = field(repr=False)

    @property
    def stats(self) -> Stats:
        return Stats(
            len(self.posts),
            len(self.users),
            len(self.resources),
            len(self.tags),
            int(self.global_tag_counts.sum()),
        )

    def entity(self, kind: Kind, label: str) -> EntityId:
        return self._interner(kind).entity(label)

    def _interner(self, kind: Kind) -> Interner:
        return {"user": self.users, "resource": self.resources, "tag": self.tags}[kind]

    def user_index(self, user: str) -> int | None:
        return self.users.get(user)

    def resource_index(self, resource: str) -> int | None:
        return self.resources.get(resource)

    def user_tag_times(self, u: int) -> tuple[int, dict[int, int]]:
        """Return ``(t_ref, last_use)`` for user index ``u``."""
        last: dict[int, int] = {}
        t_ref = 0
        for p in self.user_posts[u]:
            t = int(self.post_time[p])
            t_ref = max(t_ref, t)
            for j in self.post_tags[p]:
                last[j] = max(last.get(j, t), t)
        return t_ref, last


def _label_of(x: str | EntityId) -> str:
    return x.original if isinstance(x, EntityId) else x


def dedupe_posts(posts: Iterable[Post]) -> list[Post]:
    """Keep one post per (user, resource): latest timestamp wins, later input wins ties.

    The surviving post keeps the input position of the first occurrence of its pair.
    """
    slot: dict[tuple[str, str], int] = {}
    out: list[Post] = []
    for p in posts:
        key = (p.user, p.resource)
        i = slot.get(key)
        if i is None:
            slot[key] = len(out)
            out.append(p)
        elif p.timestamp >= out[i].timestamp:
            out[i] = p
    return out


def build_folksonomy(posts: Iterable[Post]) -> Folksonomy:
    posts = dedupe_posts(posts)
    if not posts:
        raise ValueError("empty folksonomy")

    users = Interner("user", (p.user for p in posts))
    resources = Interner("resource", (p.resource for p in posts))
    tags = Interner("tag", (t for p in posts for t in p.tags))

    n = len(posts)
    post_user = np.fromiter((users.index(p.user) for p in posts), dtype=np.int64, count=n)
    post_resource = np.fromiter((resources.index(p.resource) for p in posts), dtype=np.int64, count=n)
    post_time = np.fromiter((p.timestamp for p in posts), dtype=np.int64, count=n)
    post_tags = [tuple(sorted(tags.index(t) for t in p.tags)) for p in posts]

    user_posts: list[list[int]] = [[] for _ in range(len(users))]
    resource_posts: list[list[int]] = [[] for _ in range(len(resources))]
    user_counts = [Counter() for _ in range(len(users))]
    resource_counts = [Counter() for _ in range(len(resources))]
    global_counts = np.zeros(len(tags), dtype=np.int64)
    pair_post = {}
    for i in range(n):
        u, r = int(post_user[i]), int(post_resource[i])
        user_posts[u].append(i)
        resource_posts[r].append(i)
        pair_post[(u, r)] = i
        user_counts[u].update(post_tags[i])
        resource_counts[r].update(post_tags[i])
        for j in post_tags[i]:
            global_counts[j] += 1
    # stable sort keeps input order among equal timestamps
    for plist in user_posts:
        plist.sort(key=lambda i: post_time[i])

    return Folksonomy(
        posts=posts,
        users=users,
        resources=resources,
        tags=tags,
        post_user=post_user,
        post_resource=post_resource,
        post_time=post_time,
        post_tags=post_tags,
        user_posts=user_posts,
        resource_posts=resource_posts,
        resource_tag_counts=[dict(c) for c in resource_counts],
        user_tag_counts=[dict(c) for c in user_counts],
        global_tag_counts=global_counts,
        pair_post=pair_post,
    )


def resource_tag_count(f: Folksonomy, tag: str | EntityId, resource: str | EntityId) -> int:
    """Number of posts on ``resource`` whose tag set contains ``tag``."""
    j = f.tags.index(_label_of(tag))
    r = f.resources.index(_label_of(resource))
    return f.resource_tag_counts[r].get(j, 0)
