from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cogtags.core import Post, UnknownEntityError, build_folksonomy, resource_tag_count

from conftest import make_posts


def test_stats_small():
    f = build_folksonomy(make_posts([("u", "r1", "a,b", 1), ("u", "r2", "b,c", 2)]))
    assert f.stats == (2, 1, 2, 3, 4)


def test_empty_folksonomy_rejected():
    with pytest.raises(ValueError, match="empty folksonomy"):
        build_folksonomy([])


def test_post_rejects_empty_tags_and_negative_time():
    with pytest.raises(ValueError):
        Post("u", "r", frozenset(), 1)
    with pytest.raises(ValueError):
        Post("u", "r", frozenset({"a"}), -1)


def test_duplicate_pair_latest_wins_in_any_order():
    early = Post("u", "r", frozenset({"a"}), 1)
    late = Post("u", "r", frozenset({"b"}), 2)
    for order in ([early, late], [late, early]):
        f = build_folksonomy(order)
        assert len(f.posts) == 1
        assert f.posts[0].tags == {"b"}
        assert f.stats == (1, 1, 1, 1, 1)


def test_duplicate_pair_equal_timestamp_later_input_wins():
    f = build_folksonomy(make_posts([("u", "r", "a", 5), ("u", "r", "b", 5)]))
    assert f.posts[0].tags == {"b"}


def test_interning_round_trip(toy):
    for kind, interner in (("user", toy.users), ("resource", toy.resources), ("tag", toy.tags)):
        assert [interner.index(label) for label in interner.labels] == list(range(len(interner)))
        for label in interner.labels:
            e = toy.entity(kind, label)
            assert e.kind == kind
            assert interner.label(e.index) == label
    with pytest.raises(UnknownEntityError):
        toy.entity("user", "nobody")


def test_resource_tag_count(toy):
    assert resource_tag_count(toy, "web", "r1") == 2
    assert resource_tag_count(toy, "google", "r1") == 1
    assert resource_tag_count(toy, "cooking", "r1") == 0
    assert resource_tag_count(toy, toy.entity("tag", "web"), toy.entity("resource", "r1")) == 2
    with pytest.raises(UnknownEntityError, match="unknown entity"):
        resource_tag_count(toy, "nope", "r1")
    with pytest.raises(UnknownEntityError):
        resource_tag_count(toy, "web", "r99")


def test_resource_tag_count_three_posts_two_hits():
    f = build_folksonomy(make_posts([("a", "r", "j,x", 1), ("b", "r", "j", 2), ("c", "r", "x", 3)]))
    assert resource_tag_count(f, "j", "r") == 2


posts_strategy = st.lists(
    st.tuples(
        st.sampled_from(["u0", "u1", "u2", "u3"]),
        st.sampled_from(["r0", "r1", "r2", "r3", "r4"]),
        st.frozensets(st.sampled_from("abcdefg"), min_size=1, max_size=4),
        st.integers(0, 50),
    ),
    min_size=1,
    max_size=30,
    unique_by=lambda x: (x[0], x[1]),
).map(lambda rows: [Post(u, r, tags, t) for u, r, tags, t in rows])


@given(posts_strategy)
def test_count_invariants(posts):
    f = build_folksonomy(posts)
    tas = sum(len(p.tags) for p in posts)
    assert f.stats.tas == tas == int(f.global_tag_counts.sum())
    for r, label in enumerate(f.resources.labels):
        brute = Counter(t for p in posts if p.resource == label for t in p.tags)
        assert {f.tags.label(j): c for j, c in f.resource_tag_counts[r].items()} == brute
        assert sum(f.resource_tag_counts[r].values()) == sum(len(p.tags) for p in posts if p.resource == label)
    for plist in f.user_posts:
        times = [f.post_time[i] for i in plist]
        assert times == sorted(times)
        assert times[-1] == max(times)


@settings(max_examples=50)
@given(posts_strategy, st.randoms(use_true_random=False))
def test_build_is_order_independent(posts, rnd):
    shuffled = list(posts)
    rnd.shuffle(shuffled)
    a, b = build_folksonomy(posts), build_folksonomy(shuffled)
    assert a.stats == b.stats
    assert a.tags.labels == b.tags.labels
    assert a.resource_tag_counts == b.resource_tag_counts
    assert a.user_tag_counts == b.user_tag_counts
    assert (a.global_tag_counts == b.global_tag_counts).all()
