import pytest
from hypothesis import given
from hypothesis import strategies as st

from cogtags.core import Post, build_folksonomy
from cogtags.ingest import PreprocessConfig, parse_dump, parse_line, preprocess, split_train_test, write_posts

from conftest import make_posts


def test_parse_line():
    assert parse_line("u1\tr1\t1357000000\tweb,search\n") == Post("u1", "r1", frozenset({"web", "search"}), 1357000000)


@pytest.mark.parametrize(
    "line",
    ["u1\tr1\t100\t", "u1\tr1\t100\t , ", "u1\tr1\tnoon\ta", "u1\tr1\t100", "u1\tr1\t100\ta\textra", "u1\tr1\t-5\ta"],
)
def test_parse_line_malformed(line):
    with pytest.raises(ValueError):
        parse_line(line)


def test_parse_dump_counts_skipped(tmp_path):
    path = tmp_path / "posts.tsv"
    path.write_text("u1\tr1\t1\ta,b\nu1\tr2\t2\t\nu2\tr1\t3\tb\nu2\tr3\t4\tc\n")
    posts, report = parse_dump(path)
    assert len(posts) == 3
    assert report.skipped == 1
    assert report.rows == 4


def test_parse_dump_no_valid_rows(tmp_path):
    path = tmp_path / "bad.tsv"
    path.write_text("garbage\n")
    with pytest.raises(ValueError, match="no posts parsed"):
        parse_dump(path)


def test_parse_dump_missing_file(tmp_path):
    with pytest.raises(OSError):
        parse_dump(tmp_path / "missing.tsv")


def test_write_parse_round_trip(tmp_path):
    posts = make_posts([("u1", "r1", "b,a", 5), ("u2", "r2", "c", 7)])
    write_posts(posts, tmp_path / "p.tsv")
    assert parse_dump(tmp_path / "p.tsv")[0] == posts


def test_preprocess_blacklist_and_lowercase():
    posts = [Post("u", "r", frozenset({"No-Tag", "Web"}), 1)]
    cfg = PreprocessConfig(blacklist={"no-tag"}, lowercase=True)
    assert preprocess(posts, cfg)[0].tags == {"web"}


def test_preprocess_identity():
    posts = make_posts([("u", "r", "Web,NO-TAG", 1)])
    assert preprocess(posts, PreprocessConfig(blacklist=set(), lowercase=False)) == posts


def test_preprocess_drops_emptied_posts():
    posts = make_posts([("u", "r", "bibtex-import", 1), ("u", "r2", "x", 2)])
    assert [p.resource for p in preprocess(posts, PreprocessConfig())] == ["r2"]


def test_user_sampling_exact_and_stable():
    posts = [Post(f"u{i}", "r", frozenset({"t"}), i) for i in range(100)]
    cfg = PreprocessConfig(user_sample_fraction=0.1, sample_seed=7)
    first = {p.user for p in preprocess(posts, cfg)}
    second = {p.user for p in preprocess(posts, cfg)}
    assert len(first) == 10
    assert first == second


def test_preprocess_config_validation():
    with pytest.raises(ValueError):
        PreprocessConfig(user_sample_fraction=0)
    with pytest.raises(ValueError):
        PreprocessConfig(min_user_posts_for_eval=0)


raw_posts = st.lists(
    st.builds(
        Post,
        st.sampled_from(["u1", "u2"]),
        st.sampled_from(["r1", "r2", "r3"]),
        st.frozensets(st.sampled_from(["Web", "web", "NO-TAG", "no-tag", "Bibtex-Import", "py", "PY"]), min_size=1),
        st.integers(0, 100),
    ),
    max_size=20,
)


@given(raw_posts, st.booleans())
def test_preprocess_idempotent(posts, lowercase):
    cfg = PreprocessConfig(lowercase=lowercase)
    once = preprocess(posts, cfg)
    assert preprocess(once, cfg) == once


def test_split_most_recent_to_test():
    f = build_folksonomy(make_posts([("u", "r1", "a", 1), ("u", "r3", "a", 3), ("u", "r2", "a", 2)]))
    split = split_train_test(f)
    assert [p.timestamp for p in split.test] == [3]
    assert sorted(p.timestamp for p in split.train.posts) == [1, 2]


def test_split_single_post_user_stays_in_train():
    f = build_folksonomy(make_posts([("solo", "r1", "a", 1), ("u", "r1", "a", 1), ("u", "r2", "b", 2)]))
    split = split_train_test(f)
    assert [p.user for p in split.test] == ["u"]
    assert "solo" in split.train.users


def test_split_tie_on_latest_timestamp_uses_input_order():
    f = build_folksonomy(make_posts([("u", "r1", "a", 1), ("u", "r2", "b", 9), ("u", "r3", "c", 9)]))
    assert split_train_test(f).test[0].resource == "r3"


@pytest.mark.parametrize("n_posts, in_eval", [(19, False), (20, True), (21, True)])
def test_eval_user_threshold(n_posts, in_eval):
    f = build_folksonomy([Post("u", f"r{i}", frozenset({"t"}), i) for i in range(n_posts)])
    split = split_train_test(f, PreprocessConfig())
    assert len(split.test) == 1
    assert ("u" in split.eval_users) is in_eval
