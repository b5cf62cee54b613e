import pytest

from cogtags.core import Post, build_folksonomy


def make_posts(rows):
    """Build posts from ``(user, resource, "a,b", timestamp)`` tuples."""
    return [Post(u, r, frozenset(tags.split(",")), t) for u, r, tags, t in rows]


@pytest.fixture
def toy():
    # u1 and u2 share r1; u3 is disjoint
    return build_folksonomy(
        make_posts(
            [
                ("u1", "r1", "web,search", 10),
                ("u1", "r2", "web,python", 20),
                ("u1", "r3", "python", 30),
                ("u2", "r1", "web,google", 15),
                ("u2", "r4", "google", 25),
                ("u3", "r5", "cooking", 5),
            ]
        )
    )


_acceptance: dict[int, list] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): exit criterion checked by this test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    entry = _acceptance.setdefault(number, [title, "PASS", 0.0])
    if report.failed:
        entry[1] = "FAIL"
    if report.when == "call":
        entry[2] += report.duration


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance):
        title, status, seconds = _acceptance[number]
        terminalreporter.write_line(f"criterion {number:>2}: {status}  {title} ({seconds:.2f}s)")
