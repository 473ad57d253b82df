import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from lanearith import _backend

settings.register_profile(
    "default", max_examples=200, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

MAX64 = (1 << 64) - 1

# criterion number -> {"title", "outcome", "notes"}
_CRITERIA = {}


def limb_lists(min_size=0, max_size=24, k=64):
    """Limb lists biased towards the carry-relevant values 0 and 2^k - 1."""
    top = (1 << k) - 1
    limb = st.one_of(
        st.integers(0, top),
        st.sampled_from([0, top, top - 1, 1, 1 << (k - 1)]),
    )
    return st.lists(limb, min_size=min_size, max_size=max_size)


def same_length_pair(min_size=1, max_size=24, k=64):
    return st.integers(min_size, max_size).flatmap(
        lambda n: st.tuples(limb_lists(n, n, k), limb_lists(n, n, k))
    )


def arr(xs):
    return np.array(xs, dtype=np.uint64)


def value(a):
    return sum(int(x) << (64 * i) for i, x in enumerate(a))


@pytest.fixture(params=_backend.available())
def backend(request):
    return _backend.get(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def _entry(item):
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return None
    n, title = mark.args[:2]
    return _CRITERIA.setdefault(n, {"title": title, "outcome": [], "notes": [],
                                    "report_only": mark.kwargs.get("report_only", False)})


@pytest.fixture
def note(request):
    """Append a measured value to this criterion's summary line."""
    entry = _entry(request.node)
    return entry["notes"].append if entry else (lambda s: None)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    entry = _entry(item)
    if entry is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        entry["outcome"].append(rep.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        e = _CRITERIA[n]
        outs = e["outcome"]
        if not outs or "skipped" in outs and "failed" not in outs:
            status = "SKIP"
        elif "failed" in outs:
            status = "FAIL"
        else:
            status = "REPORT" if e["report_only"] else "PASS"
        line = f"[{status}] criterion {n}: {e['title']}"
        if e["notes"]:
            line += " | " + "; ".join(e["notes"])
        tr.write_line(line)
