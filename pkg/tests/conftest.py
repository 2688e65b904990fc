import datetime as dt
import random
import sys
from pathlib import Path

import pytest
from hypothesis import settings

from ipcmap.corpus import Corpus, PatentRecord
from ipcmap.ipc import IpcCode

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture
def fixture_csv():
    return FIXTURES / "corpus12.csv"


@pytest.fixture
def fixture_config():
    return FIXTURES / "fixture.toml"


def make_corpus(docs, year=2015):
    """Corpus from a list of IpcCode lists, ids P0..Pn."""
    records = [
        PatentRecord(f"P{i}", "US", dt.date(year, 1, 1), ("Acme",), tuple(codes))
        for i, codes in enumerate(docs)
    ]
    return Corpus(tuple(records), "test")


def random_group_code(rng: random.Random, pool: int) -> IpcCode:
    """One of ``pool`` deterministic group-level codes spread over a few subclasses."""
    k = rng.randrange(pool)
    section = "ABGH"[k % 4]
    sub = "FKNT"[(k // 4) % 4]
    return IpcCode(section, f"{6 + k % 3:02d}", sub, 1 + k % 5, "00" if k % 7 == 0 else str(10 + k))


# Acceptance criteria report: tests marked ``criterion(n, text)`` get one summary line each.
_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, text): acceptance criterion checked by this test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and not rep.skipped and rep.passed):
        return
    number, text = mark.args
    if rep.skipped:
        status = "SKIP"
    elif rep.failed:
        status = "FAIL"
    elif rep.when == "call":
        status = "PASS"
    else:
        return
    # A failure in any phase wins over an earlier pass.
    if _CRITERIA.get(number, (None,))[0] != "FAIL":
        _CRITERIA[number] = (status, text)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        status, text = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number}: {status}  {text}")
