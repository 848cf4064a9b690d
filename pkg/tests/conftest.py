import pytest

from vistream.ingest import save_dataset
from vistream.stream import Broker
from vistream.synthetic import make_corpus


@pytest.fixture(scope="session")
def small_corpus():
    return make_corpus(300, seed=7)


@pytest.fixture
def corpus_csv(tmp_path, small_corpus):
    path = tmp_path / "corpus.csv"
    save_dataset(small_corpus, path)
    return path


@pytest.fixture
def broker():
    with Broker("127.0.0.1", 0) as b:
        yield b


_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion covered by a test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or report.when not in ("setup", "call"):
        return
    n, title = mark.args
    if report.when == "setup" and report.passed:
        return
    _CRITERIA[n] = (title, "PASS" if report.passed else "FAIL", call.stop - call.start)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        title, status, secs = _CRITERIA[n]
        terminalreporter.write_line(f"[{status}] criterion {n}: {title} ({secs:.2f}s)")
