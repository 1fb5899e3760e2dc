import pytest

_RESULTS: dict = {}
_DETAILS: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.fixture
def detail(request):
    """Attach a one-line measurement to the criterion summary line."""
    marker = request.node.get_closest_marker("criterion")

    def put(text):
        if marker is not None:
            _DETAILS.setdefault(marker.args[0], []).append(str(text))

    return put


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when != "call" and not rep.failed:
        return
    num, title = marker.args
    ok = rep.passed and _RESULTS.get(num, (True, title))[0]
    _RESULTS[num] = (ok, title)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_RESULTS):
        ok, title = _RESULTS[num]
        extra = "; ".join(_DETAILS.get(num, []))
        line = f"criterion {num:>2} {'PASS' if ok else 'FAIL'}  {title}"
        terminalreporter.write_line(line + (f"  [{extra}]" if extra else ""))
