import pytest

from lambdagen import _backend


def pytest_addoption(parser):
    parser.addoption("--extended", action="store_true", default=False,
                     help="run the long golden checks (full count prefixes, density row 20)")


def pytest_configure(config):
    config.addinivalue_line("markers", "extended: long-running golden checks, enabled by --extended")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--extended"):
        return
    skip = pytest.mark.skip(reason="needs --extended")
    for item in items:
        if "extended" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(params=_backend.available_backends())
def kernels(request):
    return _backend.load_backend(request.param)


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    """Record one pass/fail line for an acceptance criterion."""

    def emit(criterion, ok, detail):
        line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'} - {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return emit


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
