import pytest

from playtriage.synthetic import make_fixture


@pytest.fixture(scope="session")
def fixture_corpus(tmp_path_factory):
    return make_fixture(tmp_path_factory.mktemp("corpus"))


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in lines:
        terminalreporter.write_line(line)
