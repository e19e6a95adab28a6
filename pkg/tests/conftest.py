import pytest

from minorforge.engine import LevelStore, ensure_levels, load_class


@pytest.fixture(scope="session")
def dyadic():
    return load_class("dyadic")


@pytest.fixture(scope="session")
def tworeg():
    return load_class("2regular")


@pytest.fixture(scope="session")
def small_store(tmp_path_factory, dyadic, tworeg):
    """Dyadic levels 7..10 and 2-regular levels 5..9 in a throwaway store."""
    root = tmp_path_factory.mktemp("store")
    ensure_levels(dyadic, 10, LevelStore(root, "dyadic"))
    ensure_levels(tworeg, 9, LevelStore(root, "2regular"))
    return root


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE: dict = {}


def record(criterion, ok, detail=""):
    ACCEPTANCE[criterion] = (bool(ok), detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
