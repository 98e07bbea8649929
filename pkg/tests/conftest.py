import sys
from pathlib import Path

import pytest

from csystems.instances import Fragment, FragmentConfig, build_context, build_unit, build_universe

sys.path.insert(0, str(Path(__file__).parent))

ROOT = Path(__file__).resolve().parent.parent
FIXTURE_DIR = ROOT / "fixtures"


@pytest.fixture(scope="session")
def fixture_dir():
    return FIXTURE_DIR


def make(kind, *args, max_len=2, **cfg):
    cs = {"unit": build_unit, "context": build_context, "universe": build_universe}[kind](*args)
    return cs, Fragment(cs, FragmentConfig(max_len=max_len, **cfg))


@pytest.fixture(scope="session")
def ctx2():
    return make("context", [2], max_len=2)


@pytest.fixture(scope="session")
def ctx22():
    return make("context", [2, 2], max_len=2)


@pytest.fixture(scope="session")
def univ():
    return make("universe", [1, 2], max_len=2)


@pytest.fixture(scope="session")
def unit():
    return make("unit", max_len=4)


# acceptance lines are collected here and printed once at the end of the run
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}")
