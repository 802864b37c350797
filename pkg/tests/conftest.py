import importlib.resources
import pathlib

import pytest


@pytest.fixture(scope="session")
def platform_dir() -> pathlib.Path:
    """Directory holding the platform spec fixtures shipped with the package."""
    return pathlib.Path(str(importlib.resources.files("fuel") / "platforms"))


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    ledger = getattr(module, "LEDGER", None)
    if ledger:
        terminalreporter.section("acceptance criteria")
        for line in ledger:
            terminalreporter.write_line(line)
