"""
Pytest configuration and fixtures for roadnet tests
"""

import os
import shutil
import tempfile
from pathlib import Path

import pytest


@pytest.fixture(autouse=True)
def scratch_working_directory():
    """Run every test inside its own temporary working directory"""
    original_cwd = Path.cwd()
    test_dir = tempfile.mkdtemp()
    os.chdir(test_dir)

    yield Path(test_dir)

    os.chdir(original_cwd)
    shutil.rmtree(test_dir, ignore_errors=True)


def pytest_collection_modifyitems(config, items):
    """Mark tests by directory so `-m unit` and friends select them"""
    for item in items:
        path = str(item.fspath)
        for marker in ("unit", "integration", "live_system"):
            if f"{os.sep}{marker}{os.sep}" in path:
                item.add_marker(getattr(pytest.mark, marker))
