import importlib

import pytest


@pytest.fixture(scope="session")
def lab():
    """The extension module: the installed package if present, otherwise the
    in-tree build found through PYTHONPATH."""
    try:
        return importlib.import_module("bzlab")
    except ImportError:
        return importlib.import_module("_core")
