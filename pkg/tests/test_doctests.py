import doctest
import importlib

import pytest

MODULES = ["linalg", "jsonio", "generators", "minimax", "parallel", "schatten", "cstar", "suite", "cli"]


@pytest.mark.parametrize("name", MODULES)
def test_module_doctests(name):
    mod = importlib.import_module(f"opparallel.{name}")
    result = doctest.testmod(mod, optionflags=doctest.NORMALIZE_WHITESPACE | doctest.ELLIPSIS)
    assert result.failed == 0
