from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from crforge import canonical
from crforge.drawing import seed_k4
from crforge.extension import iter_extensions


def grow(inputs, budget, **kw):
    """One generation stage, deduplicated, in canonical code order."""
    store = {}
    for base in inputs:
        for ext in iter_extensions(base, budget, **kw):
            store.setdefault(canonical.canonical_code(ext.drawing), ext.drawing)
    return [store[k] for k in sorted(store)]


@pytest.fixture(scope="session")
def d5(request):
    return grow([seed_k4()], 1)


@pytest.fixture(scope="session")
def d6(d5):
    return grow(d5, 3)


@pytest.fixture(scope="session")
def d7(d6):
    return grow(d6, 9)


@pytest.fixture(scope="session")
def d8(d7):
    return grow(d7, 20)


@pytest.fixture(scope="session")
def small_pool(d5, d6):
    """Drawings with n <= 6 (several crossing counts) for oracle sweeps."""
    pool = [seed_k4()] + d5 + grow([seed_k4()], 3) + d6 + grow(d5, 5)
    seen = {}
    for d in pool:
        seen.setdefault(canonical.canonical_code(d), d)
    return [seen[k] for k in sorted(seen)]
