import os

import pytest

from abelops.curve import CurveModel
from abelops.sigma import load_expansion, solve_expansion, store_expansion


def expansion_for(n, s, depth):
    """Solve or load a cached expansion.

    Set ABELOPS_CACHE_DIR to reuse solved expansions across test runs; the
    files are validated (checksum and invariants) on load, so a stale or
    corrupted cache fails loudly rather than silently.
    """
    cache = os.environ.get("ABELOPS_CACHE_DIR")
    if cache:
        path = os.path.join(cache, f"sigma_{n}_{s}_d{depth}.sig")
        if os.path.exists(path):
            exp = load_expansion(path)
            if exp.depth == depth and (exp.curve.n, exp.curve.s) == (n, s):
                return exp
    exp = solve_expansion(CurveModel(n, s), depth)
    if cache:
        os.makedirs(cache, exist_ok=True)
        store_expansion(exp, os.path.join(cache, f"sigma_{n}_{s}_d{depth}.sig"))
    return exp


@pytest.fixture(scope="session")
def expansion_2_5_d16():
    return expansion_for(2, 5, 16)


@pytest.fixture(scope="session")
def expansion_2_7_d12():
    return expansion_for(2, 7, 12)


@pytest.fixture(scope="session")
def expansion_3_4_d15():
    return expansion_for(3, 4, 15)
