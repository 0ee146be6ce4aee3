"""Shared fixtures: converged solves are expensive, so cache them per session."""
import numpy as np
import pytest

from backflow import EpsilonParams, assemble, build_grid, solve_converged, solve_nonrel

_solve_cache = {}


@pytest.fixture(scope="session")
def solved():
    """solved(eps) -> cached EigenSolution at default settings."""
    def get(eps: float):
        if eps not in _solve_cache:
            _solve_cache[eps] = solve_converged(EpsilonParams(eps))
        return _solve_cache[eps]
    return get


@pytest.fixture(scope="session")
def solved_nonrel():
    if "nonrel" not in _solve_cache:
        _solve_cache["nonrel"] = solve_nonrel()
    return _solve_cache["nonrel"]


@pytest.fixture(scope="session")
def small_matrix():
    """small_matrix(eps, q0, n0, h) -> cached KernelMatrix for cheap tests."""
    cache = {}

    def get(eps: float, q0: float = 6.0, n0: int = 200, h: int = 1):
        key = (eps, q0, n0, h)
        if key not in cache:
            cache[key] = assemble(EpsilonParams(eps), build_grid(q0, n0, h))
        return cache[key]
    return get


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
