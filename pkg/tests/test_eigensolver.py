import json

import numpy as np
import pytest

from backflow import (EigenSolution, EigensolverError, EpsilonParams, RefinementError,
                      assemble, build_grid, smallest_eig, solve_converged, solve_nonrel)
from backflow.eigensolver import _power_iterate

from oracles import dense_smallest


def test_2x2_offdiagonal():
    lam, v = smallest_eig(np.array([[0.0, 1.0], [1.0, 0.0]]), tol=1e-12)
    assert lam == pytest.approx(-1.0, abs=1e-10)
    want = np.array([1.0, -1.0]) / np.sqrt(2.0)
    assert min(np.max(np.abs(v - want)), np.max(np.abs(v + want))) < 1e-6


def test_diagonal_matrix():
    lam, v = smallest_eig(np.diag([-3.0, 2.0]), tol=1e-12)
    assert lam == pytest.approx(-3.0, abs=1e-10)
    assert abs(abs(v[0]) - 1.0) < 1e-6


def test_residual_contract(small_matrix):
    m = small_matrix(1.0, 6.0, 150, 1)
    lam, v = smallest_eig(m, tol=1e-9)
    res = np.max(np.abs(m.entries @ v - lam * v))
    assert res <= 1e-9
    assert abs(np.linalg.norm(v) - 1.0) < 1e-12


def test_matches_dense_oracle_small_grids(small_matrix):
    for eps, n0 in ((0.5, 150), (1.0, 200), (2.0, 120)):
        m = small_matrix(eps, 6.0, n0, 1)
        lam, _ = smallest_eig(m, tol=1e-10)
        lam_oracle, _ = dense_smallest(m)
        assert lam == pytest.approx(lam_oracle, abs=1e-8)


def test_nonconvergence_raises_with_state(small_matrix):
    m = small_matrix(1.0, 6.0, 100, 1)
    with pytest.raises(EigensolverError) as exc:
        _power_iterate(m.entries, 1e-14, max_iter=3)
    assert np.isfinite(exc.value.lam)
    assert exc.value.residual > 0
    assert exc.value.vector.shape == (100,)


def test_smallest_eig_rejects_bad_tol(small_matrix):
    with pytest.raises(ValueError):
        smallest_eig(small_matrix(1.0), tol=0.0)


def test_coarse_nonrel_matrix_bracket():
    # dense oracle on a deliberately coarse assembly
    m = assemble(EpsilonParams(0.0), build_grid(4.0, 50, 1))
    lam, _ = dense_smallest(m)
    assert -0.05 < lam < -0.02
    lam_p, _ = smallest_eig(m, tol=1e-10)
    assert lam_p == pytest.approx(lam, abs=1e-8)


def test_solution_contracts(solved):
    sol = solved(1.0)
    w, eta = sol.grid.weights, sol.eta
    assert sol.lam < 0
    assert np.sum(w * eta * eta) == pytest.approx(1.0, abs=1e-10)
    assert eta[np.argmax(np.abs(eta))] > 0
    assert sol.residual <= 1e-8
    # wavepacket tail contained in the integration range
    assert abs(eta[-1]) < 0.05 * np.max(np.abs(eta))


def test_variational_bound_random_vectors(solved, rng):
    sol = solved(1.0)
    m = assemble(sol.eps, sol.grid).entries
    for _ in range(50):
        v = rng.standard_normal(m.shape[0])
        v /= np.linalg.norm(v)
        assert v @ (m @ v) >= sol.lam - 1e-12


def test_refinement_stop_and_bracket():
    # small config: check the level-difference stopping rule post hoc
    eps = EpsilonParams(1.0)
    refine_tol = 2e-4
    sol = solve_converged(eps, q0=10.0, n0=120, refine_tol=refine_tol, h_max=12)
    lams = []
    for h in (sol.h_final - 1, sol.h_final):
        m = assemble(eps, build_grid(10.0, 120, h))
        lam, _ = smallest_eig(m, tol=1e-9)
        lams.append(lam)
    assert abs(lams[1] - lams[0]) < refine_tol
    assert min(lams) - 1e-12 <= sol.lam <= max(lams) + 1e-12


def test_refinement_error_carries_sequence():
    with pytest.raises(RefinementError) as exc:
        solve_converged(EpsilonParams(1.0), q0=3.0, n0=40, refine_tol=1e-9, h_max=3)
    assert len(exc.value.lambdas) == 3


def test_json_round_trip(solved):
    sol = solved(1.0)
    back = EigenSolution.from_json(sol.to_json())
    assert back.eps == sol.eps
    assert back.lam == sol.lam
    assert back.h_final == sol.h_final
    assert back.iterations == sol.iterations
    assert back.residual == sol.residual
    assert np.array_equal(back.eta, sol.eta)
    assert np.array_equal(back.grid.nodes, sol.grid.nodes)
    # serialized form is stable
    assert json.loads(sol.to_json()) == json.loads(back.to_json())


def test_nonrel_agrees_with_tiny_epsilon(solved, solved_nonrel):
    assert solved(0.01).lam == pytest.approx(solved_nonrel.lam, abs=1e-3)
