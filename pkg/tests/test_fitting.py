import numpy as np
import pytest

from backflow import (EpsilonParams, FitError, TrialParams, backflow_of_trial,
                      build_grid, default_fit_matrix, match_eigenvector,
                      maximize_backflow, smallest_eig, trial_eval)
from backflow.eigensolver import EigenSolution
from backflow.fitting import A6_FIXED_VALUE, BOX_HI, BOX_LO, CURATED_STARTS, _nelder_mead

from oracles import dense_smallest

ANCHOR_BESSEL = CURATED_STARTS["bessel"][0]


def test_params_validation():
    TrialParams("bessel", (-1.0, 0.5, 1.0, 0.3, 0.4, 0.7))
    with pytest.raises(ValueError):
        TrialParams("bessel", (0.5, 0.5, 1.0, 0.3, 0.4, 0.7))  # a1 > 0
    with pytest.raises(ValueError):
        TrialParams("bessel", (-11.0, 0.5, 1.0, 0.3, 0.4, 0.7))
    with pytest.raises(ValueError):
        TrialParams("bessel", (-1.0, 0.5, 1.0, 0.3, 0.0, 0.7))  # a5 below floor
    with pytest.raises(ValueError):
        TrialParams("fresnel", (-1.0, 0.5, 1.0, 0.3, 0.4, 0.7))
    with pytest.raises(ValueError):
        TrialParams("bessel", (-1.0, 0.5, 1.0, 0.3, 0.4, 0.7), a6_fixed=True)
    p = TrialParams("bessel", (-1.0, 0.5, 1.0, 0.3, 0.4, A6_FIXED_VALUE), a6_fixed=True)
    assert p.a[5] == A6_FIXED_VALUE


def test_constant_bessel_trial():
    p = TrialParams("bessel", (0.0, 3.3, 7.7, 0.0, 1.0, 5.0))
    r = np.linspace(0.0, 10.0, 11)
    assert np.allclose(trial_eval(p, r), 1.0, atol=1e-15)


def test_airy_trial_hits_airy_zero():
    p = TrialParams("airy", (-1.0, 0.0, 1.0, 0.0, 1.0, 0.0))
    assert abs(trial_eval(p, 2.338107410)) <= 1e-6


def test_reference_trial_oscillates_with_decay():
    p = TrialParams("bessel", (-1.347, 0.603, 0.986, 0.341, 0.435, 0.715))
    r = np.linspace(0.0, 10.0, 2001)
    t = trial_eval(p, r)
    assert np.all(np.isfinite(t))
    signs = np.sign(t)
    changes = np.sum(signs[1:] * signs[:-1] < 0)
    assert changes >= 3
    assert np.max(np.abs(t[r > 5.0])) < np.max(np.abs(t[r <= 5.0]))


def test_backflow_of_eigenvector_is_lambda(small_matrix):
    m = small_matrix(1.0, 6.0, 200, 1)
    lam, v = smallest_eig(m, tol=1e-10)
    eta = v / np.sqrt(m.grid.weights)
    from backflow import rayleigh_quotient
    assert rayleigh_quotient(eta, m) == pytest.approx(lam, abs=1e-9)


def test_trial_backflow_bounded_below_by_lambda(small_matrix, rng):
    m = small_matrix(0.9, 12.0, 240, 1)
    lam, _ = dense_smallest(m)
    for _ in range(25):
        a = BOX_LO + (BOX_HI - BOX_LO) * rng.random(6)
        delta = backflow_of_trial(TrialParams("bessel", tuple(a)), m)
        assert delta >= lam - 1e-12


def test_degenerate_trial_raises(small_matrix):
    # constant argument pinned at the first J0 zero makes the trial ~0
    m = small_matrix(1.0, 6.0, 200, 1)
    p = TrialParams("bessel", (-2.404825557695773, 1.0, 0.0, 0.0, 1.0, 0.0))
    with pytest.raises(FitError):
        backflow_of_trial(p, m)


def test_curated_anchor_near_optimal_at_eps09():
    eps = EpsilonParams(0.9)
    m = default_fit_matrix(eps)
    lam, _ = dense_smallest(m)
    delta = backflow_of_trial(TrialParams("bessel", ANCHOR_BESSEL), m)
    assert delta < 0
    assert abs(delta) >= 0.97 * abs(lam)


def test_nelder_mead_quadratic():
    lo = np.array([-5.0, -5.0])
    hi = np.array([5.0, 5.0])
    target = np.array([1.3, -2.1])
    x, fx, nfev = _nelder_mead(lambda z: float(np.sum((z - target) ** 2)),
                               np.zeros(2), lo, hi)
    assert np.max(np.abs(x - target)) < 1e-4
    assert nfev <= 2000


def test_nelder_mead_respects_box():
    lo = np.array([0.0])
    hi = np.array([1.0])
    x, fx, _ = _nelder_mead(lambda z: float((z[0] - 3.0) ** 2), np.array([0.5]), lo, hi)
    assert x[0] == pytest.approx(1.0, abs=1e-9)


def _fast_fit_matrix(eps_val):
    return default_fit_matrix(EpsilonParams(eps_val))


def test_maximize_deterministic():
    eps = EpsilonParams(0.9)
    m = _fast_fit_matrix(0.9)
    r1 = maximize_backflow("bessel", eps, restarts=6, seed=123, matrix=m)
    r2 = maximize_backflow("bessel", eps, restarts=6, seed=123, matrix=m)
    assert r1 == r2
    assert r1.to_json(include_trace=True) == r2.to_json(include_trace=True)


def test_maximize_trace_monotone():
    eps = EpsilonParams(0.9)
    res = maximize_backflow("bessel", eps, restarts=10, seed=5, matrix=_fast_fit_matrix(0.9))
    best = [t[2] for t in res.trace]
    assert all(b2 <= b1 + 1e-15 for b1, b2 in zip(best, best[1:]))
    assert res.restarts_used == 10
    assert res.delta < 0


def test_maximize_warm_start_reaches_near_optimum():
    eps = EpsilonParams(0.9)
    m = _fast_fit_matrix(0.9)
    lam, _ = dense_smallest(m)
    res = maximize_backflow("bessel", eps, restarts=6, seed=42, matrix=m)
    assert abs(res.delta) >= 0.97 * abs(lam)


def test_maximize_a6_fixed_pins_coefficient():
    eps = EpsilonParams(0.9)
    res = maximize_backflow("bessel", eps, restarts=4, seed=9,
                            a6_fixed=True, matrix=_fast_fit_matrix(0.9))
    assert res.params.a[5] == A6_FIXED_VALUE
    assert res.params.a6_fixed


def test_maximize_rejects_zero_restarts():
    with pytest.raises(ValueError):
        maximize_backflow("bessel", EpsilonParams(0.9), restarts=0, seed=1)


def _synthetic_solution(params, eps_val=0.9, q0=12.0, n0=240):
    grid = build_grid(q0, n0, 1)
    eta = trial_eval(params, grid.nodes)
    eta = eta / np.sqrt(np.sum(grid.weights * eta * eta))
    if eta[np.argmax(np.abs(eta))] < 0:
        eta = -eta
    return EigenSolution(eps=EpsilonParams(eps_val), lam=-0.025, eta=eta,
                         grid=grid, h_final=1, iterations=0, residual=0.0)


def test_match_self_fit_round_trip():
    truth = TrialParams("bessel", (-2.3, 0.4, 1.0, 1.2, 1.0, 0.8))
    sol = _synthetic_solution(truth)
    res = match_eigenvector("bessel", sol, restarts=8, seed=3,
                            matrix=default_fit_matrix(sol.eps))
    assert res.residual <= 1e-8
    got = trial_eval(res.params, sol.grid.nodes)
    got = got / np.sqrt(np.sum(sol.grid.weights * got * got))
    sign = 1.0 if np.sum(sol.grid.weights * got * sol.eta) >= 0 else -1.0
    assert np.max(np.abs(sign * got - sol.eta)) < 1e-3


def test_match_reports_delta_and_residual(solved):
    sol = solved(1.0)
    res = match_eigenvector("bessel", sol, restarts=6, seed=11,
                            matrix=default_fit_matrix(sol.eps))
    assert res.residual is not None and res.residual >= 0.0
    assert res.delta < 0
    assert abs(res.delta) <= abs(sol.lam)
