"""Epsilon sweeps: eigenvalue table, closed-form model, and fit-quality columns.

The maximum backflow magnitude decays with epsilon and is well described by

    c_rbf(eps) = c_bf * exp(-(4*eps/9) * (1 - 4*alpha*eps))

with c_bf = 0.0384517 the non-relativistic backflow constant and alpha the
fine-structure constant.  The scan compares converged eigenvalues with the
model and, optionally, tabulates the backflow achieved by the trial-function
fits (six columns: both families x {maximize, match, match with a6 = 2/3}).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import eigensolver as es
from .fitting import default_fit_matrix, match_eigenvector, maximize_backflow
from .params import EpsilonParams

C_BF = 0.0384517
ALPHA_FINE_STRUCTURE = 0.0072973525693

FIT_COLUMNS = ("airy_max", "airy_match", "airy_match_a6",
               "bessel_max", "bessel_match", "bessel_match_a6")

_MODE_INDEX = {"max": 0, "match": 1, "match_a6": 2}
_FAMILY_INDEX = {"airy": 0, "bessel": 1}


def closed_form_flux(eps: EpsilonParams | float) -> float:
    """Model value for |lambda| at the given epsilon (positive magnitude)."""
    e = eps.epsilon if isinstance(eps, EpsilonParams) else float(eps)
    if e < 0:
        raise ValueError("epsilon must be >= 0")
    return C_BF * float(np.exp(-(4.0 * e / 9.0) * (1.0 - 4.0 * ALPHA_FINE_STRUCTURE * e)))


@dataclass
class ScanRow:
    """One epsilon's worth of scan output; error stores a per-row failure."""

    epsilon: float
    lam: float | None = None
    model: float | None = None
    rel_err: float | None = None
    fit_deltas: dict = field(default_factory=dict)
    error: str | None = None


def _cell_seed(seed: int, row: int, family: str, mode: str) -> int:
    # stable per-cell stream regardless of execution order
    return ((seed * 1_000_003 + row * 101 + _FAMILY_INDEX[family] * 10
             + _MODE_INDEX[mode]) & 0x7FFFFFFF)


def _solve_row(e, q0, n0, eig_tol, refine_tol, h_max):
    if e <= 0:
        raise ValueError(f"scan epsilons must be > 0, got {e}")
    row = ScanRow(epsilon=float(e))
    row.model = closed_form_flux(e)
    sol = None
    try:
        sol = es.solve_converged(EpsilonParams(float(e)), q0=q0, n0=n0,
                                 eig_tol=eig_tol, refine_tol=refine_tol, h_max=h_max)
        row.lam = sol.lam
        row.rel_err = abs((abs(sol.lam) - row.model) / row.model)
    except (es.EigensolverError, es.RefinementError) as exc:
        row.error = str(exc)
    return row, sol


def eigen_scan(eps_list, q0: float = es.DEFAULT_Q0, n0: int = es.DEFAULT_N0,
               eig_tol: float = es.DEFAULT_EIG_TOL, refine_tol: float = es.DEFAULT_REFINE_TOL,
               h_max: int = es.DEFAULT_H_MAX) -> list[ScanRow]:
    """Converged eigenvalue and model comparison for each epsilon, in order.

    A failed solve is recorded in its row; the scan continues.
    """
    return [_solve_row(e, q0, n0, eig_tol, refine_tol, h_max)[0] for e in eps_list]


def fit_scan(eps_list, families=("airy", "bessel"), modes=("max", "match", "match_a6"),
             restarts: int = 200, seed: int = 0, q0: float = es.DEFAULT_Q0,
             n0: int = es.DEFAULT_N0, eig_tol: float = es.DEFAULT_EIG_TOL,
             refine_tol: float = es.DEFAULT_REFINE_TOL, h_max: int = es.DEFAULT_H_MAX) -> list[ScanRow]:
    """eigen_scan plus fit-delta columns for the requested families/modes.

    All six deltas of a row are Rayleigh quotients on the same fit-grade
    matrix, so they are directly comparable with each other and with the
    converged lam.  Per-cell failures are recorded in the row's error field;
    other cells still fill in.  Deterministic for a fixed seed.
    """
    for fam in families:
        if fam not in _FAMILY_INDEX:
            raise ValueError(f"unknown family {fam!r}")
    for mode in modes:
        if mode not in _MODE_INDEX:
            raise ValueError(f"unknown mode {mode!r}")

    rows = []
    for i, e in enumerate(eps_list):
        row, sol = _solve_row(e, q0, n0, eig_tol, refine_tol, h_max)
        rows.append(row)
        eps = EpsilonParams(row.epsilon)
        fit_matrix = default_fit_matrix(eps)
        for fam in families:
            for mode in modes:
                col = f"{fam}_{mode}"
                cell_seed = _cell_seed(seed, i, fam, mode)
                try:
                    if mode == "max":
                        res = maximize_backflow(fam, eps, restarts, cell_seed,
                                                matrix=fit_matrix)
                    else:
                        if sol is None:
                            raise RuntimeError("no converged eigenvector to match")
                        res = match_eigenvector(fam, sol, restarts, cell_seed,
                                                a6_fixed=(mode == "match_a6"),
                                                matrix=fit_matrix)
                    row.fit_deltas[col] = res.delta
                except Exception as exc:  # per-cell failure, keep scanning
                    row.error = (row.error + "; " if row.error else "") + f"{col}: {exc}"
    return rows


def write_scan_csv(rows, path, with_fits: bool = False) -> None:
    """CSV with fixed column order; missing cells are left empty."""
    header = "epsilon,lambda,model,rel_err"
    if with_fits:
        header += "," + ",".join(FIT_COLUMNS)

    def fmt(v):
        return "" if v is None else f"{v:.17e}"

    with open(path, "w") as f:
        f.write(header + "\n")
        for row in rows:
            cells = [f"{row.epsilon:.17e}", fmt(row.lam), fmt(row.model), fmt(row.rel_err)]
            if with_fits:
                cells += [fmt(row.fit_deltas.get(c)) for c in FIT_COLUMNS]
            f.write(",".join(cells) + "\n")
