"""Relativistic quantum backflow: eigenvalues, currents and trial-function fits."""

from .params import EpsilonParams, QuadGrid, build_grid, epsilon_from_physical, lorentz_factor
from .kernel import KernelMatrix, assemble, kernel_nonrel, kernel_rel
from .specfun import airy_ai, bessel_j0
from .eigensolver import (EigenSolution, EigensolverError, RefinementError,
                          smallest_eig, solve_converged, solve_nonrel)
from .current import (CurrentTrace, Envelope, current_trace, envelope_from_eigvec,
                      envelope_from_real, rayleigh_quotient, resolve_n_tau, spinor_weights)
from .fitting import (FitError, FitResult, TrialParams, backflow_of_trial,
                      default_fit_matrix, match_eigenvector, maximize_backflow, trial_eval)
from .scan import ScanRow, closed_form_flux, eigen_scan, fit_scan, write_scan_csv

__version__ = "0.1.0"

__all__ = [
    "EpsilonParams", "QuadGrid", "build_grid", "epsilon_from_physical", "lorentz_factor",
    "KernelMatrix", "assemble", "kernel_nonrel", "kernel_rel",
    "airy_ai", "bessel_j0",
    "EigenSolution", "EigensolverError", "RefinementError",
    "smallest_eig", "solve_converged", "solve_nonrel",
    "CurrentTrace", "Envelope", "current_trace", "envelope_from_eigvec",
    "envelope_from_real", "rayleigh_quotient", "resolve_n_tau", "spinor_weights",
    "FitError", "FitResult", "TrialParams", "backflow_of_trial",
    "default_fit_matrix", "match_eigenvector", "maximize_backflow", "trial_eval",
    "ScanRow", "closed_form_flux", "eigen_scan", "fit_scan", "write_scan_csv",
]
