"""Backflow kernel evaluation and Nystrom assembly.

The maximum probability flux through the origin over a window T is the
extreme eigenvalue of a real symmetric integral operator on the positive
momentum half-line.  Its kernel is

    K(r, s) = (1/pi) * [r*(g_s+1) + s*(g_r+1)]
              / sqrt(g_r*(g_r+1)*g_s*(g_s+1)) * sinc(2*(g_r-g_s)/eps^2)

with g = lorentz_factor and sinc(x) = sin(x)/x.  As eps -> 0 this reduces
to the non-relativistic kernel (1/pi)*sin(r^2-s^2)/(r-s).  Backflow states
live at the negative end of the spectrum; the algebraically smallest
eigenvalue is minus the maximum backflow.

The sinc argument is never formed as a difference of Lorentz factors:
g_r - g_s = eps^2*(r^2-s^2)/(g_r+g_s) exactly, so we evaluate the argument
as 2*(r^2-s^2)/(g_r+g_s), which stays accurate for small eps and makes the
r = s diagonal exact (sinc(0) = 1) without a separate limit branch.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .params import EpsilonParams, QuadGrid, lorentz_factor

_SINC_SERIES_CUT = 1e-4


def _sinc(x):
    """sin(x)/x with a short series for |x| < 1e-4 to dodge the 0/0."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < _SINC_SERIES_CUT
    safe = np.where(small, 1.0, x)
    return np.where(small, 1.0 - x * x / 6.0 + x**4 / 120.0, np.sin(safe) / safe)


def kernel_rel(r, s, eps: EpsilonParams):
    """Relativistic kernel K(r, s) for eps > 0.  Broadcasts over r, s.

    The diagonal value is 2r/(pi*gamma(r)).
    """
    if eps.epsilon == 0.0:
        raise ValueError("eps = 0 selects the non-relativistic kernel; use kernel_nonrel")
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    gr = lorentz_factor(r, eps)
    gs = lorentz_factor(s, eps)
    arg = 2.0 * (r * r - s * s) / (gr + gs)
    pref = (r * (gs + 1.0) + s * (gr + 1.0)) / np.sqrt(gr * (gr + 1.0) * gs * (gs + 1.0))
    out = pref * _sinc(arg) / np.pi
    return out if np.ndim(out) else float(out)


def kernel_nonrel(r, s):
    """Non-relativistic kernel (1/pi)*sin(r^2-s^2)/(r-s), diagonal 2r/pi."""
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    out = (r + s) * _sinc(r * r - s * s) / np.pi
    return out if np.ndim(out) else float(out)


@dataclass(frozen=True)
class KernelMatrix:
    """Symmetrized Nystrom discretization sqrt(w_i)*K(r_i, r_j)*sqrt(w_j).

    Eigenvalues approximate those of the integral operator; an eigenvector v
    of the matrix corresponds to eigenfunction samples v_i / sqrt(w_i).
    """

    eps: EpsilonParams
    grid: QuadGrid
    entries: np.ndarray = field(repr=False)
    symmetrized: bool = True

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def dump_csv(self, path) -> None:
        """Debug dump: one matrix row per line, full-precision scientific."""
        np.savetxt(path, self.entries, fmt="%.17e", delimiter=",")


def assemble(eps: EpsilonParams, grid: QuadGrid) -> KernelMatrix:
    """Assemble the dense symmetrized kernel matrix on the given grid.

    eps.epsilon == 0 routes to the non-relativistic kernel.
    """
    r = grid.nodes[:, None]
    s = grid.nodes[None, :]
    if eps.nonrelativistic:
        K = kernel_nonrel(r, s)
    else:
        K = kernel_rel(r, s, eps)
    sw = np.sqrt(grid.weights)
    entries = sw[:, None] * K * sw[None, :]
    entries.setflags(write=False)
    return KernelMatrix(eps=eps, grid=grid, entries=entries)
