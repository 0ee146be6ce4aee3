"""Probability current at the origin and its integrated flux.

A positive-energy wavepacket with momentum envelope g(r) produces the
dimensionless current

    J(tau) = (4/(pi*eps)) * Re[conj(A) * B],
    A(tau) = sum_i w_i U1(r_i) g(r_i) exp(-4i*gamma_i*tau/eps^2),
    B(tau) = likewise with U2,

where U1 = sqrt((gamma+1)/(2*gamma)) and U2 = eps*r/sqrt(2*gamma*(gamma+1))
are the positive-energy spinor weights (U2 written in a form that avoids the
sqrt(gamma-1) cancellation near r = 0).  tau = t/T runs over [0, 1].

The integrated flux delta = integral of J over [0, 1] closes the loop with
the eigenproblem: for an envelope built from a kernel eigenfunction eta via
g = exp(+2i*gamma/eps^2) * eta, the exact tau integral reproduces the
kernel's sinc factor, so delta equals the Rayleigh quotient of eta -- for
the converged eigenvector, delta = lambda up to tau-quadrature error.  That
identity is the primary correctness gate on the phases, the spinor weights
and the 4/(pi*eps) prefactor together.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .eigensolver import EigenSolution
from .kernel import KernelMatrix
from .params import EpsilonParams, QuadGrid, lorentz_factor

DEFAULT_N_TAU = 4001
_NORM_TOL = 1e-6
_TAU_CHUNK = 512


def resolve_n_tau(eps: EpsilonParams, n_tau: int | None = None) -> int:
    """Default tau-sample count: 4001, scaled up as ceil(40/eps^2) for small eps.

    The phase 4*gamma*tau/eps^2 implies O(1/eps^2) oscillations over the
    window, so low eps needs proportionally more samples.
    """
    if n_tau is not None:
        return int(n_tau)
    return max(DEFAULT_N_TAU, math.ceil(40.0 / eps.epsilon**2))


def spinor_weights(r, eps: EpsilonParams):
    """(U1, U2) evaluated stably for r >= 0."""
    g = lorentz_factor(r, eps)
    u1 = np.sqrt((g + 1.0) / (2.0 * g))
    u2 = eps.epsilon * np.asarray(r, dtype=float) / np.sqrt(2.0 * g * (g + 1.0))
    return u1, u2


@dataclass(frozen=True)
class Envelope:
    """Complex momentum envelope g(r_i) on a grid, unit weighted norm."""

    grid: QuadGrid
    values: np.ndarray = field(repr=False)

    @property
    def norm_sq(self) -> float:
        return float(np.sum(self.grid.weights * np.abs(self.values) ** 2))


def envelope_from_eigvec(sol: EigenSolution) -> Envelope:
    """Attach the energy phase to a real eigenfunction: g = exp(+2i*gamma/eps^2)*eta.

    The phase centers the backflow interval on the window; it has unit
    modulus, so normalization carries over from eta.
    """
    if sol.eps.nonrelativistic:
        raise ValueError("current reconstruction requires eps > 0")
    return envelope_from_real(sol.eta, sol.grid, sol.eps)


def envelope_from_real(eta: np.ndarray, grid: QuadGrid, eps: EpsilonParams) -> Envelope:
    """Envelope for any real normalized eigenfunction-like sample vector."""
    if eps.nonrelativistic:
        raise ValueError("current reconstruction requires eps > 0")
    e2 = eps.epsilon**2
    phase = np.exp(2j * lorentz_factor(grid.nodes, eps) / e2)
    values = phase * np.asarray(eta, dtype=float)
    values.setflags(write=False)
    return Envelope(grid=grid, values=values)


@dataclass(frozen=True)
class CurrentTrace:
    """Sampled dimensionless current J(tau) on [0, 1] and its flux integral."""

    eps: EpsilonParams
    taus: np.ndarray = field(repr=False)
    J: np.ndarray = field(repr=False)
    delta: float

    def to_csv(self, path) -> None:
        with open(path, "w") as f:
            f.write("tau,J\n")
            for t, j in zip(self.taus, self.J):
                f.write(f"{t:.17e},{j:.17e}\n")


def current_trace(env: Envelope, eps: EpsilonParams, n_tau: int = DEFAULT_N_TAU) -> CurrentTrace:
    """Sample J(tau) on n_tau uniform points of [0, 1]; delta by trapezoid."""
    if n_tau < 2:
        raise ValueError(f"n_tau must be >= 2, got {n_tau}")
    if eps.nonrelativistic:
        raise ValueError("current reconstruction requires eps > 0")
    dev = abs(env.norm_sq - 1.0)
    if dev > _NORM_TOL:
        raise ValueError(f"envelope not normalized (deviation {dev:g})")

    r = env.grid.nodes
    w = env.grid.weights
    u1, u2 = spinor_weights(r, eps)
    a_base = w * u1 * env.values
    b_base = w * u2 * env.values
    freq = 4.0 * lorentz_factor(r, eps) / eps.epsilon**2

    taus = np.linspace(0.0, 1.0, n_tau)
    J = np.empty(n_tau)
    for start in range(0, n_tau, _TAU_CHUNK):
        chunk = taus[start:start + _TAU_CHUNK]
        phases = np.exp(-1j * freq[:, None] * chunk[None, :])
        A = a_base @ phases
        B = b_base @ phases
        J[start:start + _TAU_CHUNK] = np.real(np.conj(A) * B)
    J *= 4.0 / (np.pi * eps.epsilon)
    delta = float(np.trapezoid(J, taus))
    taus.setflags(write=False)
    J.setflags(write=False)
    return CurrentTrace(eps=eps, taus=taus, J=J, delta=delta)


def rayleigh_quotient(eta: np.ndarray, matrix: KernelMatrix) -> float:
    """(v^T M v)/(v^T v) in symmetrized coordinates, v = sqrt(w) * eta.

    For an exact eigenvector this is its eigenvalue; for anything else it is
    bounded below by the smallest eigenvalue.
    """
    v = np.sqrt(matrix.grid.weights) * np.asarray(eta, dtype=float)
    nsq = float(v @ v)
    if nsq < 1e-24:
        raise ValueError("zero vector has no Rayleigh quotient")
    return float(v @ (matrix.entries @ v) / nsq)
