"""Dimensionless parameterization of the backflow problem.

All computations run in dimensionless momentum r, with the single physical
knob being epsilon = sqrt(4*hbar/(m*c^2*T)).  epsilon measures how
relativistic the measurement window T is: epsilon -> 0 recovers the
non-relativistic theory (selected here by epsilon == 0 exactly), while
epsilon ~ 1 means the bulk of the wavepacket moves at relativistic speed.
Physical units enter only through ``epsilon_from_physical``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class EpsilonParams:
    """Relativity parameter epsilon >= 0 (0 = non-relativistic limit)."""

    epsilon: float

    def __post_init__(self):
        if not np.isfinite(self.epsilon) or self.epsilon < 0.0:
            raise ValueError(f"epsilon must be finite and >= 0, got {self.epsilon}")

    @property
    def nonrelativistic(self) -> bool:
        return self.epsilon == 0.0


def lorentz_factor(r, eps: EpsilonParams | float):
    """gamma(r) = sqrt(1 + (eps*r)^2) for dimensionless momentum r >= 0.

    Vectorized over r.  Equals 1 exactly at r = 0 or eps = 0.
    """
    e = eps.epsilon if isinstance(eps, EpsilonParams) else float(eps)
    r = np.asarray(r, dtype=float)
    out = np.sqrt(1.0 + (e * r) ** 2)
    return out if out.ndim else float(out)


def epsilon_from_physical(mass: float, period: float, hbar: float, c: float) -> EpsilonParams:
    """Convert (m, T, hbar, c) to the dimensionless epsilon = sqrt(4*hbar/(m*c^2*T))."""
    for name, v in (("mass", mass), ("period", period), ("hbar", hbar), ("c", c)):
        if not np.isfinite(v) or v <= 0.0:
            raise ValueError(f"{name} must be finite and > 0, got {v}")
    return EpsilonParams(float(np.sqrt(4.0 * hbar / (mass * c * c * period))))


@dataclass(frozen=True)
class QuadGrid:
    """Uniform momentum grid on [0, q0*sqrt(h)] with trapezoidal weights.

    Refinement level h >= 1 widens the range by sqrt(h) and multiplies the
    node count by h, so the spacing shrinks like 1/sqrt(h) while the domain
    grows: both truncation and discretization error vanish as h increases.
    """

    q0: float
    n0: int
    h: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @property
    def upper(self) -> float:
        return self.q0 * np.sqrt(self.h)

    @property
    def size(self) -> int:
        return self.nodes.size


def build_grid(q0: float, n0: int, h: int) -> QuadGrid:
    """Build the level-h grid: n0*h uniform nodes on [0, q0*sqrt(h)].

    Trapezoidal weights (end weights are half the interior weight), so the
    weights integrate constants exactly over the range.
    """
    if not np.isfinite(q0) or q0 <= 0.0:
        raise ValueError(f"q0 must be > 0, got {q0}")
    if n0 < 2:
        raise ValueError(f"n0 must be >= 2, got {n0}")
    if h < 1:
        raise ValueError(f"h must be >= 1, got {h}")
    n = n0 * h
    upper = q0 * np.sqrt(h)
    nodes = np.linspace(0.0, upper, n)
    spacing = upper / (n - 1)
    weights = np.full(n, spacing)
    weights[0] = weights[-1] = spacing / 2.0
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadGrid(q0=float(q0), n0=int(n0), h=int(h), nodes=nodes, weights=weights)
