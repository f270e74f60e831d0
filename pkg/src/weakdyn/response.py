"""Transition-probability response to generated unitaries and the
finite-difference route to the imaginary weak value."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidRange, NumericalUnderflow, OrthogonalPostselection
from .hilbert import SpectralObservable, StateVector, evolve, inner
from .weakstats import EPS_ORTH

DEFAULT_FD_STEP = 1e-3
LOG_FLOOR = 1e-300


@dataclass(frozen=True, eq=False)
class ResponseCurve:
    phis: np.ndarray
    probabilities: np.ndarray
    generator_eigenvalues: np.ndarray

    def __len__(self):
        return self.phis.size


def transition_probability(i: StateVector, f: StateVector, g: SpectralObservable, phi: float) -> float:
    """|<f|exp(-i phi G)|i>|^2."""
    return abs(inner(f, evolve(g, phi, i))) ** 2


def log_derivative(
    i: StateVector, f: StateVector, g: SpectralObservable, phi: float = 0.0, step: float = DEFAULT_FD_STEP
) -> float:
    """Central difference of (1/2) d/dphi ln p(f; phi) at an arbitrary phi.

    At phi = 0 this is the finite-difference estimate of Im <G>_weak.
    """
    if not step > 0:
        raise InvalidRange(f"finite-difference step must be positive, got {step}")
    p_plus = transition_probability(i, f, g, phi + step)
    p_minus = transition_probability(i, f, g, phi - step)
    if p_plus < LOG_FLOOR or p_minus < LOG_FLOOR:
        raise NumericalUnderflow(
            f"probe probabilities {p_plus:.3e}, {p_minus:.3e} underflow; p(f;phi) has a zero near phi={phi}"
        )
    return 0.5 * (math.log(p_plus) - math.log(p_minus)) / (2.0 * step)


def imaginary_weak_value_fd(
    i: StateVector,
    f: StateVector,
    g: SpectralObservable,
    step: float = DEFAULT_FD_STEP,
    eps: float = EPS_ORTH,
) -> float:
    p0 = transition_probability(i, f, g, 0.0)
    if p0 < (eps * i.norm() * f.norm()) ** 2:
        raise OrthogonalPostselection(f"p(f|i) = {p0:.3e}: post-selection is orthogonal to the input")
    return log_derivative(i, f, g, 0.0, step)


def response_curve(
    i: StateVector,
    f: StateVector,
    g: SpectralObservable,
    phi_min: float,
    phi_max: float,
    steps: int,
) -> ResponseCurve:
    if steps < 2 or not phi_min < phi_max:
        raise InvalidRange(f"need steps >= 2 and phi_min < phi_max, got {steps}, [{phi_min}, {phi_max}]")
    phis = np.linspace(phi_min, phi_max, steps)
    probs = np.array([transition_probability(i, f, g, float(p)) for p in phis])
    return ResponseCurve(phis, probs, np.array(g.eigenvalues))
