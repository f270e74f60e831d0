"""Weak values, weak conditional quasiprobabilities and their transformation
under unitaries generated by the measured observable."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import DimensionMismatch, IncompleteBasis, OrthogonalPostselection, UndefinedTension
from .hilbert import SpectralObservable, StateVector, evolve, inner

EPS_ORTH = 1e-12
ORTHONORMAL_TOL = 1e-10
TENSION_FLOOR = 1e-30

Basis = Union[SpectralObservable, Sequence[StateVector]]


def principal_arg(z: complex) -> float:
    """Argument of z in (-pi, pi]; the -pi branch maps to +pi."""
    a = math.atan2(z.imag, z.real)
    return math.pi if a <= -math.pi else a


def as_basis(basis: Basis, dim: int) -> SpectralObservable:
    """Coerce an observable or an orthonormal list of states to a basis object.

    A plain list gets the labels 0..d-1 as eigenvalues.
    """
    if isinstance(basis, SpectralObservable):
        obs = basis
    else:
        states = list(basis)
        if len(states) != dim:
            raise IncompleteBasis(f"basis has {len(states)} elements, state space has dimension {dim}")
        if any(s.dim != dim for s in states):
            raise DimensionMismatch("basis states do not match the state dimension")
        obs = SpectralObservable.from_states(np.arange(len(states), dtype=float), states)
    if obs.dim != dim:
        raise IncompleteBasis(f"basis has {obs.dim} elements, state space has dimension {dim}")
    err = obs.orthonormality_error()
    if err > ORTHONORMAL_TOL:
        raise IncompleteBasis(f"basis is not orthonormal (max Gram deviation {err:.2e})")
    return obs


def _check_overlap(overlap: complex, i: StateVector, f: StateVector, eps: float, what: str):
    if abs(overlap) < eps * i.norm() * f.norm():
        raise OrthogonalPostselection(
            f"{what} = {abs(overlap):.3e} is below the orthogonality threshold {eps:g}"
        )


@dataclass(frozen=True, eq=False)
class QuasiProbDistribution:
    """Complex weak conditional probabilities p(m|if; phi) over a basis."""

    values: np.ndarray
    phi: float = 0.0
    basis_labels: tuple = ()

    def __post_init__(self):
        vals = np.array(self.values, dtype=complex)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if not self.basis_labels:
            object.__setattr__(self, "basis_labels", tuple(range(vals.size)))

    def __len__(self):
        return self.values.size

    def total(self) -> complex:
        return complex(np.sum(self.values))


def conditional_terms(basis: Basis, i: StateVector, f: StateVector) -> np.ndarray:
    """Unnormalized products <f|m><m|i> for every basis element m."""
    if i.dim != f.dim:
        raise DimensionMismatch(f"dimension mismatch: {i.dim}, {f.dim}")
    obs = as_basis(basis, i.dim)
    return np.conj(obs.coefficients(f)) * obs.coefficients(i)


def weak_value(a: SpectralObservable, i: StateVector, f: StateVector, eps: float = EPS_ORTH) -> complex:
    """<f|A|i> / <f|i>."""
    overlap = inner(f, i)
    _check_overlap(overlap, i, f, eps, "|<f|i>|")
    a_i = a.synthesize(a.eigenvalues * a.coefficients(i))
    return inner(f, a_i) / overlap


def weak_conditional_distribution(
    basis: Basis, i: StateVector, f: StateVector, eps: float = EPS_ORTH
) -> QuasiProbDistribution:
    terms = conditional_terms(basis, i, f)
    overlap = inner(f, i)
    _check_overlap(overlap, i, f, eps, "|<f|i>|")
    return QuasiProbDistribution(terms / overlap, 0.0)


def reconstruct_weak_value(eigenvalues: Sequence[float], d: QuasiProbDistribution) -> complex:
    vals = np.asarray(eigenvalues, dtype=float)
    if vals.size != len(d):
        raise DimensionMismatch(f"{vals.size} eigenvalues for a distribution over {len(d)} outcomes")
    return complex(np.sum(vals * d.values))


def shifted_distribution(
    basis: SpectralObservable, phi: float, i: StateVector, f: StateVector, eps: float = EPS_ORTH
) -> QuasiProbDistribution:
    """Conditional probabilities after exp(-i phi A) acts on the initial state.

    Each term picks up the phase exp(-i phi A_m) and the set is renormalized
    by the transformed overlap <f|U(phi)|i>.
    """
    terms = conditional_terms(basis, i, f) * np.exp(-1j * phi * basis.eigenvalues)
    overlap = inner(f, evolve(basis, phi, i))
    _check_overlap(overlap, i, f, eps, f"|<f|U({phi:g})|i>|")
    return QuasiProbDistribution(terms / overlap, float(phi))


def reconstruct_output_probability(
    d0: QuasiProbDistribution, eigenvalues: Sequence[float], phi: float, p_f0: float
) -> float:
    """p(f; phi) rebuilt from the unshifted distribution and p(f; 0)."""
    if d0.phi != 0.0:
        raise ValueError("reconstruction needs the distribution evaluated at phi = 0")
    vals = np.asarray(eigenvalues, dtype=float)
    if vals.size != len(d0):
        raise DimensionMismatch(f"{vals.size} eigenvalues for a distribution over {len(d0)} outcomes")
    amp = np.sum(np.exp(-1j * phi * vals) * d0.values)
    return float(abs(amp) ** 2 * p_f0)


@dataclass(frozen=True, eq=False)
class TensionTriad:
    i: StateVector
    m: StateVector
    f: StateVector
    tension: float
    overlap_magnitude: float


def _bargmann_product(a: complex, b: complex, c: complex) -> complex:
    # Canonical multiplication order. Cyclic relabelings give the same
    # multiset, transpositions its conjugate; both then round identically.
    def key(w):
        return (w.real, abs(w.imag))

    x, y, z = sorted((a, b, c), key=key)
    # a tied pair is either equal or mutually conjugate; multiply it first
    if key(y) == key(z):
        return x * (y * z)
    return (x * y) * z


def logical_tension(i: StateVector, m: StateVector, f: StateVector) -> TensionTriad:
    """Phase of the three-state product <f|m><m|i><i|f>."""
    prod = _bargmann_product(inner(f, m), inner(m, i), inner(i, f))
    mag = abs(prod)
    if mag < TENSION_FLOOR:
        raise UndefinedTension(f"three-state overlap {mag:.3e} vanishes; its phase is undefined")
    return TensionTriad(i, m, f, principal_arg(prod), mag)


@dataclass(frozen=True, eq=False)
class DiagonalUnitary:
    """exp(-i sum_m phases[m] |m><m|)."""

    basis: SpectralObservable
    phases: np.ndarray

    def generator(self) -> SpectralObservable:
        if self.basis.is_computational:
            return SpectralObservable.diagonal(self.phases)
        return SpectralObservable(self.phases, self.basis.eigenvectors)

    def apply(self, s: StateVector) -> StateVector:
        return evolve(self.generator(), 1.0, s)


def max_transition_unitary(
    basis: Basis, i: StateVector, f: StateVector, eps: float = EPS_ORTH
) -> tuple[DiagonalUnitary, float]:
    """Diagonal unitary that cancels the phases of the conditional terms.

    Returns the unitary and the maximal transition probability
    ``(sum_m |<f|m><m|i>|)**2`` it reaches.
    """
    obs = as_basis(basis, i.dim)
    _check_overlap(inner(f, i), i, f, eps, "|<f|i>|")
    terms = conditional_terms(obs, i, f)
    mags = np.abs(terms)
    phases = np.where(mags > 0, np.angle(terms), 0.0)
    phases = np.where(phases <= -np.pi, np.pi, phases)
    return DiagonalUnitary(obs, phases), float(np.sum(mags) ** 2)
