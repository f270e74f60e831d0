"""Finite-dimensional complex linear algebra: states, Hermitian observables,
their spectral decomposition and the unitaries they generate."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ConvergenceFailure, DimensionMismatch, ValidationError, ZeroVector

MAX_JACOBI_DIM = 64
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class StateVector:
    """Pure state over a finite orthonormal basis.

    Build with :func:`normalize`; the constructor itself does not rescale.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.size < 1:
            raise DimensionMismatch("a state needs a one-dimensional, non-empty amplitude array")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def __len__(self):
        return self.dim

    def __getitem__(self, k):
        return self.amplitudes[k]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def with_global_phase(self, theta: float) -> "StateVector":
        return StateVector(self.amplitudes * np.exp(1j * theta))


def basis_state(dim: int, k: int) -> StateVector:
    amps = np.zeros(dim, dtype=complex)
    amps[k] = 1.0
    return StateVector(amps)


def _check_dims(*dims: int) -> None:
    if len(set(dims)) > 1:
        raise DimensionMismatch(f"dimension mismatch: {', '.join(map(str, dims))}")


def inner(a: StateVector, b: StateVector) -> complex:
    """<a|b>, antilinear in the first argument.

    Real and imaginary parts are accumulated as separate real dot products so
    that ``inner(a, b) == inner(b, a).conjugate()`` holds bitwise.
    """
    _check_dims(a.dim, b.dim)
    ar, ai = a.amplitudes.real, a.amplitudes.imag
    br, bi = b.amplitudes.real, b.amplitudes.imag
    re = float(np.dot(ar, br)) + float(np.dot(ai, bi))
    im = float(np.dot(ar, bi)) - float(np.dot(ai, br))
    return complex(re, im)


def normalize(v: Sequence[complex]) -> StateVector:
    amps = np.asarray(v, dtype=complex)
    if amps.ndim != 1 or amps.size < 1:
        raise DimensionMismatch("a state needs a one-dimensional, non-empty amplitude array")
    n = np.linalg.norm(amps)
    if not n >= 1e-300:
        raise ZeroVector("cannot normalize a zero vector")
    return StateVector(amps / n)


def random_state(dim: int, seed: int) -> StateVector:
    """Haar-random pure state from complex Gaussians.

    Uniforms come from the counter-based Philox generator; the Box-Muller
    transform turns each pair into one complex standard normal amplitude.
    """
    if dim < 1:
        raise ValidationError("dim must be >= 1")
    rng = np.random.Generator(np.random.Philox(seed))
    u1 = rng.random(dim)
    u2 = rng.random(dim)
    r = np.sqrt(-2.0 * np.log1p(-u1))
    amps = r * np.cos(2 * np.pi * u2) + 1j * r * np.sin(2 * np.pi * u2)
    return normalize(amps)


class HermitianMatrix:
    """Square complex matrix, silently symmetrized to (H + H^dagger)/2."""

    def __init__(self, entries):
        m = np.asarray(entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise DimensionMismatch(f"expected a non-empty square matrix, got shape {m.shape}")
        self.entries = _frozen((m + m.conj().T) / 2)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


def random_hermitian(dim: int, seed: int) -> HermitianMatrix:
    """GUE sample scaled so the spectrum sits roughly in [-2, 2]."""
    rng = np.random.Generator(np.random.Philox(seed))
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return HermitianMatrix((g + g.conj().T) / (2 * math.sqrt(2 * dim)))


class SpectralObservable:
    """Hermitian observable stored as eigenvalues plus orthonormal eigenvectors.

    ``eigenvectors`` holds the eigenvectors as columns. ``None`` stands for
    the computational basis, which keeps diagonal observables on large grids
    (position operators) cheap.
    """

    def __init__(self, eigenvalues, eigenvectors: Optional[np.ndarray] = None):
        vals = np.asarray(eigenvalues, dtype=float)
        if vals.ndim != 1 or vals.size < 1:
            raise DimensionMismatch("eigenvalues must be a non-empty 1-d sequence")
        self.eigenvalues = vals.copy()
        self.eigenvalues.setflags(write=False)
        if eigenvectors is None:
            self._vecs = None
        else:
            vecs = np.asarray(eigenvectors, dtype=complex)
            if vecs.shape != (vals.size, vals.size):
                raise DimensionMismatch(
                    f"eigenvector matrix shape {vecs.shape} does not match {vals.size} eigenvalues"
                )
            self._vecs = _frozen(vecs)

    @classmethod
    def diagonal(cls, eigenvalues) -> "SpectralObservable":
        return cls(eigenvalues, None)

    @classmethod
    def from_states(cls, eigenvalues, states: Sequence[StateVector]) -> "SpectralObservable":
        if len(states) == 0:
            raise DimensionMismatch("empty basis")
        return cls(eigenvalues, np.column_stack([s.amplitudes for s in states]))

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    @property
    def is_computational(self) -> bool:
        return self._vecs is None

    @property
    def eigenvectors(self) -> np.ndarray:
        if self._vecs is None:
            return np.eye(self.dim, dtype=complex)
        return self._vecs

    def basis_states(self) -> list[StateVector]:
        return [StateVector(col) for col in self.eigenvectors.T]

    def coefficients(self, s: StateVector) -> np.ndarray:
        """Components <m|s> in the eigenbasis."""
        _check_dims(self.dim, s.dim)
        if self._vecs is None:
            return np.array(s.amplitudes)
        return self._vecs.conj().T @ s.amplitudes

    def synthesize(self, coeffs: np.ndarray) -> StateVector:
        if self._vecs is None:
            return StateVector(coeffs)
        return StateVector(self._vecs @ coeffs)

    def matrix(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T

    def orthonormality_error(self) -> float:
        if self._vecs is None:
            return 0.0
        gram = self._vecs.conj().T @ self._vecs
        return float(np.max(np.abs(gram - np.eye(self.dim))))


def _jacobi_rotate(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    apq = a[p, q]
    r = abs(apq)
    if r == 0.0:
        return
    # phase-fix column q so the 2x2 block becomes real symmetric, then rotate
    ph = apq / r
    theta = 0.5 * math.atan2(2.0 * r, a[p, p].real - a[q, q].real)
    c, s = math.cos(theta), math.sin(theta)
    g = np.array([[c, -s], [s * ph.conjugate(), c * ph.conjugate()]])
    idx = [p, q]
    a[:, idx] = a[:, idx] @ g
    a[idx, :] = g.conj().T @ a[idx, :]
    a[p, q] = a[q, p] = 0.0
    a[p, p] = a[p, p].real
    a[q, q] = a[q, q].real
    v[:, idx] = v[:, idx] @ g


def _offdiag_norm(a: np.ndarray) -> float:
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))


def spectral_decompose(h) -> SpectralObservable:
    """Diagonalize a Hermitian matrix by cyclic complex Jacobi sweeps.

    Eigenvalues come back ascending. Each eigenvector is phase-fixed so its
    first significant component is real and positive.
    """
    if not isinstance(h, HermitianMatrix):
        h = HermitianMatrix(h)
    n = h.dim
    if n > MAX_JACOBI_DIM:
        raise DimensionMismatch(f"spectral_decompose supports dim <= {MAX_JACOBI_DIM}, got {n}")
    a = np.array(h.entries, dtype=complex)
    v = np.eye(n, dtype=complex)
    scale = float(np.linalg.norm(a))
    target = JACOBI_TOL * scale

    for _ in range(JACOBI_MAX_SWEEPS + 1):
        if _offdiag_norm(a) <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                _jacobi_rotate(a, v, p, q)
    else:
        raise ConvergenceFailure(
            f"Jacobi iteration did not converge in {JACOBI_MAX_SWEEPS} sweeps "
            f"(off-diagonal norm {_offdiag_norm(a):.3e})"
        )

    vals = np.diag(a).real
    order = np.argsort(vals, kind="stable")
    vals = vals[order]
    v = v[:, order]
    for k in range(n):
        col = v[:, k]
        j = int(np.argmax(np.abs(col) > 1e-8))
        v[:, k] = col * (abs(col[j]) / col[j])
    return SpectralObservable(vals, v)


def evolve(g: SpectralObservable, phi: float, s: StateVector) -> StateVector:
    """Apply exp(-i phi G) to s through the spectral decomposition of G."""
    c = g.coefficients(s)
    return g.synthesize(np.exp(-1j * phi * g.eigenvalues) * c)
