"""Free particle pinned at x = 0 at times -tau/2 and +tau/2, discretized on a
cell-centered position grid.

The initial and final states are opposite chirps exp(+-i m x^2 / (hbar tau)).
Their weak conditional position density is a Fresnel chirp whose unwrapped
phase, times hbar, is the action of the momentum kick that joins the two
straight-line segments at x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import AliasedGrid, OutOfRange, ValidationError, ZeroAmplitude
from .hilbert import SpectralObservable, StateVector, evolve, inner, normalize
from .weakstats import EPS_ORTH, conditional_terms, shifted_distribution, weak_conditional_distribution

NORMALIZATION_MODES = ("numeric", "analytic")
EIGEN_RESIDUAL_TOL = 0.05


@dataclass(frozen=True)
class FreeParticleConfig:
    mass: float = 1.0
    hbar: float = 1.0
    tau: float = 1.0
    length: float = 80.0
    points: int = 16384

    def __post_init__(self):
        for name in ("mass", "hbar", "tau", "length"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ValidationError(f"{name} must be a positive finite number, got {v!r}")
        if int(self.points) != self.points or self.points < 16 or self.points % 2:
            raise ValidationError(f"points must be an even integer >= 16, got {self.points!r}")
        object.__setattr__(self, "points", int(self.points))

    @property
    def dx(self) -> float:
        return self.length / self.points

    @property
    def chirp_rate(self) -> float:
        """m / (hbar tau), the curvature of the state phases."""
        return self.mass / (self.hbar * self.tau)

    @property
    def edge_phase_step(self) -> float:
        """Phase increment of a single chirp between neighbouring points at the box edge."""
        return 2.0 * self.chirp_rate * (self.length / 2) * self.dx

    def grid(self) -> np.ndarray:
        return -self.length / 2 + (np.arange(self.points) + 0.5) * self.dx


@dataclass(frozen=True, eq=False)
class FreeParticleScene:
    config: FreeParticleConfig
    xs: np.ndarray
    i_state: StateVector
    f_state: StateVector
    kick: float = 0.0
    eigen_residuals: tuple = field(default=(0.0, 0.0))

    @property
    def dx(self) -> float:
        return self.config.dx

    def position_observable(self) -> SpectralObservable:
        return SpectralObservable.diagonal(self.xs)

    def p_i_at(self, x):
        """Transverse momentum that carries the particle from the first slit to x."""
        return 2 * self.config.mass * np.asarray(x) / self.config.tau

    def p_f_at(self, x):
        """Transverse momentum that carries the particle from x to the second slit."""
        return -2 * self.config.mass * np.asarray(x) / self.config.tau

    def anchor_index(self) -> int:
        return int(np.argmin(np.abs(self.xs)))


def _central_momentum(psi: np.ndarray, dx: float, hbar: float) -> np.ndarray:
    return -1j * hbar * (psi[2:] - psi[:-2]) / (2 * dx)


def eigen_residuals(scene: FreeParticleScene) -> tuple[float, float]:
    """Relative residuals of (x -+ tau/(2m) P) acting on the initial/final state.

    P is a central finite difference; only the central half of the grid
    enters, so one-sided stencils never contribute.
    """
    cfg = scene.config
    xs = scene.xs[1:-1]
    central = np.abs(xs) <= cfg.length / 4
    k = cfg.tau / (2 * cfg.mass)
    out = []
    for psi, sign in ((scene.i_state.amplitudes, -1.0), (scene.f_state.amplitudes, +1.0)):
        x_psi = xs * psi[1:-1]
        resid = x_psi + sign * k * _central_momentum(psi, cfg.dx, cfg.hbar)
        out.append(float(np.linalg.norm(resid[central]) / np.linalg.norm(x_psi[central])))
    return out[0], out[1]


def build_scene(config: FreeParticleConfig | None = None) -> FreeParticleScene:
    cfg = config or FreeParticleConfig()
    if not cfg.edge_phase_step < math.pi:
        raise AliasedGrid(
            f"chirp phase step at the box edge is {cfg.edge_phase_step:.3g} rad (must stay below pi); "
            "increase points or shrink length"
        )
    xs = cfg.grid()
    chirp = cfg.chirp_rate * xs**2
    scene = FreeParticleScene(cfg, xs, normalize(np.exp(1j * chirp)), normalize(np.exp(-1j * chirp)))
    res = eigen_residuals(scene)
    if max(res) >= EIGEN_RESIDUAL_TOL:
        raise AliasedGrid(f"chirp states miss their eigenvalue equations (residuals {res[0]:.3g}, {res[1]:.3g})")
    return replace(scene, eigen_residuals=res)


def kick_scene(scene: FreeParticleScene, delta_p: float) -> FreeParticleScene:
    """Apply exp(-i delta_p x / hbar) to the initial state."""
    i_new = evolve(scene.position_observable(), delta_p / scene.config.hbar, scene.i_state)
    return replace(scene, i_state=i_new, kick=scene.kick + delta_p)


def analytic_overlap(config: FreeParticleConfig, kick: float = 0.0) -> complex:
    """Continuum <f|U(kick)|i> scaled to the unit-norm grid states."""
    cfg = config
    mag = math.sqrt(math.pi * cfg.hbar * cfg.tau / (2 * cfg.mass)) / cfg.length
    phase = math.pi / 4 - kick**2 * cfg.tau / (8 * cfg.mass * cfg.hbar)
    return mag * complex(math.cos(phase), math.sin(phase))


def unwrap_from(phase: np.ndarray, anchor: int) -> np.ndarray:
    """Continuity scan outward from ``anchor``, which keeps its principal value."""
    right = np.unwrap(phase[anchor:])
    left = np.unwrap(phase[: anchor + 1][::-1])[::-1]
    return np.concatenate([left[:-1], right])


@dataclass(frozen=True, eq=False)
class ConditionalDensity:
    """Weak conditional position density, p_k / dx on the grid."""

    xs: np.ndarray
    values: np.ndarray
    phase_unwrapped: np.ndarray
    dx: float

    @property
    def arg(self) -> np.ndarray:
        return np.angle(self.values)

    def total(self) -> complex:
        return complex(np.sum(self.values) * self.dx)

    def phase_gradient(self) -> np.ndarray:
        return np.gradient(self.phase_unwrapped, self.dx)

    def at(self, x: float) -> complex:
        return complex(self.values[int(np.argmin(np.abs(self.xs - x)))])


def _density(scene: FreeParticleScene, values: np.ndarray) -> ConditionalDensity:
    phase = unwrap_from(np.angle(values), scene.anchor_index())
    return ConditionalDensity(scene.xs, values, phase, scene.dx)


def numeric_conditional_density(
    scene: FreeParticleScene, normalization: str = "numeric", eps: float = EPS_ORTH
) -> ConditionalDensity:
    """p(x|if) on the grid.

    ``numeric`` divides by the grid sum <f|i>; ``analytic`` substitutes the
    continuum Fresnel value, isolating the truncation error of the box.
    """
    pos = scene.position_observable()
    if normalization == "numeric":
        p = weak_conditional_distribution(pos, scene.i_state, scene.f_state, eps).values
    elif normalization == "analytic":
        p = conditional_terms(pos, scene.i_state, scene.f_state) / analytic_overlap(scene.config, scene.kick)
    else:
        raise ValidationError(f"normalization must be one of {NORMALIZATION_MODES}, got {normalization!r}")
    return _density(scene, p / scene.dx)


def analytic_conditional_density(x, config: FreeParticleConfig, delta_p: float = 0.0):
    """Closed-form continuum density, optionally after a momentum kick."""
    cfg = config
    center = delta_p * cfg.tau / (4 * cfg.mass)
    amp = math.sqrt(2 * cfg.mass / (math.pi * cfg.hbar * cfg.tau))
    x = np.asarray(x, dtype=float)
    out = amp * np.exp(1j * (2 * cfg.chirp_rate * (x - center) ** 2 - math.pi / 4))
    return complex(out) if out.ndim == 0 else out


def apply_kick(
    scene: FreeParticleScene, delta_p: float, normalization: str = "numeric", eps: float = EPS_ORTH
) -> ConditionalDensity:
    """Density after exp(-i delta_p x / hbar) acts on the initial state.

    The conditional terms pick up the kick phases and are renormalized by
    the transformed overlap; ``analytic`` swaps that overlap for its
    continuum value.
    """
    if normalization not in NORMALIZATION_MODES:
        raise ValidationError(f"normalization must be one of {NORMALIZATION_MODES}, got {normalization!r}")
    pos = scene.position_observable()
    phi = delta_p / scene.config.hbar
    values = shifted_distribution(pos, phi, scene.i_state, scene.f_state, eps).values
    if normalization == "analytic":
        grid_overlap = inner(scene.f_state, evolve(pos, phi, scene.i_state))
        values = values * (grid_overlap / analytic_overlap(scene.config, scene.kick + delta_p))
    return _density(scene, values / scene.dx)


def action_profile(d: ConditionalDensity, config: FreeParticleConfig) -> np.ndarray:
    if np.any(np.abs(d.values) < 1e-300):
        raise ZeroAmplitude("conditional density vanishes somewhere; its phase is undefined there")
    return config.hbar * d.phase_unwrapped


def momentum_transfer(d: ConditionalDensity, x: float, config: FreeParticleConfig) -> float:
    """hbar times the phase gradient at x (linear interpolation between grid points)."""
    if abs(x) > config.length / 4:
        raise OutOfRange(f"x = {x} lies outside the central half-grid |x| <= {config.length / 4}")
    return config.hbar * float(np.interp(x, d.xs, d.phase_gradient()))


def stationary_point(d: ConditionalDensity) -> float:
    """Grid position where the unwrapped phase is flattest."""
    return float(d.xs[int(np.argmin(np.abs(d.phase_gradient())))])


def positivity_boundary(config: FreeParticleConfig) -> float:
    return math.sqrt(3 * math.pi * config.hbar * config.tau / (8 * config.mass))


def real_sign_change(d: ConditionalDensity) -> tuple[float, float]:
    """First pair of adjacent points with x > 0 where Re p changes sign."""
    pos = np.nonzero(d.xs > 0)[0]
    re = d.values.real[pos]
    flips = np.nonzero(np.signbit(re[:-1]) != np.signbit(re[1:]))[0]
    if flips.size == 0:
        raise OutOfRange("real part keeps its sign over the whole positive half-grid")
    k = pos[flips[0]]
    return float(d.xs[k]), float(d.xs[k + 1])


def tail_cancellation(d: ConditionalDensity, cutoff_x: float) -> float:
    """Magnitude of the net contribution from |x| > cutoff_x."""
    half = d.xs[-1] + d.dx / 2
    if not 0 <= cutoff_x <= half:
        raise OutOfRange(f"cutoff {cutoff_x} outside [0, {half}]")
    mask = np.abs(d.xs) > cutoff_x
    return float(abs(np.sum(d.values[mask]) * d.dx))
