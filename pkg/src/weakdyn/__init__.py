"""Weak values, weak conditional quasiprobabilities and the unitary dynamics
they encode, for finite-dimensional pure states."""

from .errors import WeakDynError
from .hilbert import (
    HermitianMatrix,
    SpectralObservable,
    StateVector,
    basis_state,
    evolve,
    inner,
    normalize,
    random_hermitian,
    random_state,
    spectral_decompose,
)
from .response import ResponseCurve, imaginary_weak_value_fd, log_derivative, response_curve, transition_probability
from .weakstats import (
    DiagonalUnitary,
    QuasiProbDistribution,
    TensionTriad,
    logical_tension,
    max_transition_unitary,
    reconstruct_output_probability,
    reconstruct_weak_value,
    shifted_distribution,
    weak_conditional_distribution,
    weak_value,
)

__version__ = "0.1.0"
