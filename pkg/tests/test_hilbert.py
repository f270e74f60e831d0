import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from weakdyn.errors import ConvergenceFailure, DimensionMismatch, ZeroVector
from weakdyn.hilbert import (
    HermitianMatrix,
    SpectralObservable,
    basis_state,
    evolve,
    inner,
    normalize,
    random_hermitian,
    random_state,
    spectral_decompose,
)

seeds = st.integers(min_value=0, max_value=2**32)
dims = st.integers(min_value=1, max_value=12)
phases = st.floats(min_value=-10, max_value=10, allow_nan=False)


class TestInner:
    def test_self_overlap_is_one(self):
        s = random_state(5, 3)
        assert inner(s, s) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal_basis_states(self):
        assert inner(basis_state(2, 0), basis_state(2, 1)) == 0

    def test_hand_computed_overlap(self):
        # conj(1/sqrt2) * 1 + conj(-i/sqrt2) * 0
        a = normalize([1, -1j])
        z = inner(a, basis_state(2, 0))
        assert z.real == pytest.approx(0.7071067811865476, abs=1e-15)
        assert z.imag == pytest.approx(0.0, abs=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            inner(basis_state(2, 0), basis_state(3, 0))

    @given(seeds, seeds, dims)
    def test_conjugate_symmetry_is_exact(self, s1, s2, d):
        a, b = random_state(d, s1), random_state(d, s2)
        assert inner(a, b) == inner(b, a).conjugate()


class TestNormalize:
    @pytest.mark.parametrize(
        "raw, expected",
        [
            ([2, 0], [1, 0]),
            ([1, 1], [1 / math.sqrt(2), 1 / math.sqrt(2)]),
            ([1 + 1j, 0], [(1 + 1j) / math.sqrt(2), 0]),
        ],
    )
    def test_examples(self, raw, expected):
        np.testing.assert_allclose(normalize(raw).amplitudes, expected, atol=1e-15)

    def test_zero_vector(self):
        with pytest.raises(ZeroVector):
            normalize([0, 0, 0])

    @given(st.lists(st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False), min_size=1, max_size=10))
    def test_unit_norm(self, raw):
        if np.linalg.norm(raw) < 1e-100:
            return
        s = normalize(raw)
        assert abs(inner(s, s) - 1) < 1e-12


class TestSpectralDecompose:
    def test_already_diagonal(self):
        obs = spectral_decompose([[3, 0], [0, -1]])
        np.testing.assert_allclose(obs.eigenvalues, [-1, 3])
        np.testing.assert_allclose(obs.eigenvectors, [[0, 1], [1, 0]], atol=1e-15)

    def test_pauli_x_closed_form(self):
        # eigenpairs of [[0,1],[1,0]]: -1 <-> (|0>-|1>)/sqrt2, +1 <-> (|0>+|1>)/sqrt2
        obs = spectral_decompose([[0, 1], [1, 0]])
        np.testing.assert_allclose(obs.eigenvalues, [-1, 1], atol=1e-14)
        minus, plus = obs.basis_states()
        assert abs(abs(inner(normalize([1, -1]), minus)) - 1) < 1e-12
        assert abs(abs(inner(normalize([1, 1]), plus)) - 1) < 1e-12

    @pytest.mark.parametrize("d", [1, 3, 7])
    def test_identity_reconstructs(self, d):
        obs = spectral_decompose(np.eye(d))
        np.testing.assert_allclose(obs.eigenvalues, np.ones(d))
        np.testing.assert_allclose(obs.matrix(), np.eye(d), atol=1e-12)

    @pytest.mark.parametrize("d", [2, 4, 9, 16, 33, 64])
    def test_against_lapack(self, d):
        h = random_hermitian(d, 100 + d)
        obs = spectral_decompose(h)
        np.testing.assert_allclose(obs.eigenvalues, np.linalg.eigvalsh(h.entries), atol=1e-12)
        assert np.all(np.diff(obs.eigenvalues) >= 0)
        assert obs.orthonormality_error() < 1e-10
        assert np.max(np.abs(obs.matrix() - h.entries)) < 1e-10 * np.max(np.abs(h.entries))

    def test_degenerate_spectrum_reconstructs(self):
        v = scipy.linalg.qr(random_hermitian(5, 1).entries)[0]
        h = v @ np.diag([1, 1, 2, 2, 2]).astype(complex) @ v.conj().T
        obs = spectral_decompose(h)
        np.testing.assert_allclose(obs.eigenvalues, [1, 1, 2, 2, 2], atol=1e-12)
        assert np.max(np.abs(obs.matrix() - h)) < 1e-10

    def test_input_is_hermitized(self):
        m = np.array([[1, 2 + 1e-14j], [2, 0]])
        assert np.allclose(HermitianMatrix(m).entries, HermitianMatrix(m).entries.conj().T)

    def test_too_large(self):
        with pytest.raises(DimensionMismatch):
            spectral_decompose(np.eye(65))

    def test_sweep_cap(self, monkeypatch):
        import weakdyn.hilbert as hb

        monkeypatch.setattr(hb, "JACOBI_MAX_SWEEPS", 0)
        with pytest.raises(ConvergenceFailure):
            hb.spectral_decompose(random_hermitian(6, 0))


class TestEvolve:
    def test_zero_phi_is_identity(self):
        s = random_state(4, 1)
        g = spectral_decompose(random_hermitian(4, 2))
        np.testing.assert_allclose(evolve(g, 0.0, s).amplitudes, s.amplitudes, atol=1e-14)

    def test_scalar_generator_global_phase(self):
        s = random_state(2, 5)
        g = SpectralObservable.diagonal([1.0, 1.0])
        np.testing.assert_allclose(evolve(g, 0.37, s).amplitudes, np.exp(-0.37j) * s.amplitudes, atol=1e-15)

    def test_pauli_z_quarter_turn(self):
        out = evolve(SpectralObservable.diagonal([1.0, -1.0]), math.pi / 2, normalize([1, 1]))
        assert abs(out[0]) == pytest.approx(1 / math.sqrt(2), abs=1e-15)
        assert abs(out[1]) == pytest.approx(1 / math.sqrt(2), abs=1e-15)
        rel = np.angle(out[1] / out[0])
        assert abs(abs(rel) - math.pi) < 1e-12

    @pytest.mark.parametrize("d", [2, 5, 11])
    def test_matches_matrix_exponential(self, d):
        h = random_hermitian(d, 7 * d)
        g = spectral_decompose(h)
        s = random_state(d, d)
        ref = scipy.linalg.expm(-1j * 0.83 * h.entries) @ s.amplitudes
        np.testing.assert_allclose(evolve(g, 0.83, s).amplitudes, ref, atol=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(seeds, seeds, seeds, st.integers(2, 8), phases)
    def test_unitarity(self, sa, sb, sg, d, phi):
        a, b = random_state(d, sa), random_state(d, sb)
        g = spectral_decompose(random_hermitian(d, sg))
        ua, ub = evolve(g, phi, a), evolve(g, phi, b)
        assert abs(inner(ua, ub) - inner(a, b)) < 1e-10
        assert abs(ua.norm() - 1) < 1e-12

    @settings(max_examples=40, deadline=None)
    @given(seeds, seeds, st.integers(2, 8), phases, phases)
    def test_group_law(self, ss, sg, d, p1, p2):
        s = random_state(d, ss)
        g = spectral_decompose(random_hermitian(d, sg))
        one = evolve(g, p1 + p2, s).amplitudes
        two = evolve(g, p1, evolve(g, p2, s)).amplitudes
        assert np.max(np.abs(one - two)) < 1e-10


class TestRandomState:
    def test_deterministic(self):
        np.testing.assert_array_equal(random_state(6, 42).amplitudes, random_state(6, 42).amplitudes)

    def test_seeds_differ(self):
        assert not np.array_equal(random_state(6, 1).amplitudes, random_state(6, 2).amplitudes)

    def test_dim_one(self):
        assert abs(random_state(1, 99)[0]) == pytest.approx(1.0, abs=1e-15)

    def test_uniform_weight_per_slot(self):
        w = np.array([np.abs(random_state(8, s).amplitudes) ** 2 for s in range(1, 1001)])
        np.testing.assert_allclose(w.mean(axis=0), np.full(8, 1 / 8), atol=0.01)
