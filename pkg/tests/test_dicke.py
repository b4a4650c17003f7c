import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import dicke_embedding, from_full, full_spin, product_plus_x
from spinsqueeze.dicke import (
    DickeState,
    axis_vector,
    basis_state,
    coherent_state,
    moments,
    number_distribution,
    overlap,
    phase_shift,
    polar_state,
    rotate,
    rotation_matrix,
    spin_matrices,
)
from spinsqueeze.exceptions import ContractError, DomainError


def random_state(n, seed):
    rng = np.random.default_rng(seed)
    amps = rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1)
    return DickeState(n, amps / np.linalg.norm(amps))


def test_basis_states():
    assert np.allclose(basis_state(2, 0).amplitudes, [1, 0, 0])
    assert np.allclose(basis_state(2, 2).amplitudes, [0, 0, 1])
    amps = basis_state(20, 7).amplitudes
    assert amps[7] == 1 and np.count_nonzero(amps) == 1


@pytest.mark.parametrize("n_r", [-1, 3, 1.5])
def test_basis_state_rejects_bad_index(n_r):
    with pytest.raises(DomainError):
        basis_state(2, n_r)


def test_state_is_immutable_and_validated():
    s = coherent_state(3)
    with pytest.raises(ValueError):
        s.amplitudes[0] = 0
    with pytest.raises(DomainError):
        DickeState(3, np.ones(3))
    with pytest.raises(DomainError):
        DickeState(0, np.ones(1))


def test_coherent_magnitudes():
    assert np.allclose(np.abs(coherent_state(1).amplitudes), [2**-0.5] * 2)
    assert np.allclose(np.abs(coherent_state(2).amplitudes), [0.5, 2**-0.5, 0.5])
    assert moments(coherent_state(40)).variance("z") == pytest.approx(10.0, abs=1e-10)


@pytest.mark.parametrize("n", [1, 2, 5, 6])
def test_coherent_state_is_product_state(n):
    ref = from_full(product_plus_x(n), n)
    assert np.allclose(coherent_state(n).amplitudes, ref, atol=1e-14)


@pytest.mark.parametrize("n", [1, 7, 40, 2000])
def test_first_beamsplitter_gives_coherent_state(n):
    out = rotate(basis_state(n, 0), "y", math.pi / 2)
    assert np.abs(out.amplitudes - coherent_state(n).amplitudes).max() < 1e-10


def test_coherent_state_does_not_overflow():
    s = coherent_state(2000)
    assert np.all(np.isfinite(s.amplitudes))
    assert s.norm == pytest.approx(1.0, abs=1e-12)


def test_rotation_examples():
    s = random_state(5, 1)
    assert np.allclose(rotate(s, "z", 0.0).amplitudes, s.amplitudes)
    assert np.allclose(np.abs(rotate(basis_state(2, 0), "y", math.pi / 2).amplitudes), [0.5, 2**-0.5, 0.5])
    flipped = rotate(basis_state(9, 0), "y", math.pi)
    assert abs(overlap(flipped, basis_state(9, 9))) == pytest.approx(1.0, abs=1e-12)


def test_rotation_rejects_non_finite_angle():
    with pytest.raises(DomainError):
        rotate(coherent_state(3), "x", math.inf)
    with pytest.raises(DomainError):
        phase_shift(coherent_state(3), math.nan)


@given(n=st.integers(1, 80), seed=st.integers(0, 2**32 - 1), a=st.floats(-6, 6), b=st.floats(-6, 6))
def test_rotations_compose(n, seed, a, b):
    s = random_state(n, seed)
    axis = (0.2, -0.7, 0.4)
    twice = rotate(rotate(s, axis, a), axis, b)
    assert np.abs(twice.amplitudes - rotate(s, axis, a + b).amplitudes).max() < 1e-9
    back = rotate(rotate(s, axis, a), axis, -a)
    assert np.abs(back.amplitudes - s.amplitudes).max() < 1e-9


def test_rotation_matrix_matches_rotate():
    s = random_state(6, 3)
    u = rotation_matrix(6, (1, 1, 0), 0.8)
    assert np.allclose(u @ s.amplitudes, rotate(s, (1, 1, 0), 0.8).amplitudes, atol=1e-13)


def test_phase_shift_examples():
    s = random_state(6, 4)
    assert np.allclose(phase_shift(s, 0).amplitudes, s.amplitudes)
    assert np.allclose(phase_shift(s, 2 * math.pi).amplitudes, s.amplitudes, atol=1e-12)
    mean = moments(phase_shift(coherent_state(20), 0.1)).mean
    assert mean[1] / mean[0] == pytest.approx(math.tan(0.1), rel=1e-9)


def test_phase_shift_is_rotation_about_z():
    s = random_state(7, 5)
    tilted = rotate(s, (0, 0, 1.0), 0.3)
    assert np.allclose(phase_shift(s, 0.3).amplitudes, tilted.amplitudes)


def test_moment_examples():
    m = moments(basis_state(10, 3))
    assert np.allclose(m.mean, [0, 0, 2])
    assert m.variance("z") == pytest.approx(0.0, abs=1e-12)
    m = moments(coherent_state(30))
    assert np.allclose(m.mean, [15, 0, 0])
    assert m.variance("y") == pytest.approx(7.5)
    assert m.variance("z") == pytest.approx(7.5)
    ghz = DickeState.from_amplitudes(basis_state(12, 0).amplitudes + basis_state(12, 12).amplitudes, normalize=True)
    assert moments(ghz).variance("z") == pytest.approx(36.0)


def test_moments_require_normalized_state():
    with pytest.raises(ContractError):
        moments(DickeState(2, [1.0, 1.0, 0.0]))


def test_number_distribution():
    assert np.allclose(number_distribution(basis_state(3, 1)), [0, 1, 0, 0])
    assert np.allclose(number_distribution(coherent_state(2)), [0.25, 0.5, 0.25])
    assert number_distribution(random_state(9, 0)).sum() == pytest.approx(1.0, abs=1e-12)


def test_overlap():
    s = random_state(4, 2)
    assert overlap(s, s) == pytest.approx(1.0)
    assert overlap(basis_state(4, 0), basis_state(4, 1)) == 0
    assert abs(overlap(coherent_state(1), basis_state(1, 0))) ** 2 == pytest.approx(0.5)
    with pytest.raises(DomainError):
        overlap(basis_state(3, 0), basis_state(4, 0))


@pytest.mark.parametrize("n", range(1, 9))
def test_spin_matrices_match_pauli_sums(n):
    emb = dicke_embedding(n)
    for mine, full in zip(spin_matrices(n), full_spin(n)):
        assert np.abs(mine - emb.conj().T @ full @ emb).max() < 1e-12
    sx, sy, sz = spin_matrices(n)
    assert np.abs(sx @ sy - sy @ sx - 1j * sz).max() < 1e-12


@pytest.mark.parametrize("direction", ["x", "z", (0, 0, -1), (1, -2, 0.5)])
def test_polar_state_points_along_direction(direction):
    n = 9
    m = moments(polar_state(n, direction))
    assert np.allclose(m.mean, n / 2 * axis_vector(direction), atol=1e-12)


def test_axis_vector_validation():
    assert np.allclose(axis_vector("Y"), [0, 1, 0])
    assert np.linalg.norm(axis_vector((3, 4, 0))) == pytest.approx(1.0, abs=1e-12)
    for bad in ("w", (0, 0, 0), (1, 2)):
        with pytest.raises(DomainError):
            axis_vector(bad)
