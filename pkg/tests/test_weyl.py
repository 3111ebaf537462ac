import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_p, random_state
from weylsemigroup.config import InvalidDensityMatrix, NonPhysicalSpectrum, WeylError
from weylsemigroup.classical import hyperdecohere_channel
from weylsemigroup.weyl import (
    WeylChannel,
    block_diagonalize,
    block_permutation,
    choi_of,
    clock_matrix,
    hadamard_H,
    kraus_apply,
    omega,
    polygon_contains,
    probabilities_from_spectrum,
    reshuffle,
    shift_matrix,
    spectrum_from_probabilities,
    superoperator_of,
    vec,
    weyl_matrix,
)


def test_weyl_matrix_small_cases():
    assert np.allclose(weyl_matrix(2, 0, 0), np.eye(2))
    assert np.allclose(weyl_matrix(2, 1, 1), [[0, -1], [1, 0]])
    x = shift_matrix(3)
    assert np.allclose(x @ np.eye(3)[:, 2], np.eye(3)[:, 0])  # X|2> = |0>
    assert np.allclose(clock_matrix(3), np.diag(omega(3) ** np.arange(3)))


def test_weyl_matrix_range():
    with pytest.raises(WeylError):
        weyl_matrix(3, 3, 0)
    with pytest.raises(WeylError):
        weyl_matrix(1, 0, 0)


def test_weyl_multiplication_rule_n3():
    n, w = 3, omega(3)
    for k in range(n):
        for l in range(n):
            for k2 in range(n):
                for l2 in range(n):
                    lhs = weyl_matrix(n, k, l) @ weyl_matrix(n, k2, l2)
                    rhs = w ** (l * k2) * weyl_matrix(n, (k + k2) % n, (l + l2) % n)
                    assert np.abs(lhs - rhs).max() < 1e-12


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_weyl_unitary_traceless_and_inverse(n):
    w = omega(n)
    for k in range(n):
        for l in range(n):
            u = weyl_matrix(n, k, l)
            assert np.abs(u @ u.conj().T - np.eye(n)).max() < 1e-12
            if (k, l) != (0, 0):
                assert abs(np.trace(u)) < 1e-12
            v = weyl_matrix(n, (n - k) % n, (n - l) % n)
            assert np.abs(u @ v - w ** (-l * k) * np.eye(n)).max() < 1e-12


def test_hadamard_n2_matches_displayed_matrix():
    expected = [[1, 1, 1, 1], [1, 1, -1, -1], [1, -1, 1, -1], [1, -1, -1, 1]]
    assert np.allclose(hadamard_H(2), expected)


def test_hadamard_n3_phase():
    h = hadamard_H(3)
    # row (0,1) = 1, column (1,0) = 3
    assert abs(h[1, 3] - omega(3) ** 2) < 1e-12


@pytest.mark.parametrize("n", range(2, 9))
def test_hadamard_hermitian_and_square(n):
    h = hadamard_H(n)
    assert np.abs(h - h.conj().T).max() < 1e-12
    assert np.abs(h @ h - n * n * np.eye(n * n)).max() < 1e-12
    assert np.allclose(np.abs(h), 1)


def test_hadamard_cache_not_shared():
    h = hadamard_H(2)
    h[0, 0] = 5
    assert hadamard_H(2)[0, 0] == 1


def test_spectrum_examples():
    assert np.allclose(spectrum_from_probabilities(WeylChannel.identity(3)), 1)
    lam = spectrum_from_probabilities(WeylChannel.depolarizing(4))
    assert np.allclose(lam, np.eye(16)[0])


def test_spectrum_z_face_example():
    p = np.zeros(9)
    p[[0, 1, 2]] = [0.875, 0.1, 0.025]
    lam = spectrum_from_probabilities(WeylChannel(3, p)).reshape(3, 3)
    # support on k = 0 makes lambda_(m, n) depend on m only
    assert np.allclose(lam, lam[:, :1])
    assert abs(lam[1, 0] - (0.8125 + 0.06495190528383290j)) < 1e-12


def test_probabilities_from_spectrum_examples():
    assert np.allclose(probabilities_from_spectrum(np.ones(4), 2), [1, 0, 0, 0])
    assert np.allclose(probabilities_from_spectrum(np.eye(9)[0], 3), np.full(9, 1 / 9))
    with pytest.raises(NonPhysicalSpectrum):
        probabilities_from_spectrum([1, 0.9, 0.9, 0.1], 2)
    with pytest.raises(NonPhysicalSpectrum):
        probabilities_from_spectrum([1, 0.5j, 0.5j, 0], 2)


def test_probabilities_from_spectrum_nonphysical_values():
    # H (1, .9, .9, .1) / 4 by hand
    h = hadamard_H(2).real
    assert np.allclose(h @ [1, 0.9, 0.9, 0.1] / 4, [0.725, 0.225, 0.225, -0.175])


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_round_trip(rng, n):
    for p in random_p(rng, n, 1000):
        lam = spectrum_from_probabilities(WeylChannel(n, p))
        assert np.abs(probabilities_from_spectrum(lam, n) - p).max() < 1e-12


@pytest.mark.parametrize("n", [2, 3, 4])
def test_spectrum_invariants(rng, n):
    for p in random_p(rng, n, 200):
        lam = spectrum_from_probabilities(WeylChannel(n, p)).reshape(n, n)
        assert abs(lam[0, 0] - 1) < 1e-12
        conj = lam[(-np.arange(n)) % n][:, (-np.arange(n)) % n]
        assert np.abs(lam - conj.conj()).max() < 1e-12
        assert np.all(np.abs(lam) <= 1 + 1e-12)
        assert np.all(polygon_contains(lam.reshape(-1), n, 1e-10))


@pytest.mark.parametrize("n", [2, 4, 6])
def test_even_half_indices_real(rng, n):
    h = n // 2
    for p in random_p(rng, n, 50):
        lam = spectrum_from_probabilities(WeylChannel(n, p)).reshape(n, n)
        for idx in [(0, h), (h, 0), (h, h)]:
            assert abs(lam[idx].imag) < 1e-12


@pytest.mark.parametrize("n", [2, 3, 4])
def test_superoperator_eigenvectors(rng, n):
    p = random_p(rng, n)
    ch = WeylChannel(n, p)
    sup = superoperator_of(ch)
    lam = spectrum_from_probabilities(ch)
    for mu in range(n * n):
        u = vec(weyl_matrix(n, *divmod(mu, n)))
        assert np.linalg.norm(sup @ u - lam[mu] * u) < 1e-10


def test_superoperator_identity_and_commutation(rng):
    assert np.allclose(superoperator_of(WeylChannel.identity(3)), np.eye(9))
    a = superoperator_of(WeylChannel(3, random_p(rng, 3)))
    b = superoperator_of(WeylChannel(3, random_p(rng, 3)))
    assert np.abs(a @ b - b @ a).max() < 1e-10


def test_vectorization_convention(rng):
    a, b, c = (rng.normal(size=(3, 3)) for _ in range(3))
    assert np.allclose(np.kron(a, c.T) @ vec(b), vec(a @ b @ c))


def test_reshuffle_involution_and_choi(rng):
    m = rng.normal(size=(9, 9)) + 1j * rng.normal(size=(9, 9))
    assert np.array_equal(reshuffle(reshuffle(m)), m)
    d = choi_of(WeylChannel.identity(3))
    u0 = vec(np.eye(3))
    assert np.allclose(d, np.outer(u0, u0))
    assert abs(np.trace(d) - 3) < 1e-12
    with pytest.raises(WeylError):
        reshuffle(np.zeros((8, 8)))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_choi_spectral_decomposition(rng, n):
    p = random_p(rng, n)
    d = choi_of(WeylChannel(n, p))
    assert np.abs(d - d.conj().T).max() < 1e-12
    assert abs(np.trace(d) - n) < 1e-12
    for mu in range(n * n):
        u = vec(weyl_matrix(n, *divmod(mu, n)))
        assert np.linalg.norm(d @ u - n * p[mu] * u) < 1e-10
    # independent oracle: LAPACK eigenvalues
    assert np.allclose(np.sort(np.linalg.eigvalsh(d)), np.sort(n * p), atol=1e-10)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_kraus_apply(rng, n):
    rho = random_state(rng, n)
    assert np.allclose(kraus_apply(WeylChannel.identity(n), rho), rho)
    assert np.allclose(kraus_apply(WeylChannel.depolarizing(n), rho), np.eye(n) / n)
    ch = WeylChannel(n, random_p(rng, n))
    out = kraus_apply(ch, rho)
    assert abs(np.trace(out) - 1) < 1e-12
    assert np.abs(out - out.conj().T).max() < 1e-12
    via_sup = (superoperator_of(ch) @ vec(rho)).reshape(n, n)
    assert np.abs(out - via_sup).max() < 1e-10
    t = hyperdecohere_channel(ch).matrix
    assert np.abs(np.diag(out).real - t @ np.diag(rho).real).max() < 1e-10


def test_kraus_apply_rejects_bad_states():
    ch = WeylChannel.identity(2)
    with pytest.raises(InvalidDensityMatrix):
        kraus_apply(ch, np.diag([2.0, -1.0]))
    with pytest.raises(InvalidDensityMatrix):
        kraus_apply(ch, np.array([[0.5, 1], [0, 0.5]]))
    with pytest.raises(InvalidDensityMatrix):
        kraus_apply(ch, np.eye(3) / 3)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_block_diagonalization(rng, n):
    ch = WeylChannel(n, random_p(rng, n))
    blocks = block_diagonalize(ch)
    perm = block_permutation(n)
    sup = superoperator_of(ch)
    big = sup[np.ix_(perm, perm)]
    direct = np.zeros_like(big)
    for k, b in enumerate(blocks):
        direct[k * n : (k + 1) * n, k * n : (k + 1) * n] = b
    assert np.abs(big - direct).max() < 1e-12
    assert np.allclose(blocks[0], hyperdecohere_channel(ch).matrix)
    eig = np.concatenate([np.linalg.eigvals(b) for b in blocks])
    lam = spectrum_from_probabilities(ch)
    # multiset comparison by greedy matching
    left = list(lam)
    for z in eig:
        j = int(np.argmin(np.abs(np.array(left) - z)))
        assert abs(left[j] - z) < 1e-10
        left.pop(j)


def test_blocks_identity_and_x_face(rng):
    for b in block_diagonalize(WeylChannel.identity(3)):
        assert np.allclose(b, np.eye(3))
    w = rng.dirichlet(np.ones(3))
    p = np.zeros(9)
    p[[0, 3, 6]] = w
    blocks = block_diagonalize(WeylChannel(3, p))
    for b in blocks[1:]:
        assert np.allclose(b, blocks[0])
    lam = spectrum_from_probabilities(WeylChannel(3, p))
    for z in lam:
        assert np.sum(np.abs(lam - z) < 1e-10) % 3 == 0


def test_channel_json_round_trip(rng):
    ch = WeylChannel(3, random_p(rng, 3))
    back = WeylChannel.from_json(json.loads(json.dumps(ch.to_json())))
    assert np.array_equal(back.p, ch.p)
    with pytest.raises(WeylError):
        WeylChannel.from_json({"n": 2, "p": [0.5, 0.5, 0.5, -0.5]})
    with pytest.raises(WeylError):
        WeylChannel(2, [1, 0, 0])


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 5), st.lists(st.floats(0, 1), min_size=25, max_size=25))
def test_spectrum_polygon_property(n, raw):
    w = np.array(raw[: n * n]) + 1e-3
    ch = WeylChannel(n, w / w.sum())
    lam = spectrum_from_probabilities(ch)
    assert np.all(polygon_contains(lam, n, 1e-10))
    assert np.abs(probabilities_from_spectrum(lam, n) - ch.p).max() < 1e-12
