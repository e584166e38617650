"""Moment sets, Robertson matrix, Gram constructions, transformation laws."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from urlab.errors import InputError
from urlab.linalg import min_eigenvalue
from urlab.model import (
    DensityMatrix,
    Observable,
    PureState,
    coherent_state,
    fock_operators,
    fock_state,
    sample,
    spin_operators,
)
from urlab.moments import (
    gram_centered,
    gram_raw,
    moment_set,
    robertson_matrix,
    transform_observables,
    transform_states,
)


def rand_observables(rng, n, d):
    out = []
    for i in range(n):
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        out.append(Observable(f"H{i}", (g + g.conj().T) / 2))
    return out


def rand_pure(rng, d):
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return PureState(v / np.linalg.norm(v))


# ---------------------------------------------------------------------------
# moment_set


def test_vacuum_qp_moments():
    q, p = fock_operators(32)
    ms = moment_set((q, p), fock_state(0, 32))
    assert_allclose(ms.means, [0, 0], atol=1e-14)
    assert_allclose(ms.sigma, np.diag([0.5, 0.5]), atol=1e-13)
    assert_allclose(ms.cmat, [[0, 0.5], [-0.5, 0]], atol=1e-13)


def test_spin_half_up_moments():
    jx, jy, jz = spin_operators(0.5)
    up = PureState(np.array([1.0, 0.0]))
    ms = moment_set((jx, jy, jz), up)
    assert_allclose(ms.sigma, np.diag([0.25, 0.25, 0.0]), atol=1e-15)
    assert ms.cmat[0, 1] == pytest.approx(0.25)
    assert ms.cmat[0, 2] == pytest.approx(0.0, abs=1e-15)
    assert ms.cmat[1, 2] == pytest.approx(0.0, abs=1e-15)


def test_single_observable_variance_nonnegative():
    rng = np.random.default_rng(2)
    for _ in range(20):
        d = int(rng.integers(2, 8))
        (x,) = rand_observables(rng, 1, d)
        st = rand_pure(rng, d)
        ms = moment_set((x,), st)
        assert ms.sigma[0, 0] >= -1e-12


def test_moment_set_mixed_state_matches_eigen_decomposition():
    # Tr(rho X) equals the eigenweighted average of pure expectations
    rng = np.random.default_rng(3)
    d = 5
    obs = rand_observables(rng, 2, d)
    rho = sample("density", d, 9)
    w, v = np.linalg.eigh(rho.matrix)
    ms = moment_set(obs, rho)
    for i, x in enumerate(obs):
        want = sum(
            wk * np.vdot(v[:, k], x.matrix @ v[:, k]).real for k, wk in enumerate(w)
        )
        assert ms.means[i] == pytest.approx(want, abs=1e-10)


def test_moment_set_dimension_mismatch():
    q, p = fock_operators(8)
    with pytest.raises(InputError):
        moment_set((q, p), fock_state(0, 9))


def test_moment_set_symmetry_structure():
    rng = np.random.default_rng(4)
    obs = rand_observables(rng, 3, 6)
    st = rand_pure(rng, 6)
    ms = moment_set(obs, st)
    assert_allclose(ms.sigma, ms.sigma.T)
    assert_allclose(ms.cmat, -ms.cmat.T)


# ---------------------------------------------------------------------------
# robertson matrix


def test_robertson_vacuum():
    q, p = fock_operators(32)
    r = robertson_matrix((q, p), fock_state(0, 32))
    assert_allclose(r.matrix, [[0.5, 0.5j], [-0.5j, 0.5]], atol=1e-13)
    assert min_eigenvalue(r.matrix) == pytest.approx(0.0, abs=1e-12)


def test_robertson_single_observable():
    q, _ = fock_operators(16)
    r = robertson_matrix((q,), fock_state(1, 16))
    assert r.matrix.shape == (1, 1)
    assert r.matrix[0, 0].real == pytest.approx(1.5, abs=1e-12)


def test_robertson_random_psd():
    rng = np.random.default_rng(5)
    for k in range(200):
        d = int(rng.integers(2, 7))
        obs = rand_observables(rng, 3, d)
        state = sample("density", d, 1000 + k) if k % 2 else rand_pure(rng, d)
        r = robertson_matrix(obs, state)
        assert min_eigenvalue(r.matrix) >= -1e-10 * max(1.0, np.linalg.norm(r.matrix, 2))


# ---------------------------------------------------------------------------
# gram constructions


def test_gram_centered_identical_states_equals_robertson():
    rng = np.random.default_rng(6)
    d = 6
    obs = rand_observables(rng, 3, d)
    st = rand_pure(rng, d)
    g = gram_centered(obs, [st, st, st])
    r = robertson_matrix(obs, st)
    assert np.max(np.abs(g.matrix - r.matrix)) < 1e-12


def test_gram_centered_diagonal_is_variances():
    _, p = fock_operators(64)
    s1 = coherent_state(0, 64)
    s2 = coherent_state(1, 64)
    g = gram_centered([p, p], [s1, s2])
    assert_allclose(np.diag(g.matrix).real, [0.5, 0.5], atol=1e-9)


def test_gram_centered_rejects_density():
    q, _ = fock_operators(4)
    rho = sample("density", 4, 1)
    with pytest.raises(InputError, match="pure"):
        gram_centered([q], [rho])


def test_gram_raw_vacuum_single_slot():
    q, _ = fock_operators(64)
    g = gram_raw([q], [coherent_state(0, 64)])
    assert g.matrix[0, 0].real == pytest.approx(0.5, abs=1e-12)


def test_gram_raw_coherent_diagonal_identity():
    q, _ = fock_operators(64)
    g = gram_raw([q], [coherent_state(1, 64)])
    assert g.matrix[0, 0].real == pytest.approx(0.5 + 2.0, abs=1e-9)


def test_gram_raw_diagonal_identity_random():
    rng = np.random.default_rng(7)
    for _ in range(30):
        d = int(rng.integers(2, 8))
        obs = rand_observables(rng, 2, d)
        states = [rand_pure(rng, d) for _ in range(2)]
        g = gram_raw(obs, states)
        for i in range(2):
            ms = moment_set((obs[i],), states[i])
            want = ms.sigma[0, 0] + ms.means[0] ** 2
            assert abs(g.matrix[i, i].real - want) < 1e-12 * max(1.0, abs(want))


def test_gram_raw_psd():
    rng = np.random.default_rng(8)
    for _ in range(30):
        d = int(rng.integers(2, 8))
        obs = rand_observables(rng, 3, d)
        states = [rand_pure(rng, d) for _ in range(3)]
        g = gram_raw(obs, states)
        assert np.linalg.eigvalsh(g.matrix)[0] >= -1e-10 * max(
            1.0, np.linalg.norm(g.matrix, 2)
        )


def test_gram_raw_rejects_density():
    q, _ = fock_operators(4)
    with pytest.raises(InputError, match="pure"):
        gram_raw([q], [sample("density", 4, 2)])


# ---------------------------------------------------------------------------
# transformation laws


def test_transform_observables_identity():
    rng = np.random.default_rng(9)
    obs = rand_observables(rng, 2, 5)
    st = rand_pure(rng, 5)
    out = transform_observables(np.eye(2), obs)
    ms0 = moment_set(obs, st)
    ms1 = moment_set(out, st)
    assert_allclose(ms1.sigma, ms0.sigma, atol=1e-13)
    assert_allclose(ms1.cmat, ms0.cmat, atol=1e-13)


def test_transform_observables_covariance_law():
    rng = np.random.default_rng(10)
    for _ in range(50):
        d = int(rng.integers(2, 8))
        n = int(rng.integers(2, 5))
        obs = rand_observables(rng, n, d)
        st = rand_pure(rng, d) if rng.random() < 0.5 else sample("density", d, int(rng.integers(1 << 16)))
        lam = rng.standard_normal((n, n))
        ms0 = moment_set(obs, st)
        ms1 = moment_set(transform_observables(lam, obs), st)
        scale = max(1.0, float(np.max(np.abs(ms1.sigma))))
        assert np.max(np.abs(ms1.sigma - lam @ ms0.sigma @ lam.T)) < 1e-10 * scale
        scale = max(1.0, float(np.max(np.abs(ms1.cmat))))
        assert np.max(np.abs(ms1.cmat - lam @ ms0.cmat @ lam.T)) < 1e-10 * scale


def test_transform_observables_symplectic_preserves_determinants():
    q, p = fock_operators(64)
    st = coherent_state(0.5 + 0.1j, 64)
    s = 1.7
    lam = np.diag([s, 1 / s])
    ms0 = moment_set((q, p), st)
    ms1 = moment_set(transform_observables(lam, (q, p)), st)
    assert np.linalg.det(ms1.sigma) == pytest.approx(np.linalg.det(ms0.sigma), rel=1e-10)
    assert np.linalg.det(ms1.cmat) == pytest.approx(np.linalg.det(ms0.cmat), rel=1e-10)


def test_transform_observables_orthogonal_preserves_char_gaps():
    from urlab.linalg import char_coeffs

    rng = np.random.default_rng(11)
    jx, jy, jz = spin_operators(1.5)
    st = rand_pure(rng, 4)
    lam, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    ms0 = moment_set((jx, jy, jz), st)
    ms1 = moment_set(transform_observables(lam, (jx, jy, jz)), st)
    gaps0 = char_coeffs(ms0.sigma) - char_coeffs(ms0.cmat)
    gaps1 = char_coeffs(ms1.sigma) - char_coeffs(ms1.cmat)
    assert np.max(np.abs(gaps0 - gaps1)) < 1e-9 * max(1.0, np.max(np.abs(gaps0)))


def test_transform_states_identity():
    rng = np.random.default_rng(12)
    states = [rand_pure(rng, 5) for _ in range(2)]
    out = transform_states(np.eye(2), states)
    assert_allclose(out[0], states[0].amplitudes)
    assert_allclose(out[1], states[1].amplitudes)


def test_transform_states_unitary_preserves_gram_determinant():
    q, _ = fock_operators(64)
    states = [coherent_state(0.3, 64), coherent_state(-0.4 + 0.2j, 64)]
    g0 = gram_raw([q, q], states)
    u, _ = np.linalg.qr(
        np.random.default_rng(13).standard_normal((2, 2))
        + 1j * np.random.default_rng(14).standard_normal((2, 2))
    )
    imgs = transform_states(u, states)
    g1 = gram_raw([q, q], imgs)
    assert np.linalg.det(g1.matrix).real == pytest.approx(
        np.linalg.det(g0.matrix).real, rel=1e-10
    )


def test_transform_states_covariance_entrywise():
    rng = np.random.default_rng(15)
    d = 6
    (x,) = rand_observables(rng, 1, d)
    for trial in range(20):
        m = int(rng.integers(2, 4))
        states = [rand_pure(rng, d) for _ in range(m)]
        u = np.diag([2.0, 1.0]) if trial == 0 and m == 2 else (
            rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
        )
        g0 = gram_raw([x] * m, states)
        g1 = gram_raw([x] * m, transform_states(u, states))
        want = u @ g0.matrix @ u.conj().T
        assert np.max(np.abs(g1.matrix - want)) < 1e-10 * max(1.0, np.max(np.abs(want)))


def test_transform_states_singular_warns():
    rng = np.random.default_rng(16)
    states = [rand_pure(rng, 4) for _ in range(2)]
    with pytest.warns(UserWarning, match="singular"):
        transform_states(np.zeros((2, 2)), states)
