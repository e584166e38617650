"""State and observable builders: Fock quadratures, coherent/squeezed states,
spin matrices, seeded sampling."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from urlab.errors import InputError, TruncationError
from urlab.model import (
    DensityMatrix,
    Observable,
    PureState,
    coherent_state,
    fock_operators,
    fock_state,
    sample,
    spin_operators,
    squeezed_state,
)


def expval(op, psi):
    return np.vdot(psi.amplitudes, op.matrix @ psi.amplitudes)


def variance(op, psi):
    v = op.matrix @ psi.amplitudes
    return (np.vdot(v, v) - expval(op, psi) ** 2).real


def covariance(a, b, psi):
    va, vb = a.matrix @ psi.amplitudes, b.matrix @ psi.amplitudes
    return (np.vdot(va, vb).real - expval(a, psi).real * expval(b, psi).real)


# ---------------------------------------------------------------------------
# fock operators


def test_fock_q_matrix_n2():
    q, _ = fock_operators(2)
    assert_allclose(q.matrix, [[0, 1 / math.sqrt(2)], [1 / math.sqrt(2), 0]])


def test_vacuum_moments():
    q, p = fock_operators(32)
    vac = fock_state(0, 32)
    assert expval(q, vac) == pytest.approx(0.0, abs=1e-14)
    assert variance(q, vac) == pytest.approx(0.5, abs=1e-13)
    assert variance(p, vac) == pytest.approx(0.5, abs=1e-13)


def test_commutator_expectation_away_from_corner():
    n = 64
    q, p = fock_operators(n)
    comm = q.matrix @ p.matrix - p.matrix @ q.matrix
    rng = np.random.default_rng(0)
    amp = np.zeros(n, complex)
    amp[: n // 2] = rng.standard_normal(n // 2) + 1j * rng.standard_normal(n // 2)
    psi = PureState(amp / np.linalg.norm(amp))
    val = np.vdot(psi.amplitudes, comm @ psi.amplitudes)
    assert abs(val - 1j) < 1e-10


def test_observables_are_hermitian_and_frozen():
    q, p = fock_operators(16)
    assert np.max(np.abs(q.matrix - q.matrix.conj().T)) < 1e-15
    with pytest.raises(ValueError):
        q.matrix[0, 0] = 1.0


# ---------------------------------------------------------------------------
# coherent states


def test_coherent_zero_is_vacuum():
    c = coherent_state(0, 16)
    assert_allclose(c.amplitudes, fock_state(0, 16).amplitudes)


def test_coherent_mean_quadrature():
    q, p = fock_operators(64)
    c = coherent_state(1.0, 64)
    assert expval(q, c).real == pytest.approx(math.sqrt(2), abs=1e-10)
    assert expval(p, c).real == pytest.approx(0.0, abs=1e-10)


def test_coherent_saturates_heisenberg():
    q, p = fock_operators(64)
    c = coherent_state(1 + 1j, 64)
    prod = variance(q, c) * variance(p, c)
    assert prod == pytest.approx(0.25, abs=1e-9)
    assert covariance(q, p, c) == pytest.approx(0.0, abs=1e-10)


def test_coherent_truncation_error_reports_required_dim():
    with pytest.raises(TruncationError) as err:
        coherent_state(4.0, 8)
    assert err.value.required_dim is not None
    assert err.value.required_dim > 8
    coherent_state(4.0, err.value.required_dim)  # suggested dimension works


# ---------------------------------------------------------------------------
# squeezed states


def test_squeezed_zero_squeezing_is_coherent():
    a = 0.7 - 0.3j
    s = squeezed_state(a, 0.0, 0.0, 64)
    c = coherent_state(a, 64)
    # same ray: fix the global phase on the largest amplitude
    k = int(np.argmax(np.abs(c.amplitudes)))
    phase = c.amplitudes[k] / s.amplitudes[k]
    assert_allclose(s.amplitudes * phase, c.amplitudes, atol=1e-10)


def test_squeezed_variances_example():
    q, p = fock_operators(64)
    s = squeezed_state(0, 0.5, 0.0, 64)
    assert variance(q, s) == pytest.approx(math.exp(-1.0) / 2, abs=1e-8)
    assert variance(p, s) == pytest.approx(math.exp(1.0) / 2, abs=1e-8)
    assert covariance(q, p, s) == pytest.approx(0.0, abs=1e-8)


@pytest.mark.parametrize("alpha,r,phi", [(0.3, 0.4, 0.0), (0.5j, 0.6, 1.1), (0.4 - 0.2j, 0.8, 2.0)])
def test_squeezed_saturates_schrodinger(alpha, r, phi):
    q, p = fock_operators(64)
    s = squeezed_state(alpha, r, phi, 64)
    slack = variance(q, s) * variance(p, s) - covariance(q, p, s) ** 2 - 0.25
    assert abs(slack) < 1e-8


def test_squeezed_truncation_audit():
    with pytest.raises(TruncationError):
        squeezed_state(0, 2.0, 0.0, 64)


def test_gaussian_moments_stable_under_dim_growth():
    # moments move by < 1e-10 between N = 64 and N = 128 inside the
    # admissible box (|alpha| <= 2, |r| <= 0.7)
    for alpha, r in ((2.0, 0.0), (1.0, 0.5), (0.5j, 0.7), (-1.2 + 0.8j, 0.3)):
        vals = {}
        for n in (64, 128):
            q, p = fock_operators(n)
            s = squeezed_state(alpha, r, 0.0, n)
            vals[n] = (
                expval(q, s).real,
                expval(p, s).real,
                variance(q, s),
                variance(p, s),
                covariance(q, p, s),
            )
        drift = np.max(np.abs(np.array(vals[64]) - np.array(vals[128])))
        assert drift < 1e-10


# ---------------------------------------------------------------------------
# spin operators


def test_spin_half_is_pauli_over_two():
    jx, jy, jz = spin_operators(0.5)
    assert_allclose(jx.matrix, [[0, 0.5], [0.5, 0]])
    assert_allclose(jy.matrix, [[0, -0.5j], [0.5j, 0]])
    assert_allclose(jz.matrix, [[0.5, 0], [0, -0.5]])


@pytest.mark.parametrize("j", [0.5, 1, 1.5, 2, 3.5])
def test_spin_commutation_and_casimir(j):
    jx, jy, jz = spin_operators(j)
    comm = jx.matrix @ jy.matrix - jy.matrix @ jx.matrix
    assert np.max(np.abs(comm - 1j * jz.matrix)) < 1e-14
    comm = jy.matrix @ jz.matrix - jz.matrix @ jy.matrix
    assert np.max(np.abs(comm - 1j * jx.matrix)) < 1e-14
    casimir = jx.matrix @ jx.matrix + jy.matrix @ jy.matrix + jz.matrix @ jz.matrix
    assert_allclose(casimir, j * (j + 1) * np.eye(int(2 * j + 1)), atol=1e-13)


def test_spin_rejects_bad_j():
    with pytest.raises(InputError):
        spin_operators(0.3)
    with pytest.raises(InputError):
        spin_operators(40)


# ---------------------------------------------------------------------------
# sampling


def test_sample_pure_deterministic():
    a = sample("pure", 4, 7)
    b = sample("pure", 4, 7)
    assert np.array_equal(a.amplitudes, b.amplitudes)


def test_sample_density_valid():
    for seed in range(5):
        rho = sample("density", 4, seed)
        assert isinstance(rho, DensityMatrix)
        assert np.trace(rho.matrix).real == pytest.approx(1.0, abs=1e-12)
        assert np.linalg.eigvalsh(rho.matrix)[0] >= -1e-12


def test_sample_hermitian():
    h = sample("hermitian", 3, 11)
    assert np.max(np.abs(h - h.conj().T)) < 1e-15


def test_sample_psd():
    m = sample("psd", 5, 13)
    assert np.linalg.eigvalsh(m)[0] >= -1e-12


def test_sample_unknown_kind():
    with pytest.raises(InputError):
        sample("thermal", 4, 0)


# ---------------------------------------------------------------------------
# type invariants


def test_pure_state_requires_normalization():
    with pytest.raises(InputError):
        PureState(np.array([1.0, 1.0]))


def test_density_requires_unit_trace_and_psd():
    with pytest.raises(InputError):
        DensityMatrix(np.eye(2))
    with pytest.raises(InputError):
        DensityMatrix(np.diag([1.5, -0.5]))


def test_observable_requires_hermitian():
    with pytest.raises(InputError):
        Observable("bad", np.array([[0, 1], [0, 0]], dtype=complex))
