"""Finite-dimensional states and observables: truncated Fock space, coherent and
squeezed states, spin operators, and seeded random ensembles.

Conventions: dimensionless quadratures q = (a + a†)/√2, p = (a − a†)/(i√2) in
the number basis, so [q, p] = i away from the truncation corner and the vacuum
has Δq² = Δp² = 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InputError, TruncationError
from .linalg import TOL_PSD, as_square_matrix, require_hermitian

MIN_DIM = 2
MAX_DIM = 512
NORM_TOL = 1e-12

# Infinite-tail weight allowed above level N-3 for coherent states.
COHERENT_TAIL_TOL = 1e-12
# Constructed-state weight allowed on the top two levels for squeezed states.
# Calibrated so the Gaussian moment formulas hold to ~1e-6 absolute at the
# admissibility edge (|r| ~ 1 at N = 64) and to <= 1e-8 for |r| <= 0.8.
SQUEEZED_TAIL_TOL = 1e-8

_SAMPLE_KINDS = ("pure", "density", "hermitian", "psd")


def _check_dim(n: int) -> int:
    n = int(n)
    if not MIN_DIM <= n <= MAX_DIM:
        raise InputError(f"Hilbert dimension must lie in [{MIN_DIM}, {MAX_DIM}], got {n}")
    return n


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=complex, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Observable:
    """A named Hermitian matrix acting on an N-dimensional Hilbert space."""

    name: str
    matrix: np.ndarray

    def __post_init__(self):
        m = require_hermitian(self.matrix, f"observable {self.name!r}")
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit vector over the shared Hilbert space."""

    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex).ravel()
        if not np.all(np.isfinite(a.view(float))):
            raise InputError("state amplitudes contain non-finite entries")
        nrm = float(np.linalg.norm(a))
        if abs(nrm - 1.0) > NORM_TOL:
            raise InputError(f"pure state is not normalized (norm {nrm!r})")
        object.__setattr__(self, "amplitudes", _frozen(a))

    @property
    def dim(self) -> int:
        return self.amplitudes.size


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Positive semidefinite, unit-trace Hermitian matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        m = require_hermitian(self.matrix, "density matrix")
        w = np.linalg.eigvalsh(m)
        if w[0] < -TOL_PSD * max(1.0, abs(w[-1])):
            raise InputError(f"density matrix is not psd (min eigenvalue {w[0]:.3e})")
        tr = float(np.trace(m).real)
        if abs(tr - 1.0) > NORM_TOL:
            raise InputError(f"density matrix trace is {tr!r}, expected 1")
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


QuantumState = PureState | DensityMatrix


def state_dim(state: QuantumState) -> int:
    if isinstance(state, (PureState, DensityMatrix)):
        return state.dim
    raise InputError(f"not a quantum state: {type(state).__name__}")


@lru_cache(maxsize=None)
def _annihilation(n: int) -> np.ndarray:
    a = np.diag(np.sqrt(np.arange(1.0, n)), 1).astype(complex)
    a.setflags(write=False)
    return a


@lru_cache(maxsize=None)
def fock_operators(n: int) -> tuple[Observable, Observable]:
    """Truncated quadratures (q, p) in the number basis, a|k> = sqrt(k)|k-1>.

    [q, p] equals i times the identity except in the bottom-right truncation
    corner, so commutator expectations are i for states with negligible weight
    on the top level.
    """
    n = _check_dim(n)
    a = _annihilation(n)
    ad = a.conj().T
    q = (a + ad) / math.sqrt(2)
    p = (a - ad) / (1j * math.sqrt(2))
    return Observable("q", q), Observable("p", p)


def quad_plus(n: int) -> Observable:
    """The continuous-spectrum combination p² − q²."""
    q, p = fock_operators(n)
    return Observable("p2-q2", p.matrix @ p.matrix - q.matrix @ q.matrix)


def quad_mix(n: int) -> Observable:
    """The continuous-spectrum combination pq + qp."""
    q, p = fock_operators(n)
    return Observable("pq+qp", p.matrix @ q.matrix + q.matrix @ p.matrix)


def fock_state(k: int, n: int) -> PureState:
    n = _check_dim(n)
    if not 0 <= k < n:
        raise InputError(f"Fock level {k} outside 0..{n - 1}")
    amp = np.zeros(n, dtype=complex)
    amp[k] = 1.0
    return PureState(amp)


def _poisson_tail_above(lam: float, level: int) -> float:
    """Weight of Poisson(lam) strictly above `level`."""
    if lam <= 0.0:
        return 0.0
    term = math.exp(-lam)
    cdf = term
    for k in range(1, level + 1):
        term *= lam / k
        cdf += term
    return max(0.0, 1.0 - cdf)


def _coherent_required_dim(lam: float, tol: float) -> int | None:
    term = math.exp(-lam)
    cdf = term
    for k in range(1, MAX_DIM + 64):
        term *= lam / k
        cdf += term
        if 1.0 - cdf <= tol:
            return k + 3 if k + 3 <= MAX_DIM else None
    return None


def coherent_state(alpha: complex, n: int) -> PureState:
    """Glauber coherent state with amplitudes ∝ alpha^k / sqrt(k!), renormalized.

    Requires the Poisson weight above level n-3 to stay below 1e-12; then
    <q> = √2 Re(alpha), <p> = √2 Im(alpha) and Δq² = Δp² = 1/2 hold to ~1e-9.
    """
    n = _check_dim(n)
    lam = abs(alpha) ** 2
    tail = _poisson_tail_above(lam, n - 3)
    if tail > COHERENT_TAIL_TOL:
        req = _coherent_required_dim(lam, COHERENT_TAIL_TOL)
        hint = f"; need dimension >= {req}" if req else ""
        raise TruncationError(
            f"coherent state |alpha|^2={lam:.4g} has Poisson tail {tail:.3e} above "
            f"level {n - 3} (limit {COHERENT_TAIL_TOL:g}){hint}",
            required_dim=req,
        )
    amp = np.zeros(n, dtype=complex)
    amp[0] = 1.0
    for k in range(1, n):
        amp[k] = amp[k - 1] * alpha / math.sqrt(k)
    return PureState(amp / np.linalg.norm(amp))


def _expm_antihermitian(gen: np.ndarray, vec: np.ndarray) -> np.ndarray:
    """exp(G) @ vec for anti-Hermitian G, via the eigensystem of iG."""
    w, v = np.linalg.eigh(1j * gen)
    return v @ (np.exp(-1j * w) * (v.conj().T @ vec))


def _squeezed_vacuum_tail(r: float, level: int) -> float:
    """Weight of the ideal squeezed vacuum strictly above `level`."""
    t2 = math.tanh(abs(r)) ** 2
    if t2 == 0.0:
        return 0.0
    # even occupations only: P(2k)/P(2k-2) = tanh^2(r) (2k-1)/(2k)
    term = 1.0 / math.cosh(r)
    total = term
    k = 1
    while 2 * k <= level:
        term *= t2 * (2 * k - 1) / (2 * k)
        total += term
        k += 1
    return max(0.0, 1.0 - total)


def _squeezed_required_dim(alpha: complex, r: float, tol: float) -> int | None:
    lam = (abs(alpha) * math.exp(abs(r))) ** 2
    for n in (64, 96, 128, 192, 256, 384, MAX_DIM):
        if _squeezed_vacuum_tail(r, n - 3) + _poisson_tail_above(lam, n - 3) <= tol:
            return n
    return None


def squeezed_state(
    alpha: complex,
    r: float,
    phi: float,
    n: int,
    tail_tol: float = SQUEEZED_TAIL_TOL,
) -> PureState:
    """Displaced squeezed vacuum D(alpha) S(r e^{i phi}) |0>.

    Both unitaries are matrix exponentials of the truncated generators
    (a†² vs a² for the squeeze, a† vs a for the displacement), applied to the
    vacuum and renormalized. For phi = 0, alpha = 0 the quadrature variances
    are Δq² = e^{-2r}/2 and Δp² = e^{2r}/2 up to truncation error; the
    constructed state's weight on the top two levels is audited against
    `tail_tol` and rejected when the truncation is too tight.
    """
    n = _check_dim(n)
    a = _annihilation(n)
    ad = a.conj().T
    vec = np.zeros(n, dtype=complex)
    vec[0] = 1.0
    xi = r * np.exp(1j * phi)
    if xi != 0:
        gen_s = 0.5 * (np.conj(xi) * (a @ a) - xi * (ad @ ad))
        vec = _expm_antihermitian(gen_s, vec)
    if alpha != 0:
        gen_d = alpha * ad - np.conj(alpha) * a
        vec = _expm_antihermitian(gen_d, vec)
    vec = vec / np.linalg.norm(vec)
    tail = float(np.sum(np.abs(vec[n - 2 :]) ** 2))
    if tail > tail_tol:
        req = _squeezed_required_dim(alpha, r, tail_tol)
        hint = f"; need dimension >= ~{req}" if req else ""
        raise TruncationError(
            f"squeezed state (|alpha|={abs(alpha):.3g}, r={r:.3g}) leaves weight "
            f"{tail:.3e} on the top two of {n} levels (limit {tail_tol:g}){hint}",
            required_dim=req,
        )
    return PureState(vec)


def spin_operators(j: float) -> tuple[Observable, Observable, Observable]:
    """Angular-momentum matrices (Jx, Jy, Jz) for half-integer j, dim = 2j + 1."""
    twoj = round(2 * j)
    if abs(2 * j - twoj) > 1e-12 or twoj < 1:
        raise InputError(f"j must be a positive half-integer, got {j}")
    dim = twoj + 1
    if dim > 64:
        raise InputError(f"spin dimension 2j+1 = {dim} exceeds 64")
    j = twoj / 2
    m = j - np.arange(dim)
    jz = np.diag(m).astype(complex)
    # <m+1| J+ |m> = sqrt(j(j+1) - m(m+1)) on the superdiagonal.
    raise_amp = np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1))
    jp = np.diag(raise_amp, 1).astype(complex)
    jm = jp.conj().T
    jx = (jp + jm) / 2
    jy = (jp - jm) / 2j
    return Observable("Jx", jx), Observable("Jy", jy), Observable("Jz", jz)


def sample(kind: str, dim: int, seed: int):
    """Seeded random objects: Haar pure states, Ginibre densities, Hermitian/psd matrices.

    The output is a pure function of (kind, dim, seed): identical arguments
    reproduce identical values bit for bit.
    """
    if kind not in _SAMPLE_KINDS:
        raise InputError(f"unknown sample kind {kind!r}; expected one of {_SAMPLE_KINDS}")
    dim = _check_dim(dim)
    rng = np.random.default_rng(seed)
    if kind == "pure":
        v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        return PureState(v / np.linalg.norm(v))
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    if kind == "hermitian":
        return (g + g.conj().T) / 2
    ggd = g @ g.conj().T
    if kind == "psd":
        return ggd
    return DensityMatrix(ggd / np.trace(ggd).real)


def raw_vector_state(amplitudes) -> PureState:
    """Normalize an explicit complex vector into a PureState."""
    a = np.asarray(amplitudes, dtype=complex).ravel()
    nrm = float(np.linalg.norm(a))
    if not np.all(np.isfinite(a.view(float))) or nrm == 0.0:
        raise InputError("raw vector must be finite and nonzero")
    return PureState(a / nrm)


def raw_density_state(matrix) -> DensityMatrix:
    """Validate an explicit density matrix, renormalizing trace drift <= 1e-12."""
    m = as_square_matrix(matrix, "raw density")
    tr = np.trace(m).real
    if abs(tr - 1.0) <= NORM_TOL and tr != 1.0:
        m = m / tr
    return DensityMatrix(m)
