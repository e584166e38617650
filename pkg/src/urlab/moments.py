"""Statistical moments of observable tuples, the Robertson matrix, both Gram
constructions for state-extended checks, and the linear transformation laws."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InputError, NumericError
from .linalg import TOL_PSD, gram
from .model import DensityMatrix, Observable, PureState, QuantumState, state_dim

# Imaginary residues of nominally real moments are audited against this,
# relative to max(1, |value|).
RESIDUE_TOL = 1e-10
VARIANCE_FLOOR = -1e-12


@dataclass(frozen=True, eq=False)
class MomentSet:
    """First and second moments of n observables in one state.

    means[i]    = <X_i>
    sigma[i, j] = <X_i X_j + X_j X_i>/2 - <X_i><X_j>   (uncertainty matrix)
    cmat[i, j]  = -(i/2) <[X_i, X_j]>                  (mean-commutator matrix)
    """

    means: np.ndarray
    sigma: np.ndarray
    cmat: np.ndarray

    @property
    def n(self) -> int:
        return self.means.size


@dataclass(frozen=True, eq=False)
class GramUR:
    """A positive semidefinite matrix produced by one of the physical choices:
    kind "robertson" (sigma + i C), "centered" (Gram of (X_k - <X_k>)|psi_k>),
    or "raw" (Gram of X_k|psi_k>). ``provenance`` names the ingredients."""

    kind: str
    matrix: np.ndarray
    provenance: tuple[str, ...]

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _audit_real(values: np.ndarray, what: str) -> np.ndarray:
    scale = max(1.0, float(np.max(np.abs(values), initial=0.0)))
    resid = float(np.max(np.abs(values.imag), initial=0.0))
    if resid > RESIDUE_TOL * scale:
        raise NumericError(f"imaginary residue {resid:.3e} in {what}")
    return values.real


def _observable_matrices(observables, state: QuantumState) -> list[np.ndarray]:
    if len(observables) == 0:
        raise InputError("at least one observable required")
    dim = state_dim(state)
    mats = []
    for i, obs in enumerate(observables):
        if not isinstance(obs, Observable):
            raise InputError(f"argument {i} is not an Observable")
        if obs.dim != dim:
            raise InputError(
                f"observable {obs.name!r} has dimension {obs.dim}, state has {dim}"
            )
        mats.append(obs.matrix)
    return mats


def second_moment_matrix(observables, state: QuantumState) -> np.ndarray:
    """Matrix of raw second moments M_jk = <X_j X_k> in the given state."""
    mats = _observable_matrices(observables, state)
    if isinstance(state, PureState):
        stack = np.array([m @ state.amplitudes for m in mats])
        return stack.conj() @ stack.T
    rho = state.matrix
    n = len(mats)
    left = [rho @ m for m in mats]
    out = np.empty((n, n), dtype=complex)
    for j in range(n):
        lj = left[j].T
        for k in range(n):
            out[j, k] = np.sum(lj * mats[k])
    return out


def moment_set(observables, state: QuantumState) -> MomentSet:
    """Means, uncertainty matrix and mean-commutator matrix of the tuple.

    Works for pure states (via <psi|..|psi>) and density matrices (via
    Tr(rho ..)). Imaginary residues beyond roundoff raise NumericError.
    """
    mats = _observable_matrices(observables, state)
    if isinstance(state, PureState):
        psi = state.amplitudes
        means_c = np.array([np.vdot(psi, m @ psi) for m in mats])
    else:
        rho = state.matrix
        means_c = np.array([np.trace(rho @ m) for m in mats])
    means = _audit_real(means_c, "observable means")
    m2 = second_moment_matrix(observables, state)
    sym = (m2 + m2.T) / 2
    sigma = _audit_real(sym, "uncertainty matrix") - np.outer(means, means)
    sigma = (sigma + sigma.T) / 2
    cmat = _audit_real(-0.5j * (m2 - m2.T), "mean-commutator matrix")
    cmat = (cmat - cmat.T) / 2
    var_scale = max(1.0, float(np.max(np.abs(sigma))))
    if float(np.min(np.diag(sigma))) < VARIANCE_FLOOR * var_scale:
        raise NumericError(f"negative variance {np.min(np.diag(sigma)):.3e}")
    return MomentSet(means=means, sigma=sigma, cmat=cmat)


def robertson_matrix(observables, state: QuantumState) -> GramUR:
    """Robertson matrix R = sigma + iC; Hermitian and positive semidefinite."""
    ms = moment_set(observables, state)
    r = ms.sigma + 1j * ms.cmat
    w = np.linalg.eigvalsh(r)
    if w[0] < -TOL_PSD * max(1.0, abs(w[-1])):
        raise NumericError(f"Robertson matrix failed psd certificate ({w[0]:.3e})")
    names = tuple(o.name for o in observables)
    return GramUR("robertson", r, names + (_state_label(state),))


def _state_label(state: QuantumState) -> str:
    return "pure" if isinstance(state, PureState) else "density"


def _pure_amplitudes(states) -> list[np.ndarray]:
    out = []
    for i, s in enumerate(states):
        if isinstance(s, PureState):
            out.append(s.amplitudes)
        elif isinstance(s, DensityMatrix):
            raise InputError(
                f"state {i} is a density matrix; this Gram construction "
                "requires pure states"
            )
        else:
            out.append(np.asarray(s, dtype=complex).ravel())
    return out


def gram_centered(observables, states) -> GramUR:
    """Gram matrix of the centered vectors (X_k - <psi_k|X_k|psi_k>)|psi_k>.

    One normalized pure state per observable; the diagonal entries are the
    variances ΔX_k(psi_k)². With all states equal this is the Robertson matrix.
    """
    if len(observables) != len(states):
        raise InputError("need exactly one state per observable")
    for i, s in enumerate(states):
        if not isinstance(s, PureState):
            raise InputError(
                f"state {i} is not a pure state; the centered Gram construction "
                "requires normalized pure states"
            )
    dim = states[0].dim
    vecs = []
    names = []
    for obs, st in zip(observables, states):
        if obs.dim != dim or st.dim != dim:
            raise InputError("observables and states must share one dimension")
        psi = st.amplitudes
        mean = np.vdot(psi, obs.matrix @ psi).real
        vecs.append(obs.matrix @ psi - mean * psi)
        names.append(obs.name)
    return GramUR("centered", gram(vecs), tuple(names))


def gram_raw(observables, states) -> GramUR:
    """Gram matrix of the uncentered vectors X_k|psi_k>.

    States may be PureState objects or raw (possibly unnormalized) vectors;
    the construction is linear in each state, which is what the state
    transformation law acts on. For normalized states the diagonal is
    ΔX_k² + <X_k>².
    """
    if len(observables) != len(states):
        raise InputError("need exactly one state per observable")
    amps = _pure_amplitudes(states)
    dim = amps[0].size
    vecs = []
    names = []
    for obs, amp in zip(observables, amps):
        if obs.dim != dim or amp.size != dim:
            raise InputError("observables and states must share one dimension")
        vecs.append(obs.matrix @ amp)
        names.append(obs.name)
    return GramUR("raw", gram(vecs), tuple(names))


def transform_observables(lam, observables) -> list[Observable]:
    """Linear mix X'_i = sum_j lam[i, j] X_j of an observable tuple.

    The moments transform covariantly: sigma' = lam sigma lam^T and
    C' = lam C lam^T. A singular lam is allowed here; checks that require
    nonsingularity flag it at the point of use.
    """
    lam = np.asarray(lam, dtype=float)
    n = len(observables)
    if lam.shape != (n, n):
        raise InputError(f"transformation must be {n}x{n} real, got {lam.shape}")
    names = ",".join(o.name for o in observables)
    out = []
    for i in range(n):
        mixed = sum(lam[i, j] * observables[j].matrix for j in range(n))
        out.append(Observable(f"mix{i}({names})", mixed))
    return out


def transform_states(u, states) -> list[np.ndarray]:
    """Linear images psi'_i = sum_k conj(u[i, k]) psi_k of a state list.

    The images are deliberately not renormalized: the covariance law
    gram_raw(X, psi') = U gram_raw(X, psi) U† holds for the raw images.
    A (numerically) singular u is flagged with a warning.
    """
    u = np.asarray(u, dtype=complex)
    m = len(states)
    if u.shape != (m, m):
        raise InputError(f"transformation must be {m}x{m}, got {u.shape}")
    sv = np.linalg.svd(u, compute_uv=False)
    if sv[-1] <= 1e-12 * max(sv[0], 1.0):
        warnings.warn("state transformation is numerically singular", stacklevel=2)
    amps = _pure_amplitudes(states)
    dim = amps[0].size
    for i, a in enumerate(amps):
        if a.size != dim:
            raise InputError(f"state {i} has dimension {a.size}, expected {dim}")
    stack = np.array(amps)
    return list(u.conj() @ stack)
