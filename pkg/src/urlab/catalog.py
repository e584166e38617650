"""Named uncertainty-relation checks.

Every evaluator returns a URReport with the raw left side, right side, slack
lhs - rhs, and a saturation flag at the relative tolerance SLACK_RTOL. The
type (n, m) records how many observables and states enter the check. Checks
whose right side is a product of mean commutators audit that the product is
real before discarding its imaginary part.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import InputError, NumericError
from .linalg import slack_scale, slack_tolerance
from .model import DensityMatrix, Observable, PureState, QuantumState
from .moments import GramUR, MomentSet, moment_set, robertson_matrix


@dataclass(frozen=True, eq=False)
class URReport:
    """Outcome of a single uncertainty-relation evaluation."""

    ur_id: str
    type_nm: tuple[int, int]
    lhs: float
    rhs: float
    slack: float
    saturated: bool
    tol: float
    inputs_digest: str

    def as_dict(self) -> dict:
        return {
            "ur_id": self.ur_id,
            "type_nm": list(self.type_nm),
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "saturated": self.saturated,
            "tol": self.tol,
            "inputs_digest": self.inputs_digest,
        }

    def holds(self, rtol: float = linalg.SLACK_RTOL) -> bool:
        return self.slack >= -rtol * slack_scale(self.lhs, self.rhs)


def _digest(ur_id: str, observables=(), states=(), extras=()) -> str:
    h = hashlib.sha256()
    h.update(ur_id.encode())
    for obs in observables:
        h.update(b"O")
        h.update(obs.name.encode())
        h.update(np.ascontiguousarray(obs.matrix).tobytes())
    for st in states:
        if isinstance(st, PureState):
            h.update(b"P")
            h.update(np.ascontiguousarray(st.amplitudes).tobytes())
        elif isinstance(st, DensityMatrix):
            h.update(b"D")
            h.update(np.ascontiguousarray(st.matrix).tobytes())
        else:
            h.update(b"V")
            h.update(np.ascontiguousarray(np.asarray(st, dtype=complex)).tobytes())
    for x in extras:
        h.update(repr(x).encode())
    return h.hexdigest()[:16]


def _report(ur_id, n, m, lhs, rhs, digest) -> URReport:
    lhs = float(lhs)
    rhs = float(rhs)
    slack = lhs - rhs
    tol = slack_tolerance(lhs, rhs)
    return URReport(
        ur_id=ur_id,
        type_nm=(n, m),
        lhs=lhs,
        rhs=rhs,
        slack=slack,
        saturated=abs(slack) <= tol,
        tol=tol,
        inputs_digest=digest,
    )


def _mean_commutator(x: Observable, y: Observable, state: QuantumState) -> complex:
    """Complex expectation <[X, Y]> (purely imaginary up to roundoff)."""
    if isinstance(state, PureState):
        z = np.vdot(x.matrix @ state.amplitudes, y.matrix @ state.amplitudes)
        return z - np.conj(z)
    rho = state.matrix
    return complex(np.trace(rho @ (x.matrix @ y.matrix - y.matrix @ x.matrix)))


def _real_audited(z: complex, what: str) -> float:
    if abs(z.imag) > 1e-10 * max(1.0, abs(z)):
        raise NumericError(f"imaginary residue {z.imag:.3e} in {what}")
    return z.real


def _require_pure(states) -> None:
    for i, s in enumerate(states):
        if not isinstance(s, PureState):
            raise InputError(f"state {i} must be pure for this check")


# ---------------------------------------------------------------------------
# one-state checks


def heisenberg(x: Observable, y: Observable, state: QuantumState) -> URReport:
    """ΔX²ΔY² >= |<[X,Y]>|²/4."""
    ms = moment_set((x, y), state)
    lhs = ms.sigma[0, 0] * ms.sigma[1, 1]
    rhs = abs(_mean_commutator(x, y, state)) ** 2 / 4
    return _report("heisenberg", 2, 1, lhs, rhs, _digest("heisenberg", (x, y), (state,)))


def schrodinger(x: Observable, y: Observable, state: QuantumState) -> URReport:
    """ΔX²ΔY² − (ΔXY)² >= |<[X,Y]>|²/4, the two-observable Schwartz bound."""
    ms = moment_set((x, y), state)
    lhs = ms.sigma[0, 0] * ms.sigma[1, 1] - ms.sigma[0, 1] ** 2
    rhs = abs(_mean_commutator(x, y, state)) ** 2 / 4
    return _report("schrodinger", 2, 1, lhs, rhs, _digest("schrodinger", (x, y), (state,)))


def robertson(observables, state: QuantumState) -> URReport:
    """det sigma >= det C for an n-tuple of observables, n >= 2."""
    if len(observables) < 2:
        raise InputError("robertson requires at least 2 observables")
    ms = moment_set(observables, state)
    lhs = np.linalg.det(ms.sigma)
    rhs = np.linalg.det(ms.cmat)
    n = len(observables)
    return _report("robertson", n, 1, lhs, rhs, _digest("robertson", observables, (state,)))


def characteristic(observables, state: QuantumState, r: int) -> URReport:
    """C_r(sigma) >= C_r(C) for every characteristic order 1 <= r <= n."""
    n = len(observables)
    if not 1 <= r <= n:
        raise InputError(f"order r={r} outside 1..{n}")
    ms = moment_set(observables, state)
    lhs = linalg.char_coeffs(ms.sigma)[r - 1]
    rhs = linalg.char_coeffs(ms.cmat)[r - 1]
    digest = _digest("characteristic", observables, (state,), (r,))
    return _report("characteristic", n, 1, lhs, rhs, digest)


def type_2_1(x: Observable, y: Observable, state: QuantumState) -> URReport:
    """<X²><Y²> >= (ΔXY + <X><Y>)² + |<[X,Y]>|²/4, the uncentered pair check."""
    ms = moment_set((x, y), state)
    lhs = (ms.sigma[0, 0] + ms.means[0] ** 2) * (ms.sigma[1, 1] + ms.means[1] ** 2)
    comm = abs(_mean_commutator(x, y, state)) ** 2 / 4
    rhs = (ms.sigma[0, 1] + ms.means[0] * ms.means[1]) ** 2 + comm
    return _report("type_2_1", 2, 1, lhs, rhs, _digest("type_2_1", (x, y), (state,)))


def type_3_1(x: Observable, y: Observable, z: Observable, psi: PureState) -> URReport:
    """ΔX²(ΔY² + ΔZ²) >= 2ΔXY ΔXZ + Re(<[X,Z]><[Y,X]>)/2 in one pure state.

    With Z = Y the slack is exactly twice the Schrödinger slack; with X = Y it
    reduces to ΔX² + ΔZ² >= 2ΔXZ.
    """
    _require_pure((psi,))
    ms = moment_set((x, y, z), psi)
    lhs = ms.sigma[0, 0] * (ms.sigma[1, 1] + ms.sigma[2, 2])
    prod = _mean_commutator(x, z, psi) * _mean_commutator(y, x, psi)
    rhs = 2 * ms.sigma[0, 1] * ms.sigma[0, 2] + _real_audited(prod, "(3,1) commutator product") / 2
    return _report("type_3_1", 3, 1, lhs, rhs, _digest("type_3_1", (x, y, z), (psi,)))


def coherent_fixed(x: Observable, y: Observable, state: QuantumState) -> URReport:
    """ΔX² + ΔY² >= 1 for a dimensionless canonical pair ([X, Y] = i).

    Ordinary check obtained from the canonical two-state extension by freezing
    one slot at a coherent state; minimized by coherent states only.
    """
    ms = moment_set((x, y), state)
    lhs = ms.sigma[0, 0] + ms.sigma[1, 1]
    digest = _digest("coherent_fixed", (x, y), (state,))
    return _report("coherent_fixed", 2, 1, lhs, 1.0, digest)


# ---------------------------------------------------------------------------
# two-state checks


def type_1_2(x: Observable, psi1: PureState, psi2: PureState, variant: str) -> URReport:
    """Second-moment correlation of one observable across two pure states.

    Variant "a" compares the variance product against the centered cross term
    |<psi1|(X-<X>_1)(X-<X>_2)|psi2>|²; variant "b" compares <X²>_1 <X²>_2
    against |<psi1|X²|psi2>|².
    """
    _require_pure((psi1, psi2))
    if variant not in ("a", "b"):
        raise InputError(f"variant must be 'a' or 'b', got {variant!r}")
    ms1 = moment_set((x,), psi1)
    ms2 = moment_set((x,), psi2)
    v1, v2 = ms1.sigma[0, 0], ms2.sigma[0, 0]
    m1, m2 = ms1.means[0], ms2.means[0]
    x1 = x.matrix @ psi1.amplitudes
    x2 = x.matrix @ psi2.amplitudes
    if variant == "a":
        chi1 = x1 - m1 * psi1.amplitudes
        chi2 = x2 - m2 * psi2.amplitudes
        lhs = v1 * v2
        rhs = abs(np.vdot(chi1, chi2)) ** 2
    else:
        lhs = (v1 + m1 * m1) * (v2 + m2 * m2)
        rhs = abs(np.vdot(x1, x2)) ** 2
    digest = _digest(f"type_1_2{variant}", (x,), (psi1, psi2))
    return _report(f"type_1_2{variant}", 1, 2, lhs, rhs, digest)


def type_2_2(
    x: Observable, y: Observable, psi1: PureState, psi2: PureState, variant: str
) -> URReport:
    """Cross-state pair check: variance (variant "a") or raw second moment
    (variant "b") of X in psi1 against Y in psi2, bounded by the matching
    Schwartz cross term."""
    _require_pure((psi1, psi2))
    if variant not in ("a", "b"):
        raise InputError(f"variant must be 'a' or 'b', got {variant!r}")
    ms1 = moment_set((x,), psi1)
    ms2 = moment_set((y,), psi2)
    vx1, my2 = ms1.sigma[0, 0], ms2.means[0]
    mx1, vy2 = ms1.means[0], ms2.sigma[0, 0]
    x1 = x.matrix @ psi1.amplitudes
    y2 = y.matrix @ psi2.amplitudes
    if variant == "a":
        chi1 = x1 - mx1 * psi1.amplitudes
        chi2 = y2 - my2 * psi2.amplitudes
        lhs = vx1 * vy2
        rhs = abs(np.vdot(chi1, chi2)) ** 2
    else:
        lhs = (vx1 + mx1 * mx1) * (vy2 + my2 * my2)
        rhs = abs(np.vdot(x1, y2)) ** 2
    digest = _digest(f"type_2_2{variant}", (x, y), (psi1, psi2))
    return _report(f"type_2_2{variant}", 2, 2, lhs, rhs, digest)


def _pairwise_extended_sides(msets: list[MomentSet], comms: list[complex]) -> tuple[float, float]:
    """Pairwise-symmetrized sides of the state-extended Schrödinger check."""
    lhs = 0.0
    rhs = 0.0
    m = len(msets)
    for i in range(m):
        for j in range(i + 1, m):
            a, b = msets[i], msets[j]
            lhs += 0.5 * (a.sigma[0, 0] * b.sigma[1, 1] + b.sigma[0, 0] * a.sigma[1, 1])
            lhs -= a.sigma[0, 1] * b.sigma[0, 1]
            prod = comms[i] * np.conj(comms[j])
            rhs += _real_audited(prod, "commutator product") / 4
    return lhs, rhs


def extended_schrodinger(
    x: Observable, y: Observable, psi1: PureState, psi2: PureState
) -> URReport:
    """State-extended Schrödinger check for two pure states:

    [ΔX²(ψ1)ΔY²(ψ2) + ΔX²(ψ2)ΔY²(ψ1)]/2 − ΔXY(ψ1)ΔXY(ψ2)
        >= Re(<[X,Y]>_1 <[X,Y]>_2*)/4.

    With ψ1 = ψ2 this is exactly the Schrödinger check.
    """
    _require_pure((psi1, psi2))
    msets = [moment_set((x, y), s) for s in (psi1, psi2)]
    comms = [_mean_commutator(x, y, s) for s in (psi1, psi2)]
    lhs, rhs = _pairwise_extended_sides(msets, comms)
    digest = _digest("extended_schrodinger", (x, y), (psi1, psi2))
    return _report("extended_schrodinger", 2, 2, lhs, rhs, digest)


def entangled_heisenberg(
    x: Observable, y: Observable, psi1: PureState, psi2: PureState
) -> URReport:
    """Entangled Heisenberg extension:

    [ΔX²(ψ1)ΔY²(ψ2) + ΔX²(ψ2)ΔY²(ψ1)]/2 >= |<[X,Y]>_1 <[X,Y]>_2|/4.

    For canonical X, Y the right side is 1/4, i.e. the doubled left side is
    bounded below by 1/2.
    """
    _require_pure((psi1, psi2))
    ms1 = moment_set((x, y), psi1)
    ms2 = moment_set((x, y), psi2)
    lhs = 0.5 * (
        ms1.sigma[0, 0] * ms2.sigma[1, 1] + ms2.sigma[0, 0] * ms1.sigma[1, 1]
    )
    rhs = abs(_mean_commutator(x, y, psi1) * _mean_commutator(x, y, psi2)) / 4
    digest = _digest("entangled_heisenberg", (x, y), (psi1, psi2))
    return _report("entangled_heisenberg", 2, 2, lhs, rhs, digest)


# ---------------------------------------------------------------------------
# many-state checks


def type_2_m(x: Observable, y: Observable, states, uncorrected: bool = False) -> URReport:
    """Pairwise state-extended check for two observables over m >= 2 states
    (pure or mixed), one symmetrized term per state pair:

    sum_{u<v} { [ΔX²(u)ΔY²(v) + ΔX²(v)ΔY²(u)]/2 − ΔXY(u)ΔXY(v) }
        >= sum_{u<v} C(u) C(v),       C = -(i/2)<[X,Y]>.

    At m = 2 this is exactly the extended Schrödinger check; the slack equals
    half the superadditivity gap of the per-state Robertson matrices at order
    n = 2. ``uncorrected`` evaluates an unsymmetrized variant (X-X variance
    products and a ΔXY·ΔY² covariance term), kept only for comparison: it does
    not reduce consistently at m = 2 and its validity is not asserted.
    """
    m = len(states)
    if m < 2:
        raise InputError(f"type_2_m requires m >= 2 states, got {m}")
    msets = [moment_set((x, y), s) for s in states]
    comms = [_mean_commutator(x, y, s) for s in states]
    if not uncorrected:
        lhs, rhs = _pairwise_extended_sides(msets, comms)
    else:
        lhs = 0.0
        rhs = 0.0
        cs = [_real_audited(-0.5j * c, "mean commutator") for c in comms]
        for i in range(m):
            for j in range(i + 1, m):
                a, b = msets[i], msets[j]
                lhs += a.sigma[0, 0] * b.sigma[1, 1] + b.sigma[0, 0] * a.sigma[0, 0]
                lhs -= 2 * a.sigma[0, 1] * b.sigma[1, 1]
                rhs += 2 * cs[i] * cs[j]
    digest = _digest("type_2_m", (x, y), tuple(states), (uncorrected,))
    return _report("type_2_m", 2, m, lhs, rhs, digest)


def char_gap_check(matrices, r: int, flavor: str) -> URReport:
    """Characteristic gap check over a list of physically built psd matrices.

    flavor "entangled": C_r(sum of real parts) >= C_r(sum of imaginary parts);
    flavor "superadditive": C_r(sum) >= sum of C_r. At m = 1 the entangled
    flavor recovers the single-state characteristic check.
    """
    if flavor not in ("entangled", "superadditive"):
        raise InputError(f"flavor must be 'entangled' or 'superadditive', got {flavor!r}")
    if len(matrices) == 0:
        raise InputError("char_gap_check requires at least one matrix")
    for i, g in enumerate(matrices):
        if not isinstance(g, GramUR):
            raise InputError(f"entry {i} is not a GramUR")
    h_list = [g.matrix for g in matrices]
    if flavor == "entangled":
        lhs, rhs = linalg.entangled_char_pair(h_list, r)
    else:
        lhs, rhs = linalg.superadditive_char_pair(h_list, r)
    n = matrices[0].dim
    m = len(matrices)
    prov = tuple(f"{g.kind}:{','.join(g.provenance)}" for g in matrices)
    digest = _digest(f"char_gap_{flavor}", (), tuple(h_list), (r,) + prov)
    return _report(f"char_gap_{flavor}", n, m, lhs, rhs, digest)


# ---------------------------------------------------------------------------
# registry / dispatch


@dataclass(frozen=True)
class URSpec:
    """Call signature of a catalog check: how many observables and state slots
    it takes, whether the slots accept mixed states."""

    ur_id: str
    n_observables: int  # -1 = variable (>= 2)
    n_states: int  # -1 = variable (>= 2)
    pure_only: bool


UR_SPECS = {
    "heisenberg": URSpec("heisenberg", 2, 1, False),
    "schrodinger": URSpec("schrodinger", 2, 1, False),
    "robertson": URSpec("robertson", -1, 1, False),
    "characteristic": URSpec("characteristic", -1, 1, False),
    "type_1_2a": URSpec("type_1_2a", 1, 2, True),
    "type_1_2b": URSpec("type_1_2b", 1, 2, True),
    "type_2_1": URSpec("type_2_1", 2, 1, False),
    "type_2_2a": URSpec("type_2_2a", 2, 2, True),
    "type_2_2b": URSpec("type_2_2b", 2, 2, True),
    "extended_schrodinger": URSpec("extended_schrodinger", 2, 2, True),
    "entangled_heisenberg": URSpec("entangled_heisenberg", 2, 2, True),
    "type_3_1": URSpec("type_3_1", 3, 1, True),
    "type_2_m": URSpec("type_2_m", 2, -1, False),
    "coherent_fixed": URSpec("coherent_fixed", 2, 1, False),
}


def evaluate_ur(ur_id: str, observables, states, **extras) -> URReport:
    """Evaluate a catalog check by name on explicit observables and states.

    ``extras`` forwards check-specific parameters: r (characteristic),
    uncorrected (type_2_m).
    """
    spec = UR_SPECS.get(ur_id)
    if spec is None:
        raise InputError(f"unknown UR id {ur_id!r}")
    observables = tuple(observables)
    states = tuple(states)
    if spec.n_observables >= 0 and len(observables) != spec.n_observables:
        raise InputError(
            f"{ur_id} takes {spec.n_observables} observables, got {len(observables)}"
        )
    if spec.n_observables < 0 and len(observables) < 2:
        raise InputError(f"{ur_id} takes at least 2 observables")
    if spec.n_states >= 0 and len(states) != spec.n_states:
        raise InputError(f"{ur_id} takes {spec.n_states} states, got {len(states)}")
    if spec.n_states < 0 and len(states) < 2:
        raise InputError(f"{ur_id} takes at least 2 states")
    if spec.pure_only:
        _require_pure(states)

    if ur_id == "heisenberg":
        return heisenberg(*observables, states[0])
    if ur_id == "schrodinger":
        return schrodinger(*observables, states[0])
    if ur_id == "robertson":
        return robertson(observables, states[0])
    if ur_id == "characteristic":
        r = extras.get("r", len(observables))
        return characteristic(observables, states[0], r)
    if ur_id in ("type_1_2a", "type_1_2b"):
        return type_1_2(observables[0], states[0], states[1], ur_id[-1])
    if ur_id == "type_2_1":
        return type_2_1(*observables, states[0])
    if ur_id in ("type_2_2a", "type_2_2b"):
        return type_2_2(*observables, states[0], states[1], ur_id[-1])
    if ur_id == "extended_schrodinger":
        return extended_schrodinger(*observables, states[0], states[1])
    if ur_id == "entangled_heisenberg":
        return entangled_heisenberg(*observables, states[0], states[1])
    if ur_id == "type_3_1":
        return type_3_1(*observables, states[0])
    if ur_id == "type_2_m":
        return type_2_m(*observables, states, uncorrected=extras.get("uncorrected", False))
    if ur_id == "coherent_fixed":
        return coherent_fixed(*observables, states[0])
    raise InputError(f"unknown UR id {ur_id!r}")


def char_gap_from_states(
    ur_kind: str, observables, states, r: int | None = None, h_choice: str = "robertson"
) -> URReport:
    """Build per-state matrices with one of the physical choices and run the
    requested characteristic gap check over them.

    ``h_choice`` is "robertson", "centered", or "raw"; the centered and raw
    Gram choices need one pure state per observable and are applied per state
    by using that state in every slot.
    """
    from .moments import gram_centered, gram_raw  # local import to avoid cycle noise

    flavor = {"char_gap_entangled": "entangled", "char_gap_superadditive": "superadditive"}.get(
        ur_kind
    )
    if flavor is None:
        raise InputError(f"unknown characteristic-gap kind {ur_kind!r}")
    mats = []
    for s in states:
        if h_choice == "robertson":
            mats.append(robertson_matrix(observables, s))
        elif h_choice == "centered":
            mats.append(gram_centered(observables, [s] * len(observables)))
        elif h_choice == "raw":
            mats.append(gram_raw(observables, [s] * len(observables)))
        else:
            raise InputError(f"unknown H choice {h_choice!r}")
    if r is None:
        r = len(observables)
    return char_gap_check(mats, r, flavor)
