"""Seeded random instance generators for property scans and comparisons.

Everything here is a pure function of the seed: the same (seed, parameters)
reproduce the same draws, reports, and therefore byte-identical scan output.
"""

from __future__ import annotations

import hashlib

import numpy as np

from .catalog import UR_SPECS, URReport, evaluate_ur, char_gap_from_states
from .errors import InputError
from .model import DensityMatrix, Observable, PureState, coherent_state, fock_operators

# Checks scanned by default: every displayed inequality plus the two
# characteristic-gap flavors. coherent_fixed is excluded because its premise
# (a canonical commutator) is not meaningful for arbitrary random observables.
DEFAULT_SCAN_URS = (
    "heisenberg",
    "schrodinger",
    "robertson",
    "characteristic",
    "type_1_2a",
    "type_1_2b",
    "type_2_1",
    "type_2_2a",
    "type_2_2b",
    "extended_schrodinger",
    "entangled_heisenberg",
    "type_3_1",
    "type_2_m",
    "char_gap_entangled",
    "char_gap_superadditive",
)

CHAR_GAP_IDS = ("char_gap_entangled", "char_gap_superadditive")


def stream_rng(seed: int, name: str) -> np.random.Generator:
    """Independent deterministic substream for a named scan lane."""
    tag = int.from_bytes(hashlib.sha256(name.encode()).digest()[:8], "big")
    return np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, tag])


def rand_observable(rng: np.random.Generator, dim: int, name: str = "H") -> Observable:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return Observable(name, (g + g.conj().T) / 2)


def rand_pure(rng: np.random.Generator, dim: int) -> PureState:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return PureState(v / np.linalg.norm(v))


def rand_density(rng: np.random.Generator, dim: int) -> DensityMatrix:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real)


def rand_state(rng: np.random.Generator, dim: int, allow_mixed: bool):
    if allow_mixed and rng.random() < 0.5:
        return rand_density(rng, dim)
    return rand_pure(rng, dim)


def scan_report(ur_id: str, rng: np.random.Generator, dims, pinned=None) -> URReport:
    """Draw one random admissible instance of the named check and evaluate it."""
    pinned = pinned or {}
    dims = list(dims)
    dim = int(pinned.get("dim", dims[int(rng.integers(len(dims)))]))

    if ur_id in CHAR_GAP_IDS:
        n_obs = int(pinned.get("n", rng.integers(2, 4)))
        m = int(pinned.get("m", rng.integers(1, 4)))
        r = int(pinned.get("r", rng.integers(1, n_obs + 1)))
        h_choice = pinned.get("h_choice") or ("robertson", "centered", "raw")[
            int(rng.integers(3))
        ]
        observables = [rand_observable(rng, dim, f"H{i}") for i in range(n_obs)]
        mixed_ok = h_choice == "robertson"
        states = [rand_state(rng, dim, mixed_ok) for _ in range(m)]
        return char_gap_from_states(ur_id, observables, states, r=r, h_choice=h_choice)

    spec = UR_SPECS.get(ur_id)
    if spec is None:
        raise InputError(f"unknown UR id {ur_id!r}")
    if spec.n_observables >= 0:
        n_obs = spec.n_observables
    else:
        n_obs = int(pinned.get("n", rng.integers(2, 5)))
    if spec.n_states >= 0:
        n_states = spec.n_states
    else:
        n_states = int(pinned.get("m", rng.integers(2, 5)))
    observables = [rand_observable(rng, dim, f"H{i}") for i in range(n_obs)]
    states = [rand_state(rng, dim, not spec.pure_only) for _ in range(n_states)]
    extras = {}
    if ur_id == "characteristic":
        extras["r"] = int(pinned.get("r", rng.integers(1, n_obs + 1)))
    return evaluate_ur(ur_id, observables, states, **extras)


def random_instances(ur_id: str, size: int, dims, seed: int):
    """Labeled (observables, states) draws shaped for the named check,
    reusable across checks with the same signature."""
    spec = UR_SPECS.get(ur_id)
    if spec is None or ur_id in CHAR_GAP_IDS:
        raise InputError(f"no generic instance generator for {ur_id!r}")
    rng = stream_rng(seed, f"instances:{ur_id}")
    dims = list(dims)
    out = []
    for k in range(size):
        dim = dims[int(rng.integers(len(dims)))]
        n_obs = spec.n_observables if spec.n_observables >= 0 else int(rng.integers(2, 5))
        n_states = spec.n_states if spec.n_states >= 0 else int(rng.integers(2, 5))
        observables = tuple(rand_observable(rng, dim, f"H{i}") for i in range(n_obs))
        states = tuple(rand_state(rng, dim, not spec.pure_only) for _ in range(n_states))
        out.append((f"{ur_id}[{k}] dim={dim}", observables, states))
    return out


def coherent_pair_grid(dim: int = 64, extent: float = 2.0, points: int = 5):
    """All unordered pairs of coherent states on a complex grid, with X = p.

    The grid covers Re(alpha), Im(alpha) in [-extent, extent] with `points`
    samples per axis; this family separates the two one-observable two-state
    checks in both directions of the relative-defect ordering.
    """
    _, p = fock_operators(dim)
    axis = np.linspace(-extent, extent, points)
    alphas = [complex(x, y) for x in axis for y in axis]
    states = [coherent_state(a, dim) for a in alphas]
    out = []
    for i in range(len(alphas)):
        for j in range(i + 1, len(alphas)):
            label = f"alpha1={alphas[i]:.2f} alpha2={alphas[j]:.2f}"
            out.append((label, (p,), (states[i], states[j])))
    return out
