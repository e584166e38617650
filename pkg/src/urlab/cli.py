"""Command-line surface: declarative checks, seeded property scans, slack
minimization, precision comparison, and divergence evaluation.

Configs and reports are UTF-8 JSON. Complex numbers are [re, im] pairs (bare
reals are accepted on input); matrices are row-major lists of such entries.
Exit codes: 0 success, 1 an inequality was violated, 2 config error, 3 input
validity error, 4 numeric error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .analysis import compare_precision, minimize_slack, divergence
from .catalog import UR_SPECS, URReport, evaluate_ur
from .ensembles import (
    DEFAULT_SCAN_URS,
    CHAR_GAP_IDS,
    coherent_pair_grid,
    random_instances,
    scan_report,
    stream_rng,
)
from .errors import ConfigError, InputError, NumericError
from .linalg import SLACK_RTOL, slack_scale
from .model import (
    Observable,
    fock_operators,
    fock_state,
    coherent_state,
    quad_mix,
    quad_plus,
    raw_density_state,
    raw_vector_state,
    spin_operators,
    squeezed_state,
)

SEED_ENV = "URLAB_SEED"
DEFAULT_DIM = 64

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_CONFIG = 2
EXIT_INPUT = 3
EXIT_NUMERIC = 4


def _parse_complex(value, what: str) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise ConfigError(f"{what} must be a number or [re, im] pair, got {value!r}")


def _parse_matrix(rows, what: str) -> np.ndarray:
    if not isinstance(rows, list) or not rows:
        raise ConfigError(f"{what} must be a non-empty row-major list")
    return np.array([[_parse_complex(x, what) for x in row] for row in rows])


def build_observable(spec: dict, dim: int) -> Observable:
    if not isinstance(spec, dict) or "builder" not in spec:
        raise ConfigError(f"observable spec needs a 'builder' key: {spec!r}")
    builder = spec["builder"]
    if builder == "fock_q":
        return fock_operators(dim)[0]
    if builder == "fock_p":
        return fock_operators(dim)[1]
    if builder == "quad_plus":
        return quad_plus(dim)
    if builder == "quad_mix":
        return quad_mix(dim)
    if builder in ("spin_jx", "spin_jy", "spin_jz"):
        j = spec.get("j")
        if j is None:
            raise ConfigError(f"{builder} needs a 'j' parameter")
        ops = spin_operators(float(j))
        return ops[("spin_jx", "spin_jy", "spin_jz").index(builder)]
    if builder == "raw_observable":
        return Observable(spec.get("name", "raw"), _parse_matrix(spec.get("matrix"), "matrix"))
    raise ConfigError(f"unknown observable builder {builder!r}")


def build_state(spec: dict, dim: int):
    if not isinstance(spec, dict) or "builder" not in spec:
        raise ConfigError(f"state spec needs a 'builder' key: {spec!r}")
    builder = spec["builder"]
    if builder == "coherent":
        return coherent_state(_parse_complex(spec.get("alpha", 0.0), "alpha"), dim)
    if builder == "squeezed":
        return squeezed_state(
            _parse_complex(spec.get("alpha", 0.0), "alpha"),
            float(spec.get("r", 0.0)),
            float(spec.get("phi", 0.0)),
            dim,
        )
    if builder == "fock_n":
        return fock_state(int(spec.get("k", 0)), dim)
    if builder == "raw_vector":
        amps = spec.get("amplitudes")
        if not isinstance(amps, list):
            raise ConfigError("raw_vector needs an 'amplitudes' list")
        return raw_vector_state([_parse_complex(x, "amplitude") for x in amps])
    if builder == "raw_density":
        return raw_density_state(_parse_matrix(spec.get("matrix"), "density matrix"))
    raise ConfigError(f"unknown state builder {builder!r}")


def _ur_entries(config) -> list[tuple[str, dict]]:
    urs = config.get("urs")
    if urs == "all":
        return [(ur, {}) for ur in DEFAULT_SCAN_URS]
    if not isinstance(urs, list) or not urs:
        raise ConfigError("config needs a non-empty 'urs' list (or \"all\" for scans)")
    out = []
    for entry in urs:
        if isinstance(entry, str):
            out.append((entry, {}))
        elif isinstance(entry, dict) and "id" in entry:
            extras = {k: v for k, v in entry.items() if k != "id"}
            out.append((entry["id"], extras))
        else:
            raise ConfigError(f"bad UR entry {entry!r}")
    for ur_id, _ in out:
        if ur_id not in UR_SPECS and ur_id not in CHAR_GAP_IDS:
            raise ConfigError(f"unknown UR id {ur_id!r}")
    return out


def _resolve_seed(args, config) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ConfigError(f"{SEED_ENV} must be an integer, got {env!r}") from exc
    return int(config.get("seed", 0))


def _resolve_dim(args, config) -> int:
    if args.dim is not None:
        return args.dim
    return int(config.get("hilbert_dim", DEFAULT_DIM))


def _slack_rtol(config) -> float:
    tol = config.get("tolerances", {})
    if not isinstance(tol, dict):
        raise ConfigError("'tolerances' must be an object")
    return float(tol.get("slack_rtol", SLACK_RTOL))


def _violated(report: URReport, rtol: float) -> bool:
    return report.slack < -rtol * slack_scale(report.lhs, report.rhs)


def _report_row(report: URReport, rtol: float) -> dict:
    row = report.as_dict()
    row["holds"] = not _violated(report, rtol)
    return row


# ---------------------------------------------------------------------------
# commands


def run_check(config: dict, seed: int, dim: int) -> tuple[dict, int]:
    rtol = _slack_rtol(config)
    observables = [build_observable(s, dim) for s in config.get("observables", [])]
    states = [build_state(s, dim) for s in config.get("states", [])]
    if not observables or not states:
        raise ConfigError("check needs explicit 'observables' and 'states'")
    rows = []
    for ur_id, extras in _ur_entries(config):
        if ur_id in CHAR_GAP_IDS:
            from .catalog import char_gap_from_states

            report = char_gap_from_states(
                ur_id,
                observables,
                states,
                r=extras.get("r"),
                h_choice=extras.get("h_choice", "robertson"),
            )
        else:
            report = evaluate_ur(ur_id, observables, states, **extras)
        rows.append(_report_row(report, rtol))
    n_viol = sum(not r["holds"] for r in rows)
    summary = {
        "n_results": len(rows),
        "n_violations": n_viol,
        "worst_slack": min(r["slack"] for r in rows),
        "all_hold": n_viol == 0,
    }
    body = {"results": rows, "summary": summary}
    return body, EXIT_VIOLATION if n_viol else EXIT_OK


def run_scan(config: dict, seed: int, dim: int) -> tuple[dict, int]:
    rtol = _slack_rtol(config)
    size = int(config.get("ensemble_size", 100))
    if size < 1:
        raise ConfigError("ensemble_size must be >= 1")
    dims_cfg = config.get("dims", {"min": 2, "max": 8})
    if isinstance(dims_cfg, dict):
        dims = list(range(int(dims_cfg.get("min", 2)), int(dims_cfg.get("max", 8)) + 1))
    else:
        dims = [int(d) for d in dims_cfg]
    if not dims or min(dims) < 2:
        raise ConfigError(f"bad dims {dims_cfg!r}")
    pinned = config.get("pinned", {})
    rows = []
    n_viol = 0
    worst_overall = float("inf")
    for ur_id, extras in _ur_entries(config):
        rng = stream_rng(seed, f"scan:{ur_id}")
        pins = dict(pinned)
        pins.update(extras)
        worst = float("inf")
        worst_raw = float("inf")
        worst_digest = ""
        violations = 0
        for _ in range(size):
            report = scan_report(ur_id, rng, dims, pins)
            rel = report.slack / slack_scale(report.lhs, report.rhs)
            worst_raw = min(worst_raw, report.slack)
            if rel < worst:
                worst = rel
                worst_digest = report.inputs_digest
            if _violated(report, rtol):
                violations += 1
        n_viol += violations
        worst_overall = min(worst_overall, worst)
        rows.append(
            {
                "ur_id": ur_id,
                "instances": size,
                "worst_slack": worst_raw,
                "worst_relative_slack": worst,
                "worst_digest": worst_digest,
                "violations": violations,
            }
        )
    summary = {
        "n_results": len(rows),
        "n_violations": n_viol,
        "worst_relative_slack": worst_overall,
        "all_hold": n_viol == 0,
    }
    body = {"results": rows, "summary": summary}
    return body, EXIT_VIOLATION if n_viol else EXIT_OK


def run_minimize(config: dict, seed: int, dim: int) -> tuple[dict, int]:
    ur_id = config.get("ur")
    if not isinstance(ur_id, str):
        raise ConfigError("minimize needs a 'ur' id")
    observables = [build_observable(s, dim) for s in config.get("observables", [])]
    if not observables:
        raise ConfigError("minimize needs 'observables'")
    fixed = {
        int(slot): build_state(spec, dim)
        for slot, spec in (config.get("fixed_states") or {}).items()
    }
    free = config.get("free_slots")
    result = minimize_slack(
        ur_id,
        observables,
        dim=dim,
        free_slots=free,
        fixed_states=fixed,
        budget=int(config.get("budget", 400)),
        restarts=int(config.get("restarts", 8)),
        seed=seed,
        extras=config.get("extras"),
    )
    row = {
        "ur_id": result.ur_id,
        "slack": result.slack,
        "tol": result.tol,
        "iterations": result.iterations,
        "evaluations": result.evaluations,
        "converged": result.converged,
        "slots": [
            {"alpha": [s.alpha.real, s.alpha.imag], "r": s.r, "phi": s.phi}
            for s in result.slots
        ],
    }
    body = {"results": [row], "summary": {"best_slack": result.slack}}
    code = EXIT_VIOLATION if result.slack < -result.tol else EXIT_OK
    return body, code


def _compare_instances(config: dict, seed: int, dim: int):
    spec = config.get("instances")
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("compare needs an 'instances' object with a 'kind'")
    kind = spec["kind"]
    if kind == "coherent_grid":
        return coherent_pair_grid(
            dim=int(spec.get("hilbert_dim", dim)),
            extent=float(spec.get("extent", 2.0)),
            points=int(spec.get("points", 5)),
        )
    if kind == "random":
        ur = spec.get("ur") or config.get("ur_a")
        dims = [int(d) for d in spec.get("dims", [2, 3, 4, 6, 8])]
        return random_instances(ur, int(spec.get("size", 200)), dims, int(spec.get("seed", seed)))
    raise ConfigError(f"unknown instances kind {kind!r}")


def run_compare(config: dict, seed: int, dim: int) -> tuple[dict, int]:
    ur_a, ur_b = config.get("ur_a"), config.get("ur_b")
    if not ur_a or not ur_b:
        raise ConfigError("compare needs 'ur_a' and 'ur_b'")
    stats = compare_precision(
        ur_a,
        ur_b,
        _compare_instances(config, seed, dim),
        extras_a=config.get("extras_a"),
        extras_b=config.get("extras_b"),
    )

    def ex_dict(ex):
        if ex is None:
            return None
        return {
            "label": ex.label,
            "slack_a": ex.slack_a,
            "slack_b": ex.slack_b,
            "defect_a": ex.defect_a,
            "defect_b": ex.defect_b,
        }

    row = {
        "ur_a": stats.ur_a,
        "ur_b": stats.ur_b,
        "size": stats.size,
        "fraction_a_tighter": stats.fraction_a_tighter,
        "fraction_a_tighter_relative": stats.fraction_a_tighter_relative,
        "ties": stats.ties,
        "min_slack_a": stats.min_slack_a,
        "min_slack_b": stats.min_slack_b,
        "example_a_tighter": ex_dict(stats.example_a_tighter),
        "example_b_tighter": ex_dict(stats.example_b_tighter),
    }
    rtol = _slack_rtol(config)
    violated = stats.min_slack_a < -rtol or stats.min_slack_b < -rtol
    body = {"results": [row], "summary": {"all_hold": not violated}}
    return body, EXIT_VIOLATION if violated else EXIT_OK


def run_divergence(config: dict, seed: int, dim: int) -> tuple[dict, int]:
    obs = config.get("observable")
    sa, sb = config.get("state_a"), config.get("state_b")
    if obs is None or sa is None or sb is None:
        raise ConfigError("divergence needs 'observable', 'state_a' and 'state_b'")
    x = build_observable(obs, dim)
    s1 = build_state(sa, dim)
    s2 = build_state(sb, dim)
    variant = config.get("variant", "a")
    d_ab = divergence(x, s1, s2, variant)
    d_ba = divergence(x, s2, s1, variant)
    row = {"variant": variant, "d_ab": d_ab, "d_ba": d_ba}
    body = {"results": [row], "summary": {"d": d_ab}}
    return body, EXIT_OK


_COMMANDS = {
    "check": run_check,
    "scan": run_scan,
    "minimize": run_minimize,
    "compare": run_compare,
    "divergence": run_divergence,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="urlab",
        description="Construct, evaluate, minimize and property-test uncertainty relations",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", required=True, help="JSON config file")
        cmd.add_argument("--seed", type=int, default=None, help="global seed override")
        cmd.add_argument("--dim", type=int, default=None, help="Hilbert dimension override")
        cmd.add_argument("--out", default=None, help="write the JSON report here")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if not isinstance(config, dict):
        print("config error: top level must be a JSON object", file=sys.stderr)
        return EXIT_CONFIG
    try:
        seed = _resolve_seed(args, config)
        dim = _resolve_dim(args, config)
        body, code = _COMMANDS[args.command](config, seed, dim)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    doc = {
        "tool": {"name": "urlab", "version": __version__},
        "command": args.command,
        "seed": seed,
        "hilbert_dim": dim,
        "config": config,
    }
    doc.update(body)
    text = json.dumps(doc, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
