"""Command-line front end: gen, solve, reconstruct, resources.

Exit codes: 0 success, 1 usage or input error, 2 solve finished without
convergence.  Every command that writes a primary output also writes a run
manifest next to it (``<output>.manifest.json``) recording the argv, the
package version and the produced files, so a run can be re-issued verbatim.

Default output locations honor the SESVQE_OUTPUT_DIR environment variable;
explicit ``--out`` paths are used as given.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import datetime
import json
import os
import sys
from importlib import metadata
from pathlib import Path

import numpy as np

from . import circuits, measurement, resources, vqe
from .encoding import build_map, register_width
from .hamiltonian import (
    PenaltyConfig,
    SiteHamiltonian,
    chain_instance,
    complex_ring_instance,
    ground_energy,
    load_hamiltonian,
    random_hermitian_instance,
    save_hamiltonian,
)

MANIFEST_TAG = "sesvqe-manifest/1"
SOLVE_REPORT_TAG = "sesvqe-solve-report/1"
RECONSTRUCTION_TAG = "sesvqe-reconstruction/1"
RESOURCES_TAG = "sesvqe-resources/1"


class UsageError(Exception):
    pass


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _version() -> str:
    try:
        return metadata.version("sesvqe")
    except metadata.PackageNotFoundError:
        return "unknown"


def _output_dir() -> Path:
    return Path(os.environ.get("SESVQE_OUTPUT_DIR", "."))


def _resolve_out(arg: str | None, default_name: str) -> Path:
    if arg:
        return Path(arg)
    return _output_dir() / default_name


def _utc_now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _write_json(path: Path, doc: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def _write_manifest(primary: Path, argv, outputs) -> Path:
    manifest_path = Path(str(primary) + ".manifest.json")
    doc = {
        "format": MANIFEST_TAG,
        "command": ["sesvqe", *argv],
        "created_utc": _utc_now(),
        "package_version": _version(),
        "outputs": [str(p) for p in outputs],
    }
    _write_json(manifest_path, doc)
    return manifest_path


def cmd_gen(args, argv) -> int:
    meta = {"family": args.family, "seed": args.seed}
    if args.family == "chain":
        h = chain_instance(args.n_sites, args.hopping, args.disorder, args.seed)
        meta.update(hopping=args.hopping, disorder=args.disorder)
    elif args.family == "random_hermitian":
        h = random_hermitian_instance(args.n_sites, args.scale, args.seed)
        meta.update(scale=args.scale)
    elif args.family == "complex_ring":
        h = complex_ring_instance(args.n_sites, args.hopping, args.seed)
        meta.update(hopping=args.hopping)
    else:
        raise UsageError(f"unknown family {args.family!r}")
    out = _resolve_out(args.out, "hamiltonian.json")
    out.parent.mkdir(parents=True, exist_ok=True)
    save_hamiltonian(h, out, meta)
    manifest = _write_manifest(out, argv, [out])
    print(f"wrote {out} ({args.family}, {args.n_sites} sites)")
    print(f"ground energy {ground_energy(h):.12g}")
    print(f"manifest {manifest}")
    return 0


def _config_get(doc: dict, key: str, default=None, required: bool = False):
    if key in doc:
        return doc[key]
    if required:
        raise ConfigError(f"config key {key!r} is missing")
    return default


def _parse_shots(value) -> int | None:
    if value in (None, "exact"):
        return None
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"config key 'shots': expected an integer or \"exact\", got {value!r}")
    return value


def _parse_optimizer(value) -> tuple:
    if value is None:
        return "simplex", {}
    if isinstance(value, str):
        return value, {}
    if isinstance(value, dict):
        if "name" not in value:
            raise ConfigError("config key 'optimizer': missing 'name'")
        opts = {k: v for k, v in value.items() if k != "name"}
        return value["name"], opts
    raise ConfigError(f"config key 'optimizer': expected a name or object, got {value!r}")


def _parse_penalty(value, h: SiteHamiltonian) -> PenaltyConfig | None:
    if value in (None, "default"):
        return None
    if isinstance(value, dict) and "c_p" in value:
        return PenaltyConfig(float(value["c_p"]), register_width(h.n_sites))
    raise ConfigError(f"config key 'penalty': expected \"default\" or {{\"c_p\": value}}, got {value!r}")


def load_solve_config(path: Path, overrides) -> vqe.VqeConfig:
    """Read a solve configuration file, applying CLI overrides."""
    with open(path) as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ConfigError("config file must hold a JSON object")
    ham_ref = _config_get(doc, "hamiltonian", required=True)
    ham_path = Path(ham_ref)
    if not ham_path.is_absolute():
        ham_path = path.parent / ham_path
    h = load_hamiltonian(ham_path)
    optimizer, opt_options = _parse_optimizer(_config_get(doc, "optimizer"))
    kwargs = {
        "hamiltonian": h,
        "ansatz": _config_get(doc, "ansatz", "one_hot_ses"),
        "protocol": _config_get(doc, "protocol", "exact_operator"),
        "shots": _parse_shots(_config_get(doc, "shots")),
        "optimizer": optimizer,
        "optimizer_options": opt_options,
        "max_evaluations": _config_get(doc, "max_evaluations", 5000),
        "seed": _config_get(doc, "seed", 0),
        "penalty": _parse_penalty(_config_get(doc, "penalty"), h),
        "layers": _config_get(doc, "layers", 2),
        "epsilon": _config_get(doc, "epsilon"),
    }
    for key, value in overrides.items():
        if value is not None:
            kwargs[key] = value
    try:
        return vqe.VqeConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _write_trace_csv(path: Path, trace) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["evaluation", "energy", "best_so_far"])
        for idx, energy, best in trace:
            writer.writerow([idx, repr(float(energy)), repr(float(best))])


def cmd_solve(args, argv) -> int:
    overrides = {
        "seed": args.seed,
        "max_evaluations": args.max_evaluations,
        "jobs": args.jobs,
    }
    config = load_solve_config(Path(args.config), overrides)
    if args.shots is not None:
        if args.shots == "exact":
            shots_val = None
        elif args.shots.isdigit():
            shots_val = int(args.shots)
        else:
            raise UsageError(f"--shots expects an integer or 'exact', got {args.shots!r}")
        try:
            config = dataclasses.replace(config, shots=shots_val)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    result = vqe.optimize(config)
    out = _resolve_out(args.out, "solve_report.json")
    report = {
        "format": SOLVE_REPORT_TAG,
        "config_path": str(args.config),
        "ansatz": config.ansatz,
        "protocol": config.protocol,
        "shots": config.shots,
        "optimizer": config.optimizer,
        "max_evaluations": config.max_evaluations,
        "seed": config.seed,
        "n_sites": config.hamiltonian.n_sites,
        "status": result.status,
        "best_energy": result.best_energy,
        "exact_ground": result.exact_ground,
        "relative_error": result.relative_error,
        "evaluations_used": result.evaluations_used,
        "restarts_used": result.restarts_used,
        "wall_time_s": result.wall_time_s,
        "best_params": [float(p) for p in result.best_params],
        "diagnostics": result.diagnostics,
    }
    _write_json(out, report)
    outputs = [out]
    if args.trace_csv:
        trace_path = Path(args.trace_csv)
        _write_trace_csv(trace_path, result.trace)
        outputs.append(trace_path)
    manifest = _write_manifest(out, argv, outputs)
    print(
        f"{result.status}: best {result.best_energy:.12g}"
        f" exact {result.exact_ground:.12g}"
        f" rel_err {result.relative_error:.3e}"
        f" evals {result.evaluations_used}"
    )
    print(f"report {out}")
    print(f"manifest {manifest}")
    return 0 if result.status == "converged" else 2


def _load_site_vector(args) -> tuple:
    """Site amplitudes plus a label describing where they came from."""
    if args.params:
        with open(args.params) as fh:
            doc = json.load(fh)
        ansatz = _config_get(doc, "ansatz", "one_hot_ses")
        pairs = np.asarray(_config_get(doc, "pairs", required=True), dtype=float)
        n_sites = _config_get(doc, "n_sites", required=True)
        if ansatz == "one_hot_ses":
            alpha = circuits.ses_site_amplitudes(n_sites, pairs)
        elif ansatz == "binary_ses":
            emap = build_map(n_sites, "shifted")
            state = circuits.simulate(circuits.build_binary_ses_circuit(n_sites, pairs, emap))
            alpha, leak = circuits.binary_data_amplitudes(state, emap)
            if leak > 1e-6:
                raise ConfigError(f"packed ansatz leaked probability {leak:.3e}")
            alpha = alpha / np.linalg.norm(alpha)
        else:
            raise ConfigError(f"params key 'ansatz': unknown value {ansatz!r}")
        return alpha, f"params:{ansatz}"
    with open(args.amplitudes) as fh:
        doc = json.load(fh)
    raw = _config_get(doc, "amplitudes", required=True)
    alpha = np.array([complex(re, im) for re, im in raw])
    norm = float(np.linalg.norm(alpha))
    if abs(norm - 1.0) > 1e-6:
        raise ConfigError(f"amplitudes are not normalized (norm {norm!r})")
    return alpha, "amplitudes"


def cmd_reconstruct(args, argv) -> int:
    h = load_hamiltonian(args.hamiltonian)
    alpha, source_label = _load_site_vector(args)
    if alpha.size != h.n_sites:
        raise ConfigError(
            f"state covers {alpha.size} sites, Hamiltonian has {h.n_sites}"
        )
    emap = build_map(h.n_sites, "shifted") if args.protocol == "binary" else None
    if args.shots is not None and args.protocol == "original":
        state = sv_state_from_sites(alpha)
    else:
        state = alpha
    energy, diagnostics = measurement.estimate_energy(
        h,
        state,
        args.protocol,
        shots=args.shots,
        seed=args.seed,
        emap=emap,
        epsilon=args.epsilon,
        jobs=args.jobs,
    )
    exact_energy = float((alpha.conj() @ h.matrix @ alpha).real)
    report = {
        "format": RECONSTRUCTION_TAG,
        "protocol": args.protocol,
        "source": source_label,
        "shots": args.shots,
        "seed": args.seed,
        "energy": energy,
        "exact_energy_of_input": exact_energy,
        "energy_error": energy - exact_energy,
        "diagnostics": diagnostics,
    }
    out = _resolve_out(args.out, "reconstruction.json")
    _write_json(out, report)
    manifest = _write_manifest(out, argv, [out])
    for warning in diagnostics["warnings"]:
        print(f"warning: {warning}", file=sys.stderr)
    print(
        f"energy {energy:.12g} exact {exact_energy:.12g} delta {energy - exact_energy:+.3e}"
    )
    print(f"report {out}")
    print(f"manifest {manifest}")
    return 0


def sv_state_from_sites(alpha: np.ndarray):
    """One-hot register state carrying site amplitudes ``alpha``."""
    from . import statevector as sv

    n = alpha.size
    register = np.zeros(2**n, dtype=complex)
    for j in range(n):
        register[1 << j] = alpha[j]
    return sv.StateVector(n, register)


def cmd_resources(args, argv) -> int:
    table = resources.report_table(args.n_sites)
    header = f"{'strategy':<28}{'width':>8}{'depth':>10}{'settings':>10}{'volume':>14}"
    print(header)
    for row in table["rows"]:
        print(
            f"{row['strategy']:<28}{row['width']:>8}{row['depth']:>10}"
            f"{row['settings']:>10}{row['volume']:>14}"
        )
    print()
    for name, ratio in table["volume_ratios_vs_original"].items():
        print(f"volume ratio vs original ({name}): {ratio:.6g}")
    for name, ratio in table["constants_free_ratios"].items():
        bucket = resources.order_of_magnitude(ratio)
        print(f"constants-free ratio ({name}): {ratio:.5g} (10^{bucket} bucket)")
    if args.out:
        out = Path(args.out)
        _write_json(out, {"format": RESOURCES_TAG, **table})
        manifest = _write_manifest(out, argv, [out])
        print(f"report {out}")
        print(f"manifest {manifest}")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="sesvqe", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a Hamiltonian instance file")
    gen.add_argument("--family", required=True, choices=sorted(("chain", "random_hermitian", "complex_ring")))
    gen.add_argument("--n-sites", type=int, required=True)
    gen.add_argument("--hopping", type=float, default=1.0)
    gen.add_argument("--disorder", type=float, default=0.0)
    gen.add_argument("--scale", type=float, default=1.0)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", default=None)
    gen.set_defaults(func=cmd_gen)

    solve = sub.add_parser("solve", help="run the variational solver from a config file")
    solve.add_argument("--config", required=True)
    solve.add_argument("--out", default=None)
    solve.add_argument("--trace-csv", default=None)
    solve.add_argument("--seed", type=int, default=None)
    solve.add_argument("--shots", default=None)
    solve.add_argument("--max-evaluations", type=int, default=None)
    solve.add_argument("--jobs", type=int, default=None)
    solve.set_defaults(func=cmd_solve)

    rec = sub.add_parser("reconstruct", help="estimate a state profile and its energy")
    rec.add_argument("--hamiltonian", required=True)
    rec.add_argument("--protocol", required=True, choices=("original", "binary"))
    source = rec.add_mutually_exclusive_group(required=True)
    source.add_argument("--params", default=None)
    source.add_argument("--amplitudes", default=None)
    rec.add_argument("--shots", type=int, default=None)
    rec.add_argument("--seed", type=int, default=0)
    rec.add_argument("--epsilon", type=float, default=None)
    rec.add_argument("--jobs", type=int, default=1)
    rec.add_argument("--out", default=None)
    rec.set_defaults(func=cmd_reconstruct)

    res = sub.add_parser("resources", help="print the volumetric comparison table")
    res.add_argument("--n-sites", type=int, required=True)
    res.add_argument("--out", default=None)
    res.set_defaults(func=cmd_resources)
    return parser


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args, list(argv))
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
