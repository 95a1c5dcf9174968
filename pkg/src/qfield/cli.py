"""Command-line front end: simulate, verify, modes, describe-state.

All runs are driven by a single JSON config (see config.py); flags only
override output paths and verbosity. Exit codes: 0 success, 1 failed checks,
2 usage or config errors.
"""

from __future__ import annotations

import os

# Cap internal (BLAS) parallelism before numpy is imported anywhere below.
_threads = os.environ.get("QFIELD_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
        os.environ.setdefault(_var, _threads)

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import maxwell3d, observables
from .config import ConfigError, RunConfig, build_state, build_universe, parse_config
from .fock import mode_occupation, total_photons
from .hamiltonian import energy_expectation
from .medium import dispersion_k
from .verify import run_suite


def _fmt(value: float) -> str:
    return "%.17g" % value


def _load_config(path: str) -> RunConfig:
    text = Path(path).read_text(encoding="utf-8")
    return parse_config(text)


def _write_or_print(text: str, out: str | None, quiet: bool) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
        if not quiet:
            print(f"wrote {out}")
    else:
        print(text, end="" if text.endswith("\n") else "\n")


def _cmd_simulate(config: RunConfig, out: str | None, quiet: bool) -> int:
    if config.sampling is None:
        raise ConfigError(["sampling: required by the simulate command"])
    universe = build_universe(config)
    state = build_state(config, universe)
    import io

    buffer = io.StringIO()
    if config.grid_kind == "1d":
        samples = observables.field_profile(
            state,
            config.sampling.x.values(),
            config.sampling.t.values(),
            config.medium,
            with_squares=config.sampling.with_squares,
        )
        observables.write_field_csv(samples, buffer)
    else:
        axes = [a.values() for a in config.sampling.r]
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 3)
        samples = maxwell3d.field_profile_3d(
            state,
            mesh,
            config.sampling.t.values(),
            config.medium,
            with_squares=config.sampling.with_squares,
        )
        maxwell3d.write_field_csv_3d(samples, buffer)
    _write_or_print(buffer.getvalue(), out or config.output_csv, quiet)
    return 0


def _cmd_verify(config: RunConfig, out: str | None, quiet: bool) -> int:
    report = run_suite(config)
    text = json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    target = out or config.output_report
    if target:
        Path(target).write_text(text, encoding="utf-8")
    if not quiet:
        for row in report["checks"]:
            status = "PASS" if row["pass"] else "FAIL"
            expected = row["params"].get("expect", "pass")
            suffix = "" if expected == "pass" else "  (negative control)"
            print(f"{status}  {row['check']}  residual={row['max_abs_residual']:.3e}{suffix}")
        print("all checks satisfied" if report["all_pass"] else "CHECKS NOT SATISFIED")
        if target:
            print(f"wrote {target}")
    elif not target:
        print(text, end="")
    return 0 if report["all_pass"] else 1


def _cmd_modes(config: RunConfig, out: str | None, quiet: bool) -> int:
    universe = build_universe(config)
    lines = ["index,X,lambda,omega,k,f_abs"]
    if config.grid_kind == "1d":
        for i, mode in enumerate(universe.modes):
            omega = config.grid.omega(mode.freq_index)
            k = dispersion_k(config.medium, omega)
            pair = observables.mode_functions(mode, 0.0, config.medium, config.grid)
            lines.append(
                f"{i},{mode.direction.value},{mode.polarization},{_fmt(omega)},{_fmt(k)},{_fmt(abs(pair.f))}"
            )
    else:
        omegas = universe.omegas(config.medium)
        amp, kvecs, _, _ = maxwell3d.mode_geometry_3d(universe, config.medium)
        for i, mode in enumerate(universe.modes):
            k = float(np.linalg.norm(kvecs[i]))
            lines.append(
                f"{i},{universe.label(i)},{mode.polarization},{_fmt(omegas[i])},{_fmt(k)},{_fmt(abs(amp[i]))}"
            )
    _write_or_print("\n".join(lines) + "\n", out, quiet)
    return 0


def _cmd_describe_state(config: RunConfig, out: str | None, quiet: bool) -> int:
    universe = build_universe(config)
    state = build_state(config, universe)
    energy = energy_expectation(state, config.medium)
    lines = [
        f"modes: {universe.size}",
        f"n_max: {state.n_max}",
        f"basis tuples: {len(state.amplitudes)}",
        f"norm: {_fmt(state.norm)}",
        f"truncated weight: {_fmt(state.truncated_weight)}",
        f"total photons: {_fmt(total_photons(state))}",
        f"excitation energy: {_fmt(energy.excitation_energy)}",
        f"zero-point energy: {_fmt(energy.zero_point_energy)}",
        "occupied modes:",
    ]
    for i in sorted(state.mode_indices()):
        lines.append(f"  {universe.label(i)}: <n> = {_fmt(mode_occupation(state, i))}")
    _write_or_print("\n".join(lines) + "\n", out, quiet)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qfield",
        description="Quantized-field simulation and verification on a discretized mode grid.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("simulate", "sample field expectation values to CSV"),
        ("verify", "run consistency checks and emit a JSON report"),
        ("modes", "list the enumerated modes with omega, k and |f|"),
        ("describe-state", "print occupancy statistics of the configured state"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="path to the JSON run config")
        cmd.add_argument("--out", default=None, help="override the output path")
        cmd.add_argument("--quiet", action="store_true", help="suppress progress lines")
    return parser


_COMMANDS = {
    "simulate": _cmd_simulate,
    "verify": _cmd_verify,
    "modes": _cmd_modes,
    "describe-state": _cmd_describe_state,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config(args.config)
        return _COMMANDS[args.command](config, args.out, args.quiet)
    except ConfigError as err:
        print(str(err), file=sys.stderr)
        return 2
    except FileNotFoundError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
