"""Run configuration: a single self-describing JSON document.

Everything a run needs (medium, grid, state, sampling windows, checks,
outputs, seed) lives in one strictly-validated JSON object so that
verification runs are reproducible from the config alone. Unknown keys are
rejected and every error names the offending path.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import observables
from .fock import MultiModeState, add, fock_state, normalized, vacuum
from .maxwell3d import KGrid, KModeId, LatticeUniverse
from .medium import Medium, natural_units, vacuum_si
from .modes import Direction, FrequencyGrid, GridUniverse, ModeId


class ConfigError(ValueError):
    """Config rejected; ``errors`` lists precise locations and reasons."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("invalid config:\n" + "\n".join(f"  - {e}" for e in self.errors))


# Allowed parameter keys per check, beyond the common ones
# (expect, state, tolerance). Grid kind restricts where a check may run.
CHECK_SCHEMAS: dict[str, dict[str, Any]] = {
    "commutators": {"kind": "any", "params": {"n_probes", "n_max", "modes", "seed_offset"}},
    "spectrum": {"kind": "1d", "params": {"max_photons"}},
    "mode_ode": {"kind": "1d", "params": {"n_samples", "flip_branch_sign", "seed_offset"}},
    "maxwell_1d": {
        "kind": "1d",
        "params": {"spacing_scales", "window_points", "min_order", "time_step_ratio"},
    },
    "heisenberg": {"kind": "1d", "params": {"taus", "x", "t", "min_order"}},
    "energy_equivalence": {
        "kind": "1d",
        "params": {"points_per_wavelength", "zpe_tolerance", "corrupt_k_scale", "ideal_excitation"},
    },
    "direction": {"kind": "1d", "params": {"deltas", "n_x", "t"}},
    "polarization_3d": {"kind": "3d", "params": {"n_random", "seed_offset"}},
    "divergence_3d": {"kind": "3d", "params": {"h_values", "center", "min_order"}},
    "curl_3d": {"kind": "3d", "params": {"h", "tau", "scales", "center", "min_order"}},
    "energy_3d": {"kind": "3d", "params": {"points_per_axis", "zpe_tolerance", "corrupt_k_scale"}},
}


@dataclass(frozen=True)
class CheckSpec:
    name: str
    expect: str = "pass"  # "pass" | "fail" (negative control)
    state: dict | None = None  # optional per-check state override
    params: dict = field(default_factory=dict)

    def __eq__(self, other):  # dict fields need value comparison
        return (
            isinstance(other, CheckSpec)
            and (self.name, self.expect, self.state, self.params)
            == (other.name, other.expect, other.state, other.params)
        )


@dataclass(frozen=True)
class AxisSpec:
    start: float
    stop: float
    count: int

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class Sampling:
    t: AxisSpec
    x: AxisSpec | None = None  # 1d
    r: tuple[AxisSpec, AxisSpec, AxisSpec] | None = None  # 3d
    with_squares: bool = False


@dataclass(frozen=True)
class RunConfig:
    seed: int
    medium: Medium
    grid_kind: str  # "1d" | "3d"
    grid: FrequencyGrid | KGrid
    n_max: int
    state: dict
    sampling: Sampling | None
    checks: tuple[CheckSpec, ...]
    output_csv: str | None
    output_report: str | None


class _Validator:
    def __init__(self):
        self.errors: list[str] = []

    def fail(self, path: str, message: str) -> None:
        self.errors.append(f"{path}: {message}")

    def require_keys(self, obj: dict, path: str, required: set[str], optional: set[str]) -> bool:
        ok = True
        for key in obj:
            if key not in required and key not in optional:
                self.fail(f"{path}.{key}" if path else key, "unknown key")
                ok = False
        for key in required:
            if key not in obj:
                self.fail(path or "<root>", f"missing required key {key!r}")
                ok = False
        return ok

    def number(self, obj: dict, path: str, key: str, default=None, positive=False):
        if key not in obj:
            return default
        value = obj[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.fail(f"{path}.{key}", f"expected a number, got {type(value).__name__}")
            return default
        if positive and not value > 0:
            self.fail(f"{path}.{key}", f"must be > 0, got {value}")
            return default
        return float(value)

    def integer(self, obj: dict, path: str, key: str, default=None, minimum=None):
        if key not in obj:
            return default
        value = obj[key]
        if isinstance(value, bool) or not isinstance(value, int):
            self.fail(f"{path}.{key}", f"expected an integer, got {type(value).__name__}")
            return default
        if minimum is not None and value < minimum:
            self.fail(f"{path}.{key}", f"must be >= {minimum}, got {value}")
            return default
        return value

    def complex_pair(self, value, path: str) -> complex:
        if (
            not isinstance(value, list)
            or len(value) != 2
            or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in value)
        ):
            self.fail(path, "expected [re, im]")
            return 0j
        return complex(value[0], value[1])


def _parse_medium(v: _Validator, obj: Any) -> Medium:
    path = "medium"
    if not isinstance(obj, dict):
        v.fail(path, "expected an object")
        return natural_units()
    if "preset" in obj:
        v.require_keys(obj, path, {"preset"}, {"area"})
        preset = obj["preset"]
        area = v.number(obj, path, "area", default=1.0, positive=True)
        if preset == "natural":
            return natural_units()
        if preset == "vacuum_si":
            return vacuum_si(area=area if area is not None else 1.0)
        v.fail(f"{path}.preset", f"unknown preset {preset!r} (natural | vacuum_si)")
        return natural_units()
    v.require_keys(obj, path, {"epsilon", "mu", "hbar", "area"}, set())
    values = {k: v.number(obj, path, k, default=1.0, positive=True) for k in ("epsilon", "mu", "hbar", "area")}
    if v.errors:
        return natural_units()
    return Medium(**values)


def _parse_grid(v: _Validator, obj: Any) -> tuple[str, FrequencyGrid | KGrid]:
    path = "grid"
    fallback = ("1d", FrequencyGrid(1.0, 1.0, 1))
    if not isinstance(obj, dict):
        v.fail(path, "expected an object")
        return fallback
    kind = obj.get("kind")
    if kind == "1d":
        v.require_keys(obj, path, {"kind", "omega_min", "delta_omega", "count"}, set())
        omega_min = v.number(obj, path, "omega_min", positive=True)
        delta_omega = v.number(obj, path, "delta_omega", positive=True)
        count = v.integer(obj, path, "count", minimum=1)
        if None in (omega_min, delta_omega, count):
            return fallback
        return "1d", FrequencyGrid(omega_min, delta_omega, count)
    if kind == "3d":
        v.require_keys(obj, path, {"kind", "k_spacing", "half_extent"}, set())
        k_spacing = v.number(obj, path, "k_spacing", positive=True)
        half_extent = v.integer(obj, path, "half_extent", minimum=1)
        if None in (k_spacing, half_extent):
            return fallback
        return "3d", KGrid(k_spacing, half_extent)
    v.fail(f"{path}.kind", f"expected '1d' or '3d', got {kind!r}")
    return fallback


def _validate_mode_ref(v: _Validator, obj: Any, path: str, grid_kind: str, grid) -> Any:
    if not isinstance(obj, dict):
        v.fail(path, "expected a mode object")
        return None
    if grid_kind == "1d":
        v.require_keys(obj, path, {"direction", "polarization", "freq_index"}, set())
        direction = obj.get("direction")
        if direction not in ("L", "R"):
            v.fail(f"{path}.direction", f"expected 'L' or 'R', got {direction!r}")
            return None
        pol = v.integer(obj, path, "polarization", minimum=1)
        index = v.integer(obj, path, "freq_index", minimum=0)
        if pol not in (1, 2):
            v.fail(f"{path}.polarization", f"must be 1 or 2, got {pol!r}")
            return None
        if index is None or index >= grid.count:
            v.fail(f"{path}.freq_index", f"must be in [0, {grid.count}), got {index!r}")
            return None
        return ModeId(Direction(direction), pol, index)
    v.require_keys(obj, path, {"k_index", "polarization"}, set())
    k_index = obj.get("k_index")
    if (
        not isinstance(k_index, list)
        or len(k_index) != 3
        or any(isinstance(c, bool) or not isinstance(c, int) for c in k_index)
    ):
        v.fail(f"{path}.k_index", "expected three integers")
        return None
    n = grid.half_extent
    if any(abs(c) > n for c in k_index):
        v.fail(f"{path}.k_index", f"components must lie in [-{n}, {n}]")
        return None
    if tuple(k_index) == (0, 0, 0):
        v.fail(f"{path}.k_index", "the zero wave vector is excluded from the lattice")
        return None
    pol = v.integer(obj, path, "polarization", minimum=1)
    if pol not in (1, 2):
        v.fail(f"{path}.polarization", f"must be 1 or 2, got {pol!r}")
        return None
    return KModeId(k_index[0], k_index[1], k_index[2], pol)


def _validate_state(v: _Validator, obj: Any, path: str, grid_kind: str, grid, n_max: int) -> dict:
    if not isinstance(obj, dict):
        v.fail(path, "expected an object")
        return {"kind": "vacuum"}
    kind = obj.get("kind")
    if kind == "vacuum":
        v.require_keys(obj, path, {"kind"}, set())
        return {"kind": "vacuum"}
    if kind == "fock":
        v.require_keys(obj, path, {"kind", "occupations"}, set())
        occupations = obj.get("occupations")
        if not isinstance(occupations, list):
            v.fail(f"{path}.occupations", "expected a list")
            return {"kind": "vacuum"}
        for i, row in enumerate(occupations):
            row_path = f"{path}.occupations[{i}]"
            if not isinstance(row, dict):
                v.fail(row_path, "expected an object")
                continue
            v.require_keys(row, row_path, {"mode", "n"}, set())
            _validate_mode_ref(v, row.get("mode"), f"{row_path}.mode", grid_kind, grid)
            n = v.integer(row, row_path, "n", minimum=0)
            if n is not None and n > n_max:
                v.fail(f"{row_path}.n", f"occupation {n} exceeds n_max={n_max}")
        return obj
    if kind == "coherent":
        v.require_keys(obj, path, {"kind", "modes"}, {"loss_budget"})
        v.number(obj, path, "loss_budget", default=1e-8, positive=True)
        entries = obj.get("modes")
        if not isinstance(entries, list):
            v.fail(f"{path}.modes", "expected a list")
            return {"kind": "vacuum"}
        for i, row in enumerate(entries):
            row_path = f"{path}.modes[{i}]"
            if not isinstance(row, dict):
                v.fail(row_path, "expected an object")
                continue
            v.require_keys(row, row_path, {"mode", "alpha"}, set())
            _validate_mode_ref(v, row.get("mode"), f"{row_path}.mode", grid_kind, grid)
            v.complex_pair(row.get("alpha"), f"{row_path}.alpha")
        return obj
    if kind == "superposition":
        v.require_keys(obj, path, {"kind", "terms"}, set())
        terms = obj.get("terms")
        if not isinstance(terms, list) or not terms:
            v.fail(f"{path}.terms", "expected a nonempty list")
            return {"kind": "vacuum"}
        for i, term in enumerate(terms):
            term_path = f"{path}.terms[{i}]"
            if not isinstance(term, dict):
                v.fail(term_path, "expected an object")
                continue
            v.require_keys(term, term_path, {"weight", "occupations"}, set())
            v.complex_pair(term.get("weight"), f"{term_path}.weight")
            occupations = term.get("occupations")
            if not isinstance(occupations, list):
                v.fail(f"{term_path}.occupations", "expected a list")
                continue
            for j, row in enumerate(occupations):
                row_path = f"{term_path}.occupations[{j}]"
                if not isinstance(row, dict):
                    v.fail(row_path, "expected an object")
                    continue
                v.require_keys(row, row_path, {"mode", "n"}, set())
                _validate_mode_ref(v, row.get("mode"), f"{row_path}.mode", grid_kind, grid)
                n = v.integer(row, row_path, "n", minimum=0)
                if n is not None and n > n_max:
                    v.fail(f"{row_path}.n", f"occupation {n} exceeds n_max={n_max}")
        return obj
    v.fail(f"{path}.kind", f"unknown state kind {kind!r}")
    return {"kind": "vacuum"}


def _parse_axis(v: _Validator, obj: Any, path: str) -> AxisSpec:
    fallback = AxisSpec(0.0, 1.0, 2)
    if not isinstance(obj, dict):
        v.fail(path, "expected an object {start, stop, count}")
        return fallback
    v.require_keys(obj, path, {"start", "stop", "count"}, set())
    start = v.number(obj, path, "start")
    stop = v.number(obj, path, "stop")
    count = v.integer(obj, path, "count", minimum=1)
    if None in (start, stop, count):
        return fallback
    if count > 1 and not stop > start:
        v.fail(path, "stop must exceed start for multi-point axes")
        return fallback
    return AxisSpec(start, stop, count)


def _parse_sampling(v: _Validator, obj: Any, grid_kind: str) -> Sampling | None:
    if obj is None:
        return None
    path = "sampling"
    if not isinstance(obj, dict):
        v.fail(path, "expected an object")
        return None
    v.require_keys(obj, path, {"t"}, {"x", "r", "with_squares"})
    with_squares = obj.get("with_squares", False)
    if not isinstance(with_squares, bool):
        v.fail(f"{path}.with_squares", "expected a boolean")
        with_squares = False
    t_axis = _parse_axis(v, obj.get("t"), f"{path}.t")
    if grid_kind == "1d":
        if "x" not in obj:
            v.fail(path, "1d sampling requires an 'x' axis")
            return None
        if "r" in obj:
            v.fail(f"{path}.r", "not valid for a 1d grid")
        return Sampling(t=t_axis, x=_parse_axis(v, obj.get("x"), f"{path}.x"), with_squares=with_squares)
    if "r" not in obj:
        v.fail(path, "3d sampling requires an 'r' axis triple")
        return None
    if "x" in obj:
        v.fail(f"{path}.x", "not valid for a 3d grid")
    r_obj = obj.get("r")
    if not isinstance(r_obj, dict):
        v.fail(f"{path}.r", "expected an object {x, y, z}")
        return None
    v.require_keys(r_obj, f"{path}.r", {"x", "y", "z"}, set())
    axes = tuple(_parse_axis(v, r_obj.get(axis), f"{path}.r.{axis}") for axis in ("x", "y", "z"))
    return Sampling(t=t_axis, r=axes, with_squares=with_squares)


def _parse_checks(v: _Validator, obj: Any, grid_kind: str, grid, n_max: int) -> tuple[CheckSpec, ...]:
    if obj is None:
        return ()
    if not isinstance(obj, list):
        v.fail("checks", "expected a list")
        return ()
    specs = []
    for i, entry in enumerate(obj):
        path = f"checks[{i}]"
        if not isinstance(entry, dict):
            v.fail(path, "expected an object")
            continue
        name = entry.get("name")
        if name not in CHECK_SCHEMAS:
            v.fail(f"{path}.name", f"unknown check name {name!r}")
            continue
        schema = CHECK_SCHEMAS[name]
        if schema["kind"] != "any" and schema["kind"] != grid_kind:
            v.fail(path, f"check {name!r} requires a {schema['kind']} grid")
            continue
        allowed = {"name", "expect", "state", "tolerance"} | schema["params"]
        v.require_keys(entry, path, {"name"}, allowed - {"name"})
        expect = entry.get("expect", "pass")
        if expect not in ("pass", "fail"):
            v.fail(f"{path}.expect", f"expected 'pass' or 'fail', got {expect!r}")
            expect = "pass"
        state = entry.get("state")
        if state is not None:
            state = _validate_state(v, state, f"{path}.state", grid_kind, grid, n_max)
        tolerance = v.number(entry, path, "tolerance", default=None, positive=True)
        params = {
            k: entry[k]
            for k in entry
            if k not in ("name", "expect", "state")
        }
        if tolerance is not None:
            params["tolerance"] = tolerance
        specs.append(CheckSpec(name=name, expect=expect, state=state, params=params))
    return tuple(specs)


def parse_config(text: str) -> RunConfig:
    """Parse and strictly validate a JSON config document."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError([f"<json>: {err}"]) from None
    if not isinstance(obj, dict):
        raise ConfigError(["<root>: expected a JSON object"])

    v = _Validator()
    v.require_keys(
        obj, "", {"medium", "grid", "n_max", "state"}, {"seed", "sampling", "checks", "output"}
    )
    seed = v.integer(obj, "", "seed", default=0, minimum=0)
    medium = _parse_medium(v, obj.get("medium", {}))
    grid_kind, grid = _parse_grid(v, obj.get("grid", {}))
    n_max = v.integer(obj, "", "n_max", default=1, minimum=1)
    state = _validate_state(v, obj.get("state", {}), "state", grid_kind, grid, n_max)
    sampling = _parse_sampling(v, obj.get("sampling"), grid_kind)
    checks = _parse_checks(v, obj.get("checks"), grid_kind, grid, n_max)

    output_csv = output_report = None
    output = obj.get("output")
    if output is not None:
        if not isinstance(output, dict):
            v.fail("output", "expected an object")
        else:
            v.require_keys(output, "output", set(), {"csv", "report"})
            for key in ("csv", "report"):
                if key in output and not isinstance(output[key], str):
                    v.fail(f"output.{key}", "expected a string path")
            output_csv = output.get("csv")
            output_report = output.get("report")

    if v.errors:
        raise ConfigError(v.errors)
    return RunConfig(
        seed=seed,
        medium=medium,
        grid_kind=grid_kind,
        grid=grid,
        n_max=n_max,
        state=state,
        sampling=sampling,
        checks=checks,
        output_csv=output_csv,
        output_report=output_report,
    )


def emit_config(config: RunConfig) -> dict:
    """Plain dict form of a config; parses back to an equal RunConfig."""
    out: dict[str, Any] = {
        "seed": config.seed,
        "medium": {
            "epsilon": config.medium.epsilon,
            "mu": config.medium.mu,
            "hbar": config.medium.hbar,
            "area": config.medium.area,
        },
        "n_max": config.n_max,
        "state": config.state,
    }
    if config.grid_kind == "1d":
        out["grid"] = {
            "kind": "1d",
            "omega_min": config.grid.omega_min,
            "delta_omega": config.grid.delta_omega,
            "count": config.grid.count,
        }
    else:
        out["grid"] = {
            "kind": "3d",
            "k_spacing": config.grid.k_spacing,
            "half_extent": config.grid.half_extent,
        }
    if config.sampling is not None:
        s: dict[str, Any] = {
            "t": {"start": config.sampling.t.start, "stop": config.sampling.t.stop, "count": config.sampling.t.count}
        }
        if config.sampling.x is not None:
            s["x"] = {"start": config.sampling.x.start, "stop": config.sampling.x.stop, "count": config.sampling.x.count}
        if config.sampling.r is not None:
            s["r"] = {
                axis: {"start": a.start, "stop": a.stop, "count": a.count}
                for axis, a in zip(("x", "y", "z"), config.sampling.r)
            }
        if config.sampling.with_squares:
            s["with_squares"] = True
        out["sampling"] = s
    if config.checks:
        rows = []
        for check in config.checks:
            row: dict[str, Any] = {"name": check.name, **check.params}
            if check.expect != "pass":
                row["expect"] = check.expect
            if check.state is not None:
                row["state"] = check.state
            rows.append(row)
        out["checks"] = rows
    if config.output_csv or config.output_report:
        output: dict[str, str] = {}
        if config.output_csv:
            output["csv"] = config.output_csv
        if config.output_report:
            output["report"] = config.output_report
        out["output"] = output
    return out


def build_universe(config: RunConfig):
    if config.grid_kind == "1d":
        return GridUniverse(config.grid)
    return LatticeUniverse(config.grid)


def _mode_from_ref(universe, ref: dict):
    if "direction" in ref:
        return ModeId(Direction(ref["direction"]), ref["polarization"], ref["freq_index"])
    i, j, l = ref["k_index"]
    return KModeId(i, j, l, ref["polarization"])


def build_state(config: RunConfig, universe, state_spec: dict | None = None) -> MultiModeState:
    """Construct the configured (normalized) state over the universe."""
    spec = config.state if state_spec is None else state_spec
    kind = spec["kind"]
    if kind == "vacuum":
        return vacuum(universe, config.n_max)
    if kind == "fock":
        occupations = {
            _mode_from_ref(universe, row["mode"]): row["n"] for row in spec["occupations"]
        }
        return fock_state(universe, config.n_max, occupations)
    if kind == "coherent":
        entries = [
            (_mode_from_ref(universe, row["mode"]), complex(row["alpha"][0], row["alpha"][1]))
            for row in spec["modes"]
        ]
        return observables.coherent_state(
            universe, config.n_max, entries, loss_budget=spec.get("loss_budget", 1e-8)
        )
    if kind == "superposition":
        total: MultiModeState | None = None
        for term in spec["terms"]:
            weight = complex(term["weight"][0], term["weight"][1])
            occupations = {
                _mode_from_ref(universe, row["mode"]): row["n"] for row in term["occupations"]
            }
            basis_state = fock_state(universe, config.n_max, occupations)
            total = (
                add(vacuum(universe, config.n_max), basis_state, 0.0, weight)
                if total is None
                else add(total, basis_state, 1.0, weight)
            )
        if math.isclose(total.norm, 0.0):
            raise ValueError("superposition weights sum to the zero vector")
        return normalized(total)
    raise ValueError(f"unknown state kind {kind!r}")
