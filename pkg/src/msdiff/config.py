"""Configuration documents: strict JSON parsing, defaults, round-tripping.

One JSON document describes a scenario: the mixture, the grid, the mode,
the initial condition (preset or explicit per-cell tables) and the time and
output controls.  Parsing is strict -- unknown keys are rejected and every
diagnostic names the offending path -- and a parsed configuration can be
re-emitted and re-parsed to an equivalent value.

Document layout (defaults in brackets):

    {
      "schema": 1,
      "mixture": {"masses": [...], "kernel_l1": [[...]], "kernel_b": [[...]],
                  "alpha": a},
      "grid": {"n_cells": int [64], "length": num [1.0],
               "bc": "periodic" | "zero-flux" ["periodic"]},
      "mode": "isothermal" | "non-isothermal" ["isothermal"],
      "temperature": num [1.0],
      "initial": {"preset": name, "params": {...}}
                 or {"tables": {"rho": S x N, "u": S x N x 3, "p": S x N x 6}}
                 [uniform-equilibrium],
      "time": {"final": num [1.0], "snapshot_interval": num [0.0],
               "cfl": num [0.4], "steady_tol": num [1e-6]},
      "output": {"directory": str ["."], "formats": ["csv"] [["csv"]]}
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ParseError, SchemaViolation, UnknownKey, ValidationError
from .grid import BOUNDARY_CONDITIONS
from .mixture import MixtureSpec, validate_spec
from .presets import PRESET_NAMES

SCHEMA_VERSION = 1
MAX_CFL = 0.57  # keep cfl * sqrt(3) below the Rusanov stability bound


@dataclass
class SimConfig:
    spec: MixtureSpec
    n_cells: int
    length: float
    bc: str
    mode: str
    temperature: float
    initial_preset: tuple[str, dict] | None
    initial_tables: dict | None
    t_final: float
    snapshot_interval: float
    cfl: float
    steady_tol: float
    output_dir: str
    formats: tuple[str, ...]

    def to_dict(self) -> dict:
        """Full document with defaults filled in; parses back equivalently."""
        if self.initial_tables is not None:
            tables = self.initial_tables
            initial = {
                "tables": {
                    "rho": tables["rho"].tolist(),
                    "u": np.moveaxis(tables["u"], 1, 2).tolist(),
                    "p": np.moveaxis(tables["p"], 1, 2).tolist(),
                }
            }
        else:
            name, params = self.initial_preset
            initial = {"preset": name, "params": params}
        return {
            "schema": SCHEMA_VERSION,
            "mixture": {
                "masses": self.spec.masses.tolist(),
                "kernel_l1": self.spec.kernel_l1.tolist(),
                "kernel_b": self.spec.kernel_b.tolist(),
                "alpha": self.spec.alpha,
            },
            "grid": {"n_cells": self.n_cells, "length": self.length, "bc": self.bc},
            "mode": self.mode,
            "temperature": self.temperature,
            "initial": initial,
            "time": {
                "final": self.t_final,
                "snapshot_interval": self.snapshot_interval,
                "cfl": self.cfl,
                "steady_tol": self.steady_tol,
            },
            "output": {"directory": self.output_dir, "formats": list(self.formats)},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _require_keys(doc: dict, allowed: dict[str, bool], path: str) -> None:
    """allowed maps key -> required; rejects anything else."""
    for key in doc:
        if key not in allowed:
            raise UnknownKey(f"{path}.{key}" if path else key, "unknown key")
    for key, required in allowed.items():
        if required and key not in doc:
            raise SchemaViolation(f"{path}.{key}" if path else key, "missing required key")


def _as_number(value, path: str, *, positive=False, nonnegative=False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaViolation(path, f"expected a number, got {value!r}")
    v = float(value)
    if positive and not v > 0.0:
        raise SchemaViolation(path, f"must be > 0, got {v}")
    if nonnegative and v < 0.0:
        raise SchemaViolation(path, f"must be >= 0, got {v}")
    return v


def _as_int(value, path: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaViolation(path, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise SchemaViolation(path, f"must be >= {minimum}, got {value}")
    return value


def _as_choice(value, path: str, choices: tuple[str, ...]) -> str:
    if value not in choices:
        raise SchemaViolation(path, f"expected one of {choices}, got {value!r}")
    return value


def _number_list(value, path: str, length: int | None = None, *,
                 positive=False) -> list[float]:
    if not isinstance(value, list):
        raise SchemaViolation(path, f"expected a list, got {value!r}")
    if length is not None and len(value) != length:
        raise SchemaViolation(path, f"expected {length} entries, got {len(value)}")
    return [
        _as_number(v, f"{path}[{k}]", positive=positive) for k, v in enumerate(value)
    ]


def _square_matrix(value, path: str, size: int) -> np.ndarray:
    if not isinstance(value, list) or len(value) != size:
        raise SchemaViolation(path, f"expected {size} rows")
    rows = [_number_list(row, f"{path}[{k}]", size) for k, row in enumerate(value)]
    return np.array(rows)


def _parse_mixture(doc: dict) -> MixtureSpec:
    _require_keys(doc, {"masses": True, "kernel_l1": True, "kernel_b": True,
                        "alpha": True}, "mixture")
    masses = _number_list(doc["masses"], "mixture.masses", positive=True)
    s = len(masses)
    if s < 1:
        raise SchemaViolation("mixture.masses", "need at least one species")
    l1 = _square_matrix(doc["kernel_l1"], "mixture.kernel_l1", s)
    b2 = _square_matrix(doc["kernel_b"], "mixture.kernel_b", s)
    alpha = _as_number(doc["alpha"], "mixture.alpha", positive=True)
    spec = MixtureSpec(np.array(masses), l1, b2, alpha)
    try:
        validate_spec(spec)
    except ValidationError as exc:
        raise SchemaViolation("mixture", str(exc)) from exc
    return spec


def _parse_initial(doc: dict, s: int, n_cells: int):
    _require_keys(doc, {"preset": False, "params": False, "tables": False}, "initial")
    if "tables" in doc:
        if "preset" in doc or "params" in doc:
            raise SchemaViolation("initial", "give either a preset or tables, not both")
        tab = doc["tables"]
        if not isinstance(tab, dict):
            raise SchemaViolation("initial.tables", "expected an object")
        _require_keys(tab, {"rho": True, "u": True, "p": True}, "initial.tables")
        rho = np.array([
            _number_list(row, f"initial.tables.rho[{i}]", n_cells)
            for i, row in enumerate(_as_len_list(tab["rho"], "initial.tables.rho", s))
        ])
        u = np.array([
            [_number_list(cell, f"initial.tables.u[{i}][{c}]", 3)
             for c, cell in enumerate(_as_len_list(row, f"initial.tables.u[{i}]", n_cells))]
            for i, row in enumerate(_as_len_list(tab["u"], "initial.tables.u", s))
        ])
        p = np.array([
            [_number_list(cell, f"initial.tables.p[{i}][{c}]", 6)
             for c, cell in enumerate(_as_len_list(row, f"initial.tables.p[{i}]", n_cells))]
            for i, row in enumerate(_as_len_list(tab["p"], "initial.tables.p", s))
        ])
        if np.any(rho < 0.0):
            raise SchemaViolation("initial.tables.rho", "densities must be >= 0")
        # store in grid layout: u (S, 3, N), p (S, 6, N)
        tables = {"rho": rho, "u": np.moveaxis(u, 2, 1), "p": np.moveaxis(p, 2, 1)}
        return None, tables
    name = doc.get("preset", "uniform-equilibrium")
    name = _as_choice(name, "initial.preset", PRESET_NAMES)
    params = doc.get("params", {})
    if not isinstance(params, dict):
        raise SchemaViolation("initial.params", "expected an object")
    return (name, params), None


def _as_len_list(value, path: str, length: int) -> list:
    if not isinstance(value, list) or len(value) != length:
        raise SchemaViolation(path, f"expected a list of {length} entries")
    return value


def parse_config(text: str) -> SimConfig:
    """Parse and validate a JSON configuration document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError("", f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("", "top-level document must be an object")
    _require_keys(doc, {
        "schema": True, "mixture": True, "grid": False, "mode": False,
        "temperature": False, "initial": False, "time": False, "output": False,
    }, "")
    if doc["schema"] != SCHEMA_VERSION:
        raise SchemaViolation("schema", f"unsupported version {doc['schema']!r}")

    if not isinstance(doc["mixture"], dict):
        raise SchemaViolation("mixture", "expected an object")
    spec = _parse_mixture(doc["mixture"])

    grid_doc = doc.get("grid", {})
    if not isinstance(grid_doc, dict):
        raise SchemaViolation("grid", "expected an object")
    _require_keys(grid_doc, {"n_cells": False, "length": False, "bc": False}, "grid")
    n_cells = _as_int(grid_doc.get("n_cells", 64), "grid.n_cells", minimum=4)
    length = _as_number(grid_doc.get("length", 1.0), "grid.length", positive=True)
    bc = _as_choice(grid_doc.get("bc", "periodic"), "grid.bc", BOUNDARY_CONDITIONS)

    mode = _as_choice(doc.get("mode", "isothermal"), "mode",
                      ("isothermal", "non-isothermal"))
    temperature = _as_number(doc.get("temperature", 1.0), "temperature", positive=True)

    initial_doc = doc.get("initial", {"preset": "uniform-equilibrium"})
    if not isinstance(initial_doc, dict):
        raise SchemaViolation("initial", "expected an object")
    preset, tables = _parse_initial(initial_doc, spec.n_species, n_cells)

    time_doc = doc.get("time", {})
    if not isinstance(time_doc, dict):
        raise SchemaViolation("time", "expected an object")
    _require_keys(time_doc, {"final": False, "snapshot_interval": False,
                             "cfl": False, "steady_tol": False}, "time")
    t_final = _as_number(time_doc.get("final", 1.0), "time.final", nonnegative=True)
    snap = _as_number(time_doc.get("snapshot_interval", 0.0),
                      "time.snapshot_interval", nonnegative=True)
    cfl = _as_number(time_doc.get("cfl", 0.4), "time.cfl", positive=True)
    if cfl > MAX_CFL:
        raise SchemaViolation("time.cfl", f"must be <= {MAX_CFL} for stability")
    steady_tol = _as_number(time_doc.get("steady_tol", 1e-6), "time.steady_tol",
                            positive=True)

    out_doc = doc.get("output", {})
    if not isinstance(out_doc, dict):
        raise SchemaViolation("output", "expected an object")
    _require_keys(out_doc, {"directory": False, "formats": False}, "output")
    directory = out_doc.get("directory", ".")
    if not isinstance(directory, str):
        raise SchemaViolation("output.directory", "expected a string")
    formats = out_doc.get("formats", ["csv"])
    if not isinstance(formats, list) or not formats:
        raise SchemaViolation("output.formats", "expected a non-empty list")
    for k, fmt in enumerate(formats):
        _as_choice(fmt, f"output.formats[{k}]", ("csv",))

    return SimConfig(
        spec=spec, n_cells=n_cells, length=length, bc=bc, mode=mode,
        temperature=temperature, initial_preset=preset, initial_tables=tables,
        t_final=t_final, snapshot_interval=snap, cfl=cfl, steady_tol=steady_tol,
        output_dir=directory, formats=tuple(formats),
    )


def load_config(path: str) -> SimConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
