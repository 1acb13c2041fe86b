"""Initial-condition presets and construction of configured grids.

Every preset builds isotropic ideal-gas pressure tensors at the common
temperature, so the compatibility condition holds in every cell by
construction.
"""

from __future__ import annotations

import numpy as np

from .errors import BadPresetParams, UnknownPreset, ValidationError
from .grid import GridField
from .mixture import MixtureSpec, ideal_gas_pressure

PRESET_NAMES = ("uniform-equilibrium", "binary-counterdiffusion", "three-species-step")


def _isotropic_grid(spec: MixtureSpec, rho: np.ndarray, u: np.ndarray, dx: float,
                    bc: str, temperature: float) -> GridField:
    s, n = rho.shape
    press = np.zeros((s, 6, n))
    for i in range(s):
        p_i = (5.0 / 3.0) * rho[i] * temperature / spec.masses[i]
        press[i, :3, :] = p_i[None, :]
    return GridField(rho, u, press, dx, bc)


def _reject_unknown(params: dict, allowed: set[str], name: str) -> None:
    unknown = set(params) - allowed
    if unknown:
        raise BadPresetParams(f"preset {name!r}: unknown parameters {sorted(unknown)}")


def preset_state(name: str, params: dict, n_cells: int, length: float,
                 spec: MixtureSpec, temperature: float,
                 bc: str = "periodic") -> GridField:
    """Build a named initial state on a grid of ``n_cells`` cells.

    uniform-equilibrium:
        parameters rho (per-species list, default ones) and u (common
        velocity, default zero); an exact fixed point of the dynamics for
        the constant kernel.
    binary-counterdiffusion:
        two species with opposite sinusoidal composition perturbations,
        rho_1 = mean (1 + a sin(2 pi x / L)), rho_2 = mean (1 - a sin(...)),
        zero velocity; for equal masses the total pressure is uniform by
        construction.  Parameters mean_density (default 0.5) and amplitude
        (default 0.1, must satisfy |a| < 1).
    three-species-step:
        piecewise-constant compositions smoothed over two cells around the
        midpoint.  Parameters rho_left / rho_right (per-species lists;
        defaults provided for three species).
    """
    s = spec.n_species
    dx = length / n_cells
    x = (np.arange(n_cells) + 0.5) * dx
    u = np.zeros((s, 3, n_cells))

    if name == "uniform-equilibrium":
        _reject_unknown(params, {"rho", "u"}, name)
        rho_vals = np.asarray(params.get("rho", [1.0] * s), dtype=float)
        if rho_vals.shape != (s,) or np.any(rho_vals <= 0.0):
            raise BadPresetParams(f"rho must be {s} positive values")
        u_common = np.asarray(params.get("u", [0.0, 0.0, 0.0]), dtype=float)
        if u_common.shape != (3,):
            raise BadPresetParams("u must be a 3-vector")
        rho = np.repeat(rho_vals[:, None], n_cells, axis=1)
        u[:] = u_common[None, :, None]
        return _isotropic_grid(spec, rho, u, dx, bc, temperature)

    if name == "binary-counterdiffusion":
        _reject_unknown(params, {"mean_density", "amplitude"}, name)
        if s != 2:
            raise BadPresetParams(f"needs exactly 2 species, spec has {s}")
        mean = float(params.get("mean_density", 0.5))
        amp = float(params.get("amplitude", 0.1))
        if mean <= 0.0 or not abs(amp) < 1.0:
            raise BadPresetParams("need mean_density > 0 and |amplitude| < 1")
        wave = amp * np.sin(2.0 * np.pi * x / length)
        rho = np.stack([mean * (1.0 + wave), mean * (1.0 - wave)])
        return _isotropic_grid(spec, rho, u, dx, bc, temperature)

    if name == "three-species-step":
        _reject_unknown(params, {"rho_left", "rho_right"}, name)
        defaults = s == 3
        left = params.get("rho_left", [1.0, 0.5, 0.25] if defaults else None)
        right = params.get("rho_right", [0.25, 0.5, 1.0] if defaults else None)
        if left is None or right is None:
            raise BadPresetParams("rho_left and rho_right are required")
        left = np.asarray(left, dtype=float)
        right = np.asarray(right, dtype=float)
        if left.shape != (s,) or right.shape != (s,):
            raise BadPresetParams(f"rho_left/rho_right must each have {s} entries")
        if np.any(left <= 0.0) or np.any(right <= 0.0):
            raise BadPresetParams("compositions must be strictly positive")
        blend = 0.5 * (1.0 + np.tanh((x - 0.5 * length) / (2.0 * dx)))
        rho = left[:, None] + (right - left)[:, None] * blend[None, :]
        return _isotropic_grid(spec, rho, u, dx, bc, temperature)

    raise UnknownPreset(f"unknown preset {name!r}; known: {', '.join(PRESET_NAMES)}")


def initial_grid(config, spec: MixtureSpec | None = None) -> GridField:
    """Initial state of a configured scenario (preset or explicit tables)."""
    spec = config.spec if spec is None else spec
    if config.initial_tables is not None:
        t = config.initial_tables
        return GridField(
            np.asarray(t["rho"], dtype=float),
            np.asarray(t["u"], dtype=float),
            np.asarray(t["p"], dtype=float),
            dx=config.length / config.n_cells,
            bc=config.bc,
        )
    name, params = config.initial_preset
    return preset_state(name, params, config.n_cells, config.length, spec,
                        config.temperature, config.bc)
