"""Domain types and mixture-level quantities.

All quantities are dimensionless, expressed in the diffusive scaling: the
single parameter ``alpha`` is the common magnitude of the Mach and Knudsen
numbers, species velocities are measured against the macroscopic transport
scale, and molecular (peculiar) velocities against the sound speed.

A mixture of S monatomic species is described by scaled masses ``m_i`` and,
for every pair, two scalars of the angle-only collision kernel b(cos theta):
its total weight ``||b||_L1 = int_{-1}^{1} b(eta) d eta`` and its second
angular moment ``B = int_{-1}^{1} eta^2 b(eta) d eta``.  Every closed-form
exchange term uses only these two integrals, so no kernel quadrature appears
on the hot path.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import tensors
from .errors import (
    AllSpeciesVacuum,
    BExceedsL1,
    NegativeKernel,
    NonPositiveAlpha,
    NonPositiveDensity,
    NonPositiveMass,
    NonPositiveTemperature,
    NonSymmetricInput,
    NonSymmetricKernel,
)


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class MixtureSpec:
    """Mixture definition: masses, pairwise kernel scalars, scaling parameter.

    Fields
    ------
    masses : (S,) scaled molecular masses, strictly positive.
    kernel_l1 : (S, S) symmetric, nonnegative; ||b^{ij}||_L1.
    kernel_b : (S, S) symmetric, nonnegative; B^{ij} <= ||b^{ij}||_L1.
    alpha : scaling parameter in (0, 1].
    """

    masses: np.ndarray
    kernel_l1: np.ndarray
    kernel_b: np.ndarray
    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "masses", _readonly(np.atleast_1d(self.masses)))
        object.__setattr__(self, "kernel_l1", _readonly(np.atleast_2d(self.kernel_l1)))
        object.__setattr__(self, "kernel_b", _readonly(np.atleast_2d(self.kernel_b)))
        object.__setattr__(self, "alpha", float(self.alpha))

    @property
    def n_species(self) -> int:
        return self.masses.shape[0]


def validate_spec(spec: MixtureSpec) -> MixtureSpec:
    """Check every MixtureSpec invariant, returning the spec unchanged.

    Raises a field-specific error naming the offending entry otherwise.
    """
    s = spec.n_species
    if spec.masses.ndim != 1:
        raise NonPositiveMass(f"masses must be a vector, got shape {spec.masses.shape}")
    for name, kern in (("kernel_l1", spec.kernel_l1), ("kernel_b", spec.kernel_b)):
        if kern.shape != (s, s):
            raise NonSymmetricKernel(f"{name} must have shape ({s}, {s}), got {kern.shape}")
        if not np.array_equal(kern, kern.T):
            i, j = np.argwhere(kern != kern.T)[0]
            raise NonSymmetricKernel(f"{name}[{i}][{j}] != {name}[{j}][{i}]")
        if np.any(kern < 0.0):
            i, j = np.argwhere(kern < 0.0)[0]
            raise NegativeKernel(f"{name}[{i}][{j}] = {kern[i, j]} is negative")
    if np.any(spec.kernel_b > spec.kernel_l1):
        i, j = np.argwhere(spec.kernel_b > spec.kernel_l1)[0]
        raise BExceedsL1(
            f"kernel_b[{i}][{j}] = {spec.kernel_b[i, j]} exceeds "
            f"kernel_l1[{i}][{j}] = {spec.kernel_l1[i, j]}"
        )
    if np.any(spec.masses <= 0.0):
        i = int(np.argwhere(spec.masses <= 0.0)[0][0])
        raise NonPositiveMass(f"masses[{i}] = {spec.masses[i]} must be > 0")
    if not spec.alpha > 0.0:
        raise NonPositiveAlpha(f"alpha = {spec.alpha} must be > 0")
    return spec


@dataclass(frozen=True)
class SpeciesState:
    """State of one species at one point: density, velocity, pressure tensor.

    The pressure tensor is stored as six components in the order
    (11, 22, 33, 12, 13, 23) so that symmetry holds by construction.
    Vacuum (rho == 0) is permitted; operations that divide by rho reject it.
    """

    rho: float
    u: np.ndarray
    press: np.ndarray

    def __post_init__(self):
        if self.rho < 0.0:
            raise NonPositiveDensity(f"rho = {self.rho} is negative")
        object.__setattr__(self, "rho", float(self.rho))
        u = _readonly(np.atleast_1d(self.u))
        press = _readonly(np.atleast_1d(self.press))
        if u.shape != (3,):
            raise NonSymmetricInput(f"u must have shape (3,), got {u.shape}")
        if press.shape != (6,):
            raise NonSymmetricInput(f"press must have shape (6,), got {press.shape}")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "press", press)

    @classmethod
    def from_tensor(cls, rho: float, u, p_tensor) -> "SpeciesState":
        """Build from a full 3x3 pressure tensor (checked for symmetry)."""
        return cls(rho, np.asarray(u, dtype=float), tensors.matrix_to_sym(p_tensor))

    @property
    def p_tensor(self) -> np.ndarray:
        return tensors.sym_to_matrix(self.press)

    @property
    def pressure(self) -> float:
        """Scalar pressure, one third of the tensor trace."""
        return float(tensors.sym_trace(self.press) / 3.0)


@dataclass(frozen=True)
class MixtureAggregates:
    """Mixture totals: density, mass-average velocity, internal energy
    density, pressure tensor and internal energy flux."""

    rho: float
    u: np.ndarray
    eps: float          # internal energy density (rho * epsilon)
    p_kn: np.ndarray    # six components
    q: np.ndarray


def pressure_decompose(p_tensor: np.ndarray) -> tuple[float, np.ndarray]:
    """Split a symmetric 3x3 tensor into scalar pressure and deviator.

    Returns (p, dev) with p = trace/3 and dev = p_tensor - p*I, so that
    p*I + dev reconstructs the input to within one rounding unit per entry.
    """
    m = np.asarray(p_tensor, dtype=float)
    sym = tensors.matrix_to_sym(m)  # raises NonSymmetricInput
    p = float(tensors.sym_trace(sym) / 3.0)
    dev = m - p * np.eye(3)
    return p, dev


def ideal_gas_pressure(rho_i: float, temperature: float, m_i: float) -> float:
    """Scaled ideal-gas partial pressure p_i = (5/3) rho_i T / m_i."""
    if temperature <= 0.0:
        raise NonPositiveTemperature(f"temperature = {temperature} must be > 0")
    if m_i <= 0.0:
        raise NonPositiveMass(f"m_i = {m_i} must be > 0")
    if rho_i < 0.0:
        raise NonPositiveDensity(f"rho_i = {rho_i} is negative")
    return (5.0 / 3.0) * rho_i * temperature / m_i


def mixture_aggregates(states: list[SpeciesState], alpha: float) -> MixtureAggregates:
    """Mixture density, velocity, energy, pressure tensor and energy flux.

    Uses the monatomic relation rho_i eps_i = (3/2) p_i for the species
    internal energies and keeps the alpha^2 diffusion-velocity corrections:

      rho eps = sum (3/2) p_i + alpha^2 sum (1/2) rho_i |u_i - u|^2
      p_kn    = sum p_i_kn + alpha^2 sum rho_i (u_i - u)(u_i - u)
      q_n     = sum [(3/2) p_i + alpha^2 (1/2) rho_i |u_i - u|^2] (u_i - u)_n
                + sum_k p_i_kn (u_i - u)_k
    """
    rho = sum(s.rho for s in states)
    if rho <= 0.0:
        raise AllSpeciesVacuum("all species have zero density")
    u = sum((s.rho * s.u for s in states), np.zeros(3)) / rho

    eps = 0.0
    p_kn = np.zeros(6)
    q = np.zeros(3)
    for s in states:
        w = s.u - u
        p_scalar = 1.5 * s.pressure
        kinetic = 0.5 * s.rho * float(w @ w)
        eps += p_scalar + alpha**2 * kinetic
        p_kn += s.press + alpha**2 * s.rho * tensors.outer_sym(w, w)
        q += (p_scalar + alpha**2 * kinetic) * w + tensors.sym_to_matrix(s.press) @ w
    return MixtureAggregates(rho=float(rho), u=u, eps=float(eps), p_kn=p_kn, q=q)
