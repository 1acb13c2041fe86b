"""Vanishing-scaling-parameter limit: algebraic deviatoric pressures and the
generalized Maxwell-Stefan velocity system.

As alpha -> 0 the stiff pressure relaxation becomes algebraic: off-diagonal
deviatoric components vanish and the diagonal ones solve

    M P_<ll> = beta^{ll},      l = 1, 2, 3,

where M is the species-coupling matrix of the stiff relaxation (transpose
strictly diagonally dominant, hence invertible) and beta collects the
scalar-pressure terms.  beta^{11} = beta^{22} by construction, and whenever
the compatibility condition m_i p_i / rho_i = common holds,
2 beta^{11} + beta^{33} = 0 so the solved triple is traceless.

The momentum balance reduces to the singular friction system

    g_i = sum_j c_ij rho_i rho_j (u_j - u_i),    c_ij = 2 pi ||b_ij||/(m_i+m_j)

per direction, solvable only when the gradients g sum to zero over species;
the one-parameter family is closed by prescribing the mass-average velocity.

Note on beta's sign: the formula below is fixed so that M^{-1} beta is the
actual stationary state of the stiff relaxation (cross-checked against the
time integrator's large-step limit and the single-species stationary state);
see the solve tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .collisions import coefficients, pressure_exchange_matrix
from .errors import (
    AllSpeciesVacuum,
    IncompatibleGradients,
    LinearSolveFailure,
    NonPositiveDensity,
    SingularMatrix,
    VacuumSpecies,
)
from .mixture import MixtureSpec

GRADIENT_SUM_TOL = 1e-10
SOLVE_RESIDUAL_TOL = 1e-12


@dataclass(frozen=True)
class LimitAssembly:
    """Assembled limit system: matrix, right-hand sides, dominance margins.

    beta has shape (..., 3, S) with rows for the 11, 22 and 33 components;
    the first two rows are the same array by construction.
    """

    m_matrix: np.ndarray          # (..., S, S)
    beta: np.ndarray              # (..., 3, S)
    dominance_margins: np.ndarray  # (..., S)


@dataclass(frozen=True)
class AsymptoticSolution:
    """Limit solution on a state or a grid of states.

    dev_diag: per-species deviatoric diagonal (p<11>, p<22>, p<33>),
    shape (..., S, 3).  velocities: per-species, shape (..., S, 3).
    compat_residual: largest normalized compatibility residual.
    """

    dev_diag: np.ndarray
    velocities: np.ndarray
    compat_residual: float


def _check_densities(densities: np.ndarray) -> np.ndarray:
    rho = np.asarray(densities, dtype=float)
    if np.any(rho < 0.0):
        raise NonPositiveDensity("densities must be nonnegative")
    if not np.all(np.any(rho > 0.0, axis=-1)):
        raise AllSpeciesVacuum("every species has zero density")
    return rho


def build_m(spec: MixtureSpec, densities: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Species-coupling matrix M and the dominance margins of its transpose.

    margin_i = |M_ii| - sum_{j != i} |M_ji|
             = pi ||b_ii|| rho_i / m_i
               + sum_{j != i} 2 pi ||b_ij|| rho_j / (m_i + m_j),

    strictly positive whenever some density is positive.
    """
    rho = _check_densities(densities)
    m_mat = pressure_exchange_matrix(spec, rho)
    c = coefficients(spec)
    s = spec.n_species
    margins = np.zeros(rho.shape)
    for i in range(s):
        margins[..., i] = np.pi * spec.kernel_l1[i, i] * rho[..., i] / c.masses[i]
        for j in range(s):
            if j != i:
                margins[..., i] += c.c_mom[i, j] * rho[..., j]
    return m_mat, margins


def build_beta(spec: MixtureSpec, densities: np.ndarray,
               pressures: np.ndarray) -> np.ndarray:
    """Right-hand sides beta^{ll} of the limit system, shape (..., 3, S).

        beta^{11}_i = beta^{22}_i
          = sum_j pi/(m_i+m_j)^2 [ ||b|| ((4 m_i - m_j) rho_j p_i
                                           - 5 m_j rho_i p_j)
                                   + 3 m_j B (rho_j p_i + rho_i p_j) ]
        beta^{33}_i
          = sum_j 2 pi/(m_i+m_j)^2 [ ||b|| ((2 m_i + m_j) rho_j p_i
                                             - m_j rho_i p_j)
                                     - 3 m_j B (rho_j p_i + rho_i p_j) ]
    """
    rho = np.asarray(densities, dtype=float)
    p = np.asarray(pressures, dtype=float)
    m = spec.masses
    s = spec.n_species
    b11 = np.zeros(np.broadcast_shapes(rho.shape, p.shape))
    b33 = np.zeros_like(b11)
    for i in range(s):
        for j in range(s):
            pref = np.pi / (m[i] + m[j]) ** 2
            l1 = spec.kernel_l1[i, j]
            b2 = spec.kernel_b[i, j]
            cross = rho[..., j] * p[..., i]
            mirror = rho[..., i] * p[..., j]
            b11[..., i] += pref * (
                l1 * ((4.0 * m[i] - m[j]) * cross - 5.0 * m[j] * mirror)
                + 3.0 * m[j] * b2 * (cross + mirror)
            )
            b33[..., i] += 2.0 * pref * (
                l1 * ((2.0 * m[i] + m[j]) * cross - m[j] * mirror)
                - 3.0 * m[j] * b2 * (cross + mirror)
            )
    return np.stack([b11, b11, b33], axis=-2)


def assemble(spec: MixtureSpec, densities: np.ndarray,
             pressures: np.ndarray) -> LimitAssembly:
    m_mat, margins = build_m(spec, densities)
    beta = build_beta(spec, densities, pressures)
    return LimitAssembly(m_matrix=m_mat, beta=beta, dominance_margins=margins)


def solve_deviatoric(assembly: LimitAssembly) -> np.ndarray:
    """Solve M P_<ll> = beta^{ll} for l = 1, 2, 3 by dense factorization.

    Returns the deviatoric diagonals with shape (..., S, 3).  The margins
    guarantee invertibility, so a singular factorization is an internal
    error; the residual is checked against 1e-12 * ||beta||.
    """
    rhs = np.swapaxes(assembly.beta, -1, -2)  # (..., S, 3)
    try:
        sol = np.linalg.solve(assembly.m_matrix, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix(str(exc)) from exc
    residual = assembly.m_matrix @ sol - rhs
    scale = np.linalg.norm(assembly.beta)
    if scale > 0.0 and np.linalg.norm(residual) > SOLVE_RESIDUAL_TOL * scale:
        raise LinearSolveFailure(
            f"residual {np.linalg.norm(residual):.3e} exceeds tolerance"
        )
    return sol


def compatibility_residual(spec: MixtureSpec, densities: np.ndarray,
                           pressures: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-species compatibility residual and its species sum.

        r_i = sum_j ||b_ij||/(m_i+m_j)^2 (m_j rho_i p_j - m_i rho_j p_i)

    vanishes for every i exactly when m_i p_i / rho_i is common to all
    species (the scaled ideal gas law at a shared temperature does this);
    the summands are pairwise antisymmetric so sum_i r_i = 0 identically.
    """
    rho = np.asarray(densities, dtype=float)
    p = np.asarray(pressures, dtype=float)
    m = spec.masses
    s = spec.n_species
    r = np.zeros(np.broadcast_shapes(rho.shape, p.shape))
    for i in range(s):
        for j in range(s):
            pref = spec.kernel_l1[i, j] / (m[i] + m[j]) ** 2
            r[..., i] += pref * (
                m[j] * rho[..., i] * p[..., j] - m[i] * rho[..., j] * p[..., i]
            )
    return r, r.sum(axis=-1)


def compatibility_scale(spec: MixtureSpec, densities: np.ndarray,
                        pressures: np.ndarray) -> np.ndarray:
    """Magnitude scale for normalizing the compatibility residual."""
    rho = np.asarray(densities, dtype=float)
    p = np.asarray(pressures, dtype=float)
    m = spec.masses
    s = spec.n_species
    scale = np.zeros(np.broadcast_shapes(rho.shape, p.shape))
    for i in range(s):
        for j in range(s):
            pref = spec.kernel_l1[i, j] / (m[i] + m[j]) ** 2
            scale[..., i] += pref * (
                m[j] * rho[..., i] * p[..., j] + m[i] * rho[..., j] * p[..., i]
            )
    return scale


def friction_matrix(spec: MixtureSpec, densities: np.ndarray) -> np.ndarray:
    """Symmetric singular friction operator F with (F u)_i = sum_j c_ij
    rho_i rho_j (u_j - u_i); kernel spanned by the constant vector."""
    c = coefficients(spec)
    rho = np.asarray(densities, dtype=float)
    s = spec.n_species
    f = np.zeros(rho.shape[:-1] + (s, s))
    for i in range(s):
        for j in range(s):
            if i == j:
                continue
            rr = c.c_mom[i, j] * rho[..., i] * rho[..., j]
            f[..., i, j] += rr
            f[..., i, i] -= rr
    return f


def ms_velocity_solve(
    spec: MixtureSpec,
    densities: np.ndarray,
    gradients: np.ndarray,
    constraint: np.ndarray | float = 0.0,
    tol: float = GRADIENT_SUM_TOL,
) -> np.ndarray:
    """Solve the limiting momentum balance for the species velocities.

    Per direction l, solves g_i = sum_j c_ij rho_i rho_j (u_j - u_i) closed
    by the prescribed mass-average momentum sum_i rho_i u_i = constraint
    (a Lagrange-bordered symmetric solve; the multiplier vanishes when the
    gradients sum to zero).  Gradients whose species sum is within
    ``tol * max|g|`` of zero are projected onto the zero-sum subspace;
    larger imbalances are rejected.

    densities: (..., S) strictly positive.  gradients: (..., S, 3) values of
    d/dx_l (p_i + p_i<ll>).  constraint: scalar or (..., 3).
    Returns velocities (..., S, 3).
    """
    rho = np.asarray(densities, dtype=float)
    g = np.array(gradients, dtype=float)
    if np.any(rho <= 0.0):
        raise VacuumSpecies("limit velocities need every density positive")
    s = spec.n_species
    scale = np.max(np.abs(g))
    sums = g.sum(axis=-2)  # (..., 3)
    if np.max(np.abs(sums)) > tol * max(scale, 1e-300):
        raise IncompatibleGradients(
            f"species gradient sum {np.max(np.abs(sums)):.3e} exceeds "
            f"{tol:.1e} * {scale:.3e}"
        )
    g -= sums[..., None, :] / s

    f = friction_matrix(spec, rho)
    lead = rho.shape[:-1]
    a = np.zeros(lead + (s + 1, s + 1))
    a[..., :s, :s] = f
    a[..., :s, s] = rho
    a[..., s, :s] = rho
    rhs = np.zeros(lead + (s + 1, 3))
    rhs[..., :s, :] = g
    rhs[..., s, :] = np.asarray(constraint, dtype=float)
    try:
        sol = np.linalg.solve(a, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix(str(exc)) from exc
    u = sol[..., :s, :]
    residual = np.max(np.abs(f @ u - g))
    if scale > 0.0 and residual > 1e-11 * scale:
        raise LinearSolveFailure(f"friction-system residual {residual:.3e}")
    return u


def _gradient_1d(field: np.ndarray, dx: float, bc: str) -> np.ndarray:
    """Central-difference x-derivative along the last axis; one-sided at
    zero-flux walls, wrapped when periodic."""
    if bc == "periodic":
        return (np.roll(field, -1, axis=-1) - np.roll(field, 1, axis=-1)) / (2.0 * dx)
    out = np.empty_like(field)
    out[..., 1:-1] = (field[..., 2:] - field[..., :-2]) / (2.0 * dx)
    out[..., 0] = (field[..., 1] - field[..., 0]) / dx
    out[..., -1] = (field[..., -1] - field[..., -2]) / dx
    return out


def limit_solution_on_grid(
    spec: MixtureSpec,
    rho: np.ndarray,
    pressures: np.ndarray,
    dx: float,
    bc: str = "periodic",
    constraint: np.ndarray | float = 0.0,
) -> AsymptoticSolution:
    """Limit deviatoric pressures and velocities on a 1-D grid of states.

    rho, pressures: (S, N) density and scalar-pressure fields.  The driving
    gradients d/dx (p_i + p_i<11>) are formed by central differences and
    projected onto the zero-sum subspace (discrete gradients of compatible
    fields carry truncation noise), then the friction system is solved per
    cell.  ``constraint`` may be a scalar, a (3,) vector, or an (N, 3) field
    of mass-average momenta.
    """
    rho_cells = np.asarray(rho, dtype=float).T        # (N, S)
    p_cells = np.asarray(pressures, dtype=float).T    # (N, S)
    assembly = assemble(spec, rho_cells, p_cells)
    dev = solve_deviatoric(assembly)                  # (N, S, 3)

    driving = np.asarray(pressures) + dev[:, :, 0].T  # (S, N): p_i + p_i<11>
    grad_x = _gradient_1d(driving, dx, bc)            # (S, N)
    grads = np.zeros(rho_cells.shape + (3,))          # (N, S, 3)
    grads[..., 0] = grad_x.T
    grads -= grads.sum(axis=1, keepdims=True) / spec.n_species

    constraint = np.asarray(constraint, dtype=float)
    if constraint.ndim == 0:
        constraint = np.full((rho_cells.shape[0], 3), float(constraint))
    vel = ms_velocity_solve(spec, rho_cells, grads, constraint)

    r, _ = compatibility_residual(spec, rho_cells, p_cells)
    scale = compatibility_scale(spec, rho_cells, p_cells)
    normalized = np.abs(r) / np.maximum(scale, 1e-300)
    return AsymptoticSolution(
        dev_diag=dev,
        velocities=vel,
        compat_residual=float(normalized.max()),
    )
