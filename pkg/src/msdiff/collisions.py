"""Closed-form collision exchange terms for angle-only (Maxwell) kernels.

For every species pair the momentum, momentum-flux and energy exchange rates
reduce to algebraic expressions in the states and the two kernel scalars
(||b||_L1, B).  The angular integrals over the scattering sphere collapse to
a diagonal matrix

    A = diag(pi (||b||_L1 - B), pi (||b||_L1 - B), 2 pi B),

whose trace is exactly 2 pi ||b||_L1.  The distinguished third axis is kept
as written; for the constant kernel (B = ||b||_L1 / 3) the matrix is
isotropic and the distinction disappears.

Per-pair functions return the (i, j) summand so that the pairwise
cancellation identities are directly testable; callers sum over pairs.
The batched operators at the bottom act on whole fields and are what the
time integrator uses; they must agree with the per-pair functions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidKernelScalars, NonPositiveAlpha
from .mixture import MixtureSpec, SpeciesState
from .tensors import SYM_COMPONENTS, sym_trace


@dataclass(frozen=True)
class AngularCoeffs:
    """Angular integrals A_kl of one pair; diagonal, transverse/axial split."""

    transverse: float  # A_11 = A_22
    axial: float       # A_33

    @property
    def matrix(self) -> np.ndarray:
        return np.diag([self.transverse, self.transverse, self.axial])

    @property
    def diag(self) -> np.ndarray:
        return np.array([self.transverse, self.transverse, self.axial])

    def trace(self) -> float:
        return self.transverse + self.transverse + self.axial


def angular_coeffs(kernel_l1: float, kernel_b: float) -> AngularCoeffs:
    """Angular coefficients from the kernel scalars; requires 0 <= B <= L1."""
    if not (0.0 <= kernel_b <= kernel_l1):
        raise InvalidKernelScalars(
            f"need 0 <= B <= L1, got B = {kernel_b}, L1 = {kernel_l1}"
        )
    return AngularCoeffs(
        transverse=np.pi * (kernel_l1 - kernel_b),
        axial=2.0 * np.pi * kernel_b,
    )


@dataclass(frozen=True)
class Coefficients:
    """Pairwise coefficient tables shared by all exchange-term formulas."""

    masses: np.ndarray        # (S,)
    msum: np.ndarray          # (S, S) m_i + m_j
    c_mom: np.ndarray         # (S, S) 2 pi ||b|| / (m_i + m_j)
    c_press: np.ndarray       # (S, S) 2 pi ||b|| / (m_i + m_j)^2
    mj_msum2: np.ndarray      # (S, S) m_j / (m_i + m_j)^2   (j = column)
    a_diag: np.ndarray        # (S, S, 3) angular diagonal per pair


def coefficients(spec: MixtureSpec) -> Coefficients:
    m = spec.masses
    msum = m[:, None] + m[None, :]
    c_mom = 2.0 * np.pi * spec.kernel_l1 / msum
    c_press = 2.0 * np.pi * spec.kernel_l1 / msum**2
    mj_msum2 = m[None, :] / msum**2
    a_diag = np.empty(msum.shape + (3,))
    a_diag[..., 0] = np.pi * (spec.kernel_l1 - spec.kernel_b)
    a_diag[..., 1] = a_diag[..., 0]
    a_diag[..., 2] = 2.0 * np.pi * spec.kernel_b
    return Coefficients(m, msum, c_mom, c_press, mj_msum2, a_diag)


# --- per-pair exchange terms -----------------------------------------------

def momentum_source(i: int, j: int, states: list[SpeciesState],
                    spec: MixtureSpec) -> np.ndarray:
    """Momentum exchange rate of pair (i, j), without any alpha factor:

        R_ij = 2 pi ||b_ij|| / (m_i + m_j) * rho_i rho_j (u_j - u_i).

    Exactly antisymmetric under i <-> j; callers apply the scaling.
    """
    c = coefficients(spec)
    si, sj = states[i], states[j]
    return c.c_mom[i, j] * (si.rho * sj.rho) * (sj.u - si.u)


def momentum_flux_source_parts(
    i: int, j: int, states: list[SpeciesState], spec: MixtureSpec
) -> tuple[np.ndarray, np.ndarray]:
    """Stiff and quadratic blocks of the pressure-tensor exchange, unscaled.

    Returns (stiff, quad) as six-component tensors.  The full source is
    quad * alpha + stiff / alpha; ``stiff`` is linear in the pressure
    tensors at frozen densities, ``quad`` is quadratic in the velocities.
    """
    c = coefficients(spec)
    si, sj = states[i], states[j]
    m_i, m_j = c.masses[i], c.masses[j]
    cp = c.c_press[i, j]
    ca = c.mj_msum2[i, j]

    p_i = si.pressure
    p_j = sj.pressure
    stiff = cp * (-(2.0 * m_i + m_j) * sj.rho * si.press + m_j * si.rho * sj.press)
    stiff = stiff.copy()
    stiff[:3] += ca * c.a_diag[i, j] * 3.0 * (sj.rho * p_i + si.rho * p_j)

    rr = si.rho * sj.rho
    du = si.u - sj.u
    quad = np.empty(6)
    for pos, (k, l) in enumerate(SYM_COMPONENTS):
        brace = (
            -(2.0 * m_i + m_j) * si.u[k] * si.u[l]
            + m_i * (si.u[k] * sj.u[l] + si.u[l] * sj.u[k])
            + m_j * sj.u[k] * sj.u[l]
        )
        quad[pos] = cp * rr * brace
    quad[:3] += ca * c.a_diag[i, j] * rr * float(du @ du)
    return stiff, quad


def momentum_flux_source(i: int, j: int, states: list[SpeciesState],
                         spec: MixtureSpec, alpha: float) -> np.ndarray:
    """Full pressure-tensor exchange rate of pair (i, j), six components.

    Recombines the split blocks, so it reproduces stiff/alpha + alpha*quad
    bit for bit.
    """
    if alpha <= 0.0:
        raise NonPositiveAlpha(f"alpha = {alpha} must be > 0")
    stiff, quad = momentum_flux_source_parts(i, j, states, spec)
    return stiff / alpha + alpha * quad


def energy_source(i: int, j: int, states: list[SpeciesState],
                  spec: MixtureSpec, alpha: float) -> float:
    """Energy exchange rate of pair (i, j); the trace of the tensor source.

        c_press * { (1/alpha) (-6 m_i rho_j p_i + 6 m_j rho_i p_j)
                    + alpha rho_i rho_j [ -2 m_i |u_i|^2
                                          + 2 (m_i - m_j) u_i . u_j
                                          + 2 m_j |u_j|^2 ] }
    """
    if alpha <= 0.0:
        raise NonPositiveAlpha(f"alpha = {alpha} must be > 0")
    c = coefficients(spec)
    si, sj = states[i], states[j]
    m_i, m_j = c.masses[i], c.masses[j]
    stiff = -6.0 * m_i * sj.rho * si.pressure + 6.0 * m_j * si.rho * sj.pressure
    quad = (si.rho * sj.rho) * (
        -2.0 * m_i * float(si.u @ si.u)
        + 2.0 * (m_i - m_j) * float(si.u @ sj.u)
        + 2.0 * m_j * float(sj.u @ sj.u)
    )
    return float(c.c_press[i, j] * (stiff / alpha + alpha * quad))


# --- batched operators over fields -----------------------------------------
#
# Field arguments broadcast over leading axes: rho (..., S), u (..., S, 3),
# press (..., S, 6).  These are assembled pairwise from the same coefficient
# tables as the per-pair functions above and are verified against them.

def momentum_relaxation_matrix(spec: MixtureSpec, rho: np.ndarray) -> np.ndarray:
    """Linear operator K on species momenta w_i = rho_i u_i (one direction):

        (K w)_i = sum_j c_mom_ij (rho_i w_j - rho_j w_i).

    Columns sum to zero, so the total momentum is in the left null space.
    Returns shape (..., S, S).
    """
    c = coefficients(spec)
    rho = np.asarray(rho, dtype=float)
    s = spec.n_species
    k = np.zeros(rho.shape[:-1] + (s, s))
    for i in range(s):
        for j in range(s):
            if i == j:
                continue
            k[..., i, j] += c.c_mom[i, j] * rho[..., i]
            k[..., i, i] -= c.c_mom[i, j] * rho[..., j]
    return k


def pressure_exchange_matrix(spec: MixtureSpec, rho: np.ndarray) -> np.ndarray:
    """Species-coupling matrix M of the stiff pressure relaxation:

        M_ij = c_press_ij m_j rho_i                      (j != i)
        M_ii = c_press_ii m_i rho_i
               - sum_j c_press_ij (2 m_i + m_j) rho_j    (sum includes j = i)

    Acting on like components of the pressure tensors; its transpose is
    strictly diagonally dominant whenever some density is positive.
    Returns shape (..., S, S).
    """
    c = coefficients(spec)
    rho = np.asarray(rho, dtype=float)
    s = spec.n_species
    m = c.masses
    out = np.zeros(rho.shape[:-1] + (s, s))
    for i in range(s):
        out[..., i, i] = c.c_press[i, i] * m[i] * rho[..., i]
        for j in range(s):
            if j != i:
                out[..., i, j] = c.c_press[i, j] * m[j] * rho[..., i]
            out[..., i, i] -= c.c_press[i, j] * (2.0 * m[i] + m[j]) * rho[..., j]
    return out


def trace_coupling_matrix(spec: MixtureSpec, rho: np.ndarray) -> np.ndarray:
    """Stiff operator on the 3S diagonal tensor components, flat index i*3+a:

        L_(i,a) = sum_j M_ij P_(j,a)
                  + sum_j (m_j A^{ij}_aa / (m_i+m_j)^2)
                          (rho_j sum_b P_(i,b) + rho_i sum_b P_(j,b)).

    The second piece is the angular-coefficient coupling of each diagonal
    entry to the traces.  Returns shape (..., 3S, 3S).
    """
    c = coefficients(spec)
    rho = np.asarray(rho, dtype=float)
    s = spec.n_species
    m_mat = pressure_exchange_matrix(spec, rho)
    t = np.zeros(rho.shape[:-1] + (3 * s, 3 * s))
    for i in range(s):
        for j in range(s):
            for a in range(3):
                t[..., 3 * i + a, 3 * j + a] += m_mat[..., i, j]
                coeff = c.mj_msum2[i, j] * c.a_diag[i, j, a]
                for b in range(3):
                    t[..., 3 * i + a, 3 * i + b] += coeff * rho[..., j]
                    t[..., 3 * i + a, 3 * j + b] += coeff * rho[..., i]
    return t


def velocity_quadratic_source(spec: MixtureSpec, rho: np.ndarray,
                              u: np.ndarray) -> np.ndarray:
    """Velocity-quadratic block of the pressure-tensor source, summed over
    partners; multiplied by alpha in the full source.  Returns (..., S, 6)."""
    c = coefficients(spec)
    rho = np.asarray(rho, dtype=float)
    u = np.asarray(u, dtype=float)
    s = spec.n_species
    m = c.masses
    out = np.zeros(rho.shape[:-1] + (s, 6))
    for i in range(s):
        for j in range(s):
            rr = rho[..., i] * rho[..., j]
            du = u[..., i, :] - u[..., j, :]
            du2 = np.einsum("...k,...k->...", du, du)
            for pos, (k, l) in enumerate(SYM_COMPONENTS):
                brace = (
                    -(2.0 * m[i] + m[j]) * u[..., i, k] * u[..., i, l]
                    + m[i] * (u[..., i, k] * u[..., j, l] + u[..., i, l] * u[..., j, k])
                    + m[j] * u[..., j, k] * u[..., j, l]
                )
                out[..., i, pos] += c.c_press[i, j] * rr * brace
            for a in range(3):
                out[..., i, a] += c.mj_msum2[i, j] * c.a_diag[i, j, a] * rr * du2
    return out


def stiff_pressure_source(spec: MixtureSpec, rho: np.ndarray,
                          press: np.ndarray) -> np.ndarray:
    """Stiff block of the pressure-tensor source, summed over partners;
    divided by alpha in the full source.  Returns (..., S, 6)."""
    c = coefficients(spec)
    rho = np.asarray(rho, dtype=float)
    press = np.asarray(press, dtype=float)
    s = spec.n_species
    m = c.masses
    p_scalar = sym_trace(press) / 3.0  # (..., S)
    out = np.zeros(press.shape)
    for i in range(s):
        for j in range(s):
            out[..., i, :] += c.c_press[i, j] * (
                -(2.0 * m[i] + m[j]) * rho[..., j, None] * press[..., i, :]
                + m[j] * rho[..., i, None] * press[..., j, :]
            )
            pair = 3.0 * (rho[..., j] * p_scalar[..., i] + rho[..., i] * p_scalar[..., j])
            for a in range(3):
                out[..., i, a] += c.mj_msum2[i, j] * c.a_diag[i, j, a] * pair
    return out
