"""Anisotropic Gaussian (ten-moment) closure and its quadrature oracle.

The entropy-maximizing velocity distribution under prescribed density,
momentum and pressure-tensor moments is a Gaussian in the peculiar velocity
c = v - alpha*u with covariance p/rho and total weight rho/m (the number
density).  This module builds that closure, verifies its moments by
tensorized Gauss-Hermite quadrature, and provides the closed-form third-order
flux the closure implies:

    P_kln = alpha^3 rho u_k u_l u_n
            + alpha (u_k p_ln + u_l p_nk + u_n p_kl),

the third *central* moments being zero by parity.

The quadrature here is a verification oracle, not a hot path: the time
integrator uses the closed-form flux directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    NonPositiveDefinitePressure,
    NonPositiveDensity,
    QuadratureOrderTooLow,
)
from .mixture import SpeciesState
from .tensors import sym_to_matrix

DEFAULT_POINTS_PER_AXIS = 16
MIN_POINTS_PER_AXIS = 8


def _check_spd(p: np.ndarray) -> None:
    """Leading-principal-minor positivity with tolerance 1e-12 * trace."""
    tol = 1e-12 * np.trace(p)
    minors = (
        p[0, 0],
        p[0, 0] * p[1, 1] - p[0, 1] ** 2,
        np.linalg.det(p),
    )
    for order, minor in enumerate(minors, start=1):
        if not minor > tol**order:
            raise NonPositiveDefinitePressure(
                f"leading minor of order {order} is {minor:.3e}"
            )


@dataclass(frozen=True)
class GaussianClosure:
    """Entropy-maximizing Gaussian of one species.

    number_density = rho/m, mean = alpha*u, covariance = p/rho (SPD).
    The species mass is kept so that mass-weighted moments can be formed.
    """

    number_density: float
    mean: np.ndarray
    covariance: np.ndarray
    mass: float

    def pdf(self, v: np.ndarray) -> np.ndarray:
        """Distribution value at velocities v with shape (..., 3).

        Normalized so the integral over velocity space is number_density.
        """
        v = np.asarray(v, dtype=float)
        inv = np.linalg.inv(self.covariance)
        det = np.linalg.det(self.covariance)
        d = v - self.mean
        expo = -0.5 * np.einsum("...k,kl,...l->...", d, inv, d)
        norm = self.number_density / np.sqrt((2.0 * np.pi) ** 3 * det)
        return norm * np.exp(expo)


def build_closure(state: SpeciesState, m_i: float, alpha: float) -> GaussianClosure:
    """Closure from a species state; requires rho > 0 and an SPD tensor."""
    if state.rho <= 0.0:
        raise NonPositiveDensity(f"rho = {state.rho} must be > 0 for the closure")
    p = sym_to_matrix(state.press)
    _check_spd(p)
    return GaussianClosure(
        number_density=state.rho / m_i,
        mean=alpha * state.u,
        covariance=p / state.rho,
        mass=float(m_i),
    )


def gauss_nodes(closure: GaussianClosure, points_per_axis: int = DEFAULT_POINTS_PER_AXIS,
                centered: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature nodes and normalized weights for the closure's Gaussian.

    The covariance is eigendecomposed to decouple the axes, then a
    tensorized 1-D Gauss-Hermite rule is mapped onto them.  Returns
    (nodes (n^3, 3), weights (n^3,)) with weights summing to one; nodes are
    peculiar velocities when ``centered``, absolute velocities otherwise.
    """
    if points_per_axis < MIN_POINTS_PER_AXIS:
        raise QuadratureOrderTooLow(
            f"need at least {MIN_POINTS_PER_AXIS} points per axis, got {points_per_axis}"
        )
    lam, vec = np.linalg.eigh(closure.covariance)
    x, w = np.polynomial.hermite.hermgauss(points_per_axis)
    xs = np.stack(np.meshgrid(x, x, x, indexing="ij"), axis=-1).reshape(-1, 3)
    ws = np.stack(np.meshgrid(w, w, w, indexing="ij"), axis=-1).reshape(-1, 3).prod(axis=1)
    scale = vec * np.sqrt(2.0 * lam)  # columns scaled by sqrt(2 lambda)
    nodes = xs @ scale.T
    if not centered:
        nodes = nodes + closure.mean
    return nodes, ws / np.pi**1.5


@dataclass(frozen=True)
class MomentSet:
    """Central moments recovered by quadrature, mass-weighted."""

    rho: float
    first: np.ndarray | None = None     # (3,)
    second: np.ndarray | None = None    # (3, 3)
    third: np.ndarray | None = None     # (3, 3, 3)


def quadrature_moments(closure: GaussianClosure, max_order: int = 3,
                       points_per_axis: int = DEFAULT_POINTS_PER_AXIS) -> MomentSet:
    """Integrate m * (1, c_k, c_k c_l, c_k c_l c_n) * f over velocity space.

    For a correct closure this returns (rho, 0, p_tensor, 0); the third
    central moments vanish by parity.
    """
    if not 0 <= max_order <= 3:
        raise ValueError(f"max_order must be in 0..3, got {max_order}")
    c, w = gauss_nodes(closure, points_per_axis)
    weight = closure.mass * closure.number_density
    rho = weight * float(w.sum())
    first = second = third = None
    if max_order >= 1:
        first = weight * np.einsum("q,qk->k", w, c)
    if max_order >= 2:
        second = weight * np.einsum("q,qk,ql->kl", w, c, c)
    if max_order >= 3:
        third = weight * np.einsum("q,qk,ql,qn->kln", w, c, c, c)
    return MomentSet(rho=rho, first=first, second=second, third=third)


def third_order_flux(state: SpeciesState, m_i: float, alpha: float) -> np.ndarray:
    """Closed-form total flux of the momentum fluxes implied by the closure.

    Fully symmetric (3, 3, 3) tensor; every term carries a velocity factor,
    so it vanishes at rest.
    """
    u = state.u
    p = sym_to_matrix(state.press)
    conv = alpha**3 * state.rho * np.einsum("k,l,n->kln", u, u, u)
    upp = np.einsum("k,ln->kln", u, p)
    return conv + alpha * (upp + upp.transpose(2, 0, 1) + upp.transpose(1, 2, 0))
