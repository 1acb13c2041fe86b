"""1-D grid of mixture states.

Fields are stored species-major with the cell axis last: densities (S, N),
velocities (S, 3, N), pressure-tensor components (S, 6, N).  Instances are
treated as immutable; the integrator returns new grids.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .mixture import SpeciesState

BOUNDARY_CONDITIONS = ("periodic", "zero-flux")


@dataclass
class GridField:
    rho: np.ndarray    # (S, N)
    u: np.ndarray      # (S, 3, N)
    press: np.ndarray  # (S, 6, N)
    dx: float
    bc: str = "periodic"

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=float)
        self.u = np.asarray(self.u, dtype=float)
        self.press = np.asarray(self.press, dtype=float)
        s, n = self.rho.shape
        if self.u.shape != (s, 3, n) or self.press.shape != (s, 6, n):
            raise ValidationError(
                f"inconsistent field shapes: rho {self.rho.shape}, "
                f"u {self.u.shape}, press {self.press.shape}"
            )
        if n < 4:
            raise ValidationError(f"need at least 4 cells, got {n}")
        if not self.dx > 0.0:
            raise ValidationError(f"dx = {self.dx} must be > 0")
        if self.bc not in BOUNDARY_CONDITIONS:
            raise ValidationError(f"unknown boundary condition {self.bc!r}")

    @property
    def n_species(self) -> int:
        return self.rho.shape[0]

    @property
    def n_cells(self) -> int:
        return self.rho.shape[1]

    @property
    def length(self) -> float:
        return self.n_cells * self.dx

    @property
    def x_centers(self) -> np.ndarray:
        return (np.arange(self.n_cells) + 0.5) * self.dx

    def cell_states(self, cell: int) -> list[SpeciesState]:
        """Per-species states of one cell."""
        return [
            SpeciesState(self.rho[i, cell], self.u[i, :, cell], self.press[i, :, cell])
            for i in range(self.n_species)
        ]

    def copy(self) -> "GridField":
        return GridField(self.rho.copy(), self.u.copy(), self.press.copy(),
                         self.dx, self.bc)

    @classmethod
    def from_cell_states(cls, cells: list[list[SpeciesState]], dx: float,
                         bc: str = "periodic") -> "GridField":
        n = len(cells)
        s = len(cells[0])
        rho = np.empty((s, n))
        u = np.empty((s, 3, n))
        press = np.empty((s, 6, n))
        for c, states in enumerate(cells):
            for i, st in enumerate(states):
                rho[i, c] = st.rho
                u[i, :, c] = st.u
                press[i, :, c] = st.press
        return cls(rho, u, press, dx, bc)
