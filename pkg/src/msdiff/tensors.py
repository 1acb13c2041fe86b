"""Symmetric 3x3 tensors stored as six independent components.

Component order is (11, 22, 33, 12, 13, 23); symmetry is guaranteed by
construction instead of being asserted on a full 3x3 array.  All helpers
broadcast over leading axes, so a field of tensors with shape (..., 6)
works the same as a single one.
"""

from __future__ import annotations

import numpy as np

from .errors import NonSymmetricInput

#: (row, col) index of each stored component.
SYM_COMPONENTS = ((0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2))

#: names used in CSV output, matching SYM_COMPONENTS.
SYM_NAMES = ("p11", "p22", "p33", "p12", "p13", "p23")

#: SYM_INDEX[k][l] -> position of component (k, l) in the 6-vector.
SYM_INDEX = ((0, 3, 4), (3, 1, 5), (4, 5, 2))


def sym_to_matrix(s: np.ndarray) -> np.ndarray:
    """Expand components (..., 6) into full matrices (..., 3, 3)."""
    s = np.asarray(s, dtype=float)
    out = np.empty(s.shape[:-1] + (3, 3), dtype=float)
    for pos, (k, l) in enumerate(SYM_COMPONENTS):
        out[..., k, l] = s[..., pos]
        out[..., l, k] = s[..., pos]
    return out


def matrix_to_sym(m: np.ndarray, rtol: float = 1e-12) -> np.ndarray:
    """Collapse symmetric matrices (..., 3, 3) into components (..., 6).

    Raises NonSymmetricInput when any off-diagonal pair differs by more
    than ``rtol`` times the largest entry.
    """
    m = np.asarray(m, dtype=float)
    if m.shape[-2:] != (3, 3):
        raise NonSymmetricInput(f"expected (..., 3, 3) array, got {m.shape}")
    scale = np.max(np.abs(m))
    skew = np.max(np.abs(m - np.swapaxes(m, -1, -2)))
    if skew > rtol * max(scale, 1.0):
        raise NonSymmetricInput(f"matrix asymmetry {skew:.3e} exceeds tolerance")
    out = np.empty(m.shape[:-2] + (6,), dtype=float)
    for pos, (k, l) in enumerate(SYM_COMPONENTS):
        out[..., pos] = m[..., k, l]
    return out


def sym_trace(s: np.ndarray) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    return s[..., 0] + s[..., 1] + s[..., 2]


def sym_identity(scale: np.ndarray | float = 1.0) -> np.ndarray:
    """Isotropic tensor scale * I as components (..., 6)."""
    scale = np.asarray(scale, dtype=float)
    out = np.zeros(scale.shape + (6,), dtype=float)
    out[..., :3] = scale[..., None]
    return out


def sym_deviator(s: np.ndarray) -> np.ndarray:
    """Traceless part: s minus a third of its trace on the diagonal."""
    s = np.asarray(s, dtype=float)
    out = s.copy()
    mean = sym_trace(s) / 3.0
    out[..., :3] -= mean[..., None]
    return out


def outer_sym(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Symmetrized outer product (a b^T + b a^T) / 2 as components.

    Vectors have shape (..., 3); the result has shape (..., 6).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    out = np.empty(np.broadcast_shapes(a.shape, b.shape)[:-1] + (6,), dtype=float)
    for pos, (k, l) in enumerate(SYM_COMPONENTS):
        out[..., pos] = 0.5 * (a[..., k] * b[..., l] + a[..., l] * b[..., k])
    return out
