"""Floating-point mirror of the exact layer.

Numeric matrices are plain complex ``numpy`` arrays; the helpers here add the
contract checks (Hermiticity, anti-Hermiticity, finiteness) the rest of the
package relies on.
"""
from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import ContractError, ShapeError
from .exact import ExactMatrix, ExactScalar

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-12
RECONSTRUCTION_TOL = 1e-10

NumericMatrix = np.ndarray


def as_numeric(a) -> np.ndarray:
    """Return ``a`` as a finite complex 2-D array."""
    if isinstance(a, ExactMatrix):
        return a.to_numpy()
    arr = np.asarray(a, dtype=complex)
    if arr.ndim != 2:
        raise ShapeError(f"expected a matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ContractError("matrix has non-finite entries")
    return arr


def to_numeric(a):
    """Nearest-double conversion of an exact matrix (or scalar)."""
    if isinstance(a, ExactMatrix):
        return a.to_numpy()
    if isinstance(a, ExactScalar):
        c = complex(a)
        return c.real if a.im == 0 else c
    raise TypeError(f"cannot convert {type(a).__name__}")


def max_abs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def hermiticity_defect(a) -> float:
    a = as_numeric(a)
    return max_abs(a - a.conj().T)


def unitarity_defect(u) -> float:
    u = as_numeric(u)
    return max_abs(u.conj().T @ u - np.eye(u.shape[0]))


def _pivot(v: np.ndarray, tol: float = 1e-8) -> int:
    idx = np.flatnonzero(np.abs(v) > tol)
    return int(idx[0]) if idx.size else 0


def eigh(a, tol: float = HERMITIAN_TOL):
    """Eigen-decomposition of a Hermitian matrix.

    Eigenvalues ascend; inside a degenerate cluster vectors are ordered by the
    index of their first non-negligible component and phased so that entry is
    real positive, which makes the output reproducible run to run.
    """
    a = as_numeric(a)
    if a.shape[0] != a.shape[1]:
        raise ShapeError("eigh needs a square matrix")
    defect = max_abs(a - a.conj().T)
    if defect > tol:
        raise ContractError(f"matrix is not Hermitian (defect {defect:.3e})")
    w, v = np.linalg.eigh(0.5 * (a + a.conj().T))
    pivots = [_pivot(v[:, i]) for i in range(len(w))]
    cluster = np.round(w / max(1.0, max_abs(w)) * 1e9)
    order = sorted(range(len(w)), key=lambda i: (cluster[i], pivots[i], i))
    w = w[order]
    v = v[:, order]
    for i in range(v.shape[1]):
        p = v[_pivot(v[:, i]), i]
        if p != 0:
            v[:, i] *= abs(p) / p
    return w, v


def expm_antihermitian(a, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """``exp(A)`` for anti-Hermitian ``A`` (scaling and squaring)."""
    a = as_numeric(a)
    defect = max_abs(a + a.conj().T)
    if defect > tol:
        raise ContractError(f"exponent is not anti-Hermitian (defect {defect:.3e})")
    return scipy.linalg.expm(0.5 * (a - a.conj().T))
