"""Two-level amplification matrix and its spectrum.

With u = E a + lift at the collocation points and u_xx = H^T a, the
homogeneous discrete second-derivative operator is L = H^T E^{-1}.  The
implicit step (I - dt^2 L) u^{n+1} = 2 u^n - u^{n-1} is written as a one-step
map on (u^n, u^{n-1}) with the block matrix

    B = [[2 K, -K], [I, 0]],   K = (I - dt^2 L)^{-1}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularMatrixError
from .haar import HaarBasis, build_basis
from .numerics import eigenvalues, lu_factor, lu_solve

DEFAULT_TOL = 1e-8


def collocation_shape_matrix(basis: HaarBasis):
    """E[l, i] = P2_i(x_l) - 2 x_l C2_i."""
    return basis.P2.T - 2.0 * np.outer(basis.points, basis.C2)


def operator_matrix(basis: HaarBasis):
    """L = H^T E^{-1}, solved as E^T L^T = H."""
    E = collocation_shape_matrix(basis)
    fac = lu_factor(E.T)
    if fac.singular:
        raise SingularMatrixError(
            f"shape matrix E is singular for J={basis.J} (pivot {fac.singular_index})",
            fac.singular_index,
        )
    return lu_solve(fac, basis.H).T


def amplification_matrix(basis: HaarBasis, dt: float, operator=None):
    if dt < 0:
        raise ValueError(f"time step must be non-negative, got {dt}")
    L = operator_matrix(basis) if operator is None else operator
    size = basis.size
    eye = np.eye(size)
    fac = lu_factor(eye - dt * dt * L)
    if fac.singular:
        raise SingularMatrixError(
            f"I - dt^2 L is singular for J={basis.J}, dt={dt} (pivot {fac.singular_index})",
            fac.singular_index,
        )
    K = lu_solve(fac, eye)
    return np.block([[2.0 * K, -K], [eye, np.zeros((size, size))]])


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    J: int
    dt: float
    eigenvalues: np.ndarray
    spectral_radius: float
    stable: bool
    tolerance: float


def stability_report(J: int, dt: float, tol: float = DEFAULT_TOL, basis: HaarBasis = None):
    if tol < 0:
        raise ValueError(f"tolerance must be non-negative, got {tol}")
    basis = basis if basis is not None else build_basis(J)
    B = amplification_matrix(basis, dt)
    values = eigenvalues(B)
    order = np.lexsort((values.imag, values.real))
    values = values[order]
    radius = float(np.max(np.abs(values)))
    return SpectrumReport(J, float(dt), values, radius, radius <= 1.0 + tol, tol)
