"""Haar wavelets, their repeated integrals and the collocation matrices.

Wavelets are numbered ``i = 1 .. 2M`` with ``M = 2**J``; ``i = 1`` is the
scaling function and ``i = 2**j + k + 1`` is the wavelet at level ``j`` and
translation ``k``.  Arrays returned here are 0-based, so wavelet ``i`` sits
at index ``i - 1``.  Matrices use the row = wavelet, column = collocation
point layout, i.e. ``H[i - 1, l - 1] = h_i(x_l)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ResourceLimitError

MAX_LEVEL = 10
DEFAULT_QUAD_N = 4096


def basis_index(j: int, k: int) -> int:
    """Wavelet number of level ``j``, translation ``k``."""
    if j < 0:
        raise ValueError(f"level must be non-negative, got {j}")
    if not 0 <= k < 2**j:
        raise ValueError(f"translation k={k} out of range for level j={j}")
    return 2**j + k + 1


def wavelet_position(i: int):
    """Inverse of :func:`basis_index`: ``(j, k)``, or ``None`` for the scaling function."""
    if i < 1:
        raise ValueError(f"wavelet number must be >= 1, got {i}")
    if i == 1:
        return None
    j = (i - 1).bit_length() - 1
    return j, i - 1 - 2**j


def _support(i):
    """Breakpoints (left, middle, right) of wavelet ``i >= 2``."""
    j, k = wavelet_position(i)
    m = 2**j
    return k / m, (k + 0.5) / m, (k + 1) / m


def haar_eval(i: int, x):
    """h_i(x) with half-open branches ``[a, b)``; vectorized over ``x``."""
    x = np.asarray(x, dtype=float)
    if i == 1:
        out = np.where((x >= 0.0) & (x < 1.0), 1.0, 0.0)
    else:
        a, b, c = _support(i)
        out = np.where((x >= a) & (x < b), 1.0, 0.0) - np.where((x >= b) & (x < c), 1.0, 0.0)
    return float(out) if out.ndim == 0 else out


def integral_p(beta: int, i: int, x):
    """``beta``-fold integral of h_i from 0 to x, in closed form."""
    if beta < 1:
        raise ValueError(f"integration order must be >= 1, got {beta}")
    x = np.asarray(x, dtype=float)
    scale = 1.0 / math.factorial(beta)
    if i == 1:
        out = np.where(x >= 0.0, x, 0.0) ** beta * scale
    else:
        a, b, c = _support(i)
        out = np.where(x >= a, x - a, 0.0) ** beta
        out = out - 2.0 * np.where(x >= b, x - b, 0.0) ** beta
        out = out + np.where(x >= c, x - c, 0.0) ** beta
        out = out * scale
    return float(out) if out.ndim == 0 else out


def c_vectors(J: int):
    """``(C1, C2)`` where ``C_beta[i-1] = integral of P_{beta,i} over [0, 1]``."""
    size = 2 ** (J + 1)
    c1 = np.empty(size)
    c2 = np.empty(size)
    c1[0] = 0.5
    c2[0] = 1.0 / 6.0
    for i in range(2, size + 1):
        j, k = wavelet_position(i)
        m = 2**j
        c1[i - 1] = 1.0 / (4.0 * m * m)
        c2[i - 1] = (2 * m - 2 * k - 1) / (8.0 * m**3)
    return c1, c2


def collocation_points(J: int):
    size = 2 ** (J + 1)
    return (np.arange(1, size + 1) - 0.5) / size


def grid_points(J: int):
    size = 2 ** (J + 1)
    return np.arange(size + 1) / size


def haar_matrix(J: int, xs):
    """``out[i-1, p] = h_i(xs[p])`` for all wavelets of level <= J."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    return np.array([haar_eval(i, xs) for i in range(1, 2 ** (J + 1) + 1)]).reshape(-1, xs.size)


def integral_matrix(beta: int, J: int, xs):
    """``out[i-1, p] = P_{beta,i}(xs[p])``."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    return np.array(
        [integral_p(beta, i, xs) for i in range(1, 2 ** (J + 1) + 1)]
    ).reshape(-1, xs.size)


def _frozen(a):
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class HaarBasis:
    J: int
    grid: np.ndarray
    points: np.ndarray
    H: np.ndarray
    P1: np.ndarray
    P2: np.ndarray
    C1: np.ndarray
    C2: np.ndarray

    @property
    def M(self) -> int:
        return 2**self.J

    @property
    def size(self) -> int:
        return 2 ** (self.J + 1)

    def __repr__(self):
        return f"HaarBasis(J={self.J}, size={self.size})"


def build_basis(J: int) -> HaarBasis:
    if not isinstance(J, (int, np.integer)) or J < 0:
        raise ValueError(f"resolution level must be a non-negative integer, got {J!r}")
    if J > MAX_LEVEL:
        raise ResourceLimitError(
            f"J={J} needs {2 ** (J + 1)}x{2 ** (J + 1)} dense matrices; "
            f"the supported maximum is J={MAX_LEVEL}"
        )
    J = int(J)
    xs = collocation_points(J)
    c1, c2 = c_vectors(J)
    try:
        return HaarBasis(
            J=J,
            grid=_frozen(grid_points(J)),
            points=_frozen(xs),
            H=_frozen(haar_matrix(J, xs)),
            P1=_frozen(integral_matrix(1, J, xs)),
            P2=_frozen(integral_matrix(2, J, xs)),
            C1=_frozen(c1),
            C2=_frozen(c2),
        )
    except MemoryError as exc:
        raise ResourceLimitError(f"out of memory building basis for J={J}") from exc


def simpson_weights(n: int, width: float):
    """Composite Simpson weights for ``n`` (even) equal subintervals of ``width``."""
    if n < 2 or n % 2:
        raise ValueError(f"Simpson needs an even number of subintervals >= 2, got {n}")
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (width / n / 3.0)


def forward_coefficients(u, J: int, n: int = DEFAULT_QUAD_N):
    """Haar coefficients of ``u``: ``a_1 = int u`` and ``a_i = 2**j int u h_i``.

    Integrals are taken cell by cell over the finest dyadic cells of width
    1/(2M), so every wavelet breakpoint is a quadrature node; ``n`` is the
    total number of Simpson subintervals.  ``u`` must accept a numpy array.
    """
    size = 2 ** (J + 1)
    per_cell = max(2, -(-n // size))
    per_cell += per_cell % 2
    edges = np.arange(size + 1) / size
    xs = edges[:-1, None] + np.arange(per_cell + 1)[None, :] / (per_cell * size)
    # one-sided limits at cell edges, so jumps at breakpoints integrate exactly
    xs[:, 0] = np.nextafter(edges[:-1], edges[1:])
    xs[:, -1] = np.nextafter(edges[1:], edges[:-1])
    values = np.asarray(u(xs.ravel()), dtype=float)
    if values.shape != (xs.size,):
        values = np.broadcast_to(values, (xs.size,))
    w = simpson_weights(per_cell, 1.0 / size)
    cells = values.reshape(xs.shape) @ w

    a = np.empty(size)
    a[0] = cells.sum()
    for i in range(2, size + 1):
        j, k = wavelet_position(i)
        span = size // 2**j  # cells under the support
        lo = k * span
        half = span // 2
        a[i - 1] = 2**j * (cells[lo:lo + half].sum() - cells[lo + half:lo + span].sum())
    return a
