"""Dense LU factorization and nonsymmetric eigenvalues.

Matrices are plain 2-D float numpy arrays.  The LU routines use partial
pivoting; eigenvalues come from balancing, Householder reduction to upper
Hessenberg form and the implicit double-shift (Francis) QR iteration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .errors import ConvergenceError, LinearAlgebraError, SingularMatrixError

PIVOT_RTOL = 1e-13
MAX_QR_ITERATIONS = 60  # per eigenvalue (or pair)


def as_matrix(A, square=True):
    """Validate ``A`` as a finite 2-D float array (copy)."""
    A = np.array(A, dtype=float)
    if A.ndim != 2 or A.size == 0:
        raise LinearAlgebraError(f"expected a non-empty 2-D matrix, got shape {A.shape}")
    if square and A.shape[0] != A.shape[1]:
        raise LinearAlgebraError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise LinearAlgebraError("matrix has non-finite entries")
    return A


@dataclass(frozen=True, eq=False)
class LuFactorization:
    """``P A = L U`` packed LAPACK-style.

    ``lu`` holds U on and above the diagonal and the unit-lower L below it;
    ``perm[r]`` is the original row now stored in row ``r``.
    """

    lu: np.ndarray
    perm: np.ndarray
    singular: bool
    singular_index: int | None = None

    @property
    def n(self) -> int:
        return self.lu.shape[0]


def lu_factor(A) -> LuFactorization:
    """Gaussian elimination with partial pivoting.

    A pivot smaller than ``1e-13 * max|A|`` marks the factorization singular
    (``singular_index`` gives the first such column); elimination then stops.
    """
    a = as_matrix(A)
    n = a.shape[0]
    perm = np.arange(n)
    threshold = PIVOT_RTOL * np.max(np.abs(a))
    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if abs(a[p, k]) <= threshold or a[p, k] == 0.0:
            return LuFactorization(a, perm, True, k)
        if p != k:
            a[[k, p]] = a[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        a[k + 1:, k] /= a[k, k]
        a[k + 1:, k + 1:] -= np.outer(a[k + 1:, k], a[k, k + 1:])
    return LuFactorization(a, perm, False)


def lu_solve(fac: LuFactorization, rhs):
    """Solve ``A x = rhs`` for a vector or a matrix of right-hand sides."""
    if fac.singular:
        raise SingularMatrixError(
            f"matrix is singular to working precision (pivot {fac.singular_index})",
            fac.singular_index,
        )
    b = np.asarray(rhs, dtype=float)
    if b.shape[0] != fac.n or b.ndim not in (1, 2):
        raise LinearAlgebraError(
            f"right-hand side shape {b.shape} does not match a {fac.n}x{fac.n} system"
        )
    y = solve_triangular(fac.lu, b[fac.perm], lower=True, unit_diagonal=True, check_finite=False)
    return solve_triangular(fac.lu, y, lower=False, check_finite=False)


def lu_det(fac: LuFactorization) -> float:
    if fac.singular:
        return 0.0
    parity = _permutation_parity(fac.perm)
    return parity * float(np.prod(np.diag(fac.lu)))


def _permutation_parity(perm):
    seen = np.zeros(len(perm), dtype=bool)
    sign = 1
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def solve(A, rhs):
    return lu_solve(lu_factor(A), rhs)


def inverse(A):
    fac = lu_factor(A)
    return lu_solve(fac, np.eye(fac.n))


# --- eigenvalues ------------------------------------------------------------


def balance(a):
    """Diagonal similarity scaling by powers of 2 to even out row/column norms (in place)."""
    radix = 2.0
    sqrdx = radix * radix
    n = a.shape[0]
    done = False
    while not done:
        done = True
        for i in range(n):
            c = np.sum(np.abs(a[:, i])) - abs(a[i, i])
            r = np.sum(np.abs(a[i, :])) - abs(a[i, i])
            if c == 0.0 or r == 0.0:
                continue
            g = r / radix
            f = 1.0
            s = c + r
            while c < g:
                f *= radix
                c *= sqrdx
            g = r * radix
            while c > g:
                f /= radix
                c /= sqrdx
            if (c + r) / f < 0.95 * s:
                done = False
                a[i, :] /= f
                a[:, i] *= f
    return a


def hessenberg(a):
    """Reduce to upper Hessenberg form by Householder similarity transforms (in place)."""
    n = a.shape[0]
    for k in range(n - 2):
        x = a[k + 1:, k].copy()
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        if x[0] > 0:
            alpha = -alpha
        v = x
        v[0] -= alpha
        vnorm2 = v @ v
        if vnorm2 == 0.0:
            continue
        beta = 2.0 / vnorm2
        a[k + 1:, k:] -= beta * np.outer(v, v @ a[k + 1:, k:])
        a[:, k + 1:] -= beta * np.outer(a[:, k + 1:] @ v, v)
        a[k + 2:, k] = 0.0
        a[k + 1, k] = alpha
    return a


def hessenberg_eigenvalues(a):
    """Eigenvalues of an upper Hessenberg matrix by Francis double-shift QR.

    Works on the active block only (no Schur vectors).  ``a`` is destroyed.
    """
    n = a.shape[0]
    wr = np.zeros(n)
    wi = np.zeros(n)
    anorm = np.sum(np.abs(np.triu(a, -1)))
    nn = n - 1
    t = 0.0
    total_its = 0
    while nn >= 0:
        its = 0
        while True:
            # look for a negligible subdiagonal element
            l = nn
            while l >= 1:
                s = abs(a[l - 1, l - 1]) + abs(a[l, l])
                if s == 0.0:
                    s = anorm
                if abs(a[l, l - 1]) + s == s:
                    a[l, l - 1] = 0.0
                    break
                l -= 1
            x = a[nn, nn]
            if l == nn:
                wr[nn] = x + t
                wi[nn] = 0.0
                nn -= 1
                break
            y = a[nn - 1, nn - 1]
            w = a[nn, nn - 1] * a[nn - 1, nn]
            if l == nn - 1:
                p = 0.5 * (y - x)
                q = p * p + w
                z = np.sqrt(abs(q))
                x += t
                if q >= 0.0:
                    z = p + (z if p >= 0 else -z)
                    wr[nn - 1] = wr[nn] = x + z
                    if z != 0.0:
                        wr[nn] = x - w / z
                    wi[nn - 1] = wi[nn] = 0.0
                else:
                    wr[nn - 1] = wr[nn] = x + p
                    wi[nn - 1] = -z
                    wi[nn] = z
                nn -= 2
                break

            if its == MAX_QR_ITERATIONS:
                raise ConvergenceError(
                    f"QR iteration did not converge for eigenvalue {nn} after {its} "
                    f"iterations ({total_its} in total)",
                    total_its,
                )
            if its in (10, 20, 30, 40, 50):
                # exceptional shift
                t += x
                idx = np.arange(nn + 1)
                a[idx, idx] -= x
                s = abs(a[nn, nn - 1]) + abs(a[nn - 1, nn - 2])
                x = y = 0.75 * s
                w = -0.4375 * s * s
            its += 1
            total_its += 1

            # two consecutive small subdiagonals
            m = nn - 2
            while m >= l:
                z = a[m, m]
                r = x - z
                s = y - z
                p = (r * s - w) / a[m + 1, m] + a[m, m + 1]
                q = a[m + 1, m + 1] - z - r - s
                r = a[m + 2, m + 1]
                s = abs(p) + abs(q) + abs(r)
                p /= s
                q /= s
                r /= s
                if m == l:
                    break
                u = abs(a[m, m - 1]) * (abs(q) + abs(r))
                v = abs(p) * (abs(a[m - 1, m - 1]) + abs(z) + abs(a[m + 1, m + 1]))
                if u + v == v:
                    break
                m -= 1
            for i in range(m + 2, nn + 1):
                a[i, i - 2] = 0.0
                if i != m + 2:
                    a[i, i - 3] = 0.0

            # double-shift QR step on rows/columns l..nn
            for k in range(m, nn):
                if k != m:
                    p = a[k, k - 1]
                    q = a[k + 1, k - 1]
                    r = a[k + 2, k - 1] if k != nn - 1 else 0.0
                    x = abs(p) + abs(q) + abs(r)
                    if x != 0.0:
                        p /= x
                        q /= x
                        r /= x
                s = np.sqrt(p * p + q * q + r * r)
                if p < 0:
                    s = -s
                if s == 0.0:
                    continue
                if k == m:
                    if l != m:
                        a[k, k - 1] = -a[k, k - 1]
                else:
                    a[k, k - 1] = -s * x
                p += s
                x = p / s
                y = q / s
                z = r / s
                q /= p
                r /= p
                last = k != nn - 1
                rows = a[k, k:nn + 1] + q * a[k + 1, k:nn + 1]
                if last:
                    rows = rows + r * a[k + 2, k:nn + 1]
                    a[k + 2, k:nn + 1] -= rows * z
                a[k + 1, k:nn + 1] -= rows * y
                a[k, k:nn + 1] -= rows * x
                mmin = min(nn, k + 3)
                cols = x * a[l:mmin + 1, k] + y * a[l:mmin + 1, k + 1]
                if last:
                    cols = cols + z * a[l:mmin + 1, k + 2]
                    a[l:mmin + 1, k + 2] -= cols * r
                a[l:mmin + 1, k + 1] -= cols * q
                a[l:mmin + 1, k] -= cols
    return wr + 1j * wi


def eigenvalues(A) -> np.ndarray:
    """All eigenvalues of a real square matrix, with multiplicity, as complex numbers.

    Order follows deflation (roughly bottom-up); callers that need a stable
    order should sort.
    """
    a = as_matrix(A)
    n = a.shape[0]
    if n == 1:
        return np.array([complex(a[0, 0])])
    balance(a)
    hessenberg(a)
    return hessenberg_eigenvalues(a)


def spectral_radius(values) -> float:
    return float(np.max(np.abs(values)))
