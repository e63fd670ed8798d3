"""Haar collocation in space, second-order differences in time.

The second spatial derivative is expanded in Haar wavelets,
u_xx(x, t) = sum_i a_i h_i(x).  Integrating twice and eliminating the two
integration constants with the Dirichlet datum h and the integral datum nu
gives

    u(x, t) = sum_i a_i (P2_i(x) - 2 x C2_i) + 2 x (nu(t) - h(t)) + h(t),

so every coefficient vector satisfies both side conditions exactly.  Each
time level then needs one dense solve for ``a`` at the collocation points.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import IncompatibleDataError, SingularMatrixError, SolverError
from .haar import DEFAULT_QUAD_N, HaarBasis, build_basis, integral_matrix
from .numerics import LuFactorization, lu_factor, lu_solve
from .problem import ProblemSpec, check_compatibility

log = logging.getLogger(__name__)

GRID_TOL = 1e-10
REPORT_X = np.round(np.linspace(0.0, 1.0, 11), 12)


@dataclass(frozen=True, eq=False)
class SchemeMatrices:
    """Collocation matrices; ``[l, i]`` is collocation point l, wavelet i."""

    basis: HaarBasis
    dt: float
    E: np.ndarray
    A_main: np.ndarray
    A_start: np.ndarray
    lu_main: LuFactorization
    lu_start: LuFactorization


@dataclass
class SolverState:
    n: int
    t: float
    u_prev: Optional[np.ndarray]
    u_curr: np.ndarray
    a_curr: Optional[np.ndarray]
    rhs: Optional[np.ndarray] = None  # right-hand side of the last solve


@dataclass
class Snapshot:
    n: int
    t: float
    u: np.ndarray  # values at the collocation points
    a: np.ndarray
    x_report: np.ndarray  # 0, 0.1, ..., 1.0
    u_report: np.ndarray
    exact: Optional[np.ndarray] = None
    error: Optional[np.ndarray] = None
    exact_report: Optional[np.ndarray] = None
    error_report: Optional[np.ndarray] = None


@dataclass
class SolutionRecord:
    problem: str
    J: int
    dt: float
    T: float
    n_steps: int
    snapshots: list = field(default_factory=list)
    spec: Optional[ProblemSpec] = None
    basis: Optional[HaarBasis] = None

    def snapshot_at(self, t: float) -> Snapshot:
        for snap in self.snapshots:
            if abs(snap.t - t) <= GRID_TOL * max(1.0, abs(t)):
                return snap
        raise KeyError(f"no snapshot at t={t}")

    @property
    def has_exact(self) -> bool:
        return bool(self.snapshots) and self.snapshots[0].exact is not None


def boundary_lift(spec: ProblemSpec, t: float, xs):
    """2 x (nu(t) - h(t)) + h(t) at each x."""
    xs = np.asarray(xs, dtype=float)
    h = spec.h(t=t)
    return 2.0 * xs * (spec.nu(t=t) - h) + h


def assemble(basis: HaarBasis, dt: float) -> SchemeMatrices:
    if not dt > 0:
        raise ValueError(f"time step must be positive, got {dt}")
    x = basis.points
    E = basis.P2.T - 2.0 * np.outer(x, basis.C2)
    hcols = basis.H.T
    A_main = E - dt * dt * hcols
    A_start = E - 0.5 * dt * dt * hcols
    lu_main = lu_factor(A_main)
    lu_start = lu_factor(A_start)
    for label, fac in (("main", lu_main), ("startup", lu_start)):
        if fac.singular:
            raise SingularMatrixError(
                f"{label} system matrix is singular for J={basis.J}, dt={dt} "
                f"(pivot {fac.singular_index})",
                fac.singular_index,
            )
    return SchemeMatrices(basis, float(dt), E, A_main, A_start, lu_main, lu_start)


def initial_state(spec: ProblemSpec, basis: HaarBasis) -> SolverState:
    u0 = np.asarray(spec.f(x=basis.points), dtype=float)
    return SolverState(n=0, t=0.0, u_prev=None, u_curr=u0, a_curr=None)


def _finish(mats, state, a, rhs, n_new, t_new, spec):
    if not np.all(np.isfinite(a)):
        raise SolverError(f"non-finite coefficients at step {n_new} (t={t_new:g})", n_new)
    u_new = mats.E @ a + boundary_lift(spec, t_new, mats.basis.points)
    if not np.all(np.isfinite(u_new)):
        raise SolverError(f"non-finite solution at step {n_new} (t={t_new:g})", n_new)
    return SolverState(n=n_new, t=t_new, u_prev=state.u_curr, u_curr=u_new, a_curr=a, rhs=rhs)


def startup_step(spec: ProblemSpec, mats: SchemeMatrices, state: SolverState) -> SolverState:
    """First level: the ghost value u(t_-1) = u(t_1) - 2 dt g is eliminated."""
    if state.n != 0:
        raise SolverError(f"startup step needs the initial state, got n={state.n}", state.n)
    dt = mats.dt
    x = mats.basis.points
    t1 = dt
    rhs = (
        state.u_curr
        + dt * spec.g(x=x)
        + 0.5 * dt * dt * spec.phi(x=x, t=0.0)
        - boundary_lift(spec, t1, x)
    )
    a = lu_solve(mats.lu_start, rhs)
    return _finish(mats, state, a, rhs, 1, t1, spec)


def time_step(spec: ProblemSpec, mats: SchemeMatrices, state: SolverState) -> SolverState:
    """Advance from level n to n + 1; the source is taken at t_n."""
    if state.n < 1 or state.u_prev is None:
        raise SolverError("time_step needs two previous levels; run startup_step first", state.n)
    dt = mats.dt
    x = mats.basis.points
    n_new = state.n + 1
    t_new = n_new * dt
    rhs = (
        dt * dt * spec.phi(x=x, t=state.n * dt)
        + 2.0 * state.u_curr
        - state.u_prev
        - boundary_lift(spec, t_new, x)
    )
    a = lu_solve(mats.lu_main, rhs)
    return _finish(mats, state, a, rhs, n_new, t_new, spec)


def reconstruct(basis: HaarBasis, a, xs, lift=None, spec: ProblemSpec = None, t: float = None):
    """Evaluate the wavelet representation at arbitrary ``xs`` in [0, 1].

    The affine part is either passed in ``lift`` (array matching ``xs``) or
    computed from ``spec`` at time ``t``.
    """
    a = np.asarray(a, dtype=float)
    if a.shape != (basis.size,):
        raise ValueError(f"coefficient vector must have length {basis.size}, got {a.shape}")
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    if lift is None:
        if spec is None or t is None:
            raise ValueError("pass either lift or both spec and t")
        lift = boundary_lift(spec, t, xs)
    shape_fns = integral_matrix(2, basis.J, xs) - 2.0 * np.outer(basis.C2, xs)
    return a @ shape_fns + np.asarray(lift, dtype=float)


def right_endpoint(basis: HaarBasis, a, spec: ProblemSpec, t: float) -> float:
    """u(1, t) = sum_i a_i (C1_i - 2 C2_i) + 2 nu(t) - h(t)."""
    a = np.asarray(a, dtype=float)
    return float(a @ (basis.C1 - 2.0 * basis.C2) + 2.0 * spec.nu(t=t) - spec.h(t=t))


def step_count(T: float, dt: float) -> int:
    if not dt > 0:
        raise ValueError(f"time step must be positive, got {dt}")
    if not T > 0:
        raise ValueError(f"final time must be positive, got {T}")
    ratio = T / dt
    N = round(ratio)
    if abs(ratio - N) > GRID_TOL * max(1.0, ratio):
        raise ValueError(f"T/dt = {ratio!r} is not an integer (T={T}, dt={dt})")
    if N < 2:
        raise ValueError(f"need at least two time steps, got T/dt = {N}")
    return int(N)


def snapshot_indices(times, dt: float, N: int) -> dict:
    """Map each requested time to its grid index; rejects off-grid times."""
    out = {}
    for t in times:
        n = round(t / dt)
        if abs(t - n * dt) > GRID_TOL or not 0 <= n <= N:
            raise ValueError(f"snapshot time {t} is not on the time grid (dt={dt}, T={N * dt})")
        out.setdefault(int(n), float(t))
    return out


def _snapshot(spec, mats, state, basis, lu_E=None):
    x = basis.points
    a = state.a_curr
    if a is None:  # t = 0: project the initial data onto the representation
        a = lu_solve(lu_E, state.u_curr - boundary_lift(spec, state.t, x))
    u_report = reconstruct(basis, a, REPORT_X, spec=spec, t=state.t)
    snap = Snapshot(
        n=state.n,
        t=state.t,
        u=state.u_curr.copy(),
        a=np.array(a, copy=True),
        x_report=REPORT_X.copy(),
        u_report=u_report,
    )
    if spec.exact is not None:
        snap.exact = spec.exact(x=x, t=state.t)
        snap.error = np.abs(snap.u - snap.exact)
        snap.exact_report = spec.exact(x=REPORT_X, t=state.t)
        snap.error_report = np.abs(u_report - snap.exact_report)
    return snap


def solve(
    spec: ProblemSpec,
    J: int,
    dt: float,
    T: float,
    snapshot_times=None,
    *,
    strict: bool = False,
    basis: HaarBasis = None,
    compat_tol: float = 1e-10,
    quad_n: int = DEFAULT_QUAD_N,
) -> SolutionRecord:
    """Run the full scheme to time ``T`` and record the requested snapshots.

    Compatibility of the initial data is checked first; a violation is a
    warning, or :class:`IncompatibleDataError` when ``strict``.
    """
    N = step_count(T, dt)
    wanted = snapshot_indices([T] if snapshot_times is None else snapshot_times, dt, N)

    report = check_compatibility(spec, compat_tol, quad_n)
    if not report.ok:
        bad = ", ".join(
            f"{lbl}={r:.3e}" for lbl, r, ok in zip(report.labels, report.residuals, report.passed) if not ok
        )
        msg = f"problem {spec.name!r} violates compatibility conditions: {bad}"
        if strict:
            raise IncompatibleDataError(msg)
        warnings.warn(msg, stacklevel=2)

    basis = basis if basis is not None else build_basis(J)
    if basis.J != J:
        raise ValueError(f"basis has J={basis.J}, expected {J}")
    mats = assemble(basis, dt)
    record = SolutionRecord(spec.name, J, float(dt), float(T), N, spec=spec, basis=basis)

    state = initial_state(spec, basis)
    if 0 in wanted:
        lu_E = lu_factor(mats.E)
        record.snapshots.append(_snapshot(spec, mats, state, basis, lu_E))
    state = startup_step(spec, mats, state)
    if 1 in wanted:
        record.snapshots.append(_snapshot(spec, mats, state, basis))
    for _ in range(N - 1):
        state = time_step(spec, mats, state)
        if state.n in wanted:
            record.snapshots.append(_snapshot(spec, mats, state, basis))
    log.debug("solved %s: J=%d dt=%g N=%d", spec.name, J, dt, N)
    return record

