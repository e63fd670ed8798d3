"""Error tables, refinement studies and the coefficient-decay check."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .haar import DEFAULT_QUAD_N, forward_coefficients, simpson_weights, wavelet_position
from .problem import ProblemSpec
from .solver import SolutionRecord, solve

DECAY_QUAD_TOL = 1e-9


@dataclass(frozen=True)
class ErrorRow:
    x: float
    exact: float
    approx: float
    error: float


@dataclass(frozen=True)
class ErrorTable:
    t: float
    rows: tuple
    max_error: float
    l2_error: float


def error_table(record: SolutionRecord, t: float) -> ErrorTable:
    """Pointwise errors on x = 0.1, ..., 1.0 at snapshot ``t``.

    ``l2_error`` is the Simpson estimate of the L2 norm on the 11 nodes
    0, 0.1, ..., 1.0 (the x = 0 node is exact up to round-off).
    """
    snap = record.snapshot_at(t)
    if snap.exact_report is None:
        raise ValueError(f"problem {record.problem!r} has no exact solution")
    err = np.asarray(snap.error_report, dtype=float)
    rows = tuple(
        ErrorRow(float(x), float(ex), float(ap), float(e))
        for x, ex, ap, e in zip(snap.x_report, snap.exact_report, snap.u_report, err)
        if x > 0.0
    )
    weights = simpson_weights(len(snap.x_report) - 1, 1.0)
    l2 = math.sqrt(float(weights @ err**2))
    return ErrorTable(snap.t, rows, max(r.error for r in rows), l2)


@dataclass(frozen=True)
class ConvergenceRow:
    param: float
    max_error: float
    l2_error: float
    order: float | None  # None on the first row


@dataclass(frozen=True)
class ConvergenceTable:
    mode: str  # "space" or "time"
    rows: tuple

    @property
    def orders(self):
        return [r.order for r in self.rows[1:]]


def observed_orders(errors):
    """log2 of successive error ratios; first entry None."""
    out = [None]
    for prev, cur in zip(errors, errors[1:]):
        out.append(math.log2(prev / cur) if prev > 0 and cur > 0 else math.nan)
    return out


def _final_errors(args):
    spec, J, dt, T = args
    record = solve(spec, J, dt, T)
    table = error_table(record, T)
    return table.max_error, table.l2_error


def _run(jobs, workers):
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_final_errors, jobs))
    return [_final_errors(job) for job in jobs]


def _table(mode, params, results):
    orders = observed_orders([r[0] for r in results])
    rows = tuple(
        ConvergenceRow(float(p), float(mx), float(l2), o)
        for p, (mx, l2), o in zip(params, results, orders)
    )
    return ConvergenceTable(mode, rows)


def spatial_convergence(spec: ProblemSpec, J_list, dt: float, T: float, workers: int = 1):
    """One solve per level in ``J_list`` at fixed ``dt``.

    ``dt`` has to be small enough that the time-discretization error stays
    well below the spatial error at the finest level.
    """
    J_list = [int(J) for J in J_list]
    if not J_list:
        raise ValueError("J_list is empty")
    results = _run([(spec, J, dt, T) for J in J_list], workers)
    return _table("space", J_list, results)


def temporal_convergence(spec: ProblemSpec, J: int, dt_list, T: float, workers: int = 1):
    dt_list = [float(dt) for dt in dt_list]
    if not dt_list:
        raise ValueError("dt_list is empty")
    results = _run([(spec, J, dt, T) for dt in dt_list], workers)
    return _table("time", dt_list, results)


@dataclass(frozen=True)
class DecayLevel:
    j: int
    max_abs_coefficient: float
    bound: float

    @property
    def ok(self) -> bool:
        return self.max_abs_coefficient <= self.bound + DECAY_QUAD_TOL


@dataclass(frozen=True)
class DecayReport:
    lipschitz: float
    levels: tuple

    @property
    def passed(self) -> bool:
        return all(level.ok for level in self.levels)


def coefficient_decay(u, lipschitz: float, J_max: int, n: int = DEFAULT_QUAD_N) -> DecayReport:
    """Per-level max |a| of the Haar coefficients of ``u`` against L / 2**(j+1)."""
    if not lipschitz > 0:
        raise ValueError(f"Lipschitz constant must be positive, got {lipschitz}")
    a = forward_coefficients(u, J_max, n)
    per_level = {}
    for i in range(2, a.size + 1):
        j, _ = wavelet_position(i)
        per_level[j] = max(per_level.get(j, 0.0), abs(a[i - 1]))
    levels = tuple(
        DecayLevel(j, per_level[j], lipschitz / 2 ** (j + 1)) for j in sorted(per_level)
    )
    return DecayReport(float(lipschitz), levels)
