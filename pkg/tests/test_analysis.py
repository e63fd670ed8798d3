import math

import numpy as np
import pytest

from haarwave.analysis import (
    coefficient_decay,
    error_table,
    observed_orders,
    spatial_convergence,
    temporal_convergence,
)
from haarwave.problem import builtin, make_problem
from haarwave.solver import REPORT_X, Snapshot, SolutionRecord, solve
from oracles import random_piecewise_linear


@pytest.fixture(scope="module")
def example2_table():
    rec = solve(builtin("example2"), 6, 1e-4, 0.25, [0.25])
    return error_table(rec, 0.25)


def test_error_table_example2(example2_table):
    tab = example2_table
    assert [r.x for r in tab.rows] == pytest.approx([0.1 * k for k in range(1, 11)])
    first = tab.rows[0]
    assert first.exact == pytest.approx(0.67249851, abs=5e-9)
    assert 1.3e-5 / 5 <= first.error <= 1.3e-5 * 5
    assert tab.max_error == max(r.error for r in tab.rows)
    assert all(r.error >= 0 for r in tab.rows)
    assert tab.l2_error <= tab.max_error


def test_error_table_exact_data():
    spec = builtin("example1")
    exact = spec.exact(x=REPORT_X, t=0.5)
    snap = Snapshot(
        n=5, t=0.5, u=np.zeros(2), a=np.zeros(2), x_report=REPORT_X, u_report=exact,
        exact=np.zeros(2), error=np.zeros(2), exact_report=exact, error_report=np.abs(exact - exact),
    )
    rec = SolutionRecord("example1", 0, 0.1, 0.5, 5, [snap], spec)
    tab = error_table(rec, 0.5)
    assert tab.max_error == 0.0 and tab.l2_error == 0.0
    assert all(r.error == 0.0 for r in tab.rows)


def test_error_table_requires_exact_and_snapshot():
    spec = make_problem("noexact", phi="0", f="sin(pi*x)", g="0", h="0", nu="2/pi")
    rec = solve(spec, 2, 0.01, 0.02)
    with pytest.raises(ValueError):
        error_table(rec, 0.02)
    rec = solve(builtin("example1"), 2, 0.01, 0.02)
    with pytest.raises(KeyError):
        error_table(rec, 0.01)


def test_observed_orders():
    assert observed_orders([1.0]) == [None]
    out = observed_orders([4.0, 1.0, 0.25])
    assert out[0] is None
    assert out[1:] == [2.0, 2.0]


def test_repeated_level_gives_zero_order():
    tab = spatial_convergence(builtin("example1"), [3, 3], 1e-3, 0.05)
    assert tab.orders == [0.0]


def test_single_entries():
    tab = spatial_convergence(builtin("example1"), [3], 1e-3, 0.05)
    assert len(tab.rows) == 1 and tab.rows[0].order is None
    tab = temporal_convergence(builtin("example2"), 3, [1e-2], 0.05)
    assert len(tab.rows) == 1 and tab.rows[0].order is None
    assert tab.mode == "time"
    with pytest.raises(ValueError):
        temporal_convergence(builtin("example2"), 3, [], 0.05)


def test_parallel_matches_serial():
    spec = builtin("example1")
    serial = spatial_convergence(spec, [2, 3, 4], 1e-3, 0.05)
    parallel = spatial_convergence(spec, [2, 3, 4], 1e-3, 0.05, workers=2)
    assert serial == parallel


def test_example1_finer_step_is_more_accurate():
    spec = builtin("example1")
    coarse = error_table(solve(spec, 6, 1e-3, 1.0), 1.0).max_error
    fine = error_table(solve(spec, 6, 1e-4, 1.0), 1.0).max_error
    assert coarse > fine


@pytest.mark.parametrize("name", ["example1", "example2"])
def test_halving_step_never_hurts(name):
    tab = temporal_convergence(builtin(name), 6, [4e-3, 2e-3, 1e-3], 0.5)
    errs = [r.max_error for r in tab.rows]
    for prev, cur in zip(errs, errs[1:]):
        assert cur <= 1.05 * prev


def test_decay_sine():
    rep = coefficient_decay(lambda x: np.sin(np.pi * x), math.pi, 7)
    assert [lv.j for lv in rep.levels] == list(range(8))
    assert rep.passed


def test_decay_kink():
    rep = coefficient_decay(lambda x: np.abs(x - 0.5), 1.0, 7)
    assert rep.passed


def test_decay_constant():
    rep = coefficient_decay(lambda x: np.full_like(x, 3.0), 1.0, 5)
    assert rep.passed
    assert all(lv.max_abs_coefficient == 0.0 for lv in rep.levels)


def test_decay_random_piecewise_linear():
    rng = np.random.default_rng(2024)
    for _ in range(20):
        fn, lip = random_piecewise_linear(rng)
        rep = coefficient_decay(fn, lip, 7)
        assert rep.passed, rep


def test_decay_detects_violation():
    # claimed constant is far too small for sin(pi x)
    assert not coefficient_decay(lambda x: np.sin(np.pi * x), 0.1, 4).passed
    with pytest.raises(ValueError):
        coefficient_decay(np.sin, 0.0, 3)
