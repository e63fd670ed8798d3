import json
import math

import numpy as np
import pytest

from haarwave.errors import EvaluationDomainError, ProblemError
from haarwave.problem import (
    builtin,
    check_compatibility,
    load_problem,
    make_problem,
    nonlocal_consistency,
    quad_simpson,
)


def test_builtin_exact_values():
    # reference values of the closed-form solutions
    assert builtin("example1").exact(x=0.5, t=1.0) == pytest.approx(0.60653066, abs=5e-9)
    assert builtin("example2").exact(x=0.1, t=0.25) == pytest.approx(0.67249851, abs=5e-9)
    assert builtin("example2").nu(t=0.5) == 0.0


@pytest.mark.parametrize(
    "x, expected",
    [(0.1, 0.18742828), (0.2, 0.35650978), (0.3, 0.49069361), (0.4, 0.57684494), (1.0, 0.0)],
)
def test_example1_exact_at_final_time(x, expected):
    assert builtin("example1").exact(x=x, t=1.0) == pytest.approx(expected, abs=5e-9)


@pytest.mark.parametrize(
    "x, expected",
    [(0.2, 0.57206140), (0.3, 0.41562694), (0.4, 0.21850801), (0.6, -0.21850801), (1.0, -0.70710678)],
)
def test_example2_exact_at_quarter(x, expected):
    assert builtin("example2").exact(x=x, t=0.25) == pytest.approx(expected, abs=5e-9)


def test_builtin_fields():
    p = builtin("example1")
    assert p.phi(x=0.5, t=0.0) == pytest.approx(0.25 + math.pi**2)
    assert p.g(x=0.5) == -0.5
    assert p.h(t=0.3) == 0.0
    assert p.nu(t=0.0) == pytest.approx(2 / math.pi)
    q = builtin("example2")
    assert q.h(t=1.0 / 3.0) == pytest.approx(0.5)
    assert q.phi(x=0.3, t=0.7) == 0.0


def test_unknown_builtin():
    with pytest.raises(ProblemError, match="example3"):
        builtin("example3")


def test_quad_simpson():
    assert quad_simpson(lambda x: np.ones_like(x), 0.0, 1.0, 2) == 1.0
    assert quad_simpson(lambda x: x**3, 0.0, 1.0, 2) == 0.25
    assert quad_simpson(lambda x: np.sin(np.pi * x), 0.0, 1.0, 4096) == pytest.approx(2 / math.pi, abs=1e-12)
    assert quad_simpson(math.exp, 0.0, 1.0, 64) == pytest.approx(math.e - 1, abs=1e-9)
    with pytest.raises(ValueError):
        quad_simpson(math.exp, 0.0, 1.0, 3)
    with pytest.raises(ValueError):
        quad_simpson(math.exp, 1.0, 0.0, 4)


def test_quad_simpson_propagates_domain_errors():
    bad = make_problem("bad", phi="0", f="log(x - 2)", g="0", h="0", nu="0")
    with pytest.raises(EvaluationDomainError):
        quad_simpson(lambda x: bad.f(x=x), 0.0, 1.0, 8)


@pytest.mark.parametrize("name", ["example1", "example2"])
def test_builtins_compatible(name):
    report = check_compatibility(builtin(name), 1e-10)
    assert report.ok
    assert all(r <= 1e-10 for r in report.residuals)


def test_incompatible_dirichlet():
    spec = make_problem("bad", phi="0", f="sin(pi*x)", g="0", h="1", nu="2/pi")
    report = check_compatibility(spec, 1e-10)
    assert report.residuals[0] == 1.0
    assert report.passed[0] is False
    assert not report.ok


def test_compatibility_finite_difference_fallback():
    spec = make_problem("fd", phi="0", f="cos(pi*x)", g="0", h="cos(pi*t)", nu="0")
    assert spec.h_prime is None
    report = check_compatibility(spec, 1e-8)
    assert report.ok


@pytest.mark.parametrize("name", ["example1", "example2"])
def test_exact_solution_consistent_with_nonlocal_datum(name):
    rng = np.random.default_rng(1)
    times = rng.uniform(0.0, 1.0, 20)
    assert nonlocal_consistency(builtin(name), times) <= 1e-10


def _write(tmp_path, doc):
    path = tmp_path / "problem.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    return path


def test_load_round_trip(tmp_path):
    ref = builtin("example1")
    loaded = load_problem(_write(tmp_path, ref.sources()))
    assert loaded == ref


def test_load_missing_field(tmp_path):
    doc = builtin("example1").sources()
    del doc["nu"]
    with pytest.raises(ProblemError, match="nu"):
        load_problem(_write(tmp_path, doc))


def test_load_parse_error_names_field(tmp_path):
    doc = builtin("example1").sources()
    doc["f"] = "sin(pi*x*"
    with pytest.raises(ProblemError, match="'f'.*offset 9"):
        load_problem(_write(tmp_path, doc))


def test_load_rejects_unknown_keys(tmp_path):
    doc = builtin("example1").sources()
    doc["speed"] = "1"
    with pytest.raises(ProblemError, match="speed"):
        load_problem(_write(tmp_path, doc))


def test_load_scoping(tmp_path):
    doc = builtin("example1").sources()
    doc["f"] = "sin(pi*x)*t"
    with pytest.raises(ProblemError, match="'f'"):
        load_problem(_write(tmp_path, doc))


def test_load_io_and_json_errors(tmp_path):
    with pytest.raises(ProblemError):
        load_problem(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    with pytest.raises(ProblemError, match="malformed"):
        load_problem(bad)
    arr = tmp_path / "arr.json"
    arr.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(ProblemError):
        load_problem(arr)


def test_exact_must_match_initial_data():
    with pytest.raises(ProblemError, match="exact"):
        make_problem("x", phi="0", f="sin(pi*x)", g="0", h="0", nu="0", exact="cos(pi*x)*cos(pi*t)")
