"""Problem instances for u_tt - u_xx = phi on (0, 1) with an integral side condition.

Data: u(x, 0) = f, u_t(x, 0) = g, u(0, t) = h and int_0^1 u(x, t) dx = nu.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ExpressionError, ProblemError
from .expr import Expression, parse
from .haar import DEFAULT_QUAD_N, simpson_weights

REQUIRED_FIELDS = ("name", "phi", "f", "g", "h", "nu")
OPTIONAL_FIELDS = ("exact", "h_prime", "nu_prime")
FIELD_VARIABLES = {
    "phi": ("x", "t"),
    "f": ("x",),
    "g": ("x",),
    "h": ("t",),
    "nu": ("t",),
    "exact": ("x", "t"),
    "h_prime": ("t",),
    "nu_prime": ("t",),
}

FD_STEP = 1e-6
EXACT_CHECK_TOL = 1e-10


@dataclass(frozen=True)
class ProblemSpec:
    name: str
    phi: Expression
    f: Expression
    g: Expression
    h: Expression
    nu: Expression
    exact: Optional[Expression] = None
    h_prime: Optional[Expression] = None
    nu_prime: Optional[Expression] = None

    def sources(self) -> dict:
        """Field name -> formula text, for the fields that are set."""
        out = {"name": self.name}
        for key in REQUIRED_FIELDS[1:] + OPTIONAL_FIELDS:
            expr = getattr(self, key)
            if expr is not None:
                out[key] = expr.source
        return out


def quad_simpson(fn, a: float, b: float, n: int = DEFAULT_QUAD_N) -> float:
    """Composite Simpson rule with ``n`` (even) subintervals.

    ``fn`` is called once on the array of nodes; a scalar-only callable is
    retried pointwise.
    """
    if not a < b:
        raise ValueError(f"need a < b, got [{a}, {b}]")
    # unscaled weights; the h/3 factor is applied last so low-degree rules stay exact
    w = simpson_weights(n, 3.0 * n)
    xs = np.linspace(a, b, n + 1)
    try:
        values = np.asarray(fn(xs), dtype=float)
    except (TypeError, ValueError):
        values = None
    if values is None or values.shape != xs.shape:
        if values is not None and values.ndim == 0:
            values = np.full_like(xs, float(values))
        else:
            values = np.array([fn(float(x)) for x in xs], dtype=float)
    return float(values @ w) * (b - a) / (3.0 * n)


def _parse_field(key, source):
    if not isinstance(source, str) or not source.strip():
        raise ProblemError(f"field {key!r} must be a non-empty string")
    try:
        return parse(source, FIELD_VARIABLES[key])
    except ExpressionError as exc:
        raise ProblemError(f"field {key!r}: {exc}") from exc


def make_problem(name: str, **sources) -> ProblemSpec:
    """Build and validate a :class:`ProblemSpec` from formula strings."""
    missing = [k for k in REQUIRED_FIELDS[1:] if k not in sources]
    if missing:
        raise ProblemError(f"missing field(s): {', '.join(missing)}")
    unknown = sorted(set(sources) - set(FIELD_VARIABLES))
    if unknown:
        raise ProblemError(f"unknown field(s): {', '.join(unknown)}")
    exprs = {k: _parse_field(k, v) for k, v in sources.items() if v is not None}
    spec = ProblemSpec(name=name, **exprs)
    validate_exact(spec)
    return spec


def validate_exact(spec: ProblemSpec, tol: float = EXACT_CHECK_TOL, samples: int = 11):
    """Check exact(x, 0) == f(x) and exact(0, t) == h(t) on sample points."""
    if spec.exact is None:
        return
    s = np.linspace(0.0, 1.0, samples)
    try:
        dev_f = np.max(np.abs(spec.exact(x=s, t=0.0) - spec.f(x=s)))
        dev_h = np.max(np.abs(spec.exact(x=0.0, t=s) - spec.h(t=s)))
    except ExpressionError as exc:
        raise ProblemError(f"problem {spec.name!r}: {exc}") from exc
    if dev_f > tol:
        raise ProblemError(f"problem {spec.name!r}: exact(x, 0) differs from f by {dev_f:.3e}")
    if dev_h > tol:
        raise ProblemError(f"problem {spec.name!r}: exact(0, t) differs from h by {dev_h:.3e}")


_BUILTINS = {
    "example1": dict(
        phi="(1/4 + pi^2)*exp(-t/2)*sin(pi*x)",
        f="sin(pi*x)",
        g="-0.5*sin(pi*x)",
        h="0",
        nu="(2/pi)*exp(-t/2)",
        exact="exp(-t/2)*sin(pi*x)",
        h_prime="0",
        nu_prime="-(1/pi)*exp(-t/2)",
    ),
    "example2": dict(
        phi="0",
        f="cos(pi*x)",
        g="0",
        h="cos(pi*t)",
        nu="0",
        exact="0.5*(cos(pi*(x + t)) + cos(pi*(x - t)))",
        h_prime="-pi*sin(pi*t)",
        nu_prime="0",
    ),
}

BUILTIN_DESCRIPTIONS = {
    "example1": "damped standing wave, u = exp(-t/2) sin(pi x)",
    "example2": "free wave, u = (cos(pi(x+t)) + cos(pi(x-t)))/2",
}


def builtin_names():
    return sorted(_BUILTINS)


def builtin(name: str) -> ProblemSpec:
    try:
        sources = _BUILTINS[name]
    except KeyError:
        raise ProblemError(
            f"unknown built-in problem {name!r} (choose from {', '.join(builtin_names())})"
        ) from None
    return make_problem(name, **sources)


def load_problem(path) -> ProblemSpec:
    """Read a JSON problem file (see README for the format)."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ProblemError(f"cannot read problem file {str(path)!r}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemError(f"{path}: malformed JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ProblemError(f"{path}: top level must be a JSON object")
    allowed = set(REQUIRED_FIELDS) | set(OPTIONAL_FIELDS)
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise ProblemError(f"{path}: unknown field(s): {', '.join(unknown)}")
    missing = [k for k in REQUIRED_FIELDS if k not in doc]
    if missing:
        raise ProblemError(f"{path}: missing field(s): {', '.join(missing)}")
    name = doc.pop("name")
    if not isinstance(name, str):
        raise ProblemError(f"{path}: field 'name' must be a string")
    return make_problem(name, **doc)


def resolve_problem(source: str) -> ProblemSpec:
    """Built-in name or path to a problem file."""
    if source in _BUILTINS:
        return builtin(source)
    return load_problem(source)


@dataclass(frozen=True)
class CompatibilityReport:
    residuals: tuple
    tolerance: float
    labels: tuple = field(
        default=(
            "|f(0) - h(0)|",
            "|int f - nu(0)|",
            "|g(0) - h'(0)|",
            "|int g - nu'(0)|",
        )
    )

    @property
    def passed(self) -> tuple:
        return tuple(r <= self.tolerance for r in self.residuals)

    @property
    def ok(self) -> bool:
        return all(self.passed)


def _derivative_at_zero(expr, fallback):
    if expr is not None:
        return expr(t=0.0)
    # central difference: the formula must be evaluable slightly before t = 0
    return (fallback(t=FD_STEP) - fallback(t=-FD_STEP)) / (2 * FD_STEP)


def check_compatibility(spec: ProblemSpec, tol: float = 1e-10, n: int = DEFAULT_QUAD_N):
    if not tol > 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    f0 = spec.f(x=0.0)
    g0 = spec.g(x=0.0)
    residuals = (
        abs(f0 - spec.h(t=0.0)),
        abs(quad_simpson(lambda x: spec.f(x=x), 0.0, 1.0, n) - spec.nu(t=0.0)),
        abs(g0 - _derivative_at_zero(spec.h_prime, spec.h)),
        abs(quad_simpson(lambda x: spec.g(x=x), 0.0, 1.0, n) - _derivative_at_zero(spec.nu_prime, spec.nu)),
    )
    return CompatibilityReport(tuple(float(r) for r in residuals), tol)


def nonlocal_consistency(spec: ProblemSpec, times, n: int = DEFAULT_QUAD_N) -> float:
    """Largest |int exact(., t) - nu(t)| over ``times``; needs an exact solution."""
    if spec.exact is None:
        raise ProblemError(f"problem {spec.name!r} has no exact solution")
    worst = 0.0
    for t in times:
        integral = quad_simpson(lambda x: spec.exact(x=x, t=float(t)), 0.0, 1.0, n)
        worst = max(worst, abs(integral - spec.nu(t=float(t))))
    return worst

