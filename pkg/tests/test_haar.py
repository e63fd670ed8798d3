import math

import numpy as np
import pytest

from haarwave.errors import ResourceLimitError
from haarwave.haar import (
    MAX_LEVEL,
    basis_index,
    build_basis,
    c_vectors,
    forward_coefficients,
    haar_eval,
    integral_p,
    wavelet_position,
)

from oracles import c_oracle, cellwise_simpson, haar_ref, p_oracle


# values frozen from tests/oracles.py (Cauchy-formula Simpson quadrature)
P2_2_AT_075 = 0.21875
C2_2 = 0.125
C1_3 = 0.0625


def test_basis_index():
    assert basis_index(0, 0) == 2
    assert basis_index(2, 3) == 8
    with pytest.raises(ValueError):
        basis_index(1, 2)
    with pytest.raises(ValueError):
        basis_index(0, -1)


def test_wavelet_position_inverts_basis_index():
    assert wavelet_position(1) is None
    for j in range(7):
        for k in range(2**j):
            assert wavelet_position(basis_index(j, k)) == (j, k)


def test_haar_eval_examples():
    assert haar_eval(2, 0.25) == 1.0
    assert haar_eval(2, 0.75) == -1.0
    assert haar_eval(1, 0.9) == 1.0
    assert haar_eval(3, 0.6) == 0.0
    assert haar_ref(3, 0.6) == 0.0


def test_half_open_branches():
    assert haar_eval(2, 0.0) == 1.0
    assert haar_eval(2, 0.5) == -1.0
    assert haar_eval(2, 1.0) == 0.0
    assert haar_eval(1, 1.0) == 0.0


def test_haar_eval_matches_definition():
    xs = np.linspace(0, 1, 257)
    for i in range(1, 33):
        np.testing.assert_array_equal(haar_eval(i, xs), [haar_ref(i, float(x)) for x in xs])


def test_integral_p_examples():
    assert integral_p(1, 1, 0.7) == pytest.approx(0.7, abs=1e-15)
    assert integral_p(2, 2, 1.0) == 0.25
    assert integral_p(2, 2, 0.75) == pytest.approx(P2_2_AT_075, abs=1e-15)
    assert integral_p(3, 1, 0.5) == pytest.approx(0.5**3 / 6)


@pytest.mark.parametrize("beta", [1, 2, 3])
@pytest.mark.parametrize("i", [1, 2, 3, 6, 11])
def test_integral_p_against_quadrature(beta, i):
    for x in (0.1, 0.3, 0.55, 0.8, 1.0):
        assert integral_p(beta, i, x) == pytest.approx(p_oracle(beta, i, x), abs=1e-13)


def test_c_vectors_examples():
    c1, c2 = c_vectors(3)
    assert c1[0] == 0.5 and c2[0] == pytest.approx(1 / 6, abs=1e-16)
    assert c2[1] == pytest.approx(C2_2, abs=1e-15)
    assert c1[2] == pytest.approx(C1_3, abs=1e-15)


@pytest.mark.parametrize("i", [1, 2, 3, 4, 5, 8])
def test_c_vectors_against_quadrature(i):
    c1, c2 = c_vectors(2)
    assert c1[i - 1] == pytest.approx(c_oracle(1, i), abs=1e-13)
    assert c2[i - 1] == pytest.approx(c_oracle(2, i), abs=1e-13)


def test_build_basis_level0():
    b = build_basis(0)
    np.testing.assert_array_equal(b.points, [0.25, 0.75])
    np.testing.assert_array_equal(b.H, [[1, 1], [1, -1]])
    np.testing.assert_array_equal(b.grid, [0, 0.5, 1])


def test_build_basis_level2_points():
    b = build_basis(2)
    assert b.size == 8
    np.testing.assert_allclose(b.points, np.arange(1, 16, 2) / 16, rtol=0, atol=0)


@pytest.mark.parametrize("J", [0, 1, 3, 5])
def test_basis_invariants(J):
    b = build_basis(J)
    assert b.size == 2 ** (J + 1) == 2 * b.M
    assert np.all(np.diff(b.points) > 0) and b.points[0] > 0 and b.points[-1] < 1
    assert np.all(b.H[0] == 1.0)
    for i in range(2, b.size + 1):
        row = b.H[i - 1]
        support = row != 0
        assert support.any() and row[support].sum() == 0.0
    for i in range(1, b.size + 1):
        np.testing.assert_array_equal(b.P2[i - 1], integral_p(2, i, b.points))
        np.testing.assert_array_equal(b.P1[i - 1], integral_p(1, i, b.points))
    assert not b.H.flags.writeable


def test_basis_resource_limit():
    with pytest.raises(ResourceLimitError):
        build_basis(MAX_LEVEL + 1)
    with pytest.raises(ValueError):
        build_basis(-1)


def test_orthogonality():
    J = 3
    size = 2 ** (J + 1)
    edges = np.arange(4 * size + 1) / (4 * size)
    for a in range(1, size + 1):
        for b in range(a, size + 1):
            val = cellwise_simpson(lambda x: haar_eval(a, x) * haar_eval(b, x), edges)
            if a != b:
                expected = 0.0
            elif a == 1:
                expected = 1.0
            else:
                expected = 2.0 ** -wavelet_position(a)[0]
            assert abs(val - expected) <= 1e-12, (a, b, val)


def test_derivative_chain():
    b = build_basis(3)
    step = 1e-6
    breaks = set(np.round(b.grid, 14))
    for x in b.points:
        if round(x, 14) in breaks:
            continue
        for i in range(1, b.size + 1):
            for beta in (2, 3):
                fd = (integral_p(beta, i, x + step) - integral_p(beta, i, x - step)) / (2 * step)
                assert abs(fd - integral_p(beta - 1, i, x)) <= 1e-5
            fd1 = (integral_p(1, i, x + step) - integral_p(1, i, x - step)) / (2 * step)
            assert abs(fd1 - haar_eval(i, x)) <= 1e-5


def test_endpoint_identity():
    J = 6
    c1, _ = c_vectors(J)
    for i in range(1, 2 ** (J + 1) + 1):
        assert abs(integral_p(2, i, 1.0) - c1[i - 1]) <= 1e-14


def test_forward_coefficients_of_wavelet():
    J = 4
    a = forward_coefficients(lambda x: haar_eval(2, x), J)
    expected = np.zeros(2 ** (J + 1))
    expected[1] = 1.0
    np.testing.assert_allclose(a, expected, atol=1e-12)


def test_forward_coefficients_of_constant():
    a = forward_coefficients(lambda x: np.ones_like(x), 5)
    assert a[0] == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(a[1:])) <= 1e-12


@pytest.mark.parametrize("i", [3, 6, 13])
def test_forward_coefficients_unit_normalised(i):
    a = forward_coefficients(lambda x: haar_eval(i, x), 4)
    assert a[i - 1] == pytest.approx(1.0, abs=1e-12)


def test_forward_coefficients_sine_bound():
    J = 6
    a = forward_coefficients(lambda x: np.sin(np.pi * x), J)
    for i in range(2, a.size + 1):
        j, k = wavelet_position(i)
        # oracle: exact integral of sin(pi x) h_i by antiderivative
        m = 2**j
        lo, mid, hi = k / m, (k + 0.5) / m, (k + 1) / m
        F = lambda s: -math.cos(math.pi * s) / math.pi
        exact = m * ((F(mid) - F(lo)) - (F(hi) - F(mid)))
        assert a[i - 1] == pytest.approx(exact, abs=1e-12)
        assert abs(a[i - 1]) <= math.pi / 2 ** (j + 1)
