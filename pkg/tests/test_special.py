import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from ncspectra.model import InvalidParameters, QuadratureError
from ncspectra.special import (
    EndpointTransform,
    QuadratureSpec,
    cauchy_square,
    completed_square_moment,
    gaussian_linear_moment,
    integrate_semi_infinite,
    upper_incomplete_gamma_int,
)


@pytest.mark.parametrize("s, x, expected", [(1, 0.0, 1.0), (3, 0.0, 2.0), (2, -1.0, 0.0)])
def test_incomplete_gamma_fixtures(s, x, expected):
    assert upper_incomplete_gamma_int(s, x) == pytest.approx(expected, abs=1e-14)


def test_incomplete_gamma_matches_scipy_for_positive_x():
    for s in range(1, 8):
        for x in (0.3, 1.0, 4.5):
            ref = special.gammaincc(s, x) * special.gamma(s)
            assert upper_incomplete_gamma_int(s, x) == pytest.approx(ref, rel=1e-13)


@pytest.mark.parametrize("s", range(1, 11))
@pytest.mark.parametrize("x", [-3.0, -1.0, 0.0, 1.0, 3.0])
def test_incomplete_gamma_recurrence(s, x):
    lhs = upper_incomplete_gamma_int(s + 1, x)
    rhs = s * upper_incomplete_gamma_int(s, x) + x**s * math.exp(-x)
    scale = max(abs(lhs), abs(x**s * math.exp(-x)))
    assert abs(lhs - rhs) <= 1e-12 * scale


@pytest.mark.parametrize("s", [0, -1, 1.5, True])
def test_incomplete_gamma_rejects_non_positive_integer_order(s):
    with pytest.raises(InvalidParameters):
        upper_incomplete_gamma_int(s, 1.0)


@pytest.mark.parametrize(
    "f, expected",
    [
        (lambda r: np.exp(-r * r), math.sqrt(math.pi) / 2),
        (lambda r: r * np.exp(-r), 1.0),
        (lambda r: r**-0.5 * np.exp(-r), math.sqrt(math.pi)),
    ],
)
def test_quadrature_fixtures(f, expected):
    value, err = integrate_semi_infinite(f, QuadratureSpec(rel_tol=1e-12))
    assert value == pytest.approx(expected, rel=1e-10)
    # the reported estimate bounds the observed error
    assert abs(value - expected) <= max(err, 1e-15 * expected)


@pytest.mark.parametrize("transform", list(EndpointTransform))
def test_quadrature_transforms_agree(transform):
    f = lambda r: r**2 * np.exp(-r - r * r)  # noqa: E731
    ref, _ = integrate.quad(f, 0, np.inf, epsabs=0, epsrel=1e-13)
    value, _ = integrate_semi_infinite(f, QuadratureSpec(rel_tol=1e-12, endpoint_transform=transform))
    assert value == pytest.approx(ref, rel=1e-10)


def test_quadrature_flags_divergent_integrand():
    with pytest.raises(QuadratureError):
        integrate_semi_infinite(lambda r: r**-2.0 * np.exp(-r), QuadratureSpec(max_subdivisions=200))


def test_quadrature_spec_validation():
    with pytest.raises(InvalidParameters):
        QuadratureSpec(rel_tol=0)
    with pytest.raises(InvalidParameters):
        QuadratureSpec(max_subdivisions=0)


@pytest.mark.parametrize("s, expected", [(0, math.sqrt(math.pi) / 2), (2, math.sqrt(math.pi) / 4)])
def test_gaussian_moments_pure_gaussian(s, expected):
    assert gaussian_linear_moment(s, 0.0, 1.0) == pytest.approx(expected, rel=1e-14)


def test_gaussian_moment_shifted_fixture():
    # int_0^inf exp(-2r - r^2) dr = (sqrt(pi)/2) e erfc(1)
    expected = 0.5 * math.sqrt(math.pi) * math.e * math.erfc(1.0)
    value, _ = integrate_semi_infinite(lambda r: np.exp(-2 * r - r * r))
    assert value == pytest.approx(expected, rel=1e-12)
    assert gaussian_linear_moment(0, 2.0, 1.0) == pytest.approx(expected, rel=1e-13)


def test_completed_square_matches_parabolic_cylinder_route():
    for s in range(0, 6):
        for a, b in ((0.5, 1.0), (2.0, 1.0), (1.0, 3.0)):
            via_pbdv = gaussian_linear_moment(s + 1e-12, a, b)
            assert completed_square_moment(s, a, b) == pytest.approx(via_pbdv, rel=1e-9)


def test_gaussian_moment_rejects_bad_input():
    with pytest.raises(InvalidParameters):
        gaussian_linear_moment(-1.0, 1.0, 1.0)
    with pytest.raises(InvalidParameters):
        gaussian_linear_moment(0.0, -1.0, 1.0)
    with pytest.raises(InvalidParameters):
        gaussian_linear_moment(0.0, 1.0, 0.0)


@settings(max_examples=20, deadline=None, derandomize=True)
@given(
    s=st.floats(-0.5, 6.0),
    a=st.floats(0.0, 3.0),
    b=st.floats(0.5, 4.0),
)
def test_moment_equals_quadrature(s, a, b):
    q = math.sqrt(b)
    f = lambda r: r**s * np.exp(-(a / q) * r - q * r * r)  # noqa: E731
    value, _ = integrate_semi_infinite(f, QuadratureSpec(rel_tol=1e-12))
    assert gaussian_linear_moment(s, a, b) == pytest.approx(value, rel=1e-10)


def test_cauchy_square():
    assert cauchy_square([1.0, 2.0]) == [1.0, 4.0, 4.0]
    assert cauchy_square([]) == []
