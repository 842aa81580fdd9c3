import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vdwtails.errors import ConvergenceError, DomainError, InputError
from vdwtails.quadrature import (
    GAUSS_WEIGHTS,
    KRONROD_WEIGHTS,
    NODES,
    QuadratureSpec,
    identity_two_denominators,
    identity_two_denominators_numeric,
    identity_wick_denominators,
    identity_wick_denominators_numeric,
    integrate_halfline,
    integrate_interval,
    laplace_check_values,
)


def test_rule_exactness():
    # Kronrod part is exact to degree 22 (23 for odd), Gauss part to degree 13
    for k in range(24):
        exact = 0.0 if k % 2 else 2.0 / (k + 1)
        assert KRONROD_WEIGHTS @ NODES**k == pytest.approx(exact, abs=1e-14)
    for k in range(14):
        exact = 0.0 if k % 2 else 2.0 / (k + 1)
        assert GAUSS_WEIGHTS @ NODES**k == pytest.approx(exact, abs=1e-14)


@pytest.mark.parametrize("name", sorted(laplace_check_values()))
def test_laplace_references(name):
    f, expected = laplace_check_values()[name]
    value, err = integrate_halfline(f, QuadratureSpec(rel_tol=1e-12, max_subdivisions=500))
    assert value.real == pytest.approx(expected, rel=1e-11)
    assert err < 1e-10


def test_interval_and_complex_integrand():
    value, _ = integrate_interval(lambda x: np.exp(1j * x), 0.0, math.pi)
    assert value == pytest.approx(2j, abs=1e-13)


def test_convergence_error_carries_estimate():
    spec = QuadratureSpec(rel_tol=1e-15, abs_tol=1e-300, max_subdivisions=2)
    with pytest.raises(ConvergenceError) as info:
        integrate_interval(lambda x: np.sqrt(x), 0.0, 1.0, spec)
    assert info.value.value is not None and info.value.error_estimate > 0


def test_spec_validation():
    with pytest.raises(InputError):
        QuadratureSpec(rel_tol=0)
    with pytest.raises(InputError):
        QuadratureSpec(max_subdivisions=0)


def test_closed_identities_frozen():
    assert identity_two_denominators(1.0, 1.0) == pytest.approx(2j * math.pi, rel=1e-15)
    assert identity_two_denominators(3.0, 1.0) == pytest.approx(1j * math.pi, rel=1e-15)
    assert identity_wick_denominators(-0.1, 0.4) == pytest.approx(-8 * math.pi, rel=1e-15)
    with pytest.raises(DomainError):
        identity_two_denominators(1.0, -1.0)
    with pytest.raises(DomainError):
        identity_wick_denominators(0.0, 1.0)


@settings(max_examples=25, deadline=None)
@given(st.floats(1e-2, 10.0), st.floats(1e-2, 10.0))
def test_two_denominators_numeric(ea, eb):
    value, _ = identity_two_denominators_numeric(ea, eb)
    assert value == pytest.approx(identity_two_denominators(ea, eb), rel=1e-9)


@settings(max_examples=25, deadline=None)
@given(
    st.floats(1e-2, 10.0), st.floats(1e-2, 10.0), st.sampled_from([-1.0, 1.0]), st.sampled_from([-1.0, 1.0])
)
def test_wick_denominators_numeric(ea, eb, sa, sb):
    value, _ = identity_wick_denominators_numeric(sa * ea, sb * eb)
    assert value == pytest.approx(identity_wick_denominators(sa * ea, sb * eb), rel=1e-9)


def test_numeric_contour_needs_positive_energies():
    with pytest.raises(DomainError):
        identity_two_denominators_numeric(-1.0, 1.0)


def test_result_independent_of_breakpoints():
    f = lambda w: np.exp(-w) / (1 + w * w)
    a, _ = integrate_halfline(f, QuadratureSpec(rel_tol=1e-13, max_subdivisions=500))
    b, _ = integrate_halfline(f, QuadratureSpec(rel_tol=1e-13, max_subdivisions=500), breakpoints=(0.3, 2.7, 9.0))
    assert a == pytest.approx(b, rel=1e-12)
