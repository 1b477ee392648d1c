import math
import warnings

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from intlat.errors import DomainError, IntegrationError, QuadratureError
from intlat.special_functions import (
    BesselUnderflowWarning,
    ToleranceSpec,
    bessel_k0,
    bessel_k01,
    bessel_k1,
    integrate_ode,
    integrate_quadrature,
)

from oracles import K0_AT_1, K1_AT_1, TAIL_INTEGRAL_R6


class TestToleranceSpec:
    def test_defaults_valid(self):
        tol = ToleranceSpec()
        assert tol.abs_tol > 0 and tol.rel_tol > 0 and tol.max_steps >= 1

    @pytest.mark.parametrize(
        "kwargs",
        [dict(abs_tol=0.0), dict(rel_tol=-1.0), dict(max_steps=0), dict(abs_tol=math.inf), dict(max_steps=2.5)],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            ToleranceSpec(**kwargs)

    def test_tightened(self):
        tol = ToleranceSpec(1e-10, 1e-8, 7).tightened()
        assert tol.abs_tol == pytest.approx(1e-11)
        assert tol.rel_tol == pytest.approx(1e-9)
        assert tol.max_steps == 7


class TestBessel:
    def test_k0_at_one(self):
        assert bessel_k0(1.0) == pytest.approx(K0_AT_1, rel=1e-15)
        assert bessel_k0(1.0) == pytest.approx(0.42102443824070834, rel=1e-15)

    def test_k1_at_one(self):
        assert bessel_k1(1.0) == pytest.approx(K1_AT_1, rel=1e-15)
        assert bessel_k1(1.0) == pytest.approx(0.6019072301972346, rel=1e-15)

    def test_relative_error_against_mpmath(self):
        xs = np.concatenate([np.geomspace(1e-3, 700, 400), [1.999999, 2.0, 2.000001]])
        worst = 0.0
        for x in xs:
            k0, k1 = bessel_k01(x)
            worst = max(worst, abs(k0 / float(mpmath.besselk(0, x)) - 1), abs(k1 / float(mpmath.besselk(1, x)) - 1))
        assert worst < 1e-12

    def test_large_x_asymptotic(self):
        x = 50.0
        assert bessel_k0(x) * math.exp(x) * math.sqrt(2 * x / math.pi) == pytest.approx(1.0, abs=1e-2)
        # leading asymptotic term with its 1/(8x) correction: within 1e-6
        series = 1 - 1 / (8 * x) + 9 / (2 * (8 * x) ** 2)
        assert bessel_k0(x) * math.exp(x) * math.sqrt(2 * x / math.pi) == pytest.approx(series, abs=1e-6)

    def test_finite_difference_k0_at_two(self):
        h = 1e-5
        fd = (bessel_k0(2 + h) - bessel_k0(2 - h)) / (2 * h)
        assert fd == pytest.approx(-bessel_k1(2.0), abs=1e-8)

    @pytest.mark.parametrize("x", np.geomspace(0.1, 20, 20))
    def test_derivative_identity(self, x):
        h = 1e-5 * x
        fd = (bessel_k0(x + h) - bessel_k0(x - h)) / (2 * h)
        assert abs(fd + bessel_k1(x)) < 1e-7 * max(1.0, bessel_k1(x))

    @pytest.mark.parametrize("bad", [0.0, -1.0, -1e-300, math.nan])
    def test_domain(self, bad):
        with pytest.raises(DomainError):
            bessel_k0(bad)
        with pytest.raises(DomainError):
            bessel_k1(bad)

    def test_underflow_flagged(self):
        with pytest.warns(BesselUnderflowWarning):
            v = bessel_k0(760.0)
        assert 0.0 <= v < 1e-300
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            bessel_k0(700.0)

    @given(st.floats(min_value=1e-3, max_value=600))
    @settings(max_examples=60, deadline=None)
    def test_positive_and_ordered(self, x):
        k0, k1 = bessel_k01(x)
        assert 0 < k0 < k1


class TestOde:
    def test_exponential_decay(self):
        sol = integrate_ode(lambda x, y: -y, 0.0, 1.0, [1.0], ToleranceSpec(1e-13, 1e-12))
        assert sol.y[-1, 0] == pytest.approx(math.exp(-1), abs=1e-9)

    def test_dense_output_samples(self):
        xs = np.linspace(0, 1, 37)
        sol = integrate_ode(lambda x, y: -y, 0.0, 1.0, [1.0], ToleranceSpec(1e-13, 1e-12), samples=xs)
        assert np.max(np.abs(sol.y[:, 0] - np.exp(-xs))) < 1e-11

    def test_system(self):
        # harmonic oscillator
        sol = integrate_ode(lambda x, y: (y[1], -y[0]), 0.0, 2 * math.pi, [0.0, 1.0], ToleranceSpec(1e-13, 1e-12))
        assert sol.y[-1] == pytest.approx([0.0, 1.0], abs=1e-9)

    def test_pole_raises(self):
        with pytest.raises(IntegrationError) as info:
            integrate_ode(lambda x, y: y * y, 0.0, 2.0, [1.0])
        assert 0.9 < info.value.last_x <= 1.0

    def test_max_steps(self):
        with pytest.raises(IntegrationError, match="max_steps"):
            integrate_ode(lambda x, y: np.cos(50 * x) * np.ones(1), 0.0, 10.0, [0.0], ToleranceSpec(1e-12, 1e-12, 5))

    def test_backward_reproduces_forward(self):
        def f(x, y):
            return (y[1], -y[0] / x - 0.1 * y[1])

        tol = ToleranceSpec(1e-13, 1e-12)
        xs = np.linspace(0.5, 12.0, 24)
        fwd = integrate_ode(f, 0.5, 12.0, [1.0, 0.0], tol, samples=xs)
        back = integrate_ode(f, 12.0, 0.5, fwd.y[-1], tol, samples=xs)
        assert np.max(np.abs(back.y - fwd.y)) < 1e-8

    def test_order_at_least_four(self):
        # on y' = -y the error should shrink at least like tol^(4/5) for an
        # order >= 4 method; require a clear decrease for every 10x tightening
        errs = []
        for tol in (1e-6, 1e-7, 1e-8, 1e-9):
            sol = integrate_ode(lambda x, y: -y, 0.0, 5.0, [1.0], ToleranceSpec(tol, tol))
            errs.append(abs(sol.y[-1, 0] - math.exp(-5)))
        for a, b in zip(errs, errs[1:]):
            assert b < a / 3

    def test_same_endpoints_rejected(self):
        with pytest.raises(DomainError):
            integrate_ode(lambda x, y: y, 1.0, 1.0, [1.0])

    def test_samples_outside_span_rejected(self):
        with pytest.raises(DomainError):
            integrate_ode(lambda x, y: y, 0.0, 1.0, [1.0], samples=[2.0])


class TestQuadrature:
    def test_semi_infinite_exponential(self):
        assert integrate_quadrature(lambda x: math.exp(-x), 0.0, math.inf) == pytest.approx(1.0, abs=1e-10)

    def test_endpoint_singularity(self):
        assert integrate_quadrature(lambda x: x**-0.5, 0.0, 1.0) == pytest.approx(2.0, abs=1e-8)

    def test_painleve_tail_closed_form(self):
        def f(x):
            if x > 300:
                return 0.0
            k0, k1 = bessel_k01(2 * x)
            return 4 / math.pi**2 * x * (k0 * k0 - k1 * k1)

        tol = ToleranceSpec(1e-22, 1e-13, 2000)
        value = integrate_quadrature(f, 6.0, math.inf, tol)
        assert value == pytest.approx(TAIL_INTEGRAL_R6, abs=1e-8)
        assert value == pytest.approx(TAIL_INTEGRAL_R6, rel=1e-10)

    def test_reversed_limits(self):
        assert integrate_quadrature(math.sin, 1.0, 0.0) == pytest.approx(math.cos(1) - 1, abs=1e-13)

    def test_error_estimate_returned(self):
        value, err = integrate_quadrature(math.cos, 0.0, 1.0, return_error=True)
        assert abs(value - math.sin(1)) <= max(err, 1e-15)

    def test_non_convergence_raises_with_partial(self):
        with pytest.raises(QuadratureError) as info:
            integrate_quadrature(lambda x: math.sin(1 / x) / x, 1e-9, 1.0, ToleranceSpec(1e-14, 1e-14, 4))
        assert math.isfinite(info.value.value)

    @given(
        a=st.floats(-3, 3),
        b=st.floats(-3, 3),
        c=st.floats(-3, 3),
        w=st.floats(0.1, 4),
    )
    @settings(max_examples=40, deadline=None)
    def test_additive(self, a, b, c, w):
        f = lambda x: math.exp(-x * x) * math.cos(w * x)  # noqa: E731
        tol = ToleranceSpec(1e-13, 1e-13, 2000)
        left = integrate_quadrature(f, a, b, tol) + integrate_quadrature(f, b, c, tol)
        assert left == pytest.approx(integrate_quadrature(f, a, c, tol), abs=1e-12)
