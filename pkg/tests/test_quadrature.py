import math

import numpy as np
import pytest
from scipy import special
from scipy.special import roots_legendre

from sbsdephasing.quadrature import (
    GAUSS_WEIGHTS,
    KRONROD_WEIGHTS,
    NODES,
    QuadratureError,
    QuadSpec,
    gk21,
    integrate,
    integrate_oscillatory,
)


def test_rule_constants():
    assert NODES.size == 21 and np.all(np.diff(NODES) > 0)
    assert KRONROD_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    assert GAUSS_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    # the embedded 10-point Gauss rule sits on the odd nodes
    x, w = roots_legendre(10)
    gx = NODES[GAUSS_WEIGHTS != 0]
    assert np.allclose(gx, x, atol=1e-15)
    assert np.allclose(GAUSS_WEIGHTS[GAUSS_WEIGHTS != 0], w, atol=1e-15)


def test_kronrod_exact_for_degree_31():
    lo, hi = np.array([-1.0]), np.array([1.0])
    for k in (0, 10, 30, 31):
        v, _, _ = gk21(lambda x: x**k, lo, hi)
        exact = 0.0 if k % 2 else 2.0 / (k + 1)
        assert v[0] == pytest.approx(exact, abs=1e-14)


def test_finite_integral():
    v, e = integrate(np.exp, 0.0, 1.0)
    assert v == pytest.approx(math.e - 1, rel=1e-14)
    assert e < 1e-10


def test_mild_endpoint_singularity():
    # int_0^1 w^-1/4 = 4/3
    v, _ = integrate(lambda w: w**-0.25, 0.0, 1.0, QuadSpec(rel_tol=1e-10))
    assert v == pytest.approx(4.0 / 3.0, rel=1e-9)


def test_strong_endpoint_singularity_is_reported():
    # plain bisection gains only sqrt(2) per level on w^-1/2; callers handle such heads analytically
    with pytest.raises(QuadratureError) as info:
        integrate(lambda w: w**-0.5, 0.0, 1.0, QuadSpec(rel_tol=1e-10))
    assert info.value.value == pytest.approx(2.0, rel=1e-7)


def test_breakpoint_discontinuity():
    v, _ = integrate(lambda w: np.where(w < 1.3, 1.0, 0.0), 0.0, 3.0, breakpoints=[1.3])
    assert v == pytest.approx(1.3, rel=1e-14)


@pytest.mark.parametrize("use_tail", [True, False])
def test_semi_infinite(use_tail):
    f = lambda w: w**2 * np.exp(-w)
    tail = (lambda W: special.gammaincc(3, W) * 2.0) if use_tail else None
    v, _ = integrate(f, 0.0, math.inf, tail=tail)
    assert v == pytest.approx(2.0, rel=1e-10)


def test_oscillatory_against_closed_form():
    # int_0^inf w^2 e^-w sin(w t) = Im 2/(1 - i t)^3
    for t in (0.1, 1.0, 20.0, 200.0):
        exact = (2.0 / (1 - 1j * t) ** 3).imag
        tail = lambda W: special.gammaincc(3, W) * 2.0
        v, _ = integrate_oscillatory(lambda w: w**2 * np.exp(-w), "sin", t, 0.0, math.inf, tail=tail)
        assert v == pytest.approx(exact, rel=1e-9, abs=1e-12)


def test_one_minus_cos_small_t_no_cancellation():
    # int_0^inf e^-w (1 - cos wt) = t^2 / (1 + t^2); tiny t must keep relative accuracy
    t = 1e-6
    v, _ = integrate_oscillatory(lambda w: np.exp(-w), "1-cos", t, 0.0, math.inf,
                                 QuadSpec(rel_tol=1e-10, abs_tol=0.0), tail=lambda W: math.exp(-W))
    assert v == pytest.approx(t * t / (1 + t * t), rel=1e-9)


def test_oscillatory_t_zero():
    assert integrate_oscillatory(np.exp, "sin", 0.0, 0.0, 1.0) == (0.0, 0.0)


def test_bad_kernel():
    with pytest.raises(ValueError):
        integrate_oscillatory(np.exp, "cos", 1.0, 0.0, 1.0)


def test_max_depth_failure_carries_partial_value():
    with pytest.raises(QuadratureError) as info:
        integrate(lambda w: 1.0 / w, 0.0, 1.0, QuadSpec(rel_tol=1e-12, max_depth=5))
    assert math.isfinite(info.value.value)


@pytest.mark.parametrize("kw", [dict(rel_tol=0.0), dict(abs_tol=-1.0), dict(max_depth=0)])
def test_spec_validation(kw):
    with pytest.raises(ValueError):
        QuadSpec(**kw)


def test_degenerate_interval():
    assert integrate(np.exp, 2.0, 2.0) == (0.0, 0.0)
    with pytest.raises(ValueError):
        integrate(np.exp, 2.0, 1.0)
