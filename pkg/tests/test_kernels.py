import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import erfc

from kinksolve.kernels import (
    KernelFamily,
    eval_k0,
    eval_k0_derivative,
    eval_k1,
    eval_kq,
    eval_kq_derivative,
    fourier_symbol,
    k1_cumulative,
    kernel_norms,
    kq_abs_mass,
    kq_derivative_abs_mass,
    kq_sign_change,
    tail_mass,
)

SQRT_PI = math.sqrt(math.pi)


def riemann(f, lo=-14.0, hi=14.0, n=2_800_000):
    u = np.linspace(lo, hi, n)
    return float(np.trapezoid(f(u), u))


def test_family_rejects_negative_q():
    with pytest.raises(ValueError):
        KernelFamily(-0.1)
    with pytest.raises(ValueError):
        KernelFamily(float("nan"))
    assert KernelFamily(0.0).q == 0.0


def test_k0_peak_value():
    assert eval_k0(0.0) == pytest.approx(1.0 / (2.0 * SQRT_PI), abs=1e-15)
    assert eval_k0(0.0) == pytest.approx(0.28209479177, abs=1e-11)


def test_k0_at_two():
    # direct evaluation: (1/(2 sqrt(pi))) e^{-1}
    assert eval_k0(2.0) == pytest.approx(math.exp(-1.0) / (2.0 * SQRT_PI), rel=1e-15)
    assert eval_k0(2.0) == pytest.approx(0.10377687, abs=1e-8)


@given(st.floats(min_value=-50, max_value=50, allow_nan=False))
@settings(max_examples=300, deadline=None)
def test_k0_even_and_positive(u):
    assert eval_k0(u) == eval_k0(-u)
    assert eval_k0(u) > 0.0


def test_k1_peak_value():
    assert eval_k1(0.0) == pytest.approx(1.0 / (4.0 * SQRT_PI), abs=1e-15)
    assert eval_k1(0.0) == pytest.approx(0.14104739589, abs=1e-11)


def test_k1_sign_change_at_sqrt2():
    # the factor (1/2 - u^2/4) vanishes at u^2 = 2, up to the rounding of
    # fl(sqrt(2))^2
    assert abs(eval_k1(math.sqrt(2.0))) < 5e-17
    assert eval_k1(1.4) > 0.0
    assert eval_k1(1.5) < 0.0


def test_k1_zero_total_mass():
    assert riemann(eval_k1) == pytest.approx(0.0, abs=1e-12)


def test_k1_is_negative_second_derivative_of_k0():
    # analytic identity checked against a second central difference; the
    # step balances truncation against roundoff in the double subtraction
    eps = 1e-4
    for u in [0.0, 0.3, 1.0, math.sqrt(2.0), 2.5, 4.0]:
        second = (eval_k0(u + eps) - 2.0 * eval_k0(u) + eval_k0(u - eps)) / eps**2
        assert eval_k1(u) == pytest.approx(-second, abs=1e-6)
        assert eval_k1(u) == pytest.approx(
            (0.5 - u * u / 4.0) * eval_k0(u), abs=1e-12)


def test_kq_reduces_to_k0_at_q0():
    fam = KernelFamily(0.0)
    assert eval_kq(0.0, fam) == eval_k0(0.0)


def test_kq_peak_at_q1():
    fam = KernelFamily(1.0)
    assert eval_kq(0.0, fam) == pytest.approx(3.0 / (4.0 * SQRT_PI), rel=1e-15)
    assert eval_kq(0.0, fam) == pytest.approx(0.42314218766, abs=1e-11)


def test_kq_negative_beyond_sign_change():
    for q in [0.3, 0.7, 1.0]:
        fam = KernelFamily(q)
        root = kq_sign_change(fam)
        assert root == pytest.approx(math.sqrt(4.0 / q**2 + 2.0), rel=1e-14)
        assert eval_kq(root * 1.1, fam) < 0.0
        assert eval_kq(root * 0.9, fam) > 0.0


def test_kq_derivative_vanishes_at_origin():
    for q in [0.0, 0.5, 1.0]:
        assert eval_kq_derivative(0.0, KernelFamily(q)) == 0.0


def test_kq_derivative_matches_finite_difference():
    # central difference with step 1e-5, tolerance 1e-8
    eps = 1e-5
    for q in [0.0, 0.4, 1.0]:
        fam = KernelFamily(q)
        for u in [-3.1, -1.0, 0.2, 0.9, 2.7, 4.4]:
            fd = (eval_kq(u + eps, fam) - eval_kq(u - eps, fam)) / (2.0 * eps)
            assert eval_kq_derivative(u, fam) == pytest.approx(fd, abs=1e-8)


def test_k0_derivative_formula():
    for u in [0.4, 1.7, -2.2]:
        assert eval_kq_derivative(u, KernelFamily(0.0)) == pytest.approx(
            -0.5 * u * eval_k0(u), rel=1e-15)
        assert eval_k0_derivative(u) == eval_kq_derivative(u, KernelFamily(0.0))


def test_k0_derivative_abs_mass():
    # |K0'| integrates to twice the peak: 1/sqrt(pi)
    val = kq_derivative_abs_mass(KernelFamily(0.0))
    assert val == pytest.approx(1.0 / SQRT_PI, abs=1e-12)
    assert val == pytest.approx(riemann(lambda u: np.abs(eval_k0_derivative(u))),
                                abs=1e-9)


@given(st.floats(min_value=-8, max_value=8), st.floats(min_value=0, max_value=1.5))
@settings(max_examples=300, deadline=None)
def test_kq_derivative_is_odd(u, q):
    fam = KernelFamily(q)
    assert eval_kq_derivative(u, fam) == -eval_kq_derivative(-u, fam)


def test_fourier_symbol_at_zero_is_unit_mass():
    for q in [0.0, 0.25, 0.5, 1.0]:
        assert fourier_symbol(0.0, KernelFamily(q)) == 1.0


def test_fourier_symbol_q0_heat_kernel():
    for k in [0.3, 1.0, 2.5]:
        assert fourier_symbol(k, KernelFamily(0.0)) == pytest.approx(
            math.exp(-k * k), rel=1e-15)


def test_fourier_symbol_value_and_quadrature():
    fam = KernelFamily(1.0)
    assert fourier_symbol(1.0, fam) == pytest.approx(2.0 / math.e, rel=1e-13)
    # cross-check: the cosine transform of the kernel matches the symbol
    for k, q in [(1.0, 1.0), (0.7, 0.4), (2.0, 0.0)]:
        famq = KernelFamily(q)
        val = riemann(lambda u: eval_kq(u, famq) * np.cos(k * u))
        assert val == pytest.approx(fourier_symbol(k, famq), abs=1e-10)


@given(st.floats(min_value=-26, max_value=26), st.floats(min_value=0, max_value=2))
@settings(max_examples=300, deadline=None)
def test_fourier_symbol_positive(k, q):
    # strictly positive wherever exp(-k^2) has not underflowed (|k| < 27)
    assert fourier_symbol(k, KernelFamily(q)) > 0.0


def test_tail_mass_symmetric_halves():
    left, right = tail_mass(0.0, KernelFamily(0.0))
    assert left == pytest.approx(0.5, abs=1e-14)
    assert right == pytest.approx(0.5, abs=1e-14)


def test_tail_mass_gaussian_closed_form():
    left, right = tail_mass(2.0, KernelFamily(0.0))
    expected = 0.5 * erfc(1.0)
    assert left == pytest.approx(expected, rel=1e-13)
    assert right == pytest.approx(expected, rel=1e-13)
    assert right == pytest.approx(0.078649, abs=1e-6)
    # quadrature verification
    u = np.linspace(2.0, 16.0, 1_400_001)
    assert right == pytest.approx(float(np.trapezoid(eval_k0(u), u)), abs=1e-10)


def test_tail_mass_quadrature_at_positive_q():
    fam = KernelFamily(1.0)
    _, right = tail_mass(1.5, fam)
    u = np.linspace(1.5, 16.0, 1_450_001)
    assert right == pytest.approx(float(np.trapezoid(np.abs(eval_kq(u, fam)), u)),
                                  abs=1e-9)


def test_tail_mass_monotone_in_threshold():
    for q in [0.0, 0.5, 1.0]:
        fam = KernelFamily(q)
        values = [tail_mass(t, fam)[1] for t in np.linspace(0.0, 8.0, 33)]
        assert all(a >= b - 1e-15 for a, b in zip(values[:-1], values[1:]))


def test_kernel_norms_base_values():
    norms = kernel_norms(1.0, 21)
    assert norms.a_values[0] == pytest.approx(1.0, abs=1e-12)
    assert norms.e_values[0] == pytest.approx(1.0 / SQRT_PI, abs=1e-12)


def test_kernel_norms_closed_form_at_q1():
    # a_1 = 1 - 2 erfc(u*/2) + 2 u* K0(u*) with u* = sqrt(6); e_1 telescopes
    # through values of Kq at 0 and at the derivative root sqrt(10)
    us = math.sqrt(6.0)
    a1 = 1.0 - 2.0 * erfc(us / 2.0) + 2.0 * us * eval_k0(us)
    fam = KernelFamily(1.0)
    assert kq_abs_mass(fam) == pytest.approx(a1, abs=1e-12)
    vs = math.sqrt(10.0)
    e1 = 2.0 * (eval_kq(0.0, fam) - 2.0 * eval_kq(vs, fam))
    assert kq_derivative_abs_mass(fam) == pytest.approx(e1, abs=1e-12)


def test_kernel_norms_suprema_frozen():
    norms = kernel_norms(1.0, 101)
    # regression values; independent oracle = dense Riemann sum, h = 1e-4
    assert norms.b_sup == pytest.approx(1.1418316262804378, rel=1e-12)
    assert norms.e_sup == pytest.approx(0.9389073776999057, rel=1e-12)
    u = np.arange(-14.0, 14.0, 1e-4)
    fam = KernelFamily(1.0)
    assert norms.b_sup == pytest.approx(
        float(np.sum(np.abs(eval_kq(u, fam)))) * 1e-4, abs=1e-7)
    assert norms.b_sup >= 1.0


def test_kernel_norms_monotone_in_q():
    norms = kernel_norms(1.0, 41)
    assert np.all(np.diff(norms.a_values) >= -1e-13)
    assert norms.b_sup >= np.max(norms.a_values)
    assert norms.e_sup >= np.max(norms.e_values)
    # a_q -> 1 as q -> 0
    assert norms.a_values[1] - 1.0 < 1e-3


def test_kernel_norms_validation():
    with pytest.raises(ValueError):
        kernel_norms(-1.0, 11)
    with pytest.raises(ValueError):
        kernel_norms(1.0, 1)


def test_unit_mass_for_all_q():
    for q in [0.0, 0.25, 0.5, 1.0]:
        fam = KernelFamily(q)
        assert riemann(lambda u: eval_kq(u, fam)) == pytest.approx(1.0, abs=1e-10)


def test_k1_cumulative_signed_formula():
    # antiderivative of K1 is -(K0)'(t) = (t/2) K0(t); check by quadrature
    for t in [-1.0, 0.0, 0.8, 2.5]:
        u = np.linspace(-16.0, t, 1_600_001)
        assert k1_cumulative(t) == pytest.approx(
            float(np.trapezoid(eval_k1(u), u)), abs=1e-10)


@pytest.mark.filterwarnings("ignore::UserWarning")
def test_abs_integral_reports_unreached_tolerance():
    from kinksolve.kernels import QuadratureAccuracyError, _abs_integral

    # an essential singularity inside the window defeats the adaptive rule
    nasty = lambda u: math.sin(1.0 / (u - 5.9876543)) if u != 5.9876543 else 0.0
    with pytest.raises(QuadratureAccuracyError):
        _abs_integral(nasty, [], 12.0, tail=lambda w: 0.0)


def test_erf_against_maclaurin_series():
    """The platform error function against the exact-rational series.

    erf(x) = (2/sqrt(pi)) sum (-1)^n x^(2n+1) / (n! (2n+1)); partial sums are
    accumulated in exact rational arithmetic, so the only rounding is the
    final multiplication.
    """
    for x_rat in [Fraction(1, 10), Fraction(1, 4), Fraction(1, 2),
                  Fraction(1, 1), Fraction(2, 1)]:
        total = Fraction(0)
        term_base = Fraction(1)
        fact = Fraction(1)
        for n in range(0, 80):
            if n > 0:
                fact *= n
            total += (-1) ** n * x_rat ** (2 * n + 1) / (fact * (2 * n + 1))
        series = 2.0 / SQRT_PI * float(total)
        assert math.erf(float(x_rat)) == pytest.approx(series, rel=5e-15)
        from scipy.special import erf as sp_erf
        assert float(sp_erf(float(x_rat))) == pytest.approx(series, rel=5e-15)
