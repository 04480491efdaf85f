from __future__ import annotations

import pytest
from hypothesis import given, strategies as st
from mpmath import mp, mpf, nsum, inf

from conftest import rel
from qbb.qcore import (
    ConvergenceError,
    PoleError,
    Poly,
    QDomainError,
    QParams,
    decimal_digits,
    phi21,
    qcombinatorics,
    qdiff,
    qexp,
    qgamma,
    qgamma_beta,
    qintegral01,
    qpochhammer,
    qtrig,
    series_inverse,
    series_mul,
    to_decimal,
)

qs = st.floats(min_value=0.05, max_value=0.95)


def test_qpochhammer_examples(wp):
    assert qpochhammer(0.7, wp, 0) == 1
    assert qpochhammer(1, wp) == 0
    assert qpochhammer(0.5, wp, 2) == mpf("0.375")


def test_qpochhammer_infinite_tail_bound():
    p = QParams("0.9")
    with mp.workprec(p.workprec):
        val, cert = qpochhammer(0.3, p, full_output=True)
        assert cert.terms_used > 10
        assert cert.tail_bound < p.tolerance(1) * abs(val)


def test_qpochhammer_rejects_bad_length(p05):
    with pytest.raises(QDomainError):
        qpochhammer(0.3, p05, -1)


def test_combinatorics_examples(wp):
    c = qcombinatorics(0, 0, wp)
    assert (c.qint, c.qfact, c.qbinom) == (0, 1, 1)
    assert qcombinatorics(3, 1, wp).qint == mpf("1.75")


@pytest.mark.parametrize("q", ["0.2", "0.55", "0.9"])
def test_qbinom_4_2(q):
    p = QParams(q)
    with mp.workprec(p.workprec):
        q = p.q
        assert rel(qcombinatorics(4, 2, p).qbinom, (1 + q**2) * (1 + q + q**2)) < mpf(2) ** -250


@given(qs)
def test_pascal_rule(q):
    p = QParams(q)
    with mp.workprec(p.workprec):
        for n in range(2, 26):
            for k in range(1, n):
                lhs = qcombinatorics(n, k, p).qbinom
                rhs = qcombinatorics(n - 1, k - 1, p).qbinom + p.q**k * qcombinatorics(n - 1, k, p).qbinom
                assert rel(lhs, rhs) < mpf(2) ** -240


@given(qs)
def test_gamma_matches_factorial(q):
    p = QParams(q)
    with mp.workprec(p.workprec):
        for n in range(31):
            assert rel(qgamma(n + 1, p), qcombinatorics(n, 0, p).qfact) < mpf(2) ** -240


def test_gamma_examples(wp):
    assert rel(qgamma(2, wp), 1) < mpf(2) ** -250
    assert rel(qgamma(3, wp), mpf("1.5")) < mpf(2) ** -250
    assert rel(qgamma_beta(1, 1, wp)[1], 1) < mpf(2) ** -250


def test_gamma_poles(p05):
    with pytest.raises(PoleError):
        qgamma(-2, p05)
    with pytest.raises(QDomainError):
        qgamma_beta(0, 1, p05)


@pytest.mark.parametrize("kind", ["small_e", "big_E", "sym_exp"])
def test_qexp_at_zero(kind, wp):
    assert qexp(kind, 0, wp) == 1


def test_qexp_reciprocity_example(wp):
    assert rel(qexp("small_e", "0.3", wp) * qexp("big_E", "-0.3", wp), 1) < 10 * mpf(2) ** -256


@given(qs, st.floats(min_value=-0.99, max_value=0.99))
def test_qexp_reciprocity(q, s):
    p = QParams(q)
    with mp.workprec(p.workprec):
        x = mpf(s) / (1 - p.q)
        assert rel(qexp("small_e", x, p) * qexp("big_E", -x, p), 1) < 10 * mpf(2) ** -256


def test_small_e_radius(p05):
    with pytest.raises(QDomainError):
        qexp("small_e", 2, p05)


def test_exp_q_partial_sum(wp):
    q = wp.q
    brute = sum(q ** (mpf(n * (n - 1)) / 4) / qcombinatorics(n, 0, wp).qfact for n in range(61))
    assert rel(qexp("sym_exp", 1, wp), brute) < mpf(2) ** -240


@pytest.mark.parametrize("kind", ["sin_q", "Sin_q", "S_q", "Sh_q"])
def test_odd_trig_at_zero(kind, wp):
    assert qtrig(kind, 0, wp) == 0


def test_trig_constant_terms(wp):
    assert qtrig("Cos_q", 0, wp) == 1
    z = mpf("0.4")
    lhs = qtrig("Ch_q", z, wp) ** 2 - qtrig("Sh_q", z, wp) ** 2
    rhs = qexp("sym_exp", z, wp) * qexp("sym_exp", -z, wp)
    assert rel(lhs, rhs) < mpf(2) ** -240


def test_trig_large_argument_is_stable():
    # the precision boost keeps Cos_q accurate where its terms are huge
    lo, hi = QParams("0.5", 128), QParams("0.5", 256)
    with mp.workprec(hi.workprec):
        a = qtrig("Cos_q", 300, lo)
        b = qtrig("Cos_q", 300, hi)
        assert rel(a, b) < mpf(2) ** -100


def test_trig_rejects_unknown(p05):
    with pytest.raises(QDomainError):
        qtrig("tan_q", 0.1, p05)


def test_qdiff_poly_examples(wp):
    assert qdiff("D_q", Poly((5,)), wp).degree == -1
    d = qdiff("D_q", Poly((0, 0, 0, 1)), wp)
    assert d.coeffs == (0, 0, mpf("1.75"))
    d = qdiff("delta_sym", Poly((0, 0, 1)), wp)
    q = wp.q
    assert rel(d[1], (1 + q) / mp.sqrt(q)) < mpf(2) ** -250
    assert rel(qdiff("delta_sym", lambda x: x * x, wp, z="0.7"), d("0.7")) < mpf(2) ** -240


@given(qs, st.sampled_from(["D_q", "D_qinv", "delta_sym"]), st.floats(min_value=0.05, max_value=3))
def test_qdiff_poly_matches_function_mode(q, kind, z):
    p = QParams(q)
    with mp.workprec(p.workprec):
        f = Poly(tuple(mpf(c) for c in (1, -2, 3, mpf(1) / 3, 5, -1)))
        exact = qdiff(kind, f, p)(z)
        quotient = qdiff(kind, lambda x: f(x), p, z=z)
        assert rel(quotient, exact) < mpf(10) ** -(256 * 0.25)


def test_qdiff_function_mode_needs_point(p05):
    with pytest.raises(QDomainError):
        qdiff("D_q", lambda x: x, p05)


def test_qintegral_examples(wp):
    assert rel(qintegral01(lambda x: 1, wp), 1) < mpf(2) ** -250
    assert rel(qintegral01(lambda x: x, wp), mpf(2) / 3) < mpf(2) ** -250
    q = wp.q
    assert abs(qintegral01(lambda x: 1 - (1 + q) * x, wp)) < mpf(2) ** -250


@given(qs, st.lists(st.integers(-9, 9), min_size=1, max_size=16))
def test_qintegral_fundamental_relation(q, coeffs):
    p = QParams(q)
    with mp.workprec(p.workprec):
        f = Poly(tuple(coeffs))
        lhs = qintegral01(qdiff("D_q", f, p), p)
        scale = max(1, f.max_abs())
        assert abs(lhs - (f(1) - f(0))) / scale < mpf(2) ** -230


def test_qintegral_unbounded_integrand(p05):
    with pytest.raises(ConvergenceError):
        qintegral01(lambda x: 1 / x**2, p05, max_terms=500)


def test_phi21_examples(wp):
    assert phi21("0.3", "0.4", "0.6", 0, wp) == 1
    q = wp.q
    a, b, c, z = 1 / q, mpf("0.3"), mpf("0.7"), mpf("0.2")
    two_terms = 1 + (1 - a) * (1 - b) / ((1 - q) * (1 - c)) * z
    assert rel(phi21(a, b, c, z, wp), two_terms) < mpf(2) ** -250


def test_phi21_domain(p05):
    with pytest.raises(QDomainError):
        phi21(0.1, 0.2, 0.3, 1.0, p05)
    with pytest.raises(PoleError):
        phi21(0.1, 0.2, 1, 0.5, p05)


def test_series_tail_bound_is_honest():
    # recomputing at doubled precision moves the value by less than the bound
    lo, hi = QParams("0.7", 128), QParams("0.7", 256)
    with mp.workprec(hi.workprec):
        val, cert = qexp("big_E", 3, lo, full_output=True)
        ref = qexp("big_E", 3, hi)
        assert abs(val - ref) <= cert.tail_bound + abs(ref) * mpf(2) ** -120


def test_series_helpers(wp):
    inv = series_inverse([1, -1], 6)
    assert inv == [1] * 6
    assert series_mul([1, 1], [1, 1], 3) == [1, 2, 1]
    # 1/(1-x) times (1-x) is 1
    assert series_mul(inv, [1, -1], 6) == [1, 0, 0, 0, 0, 0]


def test_qparams_validation():
    with pytest.raises(QDomainError):
        QParams("1.5")
    with pytest.raises(QDomainError):
        QParams("0.5", 16)
    with pytest.raises(QDomainError):
        QParams("0.5", 256, 2)
    p = QParams(0.1)
    with mp.workprec(p.workprec):
        assert p.q == mpf("0.1")  # floats go through their repr, not the binary value


def test_decimal_output():
    assert decimal_digits(256) >= 77
    with mp.workprec(300):
        x = mpf(1) / 3
        s = to_decimal(x, 256)
        assert s.startswith("0.3333") and len(s) > 70
        assert rel(mpf(s), x) < mpf(2) ** -250
        assert to_decimal(mpf(0), 256) in ("0.0", "0")
