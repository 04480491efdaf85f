from __future__ import annotations

import pytest
from hypothesis import given, strategies as st
from mpmath import mp, mpf

from conftest import rel
from qbb.qbernoulli import (
    EXACT_IDS,
    IDENTITY_IDS,
    BernoulliFamily,
    alsalam_poly,
    bernoulli_poly,
    beta3_numbers,
    beta_closed_form,
    beta_numbers,
    cexp_coeffs,
    default_grid,
    g3_reciprocal_coeffs,
    g_series,
    generating_function,
    identity_residual,
    identity_tolerance,
    run_identity_grid,
)
from qbb.qcore import QDomainError, QParams, qcombinatorics, series_mul

alphas = st.floats(min_value=-0.9, max_value=3)
qs = st.floats(min_value=0.1, max_value=0.9)


def test_family_parse():
    assert BernoulliFamily.parse(2) is BernoulliFamily.K2
    assert BernoulliFamily.parse("k3") is BernoulliFamily.K3
    with pytest.raises(QDomainError):
        BernoulliFamily.parse(4)


def test_beta_examples(wp):
    b = beta_numbers("0.5", wp, 3).values
    assert b[0] == 1 and b[1] == mpf(-1) / 2
    assert rel(b[2], mpf(3) / 28) < mpf(2) ** -250
    assert abs(b[3]) < mpf(2) ** -250
    b3 = beta3_numbers("0.5", wp, 3).values
    assert abs(b3[3]) < mpf(2) ** -250


def test_beta3_second_closed_form():
    p = QParams("0.5")
    with mp.workprec(p.workprec):
        q, a = p.q, mpf("0.3")
        r = q ** (2 * a + 2)
        expected = (mp.sqrt(q) * (1 - r) - q ** mpf(1.5) * (1 - q)) / (4 * (1 - r))
        assert rel(beta3_numbers(a, p, 2).values[2], expected) < mpf(2) ** -240


@given(alphas, qs)
def test_closed_forms_match_recurrence(alpha, q):
    p = QParams(q)
    with mp.workprec(p.workprec):
        b = beta_numbers(alpha, p, 5).values
        b3 = beta3_numbers(alpha, p, 5).values
        for n in range(1, 6):
            assert rel(beta_closed_form(1, n, alpha, p), b[n]) < mpf(10) ** -60
        for n in (1, 2, 3, 5):
            assert rel(beta_closed_form(3, n, alpha, p), b3[n]) < mpf(10) ** -60


def test_beta3_fourth_closed_form_is_off():
    # the quoted beta^{(3)}_4 formula does not match the recurrence
    p = QParams("0.5")
    with mp.workprec(p.workprec):
        b3 = beta3_numbers("0.3", p, 4).values[4]
        assert rel(beta_closed_form(3, 4, "0.3", p), b3) > mpf("0.1")


@given(alphas, qs)
def test_recurrences_agree(alpha, q):
    p = QParams(q)
    with mp.workprec(p.workprec):
        for fn in (beta_numbers, beta3_numbers):
            a = fn(alpha, p, 40, "REC_Q1902").values
            b = fn(alpha, p, 40, "REC_YY").values
            for x, y in zip(a, b):
                assert rel(x, y) < mpf(2) ** -(256 - 16)


def test_beta_sequence_shape(p05):
    seq = beta_numbers("0.5", p05, 7)
    assert len(seq.values) == 8 and seq.method == "REC_Q1902"
    with pytest.raises(QDomainError):
        beta_numbers("0.5", p05, 3, "NEWTON")
    with pytest.raises(QDomainError):
        beta_numbers("-1", p05, 3)


def test_polynomial_small_degrees(wp):
    b = bernoulli_poly(2, 1, "0.5", wp)
    assert b.coeffs == (mpf(-1) / 2, 1)
    assert bernoulli_poly(1, 0, "0.5", wp).coeffs == (1,)
    for k in (1, 2, 3):
        assert bernoulli_poly(k, 6, "0.7", wp).degree == 6


def test_polynomial_constant_term_is_beta(wp):
    b = beta_numbers("0.7", wp, 6).values
    b3 = beta3_numbers("0.7", wp, 6).values
    for n in range(7):
        assert rel(bernoulli_poly(1, n, "0.7", wp)(0), b[n]) < mpf(2) ** -240
        assert rel(bernoulli_poly(2, n, "0.7", wp)(0), b[n]) < mpf(2) ** -240
        assert rel(bernoulli_poly(3, n, "0.7", wp)(0), b3[n]) < mpf(2) ** -240


@pytest.mark.parametrize("k", [1, 2, 3])
def test_generating_function_partial_sums(k, wp):
    alpha, x, t = mpf("0.4"), mpf("0.3"), mpf("0.6")
    closed = generating_function(k, alpha, x, t, wp)
    partial = mpf(0)
    errs = []
    for n in range(40):
        partial += bernoulli_poly(k, n, alpha, wp)(x) * t**n / qcombinatorics(n, 0, wp).qfact
        errs.append(abs(partial - closed))
    assert errs[-1] < mpf(10) ** -12
    assert errs[-1] < errs[10] < errs[2]


def test_cexp_coefficients():
    for q in ("0.3", "0.5", "0.8"):
        p = QParams(q)
        with mp.workprec(p.workprec):
            a = cexp_coeffs(p, 10)
            b = cexp_coeffs(p, 10, "PARTITION_SUM")
            assert a[0] == 1 and rel(a[1], -1) < mpf(2) ** -250
            for x, y in zip(a, b):
                assert abs(x - y) < mpf(2) ** -230


def test_g3_reciprocal(wp):
    c = g3_reciprocal_coeffs("0.4", wp, 12)
    assert rel(c[0], 1) < mpf(2) ** -250
    assert abs(c[1]) < mpf(2) ** -250
    prod = series_mul(c, g_series(3, "0.4", wp, 12), 13)
    assert rel(prod[0], 1) < mpf(2) ** -240
    assert all(abs(v) < mpf(2) ** -230 for v in prod[1:])


def test_alsalam(wp):
    h = alsalam_poly("H", 3, wp)
    assert h.coeffs[0] == 1 and h.coeffs[3] == 1
    assert rel(h.coeffs[1], qcombinatorics(3, 1, wp).qbinom) < mpf(2) ** -250
    with pytest.raises(QDomainError):
        alsalam_poly("K", 2, wp)


def test_identity_examples():
    p = QParams("0.5")
    r = identity_residual("ODD_HALF_ZERO", {"k": 1, "n": 2, "alpha": "0.7", "q": "0.5"}, p)
    assert r.passed and r.residual < mpf(10) ** -40
    r = identity_residual("QDIFF", {"k": 3, "n": 6, "alpha": "0.2", "q": "0.6"}, p)
    assert r.passed and r.residual <= identity_tolerance("QDIFF", p)
    r = identity_residual("DUALITY_Q_INV", {"n": 4, "alpha": "0.5", "q": "0.5", "x": "0.3"}, p)
    assert r.passed


def test_tolerances():
    p = QParams("0.5")
    with mp.workprec(p.workprec):
        assert identity_tolerance("CROSS_12", p) == mpf(2) ** -128
        for i in EXACT_IDS:
            assert identity_tolerance(i, p) < mpf(2) ** -200


@pytest.mark.parametrize("identity_id", IDENTITY_IDS)
def test_identity_reduced_grid(identity_id):
    # the full default grids run in the acceptance suite
    p = QParams("0.5")
    pts = [pt for pt in default_grid(identity_id) if pt.get("n") in (1, 4, 6) and pt.get("alpha", "0.5") in ("-0.5", "0.5", "3")]
    assert pts
    reports = run_identity_grid(identity_id, p, pts)
    bad = [r.to_json() for r in reports if not r.passed]
    assert not bad


def test_identity_report_json():
    r = identity_residual("HALF_POINT", {"k": 1, "n": 3, "alpha": "0.5", "q": "0.5"}, QParams("0.5"))
    d = r.to_json()
    assert d["id"] == "HALF_POINT" and d["pass"] is True
    assert isinstance(d["residual"], str)


def test_identity_errors(p05):
    with pytest.raises(QDomainError):
        identity_residual("NOPE", {"n": 1}, p05)
    with pytest.raises(QDomainError):
        identity_residual("CROSS_12", {"n": -1}, p05)
    with pytest.raises(QDomainError):
        default_grid("NOPE")
