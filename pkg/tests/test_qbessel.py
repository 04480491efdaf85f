from __future__ import annotations

import json

import mpmath
import pytest
from hypothesis import given, strategies as st
from mpmath import mp, mpf

from conftest import rel
from qbb.qbessel import (
    BesselKind,
    ZeroSearchError,
    ZeroTable,
    bessel_zeros,
    g_real,
    h_coeffs,
    hahn_factor,
    jbessel,
    jbessel_derivative,
    modified_coeffs,
    zero_free_check,
    zero_sum_terms,
)
from qbb.qcore import QDomainError, QParams, phi21, qexp


@pytest.fixture(scope="module")
def j2_table():
    return bessel_zeros("J2", "0.5", QParams("0.5"), 8)


@pytest.mark.parametrize("kind", ["J1", "J2", "J3"])
def test_g_form_at_zero(kind, p05):
    assert jbessel(kind, "g_form", "0.3", 0, p05) == 1


def test_kind_parsing():
    assert BesselKind.parse(2) is BesselKind.J2
    assert BesselKind.parse("j3") is BesselKind.J3
    with pytest.raises(QDomainError):
        BesselKind.parse("J4")


def test_domain_errors(p05):
    with pytest.raises(QDomainError):
        jbessel("J2", "modified", -1, 0.5, p05)
    with pytest.raises(QDomainError):
        jbessel("J1", "modified", 0.5, 2.5, p05)
    with pytest.raises(QDomainError):
        jbessel("J2", "bogus", 0.5, 0.5, p05)


def test_hahn_identity_example(wp):
    t = mpf("0.7")
    g1 = jbessel("J1", "g_form", "0.3", t, wp)
    g2 = jbessel("J2", "g_form", "0.3", t, wp)
    e = qexp("big_E", t / 2, wp) * qexp("big_E", -t / 2, wp)
    assert rel(g2, e * g1) < mpf(2) ** -240
    assert rel(hahn_factor(t, wp), e) < mpf(2) ** -240


@given(
    st.floats(min_value=-0.9, max_value=4),
    st.floats(min_value=0.1, max_value=0.9),
    st.floats(min_value=-0.99, max_value=0.99),
)
def test_hahn_identity(alpha, q, s):
    p = QParams(q)
    with mp.workprec(p.workprec):
        t = mpf(s) / (1 - p.q)
        g1 = jbessel("J1", "g_form", alpha, t, p)
        g2 = jbessel("J2", "g_form", alpha, t, p)
        assert rel(g2, hahn_factor(t, p) * g1) < mpf(10) ** -(0.25 * 256 * 0.30103)


@given(
    st.floats(min_value=-0.45, max_value=4),
    st.floats(min_value=0.1, max_value=0.9),
    st.floats(min_value=-0.95, max_value=0.95),
)
def test_phi21_closed_form(alpha, q, z):
    p = QParams(q)
    with mp.workprec(p.workprec):
        a, qq, z = mpf(alpha), p.q, mpf(z)
        t = 2 * z / (1 - qq)
        lhs = phi21(qq ** (a + 0.5), -(qq ** (a + 0.5)), qq ** (2 * a + 1), z, p)
        rhs = jbessel("J1", "g_form", a, t, p) * qexp("big_E", t / 2, p)
        assert rel(lhs, rhs) < mpf(10) ** -30


def test_raw_form_prefactor(wp):
    # J2 raw = (q^{a+1};q)_inf/(q;q)_inf (t/2)^a * modified
    a, t, q = mpf("0.5"), mpf("1.3"), wp.q
    raw = jbessel("J2", "raw", a, t, wp)
    mod = jbessel("J2", "modified", a, t, wp)
    pref = mpmath.qp(q ** (a + 1), q) / mpmath.qp(q, q) * (t / 2) ** a
    assert rel(raw, pref * mod) < mpf(2) ** -240


def test_full_output_certificate(wp):
    val, cert = jbessel("J3", "modified", "0.2", 5, wp, full_output=True)
    assert cert.terms_used > 0 and cert.tail_bound <= abs(val) * mpf(2) ** -250


def test_zero_free_examples():
    assert zero_free_check("J2", 0, QParams("0.5"))
    assert not zero_free_check("J2", "-0.9", QParams("0.99"))
    assert zero_free_check("J2", 50, QParams("0.5"))
    with pytest.raises(QDomainError):
        zero_free_check("J1", 0, QParams("0.5"))


@pytest.mark.parametrize("kind", ["J2", "J3"])
@pytest.mark.parametrize("alpha,q", [("0", "0.5"), ("1.5", "0.3"), ("-0.5", "0.2"), ("3", "0.8")])
def test_zero_free_region_has_no_sign_change(kind, alpha, q):
    p = QParams(q, 128)
    if not zero_free_check(kind, alpha, p):
        pytest.skip("criterion does not apply")
    with mp.workprec(p.workprec):
        for i in range(1, 201):
            assert g_real(kind, alpha, mpf(i) / 200, p) > 0


def _naive_j2(z, alpha, Q):
    """Modified J2 by direct summation of its defining series."""
    s, n, term = mpf(0), 0, mpf(1)
    while True:
        term = (-1) ** n * Q ** (n * (n + alpha)) * (z / 2) ** (2 * n) / (mpmath.qp(Q, Q, n) * mpmath.qp(Q ** (alpha + 1), Q, n))
        s += term
        if n > 5 and abs(term) < mpf(10) ** -25:
            return s
        n += 1


def test_zeros_match_dense_scan(j2_table):
    with mp.workdps(30):
        a, Q = mpf("0.5"), mpf("0.25")
        found = []
        prev_z, prev_v = mpf("0.1"), _naive_j2(mpf("0.1"), a, Q)
        for i in range(1, 4991):
            z = mpf("0.1") + mpf(i) / 100
            v = _naive_j2(z, a, Q)
            if v * prev_v < 0:
                found.append(mpmath.findroot(lambda x: _naive_j2(x, a, Q), (prev_z, z), solver="bisect"))
            prev_z, prev_v = z, v
        computed = [z for z in j2_table.zeros if z < 50]
        assert len(found) == len(computed) == 2
        for x, y in zip(found, computed):
            assert abs(x - y) < mpf(10) ** -20 * y


def test_zero_table_invariants(j2_table):
    p = QParams("0.5")
    t = j2_table
    with mp.workprec(p.workprec):
        assert t.certified_count == 8
        assert all(z > 0 for z in t.zeros)
        assert all(a < b for a, b in zip(t.zeros, t.zeros[1:]))
        assert all(d != 0 for d in t.dmod)
        sq = p.squared()
        for z, (lo, hi) in zip(t.zeros, t.brackets):
            assert lo <= z <= hi
            assert hi - lo < mpf(2) ** -128 * z
            a = jbessel("J2", "modified", t.alpha, lo, sq)
            b = jbessel("J2", "modified", t.alpha, hi, sq)
            assert a * b <= 0
        ratio = t.zeros[-2] / t.zeros[-1]
        assert abs(ratio / p.q**2 - 1) < mpf("0.2")


def test_value_at_first_zero_is_tiny(j2_table):
    p = QParams("0.5")
    with mp.workprec(p.workprec):
        z = j2_table.zeros[0]
        c = modified_coeffs("J2", j2_table.alpha, p.q**2, 40)
        biggest = max(abs(ck) * z ** (2 * k) for k, ck in enumerate(c))
        val = jbessel("J2", "modified", j2_table.alpha, z, p.squared())
        assert abs(val) < mpf(10) ** (-0.2 * 256) * biggest


def test_dmod_is_derivative(j2_table):
    p = QParams("0.5")
    with mp.workprec(p.workprec):
        z = j2_table.zeros[1]
        d = jbessel_derivative("J2", j2_table.alpha, z, p.squared())
        assert rel(d, j2_table.dmod[1]) < mpf(2) ** -200


def test_j3_zeros_are_ordered():
    t = bessel_zeros("J3", "0.5", QParams("0.5"), 6)
    with mp.workprec(300):
        assert all(a < b for a, b in zip(t.zeros, t.zeros[1:]))
        # J3 zeros grow like q^{-m}, so the ratio tends to q
        assert abs(t.zeros[-2] / t.zeros[-1] / mpf("0.5") - 1) < mpf("0.2")


def test_zero_table_json_roundtrip(j2_table):
    again = ZeroTable.from_json(json.loads(json.dumps(j2_table.to_json())))
    # decimal output keeps precision_bits, not the guard bits
    with mp.workprec(300):
        for a, b in zip(again.zeros + again.dmod, j2_table.zeros + j2_table.dmod):
            assert rel(a, b) < mpf(2) ** -250
    assert again.head(3).certified_count == 3


def test_zero_cache_is_used(tmp_path):
    p = QParams("0.4", 128)
    first = bessel_zeros("J2", "0.25", p, 4, cache_dir=tmp_path)
    files = list(tmp_path.iterdir())
    assert len(files) == 1
    again = bessel_zeros("J2", "0.25", p, 3, cache_dir=tmp_path)
    assert again.certified_count == 3
    with mp.workprec(200):
        assert all(rel(a, b) < mpf(2) ** -124 for a, b in zip(again.zeros, first.zeros))


def test_zero_budget_exhaustion():
    with pytest.raises(ZeroSearchError) as info:
        bessel_zeros("J2", "0.5", QParams("0.5", 128), 10, budget=30)
    assert info.value.partial is not None


def test_zero_kind_restriction(p05):
    with pytest.raises(QDomainError):
        bessel_zeros("J1", "0.5", p05, 3)


def test_h_coefficients_j3_zero_sum_agrees():
    p = QParams("0.5")
    with mp.workprec(p.workprec):
        a = h_coeffs(3, "0.5", p, 4)
        b = h_coeffs(3, "0.5", p, 4, 40, method="ZERO_SUM")
        for x, y in zip(a, b):
            assert rel(x, y) < mpf(10) ** -60


def test_h_coefficients_j2_zero_sum_rate():
    p = QParams("0.5")
    table = bessel_zeros("J2", "0.5", p, 12)
    with mp.workprec(p.workprec):
        exact = h_coeffs(2, "0.5", p, 3)
        approx = h_coeffs(2, "0.5", p, 3, 12, method="ZERO_SUM", zeros=table)
        # each h_k sum converges geometrically; k >= 2 is far ahead of k = 1
        assert rel(approx[0], exact[0]) < mpf(10) ** -6
        assert rel(approx[2], exact[2]) < mpf(10) ** -30
        for k in (1, 2, 3):
            terms = zero_sum_terms(2, "0.5", p, k, table)
            r = abs(terms[-1] / terms[-2])
            assert r < p.q ** (4 * k - 2) * mpf("1.1")


def test_h_coeffs_bad_args(p05):
    with pytest.raises(QDomainError):
        h_coeffs(1, 0.5, p05, 3)
    with pytest.raises(QDomainError):
        h_coeffs(2, 0.5, p05, 0)
    with pytest.raises(QDomainError):
        h_coeffs(2, 0.5, p05, 3, method="MAGIC")
