"""q-Laguerre and little q-Legendre expansions of the q-Bernoulli polynomials.

The connection coefficients come in closed form as finite sums over the
beta numbers.  For the Legendre basis they are checked against the
Jackson-integral projection; for the Laguerre basis, by rebuilding the
polynomial pointwise.

Two commonly quoted constants are wrong: the Laguerre prefactor is off by a
factor that does not depend on m, and the Legendre squared norm is missing a
factor q^n.  The functions below use the corrected forms by default.
``displayed=True`` returns those quoted versions, for comparison.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import mpmath
from mpmath import mp, mpf

from .qbernoulli import BernoulliFamily, _betas_for, bernoulli_poly
from .qcore import (
    PoleError,
    QDomainError,
    QParams,
    _poch,
    _poch_inf,
    qintegral01,
    to_decimal,
    to_mpf,
)


class Basis(str, enum.Enum):
    QLAGUERRE = "QLAGUERRE"
    QLEGENDRE = "QLEGENDRE"

    @classmethod
    def parse(cls, value: "Basis | str") -> "Basis":
        if isinstance(value, Basis):
            return value
        text = str(value).upper()
        if not text.startswith("Q"):
            text = "Q" + text
        try:
            return cls(text)
        except ValueError:
            raise QDomainError(f"unknown basis {value!r}") from None


def _check_n(n: int) -> None:
    if not isinstance(n, int) or n < 0:
        raise QDomainError("n must be a non-negative integer")


# ---------------------------------------------------------------------------
# basis polynomials


def _laguerre_coeffs(n: int, alpha: mpf, q: mpf) -> list[mpf]:
    pa = q ** (alpha + 1)
    lead = _poch(pa, q, n) / _poch(q, q, n)
    qn = q ** (-n)
    return [
        lead
        * _poch(qn, q, k)
        / (_poch(pa, q, k) * _poch(q, q, k))
        * q ** (k * (k - 1) // 2)
        * q ** ((n + alpha + 1) * k)
        for k in range(n + 1)
    ]


def qlaguerre(n: int, alpha: object, x: object, params: QParams) -> mpf:
    """q-Laguerre polynomial L_n^alpha(x; q).

    Uses (1/(q;q)_n) 2phi1(q^-n, -x; 0; q, q^{n+alpha+1}), written out as a
    finite sum with the q^{k(k-1)/2} factor that comes with a zero lower
    parameter.
    """
    _check_n(n)
    with mp.workprec(params.workprec):
        alpha, x = to_mpf(alpha), to_mpf(x)
        if not alpha > -1:
            raise QDomainError("alpha must exceed -1")
        c = _laguerre_coeffs(n, alpha, params.q)
        return mpmath.polyval(c[::-1], x)


def laguerre_recurrence_residual(n: int, alpha: object, x: object, params: QParams) -> mpf:
    """|x a_n L_n + L_{n+1} - b_n L_n + d_n L_{n-1}| for n >= 1, scaled by the largest term."""
    if not isinstance(n, int) or n < 1:
        raise QDomainError("n must be at least 1")
    with mp.workprec(params.workprec):
        a, x = to_mpf(alpha), to_mpf(x)
        q = params.q
        an = q ** (2 * n + a + 1) / (1 - q ** (n + 1))
        dn = q * (1 - q ** (n + a)) / (1 - q ** (n + 1))
        bn = 1 + dn
        lm, l0, lp = (qlaguerre(m, a, x, params) for m in (n - 1, n, n + 1))
        terms = [x * an * l0, lp, -bn * l0, dn * lm]
        return abs(mpmath.fsum(terms)) / max(abs(t) for t in terms)


def _dq_iter(f, m: int, x: mpf, q: mpf) -> mpf:
    if m == 0:
        return f(x)
    return (_dq_iter(f, m - 1, q * x, q) - _dq_iter(f, m - 1, x, q)) / ((q - 1) * x)


def laguerre_rodrigues(n: int, alpha: object, x: object, params: QParams) -> mpf:
    """L_n^alpha(x; q) from the Rodrigues formula, by exact q-differencing (x > 0)."""
    _check_n(n)
    with mp.workprec(params.workprec):
        a, x = to_mpf(alpha), to_mpf(x)
        if not x > 0:
            raise QDomainError("Rodrigues evaluation needs x > 0")
        q, tol = params.q, params.trunc_rel_tol

        def w(y: mpf) -> mpf:
            return y ** (a + n) / _poch_inf(-y, q, tol)[0]

        pref = (1 - q) ** n / _poch(q, q, n) * _poch_inf(-x, q, tol)[0] * x ** (-a)
        return pref * _dq_iter(w, n, x, q)


def _legendre_coeffs(n: int, q: mpf) -> list[mpf]:
    return [
        _poch(q ** (-n), q, k) * _poch(q ** (n + 1), q, k) * q**k / _poch(q, q, k) ** 2 for k in range(n + 1)
    ]


def qlegendre(n: int, x: object, params: QParams) -> mpf:
    """Little q-Legendre polynomial P_n(x|q)."""
    _check_n(n)
    with mp.workprec(params.workprec):
        c = _legendre_coeffs(n, params.q)
        return mpmath.polyval(c[::-1], to_mpf(x))


def legendre_norm(n: int, params: QParams, *, displayed: bool = False) -> mpf:
    """Squared norm of P_n under the Jackson integral on [0, 1].

    The true value is (1-q) q^n / (1-q^{2n+1}).  ``displayed=True`` drops the
    q^n, as the commonly quoted constant does.
    """
    _check_n(n)
    with mp.workprec(params.workprec):
        q = params.q
        base = (1 - q) / (1 - q ** (2 * n + 1))
        return base if displayed else base * q**n


def legendre_inner(m: int, n: int, params: QParams) -> mpf:
    """Integral of P_m P_n over [0, 1] with the Jackson measure."""
    with mp.workprec(params.workprec):
        cm, cn = _legendre_coeffs(m, params.q), _legendre_coeffs(n, params.q)

        def f(x: mpf) -> mpf:
            return mpmath.polyval(cm[::-1], x) * mpmath.polyval(cn[::-1], x)

        return qintegral01(f, params)


# ---------------------------------------------------------------------------
# connection coefficients


@dataclass(frozen=True)
class ConnectionExpansion:
    basis: Basis
    family: BernoulliFamily
    n: int
    alpha: mpf
    q: mpf
    coeffs: tuple
    displayed: bool = False

    def basis_value(self, m: int, x: object, params: QParams) -> mpf:
        if self.basis is Basis.QLAGUERRE:
            return qlaguerre(m, self.alpha, x, params)
        return qlegendre(m, x, params)

    def to_json(self, bits: int = 256) -> dict:
        return {
            "basis": self.basis.value,
            "family": int(self.family),
            "n": self.n,
            "alpha": to_decimal(self.alpha, bits),
            "q": to_decimal(self.q, bits),
            "coeffs": [to_decimal(c, bits) for c in self.coeffs],
        }


def _family_weight(family: BernoulliFamily, n: int, k: int, q: mpf) -> mpf:
    if family is BernoulliFamily.K1:
        return q ** (mpf(k * (2 * n - k + 1)) / 2)
    if family is BernoulliFamily.K2:
        return q ** (n * k)
    return q ** (mpf(k * (4 * n - k + 1)) / 4)


def laguerre_displayed_factor(alpha: object, params: QParams) -> mpf:
    """Ratio of the quoted Laguerre prefactor to the correct one, q^m/(q^{alpha+1};q)_m.

    The ratio does not depend on m.  It equals
    -pi (q^{alpha+1};q)_inf (q^{-alpha};q)_inf / ((1-q)^2 (q;q)_inf^2 sin(alpha pi)).
    """
    with mp.workprec(params.workprec):
        a = to_mpf(alpha)
        if a == mpmath.floor(a):
            raise PoleError("the quoted prefactor has a pole at integer alpha", a)
        q, tol = params.q, params.trunc_rel_tol
        num = _poch_inf(q ** (a + 1), q, tol)[0] * _poch_inf(q ** (-a), q, tol)[0]
        den = (1 - q) ** 2 * _poch_inf(q, q, tol)[0] ** 2
        return -num / den * mpmath.pi / mpmath.sin(a * mpmath.pi)


def _laguerre_connection(family: BernoulliFamily, n: int, a: mpf, params: QParams, displayed: bool) -> list[mpf]:
    q = params.q
    b = _betas_for(family, a, q, n, params.workprec)
    factor = laguerre_displayed_factor(a, params) if displayed else mpf(1)
    out = []
    for m in range(n + 1):
        s = mpmath.fsum(
            _family_weight(family, n, k, q)
            * _poch(q ** (-n), q, k)
            * _poch(q ** (-k), q, m)
            * _poch(q ** (-a - k), q, k)
            / _poch(q, q, k)
            * b[n - k]
            for k in range(m, n + 1)
        )
        out.append(factor * q**m / _poch(q ** (a + 1), q, m) * s)
    return out


def _legendre_connection(family: BernoulliFamily, n: int, a: mpf, params: QParams, displayed: bool) -> list[mpf]:
    q = params.q
    b = _betas_for(family, a, q, n, params.workprec)
    out = []
    for k in range(n + 1):
        terms = []
        for m in range(k, n + 1):
            t = (
                (-1) ** m
                * _family_weight(family, n, m, q)
                * _poch(q ** (-n), q, m)
                * _poch(q ** (-m), q, k)
                / _poch(q, q, m + k + 1)
                * b[n - m]
            )
            if not displayed:
                t *= q ** (m * k)
            terms.append(t)
        lam = 1 - q ** (2 * k + 1)
        if displayed:
            lam *= q ** (-mpf(k * (k - 3)) / 2)
        out.append(lam * mpmath.fsum(terms))
    return out


def connection_coeffs(
    basis: Basis | str,
    family: BernoulliFamily | int | str,
    n: int,
    alpha: object,
    params: QParams,
    *,
    displayed: bool = False,
) -> ConnectionExpansion:
    """Coefficients C_0..C_n with B^{(k)}_{n,alpha} = sum_m C_m basis_m.

    For ``QLAGUERRE`` the basis is L_m^alpha.  The prefactor used is
    q^m/(q^{alpha+1};q)_m, which has no pole, so integer alpha is accepted
    except with ``displayed=True``.  For ``QLEGENDRE`` the inner sum carries
    q^{mk} and the outer factor is (1-q^{2k+1}).
    """
    basis = Basis.parse(basis)
    fam = BernoulliFamily.parse(family)
    _check_n(n)
    with mp.workprec(params.workprec):
        a = to_mpf(alpha)
        if not a > -1:
            raise QDomainError("alpha must exceed -1")
        if basis is Basis.QLAGUERRE:
            coeffs = _laguerre_connection(fam, n, a, params, displayed)
        else:
            coeffs = _legendre_connection(fam, n, a, params, displayed)
        return ConnectionExpansion(basis, fam, n, a, params.q, tuple(coeffs), displayed)


def legendre_coeff_oracle(
    family: BernoulliFamily | int | str,
    n: int,
    k: int,
    alpha: object,
    params: QParams,
    *,
    displayed: bool = False,
) -> mpf:
    """C_k from projecting onto P_k with the Jackson integral.

    Uses the true norm, so C_k = q^{-k}(1-q^{2k+1})/(1-q) * int P_k B d_qx.
    ``displayed=True`` drops the q^{-k}.
    """
    fam = BernoulliFamily.parse(family)
    _check_n(n)
    if not isinstance(k, int) or k < 0:
        raise QDomainError("k must be a non-negative integer")
    with mp.workprec(params.workprec):
        q = params.q
        B = bernoulli_poly(fam, n, alpha, params)
        pk = _legendre_coeffs(k, q)

        def f(x: mpf) -> mpf:
            return mpmath.polyval(pk[::-1], x) * B(x)

        integral = qintegral01(f, params)
        c = (1 - q ** (2 * k + 1)) / (1 - q) * integral
        return c if displayed else c * q ** (-k)


def expansion_residual(exp: ConnectionExpansion, xs: Sequence, params: QParams) -> mpf:
    """max over xs of |sum_m C_m basis_m(x) - B(x)|, relative to the size of the terms."""
    if len(xs) == 0:
        raise QDomainError("xs must be non-empty")
    with mp.workprec(params.workprec):
        B = bernoulli_poly(exp.family, exp.n, exp.alpha, params)
        worst = mpf(0)
        for x in xs:
            x = to_mpf(x)
            terms = [c * exp.basis_value(m, x, params) for m, c in enumerate(exp.coeffs)]
            val = B(x)
            scale = max([mpf(1), abs(val)] + [abs(t) for t in terms])
            worst = max(worst, abs(mpmath.fsum(terms) - val) / scale)
        return worst


__all__ = [
    "Basis",
    "ConnectionExpansion",
    "connection_coeffs",
    "expansion_residual",
    "laguerre_displayed_factor",
    "laguerre_recurrence_residual",
    "laguerre_rodrigues",
    "legendre_coeff_oracle",
    "legendre_inner",
    "legendre_norm",
    "qlaguerre",
    "qlegendre",
]
