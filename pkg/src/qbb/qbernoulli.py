"""Generalized q-Bernoulli numbers and polynomials, and their identity catalog.

The numbers are computed from the linear recurrences that follow from the
generating functions.  The recurrences depend on alpha only through
``p = q**(2*alpha + 2)``, so the solvers take ``p`` directly.  The
polynomials are built from the numbers by q-binomial convolution.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence

import mpmath
from mpmath import mp, mpf

from .qbessel import BesselKind, h_coeffs, jbessel, modified_coeffs
from .qcore import (
    Poly,
    QDomainError,
    QParams,
    _poch,
    _qbinom,
    _qfact,
    _qint,
    qexp,
    series_inverse,
    series_mul,
    to_decimal,
    to_mpf,
)


class BernoulliFamily(enum.IntEnum):
    K1 = 1
    K2 = 2
    K3 = 3

    @classmethod
    def parse(cls, value: "BernoulliFamily | str | int") -> "BernoulliFamily":
        if isinstance(value, BernoulliFamily):
            return value
        text = str(value).upper().lstrip("K")
        try:
            return cls(int(text))
        except ValueError:
            raise QDomainError(f"unknown family {value!r}") from None


BETA_METHODS = ("REC_Q1902", "REC_YY")


@dataclass(frozen=True)
class BetaSequence:
    family: str  # "shared_12" or "k3"
    alpha: mpf
    q: mpf
    values: tuple
    method: str

    def __getitem__(self, n: int) -> mpf:
        return self.values[n]

    def __len__(self) -> int:
        return len(self.values)


# ---------------------------------------------------------------------------
# raw solvers (current precision, any base q != 1)


def _half_ratio(a: mpf, q: mpf, m: int) -> mpf:
    """(a; q^2)_m / (a; q)_m with the shared factor (1 - a) cancelled.

    Stays finite at a = 1 (alpha = -1/2).
    """
    r = mpf(1)
    for i in range(1, m):
        r *= (1 - a * q ** (2 * i)) / (1 - a * q**i)
    return r


def _rec_weights(p: mpf, q: mpf, kmax: int, k3: bool) -> list[mpf]:
    """(1-q)^{2k} [q^{k^2+k/2}] / (4^k (q^2, p; q^2)_k) for k = 0..kmax."""
    q2 = q * q
    out = []
    for k in range(kmax + 1):
        w = (1 - q) ** (2 * k) / (4**k * _poch(q2, q2, k) * _poch(p, q2, k))
        if k3:
            w *= q ** (k * k + mpf(k) / 2)
        out.append(w)
    return out


def _beta_solve(p: mpf, q: mpf, N: int, *, k3: bool = False, method: str = "REC_Q1902") -> list[mpf]:
    """beta_0..beta_N from p = q^(2 alpha + 2) and base q."""
    facts = [_qfact(n, q) for n in range(N + 1)]
    b = [mpf(1)]
    if method == "REC_Q1902":
        w = _rec_weights(p, q, N // 2, k3)
        for n in range(1, N + 1):
            rhs = (mpf(-1) / 2) ** n / facts[n]
            if k3:
                rhs *= q ** (mpf(n * (n - 1)) / 4)
            s = mpmath.fsum(w[k] * b[n - 2 * k] / facts[n - 2 * k] for k in range(1, n // 2 + 1))
            b.append((rhs - s) * facts[n])
        return b
    if method == "REC_YY":
        q2 = q * q
        for n in range(1, N + 1):
            terms = []
            for k in range(n // 2):
                t = ((1 - q) / 2) ** (2 * k) * b[n - 2 * k - 2] / (
                    facts[n - 2 * k - 2] * _poch(q2, q2, k + 1) * _poch(p, q2, k + 1)
                )
                if k3:
                    t *= q ** (k * k + mpf(5 * k) / 2)
                terms.append(t)
            lead = -facts[n] * (1 - q) ** 2 / 4
            tail = (mpf(-1) / 2) ** n
            if k3:
                lead *= q ** mpf(1.5)
                tail *= q ** (mpf(n * (n - 1)) / 4)
            b.append(lead * mpmath.fsum(terms) + tail)
        return b
    raise QDomainError(f"unknown method {method!r}")


@lru_cache(maxsize=4096)
def _beta_cached(alpha: mpf, q: mpf, N: int, k3: bool, method: str, prec: int) -> tuple:
    # The recurrences build small values out of O(1) terms, so beta_n loses
    # about -log2|beta_n| bits.  Solve twice, 64 bits apart: genuine values
    # agree, exact zeros (alpha = +-1/2) show up as noise that shrinks with
    # the precision and are returned as 0.  Guard bits grow until every
    # nonzero value is stable.
    extra = int(3 * N * -math.log2(float(q))) + 32

    def solve(bits: int) -> list[mpf]:
        with mp.workprec(bits):
            return _beta_solve(q ** (2 * alpha + 2), q, N, k3=k3, method=method)

    for _ in range(6):
        lo, hi = solve(prec + extra), solve(prec + extra + 64)
        with mp.workprec(prec + extra + 64):
            noise = mpf(2) ** (16 - prec - extra)
            out, grow = [], 0
            for a, b in zip(lo, hi):
                if abs(a - b) <= abs(b) * mpf(2) ** -(prec + 8):
                    out.append(b)
                elif abs(b) < noise:
                    out.append(mpf(0))
                else:
                    out.append(b)
                    grow = max(grow, -int(mpmath.log(abs(b), 2)) + 64)
        if not grow:
            break
        extra = max(2 * extra, grow)
    with mp.workprec(prec):
        return tuple(+v for v in out)


def _check(alpha: mpf, N: int) -> None:
    if not alpha > -1:
        raise QDomainError("alpha must exceed -1")
    if not isinstance(N, int) or N < 0:
        raise QDomainError("N must be a non-negative integer")


def beta_numbers(alpha: object, params: QParams, N: int, method: str = "REC_Q1902") -> BetaSequence:
    """beta_{0..N, alpha}(q), shared by the first two families.

    >>> [float(b) for b in beta_numbers(0.5, QParams(0.5), 2).values]
    [1.0, -0.5, 0.10714285714285714]
    """
    if method not in BETA_METHODS:
        raise QDomainError(f"unknown method {method!r}")
    with mp.workprec(params.workprec):
        alpha = to_mpf(alpha)
        _check(alpha, N)
        vals = _beta_cached(alpha, params.q, N, False, method, params.workprec)
    return BetaSequence("shared_12", alpha, params.q, vals, method)


def beta3_numbers(alpha: object, params: QParams, N: int, method: str = "REC_Q1902") -> BetaSequence:
    """beta^{(3)}_{0..N, alpha}(q) for the third family."""
    if method not in BETA_METHODS:
        raise QDomainError(f"unknown method {method!r}")
    with mp.workprec(params.workprec):
        alpha = to_mpf(alpha)
        _check(alpha, N)
        vals = _beta_cached(alpha, params.q, N, True, method, params.workprec)
    return BetaSequence("k3", alpha, params.q, vals, method)


def _betas_for(family: BernoulliFamily, alpha: mpf, q: mpf, N: int, prec: int) -> tuple:
    return _beta_cached(alpha, q, N, family is BernoulliFamily.K3, "REC_Q1902", prec)


def beta_closed_form(family: BernoulliFamily | int | str, n: int, alpha: object, params: QParams) -> mpf:
    """Quoted closed forms for beta_1..beta_5 and beta^{(3)}_1..beta^{(3)}_5.

    These are kept for comparison only; the recurrences are authoritative.
    The beta^{(3)}_4 formula disagrees with the recurrence.
    """
    family = BernoulliFamily.parse(family)
    if n not in (1, 2, 3, 4, 5):
        raise QDomainError("closed forms exist for n = 1..5 only")
    with mp.workprec(params.workprec):
        q = params.q
        a = to_mpf(alpha)
        p = q ** (2 * a + 2)
        p4 = q ** (2 * a + 4)
        q2 = q * q
        h = mpf(1) / 2
        if family is not BernoulliFamily.K3:
            if n == 1:
                return -h
            if n == 2:
                return q * (1 - q ** (2 * a + 1)) / (4 * (1 - p))
            if n == 3:
                return -(q**3) * (1 - q ** (2 * a - 1)) / (8 * (1 - p))
            if n == 4:
                return (
                    mpf(1) / 16
                    - (q + q**3) * (1 - q**3) * (1 - q ** (2 * a + 1)) / (16 * (1 - p) ** 2)
                    - (1 - q) * (1 - q**3) / (16 * _poch(p, q2, 2))
                )
            return (
                (1 + q**2) * (1 - q**5) * (q**3 - p) / (32 * (1 - p) ** 2)
                + (1 - q**3) * (1 - q**5) / (32 * _poch(p, q2, 2))
                - mpf(1) / 32
            )
        r = mpmath.sqrt(q)
        if n == 1:
            return -h
        if n == 2:
            return (r * (1 - p) - r * q * (1 - q)) / (4 * (1 - p))
        if n == 3:
            return -r * q * (q**3 - p) / (8 * (1 - p))
        den = (1 - p) ** 2 * (1 - p4)
        if n == 4:
            return (
                q**3 * _poch(p, q2, 2) * (1 - p) / (16 * den)
                - _qint(3, q) * q**5 * (1 - q) ** 2 * (1 - p) / (16 * den)
                + _qint(4, q) * _qint(3, q) * r * q * (1 - p4) * (r * (1 - p) - r * q * (1 - q)) / (16 * den)
            )
        return (
            _qint(5, q) * q**3 * (1 - q) * (1 + q**2) * (q**3 - p) * (1 - p4) / (32 * den)
            + _qint(5, q) * q**5 * (1 - q) * (1 - q**3) * (1 - p) / (32 * den)
            - q**5 * (1 - p) ** 2 * (1 - p4) / (32 * den)
        )


# ---------------------------------------------------------------------------
# polynomials


def _bern_coeffs(family: BernoulliFamily, n: int, betas: Sequence, q: mpf) -> list[mpf]:
    out = []
    for j in range(n + 1):
        c = _qbinom(n, j, q) * betas[n - j]
        if family is BernoulliFamily.K2:
            c *= q ** (j * (j - 1) // 2)
        elif family is BernoulliFamily.K3:
            c *= q ** (mpf(j * (j - 1)) / 4)
        out.append(c)
    return out


def bernoulli_poly(k: BernoulliFamily | int | str, n: int, alpha: object, params: QParams) -> Poly:
    """B^{(k)}_{n,alpha}(x; q) as a coefficient vector in x."""
    family = BernoulliFamily.parse(k)
    with mp.workprec(params.workprec):
        alpha = to_mpf(alpha)
        _check(alpha, n)
        b = _betas_for(family, alpha, params.q, n, params.workprec)
        return Poly(tuple(_bern_coeffs(family, n, b, params.q)))


def _bern_at_base(family: BernoulliFamily, n: int, alpha: mpf, q: mpf) -> list[mpf]:
    """Coefficients at an arbitrary base (used for the 1/q side of the duality)."""
    b = _beta_solve(q ** (2 * alpha + 2), q, n, k3=family is BernoulliFamily.K3)
    return _bern_coeffs(family, n, b, q)


def alsalam_poly(which: str, n: int, params: QParams) -> Poly:
    """Al-Salam polynomials: H_n has coefficients [n k]_q, G_n has [n k]_q q^{k^2 - nk}."""
    if which not in ("H", "G"):
        raise QDomainError("which must be 'H' or 'G'")
    if not isinstance(n, int) or n < 0:
        raise QDomainError("n must be a non-negative integer")
    with mp.workprec(params.workprec):
        q = params.q
        if which == "H":
            return Poly(tuple(_qbinom(n, k, q) for k in range(n + 1)))
        return Poly(tuple(_qbinom(n, k, q) * q ** (k * k - n * k) for k in range(n + 1)))


def _compositions(n: int) -> Iterator[tuple[int, ...]]:
    if n == 0:
        yield ()
        return
    for cuts in itertools.product((False, True), repeat=n - 1):
        parts, run = [], 1
        for c in cuts:
            if c:
                parts.append(run)
                run = 1
            else:
                run += 1
        parts.append(run)
        yield tuple(parts)


def cexp_coeffs(params: QParams, N: int, method: str = "SERIES_INVERSION") -> list[mpf]:
    """Coefficients c_0..c_N of 1/exp_q(z).

    ``PARTITION_SUM`` enumerates all compositions of n and is meant as a
    cross-check for small N.
    """
    if not isinstance(N, int) or N < 0:
        raise QDomainError("N must be a non-negative integer")
    with mp.workprec(params.workprec):
        q = params.q
        e = [q ** (mpf(n * (n - 1)) / 4) / _qfact(n, q) for n in range(N + 1)]
        if method == "SERIES_INVERSION":
            return series_inverse(e, N + 1)
        if method == "PARTITION_SUM":
            if N > 16:
                raise QDomainError("PARTITION_SUM is limited to N <= 16")
            out = [mpf(1)]
            for n in range(1, N + 1):
                total = mpf(0)
                for comp in _compositions(n):
                    term = mpf(-1) ** len(comp)
                    for s in comp:
                        term *= e[s]
                    total += term
                out.append(total)
            return out
    raise QDomainError(f"unknown method {method!r}")


def g3_reciprocal_coeffs(alpha: object, params: QParams, N: int) -> list[mpf]:
    """Taylor coefficients of 1/g^{(3)}_alpha(it; q) in t, built from c_k and beta^{(3)}."""
    with mp.workprec(params.workprec):
        alpha = to_mpf(alpha)
        _check(alpha, N)
        q = params.q
        c = cexp_coeffs(params, N)
        b = _betas_for(BernoulliFamily.K3, alpha, q, N, params.workprec)
        return [
            mpmath.fsum((-1) ** k * c[k] * b[n - k] / (2**k * _qfact(n - k, q)) for k in range(n + 1))
            for n in range(N + 1)
        ]


def g_series(k: BernoulliFamily | int, alpha: object, params: QParams, N: int) -> list[mpf]:
    """Coefficients of g^{(k)}_alpha(it; q) in powers of t (odd ones are zero)."""
    family = BernoulliFamily.parse(k)
    kind = BesselKind(f"J{int(family)}")
    with mp.workprec(params.workprec):
        q = params.q
        alpha = to_mpf(alpha)
        c = modified_coeffs(kind, alpha, q * q, N // 2 + 1)
        if family is BernoulliFamily.K3:
            s = (1 - q) / (2 * mpmath.root(q, 4))
        else:
            s = 1 - q
        out = [mpf(0)] * (N + 1)
        for m, cm in enumerate(c):
            if 2 * m <= N:
                # the value at i*t flips the alternation of the real series
                out[2 * m] = (-1) ** m * cm * s ** (2 * m)
        return out


def generating_function(k: BernoulliFamily | int, alpha: object, x: object, t: object, params: QParams) -> mpf:
    """Closed form of sum_n B^{(k)}_{n,alpha}(x) t^n / [n]_q! inside its disk."""
    family = BernoulliFamily.parse(k)
    with mp.workprec(params.workprec):
        x, t = to_mpf(x), to_mpf(t)
        g = jbessel(f"J{int(family)}", "g_form", alpha, t, params)
        kind = {BernoulliFamily.K1: "small_e", BernoulliFamily.K2: "big_E", BernoulliFamily.K3: "sym_exp"}[family]
        return qexp(kind, x * t, params) * qexp(kind, -t / 2, params) / g


# ---------------------------------------------------------------------------
# identity catalog

IDENTITY_IDS = (
    "DUALITY_Q_INV",
    "ODD_HALF_ZERO",
    "CROSS_12",
    "H_CONNECT",
    "G_CONNECT",
    "HG_EXPANSION",
    "MONOMIAL_INVERSE",
    "A_SCALE",
    "REFLECTION",
    "HALF_POINT",
    "ALPHA_STEP",
    "QDIFF",
    "ALPHA_LIMIT",
)

#: identities that are exact in coefficient algebra
EXACT_IDS = frozenset({"DUALITY_Q_INV", "QDIFF"})


@dataclass(frozen=True)
class IdentityReport:
    identity_id: str
    point: Mapping
    residual: mpf
    tolerance: mpf
    passed: bool
    detail: str = ""

    def to_json(self) -> dict:
        point = {k: (to_decimal(v, 64) if isinstance(v, mpf) else v) for k, v in self.point.items()}
        out = {
            "id": self.identity_id,
            "point": point,
            "residual": to_decimal(self.residual, 64),
            "tolerance": to_decimal(self.tolerance, 64),
            "pass": self.passed,
        }
        if self.detail:
            out["detail"] = self.detail
        return out


class _Ctx:
    """Per-point helper: caches numbers and polynomials at one (alpha, q)."""

    def __init__(self, alpha: mpf, params: QParams) -> None:
        self.alpha = alpha
        self.params = params
        self.q = params.q
        self.prec = params.workprec

    def beta(self, family: BernoulliFamily, N: int) -> tuple:
        return _betas_for(family, self.alpha, self.q, N, self.prec)

    def B(self, family: BernoulliFamily, n: int, alpha: mpf | None = None) -> Poly:
        a = self.alpha if alpha is None else alpha
        b = _betas_for(family, a, self.q, n, self.prec)
        return Poly(tuple(_bern_coeffs(family, n, b, self.q)))

    def qb(self, n: int, k: int) -> mpf:
        return _qbinom(n, k, self.q)

    def qf(self, n: int) -> mpf:
        return _qfact(n, self.q)

    def H(self, n: int) -> Poly:
        return Poly(tuple(_qbinom(n, k, self.q) for k in range(n + 1)))

    def G(self, n: int) -> Poly:
        q = self.q
        return Poly(tuple(_qbinom(n, k, q) * q ** (k * k - n * k) for k in range(n + 1)))


def _rel(lhs: mpf, rhs: mpf, scale: mpf = mpf(1)) -> mpf:
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), mpf(1), scale)


def _poly_rel(lhs: Poly, rhs: Poly) -> mpf:
    n = max(len(lhs), len(rhs))
    scale = max([mpf(1)] + [abs(lhs[i]) for i in range(n)] + [abs(rhs[i]) for i in range(n)])
    return max(abs(lhs[i] - rhs[i]) for i in range(n)) / scale


def _pshift(p: Poly, k: int) -> Poly:
    """x^k * p."""
    return Poly((mpf(0),) * k + p.coeffs)


def _compose_scale(p: Poly, s: mpf) -> Poly:
    """p(s x)."""
    return Poly(tuple(c * s**i for i, c in enumerate(p.coeffs)))


def _abs_eval(p: Poly, x: mpf) -> mpf:
    return mpmath.fsum(abs(c) * abs(x) ** i for i, c in enumerate(p.coeffs))


def _fam(point: Mapping, default: int = 1) -> BernoulliFamily:
    return BernoulliFamily.parse(point.get("k", default))


def _id_duality(ctx: _Ctx, pt: Mapping) -> mpf:
    n, x = int(pt["n"]), to_mpf(pt.get("x", 0))
    q = ctx.q
    lhs = ctx.B(BernoulliFamily.K2, n)
    rhs = Poly(tuple(q ** (n * (n - 1) // 2) * c for c in _bern_at_base(BernoulliFamily.K1, n, ctx.alpha, 1 / q)))
    return max(_poly_rel(lhs, rhs), _rel(lhs(x), rhs(x)))


def _id_odd_half(ctx: _Ctx, pt: Mapping) -> mpf:
    fam, m = _fam(pt), int(pt["n"])
    B = ctx.B(fam, 2 * m + 1)
    h = mpf(1) / 2
    return abs(B(h)) / max(mpf(1), _abs_eval(B, h))


def _id_cross(ctx: _Ctx, pt: Mapping) -> mpf:
    n, x = int(pt["n"]), to_mpf(pt.get("x", 0))
    b = ctx.beta(BernoulliFamily.K1, n)
    lhs_terms = [ctx.qb(n, k) * ctx.B(BernoulliFamily.K1, k)(-x) * ctx.B(BernoulliFamily.K2, n - k)(x) for k in range(n + 1)]
    rhs_terms = [ctx.qb(n, k) * b[k] * b[n - k] for k in range(n + 1)]
    scale = max(mpmath.fsum(abs(t) for t in lhs_terms), mpmath.fsum(abs(t) for t in rhs_terms))
    return _rel(mpmath.fsum(lhs_terms), mpmath.fsum(rhs_terms), scale)


def _id_h_connect(ctx: _Ctx, pt: Mapping) -> mpf:
    n = int(pt["n"])
    rhs = Poly((mpf(0),))
    for k in range(n + 1):
        rhs = rhs + _pshift(ctx.B(BernoulliFamily.K2, n - k), k) * (ctx.qb(n, k) * ctx.H(k)(-1))
    return _poly_rel(ctx.B(BernoulliFamily.K1, n), rhs)


def _id_g_connect(ctx: _Ctx, pt: Mapping) -> mpf:
    n = int(pt["n"])
    q = ctx.q
    rhs = Poly((mpf(0),))
    for k in range(n + 1):
        w = ctx.qb(n, k) * q ** (k * (k - 1) // 2) * ctx.G(k)(-1)
        rhs = rhs + _pshift(ctx.B(BernoulliFamily.K1, n - k), k) * w
    return _poly_rel(ctx.B(BernoulliFamily.K2, n), rhs)


def _id_hg_expansion(ctx: _Ctx, pt: Mapping) -> mpf:
    fam, n, x = _fam(pt), int(pt["n"]), to_mpf(pt.get("x", 0))
    q, a = ctx.q, ctx.alpha
    q2 = q * q
    p = q ** (2 * a + 2)
    terms = []
    for k in range(n // 2 + 1):
        w = (1 - q) ** (2 * k) / (4**k * ctx.qf(n - 2 * k) * _poch(q2, q2, k) * _poch(p, q2, k))
        if fam is BernoulliFamily.K2:
            w *= q ** (2 * k * (k + a))
        elif fam is BernoulliFamily.K3:
            w *= q ** (k * k + mpf(k) / 2)
        terms.append(w * ctx.B(fam, n - 2 * k)(-x / 2))
    lhs = mpmath.fsum(terms)
    pre = (mpf(-1) / 2) ** n / ctx.qf(n)
    if fam is BernoulliFamily.K1:
        rhs = pre * ctx.H(n)(x)
    elif fam is BernoulliFamily.K2:
        rhs = pre * q ** (n * (n - 1) // 2) * ctx.G(n)(x)
    else:
        rhs = pre * q ** (mpf(n * (n - 1)) / 4) * _poch(-x * q ** (mpf(1 - n) / 2), q, n)
    return _rel(lhs, rhs, mpmath.fsum(abs(t) for t in terms))


def _id_monomial_inverse(ctx: _Ctx, pt: Mapping) -> mpf:
    fam, n = _fam(pt), int(pt["n"])
    q, a = ctx.q, ctx.alpha
    q2 = q * q
    lhs = Poly((mpf(0),))
    if fam is not BernoulliFamily.K3:
        for m in range(n + 1):
            d = ctx.qb(n, m) * _half_ratio(q ** (2 * a + 1), q, m) / 2**m
            lhs = lhs + ctx.B(fam, n - m) * d
        lead = mpf(1) if fam is BernoulliFamily.K1 else q ** (n * (n - 1) // 2)
        rhs = Poly((mpf(0),) * n + (lead,))
        return _poly_rel(lhs, rhs)
    c = cexp_coeffs(ctx.params, n)
    p = q ** (2 * a + 2)
    for m in range(n + 1):
        inner = mpmath.fsum(
            q ** (k * k + mpf(k) / 2) * (1 - q) ** (2 * k) * c[m - 2 * k] / (_poch(q2, q2, k) * _poch(p, q2, k))
            for k in range(m // 2 + 1)
        )
        lhs = lhs + ctx.B(fam, n - m) * ((mpf(-1) / 2) ** m * inner / ctx.qf(n - m))
    rhs = Poly((mpf(0),) * n + (q ** (mpf(n * (n - 1)) / 4) / ctx.qf(n),))
    return _poly_rel(lhs, rhs)


def _id_a_scale(ctx: _Ctx, pt: Mapping) -> mpf:
    fam, n = _fam(pt), int(pt["n"])
    if fam is BernoulliFamily.K3:
        raise QDomainError("A_SCALE is stated for families 1 and 2")
    q = ctx.q
    a = to_mpf(pt.get("a", q))
    if a == 0:
        raise QDomainError("A_SCALE needs a != 0")
    rhs = Poly((mpf(0),))
    for k in range(n + 1):
        if fam is BernoulliFamily.K1:
            w = _poch(a, q, k)
        else:
            w = (-a) ** k * _poch(1 / a, q, k)
        rhs = rhs + _pshift(_compose_scale(ctx.B(fam, n - k), a), k) * (ctx.qb(n, k) * w)
    return _poly_rel(ctx.B(fam, n), rhs)


def _id_reflection(ctx: _Ctx, pt: Mapping) -> mpf:
    fam, n = _fam(pt), int(pt["n"])
    if fam is BernoulliFamily.K3:
        raise QDomainError("REFLECTION is stated for families 1 and 2")
    q = ctx.q
    h = mpf(1) / 2
    B = ctx.B(fam, n)
    lhs = B - _compose_scale(B, mpf(-1)) * ((-1) ** n)
    other = BernoulliFamily.K2 if fam is BernoulliFamily.K1 else BernoulliFamily.K1
    rhs = Poly((mpf(0),))
    for k in range(n + 1):
        base = ctx.H(k) if fam is BernoulliFamily.K1 else ctx.G(k)
        diff = _compose_scale(base, mpf(-2)) * ((-h) ** k) - _compose_scale(base, mpf(2)) * (h**k)
        w = ctx.qb(n, k) * ctx.B(other, n - k)(h)
        if fam is BernoulliFamily.K2:
            w *= q ** (k * (k - 1) // 2)
        rhs = rhs + diff * w
    return _poly_rel(lhs, rhs)


def _id_half_point(ctx: _Ctx, pt: Mapping) -> mpf:
    fam, n = _fam(pt), int(pt["n"])
    if fam is BernoulliFamily.K3:
        raise QDomainError("HALF_POINT is stated for families 1 and 2")
    other = 2 if fam is BernoulliFamily.K1 else 1
    inv = series_inverse(g_series(other, ctx.alpha, ctx.params, n), n + 1)
    lhs = ctx.B(fam, n)(mpf(1) / 2) / ctx.qf(n)
    return _rel(lhs, inv[n])


def alpha_step_rhs(r: int, n: int, alpha: object, params: QParams, *, displayed: bool = False) -> Poly:
    """Right side of the alpha -> alpha+1 step relation, as a polynomial.

    For r=3 the default uses the weights q^{-k/2} 4^{-k} and no factor 2,
    which is what the generating-function argument produces for the third
    family.  ``displayed=True`` reuses the r=2 weights for r=3.
    """
    if r not in (2, 3):
        raise QDomainError("r must be 2 or 3")
    fam = BernoulliFamily(r)
    with mp.workprec(params.workprec):
        a = to_mpf(alpha)
        q = params.q
        h = h_coeffs(r, a, params, n // 2 + 1)
        ctx = _Ctx(a, params)
        out = Poly((mpf(0),))
        for k in range(n // 2 + 1):
            if r == 2 or displayed:
                w = 2 * (1 - q ** (2 * a + 2)) * (-1) ** k * (1 - q) ** (2 * k) * h[k]
            else:
                w = (1 - q ** (2 * a + 2)) * (-1) ** k * (1 - q) ** (2 * k) * q ** (-mpf(k) / 2) / 4**k * h[k]
            out = out + ctx.B(fam, n - 2 * k, a + 1) * (w / ctx.qf(n - 2 * k))
        return out


def _id_alpha_step(ctx: _Ctx, pt: Mapping) -> mpf:
    r = int(pt.get("k", pt.get("r", 2)))
    n = int(pt["n"])
    if r not in (2, 3):
        raise QDomainError("ALPHA_STEP is stated for families 2 and 3")
    lhs = ctx.B(BernoulliFamily(r), n) * (1 / ctx.qf(n))
    return _poly_rel(lhs, alpha_step_rhs(r, n, ctx.alpha, ctx.params))


_DIFF_OF = {BernoulliFamily.K1: "D_q", BernoulliFamily.K2: "D_qinv", BernoulliFamily.K3: "delta_sym"}


def _id_qdiff(ctx: _Ctx, pt: Mapping) -> mpf:
    from .qcore import _diff_poly

    fam, n = _fam(pt), int(pt["n"])
    kind = _DIFF_OF[fam]
    worst = mpf(0)
    cur = ctx.B(fam, n) * (1 / ctx.qf(n))
    for j in range(1, n + 1):
        cur = _diff_poly(kind, cur, ctx.q)
        if j == 1:
            single = _diff_poly(kind, ctx.B(fam, n), ctx.q)
            worst = max(worst, _poly_rel(single, ctx.B(fam, n - 1) * _qint(n, ctx.q)))
        worst = max(worst, _poly_rel(cur, ctx.B(fam, n - j) * (1 / ctx.qf(n - j))))
    return worst


def _id_alpha_limit(ctx: _Ctx, pt: Mapping) -> mpf:
    from .qasym import alpha_limit

    fam, n, x = _fam(pt), int(pt["n"]), to_mpf(pt.get("x", 0.3))
    big = to_mpf(pt.get("alpha_large", 200))
    kind = f"B{int(fam)}_LIMIT"
    lim = alpha_limit(kind, n, x, ctx.params)
    val = ctx.B(fam, n, big)(x)
    return abs(val - lim)


_IMPL = {
    "DUALITY_Q_INV": _id_duality,
    "ODD_HALF_ZERO": _id_odd_half,
    "CROSS_12": _id_cross,
    "H_CONNECT": _id_h_connect,
    "G_CONNECT": _id_g_connect,
    "HG_EXPANSION": _id_hg_expansion,
    "MONOMIAL_INVERSE": _id_monomial_inverse,
    "A_SCALE": _id_a_scale,
    "REFLECTION": _id_reflection,
    "HALF_POINT": _id_half_point,
    "ALPHA_STEP": _id_alpha_step,
    "QDIFF": _id_qdiff,
    "ALPHA_LIMIT": _id_alpha_limit,
}


def identity_tolerance(identity_id: str, params: QParams) -> mpf:
    """Pass threshold for an identity at the precision in ``params``."""
    with mp.workprec(params.workprec):
        if identity_id == "ALPHA_LIMIT":
            return mpf(10) ** -10
        if identity_id in EXACT_IDS:
            return mpf(2) ** (-(params.precision_bits - 24))
        return mpf(2) ** (-(params.precision_bits // 2))


def identity_residual(identity_id: str, point: Mapping, params: QParams) -> IdentityReport:
    """Evaluate one catalog identity at one parameter point.

    ``point`` holds ``n`` and, as needed, ``k`` (family), ``alpha``, ``x``, ``a``
    and ``q``.  A ``q`` in the point overrides ``params.q``.
    """
    if identity_id not in _IMPL:
        raise QDomainError(f"unknown identity id {identity_id!r}")
    if "q" in point:
        params = params.with_q(point["q"])
    with mp.workprec(params.workprec):
        alpha = to_mpf(point.get("alpha", 0.5))
        if not alpha > -1:
            raise QDomainError("alpha must exceed -1")
        n = point.get("n")
        if not isinstance(n, int) or n < 0:
            raise QDomainError("point needs a non-negative integer n")
        residual = +_IMPL[identity_id](_Ctx(alpha, params), point)
        tol = identity_tolerance(identity_id, params)
        return IdentityReport(identity_id, dict(point), residual, tol, bool(residual <= tol))


# ---------------------------------------------------------------------------
# default grids

DEFAULT_N = tuple(range(1, 9))
DEFAULT_ALPHA = ("-0.5", "-0.25", "0.5", "1.5", "3")
DEFAULT_Q = ("0.2", "0.5", "0.8")
DEFAULT_X = ("0", "0.5", "0.3", "-0.7")

#: which grid dimensions each identity actually depends on
_DIMS = {
    "DUALITY_Q_INV": ("n", "alpha", "q", "x"),
    "ODD_HALF_ZERO": ("k3", "n", "alpha", "q"),
    "CROSS_12": ("n", "alpha", "q", "x"),
    "H_CONNECT": ("n", "alpha", "q"),
    "G_CONNECT": ("n", "alpha", "q"),
    "HG_EXPANSION": ("k3", "n", "alpha", "q", "x"),
    "MONOMIAL_INVERSE": ("k3", "n", "alpha", "q"),
    "A_SCALE": ("k12", "n", "alpha", "q", "a"),
    "REFLECTION": ("k12", "n", "alpha", "q"),
    "HALF_POINT": ("k12", "n", "alpha", "q"),
    "ALPHA_STEP": ("k23", "n", "alpha", "q"),
    "QDIFF": ("k3", "n", "alpha", "q"),
    "ALPHA_LIMIT": ("k3", "n6", "q05", "x01"),
}


def default_grid(identity_id: str) -> list[dict]:
    """Default parameter points for one identity.

    Polynomial-level identities are checked for every coefficient at once,
    so they do not loop over x.
    """
    if identity_id not in _DIMS:
        raise QDomainError(f"unknown identity id {identity_id!r}")
    dims = _DIMS[identity_id]
    axes: list[tuple[str, Iterable]] = []
    for d in dims:
        if d == "k3":
            axes.append(("k", (1, 2, 3)))
        elif d == "k12":
            axes.append(("k", (1, 2)))
        elif d == "k23":
            axes.append(("k", (2, 3)))
        elif d == "n":
            axes.append(("n", DEFAULT_N))
        elif d == "n6":
            axes.append(("n", tuple(range(1, 7))))
        elif d == "alpha":
            axes.append(("alpha", DEFAULT_ALPHA))
        elif d == "q":
            axes.append(("q", DEFAULT_Q))
        elif d == "q05":
            axes.append(("q", ("0.5",)))
        elif d == "x":
            axes.append(("x", DEFAULT_X))
        elif d == "x01":
            axes.append(("x", ("0.3", "1")))
        elif d == "a":
            axes.append(("a", ("q", "0.4")))
    points = []
    for combo in itertools.product(*(vals for _, vals in axes)):
        pt = dict(zip((name for name, _ in axes), combo))
        if pt.get("a") == "q":
            pt["a"] = pt["q"]
        points.append(pt)
    return points


def run_identity_grid(identity_id: str, params: QParams, points: Iterable[Mapping] | None = None) -> list[IdentityReport]:
    pts = default_grid(identity_id) if points is None else list(points)
    return [identity_residual(identity_id, pt, params) for pt in pts]


__all__ = [
    "BernoulliFamily",
    "BetaSequence",
    "IDENTITY_IDS",
    "IdentityReport",
    "alpha_step_rhs",
    "alsalam_poly",
    "bernoulli_poly",
    "beta3_numbers",
    "beta_closed_form",
    "beta_numbers",
    "cexp_coeffs",
    "default_grid",
    "g3_reciprocal_coeffs",
    "g_series",
    "generating_function",
    "identity_residual",
    "identity_tolerance",
    "run_identity_grid",
]
