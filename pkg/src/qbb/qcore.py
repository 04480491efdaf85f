"""q-calculus primitives on top of mpmath.

Everything here works on :class:`mpmath.mpf` values at a precision chosen by
a :class:`QParams` instance.  Public functions validate their inputs and set
the working precision themselves; the underscore helpers assume the caller has
already done both, and accept any base (including bases larger than one for
finite products).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import mpmath
from mpmath import mp, mpf

#: extra bits carried on top of ``precision_bits`` inside every public routine
GUARD_BITS = 32

INF = math.inf


class QDomainError(ValueError):
    """An argument lies outside the domain of the requested operation."""


class PoleError(QDomainError):
    """The requested value sits on a pole (e.g. of the q-gamma function)."""

    def __init__(self, message: str, argument: object = None) -> None:
        super().__init__(message)
        self.argument = argument


class ConvergenceError(ArithmeticError):
    """A series failed to converge within its evaluation budget."""


def to_mpf(value: object) -> mpf:
    """Convert ``value`` to an mpf at the current precision.

    Floats go through ``repr`` so that ``0.3`` means the decimal 0.3 rather
    than the nearest double.
    """
    if isinstance(value, mpf):
        return +value
    if isinstance(value, float):
        return mpf(repr(value))
    return mpf(value)


@dataclass(frozen=True)
class QParams:
    """The base ``q`` together with the precision policy.

    ``q`` is stored as an mpf rounded at ``precision_bits + GUARD_BITS``;
    ``trunc_rel_tol`` defaults to ``2**-(precision_bits + 8)``.
    """

    q: mpf
    precision_bits: int = 256
    trunc_rel_tol: mpf | None = None

    def __post_init__(self) -> None:
        bits = self.precision_bits
        if not isinstance(bits, int) or isinstance(bits, bool) or bits < 64:
            raise QDomainError(f"precision_bits must be an integer >= 64, got {bits!r}")
        with mp.workprec(bits + GUARD_BITS):
            q = to_mpf(self.q)
            if not 0 < q < 1:
                raise QDomainError(f"q must lie in (0, 1), got {self.q!r}")
            tol = self.trunc_rel_tol
            tol = mpf(2) ** -(bits + 8) if tol is None else to_mpf(tol)
            if not 0 < tol < 1:
                raise QDomainError(f"trunc_rel_tol must lie in (0, 1), got {self.trunc_rel_tol!r}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "trunc_rel_tol", tol)

    @property
    def workprec(self) -> int:
        return self.precision_bits + GUARD_BITS

    def squared(self) -> "QParams":
        """The same policy with base ``q**2``."""
        with mp.workprec(self.workprec):
            return QParams(self.q**2, self.precision_bits, self.trunc_rel_tol)

    def with_q(self, q: object) -> "QParams":
        return QParams(q, self.precision_bits, self.trunc_rel_tol)

    def tolerance(self, fraction: float = 0.5) -> mpf:
        """``2**-(fraction * precision_bits)``, the default comparison tolerance."""
        with mp.workprec(self.workprec):
            return mpf(2) ** (-int(fraction * self.precision_bits))


class SeriesTruncation(NamedTuple):
    terms_used: int
    tail_bound: mpf


@dataclass(frozen=True)
class Poly:
    """Dense polynomial in x; ``coeffs[i]`` multiplies ``x**i``."""

    coeffs: tuple = field(default_factory=tuple)

    def __post_init__(self) -> None:
        c = [to_mpf(v) for v in self.coeffs]
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        if not c:
            c = [mpf(0)]
        object.__setattr__(self, "coeffs", tuple(c))

    @property
    def degree(self) -> int:
        if len(self.coeffs) == 1 and self.coeffs[0] == 0:
            return -1
        return len(self.coeffs) - 1

    def __call__(self, x: object) -> mpf:
        x = to_mpf(x)
        acc = mpf(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __getitem__(self, i: int) -> mpf:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else mpf(0)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __add__(self, other: "Poly") -> "Poly":
        n = max(len(self), len(other))
        return Poly(tuple(self[i] + other[i] for i in range(n)))

    def __sub__(self, other: "Poly") -> "Poly":
        n = max(len(self), len(other))
        return Poly(tuple(self[i] - other[i] for i in range(n)))

    def __mul__(self, other: "Poly | mpf | int | float") -> "Poly":
        if not isinstance(other, Poly):
            s = to_mpf(other)
            return Poly(tuple(c * s for c in self.coeffs))
        out = [mpf(0)] * (len(self) + len(other) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(tuple(out))

    __rmul__ = __mul__

    def max_abs(self) -> mpf:
        return max(abs(c) for c in self.coeffs)


# ---------------------------------------------------------------------------
# raw helpers (no validation, current precision)


def _poch(a: mpf, q: mpf, n: int) -> mpf:
    """Finite q-shifted factorial (a;q)_n for any base."""
    r = mpf(1)
    t = a
    for _ in range(n):
        r *= 1 - t
        t *= q
    return r


def _poch_inf(a: mpf, q: mpf, tol: mpf) -> tuple[mpf, SeriesTruncation]:
    """(a;q)_inf for 0<q<1, truncated once |a q^k| < tol."""
    r = mpf(1)
    t = a
    k = 0
    while abs(t) >= tol:
        r *= 1 - t
        t *= q
        k += 1
        if k > 10_000_000:
            raise ConvergenceError("infinite product did not reach its cutoff")
    # log-sum bound on the omitted factors
    at = abs(t)
    if at == 0:
        return r, SeriesTruncation(k, mpf(0))
    b = at / ((1 - q) * (1 - at))
    return r, SeriesTruncation(k, abs(r) * (mpmath.exp(b) - 1))


def _qint(n: int, q: mpf) -> mpf:
    return (1 - q**n) / (1 - q)


def _qfact(n: int, q: mpf) -> mpf:
    r = mpf(1)
    for k in range(1, n + 1):
        r *= (1 - q**k) / (1 - q)
    return r


def _qbinom(n: int, k: int, q: mpf) -> mpf:
    if k < 0 or k > n:
        return mpf(0)
    k = min(k, n - k)
    r = mpf(1)
    for i in range(k):
        r *= (1 - q ** (n - i)) / (1 - q ** (i + 1))
    return r


def _log2abs(x: mpf) -> float:
    if x == 0:
        return -math.inf
    m, e = mpmath.frexp(x)
    return e + math.log2(abs(float(m)))


def _peak_bits(t0: mpf, ratio: Callable[[int], mpf], limit: int = 100_000) -> tuple[float, float]:
    """Float pass over log2|term|: returns (log2 of the peak term, log2|t0|).

    Stops once the ratio has dropped below 1/2 past the peak.
    """
    with mp.workprec(64):
        lg = _log2abs(t0)
        peak = lg
        for n in range(limit):
            r = ratio(n)
            if r == 0:
                break
            lr = _log2abs(r)
            lg += lr
            peak = max(peak, lg)
            if lr < -1 and lg < peak - 64:
                break
    return peak, _log2abs(t0)


def _sum_ratio_series(
    t0: mpf,
    ratio: Callable[[int], mpf],
    tol: mpf,
    *,
    ratio_sup: Callable[[int], mpf] | None = None,
    max_terms: int = 1_000_000,
) -> tuple[mpf, SeriesTruncation]:
    """Sum t0 + t1 + ... with t_{n+1} = t_n * ratio(n).

    Stops when the next term and the tail bound |t_next|/(1-rho) both drop
    below ``tol`` times the largest partial-sum magnitude seen so far.  ``rho``
    is ``ratio_sup(n)`` (a bound on |ratio(m)| for m >= n); by default the
    current |ratio| is used, which is valid once the ratios decrease
    monotonically, as they do for the q^{quadratic} series in this package.
    """
    s = t0
    t = t0
    scale = abs(t0)
    for n in range(max_terms):
        r = ratio(n)
        t = t * r
        if t == 0:
            return s, SeriesTruncation(n + 1, mpf(0))
        s += t
        scale = max(scale, abs(s))
        at = abs(t)
        if at <= tol * scale:
            rho = abs(ratio(n + 1)) if ratio_sup is None else ratio_sup(n + 1)
            if rho < 1:
                tail = at * abs(ratio(n + 1)) / (1 - rho) if ratio_sup is None else at * rho / (1 - rho)
                if tail <= tol * scale:
                    return s, SeriesTruncation(n + 2, tail)
    raise ConvergenceError(f"series did not converge within {max_terms} terms")


def _boosted_sum(
    t0: mpf,
    ratio: Callable[[int], mpf],
    params: QParams,
    *,
    ratio_sup: Callable[[int], mpf] | None = None,
) -> tuple[mpf, SeriesTruncation]:
    """Ratio series summed at a precision raised by the peak term's bit size.

    The peak-term bits over the first term's size are added to the working
    precision so that cancellation in alternating series with huge
    intermediate terms still leaves ``precision_bits`` good bits relative to
    the first term.
    """
    peak, first = _peak_bits(t0, ratio)
    extra = 0 if peak == -math.inf else max(0, int(math.ceil(peak - first)))
    with mp.workprec(params.workprec + extra + 16):
        tol = params.trunc_rel_tol * mpf(2) ** (-extra)
        val, cert = _sum_ratio_series(+t0, ratio, tol, ratio_sup=ratio_sup)
    return +val, SeriesTruncation(cert.terms_used, +cert.tail_bound)


def _ret(value: mpf, cert: SeriesTruncation, full_output: bool):
    return (value, cert) if full_output else value


# ---------------------------------------------------------------------------
# public operations


def qpochhammer(a: object, params: QParams, n: int | float = INF, *, full_output: bool = False):
    """(a;q)_n, or the infinite product when ``n`` is ``math.inf``.

    >>> qpochhammer(0.5, QParams(0.5), 2)
    mpf('0.375')
    """
    with mp.workprec(params.workprec):
        a = to_mpf(a)
        if n == INF or n == "inf":
            val, cert = _poch_inf(a, params.q, params.trunc_rel_tol)
            return _ret(val, cert, full_output)
        if not isinstance(n, int) or n < 0:
            raise QDomainError(f"n must be a non-negative integer or inf, got {n!r}")
        return _ret(_poch(a, params.q, n), SeriesTruncation(n, mpf(0)), full_output)


class QCombinatorics(NamedTuple):
    qint: mpf
    qfact: mpf
    qbinom: mpf


def qcombinatorics(n: int, k: int, params: QParams) -> QCombinatorics:
    """[n]_q, [n]_q! and the Gaussian binomial [n choose k]_q."""
    if not (isinstance(n, int) and isinstance(k, int)) or n < 0 or k < 0 or k > n:
        raise QDomainError(f"need 0 <= k <= n, got n={n!r}, k={k!r}")
    with mp.workprec(params.workprec):
        q = params.q
        return QCombinatorics(_qint(n, q), _qfact(n, q), _qbinom(n, k, q))


def _check_gamma_arg(x: mpf) -> None:
    if x <= 0 and x == mpmath.floor(x):
        raise PoleError(f"q-gamma has a pole at {mpmath.nstr(x, 15)}", x)


def qgamma(x: object, params: QParams) -> mpf:
    """Gamma_q(x) = (q;q)_inf / (q^x;q)_inf * (1-q)^(1-x)."""
    with mp.workprec(params.workprec):
        x = to_mpf(x)
        _check_gamma_arg(x)
        q, tol = params.q, params.trunc_rel_tol
        num, _ = _poch_inf(q, q, tol)
        den, _ = _poch_inf(q**x, q, tol)
        return num / den * (1 - q) ** (1 - x)


def qgamma_beta(x: object, y: object, params: QParams) -> tuple[mpf, mpf]:
    """Return ``(Gamma_q(x), B_q(x, y))``."""
    with mp.workprec(params.workprec):
        x, y = to_mpf(x), to_mpf(y)
        if x <= 0 or y <= 0:
            raise QDomainError("q-beta needs x > 0 and y > 0")
        gx = qgamma(x, params)
        return gx, gx * qgamma(y, params) / qgamma(x + y, params)


def qexp(kind: str, x: object, params: QParams, *, full_output: bool = False):
    """The q-exponentials ``small_e`` (e_q), ``big_E`` (E_q) and ``sym_exp`` (exp_q).

    e_q and E_q come from their product forms; exp_q is summed as a series.
    """
    with mp.workprec(params.workprec):
        x = to_mpf(x)
        q, tol = params.q, params.trunc_rel_tol
        if kind == "small_e":
            if abs(x) * (1 - q) >= 1:
                raise QDomainError("e_q(x) needs |x| < 1/(1-q)")
            p, cert = _poch_inf(x * (1 - q), q, tol)
            val = 1 / p
            return _ret(val, SeriesTruncation(cert.terms_used, cert.tail_bound / p**2), full_output)
        if kind == "big_E":
            val, cert = _poch_inf(-x * (1 - q), q, tol)
            return _ret(val, cert, full_output)
        if kind == "sym_exp":
            if x == 0:
                return _ret(mpf(1), SeriesTruncation(1, mpf(0)), full_output)
            half = mpmath.sqrt(q)

            def ratio(n: int) -> mpf:
                return half**n * x * (1 - q) / (1 - q ** (n + 1))

            val, cert = _boosted_sum(mpf(1), ratio, params)
            return _ret(+val, cert, full_output)
    raise QDomainError(f"unknown q-exponential kind {kind!r}")


TRIG_KINDS = ("sin_q", "cos_q", "Sin_q", "Cos_q", "S_q", "C_q", "Sh_q", "Ch_q")


def qtrig(kind: str, z: object, params: QParams, *, full_output: bool = False):
    """q-trigonometric and q-hyperbolic functions as real even/odd series.

    Working precision is raised by the bit size of the largest term, so
    e.g. ``Cos_q`` at arguments of size 1e6 is still accurate.
    """
    if kind not in TRIG_KINDS:
        raise QDomainError(f"unknown q-trig kind {kind!r}")
    with mp.workprec(params.workprec):
        z = to_mpf(z)
        q = params.q
        w = (1 - q) ** 2 * z * z
        sup = None
        if kind in ("sin_q", "cos_q"):
            if abs(z) * (1 - q) >= 1:
                raise QDomainError(f"{kind} needs |z| < 1/(1-q)")
            if kind == "cos_q":
                t0 = mpf(1)
                ratio = lambda m: -w / ((1 - q ** (2 * m + 1)) * (1 - q ** (2 * m + 2)))  # noqa: E731
            else:
                t0 = z
                ratio = lambda m: -w / ((1 - q ** (2 * m + 2)) * (1 - q ** (2 * m + 3)))  # noqa: E731
            # the ratios increase towards w, so their limit bounds them all
            sup = lambda m: w  # noqa: E731
        elif kind == "Cos_q":
            t0 = mpf(1)
            ratio = lambda m: -(q ** (4 * m + 1)) * w / ((1 - q ** (2 * m + 1)) * (1 - q ** (2 * m + 2)))  # noqa: E731
        elif kind == "Sin_q":
            t0 = z
            ratio = lambda m: -(q ** (4 * m + 3)) * w / ((1 - q ** (2 * m + 2)) * (1 - q ** (2 * m + 3)))  # noqa: E731
        else:
            sign = -1 if kind in ("S_q", "C_q") else 1
            rq = mpmath.sqrt(q)
            if kind in ("C_q", "Ch_q"):
                t0 = mpf(1)
                ratio = lambda m: sign * q ** (2 * m) * rq * w / ((1 - q ** (2 * m + 1)) * (1 - q ** (2 * m + 2)))  # noqa: E731
            else:
                t0 = z
                ratio = lambda m: sign * q ** (2 * m + 1) * rq * w / ((1 - q ** (2 * m + 2)) * (1 - q ** (2 * m + 3)))  # noqa: E731
        if z == 0:
            return _ret(+t0, SeriesTruncation(1, mpf(0)), full_output)
        val, cert = _boosted_sum(t0, ratio, params, ratio_sup=sup)
        return _ret(+val, cert, full_output)


DIFF_KINDS = ("D_q", "D_qinv", "delta_sym")


def _diff_poly(kind: str, p: Poly, q: mpf) -> Poly:
    out = []
    for n in range(1, len(p)):
        if kind == "D_q":
            f = _qint(n, q)
        elif kind == "D_qinv":
            f = _qint(n, q) * q ** (1 - n)
        else:
            f = _qint(n, q) * mpmath.sqrt(q) ** (1 - n)
        out.append(f * p[n])
    return Poly(tuple(out) or (mpf(0),))


def qdiff(kind: str, target: Poly | Callable[[mpf], mpf], params: QParams, z: object = None):
    """Apply D_q, D_{q^-1} or the symmetric operator delta_q.

    With a :class:`Poly` the exact coefficient image is returned; with a
    callable the difference quotient at ``z`` (which must be non-zero).
    """
    if kind not in DIFF_KINDS:
        raise QDomainError(f"unknown q-difference operator {kind!r}")
    with mp.workprec(params.workprec):
        q = params.q
        if isinstance(target, Poly):
            return _diff_poly(kind, target, q)
        z = to_mpf(z) if z is not None else None
        if z is None or z == 0:
            raise QDomainError("function-mode q-difference needs z != 0")
        f = target
        if kind == "D_q":
            return (f(q * z) - f(z)) / (z * (q - 1))
        if kind == "D_qinv":
            return (f(z / q) - f(z)) / (z * (1 / q - 1))
        h = mpmath.sqrt(q)
        return (f(h * z) - f(z / h)) / ((h - 1 / h) * z)


def qintegral01(
    f: Callable[[mpf], object],
    params: QParams,
    *,
    full_output: bool = False,
    window: int = 20,
    max_terms: int = 200_000,
):
    """Jackson integral (1-q) * sum_k q^k f(q^k) over [0, 1].

    The tail is bounded by q^K times the largest |f| seen over the last
    ``window`` nodes (the integrand is assumed bounded near 0).
    """
    with mp.workprec(params.workprec):
        q, tol = params.q, params.trunc_rel_tol
        s = mpf(0)
        node = mpf(1)
        recent: list[mpf] = []
        scale = mpf(0)
        for k in range(max_terms):
            fv = to_mpf(f(node))
            term = node * fv
            s += term
            scale = max(scale, abs(s))
            recent.append(abs(fv))
            if len(recent) > window:
                recent.pop(0)
            node *= q
            if k >= window:
                fmax = max(recent)
                tail = fmax * node / (1 - q)
                if tail <= tol * max(scale, mpf(2) ** -params.workprec):
                    val = (1 - q) * s
                    return _ret(val, SeriesTruncation(k + 1, (1 - q) * tail), full_output)
        raise ConvergenceError("Jackson integral did not converge; is f bounded near 0?")


def phi21(a: object, b: object, c: object, z: object, params: QParams, *, full_output: bool = False):
    """Basic hypergeometric 2phi1(a, b; c; q, z) for |z| < 1."""
    with mp.workprec(params.workprec):
        a, b, c, z = (to_mpf(v) for v in (a, b, c, z))
        q = params.q
        if abs(z) >= 1:
            raise QDomainError("2phi1 is only implemented for |z| < 1")
        if c != 0 and c > 0:
            m = mpmath.log(c) / mpmath.log(q)
            mi = int(mpmath.nint(m))
            if mi <= 0 and abs(c * q ** (-mi) - 1) < mpf(2) ** (-params.precision_bits):
                raise PoleError(f"2phi1 denominator (c;q)_n vanishes for c = q^{mi}", c)
        if z == 0:
            return _ret(mpf(1), SeriesTruncation(1, mpf(0)), full_output)

        def ratio(n: int) -> mpf:
            qn = q**n
            return (1 - a * qn) * (1 - b * qn) * z / ((1 - q * qn) * (1 - c * qn))

        def sup(n: int) -> mpf:
            qn = q**n
            den = (1 - q * qn) * (1 - abs(c) * qn)
            if den <= 0:
                return mpf(2)
            return (1 + abs(a) * qn) * (1 + abs(b) * qn) * abs(z) / den

        val, cert = _sum_ratio_series(mpf(1), ratio, params.trunc_rel_tol, ratio_sup=sup)
        return _ret(val, cert, full_output)


def series_inverse(c: Sequence[mpf], n: int) -> list[mpf]:
    """First ``n`` coefficients of 1/sum c_k t^k (needs c[0] != 0)."""
    out: list[mpf] = []
    for m in range(n):
        acc = mpf(1) if m == 0 else mpf(0)
        for k in range(1, min(m, len(c) - 1) + 1):
            acc -= c[k] * out[m - k]
        out.append(acc / c[0])
    return out


def series_mul(a: Sequence[mpf], b: Sequence[mpf], n: int) -> list[mpf]:
    """First ``n`` coefficients of the Cauchy product of ``a`` and ``b``."""
    return [
        sum((a[k] * b[m - k] for k in range(m + 1) if k < len(a) and m - k < len(b)), mpf(0))
        for m in range(n)
    ]


def decimal_digits(bits: int) -> int:
    """Decimal digits that faithfully carry a ``bits``-bit mantissa."""
    return int(math.ceil(bits * math.log10(2))) + 2


def to_decimal(x: object, bits: int) -> str:
    """Decimal string of ``x`` carrying all ``bits`` bits of precision."""
    with mp.workprec(bits + GUARD_BITS):
        return mpmath.nstr(to_mpf(x), decimal_digits(bits), min_fixed=-5, max_fixed=30)
