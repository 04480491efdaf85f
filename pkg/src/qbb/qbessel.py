"""Jackson q-Bessel functions, their zeros and the h-coefficient sums.

Three Jackson q-Bessel functions are supported.  Each one comes in three
forms:

* ``raw``: the usual normalisation, including the power of t and the
  infinite-product prefactor;
* ``modified``: the entire even series normalised to 1 at the origin;
* ``g_form``: the even real series for the generating denominator
  g^{(k)}_alpha(it; q).

``raw`` and ``modified`` work at the base stored in ``params``.  Pass
``params.squared()`` to evaluate at q^2.  ``g_form`` always uses the base
q^2 internally.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import mpmath
from mpmath import mp, mpf

from .qcore import (
    ConvergenceError,
    QDomainError,
    QParams,
    SeriesTruncation,
    _boosted_sum,
    _poch_inf,
    _ret,
    series_inverse,
    series_mul,
    to_decimal,
    to_mpf,
)


class BesselKind(str, enum.Enum):
    J1 = "J1"
    J2 = "J2"
    J3 = "J3"

    @classmethod
    def parse(cls, value: "BesselKind | str | int") -> "BesselKind":
        if isinstance(value, BesselKind):
            return value
        text = str(value).upper()
        if not text.startswith("J"):
            text = "J" + text
        try:
            return cls(text)
        except ValueError:
            raise QDomainError(f"unknown q-Bessel kind {value!r}") from None


class ZeroSearchError(ConvergenceError):
    """The bracket scan ran out of budget; ``partial`` holds what was found."""

    def __init__(self, message: str, partial: "ZeroTable") -> None:
        super().__init__(message)
        self.partial = partial


def _check_alpha(alpha: mpf) -> None:
    if not alpha > -1:
        raise QDomainError(f"alpha must exceed -1, got {mpmath.nstr(alpha, 10)}")


# ---------------------------------------------------------------------------
# series in w = z^2 for the modified functions (base Q)


def _coef_ratio(kind: BesselKind, alpha: mpf, Q: mpf) -> Callable[[int], mpf]:
    """c_{n+1}/c_n for the modified series sum c_n z^{2n} (without z^2)."""
    p = Q ** (alpha + 1)
    if kind is BesselKind.J1:
        return lambda n: -1 / (4 * (1 - Q ** (n + 1)) * (1 - p * Q**n))
    if kind is BesselKind.J2:
        return lambda n: -(Q ** (2 * n + 1 + alpha)) / (4 * (1 - Q ** (n + 1)) * (1 - p * Q**n))
    return lambda n: -(Q ** (n + 1)) / ((1 - Q ** (n + 1)) * (1 - p * Q**n))


def modified_coeffs(kind: BesselKind | str, alpha: object, Q: object, count: int) -> list[mpf]:
    """The first ``count`` coefficients c_n of the modified series in z^{2n}.

    Runs at the current working precision.
    """
    kind = BesselKind.parse(kind)
    alpha, Q = to_mpf(alpha), to_mpf(Q)
    ratio = _coef_ratio(kind, alpha, Q)
    out = [mpf(1)]
    for n in range(count - 1):
        out.append(out[-1] * ratio(n))
    return out


def _modified(
    kind: BesselKind, alpha: mpf, z: mpf, Q: mpf, params: QParams, *, deriv: bool = False, sign: int = 1
) -> tuple[mpf, SeriesTruncation]:
    """Modified series (or its z-derivative) at base Q.

    ``sign=-1`` flips the alternation, which gives the value at i*z.
    """
    w = z * z
    cr = _coef_ratio(kind, alpha, Q)
    sup = None
    if not deriv:
        if z == 0:
            return mpf(1), SeriesTruncation(1, mpf(0))
        ratio = lambda n: sign * cr(n) * w  # noqa: E731
        t0 = mpf(1)
        if kind is BesselKind.J1:
            sup = lambda n: w / 4  # noqa: E731
    else:
        if z == 0:
            return mpf(0), SeriesTruncation(1, mpf(0))
        # d/dz sum c_n z^{2n} = sum_{n>=1} 2n c_n z^{2n-1}
        t0 = 2 * sign * cr(0) * z
        ratio = lambda n: sign * cr(n + 1) * w * (n + 2) / (n + 1)  # noqa: E731
        if kind is BesselKind.J1:
            sup = lambda n: w / 4 * mpf(n + 2) / (n + 1)  # noqa: E731
    return _boosted_sum(t0, ratio, params, ratio_sup=sup)


def _raw_prefactor(kind: BesselKind, alpha: mpf, t: mpf, Q: mpf, tol: mpf) -> mpf:
    num, _ = _poch_inf(Q ** (alpha + 1), Q, tol)
    den, _ = _poch_inf(Q, Q, tol)
    base = t / 2 if kind is not BesselKind.J3 else t
    if base == 0:
        if alpha == 0:
            power = mpf(1)
        elif alpha > 0:
            power = mpf(0)
        else:
            raise QDomainError("raw form with alpha < 0 is singular at t = 0")
    elif base < 0:
        if alpha != mpmath.floor(alpha):
            raise QDomainError("raw form with non-integer alpha needs t > 0")
        power = base ** int(alpha)
    else:
        power = base**alpha
    return num / den * power


def jbessel(
    kind: BesselKind | str,
    form: str,
    alpha: object,
    t: object,
    params: QParams,
    *,
    full_output: bool = False,
):
    """Evaluate a Jackson q-Bessel function.

    ``form`` is ``"raw"``, ``"modified"`` or ``"g_form"``.  ``g_form`` returns
    g^{(k)}_alpha(it; q), which is the sum of a positive even series:

    * k=1: sum (1-q)^{2n} (t/2)^{2n} / (q^2, q^{2 alpha+2}; q^2)_n;
    * k=2: the same terms times q^{2n(n+alpha)};
    * k=3: the same terms times q^{n^2+n/2}.
    """
    kind = BesselKind.parse(kind)
    with mp.workprec(params.workprec):
        alpha, t = to_mpf(alpha), to_mpf(t)
        _check_alpha(alpha)
        q = params.q
        if form == "g_form":
            Q = q * q
            if kind is BesselKind.J3:
                z = t / 2 * (1 - q) / mpmath.root(q, 4)
            else:
                z = t * (1 - q)
            if kind is BesselKind.J1 and abs(z) >= 2:
                raise QDomainError("g^(1) series needs |t|(1-q) < 2")
            val, cert = _modified(kind, alpha, abs(z), Q, params, sign=-1)
            return _ret(val, cert, full_output)
        if form not in ("raw", "modified"):
            raise QDomainError(f"unknown form {form!r}")
        if kind is BesselKind.J1 and abs(t) >= 2:
            raise QDomainError("J1 series needs |t| < 2")
        Q = q
        val, cert = _modified(kind, alpha, abs(t), Q, params)
        if form == "raw":
            pref = _raw_prefactor(kind, alpha, t, Q, params.trunc_rel_tol)
            val = val * pref
            cert = SeriesTruncation(cert.terms_used, cert.tail_bound * abs(pref))
        return _ret(val, cert, full_output)


def jbessel_derivative(kind: BesselKind | str, alpha: object, z: object, params: QParams) -> mpf:
    """d/dz of the modified function at base ``params.q`` (termwise series)."""
    kind = BesselKind.parse(kind)
    with mp.workprec(params.workprec):
        alpha, z = to_mpf(alpha), to_mpf(z)
        _check_alpha(alpha)
        if kind is BesselKind.J1 and abs(z) >= 2:
            raise QDomainError("J1 series needs |z| < 2")
        val, _ = _modified(kind, alpha, abs(z), params.q, params, deriv=True)
        return val if z >= 0 else -val


def g_real(kind: BesselKind | str, alpha: object, t: object, params: QParams) -> mpf:
    """g^{(k)}_alpha(t; q) at real t (oscillating; zeros at j/(1-q)-type points)."""
    kind = BesselKind.parse(kind)
    with mp.workprec(params.workprec):
        alpha, t = to_mpf(alpha), to_mpf(t)
        q = params.q
        if kind is BesselKind.J3:
            z = t / 2 * (1 - q) / mpmath.root(q, 4)
        else:
            z = t * (1 - q)
        return jbessel(kind, "modified", alpha, abs(z), params.squared())


def zero_free_check(kind: BesselKind | str, alpha0: object, params: QParams) -> bool:
    """Sufficient condition for g^{(k)}_alpha (k=2,3) to have no zeros in |t| <= 1."""
    kind = BesselKind.parse(kind)
    if kind is BesselKind.J1:
        raise QDomainError("zero-free criterion is available for J2 and J3 only")
    with mp.workprec(params.workprec):
        a0 = to_mpf(alpha0)
        _check_alpha(a0)
        q = params.q
        rhs = (1 - q**2) * (1 - q ** (2 * a0 + 2))
        lhs = (q ** (2 * (a0 + 1)) if kind is BesselKind.J2 else q ** mpf(1.5)) * (1 - q) ** 2
        return bool(lhs < rhs)


# ---------------------------------------------------------------------------
# zeros


@dataclass(frozen=True)
class ZeroTable:
    """Positive zeros of the modified function at base ``base`` (= q^2)."""

    kind: BesselKind
    alpha: mpf
    q: mpf
    base: mpf
    precision_bits: int
    zeros: tuple
    dmod: tuple
    brackets: tuple
    residuals: tuple
    evaluations: int = 0

    @property
    def certified_count(self) -> int:
        return len(self.zeros)

    def head(self, count: int) -> "ZeroTable":
        return ZeroTable(
            self.kind,
            self.alpha,
            self.q,
            self.base,
            self.precision_bits,
            self.zeros[:count],
            self.dmod[:count],
            self.brackets[:count],
            self.residuals[:count],
            self.evaluations,
        )

    def to_json(self) -> dict:
        b = self.precision_bits
        return {
            "kind": self.kind.value,
            "alpha": to_decimal(self.alpha, b),
            "q": to_decimal(self.q, b),
            "precision_bits": b,
            "zeros": [to_decimal(z, b) for z in self.zeros],
            "dmod": [to_decimal(d, b) for d in self.dmod],
            "brackets": [[to_decimal(lo, b), to_decimal(hi, b)] for lo, hi in self.brackets],
            "residuals": [to_decimal(r, 64) for r in self.residuals],
        }

    @classmethod
    def from_json(cls, data: dict) -> "ZeroTable":
        b = int(data["precision_bits"])
        with mp.workprec(b + 32):
            q = mpf(data["q"])
            return cls(
                BesselKind.parse(data["kind"]),
                mpf(data["alpha"]),
                q,
                q * q,
                b,
                tuple(mpf(z) for z in data["zeros"]),
                tuple(mpf(d) for d in data["dmod"]),
                tuple((mpf(lo), mpf(hi)) for lo, hi in data.get("brackets", [])),
                tuple(mpf(r) for r in data.get("residuals", [])),
            )


def _cache_file(cache_dir: Path, kind: BesselKind, alpha: mpf, q: mpf, bits: int) -> Path:
    key = f"{kind.value}_a{mpmath.nstr(alpha, 20)}_q{mpmath.nstr(q, 20)}_p{bits}.json"
    return Path(cache_dir) / key


def _scan_start(kind: BesselKind, alpha: mpf, Q: mpf) -> mpf:
    """A point below the first zero.

    Once the first term ratio of the alternating modified series is below 1,
    all later ratios are too, so the series stays positive up to this point.
    """
    p = Q ** (alpha + 1)
    if kind is BesselKind.J2:
        bound = 4 * (1 - Q) * (1 - p) / Q ** (1 + alpha)
    else:
        bound = (1 - Q) * (1 - p) / Q
    return mpmath.sqrt(bound) / 2


def bessel_zeros(
    kind: BesselKind | str,
    alpha: object,
    params: QParams,
    count: int,
    *,
    cache_dir: str | Path | None = None,
    budget: int = 100_000,
) -> ZeroTable:
    """The first ``count`` positive zeros of the modified J2/J3 at base q^2.

    A multiplicative scan (factor 1 + (1-q^2)/4) finds sign changes.  Each
    bracket is bisected to a relative width below 2^(-bits/2), then polished
    by Newton steps with the termwise derivative.
    """
    kind = BesselKind.parse(kind)
    if kind is BesselKind.J1:
        raise QDomainError("zeros are available for J2 and J3 only")
    if not isinstance(count, int) or count < 1:
        raise QDomainError("count must be a positive integer")
    with mp.workprec(params.workprec):
        alpha = to_mpf(alpha)
        _check_alpha(alpha)
    bits = params.precision_bits
    cached: ZeroTable | None = None
    path = None
    if cache_dir is not None:
        with mp.workprec(params.workprec):
            path = _cache_file(Path(cache_dir), kind, alpha, params.q, bits)
        if path.exists():
            try:
                cached = ZeroTable.from_json(json.loads(path.read_text()))
            except (ValueError, KeyError, TypeError):
                cached = None
            if cached is not None and cached.certified_count >= count:
                return cached.head(count)
    table = _search_zeros(kind, alpha, params, count, budget)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(table.to_json(), indent=1))
        tmp.replace(path)
    return table


def _search_zeros(kind: BesselKind, alpha: mpf, params: QParams, count: int, budget: int) -> ZeroTable:
    sq = params.squared()
    with mp.workprec(params.workprec):
        Q = sq.q
        evals = 0

        def f(z: mpf) -> mpf:
            nonlocal evals
            evals += 1
            return _modified(kind, alpha, z, Q, sq)[0]

        def df(z: mpf) -> mpf:
            return _modified(kind, alpha, z, Q, sq, deriv=True)[0]

        step = 1 + (1 - Q) / 4
        rel_width = mpf(2) ** (-(params.precision_bits // 2))
        z = _scan_start(kind, alpha, Q)
        fz = f(z)
        zeros: list[mpf] = []
        dmod: list[mpf] = []
        brackets: list[tuple[mpf, mpf]] = []
        residuals: list[mpf] = []
        while len(zeros) < count:
            if evals >= budget:
                partial = ZeroTable(kind, alpha, params.q, Q, params.precision_bits, tuple(zeros),
                                    tuple(dmod), tuple(brackets), tuple(residuals), evals)
                raise ZeroSearchError(
                    f"found {len(zeros)} of {count} zeros within {budget} evaluations", partial
                )
            z2 = z * step
            f2 = f(z2)
            if fz == 0:
                lo = hi = z
            elif (fz < 0) != (f2 < 0) or f2 == 0:
                lo, hi, flo = z, z2, fz
                while hi - lo > rel_width * lo:
                    mid = (lo + hi) / 2
                    fm = f(mid)
                    if fm == 0:
                        lo = hi = mid
                        break
                    if (fm < 0) == (flo < 0):
                        lo, flo = mid, fm
                    else:
                        hi = mid
            else:
                z, fz = z2, f2
                continue
            root = _newton_polish(f, df, lo, hi, params.precision_bits)
            d = df(root)
            peak, _ = _peak_term(kind, alpha, root, Q)
            zeros.append(root)
            dmod.append(d)
            brackets.append((lo, hi))
            residuals.append(abs(f(root)) / peak)
            z = hi * (1 + rel_width)
            fz = f(z)
        return ZeroTable(kind, alpha, params.q, Q, params.precision_bits, tuple(zeros), tuple(dmod),
                         tuple(brackets), tuple(residuals), evals)


def _newton_polish(f, df, lo: mpf, hi: mpf, bits: int) -> mpf:
    z = (lo + hi) / 2
    if lo == hi:
        return z
    tol = mpf(2) ** (-bits) * z
    for _ in range(12):
        d = df(z)
        if d == 0:
            break
        new = z - f(z) / d
        if not lo <= new <= hi:
            break
        done = abs(new - z) <= tol
        z = new
        if done:
            break
    return z


def _peak_term(kind: BesselKind, alpha: mpf, z: mpf, Q: mpf) -> tuple[mpf, int]:
    """Largest |term| of the modified series at z, and its index."""
    cr = _coef_ratio(kind, alpha, Q)
    w = z * z
    t = mpf(1)
    best, idx = mpf(1), 0
    n = 0
    while True:
        t *= abs(cr(n) * w)
        n += 1
        if t > best:
            best, idx = t, n
        elif t < best * mpf(2) ** -64:
            return best, idx


# ---------------------------------------------------------------------------
# h coefficients


def _h_prefactor(r: int, alpha: mpf, Q: mpf) -> mpf:
    p = Q ** (alpha + 1)
    return 1 / (2 * (1 - p)) if r == 2 else 1 / (1 - p)


def h_coeffs(
    r: int,
    alpha: object,
    params: QParams,
    kmax: int,
    zeros_used: int | None = None,
    *,
    method: str = "SERIES_DIVISION",
    zeros: ZeroTable | None = None,
    full_output: bool = False,
):
    """h^{(r)}_k(q^2) for k = 1..kmax, where J_{alpha+1}/J_alpha = sum_k h_k t^{2k-1}.

    ``SERIES_DIVISION`` divides the two Taylor series exactly.
    ``ZERO_SUM`` sums -2 J_{alpha+1}(j)/J'_alpha(j) j^{-2k} over the zeros.
    The ratio for J3 also has the entire part t, which ``ZERO_SUM`` adds to h_1.
    """
    if r not in (2, 3):
        raise QDomainError("r must be 2 or 3")
    if not isinstance(kmax, int) or kmax < 1:
        raise QDomainError("kmax must be a positive integer")
    kind = BesselKind.J2 if r == 2 else BesselKind.J3
    with mp.workprec(params.workprec):
        alpha = to_mpf(alpha)
        _check_alpha(alpha)
        Q = params.q**2
        pref = _h_prefactor(r, alpha, Q)
        if method == "SERIES_DIVISION":
            num = modified_coeffs(kind, alpha + 1, Q, kmax)
            den = modified_coeffs(kind, alpha, Q, kmax)
            c = series_mul(num, series_inverse(den, kmax), kmax)
            vals = [pref * ck for ck in c]
            certs = [SeriesTruncation(k + 1, mpf(0)) for k in range(kmax)]
            return (vals, certs) if full_output else vals
        if method != "ZERO_SUM":
            raise QDomainError(f"unknown method {method!r}")
        nz = 64 if zeros_used is None else zeros_used
        table = zeros if zeros is not None else bessel_zeros(kind, alpha, params, nz)
        sq = params.squared()
        residues = []
        for j, d in zip(table.zeros[:nz], table.dmod[:nz]):
            up, _ = _modified(kind, alpha + 1, j, Q, sq)
            residues.append(pref * j * up / d)
        vals, certs = [], []
        for k in range(1, kmax + 1):
            terms = [-2 * R * j ** (-2 * k) for R, j in zip(residues, table.zeros)]
            s = mpmath.fsum(terms)
            if r == 3 and k == 1:
                s += 1
            if len(terms) >= 2 and terms[-2] != 0:
                rho = abs(terms[-1] / terms[-2])
                tail = abs(terms[-1]) * rho / (1 - rho) if rho < 1 else mpmath.inf
            else:
                tail = mpmath.inf
            vals.append(s)
            certs.append(SeriesTruncation(len(terms), tail))
        return (vals, certs) if full_output else vals


def zero_sum_terms(r: int, alpha: object, params: QParams, k: int, table: ZeroTable) -> list[mpf]:
    """Individual terms of the zero sum for h^{(r)}_k (for rate diagnostics)."""
    kind = BesselKind.J2 if r == 2 else BesselKind.J3
    with mp.workprec(params.workprec):
        alpha = to_mpf(alpha)
        Q = params.q**2
        pref = _h_prefactor(r, alpha, Q)
        sq = params.squared()
        out = []
        for j, d in zip(table.zeros, table.dmod):
            up, _ = _modified(kind, alpha + 1, j, Q, sq)
            out.append(-2 * pref * j * up / d * j ** (-2 * k))
        return out


def hahn_factor(t: object, params: QParams) -> mpf:
    """E_q(t/2) E_q(-t/2) = (t^2 (1-q)^2 / 4; q^2)_inf."""
    with mp.workprec(params.workprec):
        t = to_mpf(t)
        q = params.q
        val, _ = _poch_inf(t * t * (1 - q) ** 2 / 4, q * q, params.trunc_rel_tol)
        return val


__all__ = [
    "BesselKind",
    "ZeroSearchError",
    "ZeroTable",
    "bessel_zeros",
    "g_real",
    "h_coeffs",
    "hahn_factor",
    "jbessel",
    "jbessel_derivative",
    "modified_coeffs",
    "zero_free_check",
    "zero_sum_terms",
]

