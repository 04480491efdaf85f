"""Residue-series values of the q-Bernoulli numbers and alpha -> infinity limits.

The residue series writes beta_{n,alpha}(q) as a sum over the positive zeros
j_k of the modified second Jackson q-Bessel function at base q^2:

    beta_{2m}   = 2 (-1)^{m+1} (q;q)_{2m}   sum_k Cos_q(j_k/(2(1-q))) / (j_k^{2m+1} J'(j_k))
    beta_{2m+1} = 2 (-1)^m     (q;q)_{2m+1} sum_k Sin_q(j_k/(2(1-q))) / (j_k^{2m+2} J'(j_k))

In practice each term behaves like j_k^{alpha + 1/2 - n}, so the series only
converges to the right value when n > alpha + 1/2.  :func:`residue_valid`
reports this; the results are still returned outside that range.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
from mpmath import mp, mpf

from .qbernoulli import beta_numbers
from .qbessel import ZeroTable, bessel_zeros
from .qcore import QDomainError, QParams, _poch, _qbinom, qtrig, to_decimal, to_mpf


@dataclass(frozen=True)
class ResidueSeriesResult:
    n: int
    parity: str
    value: mpf
    zeros_used: int
    last_term_magnitude: mpf
    converged: bool
    terms: tuple = ()

    def to_json(self, bits: int = 256) -> dict:
        return {
            "n": self.n,
            "parity": self.parity,
            "value": to_decimal(self.value, bits),
            "zeros_used": self.zeros_used,
            "last_term_magnitude": to_decimal(self.last_term_magnitude, 64),
            "converged": self.converged,
        }


def residue_valid(n: int, alpha: object) -> bool:
    """Whether the residue series is expected to reproduce beta_n (n > alpha + 1/2)."""
    return n > to_mpf(alpha) + mpf(1) / 2


def _terms(n: int, table: ZeroTable, params: QParams) -> list[mpf]:
    q = params.q
    m = n // 2
    even = n % 2 == 0
    sign = (-1) ** (m + 1) if even else (-1) ** m
    pref = 2 * sign * _poch(q, q, n)
    out = []
    for j, d in zip(table.zeros, table.dmod):
        arg = j / (2 * (1 - q))
        trig = qtrig("Cos_q" if even else "Sin_q", arg, params)
        out.append(pref * trig / (j ** (n + 1) * d))
    return out


def beta_residue(
    n: int,
    alpha: object,
    params: QParams,
    zeros_used: int = 6,
    *,
    zeros: ZeroTable | None = None,
    rel_tol: object = 1e-12,
) -> ResidueSeriesResult:
    """beta_{n,alpha}(q) from the first ``zeros_used`` terms of the residue series.

    The result is flagged converged when the last term is at most ``rel_tol``
    times the value.  It also counts as converged when the last term is below
    2^(-bits/2) in absolute terms, which covers values that vanish by parity.
    """
    if not isinstance(n, int) or n < 1:
        raise QDomainError("the residue series is defined for n >= 1")
    if not isinstance(zeros_used, int) or zeros_used < 1:
        raise QDomainError("zeros_used must be a positive integer")
    with mp.workprec(params.workprec):
        alpha = to_mpf(alpha)
        table = zeros if zeros is not None else bessel_zeros("J2", alpha, params, zeros_used)
        table = table.head(zeros_used)
        terms = _terms(n, table, params)
        value = mpmath.fsum(terms)
        last = abs(terms[-1])
        tol = to_mpf(rel_tol)
        converged = bool(last <= tol * abs(value) or last <= mpf(2) ** (-(params.precision_bits // 2)))
        return ResidueSeriesResult(
            n, "even" if n % 2 == 0 else "odd", value, len(terms), last, converged, tuple(terms)
        )


def beta_asymptotic_leading(n: int, alpha: object, params: QParams, *, zeros: ZeroTable | None = None) -> mpf:
    """The first-zero term of the residue series, the leading behaviour for large n."""
    return beta_residue(n, alpha, params, 1, zeros=zeros).value


def residue_table(alpha: object, params: QParams, nmax: int, zeros_used: int = 6) -> list[dict]:
    """Residue value against the recurrence value for n = 1..nmax.

    ``rel_error`` is relative, except when the recurrence value is below
    2^(-bits/2); those rows report the absolute difference.
    """
    with mp.workprec(params.workprec):
        alpha = to_mpf(alpha)
        table = bessel_zeros("J2", alpha, params, zeros_used)
        rec = beta_numbers(alpha, params, nmax).values
        floor = mpf(2) ** (-(params.precision_bits // 2))
        rows = []
        for n in range(1, nmax + 1):
            res = beta_residue(n, alpha, params, zeros_used, zeros=table)
            ref = rec[n]
            # values that vanish by parity are compared in absolute terms
            err = abs(res.value - ref) / abs(ref) if abs(ref) > floor else abs(res.value - ref)
            rows.append(
                {
                    "n": n,
                    "residue": res.value,
                    "recurrence": ref,
                    "rel_error": err,
                    "last_term": res.last_term_magnitude,
                    "converged": res.converged,
                    "valid_range": residue_valid(n, alpha),
                }
            )
        return rows


LIMIT_KINDS = ("B1_LIMIT", "B2_LIMIT", "B3_LIMIT", "BETA_LIMIT", "BETA3_LIMIT")


def alpha_limit(kind: str, n: int, x: object, params: QParams, *, displayed: bool = False) -> mpf:
    """Closed forms of the alpha -> infinity limits of B^{(k)}_{n,alpha}(x) and beta_n.

    For ``B3_LIMIT`` the inner factor is (2x q^{(1-(n-2k))/2}; q)_{n-2k}.
    ``displayed=True`` uses q^{(1-n)/2} instead, which is not the limit for
    n >= 3.
    """
    if kind not in LIMIT_KINDS:
        raise QDomainError(f"unknown limit kind {kind!r}")
    if not isinstance(n, int) or n < 0:
        raise QDomainError("n must be a non-negative integer")
    with mp.workprec(params.workprec):
        q = params.q
        x = to_mpf(x)
        half = mpf(-1) / 2
        if kind == "B1_LIMIT":
            if x == 0:
                raise QDomainError("B1_LIMIT needs x != 0; use BETA_LIMIT at x = 0")
            return x**n * _poch(1 / (2 * x), q, n)
        if kind == "B2_LIMIT":
            g = mpmath.fsum(_qbinom(n, k, q) * q ** (k * k - n * k) * (-2 * x) ** k for k in range(n + 1))
            return half**n * q ** (n * (n - 1) // 2) * g
        if kind == "BETA_LIMIT":
            return (-1) ** n * mpf(2) ** (-n) * q ** (n * (n - 1) // 2)
        if kind == "BETA3_LIMIT":
            x = mpf(0)
        total = mpf(0)
        for k in range(n // 2 + 1):
            m = n - 2 * k
            shift = mpf(1 - n) / 2 if displayed else mpf(1 - m) / 2
            total += (
                (-1) ** k
                * q ** (k * (n - k + 3))
                * _poch(q ** (-n), q, 2 * k)
                / _poch(q * q, q * q, k)
                * _poch(2 * x * q**shift, q, m)
            )
        return q ** (mpf(n * (n - 1)) / 4) * half**n * total


__all__ = [
    "LIMIT_KINDS",
    "ResidueSeriesResult",
    "alpha_limit",
    "beta_asymptotic_leading",
    "beta_residue",
    "residue_table",
    "residue_valid",
]
