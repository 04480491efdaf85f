"""
Command-line interface for qbb.

Every number is written as a decimal string at the requested precision, so
tables can be read back without going through binary floats.

Usage:
    qbb numbers --family 1 -N 10           # beta numbers
    qbb poly --family 2 -n 3               # coefficients of B^{(2)}_{3,alpha}
    qbb zeros --kind 2 --count 8           # positive zeros of the q-Bessel function
    qbb connect --basis legendre -n 4      # connection coefficients
    qbb asym --nmax 12                     # residue series vs recurrence
    qbb verify --suite all                 # run the identity suite

Exit codes: 0 success, 1 verification failure, 2 bad arguments,
3 unconverged result.
"""

from __future__ import annotations

import csv
import functools
import io
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

import click
from mpmath import mp, mpf

from . import qasym, qbernoulli, qbessel, qconnect
from .qbernoulli import IDENTITY_IDS, IdentityReport
from .qcore import ConvergenceError, QDomainError, QParams, phi21, qexp, to_decimal, to_mpf

__all__ = ["CliConfig", "ORACLE_IDS", "main", "oracle_reports"]


@dataclass(frozen=True)
class CliConfig:
    q: str
    alpha: str
    precision_bits: int
    output: str
    out_path: str | None

    def params(self) -> QParams:
        return QParams(self.q, self.precision_bits)

    def alpha_mpf(self) -> mpf:
        with mp.workprec(self.precision_bits + 32):
            a = to_mpf(self.alpha)
        if not a > -1:
            raise QDomainError(f"alpha must exceed -1, got {self.alpha}")
        return a


def common_options(func: Callable) -> Callable:
    """Attach the flags shared by every subcommand and collect them into a CliConfig."""

    @click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None, help="Write to PATH instead of stdout.")
    @click.option("--format", "output", type=click.Choice(["json", "csv"]), default="json", show_default=True)
    @click.option(
        "--precision-bits",
        type=int,
        default=256,
        show_default=True,
        envvar="QBB_PRECISION_BITS",
        help="Working precision in bits (env: QBB_PRECISION_BITS).",
    )
    @click.option("--alpha", default="0.5", show_default=True, help="Bessel order alpha > -1.")
    @click.option("--q", "q", default="0.5", show_default=True, help="Base q in (0, 1).")
    @functools.wraps(func)
    def wrapper(q, alpha, precision_bits, output, out_path, **kwargs):
        cfg = CliConfig(q, alpha, precision_bits, output, out_path)
        try:
            return func(cfg, **kwargs)
        except QDomainError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        except ConvergenceError as exc:
            click.echo(f"not converged: {exc}", err=True)
            sys.exit(3)

    return wrapper


def _emit(cfg: CliConfig, doc: dict | list, rows: Sequence[dict]) -> None:
    """Write ``doc`` as JSON or ``rows`` as fully quoted CSV."""
    if cfg.output == "json":
        text = json.dumps(doc, indent=2) + "\n"
    else:
        buf = io.StringIO()
        fields = list(rows[0].keys()) if rows else []
        writer = csv.DictWriter(buf, fieldnames=fields, quoting=csv.QUOTE_ALL, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        text = buf.getvalue()
    if cfg.out_path:
        Path(cfg.out_path).write_text(text)
    else:
        click.echo(text, nl=False)


@click.group()
@click.version_option(package_name="artifact")
def main() -> None:
    """Generalized q-Bernoulli polynomials from Jackson q-Bessel functions."""


# ---------------------------------------------------------------------------
# tables


@main.command()
@click.option("--family", type=click.IntRange(1, 3), default=1, show_default=True)
@click.option("-N", "N", type=click.IntRange(0, None), default=10, show_default=True, help="Largest index.")
@click.option("--method", type=click.Choice(qbernoulli.BETA_METHODS), default="REC_Q1902", show_default=True)
@common_options
def numbers(cfg: CliConfig, family: int, N: int, method: str) -> None:
    """Beta numbers beta_0..beta_N (family 3 gives the third kind)."""
    params, alpha = cfg.params(), cfg.alpha_mpf()
    fn = qbernoulli.beta3_numbers if family == 3 else qbernoulli.beta_numbers
    seq = fn(alpha, params, N, method)
    bits = cfg.precision_bits
    rows = [{"n": n, "value": to_decimal(v, bits)} for n, v in enumerate(seq.values)]
    doc = {"family": family, "alpha": cfg.alpha, "q": cfg.q, "precision_bits": bits, "method": method, "rows": rows}
    _emit(cfg, doc, rows)


@main.command()
@click.option("--family", type=click.IntRange(1, 3), default=1, show_default=True)
@click.option("-n", "n", type=click.IntRange(0, None), required=True, help="Degree.")
@click.option("--x", "xs", multiple=True, help="Also evaluate at these points (repeatable).")
@common_options
def poly(cfg: CliConfig, family: int, n: int, xs: tuple[str, ...]) -> None:
    """Coefficients of B^{(k)}_{n,alpha}(x; q) in powers of x."""
    params, alpha = cfg.params(), cfg.alpha_mpf()
    bits = cfg.precision_bits
    p = qbernoulli.bernoulli_poly(family, n, alpha, params)
    coeffs = list(p.coeffs) + [mpf(0)] * (n + 1 - len(p.coeffs))
    rows = [{"power": j, "coeff": to_decimal(c, bits)} for j, c in enumerate(coeffs)]
    doc = {"family": family, "n": n, "alpha": cfg.alpha, "q": cfg.q, "precision_bits": bits, "coeffs": [r["coeff"] for r in rows]}
    if xs:
        with mp.workprec(params.workprec):
            doc["values"] = [{"x": x, "value": to_decimal(p(to_mpf(x)), bits)} for x in xs]
    _emit(cfg, doc, rows)


def _cache_dir(no_cache: bool) -> Path | None:
    if no_cache:
        return None
    env = os.environ.get("QBB_CACHE_DIR")
    return Path(env) if env else Path.home() / ".cache" / "qbb"


@main.command()
@click.option("--kind", type=click.Choice(["2", "3"]), default="2", show_default=True)
@click.option("--count", type=click.IntRange(1, None), default=8, show_default=True)
@click.option("--no-cache", is_flag=True, help="Do not read or write the zero cache.")
@common_options
def zeros(cfg: CliConfig, kind: str, count: int, no_cache: bool) -> None:
    """Positive zeros of the modified q-Bessel function at base q^2."""
    params, alpha = cfg.params(), cfg.alpha_mpf()
    table = qbessel.bessel_zeros(f"J{kind}", alpha, params, count, cache_dir=_cache_dir(no_cache))
    doc = table.to_json()
    rows = [
        {"index": i + 1, "zero": z, "dmod": d, "residual": r}
        for i, (z, d, r) in enumerate(zip(doc["zeros"], doc["dmod"], doc["residuals"]))
    ]
    _emit(cfg, doc, rows)


@main.command()
@click.option("--basis", type=click.Choice(["laguerre", "legendre"], case_sensitive=False), default="legendre", show_default=True)
@click.option("--family", type=click.IntRange(1, 3), default=1, show_default=True)
@click.option("-n", "n", type=click.IntRange(0, None), required=True, help="Degree.")
@click.option("--displayed", is_flag=True, help="Use the commonly quoted constants instead of the corrected ones.")
@common_options
def connect(cfg: CliConfig, basis: str, family: int, n: int, displayed: bool) -> None:
    """Expansion coefficients of B^{(k)}_{n,alpha} in a q-orthogonal basis."""
    params, alpha = cfg.params(), cfg.alpha_mpf()
    exp = qconnect.connection_coeffs(basis, family, n, alpha, params, displayed=displayed)
    doc = exp.to_json(cfg.precision_bits)
    rows = [{"m": m, "coeff": c} for m, c in enumerate(doc["coeffs"])]
    _emit(cfg, doc, rows)


@main.command()
@click.option("--nmax", type=click.IntRange(1, None), default=12, show_default=True)
@click.option("--nmin", type=click.IntRange(1, None), default=1, show_default=True)
@click.option("--zeros", "zeros_used", type=click.IntRange(1, None), default=6, show_default=True)
@common_options
def asym(cfg: CliConfig, nmax: int, nmin: int, zeros_used: int) -> None:
    """Residue-series beta numbers against the recurrence.  Exits 3 if any row is unconverged."""
    params, alpha = cfg.params(), cfg.alpha_mpf()
    if nmin > nmax:
        raise QDomainError("--nmin must not exceed --nmax")
    bits = cfg.precision_bits
    rows = []
    for r in qasym.residue_table(alpha, params, nmax, zeros_used):
        if r["n"] < nmin:
            continue
        rows.append(
            {
                "n": r["n"],
                "residue": to_decimal(r["residue"], bits),
                "recurrence": to_decimal(r["recurrence"], bits),
                "rel_error": to_decimal(r["rel_error"], 64),
                "last_term": to_decimal(r["last_term"], 64),
                "converged": r["converged"],
                "valid_range": r["valid_range"],
            }
        )
    doc = {"alpha": cfg.alpha, "q": cfg.q, "precision_bits": bits, "zeros_used": zeros_used, "rows": rows}
    _emit(cfg, doc, rows)
    bad = [r["n"] for r in rows if not r["converged"]]
    if bad:
        click.echo(f"unconverged rows: n = {', '.join(map(str, bad))}", err=True)
        sys.exit(3)


# ---------------------------------------------------------------------------
# verification

ORACLE_IDS = ("RESIDUE_SERIES", "LEGENDRE_ORACLE", "LAGUERRE_RECON", "LEGENDRE_NORM", "PHI21_CLOSED_FORM")


def _report(name: str, point: dict, residual: mpf, tol: mpf, detail: str = "") -> IdentityReport:
    return IdentityReport(name, point, residual, tol, bool(residual <= tol), detail)


def _residue_reports(params: QParams) -> Iterable[IdentityReport]:
    for q in ("0.3", "0.5"):
        p = params.with_q(q)
        floor = p.tolerance()
        for a in ("-0.25", "0.5", "1.5"):
            with mp.workprec(p.workprec):
                for row in qasym.residue_table(a, p, 12, 6):
                    if not row["valid_range"]:
                        continue
                    v = abs(row["residue"])
                    if abs(row["recurrence"]) <= floor:
                        tol = max(mpf(10) ** -12, 50 * row["last_term"])
                    else:
                        tol = max(mpf(10) ** -12, 50 * row["last_term"] / v)
                    yield _report("RESIDUE_SERIES", {"n": row["n"], "alpha": a, "q": q}, row["rel_error"], tol)


def _legendre_oracle_reports(params: QParams) -> Iterable[IdentityReport]:
    for a, q in (("0.5", "0.5"), ("-0.25", "0.3"), ("1.5", "0.8")):
        p = params.with_q(q)
        with mp.workprec(p.workprec):
            for fam in (1, 2, 3):
                for n in range(7):
                    exp = qconnect.connection_coeffs("legendre", fam, n, a, p)
                    worst = mpf(0)
                    for k, c in enumerate(exp.coeffs):
                        o = qconnect.legendre_coeff_oracle(fam, n, k, a, p)
                        worst = max(worst, abs(o - c) / max(mpf(1), abs(o)))
                    yield _report("LEGENDRE_ORACLE", {"k": fam, "n": n, "alpha": a, "q": q}, worst, p.tolerance())


def _laguerre_reports(params: QParams) -> Iterable[IdentityReport]:
    for q in ("0.3", "0.5", "0.8"):
        p = params.with_q(q)
        for a in ("0.25", "0.5", "1.3"):
            for fam in (1, 2, 3):
                for n in range(7):
                    exp = qconnect.connection_coeffs("laguerre", fam, n, a, p)
                    res = qconnect.expansion_residual(exp, ["0.1", "0.7", "2"], p)
                    yield _report("LAGUERRE_RECON", {"k": fam, "n": n, "alpha": a, "q": q}, res, p.tolerance())


def _norm_reports(params: QParams) -> Iterable[IdentityReport]:
    for q in qbernoulli.DEFAULT_Q:
        p = params.with_q(q)
        with mp.workprec(p.workprec):
            for n in range(7):
                ref = qconnect.legendre_norm(n, p)
                res = abs(qconnect.legendre_inner(n, n, p) - ref) / ref
                yield _report("LEGENDRE_NORM", {"n": n, "q": q}, res, p.tolerance())


def _phi21_reports(params: QParams) -> Iterable[IdentityReport]:
    for q in qbernoulli.DEFAULT_Q:
        p = params.with_q(q)
        with mp.workprec(p.workprec):
            qq = p.q
            # alpha = -1/2 puts the lower parameter at q^0, a pole
            for a in ("-0.25", "0.5", "1.5", "3"):
                al = to_mpf(a)
                for s in ("-0.9", "-0.3", "0.2", "0.7"):
                    z = to_mpf(s)
                    t = 2 * z / (1 - qq)
                    lhs = phi21(qq ** (al + 0.5), -(qq ** (al + 0.5)), qq ** (2 * al + 1), z, p)
                    rhs = qbessel.jbessel("J1", "g_form", al, t, p) * qexp("big_E", t / 2, p)
                    res = abs(lhs - rhs) / abs(lhs)
                    yield _report("PHI21_CLOSED_FORM", {"alpha": a, "q": q, "z": s}, res, p.tolerance())


_ORACLES = {
    "RESIDUE_SERIES": _residue_reports,
    "LEGENDRE_ORACLE": _legendre_oracle_reports,
    "LAGUERRE_RECON": _laguerre_reports,
    "LEGENDRE_NORM": _norm_reports,
    "PHI21_CLOSED_FORM": _phi21_reports,
}


def oracle_reports(oracle_id: str, params: QParams) -> list[IdentityReport]:
    """Reports for one of the cross-module oracles in ORACLE_IDS."""
    if oracle_id not in _ORACLES:
        raise QDomainError(f"unknown oracle id {oracle_id!r}")
    return list(_ORACLES[oracle_id](params))


def _parse_suite(suite: tuple[str, ...]) -> list[str]:
    names: list[str] = []
    for item in suite:
        names.extend(s.strip().upper() for s in item.split(",") if s.strip())
    if not names or "ALL" in names:
        return list(IDENTITY_IDS) + list(ORACLE_IDS)
    known = set(IDENTITY_IDS) | set(ORACLE_IDS)
    unknown = [s for s in names if s not in known]
    if unknown:
        raise QDomainError(f"unknown suite id(s): {', '.join(unknown)}")
    return list(dict.fromkeys(names))


@main.command()
@click.option("--suite", multiple=True, default=("all",), show_default=True, help="'all' or identity ids (repeatable or comma-separated).")
@click.option("--grid", type=click.Choice(["default", "custom"]), default="default", show_default=True)
@click.option("--points", type=click.Path(exists=True, dir_okay=False), default=None, help="JSON list of points for --grid custom.")
@common_options
def verify(cfg: CliConfig, suite: tuple[str, ...], grid: str, points: str | None) -> None:
    """Check identities and oracles; one JSON report per line, summary on stderr.

    The default grids fix q and alpha themselves; --q and --alpha are only
    checked for validity.  Custom points apply to catalog identities only.
    """
    params = cfg.params()
    cfg.alpha_mpf()
    ids = _parse_suite(suite)
    custom = None
    if grid == "custom":
        if points is None:
            raise QDomainError("--grid custom needs --points")
        try:
            custom = json.loads(Path(points).read_text())
        except json.JSONDecodeError as exc:
            raise QDomainError(f"cannot parse {points}: {exc}") from None
        if not isinstance(custom, list) or not all(isinstance(pt, dict) for pt in custom):
            raise QDomainError("--points must hold a JSON list of objects")
        if any(i in ORACLE_IDS for i in ids):
            raise QDomainError("custom points apply to catalog identities only")
    elif points is not None:
        raise QDomainError("--points needs --grid custom")

    reports: list[IdentityReport] = []
    for ident in ids:
        if ident in ORACLE_IDS:
            reports.extend(oracle_reports(ident, params))
        else:
            reports.extend(qbernoulli.run_identity_grid(ident, params, custom))

    passed = sum(r.passed for r in reports)
    failed = len(reports) - passed
    rows = [r.to_json() for r in reports]
    if cfg.output == "json":
        text = "".join(json.dumps(r) + "\n" for r in rows)
        if cfg.out_path:
            Path(cfg.out_path).write_text(text)
        else:
            click.echo(text, nl=False)
    else:
        flat = [
            {"id": r["id"], "point": json.dumps(r["point"], sort_keys=True), "residual": r["residual"], "tolerance": r["tolerance"], "pass": r["pass"]}
            for r in rows
        ]
        _emit(cfg, flat, flat)
    click.echo(f"verify: {passed} passed, {failed} failed, {len(reports)} total", err=True)
    if failed:
        sys.exit(1)


if __name__ == "__main__":
    main()
