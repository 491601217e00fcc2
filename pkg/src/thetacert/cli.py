"""Command-line front end.

Exit codes: 0 success, 1 input error, 2 certificate inconclusive (or a
check failed), 3 a tolerance was unreachable.
"""

from __future__ import annotations

import json
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import click

from . import certifier, ramanujan, suite, watson
from .exppoly import CASE_IDS, ExpPoly, ExpPolyParseError

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_FAILED = 2
EXIT_UNREACHABLE = 3


@dataclass(frozen=True)
class RunConfig:
    command: str
    input: Path | None = None
    digits: int = 30
    bits: int = ramanujan.DEFAULT_BITS
    grid: watson.Grid = watson.DEFAULT_GRID
    max_n: int = 20
    depth: int = 40
    tol: float = 1e-13
    fmt: str = "json"
    out: Path | None = None

    def __post_init__(self):
        if not self.tol > 0:
            raise click.BadParameter("tolerance must be positive", param_hint="--tol")
        if self.digits < 15:
            raise click.BadParameter("at least 15 digits", param_hint="--precision-digits")
        if self.max_n < 0:
            raise click.BadParameter("must be nonnegative", param_hint="--max-n")


def _write(cfg: RunConfig, text: str) -> None:
    if cfg.out is not None:
        cfg.out.write_text(text)
        click.echo(f"wrote {cfg.out}")


def _grid(ctx, param, value):
    if isinstance(value, watson.Grid):
        return value
    try:
        return watson.Grid.parse(value)
    except ValueError as exc:
        raise click.BadParameter(str(exc)) from None


out_opt = click.option("--out", type=click.Path(path_type=Path), help="Machine-readable output file.")
digits_opt = click.option("--precision-digits", "digits", default=30, show_default=True, type=int)
fmt_opt = click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)


@click.group()
def main():
    """Certified positivity of exponential polynomials and Ramanujan's theta_n."""


@main.command("certify")
@click.option("--input", "input_path", required=True, type=click.Path(path_type=Path))
@click.option("--early-stop", is_flag=True, help="Stop at the first negative entry.")
@out_opt
def cmd_certify(input_path, early_stop, out):
    """Certify f >= 0 on [0, inf) for the ExpPoly JSON in INPUT."""
    cfg = RunConfig("certify", input=input_path, out=out)
    try:
        text = cfg.input.read_text()
    except OSError as exc:
        click.echo(f"error: cannot read {cfg.input}: {exc.strerror}", err=True)
        sys.exit(EXIT_INPUT)
    try:
        f = ExpPoly.loads(text)
        if f.is_zero():
            raise ExpPolyParseError("zero exponential polynomial", "$.parts")
    except ExpPolyParseError as exc:
        click.echo(f"error: {cfg.input}: {exc}", err=True)
        sys.exit(EXIT_INPUT)
    c = certifier.certify(f, early_stop=early_stop)
    click.echo(f"order {c.order}, degrees {list(c.degrees)}, mu {c.mu}")
    click.echo(f"lambda = ({', '.join(map(str, c.lam))})")
    click.echo(f"verdict: {c.verdict}")
    _write(cfg, c.dumps() + "\n")
    sys.exit(EXIT_OK if c.certified else EXIT_FAILED)


@main.command("cases")
@out_opt
def cmd_cases(out):
    """Run the three built-in cases and diff against the published vectors."""
    cfg = RunConfig("cases", out=out)
    t0 = time.perf_counter()
    diffs = [certifier.compare_to_paper(cid) for cid in CASE_IDS]
    elapsed = time.perf_counter() - t0
    for d in diffs:
        c = d.certificate
        neg = sum(1 for s in d.signs if s < 0)
        click.echo(f"{d.case_id}: mu {c.mu}, verdict {c.verdict}, negative entries {neg}")
        click.echo(f"  lambda = ({', '.join(map(str, c.lam))})")
        if not d.mismatches:
            click.echo("  matches published vector")
        for i, got, want in d.mismatches:
            flag = " (suspect print)" if i in certifier.SUSPECT_INDICES[d.case_id] else ""
            click.echo(f"  [{i}] computed {got}, published {want}{flag}")
    click.echo(f"elapsed {elapsed:.2f}s")
    _write(cfg, json.dumps([d.to_json() for d in diffs], indent=2) + "\n")
    sys.exit(EXIT_OK if all(d.all_nonnegative for d in diffs) else EXIT_FAILED)


@main.command("theta")
@click.option("--max-n", default=20, show_default=True, type=int)
@click.option("--bits", default=ramanujan.DEFAULT_BITS, show_default=True, type=int)
@digits_opt
@fmt_opt
@out_opt
def cmd_theta(max_n, bits, digits, fmt, out):
    """Tabulate enclosures of theta_n and k_n for n = 0..MAX_N."""
    cfg = RunConfig("theta", digits=digits, bits=bits, max_n=max_n, fmt=fmt, out=out)
    rows = ramanujan.theta_table(cfg.max_n, cfg.bits)
    ok = all(r.theta.subset_of(ramanujan.THIRD, Fraction(1, 2)) for r in rows)
    ok &= all(
        r.k is not None and r.k.subset_of(ramanujan.K_LOWER, ramanujan.K_UPPER) for r in rows
    )
    click.echo(ramanujan.table_csv(rows, min(cfg.digits, 20)), nl=False)
    click.echo(f"{len(rows)} rows; bounds {'hold' if ok else 'VIOLATED'}")
    if cfg.out is not None:
        text = ramanujan.table_csv(rows, cfg.digits) if cfg.fmt == "csv" else ramanujan.table_json(rows) + "\n"
        _write(cfg, text)
    sys.exit(EXIT_OK if ok else EXIT_FAILED)


@main.command("monotone")
@click.option("--depth", default=40, show_default=True, type=int, help="Check all k + n <= DEPTH.")
@click.option("--bits", default=64, show_default=True, type=int, help="Starting precision.")
@out_opt
def cmd_monotone(depth, bits, out):
    """Signed finite differences of theta_n and the two derived sequences."""
    cfg = RunConfig("monotone", depth=depth, bits=bits, out=out)
    result = {}
    ok = True
    for kind in ramanujan.SequenceKind:
        grid = ramanujan.monotone_grid(kind, cfg.depth, cfg.bits)
        bad = [(k, n) for (k, n), (s, _) in grid.items() if s is not ramanujan.Sign.POSITIVE]
        top = max(b for _, b in grid.values())
        click.echo(f"{kind.value}: {len(grid)} differences, {len(bad)} not positive, max bits {top}")
        ok &= not bad
        result[kind.value] = {
            "depth": cfg.depth,
            "count": len(grid),
            "not_positive": [
                {"k": k, "n": n, "sign": grid[(k, n)][0].value} for k, n in bad
            ],
            "max_bits": top,
        }
    _write(cfg, json.dumps(result, indent=2) + "\n")
    sys.exit(EXIT_OK if ok else EXIT_FAILED)


@main.command("verify")
@click.option("--grid", default=str(watson.DEFAULT_GRID), show_default=True, callback=_grid)
@click.option("--max-n", default=20, show_default=True, type=int)
@click.option("--tol", default=1e-13, show_default=True, type=float)
@digits_opt
@fmt_opt
@out_opt
def cmd_verify(grid, max_n, tol, digits, fmt, out):
    """Quadrature, factorization-identity and inequality suites."""
    cfg = RunConfig("verify", digits=digits, grid=grid, max_n=max_n, tol=tol, fmt=fmt, out=out)
    report = suite.run_verification(cfg.grid, cfg.max_n, cfg.tol, cfg.digits)
    for c in report.checks:
        vals = []
        if c.min_margin is not None:
            vals.append(f"min margin {c.min_margin:.3e}")
        if c.max_residual is not None:
            vals.append(f"max residual {c.max_residual:.3e}")
        click.echo(f"{'PASS' if c.passed else 'FAIL'}  {c.name}  {'; '.join(vals)}")
    for u in report.unreachable:
        click.echo(f"UNREACHABLE  {u}")
    if cfg.out is not None:
        _write(cfg, suite.scan_csv(report.scan) if cfg.fmt == "csv" else report.dumps() + "\n")
    if report.unreachable:
        sys.exit(EXIT_UNREACHABLE)
    sys.exit(EXIT_OK if report.passed else EXIT_FAILED)


if __name__ == "__main__":
    main()
