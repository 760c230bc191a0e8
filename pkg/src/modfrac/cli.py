"""Command line front end.

Exit codes: 0 success, 1 a numerical check failed, 2 invalid input.
"""

from __future__ import annotations

from fractions import Fraction
import functools
import math
import sys
import time

import click
import numpy as np

from . import acceptance
from .fracint import MultiplierSpec, apply_iab, lemma31_sweep, psi_field, SWEEP_GRID
from .grid import GridSpec, lp_norm, sample
from .modnorm import StftGrid, amalgam_norm, mpq_norm_decomp, mpq_norm_stft
from .region import (
    RegionQuery,
    amalgam_sufficient,
    as_fraction,
    reciprocal,
    region_grid_scan,
    theorem12_verdict,
)
from .reports import VERSION, Report, field_from_csv, field_to_csv, field_to_json, render
from .sharpness import (
    CRITICAL_GRID,
    DILATION_GRID,
    CriticalScanConfig,
    DilationScanConfig,
    critical_scan,
    dilation_scan,
)
from .windows import DEFAULT_BUMP, PsiProfile


class InvalidInput(click.ClickException):
    exit_code = 2


class CheckFailed(click.ClickException):
    exit_code = 1


def _note(msg: str) -> None:
    click.echo(msg, err=True)


def common_options(fn):
    """Flags shared by every subcommand."""
    opts = [
        click.option("--out", "out", type=click.Path(dir_okay=False), default=None,
                     help="Write the report here instead of stdout."),
        click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv",
                     show_default=True),
        click.option("--seed", type=int, default=0, show_default=True),
        click.option("--grid-m", type=int, default=None, help="Samples per axis."),
        click.option("--grid-l", type=float, default=None, help="Box half-width."),
        click.option("--dim", type=click.IntRange(1, 2), default=1, show_default=True),
    ]
    for opt in reversed(opts):
        fn = opt(fn)

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        try:
            return fn(*args, **kwargs)
        except (ValueError, TypeError, ZeroDivisionError) as exc:
            raise InvalidInput(str(exc)) from exc
        finally:
            _note(f"wall time {time.perf_counter() - t0:.2f}s")

    return wrapper


def _grid(dim: int, m, l, default: GridSpec) -> GridSpec:
    if default.n != dim:
        default = GridSpec(dim, min(default.m, 64), min(default.l, 8.0))
    return GridSpec(dim, m if m is not None else default.m, l if l is not None else default.l)


def _emit(rep: Report, out, fmt) -> None:
    text = render(rep, fmt)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _number(text: str, name: str) -> float:
    """A real given as ``a/b`` or a decimal."""
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidInput(f"{name}: cannot read {text!r} as a number") from exc


def _rational(text: str, name: str) -> Fraction:
    try:
        return as_fraction(text, name)
    except (ValueError, TypeError) as exc:
        raise InvalidInput(str(exc)) from exc


@click.group()
@click.version_option(VERSION, prog_name="modfrac")
def main():
    """Modulation-space norms and fractional integral experiments."""


# ----------------------------------------------------------------------------

@main.command()
@click.option("--n", "n", type=int, default=None, help="Dimension (defaults to --dim).")
@click.option("--alpha", required=True)
@click.option("--beta", required=True)
@click.option("--p1", required=True)
@click.option("--q1", required=True)
@click.option("--p2", default=None)
@click.option("--q2", default=None)
@click.option("--grid", "scan", is_flag=True, help="Tabulate over the (1/p2, 1/q2) square.")
@click.option("--steps", type=int, default=32, show_default=True)
@common_options
def region(n, alpha, beta, p1, q1, p2, q2, scan, steps, out, fmt, seed, grid_m, grid_l, dim):
    """Boundedness verdict from exact exponents (rationals as a/b)."""
    n = dim if n is None else n
    a, b = _rational(alpha, "alpha"), _rational(beta, "beta")
    ip1 = reciprocal(_rational(p1, "p1"), "p1")
    iq1 = reciprocal(_rational(q1, "q1"), "q1")
    params = dict(n=n, alpha=a, beta=b, p1=_rational(p1, "p1"), q1=_rational(q1, "q1"))
    if scan:
        rows = region_grid_scan(n, a, b, ip1, iq1, steps)
        params["steps"] = steps
        summary = dict(rows=len(rows), bounded=sum(r["bounded"] for r in rows))
        rep = Report("region", params, rows, summary)
        _note(f"{summary['bounded']} of {len(rows)} grid points bounded")
    else:
        if p2 is None or q2 is None:
            raise InvalidInput("--p2 and --q2 are required without --grid")
        params.update(p2=_rational(p2, "p2"), q2=_rational(q2, "q2"))
        q = RegionQuery(n, a, b, ip1, iq1, reciprocal(params["p2"], "p2"),
                        reciprocal(params["q2"], "q2"))
        v = theorem12_verdict(q)
        row = dict(bounded=v.bounded, p_critical=v.p_critical, q_critical=v.q_critical,
                   amalgam_sufficient=amalgam_sufficient(q),
                   p_line=q.p_line, q_line=q.q_line)
        rep = Report("region", params, [row], dict(bounded=v.bounded))
        flags = [s for s, on in (("p-critical", v.p_critical), ("q-critical", v.q_critical)) if on]
        _note(f"bounded={str(v.bounded).lower()}" + (" " + " ".join(flags) if flags else ""))
    _emit(rep, out, fmt)


@main.command("dilation-scan")
@click.option("--alpha", default="1/4", show_default=True)
@click.option("--beta", default="1/4", show_default=True)
@click.option("--p1", default="2", show_default=True)
@click.option("--q1", default="4", show_default=True)
@click.option("--p2", default="4", show_default=True)
@click.option("--q2", default="2", show_default=True)
@click.option("--lambda", "lambdas", multiple=True, help="Dilation factor; repeat for several.")
@common_options
def dilation_scan_cmd(alpha, beta, p1, q1, p2, q2, lambdas, out, fmt, seed, grid_m, grid_l, dim):
    """Norms of dilated band-limited data and of their fractional integrals."""
    vals = {k: _number(v, k) for k, v in
            dict(alpha=alpha, beta=beta, p1=p1, q1=q1, p2=p2, q2=q2).items()}
    lam = [_number(v, "lambda") for v in lambdas]
    if any(not 0 < v < 0.25 for v in lam):
        raise InvalidInput("every --lambda must lie in (0, 1/4)")
    lam = sorted(lam, reverse=True)
    grid = _grid(dim, grid_m, grid_l, DILATION_GRID if dim == 1 else GridSpec(2, 512, 256.0))
    kw = dict(n=dim, grid=grid, **vals)
    if lam:
        kw["lambdas"] = tuple(lam)
    elif dim == 2:
        kw["lambdas"] = tuple(2.0 ** -j for j in range(3, 7))
    cfg = DilationScanConfig(**kw)
    rep = dilation_scan(cfg)
    summary = dict(slope_in=rep.slope_in, predicted_in=rep.predicted_in, r2_in=rep.r2_in,
                   slope_out=rep.slope_out, predicted_out=rep.predicted_out, r2_out=rep.r2_out,
                   dropped=len(rep.dropped))
    if len(rep.fitted_rows) >= 2:
        summary["ratio_spread"] = rep.ratio_spread()
    params = dict(vals, lambdas=list(cfg.lambdas), grid_m=grid.m, grid_l=grid.l, dim=dim)
    _emit(Report("dilation-scan", params, rep.rows, summary), out, fmt)
    _note(f"slope_in {rep.slope_in:.4f} (predicted {rep.predicted_in:.4f}), "
          f"slope_out {rep.slope_out:.4f} (predicted {rep.predicted_out:.4f})")
    # the smallest dilation may be dropped once
    tolerated = rep.dropped in ([], [min(cfg.lambdas)])
    if not tolerated or len(rep.fitted_rows) < 4:
        raise CheckFailed(f"band selection or resolution failed for lambda in {rep.dropped}")


@main.command("critical-scan")
@click.option("--alpha", default="1/4", show_default=True)
@click.option("--beta", default="1/4", show_default=True)
@click.option("--p1", default="2", show_default=True)
@click.option("--q1", default="4", show_default=True)
@click.option("--p2", default="4", show_default=True)
@click.option("--q2", default="2", show_default=True)
@click.option("--eps", default="1/2", show_default=True)
@click.option("--N", "N", type=int, default=None, help="Start radius (2 when alpha = beta).")
@click.option("--K", "Ks", type=int, multiple=True, help="Truncation radius; repeat.")
@click.option("--control", is_flag=True, help="Subcritical run: require 1/q2 < 1/q1 + beta/n.")
@common_options
def critical_scan_cmd(alpha, beta, p1, q1, p2, q2, eps, N, Ks, control, out, fmt, seed,
                      grid_m, grid_l, dim):
    """Partial norms of the lacunary counterexample at the critical second index."""
    ex = {k: _rational(v, k) for k, v in
          dict(alpha=alpha, beta=beta, p1=p1, q1=q1, p2=p2, q2=q2).items()}
    grid = _grid(dim, grid_m, grid_l, CRITICAL_GRID if dim == 1 else GridSpec(2, 64, 32.0))
    kw = dict(n=dim, grid=grid, eps=_number(eps, "eps"), control=control, **ex)
    if N is not None:
        kw["N"] = N
    elif ex["alpha"] != ex["beta"]:
        kw["N"] = None
    if Ks:
        kw["Ks"] = tuple(Ks)
    elif dim == 2:
        kw["Ks"] = (10, 30, 100, 200)
    cfg = CriticalScanConfig(**kw)
    rep = critical_scan(cfg)
    summary = dict(N=rep.N, delta=rep.delta, log_exponent=rep.log_exponent, power=rep.power,
                   total_bound=rep.total_bound(dim))
    if len(rep.rows) >= 2:
        summary["growth_ratio"] = rep.growth_ratio(rep.rows[0]["K"], rep.rows[-1]["K"])
        summary["oracle_ratio"] = rep.oracle_ratio(rep.rows[0]["K"], rep.rows[-1]["K"])
    params = dict(ex, eps=cfg.eps, N=rep.N, Ks=list(cfg.Ks), control=control,
                  grid_m=grid.m, grid_l=grid.l, dim=dim)
    _emit(Report("critical-scan", params, rep.rows, summary), out, fmt)
    sums = [r["out_power"] for r in rep.rows]
    _note(f"output partial sums {sums[0]:.6g} -> {sums[-1]:.6g}, total bound {summary['total_bound']:.6g}")
    if not rep.out_monotone() or any(b < a for a, b in zip(sums, sums[1:])):
        raise CheckFailed("output partial sums are not nondecreasing")


@main.command()
@click.option("--alpha", default="1/2", show_default=True)
@click.option("--p", "p", default="2", show_default=True)
@click.option("--kmax", type=int, default=64, show_default=True)
@click.option("--trials", type=int, default=8, show_default=True)
@click.option("--steps", type=int, default=40, show_default=True)
@common_options
def lemma31(alpha, p, kmax, trials, steps, out, fmt, seed, grid_m, grid_l, dim):
    """Operator norms of the band multipliers over 1 <= |k| <= kmax."""
    a, pv = _number(alpha, "alpha"), _number(p, "p")
    if not 1 < pv < math.inf:
        raise InvalidInput("p must lie in (1, inf)")
    grid = _grid(dim, grid_m, grid_l, SWEEP_GRID if dim == 1 else GridSpec(2, 64, 8.0))
    table = lemma31_sweep(a, pv, kmax, grid, trials, seed, steps=steps)
    rows = []
    for e in table.estimates:
        row = {f"k{i + 1}": int(v) for i, v in enumerate(e.k)}
        row.update(radius=float(np.linalg.norm(e.k)), value=e.value, method=e.method)
        rows.append(row)
    summary = dict(max=table.max_value, decreasing_beyond_16=table.decreasing_beyond(16))
    params = dict(alpha=a, p=pv, kmax=kmax, trials=trials, steps=steps, seed=seed,
                  grid_m=grid.m, grid_l=grid.l, dim=dim)
    _emit(Report("lemma31", params, rows, summary), out, fmt)
    _note(f"max estimate {table.max_value:.6f}")
    if not all(math.isfinite(r["value"]) for r in rows):
        raise CheckFailed("non-finite operator norm estimate")
    if pv == 2 and a >= 0 and table.max_value > 4.0 ** a * (1 + 1e-12):
        raise CheckFailed(f"L2 norm {table.max_value} exceeds the symbol bound {4.0 ** a}")


def _profile_field(name: str, grid: GridSpec):
    if name == "gauss":
        return sample(lambda x: np.exp(-0.5 * np.sum(x * x, axis=-1)), grid)
    if name == "psi":
        return psi_field(PsiProfile(1.0), grid)
    if name == "bump":
        return sample(lambda x: DEFAULT_BUMP(x, grid.n), grid)
    raise InvalidInput(f"unknown profile {name!r}")


def _read_field(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return field_from_csv(fh.read())
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc}") from exc


@main.command()
@click.option("--profile", type=click.Choice(["gauss", "psi", "bump"]), default=None)
@click.option("--in", "src", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Field file with columns index, re, im.")
@click.option("--p", "p", default="2", show_default=True)
@click.option("--q", "q", default="2", show_default=True)
@common_options
def norm(profile, src, p, q, out, fmt, seed, grid_m, grid_l, dim):
    """Both modulation-space norms and the amalgam norm of one field."""
    if (profile is None) == (src is None):
        raise InvalidInput("give exactly one of --profile and --in")
    pv, qv = _number(p, "p"), _number(q, "q")
    if src is not None:
        f = _read_field(src)
        if f.domain != "spatial":
            raise InvalidInput("norm expects a spatial field")
    else:
        f = _profile_field(profile, _grid(dim, grid_m, grid_l, acceptance.FAMILY_GRID))
    sg = StftGrid(f.spec)
    stft_val = mpq_norm_stft(f, (pv, qv), sg)
    dec_val, detail = mpq_norm_decomp(f, (pv, qv))
    row = dict(p=pv, q=qv, stft=stft_val, decomp=dec_val,
               ratio=dec_val / stft_val if stft_val else math.nan,
               amalgam=amalgam_norm(f, (pv, qv)), lp=lp_norm(f, pv),
               stft_tail=sg.tail_bound(f), decomp_kmax=detail.kmax, decomp_tail=detail.tail)
    s = f.spec
    params = dict(source=src or profile, p=pv, q=qv, grid_m=s.m, grid_l=s.l, dim=s.n)
    _emit(Report("norm", params, [row], {}), out, fmt)
    _note(f"stft {stft_val:.10g}, decomposition {dec_val:.10g}, ratio {row['ratio']:.6g}")


@main.command()
@click.option("--alpha", required=True)
@click.option("--beta", default=None, help="Defaults to --alpha.")
@click.option("--in", "src", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--policy", type=click.Choice(["cell-average", "zero"]), default="cell-average",
              show_default=True)
@common_options
def apply(alpha, beta, src, policy, out, fmt, seed, grid_m, grid_l, dim):
    """Write samples of I_alpha f + I_beta f."""
    a = _number(alpha, "alpha")
    b = a if beta is None else _number(beta, "beta")
    f = _read_field(src)
    if f.domain != "spatial":
        raise InvalidInput("apply expects a spatial field")
    g = apply_iab(f, MultiplierSpec(a, b, policy))
    text = field_to_csv(g) if fmt == "csv" else field_to_json(g)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


@main.command()
@click.option("--only", type=int, multiple=True, help="Run only these criteria; repeat.")
@common_options
def selftest(only, out, fmt, seed, grid_m, grid_l, dim):
    """Run the acceptance suite; exit 1 on any failure."""
    bad = [k for k in only if k not in acceptance.CHECKS]
    if bad:
        raise InvalidInput(f"unknown criteria {bad}")
    rows = []
    for res in acceptance.run_checks(list(only) or None):
        _note(res.line())
        rows.append(dict(number=res.number, name=res.name, passed=res.passed, detail=res.detail))
    failed = [r["number"] for r in rows if not r["passed"]]
    summary = dict(passed=len(rows) - len(failed), failed=len(failed))
    _emit(Report("selftest", dict(only=list(only)), rows, summary), out, fmt)
    if failed:
        raise CheckFailed(f"criteria failed: {failed}")


if __name__ == "__main__":
    sys.exit(main())
