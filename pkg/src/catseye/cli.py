"""catseye command-line interface.

Exit codes: 0 ok, 2 usage error, 3 numerical failure.
"""

from __future__ import annotations

import sys

import click
import numpy as np

from . import exact_spectra as ex
from . import galerkin as gk
from . import quad_forms as qf
from . import report
from .errors import CatseyeError
from .steady_fields import FlowParams, coords, stream_psi, velocity_u, vorticity_omega

GRID_TOL = 1e-12


def parse_grid(text: str) -> list:
    """'a', 'a,b,c' or 'start:stop:step' (inclusive of stop within 1e-12)."""
    try:
        if ":" in text:
            a, b, h = (float(t) for t in text.split(":"))
            if h <= 0:
                raise ValueError("step must be positive")
            n = int(np.floor((b - a) / h + GRID_TOL)) + 1 if b >= a - GRID_TOL else 0
            vals = [round(a + i * h, 12) for i in range(max(n, 0))]
        else:
            vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise click.BadParameter(f"cannot parse grid {text!r}: {exc}") from exc
    if not vals:
        raise click.BadParameter(f"grid {text!r} is empty")
    if any(b <= a for a, b in zip(vals, vals[1:])):
        raise click.BadParameter("grid must be ascending")
    return vals


class GridType(click.ParamType):
    name = "grid"

    def convert(self, value, param, ctx):
        if isinstance(value, list):
            return value
        try:
            return parse_grid(value)
        except click.BadParameter as exc:
            self.fail(exc.message, param, ctx)


GRID = GridType()


class CatseyeGroup(click.Group):
    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except CatseyeError as exc:
            click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
            ctx.exit(3)


def _output_options(f):
    f = click.option("--figures", "figdir", type=click.Path(file_okay=False), default=None,
                     help="Also render matplotlib figures into this directory.")(f)
    f = click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv")(f)
    f = click.option("--out", type=click.Path(dir_okay=False), default=None,
                     help="Output file (default: stdout).")(f)
    return f


def _emit(table: report.Table, out, fmt, sidecar=None):
    text = table.render(fmt)
    if out:
        report.write_atomic(out, text)
        if sidecar is not None and fmt == "csv":
            doc = report.Table([], meta=table.meta, extra=sidecar).render("json")
            report.write_atomic(out + ".landmarks.json", doc)
    else:
        click.echo(text, nl=False)


def _meta(ctx, **tol):
    return {"command": ctx.info_name,
            "config": {k: v for k, v in sorted(ctx.params.items()) if k not in ("out", "figdir")},
            "tolerances": tol}


@click.group(cls=CatseyeGroup)
@click.version_option(report.VERSION, prog_name="catseye")
def main():
    """Spectral and quadratic-form stability toolkit for Kelvin-Stuart cat's eyes."""


@main.command()
@click.option("--eps", type=float, required=True)
@click.option("--nx", type=click.IntRange(1), default=64)
@click.option("--ny", type=click.IntRange(1), default=64)
@click.option("--y-max", type=click.FloatRange(0, min_open=True), default=3.0)
@_output_options
@click.pass_context
def steady(ctx, eps, nx, ny, y_max, out, fmt, figdir):
    """Sample the steady fields and (eta, gamma, xi, theta) on a grid."""
    p = FlowParams(eps)
    x = np.arange(nx) * (2.0 * np.pi / nx)
    y = np.linspace(-y_max, y_max, ny) if ny > 1 else np.zeros(1)
    X, Y = np.meshgrid(x, y, indexing="ij")
    psi = np.asarray(stream_psi(p, (X, Y)))
    om = np.asarray(vorticity_omega(p, (X, Y)))
    u1, u2 = (np.broadcast_to(np.asarray(u), X.shape) for u in velocity_u(p, (X, Y)))
    c = coords(p, (X, Y))
    eta, gam, xi, th = (np.asarray(v) for v in (c.eta, c.gamma, c.xi, c.theta))
    cols = ["x", "y", "psi", "omega", "u1", "u2", "eta", "gamma", "xi", "theta", "norm2"]
    data = np.column_stack([a.ravel() for a in
                            (X, Y, psi, om, u1, u2, eta, gam, xi, th, eta ** 2 + gam ** 2 + xi ** 2)])
    _emit(report.Table(cols, data.tolist(), _meta(ctx)), out, fmt)
    if figdir:
        report.figure_steady(figdir, x, y, psi, eps)


def _problem(kind, m, alpha):
    if kind == "coperiodic":
        return ex.CoPeriodic()
    if kind == "multi":
        return ex.MultiPeriodic(m)
    return ex.Modulational(alpha)


@main.command()
@click.option("--exact", "mode", flag_value="exact", default=True)
@click.option("--galerkin", "mode", flag_value="galerkin")
@click.option("--problem", type=click.Choice(["coperiodic", "multi", "modulational"]),
              default="coperiodic")
@click.option("--m", type=click.IntRange(2), default=2)
@click.option("--alpha", type=click.FloatRange(0, 0.5, min_open=True), default=0.5)
@click.option("--lmax", type=float, default=10.0)
@click.option("--N", "N", type=click.IntRange(1), default=7)
@click.option("--eps", type=GRID, default="0.0:0.5:0.1")
@click.option("--rows", type=click.IntRange(1), default=10)
@_output_options
@click.pass_context
def spectrum(ctx, mode, problem, m, alpha, lmax, N, eps, rows, out, fmt, figdir):
    """Closed-form eigenvalues (--exact) or the Galerkin table (--galerkin)."""
    if mode == "exact":
        pairs = ex.list_eigenvalues(_problem(problem, m, alpha), lmax)
        table = report.Table(["lambda", "multiplicity"],
                             [[pr.lam, pr.multiplicity] for pr in pairs],
                             _meta(ctx, merge=ex.MERGE_TOL))
        _emit(table, out, fmt)
        return
    for e in eps:
        FlowParams(e)
    cols = [gk.coperiodic_spectrum(e, N).eigenvalues[:rows] for e in eps]
    arr = np.array(cols).T
    table = report.Table(["index"] + [f"eps={e:g}" for e in eps],
                         [[i + 1] + list(arr[i]) for i in range(arr.shape[0])],
                         _meta(ctx, symmetry=gk.SYM_TOL))
    _emit(table, out, fmt)
    if figdir:
        report.figure_spectrum(figdir, eps, arr)


def growth_landmarks(alpha, sweep, N, tol=gk.POSITIVE_TOL):
    """Crossing eps of the second branch (bisection inside the tabulated
    bracket) and the largest growth rate on the grid."""
    best = max(((r[0], e) for e, r in sweep if len(r)), default=(None, None))
    crossing = None
    for (e0, r0), (e1, r1) in zip(sweep, sweep[1:]):
        if len(r0) >= 2 and len(r1) < 2:
            crossing = gk.branch_crossing(alpha, e0, e1, N, tol, xtol=1e-4)
            break
    return {"crossing_eps": crossing, "max_sigma": best[0], "max_eps": best[1],
            "unstable_count_first": len(sweep[0][1]) if sweep else 0}


@main.command()
@click.option("--alpha", type=click.FloatRange(0, 0.5, min_open=True), required=True)
@click.option("--eps", type=GRID, default="0:0.4:0.01")
@click.option("--N", "N", type=click.IntRange(1), default=7)
@_output_options
@click.pass_context
def growth(ctx, alpha, eps, N, out, fmt, figdir):
    """Positive real parts of the modulational growth rates over an eps grid."""
    for e in eps:
        FlowParams(e)
    sweep = gk.growth_rate_sweep(alpha, eps, N)
    width = max((len(r) for _, r in sweep), default=0)
    rows = [[e] + list(r) + [None] * (width - len(r)) for e, r in sweep]
    marks = growth_landmarks(alpha, sweep, N)
    table = report.Table(["eps"] + [f"sigma{j + 1}" for j in range(width)], rows,
                         _meta(ctx, positive=gk.POSITIVE_TOL), {"landmarks": marks})
    _emit(table, out, fmt, sidecar={"landmarks": marks})
    if fmt == "csv" and not out:
        click.echo("landmarks: " + ", ".join(f"{k}={report.fmt(v)}" for k, v in marks.items()),
                   err=True)
    if figdir:
        report.figure_growth(figdir, alpha, sweep)


def _verdict(total, label):
    return f"UNSTABLE({label})" if total < 0 else "INCONCLUSIVE"


def _period_label(m):
    return "2π" if m == 1 else f"{2 * m}π"


@main.command()
@click.option("--test", "test", type=click.Choice(["even", "odd1", "odd2"]), default=None)
@click.option("--k", type=click.IntRange(1), default=1)
@click.option("--mod", "mod", is_flag=True, help="Modulational test function.")
@click.option("--mod-half", "mod_half", is_flag=True, help="Modulational alpha=1/2 variant.")
@click.option("--coalescence", is_flag=True, help="Double-period magnetic-island test.")
@click.option("--b34", is_flag=True, help="Tabulate b3 and b4.")
@click.option("--alpha", type=GRID, default="0.5")
@click.option("--eps", type=GRID, required=True)
@click.option("--n-rho", type=click.IntRange(2), default=qf.DEFAULT_N_RHO)
@click.option("--n-x", type=click.IntRange(4), default=qf.DEFAULT_N_X)
@_output_options
@click.pass_context
def forms(ctx, test, k, mod, mod_half, coalescence, b34, alpha, eps, n_rho, n_x, out, fmt, figdir):
    """Quadratic forms <A psi, psi> = b1 + b2 for the instability test functions."""
    chosen = [bool(test), mod, mod_half, coalescence, b34]
    if sum(chosen) != 1:
        raise click.UsageError("choose exactly one of --test, --mod, --mod-half, --coalescence, --b34")
    res = dict(n_rho=n_rho, n_x=n_x)
    meta = _meta(ctx)
    if b34:
        rows = [[e, qf.form_b3(FlowParams(e), **res), qf.form_b4(FlowParams(e), **res)] for e in eps]
        _emit(report.Table(["eps", "b3", "b4"], rows, meta), out, fmt)
        return
    if mod:
        for a in alpha:
            if not 0.0 < a <= 0.5:
                raise click.BadParameter("alpha must lie in (0, 1/2]", param_hint="--alpha")
        rows, surf = [], np.empty((len(alpha), len(eps)))
        for i, a in enumerate(alpha):
            t = qf.mod_test(a)
            b1 = qf.form_b1_modulational(t.params(0.0), a)
            for j, e in enumerate(eps):
                b2 = qf.form_b2(t.params(e), t, **res)
                surf[i, j] = b1 + b2
                rows.append([a, e, b1, b2, b1 + b2, _verdict(b1 + b2, f"alpha={a:g}")])
        _emit(report.Table(["alpha", "eps", "b1", "b2", "total", "verdict"], rows, meta), out, fmt)
        if figdir:
            report.figure_surface(figdir, alpha, eps, surf)
        return
    if coalescence:
        rows = []
        for e in eps:
            total = qf.coalescence_check(FlowParams(e))
            rows.append([e, total, "COALESCENCE-UNSTABLE" if total < 0 else "INCONCLUSIVE"])
        _emit(report.Table(["eps", "total", "verdict"], rows, meta), out, fmt)
        return
    if mod_half:
        t = qf.mod_test_half()
    else:
        t = {"even": qf.test_even, "odd1": qf.test_odd1, "odd2": qf.test_odd2}[test](k)
    rows = []
    for e in eps:
        p = t.params(e)
        b1 = qf.form_b1(p, t)
        b2 = qf.form_b2(p, t, **res)
        label = "alpha=1/2" if mod_half else _period_label(t.m)
        rows.append([e, b1, b2, b1 + b2, _verdict(b1 + b2, label)])
    _emit(report.Table(["eps", "b1", "b2", "total", "verdict"], rows, meta), out, fmt)


if __name__ == "__main__":
    sys.exit(main())
