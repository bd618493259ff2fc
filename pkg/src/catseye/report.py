"""Delimited table output and optional matplotlib figures for the CLI."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile

import numpy as np

VERSION = "0.1.0"


def fmt(v) -> str:
    """17 significant digits, so values round-trip exactly."""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    if isinstance(v, str):
        return v
    if v is None:
        return ""
    return "%.17g" % float(v)


class Table:
    def __init__(self, columns, rows=None, meta=None, extra=None):
        self.columns = list(columns)
        self.rows = [list(r) for r in (rows or [])]
        self.meta = dict(meta or {})
        self.extra = dict(extra or {})

    def render(self, kind: str) -> str:
        if kind == "csv":
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\r\n")
            w.writerow(self.columns)
            for r in self.rows:
                w.writerow([fmt(v) for v in r])
            return buf.getvalue()
        doc = {"meta": {"version": VERSION, **self.meta},
               "columns": self.columns,
               "rows": [[fmt(v) for v in r] for r in self.rows]}
        for k, v in self.extra.items():
            doc[k] = _jsonable(v)
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (float, np.floating)):
        return fmt(v)
    if isinstance(v, np.integer):
        return int(v)
    return v


def write_atomic(path, text: str):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def _save(fig, figdir, name):
    os.makedirs(figdir, exist_ok=True)
    path = os.path.join(figdir, name)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    return path


def figure_steady(figdir, x, y, psi, eps):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.contour(x, y, psi.T, levels=30, linewidths=0.7)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title(f"stream function, eps={eps:g}")
    path = _save(fig, figdir, "steady_psi.png")
    plt.close(fig)
    return [path]


def figure_spectrum(figdir, eps_grid, table):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 4))
    arr = np.asarray(table)
    for i in range(arr.shape[0]):
        ax.plot(eps_grid, arr[i], "o-", ms=3, lw=1)
    ax.set_xlabel("eps")
    ax.set_ylabel("eigenvalue")
    ax.set_title("lowest Galerkin eigenvalues")
    path = _save(fig, figdir, "spectrum_galerkin.png")
    plt.close(fig)
    return [path]


def figure_growth(figdir, alpha, sweep):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 4))
    width = max((len(r) for _, r in sweep), default=0)
    eps = np.array([e for e, _ in sweep])
    for j in range(width):
        vals = np.array([r[j] if len(r) > j else np.nan for _, r in sweep])
        ax.plot(eps, vals, ".-", lw=1, label=f"branch {j + 1}")
    ax.set_xlabel("eps")
    ax.set_ylabel("Re sigma")
    ax.set_title(f"growth rates, alpha={alpha:g}")
    if width:
        ax.legend()
    path = _save(fig, figdir, "growth_rates.png")
    plt.close(fig)
    return [path]


def figure_surface(figdir, alphas, epss, values):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 4))
    im = ax.pcolormesh(epss, alphas, np.asarray(values), shading="nearest")
    fig.colorbar(im, ax=ax)
    ax.set_xlabel("eps")
    ax.set_ylabel("alpha")
    ax.set_title("modulational quadratic form")
    path = _save(fig, figdir, "forms_modulational.png")
    plt.close(fig)
    return [path]
