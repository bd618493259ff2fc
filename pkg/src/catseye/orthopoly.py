"""Orthogonal polynomial families and Gauss rules.

Legendre and Gegenbauer values come from scipy.special; the normalised
Hermite functions use a rescaled three-term recurrence so that high degrees
and large |y| neither overflow nor lose the Gaussian factor.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import special

from .errors import OutOfRange


class RuleKind(str, Enum):
    GAUSS_LEGENDRE = "GaussLegendre"
    GAUSS_HERMITE = "GaussHermite"
    UNIFORM_TRAPEZOID = "UniformTrapezoid"


@dataclass(frozen=True)
class QuadRule:
    nodes: np.ndarray
    weights: np.ndarray
    kind: RuleKind

    def integrate(self, values) -> float:
        return np.tensordot(np.asarray(values), self.weights, axes=([-1], [0]))


def _check_unit(x):
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0 + 1e-14):
        raise OutOfRange("argument must lie in [-1, 1]")
    return x


def eval_legendre(n: int, x):
    return special.eval_legendre(n, _check_unit(x))


def double_factorial_odd(k: int) -> float:
    """(2k-1)!! with (-1)!! = 1."""
    return float(np.prod(np.arange(1, 2 * k, 2))) if k > 0 else 1.0


def eval_assoc_legendre(n: int, k: int, x):
    """L_{n,k}(x) = (1-x^2)^{k/2} d^k/dx^k L_n(x), no Condon-Shortley phase.

    Uses d^k L_n = (2k-1)!! C_{n-k}^{k+1/2}.
    """
    if not (0 <= k <= n):
        raise OutOfRange("need 0 <= k <= n")
    x = _check_unit(x)
    w = np.clip(1.0 - x * x, 0.0, None) ** (0.5 * k)
    return w * double_factorial_odd(k) * special.eval_gegenbauer(n - k, k + 0.5, x)


def eval_gegenbauer(n: int, beta: float, x):
    if beta <= -0.5:
        raise OutOfRange("Gegenbauer parameter must exceed -1/2")
    return special.eval_gegenbauer(n, beta, _check_unit(x))


def gegenbauer_derivs(n: int, beta: float, x):
    """C, C', C'' via d/dx C_n^b = 2b C_{n-1}^{b+1}."""
    x = np.asarray(x, dtype=float)
    c0 = special.eval_gegenbauer(n, beta, x)
    c1 = 2.0 * beta * special.eval_gegenbauer(n - 1, beta + 1.0, x) if n >= 1 else np.zeros_like(x)
    c2 = (4.0 * beta * (beta + 1.0) * special.eval_gegenbauer(n - 2, beta + 2.0, x)
          if n >= 2 else np.zeros_like(x))
    return c0, c1, c2


def hermite_functions(nmax: int, y):
    """Rows H_0..H_nmax of the L2-orthonormal Hermite functions at y.

    H_{n+1} = y sqrt(2/(n+1)) H_n - sqrt(n/(n+1)) H_{n-1}, run without the
    Gaussian and rescaled whenever values grow past 1e100; the factor
    exp(-y^2/2 + log-scale) is applied at the end.
    """
    y = np.asarray(y, dtype=float)
    shape = y.shape
    y = y.ravel()
    out = np.empty((nmax + 1, y.size))
    logs = np.zeros(y.size)
    h_prev = np.zeros(y.size)
    h = np.full(y.size, np.pi ** -0.25)
    out[0] = h
    for n in range(nmax):
        h_next = y * np.sqrt(2.0 / (n + 1)) * h - np.sqrt(n / (n + 1.0)) * h_prev
        h_prev, h = h, h_next
        big = np.abs(h) > 1e100
        if np.any(big):
            h[big] *= 1e-100
            h_prev[big] *= 1e-100
            out[: n + 1, big] *= 1e-100
            logs[big] += 100.0 * np.log(10.0)
        out[n + 1] = h
    # out[n] currently holds H_n * exp(y^2/2) * 10^(-100 j) with a per-column
    # shift; rows written before a rescale were rescaled too, so one factor fits
    out *= np.exp(-0.5 * y * y + logs)
    return out.reshape((nmax + 1,) + shape)


def eval_hermite_function(n: int, y):
    if n < 0:
        raise OutOfRange("degree must be nonnegative")
    return hermite_functions(n, y)[n]


def hermite_function_derivs(nmax: int, y):
    """H_n' = sqrt(n/2) H_{n-1} - sqrt((n+1)/2) H_{n+1} for n <= nmax."""
    h = hermite_functions(nmax + 1, y)
    d = np.empty_like(h[: nmax + 1])
    for n in range(nmax + 1):
        d[n] = -np.sqrt((n + 1) / 2.0) * h[n + 1]
        if n > 0:
            d[n] += np.sqrt(n / 2.0) * h[n - 1]
    return h[: nmax + 1], d


def hermite_antiderivs(nmax: int, y):
    """F_n(y) = int_0^y H_n for n <= nmax, by the exact recurrence

    F_{n+1} = sqrt(n/(n+1)) F_{n-1} - sqrt(2/(n+1)) (H_n(y) - H_n(0)).
    """
    y = np.asarray(y, dtype=float)
    h = hermite_functions(nmax, y)
    h0 = hermite_functions(nmax, 0.0)
    c = np.pi ** -0.25
    f = np.empty_like(h)
    f[0] = c * np.sqrt(np.pi / 2.0) * special.erf(y / np.sqrt(2.0))
    if nmax >= 1:
        f[1] = np.sqrt(2.0) * c * -np.expm1(-0.5 * y * y)
    for n in range(1, nmax):
        f[n + 1] = np.sqrt(n / (n + 1.0)) * f[n - 1] - np.sqrt(2.0 / (n + 1)) * (h[n] - h0[n])
    return f


def make_rule(kind, npts: int, period: float = 2.0 * np.pi) -> QuadRule:
    """Gauss-Legendre on [-1,1], Gauss-Hermite (weight exp(-y^2)) or the
    uniform trapezoid on [0, period)."""
    if npts < 1:
        raise OutOfRange("npts must be >= 1")
    kind = RuleKind(kind)
    if kind is RuleKind.GAUSS_LEGENDRE:
        x, w = special.roots_legendre(npts)
    elif kind is RuleKind.GAUSS_HERMITE:
        x, w = special.roots_hermite(npts)
    else:
        x = np.arange(npts) * (period / npts)
        w = np.full(npts, period / npts)
    return QuadRule(np.asarray(x), np.asarray(w), kind)


def gauss_jacobi_sym(npts: int, mu: float):
    """Nodes/weights for int_{-1}^{1} (1-x^2)^mu f(x) dx, mu > -1."""
    return special.roots_jacobi(npts, mu, mu)
