"""Poisson solves on the cylinder T_2pi x R and the stability functionals.

G(x, y) = -(1/4pi) ln(cosh y - cos x).  In Fourier modes w = sum w_k(y) e^{ikx}
the convolution G*w is

    k != 0:  int exp(-|k||y-t|) / (2|k|) w_k(t) dt,
    k == 0:  int (-|y-t|/2 + ln2/2) w_0(t) dt,

which are evaluated by two-sided cumulative recursions on a uniform y-grid.
Each cell integral is exact for the degree-7 Lagrange interpolant of w through
the eight nearest nodes, so the solve is eighth-order in the y-spacing.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass

import numpy as np
from scipy import integrate, signal, special

from .errors import (DomainError, InconsistentProblem, MomentUnbounded, NonZeroMean,
                     OutOfRange, SignViolation, SingularPoint)
from .steady_fields import FlowParams, gprime, stream_psi, vorticity_omega

STENCIL = 8
MEAN_TOL = 1e-8
TOTAL_TOL = 1e-6


# ---------------------------------------------------------------------------
# grids

@dataclass
class GridField:
    """Values on x_i = 2pi i/nx (i < nx) and y_j uniform on [-Y, Y], shape (nx, ny).

    ny must be odd so that y = 0 is a node.
    """
    values: np.ndarray
    y_max: float = 40.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        nx, ny = self.values.shape
        if nx < 4 or ny < 4:
            raise OutOfRange("grid sizes must be >= 4")
        if ny % 2 == 0:
            raise OutOfRange("ny must be odd so that y = 0 is a grid node")
        if not np.all(np.isfinite(self.values)):
            raise OutOfRange("grid values must be finite")

    @property
    def shape(self):
        return self.values.shape

    @property
    def x(self):
        return np.arange(self.shape[0]) * (2.0 * np.pi / self.shape[0])

    @property
    def y(self):
        return np.linspace(-self.y_max, self.y_max, self.shape[1])

    @property
    def hy(self):
        return 2.0 * self.y_max / (self.shape[1] - 1)

    def mesh(self):
        return np.meshgrid(self.x, self.y, indexing="ij")

    def weights(self):
        wy = np.full(self.shape[1], self.hy)
        wy[[0, -1]] *= 0.5
        return np.outer(np.full(self.shape[0], 2.0 * np.pi / self.shape[0]), wy)

    def integrate(self, f=None) -> float:
        """Trapezoid integral with compensated summation."""
        v = self.values if f is None else np.asarray(f)
        return math.fsum((v * self.weights()).ravel())

    @property
    def zero_mean(self) -> bool:
        return abs(self.integrate()) <= MEAN_TOL

    @property
    def moment_finite(self) -> bool:
        """|y f| is negligible near the truncation boundary."""
        edge = np.abs(self.values[:, [0, -1]]).max() * self.y_max
        return edge <= 1e-10 * max(1.0, abs(self.integrate(np.abs(self.values))))

    def like(self, values):
        return GridField(values, self.y_max)

    @classmethod
    def from_function(cls, f, nx=64, ny=1601, y_max=40.0):
        x = np.arange(nx) * (2.0 * np.pi / nx)
        y = np.linspace(-y_max, y_max, ny)
        X, Y = np.meshgrid(x, y, indexing="ij")
        return cls(np.broadcast_to(f(X, Y), X.shape).copy(), y_max)

    def to_csv(self, path):
        """CSV rows (x, y, value) plus a JSON sidecar with the gridspec."""
        X, Y = self.mesh()
        rows = np.column_stack([X.ravel(), Y.ravel(), self.values.ravel()])
        _atomic_write(path, lambda fh: np.savetxt(fh, rows, fmt="%.17g", delimiter=",",
                                                  header="x,y,value", comments=""))
        spec = {"nx": self.shape[0], "ny": self.shape[1], "y_max": self.y_max,
                "x_rule": "uniform [0, 2pi)", "y_rule": "uniform [-Y, Y]"}
        _atomic_write(str(path) + ".json", lambda fh: json.dump(spec, fh, indent=2))

    @classmethod
    def from_csv(cls, path):
        with open(str(path) + ".json") as fh:
            spec = json.load(fh)
        rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return cls(rows[:, 2].reshape(spec["nx"], spec["ny"]), spec["y_max"])


def _atomic_write(path, writer):
    d = os.path.dirname(os.path.abspath(str(path)))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w") as fh:
            writer(fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


@dataclass(frozen=True)
class FunctionalValue:
    value: float
    tail_estimate: float


def steady_grid(eps, nx=64, ny=1601, y_max=40.0, which="omega"):
    """Steady omega_eps, psi_eps or g'(psi_eps) sampled on a GridField."""
    p = FlowParams(eps)
    fn = {"omega": vorticity_omega, "psi": stream_psi, "gprime": gprime}[which]
    return GridField.from_function(lambda X, Y: fn(p, (X, Y)), nx, ny, y_max)


# ---------------------------------------------------------------------------
# Green function and Poisson solve

def green_G(x, y):
    """-(1/4pi) ln(cosh y - cos x), evaluated without overflow or cancellation."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    q = np.exp(-np.abs(y))
    # cosh y - cos x = (e^{|y|}/2) ((1-q)^2 + 4q sin^2(x/2))
    inner = (-np.expm1(-np.abs(y))) ** 2 + 4.0 * q * np.sin(0.5 * x) ** 2
    if np.any(inner <= 0.0):
        raise SingularPoint("G is singular at the lattice origin")
    val = -(np.abs(y) - np.log(2.0) + np.log(inner)) / (4.0 * np.pi)
    return val.item() if val.ndim == 0 else val


def _cell_weights(k, h):
    """Weights c[o, j] with int_0^h e^{-k(h-s)} w(s) ds ~ sum_j c[o, j] w(stencil_j)
    for a cell [0, h] whose 8-point stencil starts o cells to its left."""
    s, ws = special.roots_legendre(24)
    s = 0.5 * h * (s + 1.0)
    ws = 0.5 * h * ws
    kern = np.exp(-k * (h - s)) * ws
    out = np.empty((STENCIL - 1, STENCIL))
    for o in range(STENCIL - 1):
        nodes = h * (np.arange(STENCIL) - o)
        for j in range(STENCIL):
            others = np.delete(nodes, j)
            lj = np.prod((s[:, None] - others[None, :]) / (nodes[j] - others[None, :]), axis=1)
            out[o, j] = kern @ lj
    return out


def _cell_integrals(w, k, h):
    """Per-cell integrals I_i = int_{y_i}^{y_i+1} e^{-k(y_i+1 - t)} w(t) dt along the last axis."""
    n = w.shape[-1]
    cw = _cell_weights(k, h)
    i = np.arange(n - 1)
    start = np.clip(i - (STENCIL // 2 - 1), 0, n - STENCIL)
    idx = start[:, None] + np.arange(STENCIL)[None, :]
    return np.einsum("...ij,ij->...i", w[..., idx], cw[i - start])


def _cumulative_exp(w, k, h):
    """L_i = int_{-Y}^{y_i} e^{-k(y_i - t)} w dt, R_i = int_{y_i}^{Y} e^{-k(t - y_i)} w dt."""
    decay = np.exp(-k * h)
    zero = np.zeros(w.shape[:-1] + (1,))
    fwd = np.concatenate([zero, _cell_integrals(w, k, h)], axis=-1)
    bwd = np.concatenate([zero, _cell_integrals(w[..., ::-1], k, h)], axis=-1)
    L = signal.lfilter([1.0], [1.0, -decay], fwd, axis=-1)
    R = signal.lfilter([1.0], [1.0, -decay], bwd, axis=-1)[..., ::-1]
    return L, R


def _mode_solve(wk, k, y, h):
    """Apply the mode-k kernel of G* to wk (last axis is y)."""
    if k == 0:
        A, _ = _cumulative_exp(wk, 0.0, h)
        B, _ = _cumulative_exp(wk * y, 0.0, h)
        a_tot, b_tot = A[..., -1], B[..., -1]
        # int |y - t| w = y (2A - A_tot) + B_tot - 2B
        absint = y * (2.0 * A - a_tot[..., None]) + b_tot[..., None] - 2.0 * B
        return -0.5 * absint + 0.5 * np.log(2.0) * a_tot[..., None]
    L, R = _cumulative_exp(wk, float(k), h)
    return (L + R) / (2.0 * k)


def poisson_solve(w: GridField, normalize: bool = True) -> GridField:
    """psi = G*w.  normalize=True requires zero mean and fixes psi_0(0) = 0;
    normalize=False returns the convolution itself."""
    total = w.integrate()
    if normalize and abs(total) > MEAN_TOL:
        raise NonZeroMean(f"iint w = {total:.3e}; zero mean required")
    nx = w.shape[0]
    y, h = w.y, w.hy
    what = np.fft.rfft(w.values, axis=0) / nx
    psi_hat = np.empty_like(what)
    for k in range(what.shape[0]):
        wk = np.stack([what[k].real, what[k].imag])
        sol = _mode_solve(wk, k, y, h)
        psi_hat[k] = sol[0] + 1j * sol[1]
    if normalize:
        psi_hat[0] -= psi_hat[0, w.shape[1] // 2]
    return w.like(np.fft.irfft(psi_hat * nx, n=nx, axis=0))


# ---------------------------------------------------------------------------
# derivatives

_FD6 = np.array([-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0]) / 60.0


def _dy(v, h):
    """Sixth-order central differences in y, one-sided near the ends."""
    out = np.empty_like(v)
    n = v.shape[1]
    out[:, 3:n - 3] = sum(c * v[:, i:n - 6 + i] for i, c in enumerate(_FD6))
    for j in list(range(3)) + list(range(n - 3, n)):
        start = min(max(j - 3, 0), n - 7)
        nodes = np.arange(start, start + 7) - j
        c = _fd_weights(nodes, 1)
        out[:, j] = v[:, start:start + 7] @ c
    return out / h


def _fd_weights(offsets, order):
    """Finite-difference weights at 0 from integer offsets (Vandermonde solve)."""
    n = len(offsets)
    V = np.vander(np.asarray(offsets, dtype=float), n, increasing=True).T
    rhs = np.zeros(n)
    rhs[order] = math.factorial(order)
    return np.linalg.solve(V, rhs)


def _dx(v):
    nx = v.shape[0]
    k = np.fft.rfftfreq(nx, 1.0 / nx)
    vh = np.fft.rfft(v, axis=0)
    if nx % 2 == 0:
        k[-1] = 0.0
    return np.fft.irfft(1j * k[:, None] * vh, n=nx, axis=0)


def grad_sq(f: GridField) -> np.ndarray:
    return _dx(f.values) ** 2 + _dy(f.values, f.hy) ** 2


def neg_laplacian(f: GridField) -> np.ndarray:
    """-Lap f: spectral in x, sixth-order differences in y."""
    nx = f.shape[0]
    k = np.fft.rfftfreq(nx, 1.0 / nx)
    dxx = np.fft.irfft(-(k ** 2)[:, None] * np.fft.rfft(f.values, axis=0), n=nx, axis=0)
    dyy = _dy(_dy(f.values, f.hy), f.hy)
    return -(dxx + dyy)


def _tail(f: GridField, integrand) -> float:
    """Contribution of the outer tenth of the y-range, a truncation proxy."""
    y = f.y
    mask = np.abs(y) >= 0.9 * f.y_max
    return abs(f.integrate(np.where(mask[None, :], integrand, 0.0)))


# ---------------------------------------------------------------------------
# functionals

def pseudoenergy(w: GridField) -> FunctionalValue:
    """(1/2) iint (G*w) w."""
    if not w.moment_finite:
        raise MomentUnbounded("|y w| does not decay at the truncation boundary")
    psi = poisson_solve(w, normalize=False)
    integrand = 0.5 * psi.values * w.values
    val = w.integrate(integrand)
    tail = _tail(w, integrand)
    if tail > 0.1 * abs(val) and tail > 1e-12:
        raise MomentUnbounded(f"tail {tail:.2e} exceeds 10% of value {val:.2e}")
    return FunctionalValue(val, tail)


def casimir_h(s):
    s = np.asarray(s, dtype=float)
    if np.any(s >= 0.0):
        raise DomainError("h is defined for s < 0")
    v = 0.5 * (s - s * np.log(-s))
    return v.item() if v.ndim == 0 else v


def legendre_fstar(omega_eps_val, s):
    """-(1/2) omega_eps (e^{-2s} + 2s - 1)."""
    s = np.asarray(s, dtype=float)
    v = -0.5 * np.asarray(omega_eps_val) * (np.expm1(-2.0 * s) + 2.0 * s)
    return v.item() if np.ndim(v) == 0 else v


def _rlogr(r):
    """r ln r - r + 1, accurate near r = 1."""
    d = r - 1.0
    series = d * d * (0.5 - d / 6.0 + d * d / 12.0 - d ** 3 / 20.0)
    return np.where(np.abs(d) < 1e-3, series, r * np.log(r) - r + 1.0)


def _check_total(w: GridField, name):
    total = w.integrate()
    if abs(total + 4.0 * np.pi) > TOTAL_TOL:
        raise InconsistentProblem(f"iint {name} = {total:.9f}, expected -4pi")


def distance_d(w_tilde: GridField, eps: float):
    """(d1, d2, d) between w_tilde and omega_eps on the same grid."""
    if np.any(w_tilde.values >= 0.0):
        raise SignViolation("perturbed vorticity must be negative")
    _check_total(w_tilde, "w_tilde")
    p = FlowParams(eps)
    X, Y = w_tilde.mesh()
    om = np.asarray(vorticity_omega(p, (X, Y)))
    d1 = w_tilde.integrate(0.5 * (-om) * _rlogr(w_tilde.values / om))
    diff = w_tilde.like(w_tilde.values - om)
    psi = poisson_solve(diff, normalize=False)
    d2 = w_tilde.integrate(psi.values * diff.values)
    return d1, d2, d1 + d2


def functional_I(eps: float) -> float:
    """iint (-omega_eps)^{3/2} dxdy = iint (-omega)^{1/2} dtheta dgamma.

    With gamma = cos t the integrand vanishes conically where
    sin t cos theta = eps, theta = 0, so t = arcsin(eps) is a breakpoint.
    """
    FlowParams(eps)
    r2 = 1.0 - eps * eps

    def f(th, t):
        st = np.sin(t)
        v = (st * np.sin(th)) ** 2 + (st * np.cos(th) - eps) ** 2 / r2
        return np.sqrt(v) * st

    def inner(t):
        return integrate.quad(f, 0.0, np.pi, args=(t,), epsabs=1e-13, epsrel=1e-12, limit=200)[0]

    a = np.arcsin(eps)
    pts = sorted({a, np.pi - a})
    edges = [0.0] + [p_ for p_ in pts if 0.0 < p_ < np.pi] + [np.pi]
    total = sum(integrate.quad(inner, lo, hi, epsabs=1e-12, epsrel=1e-12, limit=200)[0]
                for lo, hi in zip(edges, edges[1:]))
    # theta in [pi, 2pi) mirrors [0, pi)
    return 2.0 * total


def functional_I_xy(eps: float, nx=128, ny=4001, y_max=40.0) -> float:
    """Same functional by trapezoid quadrature in (x, y)."""
    om = steady_grid(eps, nx, ny, y_max)
    return om.integrate((-om.values) ** 1.5)


def dual_B(eps: float, psi: GridField) -> float:
    """iint (1/2)|grad psi|^2 - (1/4) g'(psi_eps)(e^{-2psi} + 2psi - 1)."""
    p = FlowParams(eps)
    X, Y = psi.mesh()
    g = np.asarray(gprime(p, (X, Y)))
    v = psi.values
    integrand = 0.5 * grad_sq(psi) - 0.25 * g * (np.expm1(-2.0 * v) + 2.0 * v)
    return psi.integrate(integrand)


def _mhd_parts(w: GridField, phi: GridField, eps: float):
    if not w.zero_mean:
        raise NonZeroMean("perturbed vorticity must have zero mean")
    # iint J~ = -iint Lap phi~ = -(flux through y = +-Y)
    dphi = _dy(phi.values, phi.hy)
    flux = 2.0 * np.pi * (dphi[:, -1].mean() - dphi[:, 0].mean())
    if abs(flux - 4.0 * np.pi) > TOTAL_TOL:
        raise InconsistentProblem(f"iint J~ = {-flux:.9f}, expected -4pi")
    p = FlowParams(eps)
    X, Y = w.mesh()
    phi_eps = np.asarray(stream_psi(p, (X, Y)))
    g = np.asarray(gprime(p, (X, Y)))
    pert = phi.like(phi.values - phi_eps)
    d1 = w.integrate(poisson_solve(w, normalize=False).values * w.values)
    d2 = pert.integrate(grad_sq(pert))
    d3 = pert.integrate(0.25 * g * (np.expm1(-2.0 * pert.values) + 2.0 * pert.values))
    om = np.asarray(vorticity_omega(p, (X, Y)))
    # G*J^eps = phi_eps + ln sqrt(1-eps^2) and e^{-2 phi_eps} = -omega_eps
    base = (0.5 * w.integrate((phi_eps + 0.5 * np.log1p(-eps * eps)) * om)
            - 0.5 * w.integrate(-om))
    return base, d1, d2, d3


def mhd_ec_functional(w: GridField, phi: GridField, eps: float) -> float:
    """Energy-Casimir value H(w, phi) for the magnetic island chain.

    Evaluated as H(0, phi_eps) + d1/2 + d2/2 - d3, which keeps every integrand
    decaying on the truncated strip.
    """
    base, d1, d2, d3 = _mhd_parts(w, phi, eps)
    return base + 0.5 * d1 + 0.5 * d2 - d3


def mhd_distance(w: GridField, phi: GridField, eps: float):
    _, d1, d2, d3 = _mhd_parts(w, phi, eps)
    return d1, d2, d3, d1 + d2 + d3
