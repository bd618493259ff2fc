"""Hermite-Fourier Galerkin discretisations.

Co-periodic operator A~ (Hermite functions H_n in y, Fourier modes in x):

    <A~ p1, p2> = iint grad p1 . grad p2 - iint g' p1 p2
                  + (1/8pi) iint g' p1 * iint g' p2,

with the basis (n, k), 0 <= n <= 2N, -N <= k <= N in lexicographic order,
p_{n,0} = F_n(y)/sqrt(2pi) (F_n the antiderivative of H_n from 0),
p_{n,k>0} = H_n cos(kx)/sqrt(pi), p_{n,k<0} = H_n sin(|k|x)/sqrt(pi).

Modulational problem in the basis e^{ikx} H_n(y)/sqrt(2pi): with
M p = u . grad_a(-Lap_a p) - g' u . grad_a p and D p = -Lap_a p, the growth
rates solve M^H x = sigma D^H x where M[i, j] = <M p_i, p_j>.

Integrals use the trapezoid rule in both directions: periodic in x and, in y,
on a truncated line where every integrand is analytic and decays at least
like exp(-2|y|).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .errors import ConvergenceFailure, OutOfRange, QuadratureUnderResolved, SingularD
from .orthopoly import hermite_antiderivs, hermite_function_derivs
from .steady_fields import FlowParams, gprime, velocity_u

SYM_TOL = 1e-10
POSITIVE_TOL = 1e-6


@dataclass(frozen=True)
class Quad:
    """Trapezoid resolution: nx points on [0, 2pi), y spacing hy on [-Y, Y]."""
    nx: int = 96
    y_max: float = 20.0
    hy: float = 0.04

    def x_nodes(self):
        x = np.arange(self.nx) * (2.0 * np.pi / self.nx)
        return x, np.full(self.nx, 2.0 * np.pi / self.nx)

    def y_nodes(self):
        n = int(round(2.0 * self.y_max / self.hy))
        y = np.linspace(-self.y_max, self.y_max, n + 1)
        w = np.full(n + 1, y[1] - y[0])
        w[[0, -1]] *= 0.5
        return y, w


CO_QUAD = Quad()
MOD_QUAD = Quad(nx=128, y_max=12.0, hy=0.05)


@dataclass(frozen=True)
class BasisSpec:
    N: int
    alpha: float = 0.0       # 0 selects the co-periodic basis

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise OutOfRange("N must be a positive integer")

    @property
    def problem(self):
        return "CoPeriodicBasis" if self.alpha == 0.0 else f"ModulationalBasis({self.alpha})"

    def index(self):
        return [(n, k) for n in range(2 * self.N + 1) for k in range(-self.N, self.N + 1)]

    @property
    def size(self):
        return (2 * self.N + 1) ** 2


@dataclass
class SpectrumTable:
    eigenvalues: np.ndarray
    vectors: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def clusters(self, tol=1e-8):
        """Cluster id per eigenvalue: consecutive values within tol share an id."""
        ids, cur = [], 0
        ev = self.eigenvalues
        for i in range(len(ev)):
            if i and abs(ev[i] - ev[i - 1]) > tol:
                cur += 1
            ids.append(cur)
        return ids


def _fourier_table(N, x):
    """Rows X_k(x) for k = -N..N (sin for k < 0, 1/sqrt(2pi) for k = 0)."""
    rows = []
    for k in range(-N, N + 1):
        if k == 0:
            rows.append(np.full_like(x, 1.0 / np.sqrt(2.0 * np.pi)))
        elif k > 0:
            rows.append(np.cos(k * x) / np.sqrt(np.pi))
        else:
            rows.append(np.sin(-k * x) / np.sqrt(np.pi))
    return np.array(rows)


def assemble_Atilde(eps: float, N: int, quad: Quad = CO_QUAD) -> np.ndarray:
    """Matrix of <A~ p_i, p_j> in the co-periodic basis."""
    p = FlowParams(eps)
    spec = BasisSpec(N)
    x, wx = quad.x_nodes()
    y, wy = quad.y_nodes()
    nn = 2 * N + 1
    H, dH = hermite_function_derivs(2 * N, y)
    F = hermite_antiderivs(2 * N, y)
    ks = np.arange(-N, N + 1)
    # Y[n, k, y]: F_n for k = 0 and H_n otherwise
    Y = np.repeat(H[:, None, :], nn, axis=1)
    Y[:, N, :] = F
    X = _fourier_table(N, x)
    G = gprime(p, (x[:, None], y[None, :]))             # (nx, ny)
    W = np.einsum("kx,lx,xy,x->kly", X, X, G, wx)         # (k, l, y)
    V = np.einsum("kly,nky,mly,y->nkml", W, Y, Y, wy)
    W0 = np.einsum("kx,xy,x->ky", X, G, wx)
    v = np.einsum("ky,nky,y->nk", W0, Y, wy)
    hh = np.einsum("ny,my,y->nm", H, H, wy)
    dd = np.einsum("ny,my,y->nm", dH, dH, wy)
    grad = np.zeros((nn, nn, nn, nn))
    for j, k in enumerate(ks):
        grad[:, j, :, j] = hh if k == 0 else dd + k * k * hh
    A = (grad - V).reshape(spec.size, spec.size) + np.outer(v.ravel(), v.ravel()) / (8.0 * np.pi)
    defect = np.max(np.abs(A - A.T))
    if defect > SYM_TOL:
        raise QuadratureUnderResolved(f"symmetry defect {defect:.2e}")
    return 0.5 * (A + A.T)


def _dft(f, x, wx, d):
    """(1/2pi) int f(x, y) e^{i d x} dx for each d; f has shape (nx, ny)."""
    return np.einsum("dx,xy->dy", np.exp(1j * np.outer(d, x)) * wx, f) / (2.0 * np.pi)


def assemble_modulational(eps: float, alpha: float, N: int, quad: Quad = MOD_QUAD):
    """(M, D) with M[i, j] = <M p_i, p_j>, D[i, j] = <-Lap_a p_i, p_j>."""
    if not (0.0 < alpha <= 0.5):
        raise OutOfRange("need 0 < alpha <= 1/2")
    p = FlowParams(eps)
    spec = BasisSpec(N, alpha)
    x, wx = quad.x_nodes()
    y, wy = quad.y_nodes()
    nn = 2 * N + 1
    ks = np.arange(-N, N + 1)
    H, dH = hermite_function_derivs(2 * N, y)
    ns = np.arange(nn)
    X, Yg = x[:, None], y[None, :]
    G = gprime(p, (X, Yg))
    u1, u2 = velocity_u(p, (X, Yg))
    u1 = np.broadcast_to(u1, G.shape)
    u2 = np.broadcast_to(u2, G.shape)
    d = np.arange(-2 * N, 2 * N + 1)
    u1h, u2h = _dft(u1, x, wx, d), _dft(u2, x, wx, d)
    gu1h, gu2h = _dft(G * u1, x, wx, d), _dft(G * u2, x, wx, d)
    M = np.zeros((nn, nn, nn, nn), dtype=complex)        # (n1, k1, n2, k2)
    for i1, k1 in enumerate(ks):
        a = k1 + alpha
        c = a * a + 2 * ns[:, None] + 1 - y[None, :] ** 2
        Wn = c * H                                       # -Lap_a of H_n e^{ikx}
        dWn = -2.0 * y * H + c * dH
        for i2, k2 in enumerate(ks):
            j = (k1 - k2) + 2 * N
            row = (1j * a * (u1h[j] * Wn - gu1h[j] * H)
                   + u2h[j] * dWn - gu2h[j] * dH)        # (n1, y)
            M[:, i1, :, i2] = np.einsum("ny,my,y->nm", row, H, wy)
    hh = np.einsum("ny,my,y->nm", H, H, wy)
    dd = np.einsum("ny,my,y->nm", dH, dH, wy)
    D = np.zeros((nn, nn, nn, nn), dtype=complex)
    for i, k in enumerate(ks):
        D[:, i, :, i] = (k + alpha) ** 2 * hh + dd
    M = M.reshape(spec.size, spec.size)
    D = D.reshape(spec.size, spec.size)
    defect = np.max(np.abs(D - D.conj().T))
    if defect > SYM_TOL:
        raise QuadratureUnderResolved(f"Hermiticity defect of D {defect:.2e}")
    return M, 0.5 * (D + D.conj().T)


def solve_symmetric(A, vectors: bool = False, meta=None) -> SpectrumTable:
    A = np.asarray(A, dtype=float)
    if np.max(np.abs(A - A.T), initial=0.0) > SYM_TOL * max(1.0, np.max(np.abs(A), initial=0.0)):
        raise OutOfRange("matrix is not symmetric")
    try:
        w, v = linalg.eigh(A)
    except linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    return SpectrumTable(w, v if vectors else None, dict(meta or {}))


def solve_generalized(M, D, vectors: bool = False, meta=None) -> SpectrumTable:
    """sigma from M^H x = sigma D^H x, sorted by descending real part."""
    Mh = np.asarray(M, dtype=complex).conj().T
    Dh = np.asarray(D, dtype=complex).conj().T
    try:
        linalg.cholesky(0.5 * (Dh + Dh.conj().T))
    except linalg.LinAlgError as exc:
        raise SingularD("D is not positive definite") from exc
    try:
        w, v = linalg.eig(Mh, Dh)
    except linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    order = np.lexsort((-w.imag, -w.real))
    return SpectrumTable(w[order], v[:, order] if vectors else None, dict(meta or {}))


def coperiodic_spectrum(eps: float, N: int = 7, quad: Quad = CO_QUAD) -> SpectrumTable:
    t = solve_symmetric(assemble_Atilde(eps, N, quad))
    t.meta.update(epsilon=eps, alpha=0.0, N=N, quad=quad.__dict__)
    return t


def modulational_spectrum(eps: float, alpha: float, N: int = 7, quad: Quad = MOD_QUAD) -> SpectrumTable:
    t = solve_generalized(*assemble_modulational(eps, alpha, N, quad))
    t.meta.update(epsilon=eps, alpha=alpha, N=N, quad=quad.__dict__)
    return t


def growth_rates(eps: float, alpha: float, N: int = 7, tol: float = POSITIVE_TOL):
    """Positive real parts of sigma, descending, with multiplicity."""
    re = modulational_spectrum(eps, alpha, N).eigenvalues.real
    return re[re > tol]


def _workers():
    try:
        return max(1, int(os.environ.get("CATSEYE_THREADS", "1")))
    except ValueError:
        return 1


def growth_rate_sweep(alpha: float, eps_grid, N: int = 7, tol: float = POSITIVE_TOL):
    """[(eps, positive real parts descending)] over the grid, in grid order."""
    eps_grid = [float(e) for e in eps_grid]
    with ThreadPoolExecutor(max_workers=_workers()) as pool:
        rates = list(pool.map(lambda e: growth_rates(e, alpha, N, tol), eps_grid))
    return list(zip(eps_grid, rates))


def branch_crossing(alpha: float, lo: float, hi: float, N: int = 7,
                    tol: float = POSITIVE_TOL, xtol: float = 1e-3) -> float:
    """Bisect for the eps where the number of unstable modes drops below two."""
    def two(e):
        return len(growth_rates(e, alpha, N, tol)) >= 2
    if not two(lo) or two(hi):
        raise OutOfRange("bracket does not contain the branch crossing")
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if two(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
