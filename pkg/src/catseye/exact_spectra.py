"""Closed-form spectra of the associated eigenvalue problems

    -Lap psi = lambda g'(psi_eps) (psi - P psi)

for co-periodic, 2m*pi-periodic and modulational (Floquet exponent alpha)
perturbations.  Every eigenfunction has the separated form

    Psi(theta, gamma) = T(nu*theta) * s * (1-gamma^2)^{mu/2} C_j^{mu+1/2}(gamma) - c0

in the (theta, gamma) variables, so one evaluator covers all three problems.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import special

from .errors import InconsistentProblem, OutOfRange
from .orthopoly import double_factorial_odd, gegenbauer_derivs
from .steady_fields import (FlowParams, PointXY, TWO_PI, CoordsEGX, coord_derivatives,
                            coords, gprime, inverse_coords, lifted_theta)

MERGE_TOL = 1e-12


@dataclass(frozen=True)
class CoPeriodic:
    pass


@dataclass(frozen=True)
class MultiPeriodic:
    m: int

    def __post_init__(self):
        if self.m < 2:
            raise OutOfRange("multi-periodic problems need m >= 2")


@dataclass(frozen=True)
class Modulational:
    alpha: float

    def __post_init__(self):
        if not (0.0 < self.alpha <= 0.5):
            raise OutOfRange("modulational problems need 0 < alpha <= 1/2")


@dataclass(frozen=True)
class EigenFunction:
    """Descriptor of one eigenfunction.

    trig is 'zero' (theta-independent), 'cos', 'sin' or 'exp'.  For the
    multi-periodic fractional branch ``residue`` is i in [1, m-1]; for the
    modulational problem ``sign`` is +1 or -1.
    """
    problem: object
    n: int
    mode: int
    trig: str
    residue: int = 0
    sign: int = 0

    # separated-form parameters
    def params(self):
        """Return (nu, mu, degree, scale, c0)."""
        pr = self.problem
        if isinstance(pr, Modulational):
            a = pr.alpha
            j = self.mode
            if self.sign > 0:
                return j + a, j + a, self.n - j, 1.0, 0.0
            return -(j - a), j - a, self.n - j, 1.0, 0.0
        if self.residue:
            m = pr.m
            nu = ((self.n - self.mode) * m + self.residue) / m
            return nu, nu, self.mode, 1.0, 0.0
        if self.trig == "zero":
            return 0.0, 0.0, self.n, 1.0, float(special.eval_legendre(self.n, 0.0))
        k = self.mode
        return float(k), float(k), self.n - k, double_factorial_odd(k), 0.0


@dataclass(frozen=True)
class EigenPair:
    lam: float
    descriptor: EigenFunction
    multiplicity: int
    members: tuple = field(default=(), compare=False)


def _coperiodic_functions(lmax):
    out = []
    n = 1
    while n * (n + 1) / 2 <= lmax + MERGE_TOL:
        lam = n * (n + 1) / 2
        out.append((lam, EigenFunction(CoPeriodic(), n, 0, "zero")))
        for k in range(1, n + 1):
            for trig in ("cos", "sin"):
                out.append((lam, EigenFunction(CoPeriodic(), n, k, trig)))
        n += 1
    return out


def _multiperiodic_functions(problem, lmax):
    m = problem.m
    out = [(lam, EigenFunction(problem, f.n, f.mode, f.trig))
           for lam, f in _coperiodic_functions(lmax)]
    for i in range(1, m):
        n = 0
        while True:
            r = n + i / m
            lam = 0.5 * r * (r + 1)
            if lam > lmax + MERGE_TOL:
                break
            for j in range(n + 1):
                for trig in ("cos", "sin"):
                    out.append((lam, EigenFunction(problem, n, j, trig, residue=i)))
            n += 1
    return out


def _modulational_functions(problem, lmax):
    a = problem.alpha
    out = []
    n = 0
    while 0.5 * (n + a) * (n + a + 1) <= lmax + MERGE_TOL:
        lam = 0.5 * (n + a) * (n + a + 1)
        for j in range(n + 1):
            out.append((lam, EigenFunction(problem, n, j, "exp", sign=+1)))
        n += 1
    n = 1
    while 0.5 * (n - a) * (n - a + 1) <= lmax + MERGE_TOL:
        lam = 0.5 * (n - a) * (n - a + 1)
        for j in range(1, n + 1):
            out.append((lam, EigenFunction(problem, n, j, "exp", sign=-1)))
        n += 1
    return out


def _functions(problem, lmax):
    if lmax <= 0:
        raise OutOfRange("lambda_max must be positive")
    if isinstance(problem, CoPeriodic):
        return _coperiodic_functions(lmax)
    if isinstance(problem, MultiPeriodic):
        return _multiperiodic_functions(problem, lmax)
    if isinstance(problem, Modulational):
        return _modulational_functions(problem, lmax)
    raise InconsistentProblem(f"unknown problem {problem!r}")


def _exact_lambda(problem, f: EigenFunction) -> float:
    """Eigenvalue recomputed from the descriptor (rational where possible)."""
    if isinstance(problem, Modulational):
        r = f.n + f.sign * problem.alpha
        return 0.5 * r * (r + 1)
    if f.residue:
        r = Fraction(f.n) + Fraction(f.residue, problem.m)
        return float(r * (r + 1) / 2)
    return f.n * (f.n + 1) / 2


def list_eigenpairs(problem, lambda_max: float) -> list:
    """One EigenPair per eigenfunction, sorted by eigenvalue."""
    funcs = _functions(problem, lambda_max)
    merged = list_eigenvalues(problem, lambda_max)
    out = []
    for lam, f in funcs:
        mult = next(e.multiplicity for e in merged if abs(e.lam - lam) < MERGE_TOL)
        out.append(EigenPair(lam, f, mult))
    out.sort(key=lambda e: e.lam)
    return out


def list_eigenvalues(problem, lambda_max: float) -> list:
    """Distinct eigenvalues <= lambda_max with multiplicities, ascending.

    Branches whose values agree within 1e-12 are merged and their
    multiplicities summed.
    """
    funcs = sorted(_functions(problem, lambda_max), key=lambda t: t[0])
    groups = []
    for lam, f in funcs:
        if groups and abs(groups[-1][0] - lam) < MERGE_TOL:
            groups[-1][1].append(f)
        else:
            groups.append((lam, [f]))
    return [EigenPair(lam, fs[0], len(fs), tuple(fs)) for lam, fs in groups]


def _check_problem(p: FlowParams, f: EigenFunction):
    pr = f.problem
    if isinstance(pr, CoPeriodic):
        ok = p.m == 1 and p.alpha == 0.0
    elif isinstance(pr, MultiPeriodic):
        ok = p.m == pr.m and p.alpha == 0.0
    else:
        ok = p.m == 1 and abs(p.alpha - pr.alpha) < 1e-15
    if not ok:
        raise InconsistentProblem(f"{pr!r} does not match {p!r}")


def _trig(f, nu, theta, order):
    """d^order/dtheta^order of the angular factor."""
    if f.trig == "zero":
        return np.ones_like(theta) if order == 0 else np.zeros_like(theta)
    if f.trig == "exp":
        return (1j * nu) ** order * np.exp(1j * nu * theta)
    ph = nu * theta + (0.0 if f.trig == "cos" else -0.5 * np.pi) + 0.5 * np.pi * order
    return nu ** order * np.cos(ph)


def _radial(f, gamma):
    """G, G', G'' of s*(1-g^2)^{mu/2} C_j^{mu+1/2}(g) (constant not included)."""
    nu, mu, deg, scale, _ = f.params()
    c, c1, c2 = gegenbauer_derivs(deg, mu + 0.5, gamma)
    one = 1.0 - gamma * gamma
    w = one ** (0.5 * mu)
    r = -mu * gamma / one
    rp = -mu * (1.0 + gamma * gamma) / one ** 2
    g0 = scale * w * c
    g1 = scale * w * (c1 + r * c)
    g2 = scale * w * (c2 + 2.0 * r * c1 + (r * r + rp) * c)
    return g0, g1, g2


def full_value(f: EigenFunction, theta, gamma):
    """Psi(theta, gamma) with theta lifted over the 2m*pi period; for the
    modulational problem this is the full function psi~ * exp(i alpha x)."""
    nu, _, _, _, c0 = f.params()
    g0, _, _ = _radial(f, np.asarray(gamma, dtype=float))
    return _trig(f, nu, np.asarray(theta, dtype=float), 0) * g0 - c0


def eigenfunction_value(p: FlowParams, pair, pt: PointXY):
    """Value at pt; modulational eigenfunctions carry exp(i alpha (theta - x))."""
    f = pair.descriptor if isinstance(pair, EigenPair) else pair
    _check_problem(p, f)
    x = np.asarray(pt.x if isinstance(pt, PointXY) else pt[0], dtype=float)
    c = coords(p, pt)
    th = np.asarray(lifted_theta(p, pt))
    val = full_value(f, th, np.asarray(c.gamma)).astype(complex)
    if isinstance(f.problem, Modulational):
        val = val * np.exp(-1j * f.problem.alpha * x)
    return val.item() if np.ndim(val) == 0 else val


def projection_value(p: FlowParams, f: EigenFunction) -> float:
    """P psi = (1/8m pi) iint g' psi dxdy = (1/4m pi) iint Psi dtheta dgamma.

    Nonzero angular modes integrate to zero over whole periods; the
    modulational problem has no projection.
    """
    if isinstance(f.problem, Modulational) or f.trig != "zero":
        return 0.0
    x, w = special.roots_legendre(f.n // 2 + 4)
    return 0.5 * float(np.dot(w, full_value(f, np.zeros_like(x), x)))


def projection_P(p: FlowParams, field_sampler, rule2d=None, y_max: float = 40.0):
    """(1/8m pi) iint g' psi dxdy for a sampler psi(x, y) by the tensor
    trapezoid rule on [0, 2m pi) x [-y_max, y_max].

    rule2d = (nx, ny) sets the resolution.  The contribution of the outer
    y-strips is used as a tail estimate.
    """
    from .errors import QuadratureDiverged
    nx, ny = rule2d or (64 * p.m, 4001)
    x = np.arange(nx) * (p.period / nx)
    y = np.linspace(-y_max, y_max, ny)
    X, Y = np.meshgrid(x, y, indexing="ij")
    gp = gprime(p, (X, Y))
    vals = gp * np.asarray(field_sampler(X, Y), dtype=float)
    wy = np.full(ny, y[1] - y[0])
    wy[[0, -1]] *= 0.5
    wx = p.period / nx
    total = wx * float(np.sum(vals @ wy))
    edge = np.abs(y) > 0.9 * y_max
    tail = wx * float(np.sum(np.abs(vals[:, edge]) @ wy[edge]))
    norm = 8.0 * np.pi * p.m
    if tail > 1e-8 * max(1.0, abs(total)):
        raise QuadratureDiverged(f"y-tail contribution {tail:.3e} too large")
    return ProjectionValue(total / norm, norm)


@dataclass(frozen=True)
class ProjectionValue:
    value: float
    normalization: float


def residual_grid(p: FlowParams, n: int = 64):
    """Tensor grid in (theta, gamma): midpoint angles over [0, 2m pi) and
    Gauss-Legendre gammas, which avoid the degenerate images of y = +-inf."""
    theta = (np.arange(n) + 0.5) * (p.period / n)
    gamma, _ = special.roots_legendre(n)
    return theta, gamma


def residual_norm(p: FlowParams, pair, grid=None) -> float:
    """max |-Lap psi - lambda g'(psi - P psi)| / max |lambda g' psi| on the grid.

    The Laplacian is assembled by the chain rule
        Psi_tt |grad t|^2 + 2 Psi_tg grad t.grad g + Psi_gg |grad g|^2
        + Psi_t Lap t + Psi_g Lap g
    with the coordinate partials and Laplacians evaluated in closed form at
    the preimage (x, y) of each grid node.  No identity relating them to g'
    is assumed, so the check depends on eps.
    """
    if pair is None:
        return 0.0
    f = pair.descriptor if isinstance(pair, EigenPair) else pair
    lam = pair.lam if isinstance(pair, EigenPair) else _exact_lambda(f.problem, f)
    _check_problem(p, f)
    theta, gamma = grid if grid is not None else residual_grid(p)
    T, G = np.meshgrid(np.asarray(theta, float), np.asarray(gamma, float), indexing="ij")
    cell = np.floor(T / TWO_PI)
    rho = np.sqrt(1.0 - G * G)
    c = CoordsEGX(rho * np.sin(T), G, rho * np.cos(T), np.mod(T, TWO_PI))
    pt = inverse_coords(p, c, 0)
    x = np.asarray(pt.x) + TWO_PI * cell
    y = np.asarray(pt.y)
    d = coord_derivatives(p, (x, y))
    gp = np.asarray(gprime(p, (x, y)))

    nu, _, _, _, c0 = f.params()
    t0, t1, t2 = (_trig(f, nu, T, k) for k in range(3))
    g0, g1, g2 = _radial(f, G)
    psi = t0 * g0 - c0
    grad_t2 = d["tx"] ** 2 + d["ty"] ** 2
    grad_g2 = d["gx"] ** 2 + d["gy"] ** 2
    cross = d["tx"] * d["gx"] + d["ty"] * d["gy"]
    lap = (t2 * g0 * grad_t2 + 2.0 * t1 * g1 * cross + t0 * g2 * grad_g2
           + t1 * g0 * d["lap_theta"] + t0 * g1 * d["lap_gamma"])
    P = projection_value(p, f)
    res = np.abs(-lap - lam * gp * (psi - P))
    scale = np.max(np.abs(lam * gp * psi))
    return float(np.max(res) / scale) if scale > 0 else 0.0
