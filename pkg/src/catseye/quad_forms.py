"""Instability quadratic forms and level-curve quadrature.

<A psi, psi> = b1 + b2 with

    b1 = iint |grad psi|^2 - g' psi^2
       = iint |Psi_t|^2/(1-g^2) + (1-g^2)|Psi_g|^2 - 2|Psi|^2  dtheta dgamma,
    b2 = int g'(rho) sum_components |oint psi/|grad psi||^2 / oint 1/|grad psi| drho.

Level curves are handled in the variable s = exp(-2 rho).  On {psi = rho}
with C = sqrt((1-eps^2)/s) the curve is cosh y = C - eps cos x, and along it

    xi = eps + sqrt(s(1-eps^2)) cos x,   eta = sqrt(s) sin x,
    gamma = +-sqrt(s) sinh y,            dl/|grad psi| = sqrt(1-eps^2) dx/|gamma|.

Since g'(rho) drho = |ds|,

    b2 = sqrt(1-eps^2) int sum |J1|^2 / J0 ds,
    J0 = int dx/|gamma|,  J1 = int Psi dx/|gamma|   (summed over branches).

Trapped levels fill s in (s_sep, s_max) = ((1-eps)/(1+eps), (1+eps)/(1-eps))
and untrapped ones s in (0, s_sep); both ranges are finite.  The inner
x-integrals use tanh-sinh nodes placed by their offsets from the endpoints,
which absorbs the inverse-square-root turning points, and the outer
s-integrals use Gauss-Legendre panels graded geometrically toward the
separatrix, where J0 has a logarithmic singularity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .errors import InconsistentProblem, OutOfRange, SingularEndpoint
from .steady_fields import FlowParams, TWO_PI, level_turning_point, rho0

DEFAULT_N_RHO = 16      # Gauss-Legendre nodes per graded s-panel
DEFAULT_N_X = 96        # tanh-sinh nodes per half line
_TS_TMAX = 4.0
_PANEL_RATIO = 0.25
_PANEL_FLOOR = 1e-16


# ---------------------------------------------------------------------------
# test functions

@dataclass(frozen=True)
class Piece:
    """trig(nu*theta) * (1-gamma^2)^{mu/2} on theta in (a, b]."""
    a: float
    b: float
    trig: str
    nu: float
    mu: float

    def angular(self, theta, order=0):
        if self.trig == "exp":
            return (1j * self.nu) ** order * np.exp(1j * self.nu * theta)
        ph = self.nu * theta + (0.0 if self.trig == "cos" else -0.5 * np.pi) + 0.5 * np.pi * order
        return self.nu ** order * np.cos(ph)


@dataclass(frozen=True)
class TestFunction:
    """Piecewise separated function on theta in [0, 2m pi).

    For modulational functions (alpha > 0) the stored pieces describe the full
    function psi~ exp(i alpha x), which depends on (theta, gamma) only.
    """
    __test__ = False        # not a pytest class

    name: str
    m: int
    pieces: tuple
    shift: float = 0.0
    alpha: float = 0.0

    @property
    def period(self):
        return TWO_PI * self.m

    def value(self, theta, gamma):
        theta = np.asarray(theta, dtype=float)
        gamma = np.asarray(gamma, dtype=float)
        cplx = any(pc.trig == "exp" for pc in self.pieces)
        out = np.full(np.broadcast(theta, gamma).shape, self.shift,
                      dtype=complex if cplx else float)
        one = np.clip(1.0 - gamma * gamma, 0.0, None)
        for pc in self.pieces:
            mask = (theta > pc.a) & (theta <= pc.b)
            if pc.a == 0.0:
                mask |= theta == 0.0
            if not np.any(mask):
                continue
            v = pc.angular(theta) * one ** (0.5 * pc.mu)
            out = out + np.where(mask, v, 0.0)
        return out

    def params(self, eps: float) -> FlowParams:
        return FlowParams(eps, self.m, self.alpha)

    @property
    def theta_breaks(self):
        """Piece boundaries folded into (0, pi), where level-curve integrands kink."""
        out = []
        for pc in self.pieces:
            for b in (pc.a, pc.b):
                f = float(np.mod(b, TWO_PI))
                f = min(f, TWO_PI - f)
                if 1e-12 < f < np.pi - 1e-12 and all(abs(f - o) > 1e-12 for o in out):
                    out.append(f)
        return tuple(sorted(out))


def test_even(k: int = 1) -> TestFunction:
    return TestFunction(f"TestEven({k})", 2 * k,
                        (Piece(0.0, 4 * k * np.pi, "cos", 0.5, 0.5),))


def test_odd1(k: int = 1) -> TestFunction:
    pieces = [Piece(0.0, 6 * np.pi, "sin", 1.0 / 3.0, 1.0 / 3.0)]
    if k > 1:
        pieces.append(Piece(6 * np.pi, (4 * k + 2) * np.pi, "sin", 1.0, 1.0))
    return TestFunction(f"TestOdd1({k})", 2 * k + 1, tuple(pieces))


def test_odd2(k: int = 1, shifted: bool = True) -> TestFunction:
    p4 = 4 * k * np.pi
    pieces = (Piece(0.0, p4, "cos", 0.5, 1.0),
              Piece(p4, p4 + 0.5 * np.pi, "cos", 1.0, 1.0),
              Piece(p4 + 1.5 * np.pi, p4 + 2.0 * np.pi, "cos", 1.0, 1.0))
    shift = -1.0 / ((2 * k + 1) * np.pi) if shifted else 0.0
    return TestFunction(f"TestOdd2({k})", 2 * k + 1, pieces, shift)


def mod_test(alpha: float) -> TestFunction:
    if not (0.0 < alpha <= 0.5):
        raise OutOfRange("need 0 < alpha <= 1/2")
    return TestFunction(f"ModTest({alpha})", 1,
                        (Piece(0.0, TWO_PI, "exp", alpha, alpha),), alpha=alpha)


def mod_test_half() -> TestFunction:
    # ((1 + e^{-i theta})/2) e^{i theta/2} = cos(theta/2)
    return TestFunction("ModTestHalf", 1,
                        (Piece(0.0, TWO_PI, "cos", 0.5, 0.5),), alpha=0.5)


ZERO = TestFunction("Zero", 1, ())


def _check(p: FlowParams, t: TestFunction):
    if p.m != t.m or abs(p.alpha - t.alpha) > 1e-15:
        raise InconsistentProblem(f"{t.name} needs m={t.m}, alpha={t.alpha}; got {p!r}")


# ---------------------------------------------------------------------------
# b1

def _beta_int(power):
    """int_{-1}^{1} (1-g^2)^power dg."""
    return float(np.sqrt(np.pi) * special.gamma(power + 1.0) / special.gamma(power + 1.5))


def _jacobi_moments(mu, n):
    """int (1-g^2)^{mu-1}, int g^2 (1-g^2)^{mu-1}, int (1-g^2)^mu by Gauss-Jacobi."""
    x, w = special.roots_jacobi(n, mu - 1.0, mu - 1.0)
    return float(w.sum()), float(w @ x ** 2), float(w @ (1.0 - x ** 2))


def form_b1(p: FlowParams, t: TestFunction, rule2d=None) -> float:
    """b1 by Gauss-Legendre in theta on each piece and Gauss-Jacobi in gamma.

    With Psi = T(theta) (1-g^2)^{mu/2} on a piece every gamma-integrand is
    (1-g^2)^{mu-1} times a polynomial of degree <= 2, so the Jacobi rule with
    exponent mu-1 is exact.  A constant shift c adds
    -4c iint Psi - 2c^2 |domain|.
    """
    _check(p, t)
    n_th, n_g = rule2d or (96, 8)
    total = 0.0
    mean = 0.0
    for pc in t.pieces:
        x, w = special.roots_legendre(max(n_th, int(8 * (pc.b - pc.a))))
        th = 0.5 * (pc.b - pc.a) * x + 0.5 * (pc.a + pc.b)
        w = 0.5 * (pc.b - pc.a) * w
        t0 = pc.angular(th)
        t1 = pc.angular(th, 1)
        i_t2 = float(w @ np.abs(t0) ** 2)
        i_dt2 = float(w @ np.abs(t1) ** 2)
        m_w, m_g2, m_w1 = _jacobi_moments(pc.mu, n_g)
        total += i_dt2 * m_w + i_t2 * (pc.mu ** 2 * m_g2 - 2.0 * m_w1)
        if t.shift:
            xj, wj = special.roots_jacobi(n_g, 0.5 * pc.mu, 0.5 * pc.mu)
            mean += float(np.real(w @ t0)) * float(wj.sum())
    if t.shift:
        total += -4.0 * t.shift * mean - 2.0 * t.shift ** 2 * (2.0 * t.period)
    return float(total)


def form_b1_modulational(p: FlowParams, alpha: float) -> float:
    """b_{alpha,1} = 2 pi (alpha(alpha+1) - 2) int (1-g^2)^alpha dg."""
    if not (0.0 < alpha <= 0.5):
        raise OutOfRange("need 0 < alpha <= 1/2")
    return 2.0 * np.pi * (alpha * (alpha + 1.0) - 2.0) * _beta_int(alpha)


# ---------------------------------------------------------------------------
# level-curve machinery

@dataclass(frozen=True)
class LevelCurve:
    rho: float
    eps: float
    x0: float
    branch: str = "both"


def level_curve(p: FlowParams, rho: float, branch: str = "both") -> LevelCurve:
    r0 = rho0(p)
    if p.epsilon > 0 and min(abs(rho - r0), abs(rho + r0)) < 1e-10:
        raise SingularEndpoint("level within 1e-10 of the separatrix or the elliptic point")
    return LevelCurve(rho, p.epsilon, level_turning_point(p, rho), branch)


def _tanh_sinh(n_half: int):
    """Offsets (a, b) from the two ends of a unit interval and weights."""
    h = _TS_TMAX / n_half
    t = h * np.arange(-n_half, n_half + 1)
    u = 0.5 * np.pi * np.sinh(t)
    e = np.exp(-2.0 * np.abs(u))
    small = e / (1.0 + e)
    big = 1.0 / (1.0 + e)
    a = np.where(u >= 0, big, small)
    b = np.where(u >= 0, small, big)
    w = h * 0.5 * np.pi * np.cosh(t) * 2.0 * e / (1.0 + e) ** 2
    return a, b, w


@dataclass
class _Levels:
    """Inner-quadrature data for a batch of levels (rows) and x nodes (cols)."""
    s: np.ndarray
    ws: np.ndarray
    x: np.ndarray
    wx: np.ndarray          # includes 1/|gamma|
    gamma: np.ndarray       # |gamma| on the upper branch
    theta: np.ndarray       # theta in [0, 2pi)
    extra: dict = field(default_factory=dict)


def _graded_panels(length: float, n_gl: int):
    """Nodes on (0, length] graded toward 0: offsets and weights.

    The offset is length * tau^2 with GL panels in tau shrinking
    geometrically, which smooths both 1/sqrt and log endpoint behaviour.
    """
    x, w = special.roots_legendre(n_gl)
    taus, wts = [], []
    hi = 1.0
    while hi > _PANEL_FLOOR:
        lo = hi * _PANEL_RATIO
        taus.append(0.5 * (hi - lo) * x + 0.5 * (hi + lo))
        wts.append(0.5 * (hi - lo) * w)
        hi = lo
    tau = np.concatenate(taus)
    return length * tau * tau, 2.0 * length * tau * np.concatenate(wts)


def _uniform_panels(a, b, n_gl, count=4):
    x, w = special.roots_legendre(n_gl)
    edges = np.linspace(a, b, count + 1)
    nodes = [0.5 * (hi - lo) * x + 0.5 * (hi + lo) for lo, hi in zip(edges, edges[1:])]
    wts = [0.5 * (hi - lo) * w for lo, hi in zip(edges, edges[1:])]
    return np.concatenate(nodes), np.concatenate(wts)


def _composite(length, breaks, n_gl, sqrt_end=False):
    """Offsets in (0, length) graded toward 0 and toward each interior break.

    The far end is treated as smooth, or as smooth in sqrt(length - offset)
    when sqrt_end is set.
    """
    pts = [0.0] + sorted(breaks) + [length]
    nodes, wts = [], []
    for i, (a, b) in enumerate(zip(pts, pts[1:])):
        mid = 0.5 * (a + b)
        d, w = _graded_panels(mid - a, n_gl)
        nodes.append(a + d)
        wts.append(w)
        if i < len(pts) - 2:
            d, w = _graded_panels(b - mid, n_gl)
            nodes.append(b - d)
        elif sqrt_end:
            tau, w = _uniform_panels(0.0, 1.0, n_gl)
            nodes.append(b - (b - mid) * tau * tau)
            w = 2.0 * (b - mid) * tau * w
        else:
            d, w = _uniform_panels(mid, b, n_gl)
            nodes.append(d)
        wts.append(w)
    return np.concatenate(nodes), np.concatenate(wts)


def s_pole(eps):
    """Level s through the poles gamma = +-1, at (pi, +-acosh(1/eps))."""
    return np.inf if eps == 0.0 else eps * eps / (1.0 - eps * eps)


def _theta_on_curve(eps, s, c, sn):
    eta = np.sqrt(s) * sn
    xi = eps + np.sqrt(s * (1.0 - eps * eps)) * c
    th = np.mod(np.arctan2(eta, xi), TWO_PI)
    return np.where(th >= TWO_PI, th - TWO_PI, th)


def _mirror(s, ws, W, A, Bh, hm, c, sn, eps, extra=None):
    """Assemble both halves of each level from the left half x in [x_lo, pi].

    Splitting at x = pi puts the theta cut beyond the pole at an endpoint,
    and the right half x -> 2pi - x reuses the same nodes with eta -> -eta.
    W holds the plain x-weights, A and Bh the offsets x - x_lo and pi - x.
    """
    gam = np.sqrt(s[:, None] * hm * (hm + 2.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        wx = np.where(gam > 0, W / gam, 0.0)
    x = np.pi - Bh
    th = _theta_on_curve(eps, s[:, None], c, sn)
    th_r = _theta_on_curve(eps, s[:, None], c, -sn)
    return _Levels(s, ws, np.concatenate([x, TWO_PI - x], axis=1),
                   np.concatenate([wx, wx], axis=1), np.concatenate([gam, gam], axis=1),
                   np.concatenate([th, th_r], axis=1), extra or {})


def _break_points(eps, s, x_lo, breaks):
    """x in (x_lo, pi) on the upper half of level s where theta hits a break.

    theta = tb means eta cos tb = xi sin tb, i.e. R sin(x - phi) = eps sin tb.
    Returns an array (levels, 2 * len(breaks)) with pi for missing roots.
    """
    cols = []
    rs = np.sqrt(s)
    for tb in breaks:
        a_ = rs * np.cos(tb)
        b_ = rs * np.sqrt(1.0 - eps * eps) * np.sin(tb)
        R = np.hypot(a_, b_)
        phi = np.arctan2(b_, a_)
        q = np.arcsin(np.clip(eps * np.sin(tb) / R, -1.0, 1.0))
        for x in (phi + q, phi + np.pi - q):
            x = np.mod(x, TWO_PI)
            xi = eps + rs * np.sqrt(1.0 - eps * eps) * np.cos(x)
            eta = rs * np.sin(x)
            ok = (x > x_lo) & (x < np.pi) & (xi * np.cos(tb) + eta * np.sin(tb) > 0)
            cols.append(np.where(ok, x, np.pi))
    return np.sort(np.array(cols).T, axis=1) if cols else np.empty((s.size, 0))


def _break_levels(eps, breaks):
    """Trapped levels whose turning point (y = 0) has theta on a break.

    Along y = 0, tan(theta/2) = sqrt((1-eps)/(1+eps)) tan(x/2), and the level
    through x is s = (1-eps^2)/(1 + eps cos x)^2.  The inner integrals are
    not smooth in s across these levels.
    """
    out = []
    for tb in breaks:
        x = 2.0 * np.arctan(np.sqrt((1.0 + eps) / (1.0 - eps)) * np.tan(0.5 * tb))
        out.append((1.0 - eps * eps) / (1.0 + eps * np.cos(x)) ** 2)
    return out


def _half_nodes(eps, s, x_lo, n_x, breaks):
    """Tanh-sinh nodes on [x_lo, pi] split at the theta breaks.

    Returns weights W and offsets A = x - x_lo, Bh = pi - x; both offsets
    are formed without cancellation at the outer ends.
    """
    a, b, w = _tanh_sinh(n_x)
    inner = _break_points(eps, s, x_lo, breaks)
    lo = np.concatenate([x_lo[:, None], inner], axis=1)
    hi = np.concatenate([inner, np.full((s.size, 1), np.pi)], axis=1)
    Ws, As, Bs = [], [], []
    for j in range(lo.shape[1]):
        ln = (hi[:, j] - lo[:, j])[:, None]
        a0 = 0.0 if j == 0 else (lo[:, j] - x_lo)[:, None]
        b0 = 0.0 if j == lo.shape[1] - 1 else (np.pi - hi[:, j])[:, None]
        Ws.append(ln * w[None, :])
        As.append(a0 + ln * a[None, :])
        Bs.append(b0 + ln * b[None, :])
    return (np.concatenate(Ws, axis=1), np.concatenate(As, axis=1),
            np.concatenate(Bs, axis=1))


def _trapped_levels(eps, n_rho, n_x, delta=None, breaks=()):
    """Trapped levels s = s_sep + delta, delta in (0, s_max - s_sep)."""
    s_sep = (1.0 - eps) / (1.0 + eps)
    s_max = (1.0 + eps) / (1.0 - eps)
    if delta is None:
        marks = [s_pole(eps) - s_sep] + [s - s_sep for s in _break_levels(eps, breaks)]
        marks = sorted({round(d, 15) for d in marks if 1e-12 < d < s_max - s_sep - 1e-12})
        delta, ws = _composite(s_max - s_sep, marks, n_rho)
    else:
        delta = np.atleast_1d(np.asarray(delta, dtype=float))
        ws = np.ones_like(delta)
    s = s_sep + delta
    # 1 + eps - C = (1+eps) delta / (s + sqrt(s s_sep))
    gap = (1.0 + eps) * delta / (s + np.sqrt(s * s_sep))
    x0 = 2.0 * np.arcsin(np.sqrt(np.clip(gap / (2.0 * eps), 0.0, 1.0)))
    Lh = np.pi - x0
    W, A, Bh = _half_nodes(eps, s, x0, n_x, breaks)
    # C - eps cos x - 1 = 2 eps sin((x-x0)/2) sin((2pi-x0-x)/2)
    hm = 2.0 * eps * np.sin(0.5 * A) * np.sin(0.5 * (Lh[:, None] + Bh))
    return _mirror(s, ws, W, A, Bh, hm, -np.cos(Bh), np.sin(Bh), eps, {"x0": x0})


def _untrapped_levels(eps, n_rho, n_x, breaks=()):
    """Untrapped levels s = s_sep - delta, delta in (0, s_sep)."""
    s_sep = (1.0 - eps) / (1.0 + eps)
    pole = s_sep - s_pole(eps)
    # 1 - gamma^2 is analytic in sqrt(s) as s -> 0
    delta, ws = _composite(s_sep, [pole] if 0 < pole < s_sep else [], n_rho, sqrt_end=True)
    s = s_sep - delta
    keep = s > 0
    delta, ws, s = delta[keep], ws[keep], s[keep]
    # C - 1 - eps = (1+eps) delta / (s + sqrt(s s_sep))
    gap = (1.0 + eps) * delta / (s + np.sqrt(s * s_sep))
    W, A, Bh = _half_nodes(eps, s, np.zeros_like(s), n_x, breaks)
    # C - eps cos x - 1 = gap + 2 eps sin^2(x/2)
    hm = gap[:, None] + 2.0 * eps * np.sin(0.5 * A) ** 2
    return _mirror(s, ws, W, A, Bh, hm, -np.cos(Bh), np.sin(Bh), eps)


def curve_integral(c: LevelCurve, integrand="inv_grad", rule=None):
    """oint f / |grad psi| over the closed trapped curve {psi = rho}.

    integrand is "inv_grad" (f = 1) or a callable f(theta, gamma); the value
    is sqrt(1-eps^2) * sum over both branches of int f dx/|gamma|.
    """
    eps = c.eps
    n_x = rule or DEFAULT_N_X
    s = np.exp(-2.0 * c.rho)
    s_sep = (1.0 - eps) / (1.0 + eps)
    lv = _trapped_levels(eps, 1, n_x, delta=s - s_sep)
    if integrand == "inv_grad":
        vals = 2.0 * lv.wx.sum(axis=1)
    else:
        up = integrand(lv.theta, lv.gamma)
        lo = integrand(lv.theta, -lv.gamma)
        if c.branch == "upper":
            lo = 0.0 * lo
        elif c.branch == "lower":
            up = 0.0 * up
        vals = ((up + lo) * lv.wx).sum(axis=1)
    return np.sqrt(1.0 - eps * eps) * vals[0]


def form_b2(p: FlowParams, t: TestFunction, n_rho=None, n_x=None) -> float:
    """Projection-energy term by nested level-curve quadrature."""
    _check(p, t)
    n_rho = n_rho or DEFAULT_N_RHO
    n_x = n_x or DEFAULT_N_X
    eps = p.epsilon
    total = 0.0
    if eps > 0.0:
        lv = _trapped_levels(eps, n_rho, n_x, breaks=t.theta_breaks)
        J0 = 2.0 * lv.wx.sum(axis=1)
        acc = np.zeros_like(J0)
        for j in range(t.m):
            th = lv.theta + TWO_PI * j
            J1 = ((t.value(th, lv.gamma) + t.value(th, -lv.gamma)) * lv.wx).sum(axis=1)
            acc += np.abs(J1 / J0) ** 2 * J0     # no overflow for tiny eps
        total += float(lv.ws @ acc)
    if t.alpha == 0.0:
        lv = _untrapped_levels(eps, n_rho, n_x, breaks=t.theta_breaks)
        J0 = t.m * lv.wx.sum(axis=1)
        acc = np.zeros_like(J0)
        for sign in (1.0, -1.0):
            J1 = np.zeros(J0.shape, dtype=complex)
            for j in range(t.m):
                th = lv.theta + TWO_PI * j
                J1 += (t.value(th, sign * lv.gamma) * lv.wx).sum(axis=1)
            acc += np.abs(J1 / J0) ** 2 * J0     # no overflow for tiny eps
        total += float(lv.ws @ acc)
    return float(np.sqrt(1.0 - eps * eps) * total)


def _trapped_weighted(eps, f, n_rho, n_x):
    """iint_{trapped cell} g' f dxdy = sqrt(1-eps^2) int sum_branches int f dx/|gamma| ds."""
    if eps == 0.0:
        return 0.0
    lv = _trapped_levels(eps, n_rho, n_x)
    J = ((f(lv.theta, lv.gamma) + f(lv.theta, -lv.gamma)) * lv.wx).sum(axis=1)
    return float(np.sqrt(1.0 - eps * eps) * (lv.ws @ J))


def form_b3(p: FlowParams, n_rho=None, n_x=None) -> float:
    """2 iint_{trapped cell} g' sin^2(theta/3) (1-gamma^2)^{1/3} dxdy."""
    f = lambda th, g: np.sin(th / 3.0) ** 2 * np.clip(1.0 - g * g, 0.0, None) ** (1.0 / 3.0)
    return 2.0 * _trapped_weighted(p.epsilon, f, n_rho or DEFAULT_N_RHO, n_x or DEFAULT_N_X)


def form_b4(p: FlowParams, n_rho=None, n_x=None) -> float:
    """iint_{trapped cell} g' cos^2(theta) (1-gamma^2) dxdy."""
    f = lambda th, g: np.cos(th) ** 2 * (1.0 - g * g)
    return _trapped_weighted(p.epsilon, f, n_rho or DEFAULT_N_RHO, n_x or DEFAULT_N_X)


def trapped_measure(p: FlowParams, n_rho=None, n_x=None) -> float:
    """iint_{trapped cell} g' dxdy (twice the (theta, gamma)-area)."""
    return _trapped_weighted(p.epsilon, lambda th, g: np.ones_like(th),
                             n_rho or DEFAULT_N_RHO, n_x or DEFAULT_N_X)


def hatA_quadform(p: FlowParams, t: TestFunction, n_rho=None, n_x=None) -> float:
    """b1 + b2; a negative value certifies an unstable direction."""
    return form_b1(p, t) + form_b2(p, t, n_rho, n_x)


def coalescence_check(p: FlowParams) -> float:
    """<A psi, psi> for TestEven(1) on the doubled period (magnetic islands)."""
    t = test_even(1)
    return hatA_quadform(t.params(p.epsilon), t)


def _eta2_inner(eps, xi):
    return (1.0 - eps) / (1.0 + eps) - (xi - eps) ** 2 / (1.0 - eps * eps)


def ellipse_nesting(eps1: float, eps2: float, n_samples: int = 2001) -> bool:
    """True iff the separatrix ellipse of eps2 sits inside that of eps1 and
    both sit inside the unit circle, by sign tests on a xi-grid.

    The ellipse (xi-eps)^2/(1-eps)^2 + eta^2 (1+eps)/(1-eps) = 1 bounds the
    image of the untrapped region, so nesting means trapped regions grow.
    """
    if not (0.0 <= eps1 < 1.0 and 0.0 <= eps2 < 1.0):
        raise OutOfRange("eps values must lie in [0, 1)")
    tol = 1e-13
    xi = np.linspace(2.0 * eps2 - 1.0, 1.0, n_samples)
    e1 = _eta2_inner(eps1, xi)
    e2 = _eta2_inner(eps2, xi)
    inside1 = np.all(_eta2_inner(eps1, np.linspace(2 * eps1 - 1, 1, n_samples))
                     <= 1.0 - np.linspace(2 * eps1 - 1, 1, n_samples) ** 2 + tol)
    inside2 = np.all(e2 <= 1.0 - xi ** 2 + tol)
    return bool(np.all(e1 >= e2 - tol) and inside1 and inside2)
