"""Kelvin-Stuart equilibrium fields and the (theta, gamma) coordinates.

All functions are vectorised: ``PointXY`` may hold scalars or numpy arrays of
matching shape.  Large |y| is handled through q = exp(-|y|) so that nothing
overflows; with q, cosh y + eps*cos x = Dn / (2q) where
Dn = 1 + q**2 + 2*eps*q*cos x.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePoint, OutOfRange

TWO_PI = 2.0 * np.pi
Q_DEGENERATE = 1e-30


@dataclass(frozen=True)
class FlowParams:
    epsilon: float
    m: int = 1
    alpha: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.epsilon < 1.0):
            raise OutOfRange(f"epsilon must lie in [0, 1), got {self.epsilon}")
        if int(self.m) != self.m or self.m < 1:
            raise OutOfRange(f"m must be a positive integer, got {self.m}")
        if not (0.0 <= self.alpha <= 0.5):
            raise OutOfRange(f"alpha must lie in [0, 1/2], got {self.alpha}")
        if self.alpha != 0.0 and self.m != 1:
            raise OutOfRange("modulational (alpha > 0) and multi-periodic (m > 1) "
                             "problems cannot be combined")

    @property
    def period(self) -> float:
        return TWO_PI * self.m


@dataclass(frozen=True)
class PointXY:
    x: object
    y: object


@dataclass(frozen=True)
class CoordsEGX:
    eta: object
    gamma: object
    xi: object
    theta: object


def _xy(pt):
    if isinstance(pt, PointXY):
        return np.asarray(pt.x, dtype=float), np.asarray(pt.y, dtype=float)
    x, y = pt
    return np.asarray(x, dtype=float), np.asarray(y, dtype=float)


def _scaled(eps, x, y):
    """Return (q, sign(y), cos x, sin x, Dn)."""
    q = np.exp(-np.abs(y))
    sgn = np.where(y < 0, -1.0, 1.0)
    c, s = np.cos(x), np.sin(x)
    dn = 1.0 + q * q + 2.0 * eps * q * c
    return q, sgn, c, s, dn


def _out(v):
    return v.item() if np.ndim(v) == 0 else v


def stream_psi(p: FlowParams, pt) -> float:
    x, y = _xy(pt)
    eps = p.epsilon
    q, _, _, _, dn = _scaled(eps, x, y)
    # ln(Dn / 2q) - ln sqrt(1-eps^2)
    return _out(np.abs(y) + np.log(0.5 * dn) - 0.5 * np.log1p(-eps * eps))


def vorticity_omega(p: FlowParams, pt) -> float:
    x, y = _xy(pt)
    eps = p.epsilon
    q, _, _, _, dn = _scaled(eps, x, y)
    return _out(-(1.0 - eps * eps) * (2.0 * q / dn) ** 2)


def gprime(p: FlowParams, pt) -> float:
    """g'(psi_eps) = 2 exp(-2 psi_eps) = -2 omega_eps."""
    return _out(-2.0 * np.asarray(vorticity_omega(p, pt)))


def velocity_u(p: FlowParams, pt):
    x, y = _xy(pt)
    eps = p.epsilon
    q, sgn, _, s, dn = _scaled(eps, x, y)
    u1 = sgn * (1.0 - q * q) / dn
    u2 = eps * s * 2.0 * q / dn
    return _out(u1), _out(u2)


def _theta_from(eta, xi):
    th = np.mod(np.arctan2(eta, xi), TWO_PI)
    return np.where(th >= TWO_PI, th - TWO_PI, th)


def coords(p: FlowParams, pt) -> CoordsEGX:
    """(eta, gamma, xi, theta) with theta in [0, 2pi) on every 2pi-cell.

    theta = atan2(eta, xi) agrees with the arccos branch rule: eta has the
    sign of sin x, so x in [0, pi] gives theta in [0, pi].
    """
    x, y = _xy(pt)
    eps = p.epsilon
    r = np.sqrt(1.0 - eps * eps)
    q, sgn, c, s, dn = _scaled(eps, x, y)
    eta = r * s * 2.0 * q / dn
    gamma = r * sgn * (1.0 - q * q) / dn
    xi = (eps * (1.0 + q * q) + 2.0 * q * c) / dn
    theta = _theta_from(eta, xi)
    return CoordsEGX(_out(eta), _out(gamma), _out(xi), _out(theta))


def cell_index(p: FlowParams, x):
    """Index of the 2pi-cell containing x, reduced mod m."""
    return np.mod(np.floor(np.asarray(x, dtype=float) / TWO_PI), p.m).astype(int)


def lifted_theta(p: FlowParams, pt):
    """theta + 2pi*cell, the angle used by 2m*pi-periodic functions."""
    x, _ = _xy(pt)
    th = np.asarray(coords(p, pt).theta)
    return _out(th + TWO_PI * cell_index(p, x))


def inverse_coords(p: FlowParams, c: CoordsEGX, cell: int = 0) -> PointXY:
    """Recover (x, y) in the requested 2pi-cell.

    tan x = sqrt(1-eps^2) eta / (xi - eps) and tanh y = a / b with
    a = sqrt(1-eps^2) gamma, b = 1 - xi*eps.  The smaller of b -/+ a is formed
    as Q / (b +/- a) with Q = (xi-eps)^2 + (1-eps^2) eta^2 = b^2 - a^2, which
    keeps large |y| accurate.  Q = 0 is the image of y = +-infinity; Q below
    1e-30 (|y| beyond about 35) is within rounding of it and is rejected too.
    """
    eps = p.epsilon
    r = np.sqrt(1.0 - eps * eps)
    theta = np.asarray(c.theta, dtype=float)
    gamma = np.asarray(c.gamma, dtype=float)
    if eps == 0.0:
        if np.any(np.abs(gamma) >= 1.0):
            raise DegeneratePoint("|gamma| = 1 is y = +-infinity in the shear case")
        x = np.mod(theta, TWO_PI) + TWO_PI * cell
        return PointXY(_out(x), _out(np.arctanh(gamma)))
    rho = np.sqrt(np.clip(1.0 - gamma * gamma, 0.0, None))
    eta = rho * np.sin(theta)
    xi = rho * np.cos(theta)
    Q = (xi - eps) ** 2 + (1.0 - eps * eps) * eta ** 2
    if np.any(Q <= Q_DEGENERATE):
        raise DegeneratePoint("point is the image of y = +-infinity")
    x = np.mod(np.arctan2(r * eta, xi - eps), TWO_PI)
    x = np.where(x >= TWO_PI, x - TWO_PI, x) + TWO_PI * cell
    a = r * gamma
    b = 1.0 - xi * eps
    big = b + np.abs(a)
    small = Q / big
    y = 0.5 * np.sign(a) * np.log(big / small)
    return PointXY(_out(x), _out(y))


def jacobian(p: FlowParams, pt) -> float:
    """d(theta, gamma)/d(x, y) = g'(psi_eps)/2 = -omega_eps."""
    return _out(-np.asarray(vorticity_omega(p, pt)))


def coord_derivatives(p: FlowParams, pt):
    """Closed-form first partials and Laplacians of theta and gamma.

    Returns a dict with keys gx, gy, tx, ty, lap_gamma, lap_theta.  The
    Laplacians are obtained by differentiating the partials directly (not via
    the Liouville identities) so they can serve as an independent check.
    """
    x, y = _xy(pt)
    eps = p.epsilon
    r = np.sqrt(1.0 - eps * eps)
    q, sgn, c, s, dn = _scaled(eps, x, y)
    inv_d = 2.0 * q / dn
    eta = r * s * inv_d
    gamma = r * sgn * (1.0 - q * q) / dn
    xi = (eps * (1.0 + q * q) + 2.0 * q * c) / dn
    gx = eps * gamma * eta / r
    gy = (1.0 - xi * eps - gamma * gamma) / r
    w = 1.0 - gamma * gamma
    tx = gy / w
    ty = -gx / w
    # partials of eta and xi
    cosh_d = (1.0 + q * q) / dn
    sinh_d = sgn * (1.0 - q * q) / dn
    eta_x = r * (c * cosh_d + eps * inv_d) * inv_d
    eta_y = -r * s * sinh_d * inv_d
    xi_x = -(1.0 - eps * eps) * s * cosh_d * inv_d
    xi_y = -(1.0 - eps * eps) * c * sinh_d * inv_d
    gxx = eps * (gx * eta + gamma * eta_x) / r
    gyy = (-eps * xi_y - 2.0 * gamma * gy) / r
    gxy = eps * (gy * eta + gamma * eta_y) / r
    gyx = (-eps * xi_x - 2.0 * gamma * gx) / r
    lap_gamma = gxx + gyy
    # theta_x = gy / w, theta_y = -gx / w
    txx = (gyx * w + 2.0 * gamma * gx * gy) / w ** 2
    tyy = (-gxy * w - 2.0 * gamma * gy * gx) / w ** 2
    return {"gx": _out(gx), "gy": _out(gy), "tx": _out(tx), "ty": _out(ty),
            "lap_gamma": _out(lap_gamma), "lap_theta": _out(txx + tyy)}


def rho0(p: FlowParams) -> float:
    eps = p.epsilon
    if eps == 0.0:
        return 0.0
    return 0.5 * (np.log1p(eps) - np.log1p(-eps))


def level_turning_point(p: FlowParams, rho: float) -> float:
    """x0 in (0, pi) with psi_eps(x0, 0) = rho on a trapped level."""
    eps = p.epsilon
    r0 = rho0(p)
    if eps == 0.0 or not (-r0 < rho < r0):
        raise OutOfRange(f"rho={rho} is not a trapped level (|rho| < {r0})")
    val = (np.sqrt(1.0 - eps * eps) * np.exp(rho) - 1.0) / eps
    return float(np.arccos(np.clip(val, -1.0, 1.0)))
