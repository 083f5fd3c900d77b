"""Interpolator families and their normalized Fourier symbols.

Every symbol here is radial and strictly decreasing in the radius, and all
positive multiplicative constants are dropped: the fundamental and scaling
symbols are ratios in which those constants cancel.

    polyharmonic         s(r) = r^(-2k)
    generalized MQ       s(r) = r^(-alpha - n/2) K_{alpha + n/2}(c r)
    Gaussian             s(r) = exp(-alpha r^2)
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from ._numerics import TWO_PI, cube_grid, shell_count
from .errors import DomainError
from .specfun import NU_MAX, bessel_k_log

M_BOUND_SAFETY = 1.01
M_BOUND_GRID = 4097


def _check_dim(n):
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= 3:
        raise DomainError(f"dimension must be 1, 2 or 3, got {n!r}")


@dataclass(frozen=True)
class CardinalInterpolator:
    """Base descriptor; use one of the concrete variants."""

    n: int

    family = "abstract"
    origin_singular = False

    def log_radial(self, r: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def log_step_ratio(self, r: float, d: float) -> float:
        """Upper bound for log(s(r') / s(r'')) whenever r'' >= r and r' >= r'' + d."""
        raise NotImplementedError

    @property
    def parameter(self) -> float:
        raise NotImplementedError

    def with_parameter(self, axis: str, value) -> "CardinalInterpolator":
        raise DomainError(f"{self.family} has no parameter axis {axis!r}")

    def to_dict(self) -> dict:
        raise NotImplementedError

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def label(self) -> str:
        parts = [f"{k}={v}" for k, v in self.to_dict().items() if k != "family"]
        return f"{self.family}({', '.join(parts)})"


@dataclass(frozen=True)
class Polyharmonic(CardinalInterpolator):
    k: int = 1

    family = "polyharmonic"
    origin_singular = True

    def __post_init__(self):
        _check_dim(self.n)
        if not isinstance(self.k, (int, np.integer)) or self.k < 1:
            raise DomainError(f"polyharmonic order k must be a positive integer, got {self.k!r}")
        if 2 * self.k <= self.n:
            raise DomainError(f"polyharmonic needs 2k > n (k={self.k}, n={self.n})")

    def log_radial(self, r):
        with np.errstate(divide="ignore"):
            return -2.0 * self.k * np.log(r)

    def log_step_ratio(self, r, d):
        return -2.0 * self.k * math.log1p(d / r)

    @property
    def parameter(self):
        return self.k

    def with_parameter(self, axis, value):
        if axis != "polyharmonic-order":
            return super().with_parameter(axis, value)
        return replace(self, k=int(value))

    def to_dict(self):
        return {"family": "polyharmonic", "n": self.n, "k": int(self.k)}


@dataclass(frozen=True)
class GeneralizedMultiquadric(CardinalInterpolator):
    alpha: float = 0.5
    c: float = 1.0

    family = "gmq"
    origin_singular = True

    def __post_init__(self):
        _check_dim(self.n)
        a = float(self.alpha)
        if not a >= 0.5:
            raise DomainError(f"multiquadric order must be >= 1/2, got {a}")
        if abs(a - round(a)) < 1e-12:
            raise DomainError(f"multiquadric order must not be an integer, got {a}")
        if a + self.n / 2 > NU_MAX:
            raise DomainError(f"alpha + n/2 must not exceed {NU_MAX:g}")
        if not float(self.c) > 0.0:
            raise DomainError(f"shape parameter c must be positive, got {self.c}")

    @property
    def bessel_order(self) -> float:
        return float(self.alpha) + self.n / 2.0

    def log_radial(self, r):
        r = np.asarray(r, dtype=float)
        out = np.full(r.shape, np.inf)
        pos = r > 0
        if pos.any():
            nu = self.bessel_order
            rp = r[pos]
            out[pos] = -nu * np.log(rp) + bessel_k_log(nu, self.c * rp)
        return out

    def log_step_ratio(self, r, d):
        # K_nu is log-convex in x, so K(x + cd)/K(x) <= exp(-cd); r^-nu only helps.
        return -self.c * d

    @property
    def parameter(self):
        return self.alpha

    def with_parameter(self, axis, value):
        if axis == "multiquadric-order":
            return replace(self, alpha=float(value))
        if axis == "multiquadric-shape":
            return replace(self, c=float(value))
        return super().with_parameter(axis, value)

    def to_dict(self):
        return {"family": "gmq", "n": self.n, "alpha": float(self.alpha), "c": float(self.c)}


@dataclass(frozen=True)
class Gaussian(CardinalInterpolator):
    alpha: float = 1.0

    family = "gaussian"
    origin_singular = False

    def __post_init__(self):
        _check_dim(self.n)
        if not float(self.alpha) >= 1.0:
            raise DomainError(f"Gaussian family needs alpha >= 1, got {self.alpha}")

    def log_radial(self, r):
        r = np.asarray(r, dtype=float)
        return -float(self.alpha) * r * r

    def log_step_ratio(self, r, d):
        return -float(self.alpha) * (2.0 * r * d + d * d)

    @property
    def parameter(self):
        return self.alpha

    def with_parameter(self, axis, value):
        if axis != "gaussian":
            return super().with_parameter(axis, value)
        return replace(self, alpha=float(value))

    def to_dict(self):
        return {"family": "gaussian", "n": self.n, "alpha": float(self.alpha)}


def from_dict(d: dict) -> CardinalInterpolator:
    fam = d.get("family")
    n = int(d.get("n", 1))
    if fam == "polyharmonic":
        return Polyharmonic(n=n, k=int(d["k"]))
    if fam == "gmq":
        return GeneralizedMultiquadric(n=n, alpha=float(d["alpha"]), c=float(d["c"]))
    if fam == "gaussian":
        return Gaussian(n=n, alpha=float(d["alpha"]))
    raise DomainError(f"unknown family {fam!r}")


def from_json(text: str) -> CardinalInterpolator:
    return from_dict(json.loads(text))


AXES = ("multiquadric-order", "multiquadric-shape", "polyharmonic-order", "gaussian")


@dataclass(frozen=True)
class FamilyPath:
    """A finite, increasing sample of a one-parameter family."""

    base: CardinalInterpolator
    axis: str
    values: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.axis not in AXES:
            raise DomainError(f"unknown parameter axis {self.axis!r}")
        vals = tuple(self.values)
        object.__setattr__(self, "values", vals)
        if len(vals) < 2:
            raise DomainError("a family path needs at least two parameter values")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise DomainError("path parameter values must be strictly increasing")
        self.members()  # validates every instance

    @property
    def n(self):
        return self.base.n

    def members(self) -> list[CardinalInterpolator]:
        return [self.base.with_parameter(self.axis, v) for v in self.values]

    def to_dict(self):
        return {"base": self.base.to_dict(), "axis": self.axis, "values": list(self.values)}


# --- symbol evaluation -----------------------------------------------------

def _as_points(xi, n):
    pts = np.atleast_1d(np.asarray(xi, dtype=float))
    if pts.ndim == 1:
        pts = pts.reshape(1, -1)
    if pts.ndim != 2 or pts.shape[1] != n:
        raise DomainError(f"frequency vectors must have length {n}")
    return pts


def _norm(pts):
    return np.sqrt(np.sum(pts * pts, axis=-1)) if pts.shape[-1] > 1 else np.abs(pts[..., 0])


def log_symbol_points(phi: CardinalInterpolator, pts: np.ndarray) -> np.ndarray:
    """log s_phi at each row of a (N, n) array; +inf at the origin for singular families."""
    return phi.log_radial(_norm(np.asarray(pts, dtype=float)))


def symbol(phi: CardinalInterpolator, xi) -> float:
    """Normalized symbol s_phi(xi); ``math.inf`` marks the singular origin."""
    pts = _as_points(xi, phi.n)
    if pts.shape[0] != 1:
        raise DomainError("symbol takes a single frequency vector")
    if not np.all(np.isfinite(pts)):
        raise DomainError("frequency must be finite")
    lv = float(log_symbol_points(phi, pts)[0])
    if lv == math.inf:
        return math.inf
    return math.exp(lv)


def log_symbol(phi: CardinalInterpolator, xi) -> float:
    pts = _as_points(xi, phi.n)
    if pts.shape[0] != 1:
        raise DomainError("log_symbol takes a single frequency vector")
    lv = float(log_symbol_points(phi, pts)[0])
    if lv == math.inf:
        raise DomainError(f"{phi.family} symbol is singular at the origin")
    return lv


def m_ratio(phi: CardinalInterpolator, j, xi) -> float:
    """s(xi + 2 pi j) / s(xi), computed in the log domain."""
    jv = np.asarray(j, dtype=float).reshape(-1)
    xv = np.asarray(xi, dtype=float).reshape(-1)
    if jv.size != phi.n or xv.size != phi.n:
        raise DomainError("j and xi must have length n")
    if not np.any(jv != 0):
        raise DomainError("j must be a nonzero lattice vector")
    if np.any(np.abs(xv) > math.pi):
        raise DomainError("xi must lie in [-pi, pi]^n")
    return float(_m_ratio_array(phi, jv, xv[None, :])[0])


def _m_ratio_array(phi, j, pts):
    num = log_symbol_points(phi, pts + TWO_PI * np.asarray(j, dtype=float))
    den = log_symbol_points(phi, pts)
    with np.errstate(invalid="ignore"):
        out = np.exp(num - den)
    return np.where(np.isinf(den), 0.0, out)


def _grid_sup(phi, j, points_per_axis):
    """Grid supremum of m_ratio over the cube, refined around the maximiser."""
    n = phi.n
    pts = cube_grid(n, points_per_axis)
    vals = _m_ratio_array(phi, j, pts)
    best = int(np.argmax(vals))
    sup = float(vals[best])
    if n == 1:
        return sup
    h = 2.0 * math.pi / (points_per_axis - 1)
    local = cube_grid(n, 33, half=h) + pts[best]
    local = np.clip(local, -math.pi, math.pi)
    return max(sup, float(np.max(_m_ratio_array(phi, j, local))))


def _box_bound(phi, j):
    """Rigorous bound s(min |xi + 2 pi j|) / s(max |xi|) over the cube."""
    n = phi.n
    a = np.maximum(np.abs(np.asarray(j, dtype=float)) * TWO_PI - math.pi, 0.0)
    near = float(np.sqrt(np.sum(a * a)))
    far = math.pi * math.sqrt(n)
    lv = phi.log_radial(np.array([near, far]))
    return math.exp(lv[0] - lv[1])


def m_bound(phi, j) -> float:
    """Uniform bound M_j for m_ratio over xi in the cube (and over a path).

    For a path the smallest parameter is used; the ratios decrease along every
    path this package builds.
    """
    if isinstance(phi, FamilyPath):
        phi = phi.members()[0]
    jv = np.asarray(j, dtype=np.int64).reshape(-1)
    if jv.size != phi.n or not np.any(jv != 0):
        raise DomainError("j must be a nonzero lattice vector of length n")
    return _m_bound_cached(phi, tuple(int(v) for v in jv))


_M_BOUND_CACHE: dict = {}


def _m_bound_cached(phi, j):
    key = (phi, j)
    hit = _M_BOUND_CACHE.get(key)
    if hit is not None:
        return hit
    n = phi.n
    if isinstance(phi, Polyharmonic) and n == 1:
        # exact supremum, nudged up so it still bounds rounded ratio evaluations
        val = float((2 * abs(j[0]) - 1) ** (-2 * phi.k)) * (1.0 + 1e-13)
    elif n == 1:
        val = M_BOUND_SAFETY * _grid_sup(phi, j, M_BOUND_GRID)
    elif max(abs(v) for v in j) <= 2:
        val = min(M_BOUND_SAFETY * _grid_sup(phi, j, 129), _box_bound(phi, j))
    else:
        val = _box_bound(phi, j)
    if len(_M_BOUND_CACHE) > 100000:
        _M_BOUND_CACHE.clear()
    _M_BOUND_CACHE[key] = val
    return val


# --- tail envelopes ----------------------------------------------------------

def log_shell_envelope(phi: CardinalInterpolator, first_shell: int, spacing: float = TWO_PI,
                       power: int = 1, explicit: int = 8) -> float:
    """log of a bound on sum_{||j||_inf >= first_shell} s^power(xi - spacing*j).

    Uniform over xi in the cell [-spacing/2, spacing/2]^n. Shell m contributes at
    most N_m s(spacing*m - spacing/2)^power because every point of that shell
    lies at Euclidean distance >= spacing*(m - 1/2) from the cell. The first
    ``explicit`` shells are summed directly; the rest is bounded by an integral
    (polyharmonic) or a geometric series (exponentially decaying symbols).
    """
    n = phi.n
    m0 = int(first_shell)
    if m0 < 1:
        raise DomainError("tail must start at shell >= 1")
    ms = np.arange(m0, m0 + explicit)
    radii = spacing * (ms - 0.5)
    logs = power * phi.log_radial(radii)
    counts = np.array([shell_count(n, int(m)) for m in ms], dtype=float)
    parts = list(logs + np.log(counts))

    m1 = m0 + explicit - 1  # last explicit shell
    if isinstance(phi, Polyharmonic):
        grow = ((2.0 * m1 + 3.0) / (2.0 * m1 + 1.0)) ** (n - 1)
        p = 2 * phi.k * power - n + 1
        # N_m <= 2n (2m+1)^(n-1) <= 2n grow (2m-1)^(n-1) for m > m1
        # term <= 2n grow (spacing/2)^(-2k power) (2m-1)^(-p); sum_{m>m1} <= int_{m1}^inf
        lead = math.log(2 * n * grow) - 2 * phi.k * power * math.log(spacing / 2.0)
        parts.append(lead - (p - 1) * math.log(2 * m1 - 1) - math.log(2 * (p - 1)))
    else:
        r_last = spacing * (m1 - 0.5)
        # N_{m+1}/N_m decreases in m, so its value at m1 bounds every later ratio
        grow = shell_count(n, m1 + 1) / shell_count(n, m1)
        log_q = math.log(grow) + power * phi.log_step_ratio(r_last, spacing)
        if log_q >= 0.0:
            raise DomainError("envelope ratio does not decay at this radius")
        parts.append(parts[-1] + log_q - math.log(-math.expm1(log_q)))
    parts = np.array(parts)
    top = parts.max()
    return float(top + np.log(np.sum(np.exp(parts - top))))


def decay_envelope(phi: CardinalInterpolator, R: float, power: int = 1) -> float:
    """Bound on sum over ||2 pi j||_inf > R of s^power(xi - 2 pi j), uniform in xi."""
    if not R >= 4.0 * math.pi:
        raise DomainError("decay_envelope needs R >= 4 pi to clear the singular cell")
    first = int(math.floor(R / TWO_PI)) + 1
    return math.exp(log_shell_envelope(phi, first, TWO_PI, power))
