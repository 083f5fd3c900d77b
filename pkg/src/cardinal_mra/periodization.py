"""Lattice sums of symbols and the symbols built from them.

For a symbol s and reduced frequency xi in [-pi, pi]^n,

    P_p(xi)      = sum_j s(xi - 2 pi j)^p                  (p = 1, 2)
    fundamental  = s(xi) / P_1(xi)
    scaling      = s(xi) / sqrt(P_2(xi))
    riesz ratio  = P_1(xi) / sqrt(P_2(xi))

Sums run over max-norm shells from the outside in, with compensated
accumulation, and are kept relative to the j = 0 term so that nothing
underflows. Truncation is certified: 1-D polyharmonic sums get an
Euler-Maclaurin (Hurwitz zeta) tail whose remainder is bounded by the first
omitted term; every other sum is cut where the shell envelope from
:mod:`families` drops below tolerance.
"""

from __future__ import annotations

import contextlib
import contextvars
import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from ._numerics import TWO_PI, map_blocks, neumaier_add, reduce_mod_2pi, shell
from .errors import DomainError, ToleranceUnreachable
from .families import (
    M_BOUND_SAFETY,
    CardinalInterpolator,
    FamilyPath,
    Polyharmonic,
    log_shell_envelope,
    log_symbol_points,
    m_bound,
)

START_RADIUS = 8
RADIUS_CAP_1D = 10**6
RADIUS_CAP_ND = 10**3
_RADIUS_CAP = contextvars.ContextVar("radius_cap", default=None)
KINDS = ("raw-symbol", "fundamental", "scaling", "riesz-ratio")

# B_2 .. B_12, then B_14 for the remainder
_BERNOULLI = (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730)
_BERNOULLI_NEXT = 7 / 6


@dataclass(frozen=True)
class PeriodizedValue:
    value: float
    tail_bound: float
    truncation_radius: float
    terms_used: int
    log_value: float

    @property
    def singular(self) -> bool:
        return self.value == math.inf


def _rising(q, m):
    out = 1.0
    for i in range(m):
        out *= q + i
    return out


def hurwitz_tail(q: float, a: np.ndarray):
    """sum_{i>=0} (a + i)^-q by Euler-Maclaurin, with a remainder bound.

    Valid for q > 1 and a > 0; the remainder of this completely monotone sum is
    no larger than the first omitted correction term.
    """
    a = np.asarray(a, dtype=float)
    val = a ** (1.0 - q) / (q - 1.0) + 0.5 * a ** (-q)
    fact = 1.0
    for i, b in enumerate(_BERNOULLI, start=1):
        fact *= (2 * i - 1) * (2 * i)
        val = val + b / fact * _rising(q, 2 * i - 1) * a ** (-q - 2 * i + 1)
    p = len(_BERNOULLI) + 1
    fact *= (2 * p - 1) * (2 * p)
    rem = abs(_BERNOULLI_NEXT) / fact * _rising(q, 2 * p - 1) * a ** (-q - 2 * p + 1)
    return val, rem


def lattice_log_sum(phi: CardinalInterpolator, pts: np.ndarray, power: int,
                    spacing: float, radius: int):
    """Truncated lattice sum at fixed radius.

    ``pts`` (N, n) must already lie in the cell [-spacing/2, spacing/2]^n and
    avoid the origin for singular families. Returns ``(log_sum, rel_bound)``
    where ``rel_bound`` bounds |truncation error| / sum.
    """
    n = phi.n
    ref = power * log_symbol_points(phi, pts)
    total = np.zeros(len(pts))
    comp = np.zeros(len(pts))

    em = isinstance(phi, Polyharmonic) and n == 1
    if em:
        q = 2.0 * phi.k * power
        u = pts[:, 0] / spacing
        v1, r1 = hurwitz_tail(q, radius + 1.0 - u)
        v2, r2 = hurwitz_tail(q, radius + 1.0 + u)
        scale = np.abs(u) ** q
        total += scale * (v1 + v2)
        abs_bound = scale * (r1 + r2)
    else:
        log_env = log_shell_envelope(phi, radius + 1, spacing, power)

    for m in range(radius, 0, -1):
        offs = spacing * shell(n, m).astype(float)
        diff = pts[:, None, :] - offs[None, :, :]
        logs = power * log_symbol_points(phi, diff.reshape(-1, n)).reshape(len(pts), -1)
        neumaier_add(total, comp, np.exp(logs - ref[:, None]).sum(axis=1))
    # everything beyond the j = 0 term, kept apart so log1p preserves it
    off = total + comp
    if em:
        rel = abs_bound / (1.0 + off)
    else:
        rel = np.exp(log_env - ref) / (1.0 + off)
    return ref + np.log1p(off), rel


def radius_cap(n: int) -> int:
    """Largest per-axis truncation radius allowed in dimension n."""
    default = RADIUS_CAP_1D if n == 1 else RADIUS_CAP_ND
    override = _RADIUS_CAP.get()
    return default if override is None else min(default, override)


@contextlib.contextmanager
def limit_radius(cap: int):
    """Temporarily lower the truncation-radius cap (it can never be raised)."""
    if int(cap) < START_RADIUS:
        raise DomainError(f"radius cap must be at least {START_RADIUS}")
    token = _RADIUS_CAP.set(int(cap))
    try:
        yield
    finally:
        _RADIUS_CAP.reset(token)


def _periodize_reduced(phi, pts, power, rel_tol, spacing=TWO_PI, start=START_RADIUS):
    """Adaptive lattice sum at reduced points; returns (log_sum, rel_bound, radius).

    Each point picks its own radius, so results do not depend on how points
    are batched. Singular points (origin of a singular family) give +inf.
    """
    n = phi.n
    cap = radius_cap(n)
    N = len(pts)
    out = np.full(N, np.inf)
    rel = np.zeros(N)
    rad = np.zeros(N, dtype=np.int64)
    if phi.origin_singular:
        pending = np.any(pts != 0.0, axis=1)
    else:
        pending = np.ones(N, dtype=bool)
    J = start
    while pending.any():
        if J > cap:
            raise ToleranceUnreachable(
                f"{phi.label()}: lattice sum needs radius > {cap} for rel_tol={rel_tol:g}"
            )
        idx = np.flatnonzero(pending)
        lv, rb = lattice_log_sum(phi, pts[idx], power, spacing, J)
        ok = rb <= rel_tol
        out[idx[ok]] = lv[ok]
        rel[idx[ok]] = rb[ok]
        rad[idx[ok]] = J
        pending[idx[ok]] = False
        J *= 2
    return out, rel, rad


def _check_tol(rel_tol):
    if not 1e-14 <= rel_tol <= 1e-6:
        raise DomainError(f"rel_tol must lie in [1e-14, 1e-6], got {rel_tol}")


def _point(phi, xi):
    v = np.atleast_1d(np.asarray(xi, dtype=float)).reshape(-1)
    if v.size != phi.n:
        raise DomainError(f"frequency vector must have length {phi.n}")
    if not np.all(np.isfinite(v)):
        raise DomainError("frequency must be finite")
    return v


def periodize(phi: CardinalInterpolator, xi, p: int = 1, rel_tol: float = 1e-12) -> PeriodizedValue:
    """Certified sum over j of s(xi - 2 pi j)^p; xi is reduced modulo 2 pi first."""
    if p not in (1, 2):
        raise DomainError("power must be 1 or 2")
    _check_tol(rel_tol)
    red = reduce_mod_2pi(_point(phi, xi))[None, :]
    lv, rel, rad = _periodize_reduced(phi, red, p, rel_tol)
    J = int(rad[0])
    if lv[0] == math.inf:
        return PeriodizedValue(math.inf, 0.0, 0.0, 1, math.inf)
    value = math.exp(lv[0])
    return PeriodizedValue(value, float(rel[0]) * value, TWO_PI * J, (2 * J + 1) ** phi.n,
                           float(lv[0]))


# --- derived symbols on point arrays ----------------------------------------

def _lattice_origin(red, phi):
    if not phi.origin_singular:
        return np.zeros(len(red), dtype=bool)
    return np.all(red == 0.0, axis=1)


def symbol_values(phi: CardinalInterpolator, pts, kind: str, rel_tol: float = 1e-12,
                  workers: int | None = None) -> np.ndarray:
    """Evaluate one of the derived symbols at each row of ``pts`` (any xi in R^n).

    ``kind`` is one of ``KINDS`` or ``"basis-factor"`` (the reciprocal Riesz
    ratio Q with L = Q Phi). At lattice points of a singular family the
    continuity extension is used: fundamental and scaling are 1 at the origin
    and 0 at the other lattice points, the Riesz ratio and Q are 1.
    """
    if kind not in KINDS and kind != "basis-factor":
        raise DomainError(f"unknown symbol kind {kind!r}")
    _check_tol(rel_tol)
    pts = np.asarray(pts, dtype=float).reshape(-1, phi.n)

    def block(rows):
        if kind == "raw-symbol":
            with np.errstate(over="ignore"):
                return np.exp(log_symbol_points(phi, rows))
        red = reduce_mod_2pi(rows)
        at_lattice = _lattice_origin(red, phi)
        origin = at_lattice & np.all(rows == 0.0, axis=1)
        out = np.empty(len(rows))
        live = ~at_lattice
        r = red[live]
        if kind == "fundamental":
            lp, _, _ = _periodize_reduced(phi, r, 1, rel_tol)
            out[live] = np.exp(log_symbol_points(phi, rows[live]) - lp)
            out[at_lattice] = np.where(origin[at_lattice], 1.0, 0.0)
        elif kind == "scaling":
            lp2, _, _ = _periodize_reduced(phi, r, 2, rel_tol)
            out[live] = np.exp(log_symbol_points(phi, rows[live]) - 0.5 * lp2)
            out[at_lattice] = np.where(origin[at_lattice], 1.0, 0.0)
        else:
            lp1, _, _ = _periodize_reduced(phi, r, 1, rel_tol)
            lp2, _, _ = _periodize_reduced(phi, r, 2, rel_tol)
            lr = lp1 - 0.5 * lp2
            out[live] = np.exp(lr if kind == "riesz-ratio" else -lr)
            out[at_lattice] = 1.0
        return out

    return map_blocks(block, pts, workers)


def _single(phi, xi, kind, rel_tol):
    return float(symbol_values(phi, _point(phi, xi)[None, :], kind, rel_tol)[0])


def fundamental_symbol(phi: CardinalInterpolator, xi, rel_tol: float = 1e-12) -> float:
    """Fourier transform of the fundamental interpolant, in [0, 1]."""
    return _single(phi, xi, "fundamental", rel_tol)


def scaling_symbol(phi: CardinalInterpolator, xi, rel_tol: float = 1e-12) -> float:
    """Fourier transform of the orthonormal scaling function, in [0, 1]."""
    return _single(phi, xi, "scaling", rel_tol)


def riesz_ratio(phi: CardinalInterpolator, xi, rel_tol: float = 1e-12) -> float:
    """P_1(xi) / sqrt(P_2(xi)), which is >= 1."""
    return _single(phi, xi, "riesz-ratio", rel_tol)


def riesz_upper_constant(path, J: int = 25) -> float:
    """1 + sum of the uniform ratio bounds M_j, plus a certified tail beyond ||j|| = J.

    ``path`` may be a :class:`FamilyPath` or a single instance.
    """
    if J < 25:
        raise DomainError("riesz_upper_constant needs J >= 25")
    phi = path.members()[0] if isinstance(path, FamilyPath) else path
    n = phi.n
    total = 0.0
    for m in range(1, J + 1):
        total += math.fsum(m_bound(path, j) for j in shell(n, m))
    return 1.0 + total + m_sum_tail(phi, J)


def m_sum_tail(phi: CardinalInterpolator, J: int) -> float:
    """Bound on sum_{||j||_inf > J} M_j.

    Each M_j is at most s(2 pi ||j|| - pi) / min_cube s, and the shell envelope
    sums exactly those numerators.
    """
    log_delta = float(phi.log_radial(np.array([math.pi * math.sqrt(phi.n)]))[0])
    return M_BOUND_SAFETY * math.exp(log_shell_envelope(phi, J + 1) - log_delta)


# --- tabulation ------------------------------------------------------------

@dataclass
class SymbolGrid:
    n: int
    N: int
    bandlimit: float
    values: np.ndarray
    kind: str
    family: dict

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown grid kind {self.kind!r}")
        v = self.values
        if v.size != self.N ** self.n:
            raise DomainError("grid value count does not match N^n")
        finite = np.isfinite(v)
        if self.kind != "raw-symbol" and not finite.all():
            raise DomainError("grid values must be finite")
        if self.kind == "fundamental" and (v.min() < 0.0 or v.max() > 1.0):
            raise DomainError("fundamental symbol left [0, 1]")
        if self.kind == "riesz-ratio" and v.min() < 1.0 - 1e-12:
            raise DomainError("Riesz ratio fell below 1")

    def axis(self) -> np.ndarray:
        return -self.bandlimit + 2.0 * self.bandlimit * np.arange(self.N) / self.N

    def points(self) -> np.ndarray:
        ax = self.axis()
        grids = np.meshgrid(*([ax] * self.n), indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"xi_{i + 1}" for i in range(self.n)] + ["value"])
        for row, val in zip(self.points(), self.values.ravel()):
            w.writerow([repr(float(x)) for x in row] + [repr(float(val))])
        return buf.getvalue()

    def header(self) -> dict:
        return {"schema": 1, "type": "SymbolGrid", "kind": self.kind, "family": self.family,
                "n": self.n, "N": self.N, "bandlimit": self.bandlimit}

    def to_json(self) -> str:
        return json.dumps({**self.header(), "payload": self.to_csv()})


def sample_grid(phi: CardinalInterpolator, kind: str, bandlimit: float, N: int,
                rel_tol: float = 1e-12, workers: int | None = None) -> SymbolGrid:
    """Tabulate a symbol at xi_m = -bandlimit + 2 bandlimit m / N along each axis."""
    if N < 2 or N & (N - 1):
        raise DomainError("N must be a power of two")
    ratio = bandlimit / math.pi
    if not bandlimit > 0 or abs(ratio - round(ratio)) > 1e-9:
        raise DomainError("bandlimit must be a positive multiple of pi")
    grid = SymbolGrid(phi.n, N, float(bandlimit), np.zeros(N ** phi.n), "raw-symbol", phi.to_dict())
    vals = symbol_values(phi, grid.points(), kind, rel_tol, workers)
    return SymbolGrid(phi.n, N, float(bandlimit), vals, kind, phi.to_dict())
