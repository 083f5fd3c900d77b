"""Spatial realization of the fundamental and scaling functions.

Samples at x in (1/M) Z^n only see the spectrum folded modulo 2 pi M, so

    L(x) = (2 pi)^-n int_{cell} F(xi) e^{i<x, xi>} d xi,
    F(xi) = sum_l Lhat(xi + 2 pi M l) = [sum_l s(xi + 2 pi M l)] / P_1(xi),

using the 2 pi periodicity of P_1 (P_2 and a square root for the scaling
function). The fold is an ordinary lattice sum with spacing 2 pi M: copies
inside the bandlimit are summed explicitly and the rest is either added
through the Euler-Maclaurin tail (1-D polyharmonic) or bounded by the shell
envelope. The cell integral is a periodic trapezoid with step 2 pi / P for a
spatial period P >= 4T, evaluated by one FFT.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from ._numerics import TWO_PI, map_blocks, reduce_mod_2pi
from .errors import DomainError, ToleranceUnreachable
from .families import CardinalInterpolator, log_shell_envelope, log_symbol_points
from .periodization import _periodize_reduced, lattice_log_sum, symbol_values

MAX_BANDLIMIT = 2.0**16 * math.pi
WHICH = ("fundamental", "scaling")


@dataclass
class SampledFunction:
    """Samples on the grid (1/M) Z^n intersected with [-T, T]^n."""

    n: int
    samples_per_unit: int
    halfwidth: int
    values: np.ndarray
    synthesis_error_bound: float
    which: str = "fundamental"
    family: dict = field(default_factory=dict)
    bandlimit: float = 0.0

    def __post_init__(self):
        side = 2 * self.halfwidth * self.samples_per_unit + 1
        if self.values.shape != (side,) * self.n:
            raise DomainError(f"expected {side}^{self.n} samples, got shape {self.values.shape}")
        if not np.all(np.isfinite(self.values)):
            raise DomainError("sampled values must be finite")

    def axis(self) -> np.ndarray:
        M, T = self.samples_per_unit, self.halfwidth
        return np.arange(-T * M, T * M + 1) / M

    def index(self, x) -> tuple:
        """Array index of an on-grid point; raises for off-grid or out-of-range points."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if x.size != self.n:
            raise DomainError(f"point must have {self.n} coordinates")
        scaled = x * self.samples_per_unit
        q = np.round(scaled)
        if np.any(np.abs(scaled - q) > 1e-9):
            raise DomainError(f"point {x.tolist()} is not on the 1/{self.samples_per_unit} grid")
        q = q.astype(np.int64)
        lim = self.halfwidth * self.samples_per_unit
        if np.any(np.abs(q) > lim):
            raise DomainError(f"point {x.tolist()} lies outside [-{self.halfwidth}, {self.halfwidth}]")
        return tuple(int(v) + lim for v in q)

    def __call__(self, x) -> float:
        return float(self.values[self.index(x)])

    def metadata(self) -> dict:
        return {
            "schema": 1,
            "type": "SampledFunction",
            "which": self.which,
            "family": self.family,
            "n": self.n,
            "samples_per_unit": self.samples_per_unit,
            "halfwidth": self.halfwidth,
            "bandlimit": self.bandlimit,
            "synthesis_error_bound": self.synthesis_error_bound,
        }

    def to_csv(self) -> str:
        ax = self.axis()
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"x_{i + 1}" for i in range(self.n)] + ["value"])
        for idx in np.ndindex(*self.values.shape):
            w.writerow([repr(float(ax[i])) for i in idx] + [repr(float(self.values[idx]))])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({**self.metadata(), "payload": self.to_csv()})


@dataclass
class CoefficientSequence:
    """Finitely supported real sequence on Z^n; zero entries are not stored."""

    coeffs: dict
    n: int = 1
    dropped_mass: float = 0.0

    def __post_init__(self):
        clean = {}
        for key, val in self.coeffs.items():
            key = (int(key),) if np.ndim(key) == 0 else tuple(int(v) for v in key)
            if len(key) != self.n:
                raise DomainError(f"lattice index {key} does not have {self.n} coordinates")
            val = float(val)
            if val != 0.0:
                clean[key] = val
        self.coeffs = dict(sorted(clean.items()))

    @classmethod
    def delta(cls, n: int = 1) -> "CoefficientSequence":
        return cls({(0,) * n: 1.0}, n)

    @property
    def support(self) -> list:
        return list(self.coeffs)

    def diameter(self) -> int:
        if not self.coeffs:
            return 0
        arr = np.array(self.support)
        return int((arr.max(axis=0) - arr.min(axis=0)).max())

    def get(self, j) -> float:
        key = (int(j),) if np.ndim(j) == 0 else tuple(int(v) for v in j)
        return self.coeffs.get(key, 0.0)

    def to_dict(self) -> dict:
        return {"n": self.n, "dropped_mass": self.dropped_mass,
                "entries": [[list(k), v] for k, v in self.coeffs.items()]}


@dataclass
class GramMatrix:
    shifts: list
    entries: np.ndarray
    quadrature_error_bound: float

    def __post_init__(self):
        e = self.entries
        if e.shape != (len(self.shifts),) * 2:
            raise DomainError("Gram matrix shape does not match the shift set")
        if not np.array_equal(e, e.T):
            raise DomainError("Gram matrix must be symmetric")

    def deviation(self) -> float:
        return float(np.max(np.abs(self.entries - np.eye(len(self.shifts)))))

    def to_dict(self) -> dict:
        return {
            "schema": 1,
            "type": "GramMatrix",
            "shifts": [list(s) for s in self.shifts],
            "entries": [float(v) for v in self.entries.ravel()],
            "quadrature_error_bound": self.quadrature_error_bound,
            "deviation": self.deviation(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


# --- synthesis ---------------------------------------------------------------

def _period(T):
    p = 1
    while p < 4 * T:
        p *= 2
    return p


def _axis_points(n, axis):
    grids = np.meshgrid(*([axis] * n), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def _denominator(phi, which, P, rel_tol, workers):
    """log of P_1 (or sqrt P_2) at the P^n residues -pi + 2 pi i / P, with relative errors."""
    n = phi.n
    power = 1 if which == "fundamental" else 2
    res_pts = _axis_points(n, np.arange(-P // 2, P // 2) * (TWO_PI / P))
    tol_den = max(rel_tol * 1e-2, 1e-14)

    def den_block(rows):
        lv, rel, _ = _periodize_reduced(phi, rows, power, tol_den)
        return lv, rel

    log_den, rel_den = map_blocks(den_block, res_pts, workers, block=64)
    scale = 1.0 if power == 1 else 0.5
    return scale * log_den.reshape((P,) * n), scale * rel_den.reshape((P,) * n)


def _folded_spectrum(phi, den, M, P, L, workers):
    """F on the cell [-pi M, pi M)^n and the absolute truncation error of each entry."""
    n = phi.n
    Ns = P * M
    r = np.arange(-Ns // 2, Ns // 2)
    step = TWO_PI / P
    log_den, rel_den = den

    res_idx = (r + P // 2) % P  # index into res_axis for every cell coordinate
    idx = np.ix_(*([res_idx] * n))
    log_den_cell = log_den[idx].ravel()
    rel_den_cell = rel_den[idx].ravel()

    cell = _axis_points(n, r * step)
    on_lattice = np.all(_axis_points(n, (r % P == 0).astype(float)) == 1.0, axis=1)
    origin = np.all(cell == 0.0, axis=1)
    singular = on_lattice if phi.origin_singular else np.zeros(len(cell), dtype=bool)
    live = np.flatnonzero(~(origin & phi.origin_singular))

    def num_block(rows):
        return lattice_log_sum(phi, rows, 1, TWO_PI * M, L)

    log_num = np.full(len(cell), -np.inf)
    rel_num = np.zeros(len(cell))
    if len(live):
        ln, rn = map_blocks(num_block, cell[live], workers, block=512)
        log_num[live] = ln
        rel_num[live] = rn

    F = np.zeros(len(cell))
    err = np.zeros(len(cell))
    reg = ~singular
    F[reg] = np.exp(log_num[reg] - log_den_cell[reg])
    err[reg] = F[reg] * (rel_num[reg] + rel_den_cell[reg])
    F[origin & singular] = 1.0
    return F.reshape((Ns,) * n), err.reshape((Ns,) * n)


def synthesize(phi: CardinalInterpolator, which: str = "fundamental", bandlimit: float | None = None,
               M: int = 16, T: int = 16, rel_tol: float = 1e-6,
               workers: int | None = None) -> SampledFunction:
    """Sample the fundamental interpolant or the scaling function on (1/M) Z^n, |x| <= T.

    ``bandlimit`` (a multiple pi M K, K >= 4 an integer) is the part of the
    spectrum folded in explicitly; it doubles until the certified fold
    remainder is below ``rel_tol`` or would exceed 2^16 pi.
    """
    if which not in WHICH:
        raise DomainError(f"which must be one of {WHICH}")
    if M < 8 or T < 4:
        raise DomainError("synthesize needs M >= 8 and T >= 4")
    n = phi.n
    if bandlimit is None:
        bandlimit = 2.0**10 * math.pi if n == 1 else 16.0 * math.pi * M
    K = bandlimit / (math.pi * M)
    if abs(K - round(K)) > 1e-9 or round(K) < 4:
        raise DomainError("bandlimit must equal pi*M*K for an integer K >= 4")
    K = int(round(K))
    if K * math.pi * M > MAX_BANDLIMIT * (1 + 1e-12):
        raise ToleranceUnreachable("bandlimit exceeds 2^16 pi")

    P = _period(T)
    Ns = P * M
    den = _denominator(phi, which, P, rel_tol, workers)
    while True:
        F, err = _folded_spectrum(phi, den, M, P, K // 2, workers)
        fold_error = float(err.sum()) / P**n
        if fold_error <= rel_tol:
            break
        if 2 * K * math.pi * M > MAX_BANDLIMIT * (1 + 1e-12):
            raise ToleranceUnreachable(
                f"{phi.label()}: fold remainder {fold_error:.3g} > {rel_tol:g} at the 2^16 pi cap"
            )
        K *= 2

    spatial = np.fft.ifftn(np.fft.ifftshift(F)) * float(M) ** n
    imag = float(np.max(np.abs(spatial.imag)))
    if imag > 1e-12:
        raise ToleranceUnreachable(f"imaginary residue {imag:.3g} exceeds 1e-12")
    full = np.fft.fftshift(spatial.real)

    # aliasing proxy: largest sample in the outer unit band of the period
    far = np.zeros(full.shape, dtype=bool)
    band = M
    for ax in range(n):
        sl = [slice(None)] * n
        sl[ax] = np.r_[0:band, Ns - band:Ns]
        far[tuple(sl)] = True
    alias = 2.0 * n * float(np.max(np.abs(full[far])))

    c = Ns // 2
    span = slice(c - T * M, c + T * M + 1)
    vals = full[(span,) * n]
    vals = 0.5 * (vals + np.flip(vals))
    return SampledFunction(n, M, T, vals, fold_error + alias, which, phi.to_dict(),
                           K * math.pi * M)


def cardinal_interpolant(L: SampledFunction, data: CoefficientSequence, points) -> list:
    """Evaluate sum_j a_j L(x - j) at on-grid points using the sampled table.

    Points must lie in [-T + diam, T - diam]^n (diam is the coefficient support's
    diameter) so that every shifted sample is taken inside the table.
    """
    if data.n != L.n:
        raise DomainError("coefficient dimension does not match the table")
    pts = np.asarray(points, dtype=float).reshape(-1, L.n)
    reach = L.halfwidth - data.diameter()
    out = []
    for x in pts:
        if np.max(np.abs(x)) > reach + 1e-12:
            raise DomainError(f"point {x.tolist()} lies outside [-{reach}, {reach}]")
        terms = [a * L.values[L.index(x - np.array(j, dtype=float))]
                 for j, a in data.coeffs.items()]
        out.append(math.fsum(terms))
    return out


# --- Gram matrix -------------------------------------------------------------

def _square_radius(phi, rel_tol):
    """Radius at which the tail of sum_l s^2(xi - 2 pi l) is below rel_tol * min s^2."""
    log_min = 2.0 * float(phi.log_radial(np.array([math.pi * math.sqrt(phi.n)]))[0])
    R = 8
    while log_shell_envelope(phi, R + 1, TWO_PI, 2) - log_min > math.log(rel_tol):
        R *= 2
        if R > 4096:
            raise ToleranceUnreachable("Gram periodization radius exceeds 4096")
    return R, math.exp(log_shell_envelope(phi, R + 1, TWO_PI, 2) - log_min)


def periodized_square(phi: CardinalInterpolator, pts: np.ndarray, radius: int,
                      rel_tol: float = 1e-12, workers: int | None = None) -> np.ndarray:
    """sum_{||l||_inf <= radius} Phi_hat(xi - 2 pi l)^2 at reduced points.

    The normalizer P_2 comes from the certified periodization, while the
    numerator is summed directly to ``radius``; a truncation or tail bug shows
    up as a departure from 1.
    """
    n = phi.n
    pts = np.asarray(pts, dtype=float).reshape(-1, n)

    def block(rows):
        at_origin = np.all(rows == 0.0, axis=1) & phi.origin_singular
        out = np.ones(len(rows))
        live = np.flatnonzero(~at_origin)
        if len(live) == 0:
            return out
        sub = rows[live]
        lp2, _, _ = _periodize_reduced(phi, sub, 2, rel_tol)
        acc = np.zeros(len(sub))
        for m in range(radius, -1, -1):
            offs = TWO_PI * _shell_float(n, m)
            diff = (sub[:, None, :] - offs[None, :, :]).reshape(-1, n)
            lv = 2.0 * log_symbol_points(phi, diff).reshape(len(sub), -1)
            acc += np.exp(lv - lp2[:, None]).sum(axis=1)
        out[live] = acc
        return out

    return map_blocks(block, pts, workers, block=256)


def _shell_float(n, m):
    from ._numerics import shell
    return shell(n, m).astype(float)


def gram_matrix(phi: CardinalInterpolator, shifts, grid_size: int = 64, rel_tol: float = 1e-9,
                workers: int | None = None) -> GramMatrix:
    """Inner products of integer translates of the scaling function.

    <Phi(. - j), Phi(. - k)> = (2 pi)^-n int_{[-pi, pi]^n} P(xi) e^{i<xi, k - j>} d xi with
    P the periodized square, integrated by the periodic trapezoid rule.
    """
    n = phi.n
    S = [tuple(int(v) for v in np.atleast_1d(s)) for s in shifts]
    if not S or len(S) > 64:
        raise DomainError("shift set must have between 1 and 64 elements")
    if any(len(s) != n for s in S):
        raise DomainError(f"shifts must have {n} coordinates")
    if grid_size < 8 or grid_size % 2:
        raise DomainError("grid_size must be an even integer >= 8")
    R, tail = _square_radius(phi, rel_tol)
    axis = -math.pi + TWO_PI * np.arange(grid_size) / grid_size
    pts = _axis_points(n, axis)
    Pv = periodized_square(phi, pts, R, workers=workers)

    def entries(points, values):
        d = np.array(S, dtype=float)
        diff = d[None, :, :] - d[:, None, :]  # k - j
        phase = np.einsum("gi,jki->gjk", points, diff)
        return np.mean(values[:, None, None] * np.cos(phase), axis=0)

    G = entries(pts, Pv)
    G = 0.5 * (G + G.T)
    coarse = _axis_points(n, axis[::2])
    half_mask = np.all(np.isin(pts, axis[::2]), axis=1)
    G_half = entries(coarse, Pv[half_mask])
    quad = float(np.max(np.abs(G - 0.5 * (G_half + G_half.T))))
    return GramMatrix(S, G, tail + quad)


# --- basis change ------------------------------------------------------------

def _apply_factor(phi, coeffs: CoefficientSequence, J: int, inverse: bool, rel_tol, workers):
    if J < 8:
        raise DomainError("basis change needs J >= 8")
    n = phi.n
    if coeffs.n != n:
        raise DomainError("coefficient dimension does not match the family")
    N = 2**J
    if n * J > 24:
        raise DomainError("grid 2^(n J) too large")
    if coeffs.coeffs and max(abs(v) for k in coeffs.support for v in k) >= N // 2:
        raise DomainError("coefficient support does not fit the transform grid")
    A = np.zeros((N,) * n)
    for j, a in coeffs.coeffs.items():
        A[tuple(v % N for v in j)] = a
    axis = TWO_PI * np.arange(N) / N
    Q = symbol_values(phi, _axis_points(n, axis), "basis-factor", rel_tol, workers).reshape((N,) * n)
    if inverse:
        Q = 1.0 / Q
    B = np.fft.ifftn(np.fft.fftn(A) * Q).real
    out, dropped = {}, 0.0
    for idx in np.ndindex(*B.shape):
        v = float(B[idx])
        if abs(v) > 1e-12:
            out[tuple(i if i < N // 2 else i - N for i in idx)] = v
        else:
            dropped += abs(v)
    return CoefficientSequence(out, n, dropped)


def basis_change_L_to_Phi(phi: CardinalInterpolator, coeffs: CoefficientSequence, J: int = 10,
                          rel_tol: float = 1e-12, workers: int | None = None) -> CoefficientSequence:
    """Coefficients b with sum b_j Phi(. - j) = sum a_j L(. - j), i.e. b_hat = a_hat Q."""
    return _apply_factor(phi, coeffs, J, False, rel_tol, workers)


def basis_change_Phi_to_L(phi: CardinalInterpolator, coeffs: CoefficientSequence, J: int = 10,
                          rel_tol: float = 1e-12, workers: int | None = None) -> CoefficientSequence:
    """Inverse of :func:`basis_change_L_to_Phi` (multiplies by 1/Q)."""
    return _apply_factor(phi, coeffs, J, True, rel_tol, workers)


# --- refinement probe ---------------------------------------------------------

def _log_scaling(phi, pts, rel_tol):
    red = reduce_mod_2pi(pts)
    lp2, _, _ = _periodize_reduced(phi, red, 2, rel_tol)
    return log_symbol_points(phi, pts) - 0.5 * lp2


def refinement_mask_probe(phi: CardinalInterpolator, N: int = 512, rel_tol: float = 1e-12) -> float:
    """sup over a midpoint grid of |m(xi + 2 pi) - m(xi)| with m(xi) = Phi_hat(2 xi) / Phi_hat(xi).

    Swept along each coordinate axis. Midpoints keep xi, 2 xi and their 2 pi
    shifts off the lattice, and the ratio is formed in the log domain.
    """
    if N < 512 or N & (N - 1):
        raise DomainError("probe grid size must be a power of two >= 512")
    n = phi.n
    t = -math.pi + (np.arange(N) + 0.5) * TWO_PI / N
    worst = 0.0
    for ax in range(n):
        base = np.zeros((N, n))
        base[:, ax] = t
        shifted = base.copy()
        shifted[:, ax] += TWO_PI
        m0 = np.exp(_log_scaling(phi, 2.0 * base, rel_tol) - _log_scaling(phi, base, rel_tol))
        m1 = np.exp(_log_scaling(phi, 2.0 * shifted, rel_tol) - _log_scaling(phi, shifted, rel_tol))
        worst = max(worst, float(np.max(np.abs(m1 - m0))))
    return worst
