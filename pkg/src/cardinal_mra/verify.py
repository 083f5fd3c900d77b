"""Checks of the multiresolution hypotheses and conclusions, aggregated into a report."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from ._numerics import TWO_PI, cube_grid, shell
from .errors import CardinalMRAError, DomainError
from .families import CardinalInterpolator, FamilyPath, log_symbol_points, m_bound, m_ratio
from .periodization import m_sum_tail, riesz_upper_constant, symbol_values
from .synthesis import (
    CoefficientSequence,
    cardinal_interpolant,
    gram_matrix,
    refinement_mask_probe,
    synthesize,
)

SCHEMA = 1
R2_RADII = (25, 50, 100)
LIMIT_LEVEL = -60.0


# --- individual checks ---------------------------------------------------------

def check_h2(phi: CardinalInterpolator, grid: int = 1025) -> float:
    """Grid minimum of the symbol over [-pi, pi]^n (the constant delta of the lower bound)."""
    if grid < 1025:
        raise DomainError("check_h2 needs at least 1025 points per axis")
    if phi.n == 1:
        pts = cube_grid(1, grid)
    else:
        # the grid restricted to the edges of the cube; a radially decreasing
        # symbol attains its grid minimum at a corner, which every edge ends in
        t = np.linspace(-math.pi, math.pi, grid)
        edges = []
        for ax in range(phi.n):
            for corner in cube_grid(phi.n - 1, 2):
                e = np.empty((grid, phi.n))
                e[:, ax] = t
                e[:, [i for i in range(phi.n) if i != ax]] = corner
                edges.append(e)
        pts = np.concatenate(edges)
    return float(np.exp(np.min(log_symbol_points(phi, pts))))


@dataclass
class R1Table:
    """m_ratio values: one row per (j, xi), one column per path parameter."""

    parameters: list
    rows: list  # (j, xi, [values...], verdict)

    @property
    def passes(self) -> bool:
        return all(r[3] for r in self.rows)

    def to_dict(self) -> dict:
        return {
            "parameters": list(self.parameters),
            "rows": [{"j": list(j), "xi": list(x), "values": list(v), "verdict": bool(ok)}
                     for j, x, v, ok in self.rows],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["j", "xi"] + [f"p={p!r}" for p in self.parameters] + ["verdict"])
        for j, x, vals, ok in self.rows:
            w.writerow([" ".join(str(v) for v in j), " ".join(repr(float(v)) for v in x)]
                       + [repr(float(v)) for v in vals] + ["pass" if ok else "fail"])
        return buf.getvalue()


def default_r1_sets(n: int):
    """Lattice offsets and frequencies for the ratio table; no |xi_i| = pi reflection points."""
    if n == 1:
        return [(1,), (2,), (-1,)], [(math.pi / 4,), (math.pi / 2,), (3 * math.pi / 4,)]
    js = [tuple([1] + [0] * (n - 1)), tuple([1] * n), tuple([0] * (n - 1) + [-2])]
    xis = [tuple([math.pi / 2] + [math.pi / 4] * (n - 1)),
           tuple([-math.pi / 3] * n),
           tuple([math.pi / 8] + [3 * math.pi / 4] * (n - 1))]
    return js, xis


def _r1_verdict(vals) -> bool:
    if vals[-1] < vals[0] and vals[-1] < 0.01:
        return True
    tail = vals[-3:]
    return len(tail) == 3 and tail[0] > tail[1] > tail[2]


def check_r1(path: FamilyPath, js=None, xis=None) -> R1Table:
    """Ratio table along a path; each (j, xi) row should decay toward 0."""
    d_js, d_xis = default_r1_sets(path.n)
    js = d_js if js is None else [tuple(np.atleast_1d(j).tolist()) for j in js]
    xis = d_xis if xis is None else [tuple(float(v) for v in np.atleast_1d(x)) for x in xis]
    if len(js) < 2:
        raise DomainError("check_r1 needs at least two lattice offsets")
    members = path.members()
    rows = []
    for j in js:
        for x in xis:
            vals = [m_ratio(phi, j, x) for phi in members]
            rows.append((tuple(int(v) for v in j), x, vals, _r1_verdict(vals)))
    return R1Table(list(path.values), rows)


@dataclass
class R2Entry:
    radius: int
    partial_sum: float
    tail_bound: float

    def to_dict(self) -> dict:
        return {"radius": self.radius, "partial_sum": self.partial_sum, "tail_bound": self.tail_bound}


def check_r2(path, radii=R2_RADII) -> tuple[list, bool]:
    """Partial sums of the uniform bounds M_j with certified tails.

    Verdict: the sums are nondecreasing, and each later sum exceeds an earlier
    one by no more than the earlier tail bound.
    """
    phi = path.members()[0] if isinstance(path, FamilyPath) else path
    radii = sorted(int(J) for J in radii)
    if any(J not in R2_RADII for J in radii):
        raise DomainError(f"check_r2 radii must come from {R2_RADII}")
    entries, total, done = [], 0.0, 0
    for J in radii:
        total += math.fsum(math.fsum(m_bound(path, j) for j in shell(phi.n, m))
                           for m in range(done + 1, J + 1))
        done = J
        entries.append(R2Entry(J, total, m_sum_tail(phi, J)))
    ok = all(b.partial_sum >= a.partial_sum and b.partial_sum - a.partial_sum <= a.tail_bound
             for a, b in zip(entries, entries[1:]))
    return entries, ok


def _log_lattice_square_excess(phi: CardinalInterpolator) -> float:
    """log sum_{k != 0} (s(2 pi k) / s(0))^2 for a family regular at the origin."""
    ref = 2.0 * float(log_symbol_points(phi, np.zeros((1, phi.n)))[0])
    terms = []
    m = 1
    while True:
        pts = TWO_PI * shell(phi.n, m).astype(float)
        lv = 2.0 * log_symbol_points(phi, pts) - ref
        top = float(lv.max())
        terms.append(top + math.log(np.exp(lv - top).sum()))
        if m > 1 and terms[-1] < terms[0] - 80.0:
            break
        m += 1
    top = max(terms)
    return top + math.log(math.fsum(math.exp(t - top) for t in terms))


def check_density_criterion(phi: CardinalInterpolator) -> tuple[float, float]:
    """(Phi_hat(0), log(1 - Phi_hat(0))); the log is -inf when Phi_hat(0) = 1 exactly.

    With S = sum_{k != 0} s(2 pi k)^2 / s(0)^2 the value is Phi_hat(0) = (1 + S)^-1/2.
    For small S, 1 - (1 + S)^-1/2 = (S / 2)(1 - 3S/4 + ...), which keeps the
    deficiency visible long after Phi_hat(0) itself rounds to 1.
    """
    if phi.origin_singular:
        return 1.0, -math.inf
    log_S = _log_lattice_square_excess(phi)
    S = math.exp(log_S)
    phi0 = math.exp(-0.5 * math.log1p(S))
    if log_S < -20.0:
        deficiency = log_S - math.log(2.0) + math.log1p(-0.75 * S)
    else:
        deficiency = math.log(-math.expm1(-0.5 * math.log1p(S)))
    return phi0, deficiency


def check_symbol_limit(phi: CardinalInterpolator) -> dict:
    """Finite certificate that the symbol tends to 0: strictly decreasing along the
    coordinate axes over radii 10^0 .. 10^15 and below exp(-60) by the end."""
    radii = 10.0 ** np.arange(0, 16)
    decreasing, reached = True, []
    for ax in range(phi.n):
        pts = np.zeros((len(radii), phi.n))
        pts[:, ax] = radii
        lv = log_symbol_points(phi, pts)
        decreasing &= bool(np.all(np.diff(lv) < 0))
        below = np.flatnonzero(lv <= LIMIT_LEVEL)
        reached.append(float(radii[below[0]]) if below.size else None)
    passes = decreasing and None not in reached
    first = max(reached) if passes else None
    return {"decreasing": decreasing, "radius_below": first if passes else None, "passes": passes}


# --- report ---------------------------------------------------------------------

@dataclass(frozen=True)
class ReportConfig:
    h2_grid: int = 1025
    riesz_grid: int = 4097
    riesz_grid_nd: int = 9
    rel_tol: float = 1e-12
    rel_tol_nd: float = 1e-6
    gram_grid: int = 64
    gram_grid_nd: int = 32
    interp_radius: int = 8
    interp_radius_nd: int = 3
    samples_per_unit: int = 16
    halfwidth: int = 16
    samples_per_unit_nd: int = 8
    halfwidth_nd: int = 4
    synth_bandlimit: float = 2.0**10 * math.pi
    synth_tol: float = 1e-6
    synth_tol_nd: float = 1e-4
    probe_grid: int = 512
    r1_js: tuple | None = None
    r1_xis: tuple | None = None
    r2_radii: tuple = R2_RADII
    workers: int | None = None
    timings: bool = False

    def __post_init__(self):
        if self.h2_grid < 1025:
            raise DomainError("h2_grid must be at least 1025")
        if self.riesz_grid < 3 or self.riesz_grid_nd < 3:
            raise DomainError("riesz grids need at least 3 points per axis")


def _is_singular_family(desc: dict) -> bool:
    return desc.get("family") in ("polyharmonic", "gmq")


@dataclass
class MRAReport:
    family: dict
    h2_delta: float | None
    riesz_observed: list | None
    riesz_upper_constant: float | None
    gram_deviation: float | None
    interpolation_deviation: float | None
    phi_hat_origin: float
    density_deficiency_log: float
    refinement_probe: float | None
    symbol_limit: dict
    verdict_density: str
    r1_table: R1Table | None = None
    r1_passes: bool | None = None
    r2_partial_sums: list | None = None
    r2_passes: bool | None = None
    path: dict | None = None
    stage_errors: dict = field(default_factory=dict)
    runtimes: dict | None = None

    def __post_init__(self):
        if self.riesz_observed is not None and self.riesz_upper_constant is not None:
            lo, hi = self.riesz_observed
            if lo < 1.0 - 1e-12 or hi > self.riesz_upper_constant + 1e-12:
                raise CardinalMRAError(
                    f"Riesz ratio range [{lo}, {hi}] escapes [1, {self.riesz_upper_constant}]")
        singular = _is_singular_family(self.family)
        if singular and (self.phi_hat_origin != 1.0 or self.density_deficiency_log != -math.inf):
            raise CardinalMRAError("origin-singular families must give Phi_hat(0) = 1")
        if not singular and not math.isfinite(self.density_deficiency_log):
            raise CardinalMRAError("Phi_hat(0) < 1 must show as a finite log deficiency")
        expected = "passes" if self.density_deficiency_log == -math.inf else "fails"
        if self.verdict_density != expected:
            raise CardinalMRAError("density verdict disagrees with the deficiency")

    @property
    def passes(self) -> bool:
        """True when every asserted MRA condition holds."""
        flags = [self.verdict_density == "passes", self.symbol_limit.get("passes", False),
                 not self.stage_errors]
        if self.r1_passes is not None:
            flags.append(self.r1_passes)
        if self.r2_passes is not None:
            flags.append(self.r2_passes)
        if self.gram_deviation is not None:
            flags.append(self.gram_deviation <= 1e-6)
        return all(flags)

    def to_dict(self) -> dict:
        def num(v):
            if v is None:
                return None
            return "-inf" if v == -math.inf else float(v)

        out = {
            "schema": SCHEMA,
            "type": "MRAReport",
            "family": self.family,
            "path": self.path,
            "h2_delta": num(self.h2_delta),
            "riesz_observed": None if self.riesz_observed is None else [float(v) for v in self.riesz_observed],
            "riesz_upper_constant": num(self.riesz_upper_constant),
            "gram_deviation": num(self.gram_deviation),
            "interpolation_deviation": num(self.interpolation_deviation),
            "phi_hat_origin": num(self.phi_hat_origin),
            "density_deficiency_log": num(self.density_deficiency_log),
            "verdict_density": self.verdict_density,
            "symbol_limit": self.symbol_limit,
            "refinement_probe": num(self.refinement_probe),
            "r1_table": None if self.r1_table is None else self.r1_table.to_dict(),
            "r1_passes": self.r1_passes,
            "r2_partial_sums": None if self.r2_partial_sums is None
            else [e.to_dict() for e in self.r2_partial_sums],
            "r2_passes": self.r2_passes,
            "stage_errors": dict(sorted(self.stage_errors.items())),
            "passes": self.passes,
        }
        if self.runtimes is not None:
            out["runtimes"] = dict(self.runtimes)
        return out

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def _riesz_grid(phi, cfg):
    if phi.n == 1:
        pts = cube_grid(1, cfg.riesz_grid)
        tol = cfg.rel_tol
    else:
        pts = cube_grid(phi.n, cfg.riesz_grid_nd)
        tol = cfg.rel_tol_nd
    vals = symbol_values(phi, pts, "riesz-ratio", tol, cfg.workers)
    return [float(vals.min()), float(vals.max())]


def _interpolation_deviation(phi, cfg):
    if phi.n == 1:
        M, T, R, tol = cfg.samples_per_unit, cfg.halfwidth, cfg.interp_radius, cfg.synth_tol
        bandlimit = cfg.synth_bandlimit
    else:
        M, T, R = cfg.samples_per_unit_nd, cfg.halfwidth_nd, cfg.interp_radius_nd
        tol, bandlimit = cfg.synth_tol_nd, 4.0 * math.pi * M
    L = synthesize(phi, "fundamental", bandlimit, M, T, tol, cfg.workers)
    axis = np.arange(-R, R + 1)
    pts = np.stack([g.ravel() for g in np.meshgrid(*([axis] * phi.n), indexing="ij")], axis=1)
    s = cardinal_interpolant(L, CoefficientSequence.delta(phi.n), pts.astype(float))
    target = np.all(pts == 0, axis=1).astype(float)
    return float(np.max(np.abs(np.array(s) - target)))


def _gram_shifts(n):
    """Nine shifts: -4..4 on the line, the 3 x 3 block in the plane, axis neighbours in 3-D."""
    if n == 1:
        return [(i,) for i in range(-4, 5)]
    if n == 2:
        return [(i, j) for i in (-1, 0, 1) for j in (-1, 0, 1)]
    unit = np.eye(n, dtype=int)
    return [(0,) * n] + [tuple(s * unit[a]) for a in range(n) for s in (1, -1)]


def full_report(target, config: ReportConfig | None = None) -> MRAReport:
    """Run every check on one instance, or on the first member of a path plus the path checks."""
    cfg = config or ReportConfig()
    path = target if isinstance(target, FamilyPath) else None
    phi = path.members()[0] if path else target
    if not isinstance(phi, CardinalInterpolator):
        raise DomainError("full_report needs a family instance or a FamilyPath")
    errors: dict = {}
    runtimes: dict = {}

    def stage(name, func):
        t0 = time.perf_counter()
        try:
            return func()
        except CardinalMRAError as exc:
            errors[name] = f"{type(exc).__name__}: {exc}"
            return None
        finally:
            runtimes[name] = time.perf_counter() - t0

    h2 = stage("h2", lambda: check_h2(phi, cfg.h2_grid))
    riesz = stage("riesz", lambda: _riesz_grid(phi, cfg))
    upper = stage("riesz_upper_constant", lambda: riesz_upper_constant(path or phi))
    gram_tol = 1e-9 if phi.n == 1 else 1e-5
    gram_grid = cfg.gram_grid if phi.n == 1 else cfg.gram_grid_nd
    gram = stage("gram", lambda: gram_matrix(phi, _gram_shifts(phi.n), gram_grid, gram_tol,
                                             cfg.workers).deviation())
    interp = stage("interpolation", lambda: _interpolation_deviation(phi, cfg))
    phi0, deficiency = check_density_criterion(phi)
    limit = check_symbol_limit(phi)
    probe = stage("refinement_probe", lambda: refinement_mask_probe(
        phi, cfg.probe_grid, cfg.rel_tol if phi.n == 1 else max(cfg.rel_tol_nd * 1e-2, 1e-8)))

    r1 = r1_ok = r2 = r2_ok = None
    if path is not None:
        r1 = stage("r1", lambda: check_r1(path, cfg.r1_js, cfg.r1_xis))
        r1_ok = None if r1 is None else r1.passes
        res = stage("r2", lambda: check_r2(path, cfg.r2_radii))
        if res is not None:
            r2, r2_ok = res

    return MRAReport(
        family=phi.to_dict(),
        h2_delta=h2,
        riesz_observed=riesz,
        riesz_upper_constant=upper,
        gram_deviation=gram,
        interpolation_deviation=interp,
        phi_hat_origin=phi0,
        density_deficiency_log=deficiency,
        refinement_probe=probe,
        symbol_limit=limit,
        verdict_density="passes" if deficiency == -math.inf else "fails",
        r1_table=r1,
        r1_passes=r1_ok,
        r2_partial_sums=r2,
        r2_passes=r2_ok,
        path=None if path is None else path.to_dict(),
        stage_errors=errors,
        runtimes={k: round(v, 3) for k, v in runtimes.items()} if cfg.timings else None,
    )


__all__ = [
    "MRAReport",
    "R1Table",
    "R2Entry",
    "ReportConfig",
    "check_density_criterion",
    "check_h2",
    "check_r1",
    "check_r2",
    "check_symbol_limit",
    "default_r1_sets",
    "full_report",
]
