"""Modified Bessel function of the second kind, K_nu(x), for real order.

Three evaluation routes, all carried out in the log domain:

* large x: the Hankel asymptotic series, used only when its terms shrink
  below tolerance before they start to grow;
* tiny x: the leading small-argument form, used only when the first
  neglected term is below tolerance;
* everything else: the trapezoidal rule applied to

      K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt.

  The integrand decays double exponentially, so the plain trapezoid on
  [0, t_max] converges geometrically with each halving of the step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError

NU_MAX = 64.0
X_MAX = 700.0
SMALL_X = 1e-3
_ASYMPTOTIC_MAX_TERMS = 400


@dataclass(frozen=True)
class BesselEvalConfig:
    rel_tol: float = 1e-12
    max_quadrature_nodes: int = 2000
    asymptotic_crossover: float = 50.0

    def __post_init__(self):
        if not 0.0 < self.rel_tol <= 1e-6:
            raise DomainError(f"rel_tol must lie in (0, 1e-6], got {self.rel_tol}")
        if self.max_quadrature_nodes < 17:
            raise DomainError("max_quadrature_nodes must be at least 17")
        if not self.asymptotic_crossover > 1.0:
            raise DomainError("asymptotic_crossover must exceed 1")


DEFAULT_BESSEL = BesselEvalConfig()


def _check_order(nu):
    if not (0.0 <= nu <= NU_MAX) or math.isnan(nu):
        raise DomainError(f"order must lie in [0, {NU_MAX:g}], got {nu}")


def bessel_k(nu: float, x, cfg: BesselEvalConfig = DEFAULT_BESSEL):
    """K_nu(x) for nu in [0, 64] and x in (0, 700].

    Accepts a scalar or an array of arguments. Larger arguments underflow;
    use :func:`bessel_k_log` there.
    """
    xa = np.asarray(x, dtype=float)
    if np.any(xa > X_MAX):
        raise DomainError(f"bessel_k needs x <= {X_MAX:g}; use bessel_k_log")
    out = np.exp(bessel_k_log(nu, xa, cfg))
    return float(out) if np.ndim(out) == 0 else out


def bessel_k_log(nu: float, x, cfg: BesselEvalConfig = DEFAULT_BESSEL):
    """log K_nu(x) for nu in [0, 64] and any x > 0 (scalar or array)."""
    nu = float(nu)
    _check_order(nu)
    xa = np.asarray(x, dtype=float)
    if np.any(~(xa > 0.0)) or np.any(~np.isfinite(xa)):
        raise DomainError("bessel_k_log needs finite x > 0")
    flat = xa.ravel()
    out = np.empty_like(flat)
    todo = np.ones(flat.shape, dtype=bool)

    big = flat > cfg.asymptotic_crossover
    if big.any():
        val, ok = _hankel_log(nu, flat[big], cfg.rel_tol)
        idx = np.flatnonzero(big)[ok]
        out[idx] = val[ok]
        todo[idx] = False

    tiny = todo & (flat < SMALL_X)
    if tiny.any():
        val, ok = _small_argument_log(nu, flat[tiny], cfg.rel_tol)
        idx = np.flatnonzero(tiny)[ok]
        out[idx] = val[ok]
        todo[idx] = False

    if todo.any():
        idx = np.flatnonzero(todo)
        for start in range(0, len(idx), 2048):
            part = idx[start:start + 2048]
            out[part] = _quadrature_log(nu, flat[part], cfg)

    out = out.reshape(xa.shape)
    return float(out) if out.ndim == 0 else out


def _hankel_log(nu, x, rel_tol):
    """Hankel expansion; returns (values, usable mask)."""
    mu = 4.0 * nu * nu
    total = np.ones_like(x)
    term = np.ones_like(x)
    done = np.zeros(x.shape, dtype=bool)
    ok = np.zeros(x.shape, dtype=bool)
    for k in range(1, _ASYMPTOTIC_MAX_TERMS + 1):
        new = term * (mu - (2 * k - 1) ** 2) / (8.0 * k * x)
        live = ~done
        growing = live & (np.abs(new) > np.abs(term))
        done |= growing
        live &= ~growing
        total = np.where(live, total + new, total)
        small = live & (np.abs(new) <= 1e-3 * rel_tol * np.abs(total))
        ok |= small
        done |= small
        term = np.where(live, new, term)
        if done.all():
            break
    ok &= total > 0
    vals = 0.5 * np.log(np.pi / (2.0 * x)) - x + np.log(np.where(ok, total, 1.0))
    return vals, ok


def _small_argument_log(nu, x, rel_tol):
    """Leading behaviour as x -> 0; returns (values, usable mask)."""
    h = 0.5 * x
    h2 = h * h
    logh = np.log(h)
    budget = 1e-2 * rel_tol
    if nu == 0.0:
        lead = -logh - np.euler_gamma
        err = 2.0 * h2 * (1.0 + np.abs(logh))
        vals = np.log(np.where(lead > 0, lead, 1.0))
        return vals, (err < budget) & (lead > 0)
    if nu < 1.0:
        if min(nu, 1.0 - nu) < 0.05:
            return np.zeros_like(x), np.zeros(x.shape, dtype=bool)
        # K_nu ~ G(nu)/2 h^-nu + G(-nu)/2 h^nu
        ratio = math.gamma(-nu) / math.gamma(nu) * h ** (2.0 * nu)
        vals = math.lgamma(nu) - math.log(2.0) - nu * logh + np.log1p(ratio)
        err = 3.0 * h2 * (1.0 / (1.0 - nu) + 1.0 / nu + 1.0)
        return vals, err < budget
    vals = math.lgamma(nu) - math.log(2.0) - nu * logh
    if nu == 1.0:
        err = 2.0 * h2 * (1.0 + np.abs(logh))
        return vals, err < budget
    sin_term = abs(math.sin(math.pi * nu))
    if sin_term > 1e-3:
        refl = math.pi / (sin_term * math.gamma(nu) * math.gamma(nu + 1.0))
    else:
        refl = 2.0 * (np.abs(logh) + 2.0) / math.gamma(nu) ** 2
    err = 2.0 * h2 / abs(nu - 1.0) + h ** (2.0 * nu) * refl
    return vals, err < budget


def _log_cosh(y):
    a = np.abs(y)
    return a + np.log1p(np.exp(-2.0 * a)) - math.log(2.0)


def _log_integrand(t, nu, x):
    return -x * np.cosh(t) + _log_cosh(nu * t)


def _quadrature_log(nu, x, cfg):
    """Trapezoid on [0, t_max(x)] with per-element halving until converged."""
    cutoff = -math.log(cfg.rel_tol) + 25.0
    x = np.asarray(x, dtype=float)
    col = x[:, None]

    t_star = np.arcsinh(nu / x)
    peak = np.maximum(-x, _log_integrand(t_star, nu, x))
    target = peak - cutoff

    lo = t_star.copy()
    hi = t_star + 1.0
    for _ in range(64):
        above = _log_integrand(hi, nu, x) > target
        if not above.any():
            break
        hi = np.where(above, t_star + 2.0 * (hi - t_star), hi)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        above = _log_integrand(mid, nu, x) > target
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    t_max = hi[:, None]

    def f(u):
        return np.exp(_log_integrand(t_max * u, nu, col) - peak[:, None])

    level = 3
    nodes = 2 ** level
    u = np.arange(nodes + 1) / nodes
    vals = f(u)
    inner = vals[:, 1:-1].sum(axis=1) + 0.5 * (vals[:, 0] + vals[:, -1])
    step = t_max[:, 0] / nodes
    estimate = step * inner

    result = np.full(x.shape, np.nan)
    pending = np.ones(x.shape, dtype=bool)
    while True:
        level += 1
        nodes = 2 ** level
        if nodes + 1 > cfg.max_quadrature_nodes:
            break
        u = (2 * np.arange(nodes // 2) + 1) / nodes
        new = f(u).sum(axis=1)
        step = t_max[:, 0] / nodes
        refined = 0.5 * estimate + step * new
        if level >= 5:
            conv = pending & (np.abs(refined - estimate) <= cfg.rel_tol * refined)
            result[conv] = refined[conv]
            pending &= ~conv
            if not pending.any():
                break
        estimate = refined
    if pending.any():
        bad = x[pending][0]
        raise ConvergenceError(
            f"K_{nu:g}({bad:g}): quadrature did not converge within "
            f"{cfg.max_quadrature_nodes} nodes"
        )
    return peak + np.log(result)
