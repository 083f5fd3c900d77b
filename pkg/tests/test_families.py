import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import special

from cardinal_mra import (
    DomainError,
    FamilyPath,
    Gaussian,
    GeneralizedMultiquadric,
    Polyharmonic,
    bessel_k_log,
    decay_envelope,
    from_dict,
    from_json,
    log_symbol,
    m_bound,
    m_ratio,
    symbol,
)
from cardinal_mra.families import log_symbol_points


def ratios(phi, j, xis):
    """m_ratio over many frequencies at once (independent of m_ratio's own code path)."""
    xis = np.asarray(xis, dtype=float).reshape(-1, phi.n)
    shifted = xis + 2 * PI * np.asarray(j, dtype=float).reshape(1, -1)
    return np.exp(log_symbol_points(phi, shifted) - log_symbol_points(phi, xis))

PI = math.pi

families = st.one_of(
    st.builds(Polyharmonic, n=st.integers(1, 3), k=st.integers(2, 5)),
    st.builds(GeneralizedMultiquadric, n=st.integers(1, 3),
              alpha=st.floats(0.5, 20.0).filter(lambda a: abs(a - round(a)) > 1e-3),
              c=st.floats(0.1, 5.0)),
    st.builds(Gaussian, n=st.integers(1, 3), alpha=st.floats(1.0, 8.0)),
)


# --- descriptors ---------------------------------------------------------------

@pytest.mark.parametrize(
    "ctor",
    [
        lambda: Polyharmonic(2, 1),
        lambda: Polyharmonic(1, 0),
        lambda: Polyharmonic(4, 3),
        lambda: GeneralizedMultiquadric(1, 0.4, 1.0),
        lambda: GeneralizedMultiquadric(1, 1.0, 1.0),
        lambda: GeneralizedMultiquadric(1, 2.5, 0.0),
        lambda: GeneralizedMultiquadric(2, 63.5, 1.0),
        lambda: Gaussian(1, 0.5),
    ],
)
def test_invalid_parameters_are_rejected(ctor):
    with pytest.raises(DomainError):
        ctor()


@given(families)
def test_json_round_trip(phi):
    again = from_json(phi.to_json())
    assert again == phi
    assert from_dict(json.loads(json.dumps(phi.to_dict()))) == phi


def test_unknown_family_name():
    with pytest.raises(DomainError):
        from_dict({"family": "thin-plate", "n": 2})


def test_family_path_validation():
    base = GeneralizedMultiquadric(1, 0.5, 1.0)
    path = FamilyPath(base, "multiquadric-order", (0.5, 1.5, 2.5))
    assert [m.alpha for m in path.members()] == [0.5, 1.5, 2.5]
    with pytest.raises(DomainError):
        FamilyPath(base, "multiquadric-order", (0.5,))
    with pytest.raises(DomainError):
        FamilyPath(base, "multiquadric-order", (1.5, 0.5))
    with pytest.raises(DomainError):
        FamilyPath(base, "multiquadric-order", (0.5, 2.0))  # integer order
    with pytest.raises(DomainError):
        FamilyPath(base, "gaussian", (1.0, 2.0))
    with pytest.raises(DomainError):
        FamilyPath(base, "no-such-axis", (1.0, 2.0))


# --- symbols -------------------------------------------------------------------

def test_symbol_examples():
    assert symbol(Polyharmonic(1, 1), PI) == pytest.approx(PI**-2, rel=1e-15)
    assert symbol(Gaussian(1, 1.0), 0.0) == 1.0
    assert symbol(GeneralizedMultiquadric(1, 0.5, 1.0), 1.0) == pytest.approx(0.6019072301972346, rel=1e-11)
    assert symbol(Polyharmonic(2, 2), [0.0, 0.0]) == math.inf
    assert symbol(GeneralizedMultiquadric(1, 0.5, 1.0), 0.0) == math.inf


def test_log_symbol_examples():
    assert log_symbol(Polyharmonic(1, 2), 10.0) == pytest.approx(-4 * math.log(10), abs=1e-14)
    assert log_symbol(Gaussian(2, 1.0), [3.0, 4.0]) == pytest.approx(-25.0, abs=1e-14)
    gmq = log_symbol(GeneralizedMultiquadric(1, 0.5, 1.0), 200.0)
    assert gmq == pytest.approx(-math.log(200) + bessel_k_log(1.0, 200.0), abs=1e-13)
    # Hankel terms: K_1(x) ~ sqrt(pi/2x) e^-x (1 + 3/(8x) - 15/(128 x^2) + 315/(3072 x^3))
    series = 3 / 1600 - 15 / (128 * 200**2) + 315 / (3072 * 200**3)
    approx = -math.log(200) - 200 + 0.5 * math.log(PI / 400) + math.log1p(series)
    assert gmq == pytest.approx(approx, abs=1e-9)


def test_log_symbol_rejects_singular_origin():
    with pytest.raises(DomainError):
        log_symbol(Polyharmonic(1, 1), 0.0)
    assert log_symbol(Gaussian(1, 1.0), 0.0) == 0.0


@pytest.mark.parametrize("phi", [Polyharmonic(1, 3), GeneralizedMultiquadric(1, 2.5, 2.0), Gaussian(1, 2.0)])
def test_log_symbol_far_out(phi):
    for r in (1e2, 1e3, 1e4):
        v = log_symbol(phi, r)
        assert math.isfinite(v) and v < 0


def test_gmq_symbol_against_scipy():
    phi = GeneralizedMultiquadric(2, 1.5, 0.7)
    r = np.linspace(0.05, 40.0, 200)
    ours = log_symbol_points(phi, np.column_stack([r, np.zeros_like(r)]))
    ref = -2.5 * np.log(r) + np.log(special.kve(2.5, 0.7 * r)) - 0.7 * r
    assert np.max(np.abs(ours - ref)) < 1e-10 * np.max(np.abs(ref))


@given(families, st.data())
def test_symbol_invariant_under_signed_permutations(phi, data):
    xi = np.array(data.draw(st.lists(st.floats(-20, 20), min_size=phi.n, max_size=phi.n)))
    if not np.any(xi):
        xi[0] = 1.0
    perm = data.draw(st.permutations(range(phi.n)))
    signs = np.array(data.draw(st.lists(st.sampled_from([-1.0, 1.0]), min_size=phi.n, max_size=phi.n)))
    assert log_symbol(phi, signs * xi[list(perm)]) == pytest.approx(log_symbol(phi, xi), rel=1e-13, abs=1e-13)


@given(families)
def test_symbol_positive_on_the_cell(phi):
    axis = np.linspace(-PI, PI, 2049 if phi.n == 1 else 33)
    pts = np.array(list(itertools.product(axis, repeat=phi.n)))
    vals = log_symbol_points(phi, pts)
    off_origin = np.any(pts != 0, axis=1)
    assert np.all(np.isfinite(vals[off_origin]))
    assert np.all(vals[~off_origin] == (np.inf if phi.origin_singular else 0.0))


# --- ratios and bounds ------------------------------------------------------------

def test_m_ratio_examples():
    assert m_ratio(Polyharmonic(1, 1), 1, PI) == pytest.approx(1 / 9, rel=1e-14)
    assert m_ratio(Polyharmonic(1, 2), 1, PI) == pytest.approx(1 / 81, rel=1e-14)
    assert m_ratio(Gaussian(1, 1.0), 1, 0.0) == pytest.approx(math.exp(-4 * PI**2), rel=1e-13)
    assert m_ratio(Polyharmonic(1, 1), 1, 0.0) == 0.0


def test_m_ratio_domain():
    with pytest.raises(DomainError):
        m_ratio(Polyharmonic(1, 1), 0, 1.0)
    with pytest.raises(DomainError):
        m_ratio(Polyharmonic(1, 1), 1, 3.5)


@given(families, st.data())
def test_m_ratio_consistency(phi, data):
    j = data.draw(st.lists(st.integers(-3, 3), min_size=phi.n, max_size=phi.n).filter(any))
    xi = np.array(data.draw(st.lists(st.floats(-PI, PI), min_size=phi.n, max_size=phi.n)))
    if not np.any(xi):
        return
    lhs = math.log(m_ratio(phi, j, xi)) if m_ratio(phi, j, xi) > 0 else None
    rhs = log_symbol(phi, xi + 2 * PI * np.array(j)) - log_symbol(phi, xi)
    if lhs is not None:
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


def test_m_bound_examples():
    assert m_bound(Polyharmonic(1, 1), 2) == pytest.approx(1 / 9, rel=1e-12)
    assert m_bound(Polyharmonic(1, 1), 1) == pytest.approx(1.0, rel=1e-12)
    assert m_bound(Polyharmonic(1, 3), -3) == pytest.approx(5.0**-6, rel=1e-12)
    # reflection point xi = -pi gives ratio 1 for the Gaussian too
    assert 1.0 <= m_bound(Gaussian(1, 1.0), 1) <= 1.0101


@pytest.mark.parametrize(
    "phi, js",
    [
        (GeneralizedMultiquadric(1, 0.5, 1.0), [1, 2, 5, -3]),
        (Gaussian(1, 2.0), [1, -2]),
        (Polyharmonic(2, 2), [(1, 0), (1, 1), (3, -2)]),
        (GeneralizedMultiquadric(2, 1.5, 1.0), [(1, 0), (2, 2), (4, 1)]),
        (Gaussian(3, 1.0), [(1, 0, 0), (1, 1, 1)]),
    ],
)
def test_m_bound_dominates_random_ratios(phi, js):
    rng = np.random.default_rng(7)
    xis = rng.uniform(-PI, PI, size=(400, phi.n))
    for j in js:
        assert ratios(phi, j, xis).max() <= m_bound(phi, j)


@pytest.mark.parametrize(
    "path",
    [
        FamilyPath(GeneralizedMultiquadric(1, 0.5, 1.0), "multiquadric-order", (0.5, 1.5, 2.5, 5.5)),
        FamilyPath(GeneralizedMultiquadric(1, 0.5, 1.0), "multiquadric-shape", (1.0, 2.0, 4.0)),
        FamilyPath(Polyharmonic(1, 1), "polyharmonic-order", (1, 2, 3)),
        FamilyPath(Gaussian(1, 1.0), "gaussian", (1.0, 2.0, 4.0)),
    ],
)
def test_path_bound_covers_every_member(path):
    grid = np.linspace(-PI, PI, 1025)
    for j in (1, -1, 2, 4):
        bound = m_bound(path, j)
        for phi in path.members():
            assert ratios(phi, j, grid).max() <= bound


# --- decay envelopes -------------------------------------------------------------

def test_polyharmonic_envelope_dominates_brute_force_tail():
    phi = Polyharmonic(1, 1)
    env = decay_envelope(phi, 200 * PI)
    xi = np.linspace(-PI, PI, 513)
    # sum over |j| > 100 of (xi - 2 pi j)^-2 on both sides, via Hurwitz zeta
    tail = (special.zeta(2, 101 - xi / (2 * PI)) + special.zeta(2, 101 + xi / (2 * PI))) / (2 * PI) ** 2
    assert tail.max() == pytest.approx(2 * (1 / (2 * PI)) ** 2 * special.zeta(2, 100.5), rel=1e-2)
    assert env >= tail.max()
    assert env <= 1.2 * tail.max()


def test_gaussian_envelope_example():
    phi = Gaussian(1, 1.0)
    env = decay_envelope(phi, 4 * PI)
    # covers |j| >= 3; dominated by the geometric bound quoted for |j| >= 2
    brute = max(sum(math.exp(-((x - 2 * PI * j) ** 2)) for j in range(-40, 41) if abs(j) >= 3)
                for x in np.linspace(-PI, PI, 257))
    assert brute <= env <= 2 * math.exp(-(3 * PI) ** 2) / (1 - math.exp(-4 * PI**2))


@pytest.mark.parametrize(
    "phi",
    [Polyharmonic(1, 2), Polyharmonic(2, 2), GeneralizedMultiquadric(1, 0.5, 1.0),
     GeneralizedMultiquadric(2, 2.5, 0.5), Gaussian(2, 1.0)],
)
def test_envelope_dominates_truncated_tails(phi):
    R = 6 * PI
    env = decay_envelope(phi, R)
    first = int(math.floor(R / (2 * PI))) + 1
    rng = np.random.default_rng(3)
    span = 40 if phi.n == 1 else 14
    ax = np.arange(-span, span + 1)
    lattice = np.array(list(itertools.product(ax, repeat=phi.n)))
    lattice = lattice[np.abs(lattice).max(axis=1) >= first]
    for xi in rng.uniform(-PI, PI, size=(20, phi.n)):
        tail = np.exp(log_symbol_points(phi, xi - 2 * PI * lattice)).sum()
        assert tail <= env


@given(families, st.floats(4 * PI, 400.0), st.floats(1.0, 200.0))
def test_envelope_monotone_in_radius(phi, R, dR):
    assert decay_envelope(phi, R + dR) <= decay_envelope(phi, R)


def test_envelope_needs_clearance():
    with pytest.raises(DomainError):
        decay_envelope(Polyharmonic(1, 1), 3 * PI)


# --- regular-family trend ---------------------------------------------------------

def test_multiquadric_order_path_decreases():
    path = FamilyPath(GeneralizedMultiquadric(1, 0.5, 1.0), "multiquadric-order", (0.5, 1.5, 2.5, 5.5, 10.5))
    for j in (1, 2, -1):
        for xi in (PI / 4, PI / 2, 3 * PI / 4):
            col = [m_ratio(phi, j, xi) for phi in path.members()]
            assert all(b < a for a, b in zip(col, col[1:]))


def test_polyharmonic_order_path_closed_form():
    for k in (1, 2, 3):
        assert m_ratio(Polyharmonic(1, k), 1, PI / 2) == pytest.approx(0.2 ** (2 * k), rel=1e-14)
