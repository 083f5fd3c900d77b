import json
import math

import numpy as np
import pytest
from scipy import integrate

from cardinal_mra import (
    CoefficientSequence,
    DomainError,
    Gaussian,
    GeneralizedMultiquadric,
    GramMatrix,
    Polyharmonic,
    ToleranceUnreachable,
    basis_change_L_to_Phi,
    basis_change_Phi_to_L,
    cardinal_interpolant,
    gram_matrix,
    refinement_mask_probe,
    symbol_values,
    synthesize,
)

PI = math.pi
POLY1 = Polyharmonic(1, 1)
POLY2 = Polyharmonic(1, 2)
GMQ = GeneralizedMultiquadric(1, 0.5, 1.0)
GAUSS = Gaussian(1, 1.0)
INTERPOLATORS = [POLY1, POLY2, GMQ]


@pytest.fixture(scope="module")
def tables():
    """Fundamental and scaling tables for the 1-D families (default parameters)."""
    out = {}
    for phi in INTERPOLATORS + [GAUSS]:
        out[phi.label(), "fundamental"] = synthesize(phi, "fundamental")
        out[phi.label(), "scaling"] = synthesize(phi, "scaling")
    return out


# --- synthesize -------------------------------------------------------------------

def test_linear_spline_interpolant_is_the_hat(tables):
    L = tables[POLY1.label(), "fundamental"]
    x = L.axis()
    hat = np.maximum(0.0, 1.0 - np.abs(x))
    assert np.max(np.abs(L.values - hat)) <= 1e-3
    assert L(0.5) == pytest.approx(0.5, abs=1e-3)
    assert L.values.shape == (2 * 16 * 16 + 1,)


@pytest.mark.parametrize("phi", INTERPOLATORS + [GAUSS], ids=lambda p: p.label())
def test_fundamental_is_one_at_origin(tables, phi):
    L = tables[phi.label(), "fundamental"]
    assert abs(L(0.0) - 1.0) <= L.synthesis_error_bound + 1e-8


@pytest.mark.parametrize("which", ["fundamental", "scaling"])
@pytest.mark.parametrize("phi", INTERPOLATORS + [GAUSS], ids=lambda p: p.label())
def test_tables_are_bitwise_even(tables, phi, which):
    v = tables[phi.label(), which].values
    assert np.array_equal(v, v[::-1])


def test_fundamental_at_origin_matches_direct_quadrature():
    """(2 pi)^-1 times the integral of L_hat over R is L(0) = 1."""
    f = lambda xi: float(symbol_values(POLY2, np.array([xi]), "fundamental")[0])
    total = 0.0
    for k in range(-20, 20):
        total += integrate.quad(f, 2 * PI * k, 2 * PI * (k + 1), epsabs=1e-13, limit=200)[0]
    # the k = 2 symbol decays like xi^-4: the remaining tail is below 1e-6
    assert total / (2 * PI) == pytest.approx(1.0, abs=1e-6)


def test_synthesize_validation():
    with pytest.raises(DomainError):
        synthesize(POLY1, "wavelet")
    with pytest.raises(DomainError):
        synthesize(POLY1, M=4)
    with pytest.raises(DomainError):
        synthesize(POLY1, T=2)
    with pytest.raises(DomainError):
        synthesize(POLY1, bandlimit=100.0)
    with pytest.raises(DomainError):
        synthesize(POLY1, bandlimit=2 * PI * 16)  # K = 2 < 4
    with pytest.raises(ToleranceUnreachable):
        synthesize(POLY1, bandlimit=2.0**17 * PI)
    with pytest.raises(ToleranceUnreachable):
        synthesize(POLY1, rel_tol=1e-16)


def test_sampled_function_grid_access(tables):
    L = tables[POLY1.label(), "fundamental"]
    assert L(1.0) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(DomainError):
        L(0.01)
    with pytest.raises(DomainError):
        L(16.0625)
    with pytest.raises(DomainError):
        L([0.0, 0.0])


def test_sampled_function_serialization(tables):
    L = tables[POLY2.label(), "scaling"]
    lines = L.to_csv().splitlines()
    assert lines[0] == "x_1,value"
    assert len(lines) == 1 + L.values.size
    x, v = lines[1].split(",")
    assert float(x) == -16.0 and float(v) == L.values[0]
    doc = json.loads(L.to_json())
    assert doc["type"] == "SampledFunction" and doc["which"] == "scaling"
    assert doc["samples_per_unit"] == 16 and doc["halfwidth"] == 16
    assert doc["synthesis_error_bound"] == L.synthesis_error_bound
    assert doc["family"] == POLY2.to_dict()


def test_synthesis_is_deterministic_and_worker_independent():
    a = synthesize(POLY2, workers=1)
    b = synthesize(POLY2, workers=4)
    assert np.array_equal(a.values, b.values)
    assert a.synthesis_error_bound == b.synthesis_error_bound


# --- cardinal interpolation -------------------------------------------------------

@pytest.mark.parametrize("phi", INTERPOLATORS, ids=lambda p: p.label())
def test_interpolation_property(tables, phi):
    L = tables[phi.label(), "fundamental"]
    m = np.arange(-8, 9, dtype=float)
    s = cardinal_interpolant(L, CoefficientSequence.delta(), m[:, None])
    assert np.max(np.abs(np.array(s) - (m == 0))) <= 1e-6


def test_delta_data_reproduces_the_table(tables):
    L = tables[GMQ.label(), "fundamental"]
    x = L.axis()[::7]
    assert cardinal_interpolant(L, CoefficientSequence.delta(), x[:, None]) == [L(v) for v in x]


def test_hats_sum_to_one_between_nodes(tables):
    L = tables[POLY1.label(), "fundamental"]
    data = CoefficientSequence({0: 1.0, 1: 1.0})
    assert cardinal_interpolant(L, data, [[0.5]])[0] == pytest.approx(1.0, abs=2e-3)


def test_interpolant_range_checks(tables):
    L = tables[POLY1.label(), "fundamental"]
    data = CoefficientSequence({-3: 1.0, 3: 2.0})
    assert len(cardinal_interpolant(L, data, [[10.0]])) == 1
    with pytest.raises(DomainError):
        cardinal_interpolant(L, data, [[10.0625]])
    with pytest.raises(DomainError):
        cardinal_interpolant(L, data, [[0.3]])
    with pytest.raises(DomainError):
        cardinal_interpolant(L, CoefficientSequence({(0, 0): 1.0}, 2), [[0.0, 0.0]])


def test_coefficient_sequence_normalization():
    c = CoefficientSequence({2: 0.0, -1: 3, (4,): -1.5})
    assert c.support == [(-1,), (4,)]
    assert c.get(-1) == 3.0 and c.get(2) == 0.0
    assert c.diameter() == 5
    with pytest.raises(DomainError):
        CoefficientSequence({(1, 2): 1.0}, 1)


# --- Gram matrices ----------------------------------------------------------------

NINE = [(j,) for j in range(-4, 5)]


@pytest.mark.parametrize("phi", INTERPOLATORS, ids=lambda p: p.label())
def test_orthonormal_translates(phi):
    G = gram_matrix(phi, NINE)
    assert G.entries.shape == (9, 9)
    assert G.deviation() <= 1e-6
    assert np.array_equal(G.entries, G.entries.T)


def test_gaussian_translates_are_normalized():
    G = gram_matrix(GAUSS, NINE)
    assert np.max(np.abs(np.diag(G.entries) - 1)) <= 1e-10
    assert G.deviation() <= 1e-6


@pytest.mark.parametrize("phi", INTERPOLATORS + [GAUSS], ids=lambda p: p.label())
def test_single_shift_gram(phi):
    G = gram_matrix(phi, [(0,)])
    assert G.entries.shape == (1, 1)
    assert G.entries[0, 0] == pytest.approx(1.0, abs=1e-10)
    assert G.quadrature_error_bound >= 0


def test_gram_validation_and_serialization():
    with pytest.raises(DomainError):
        gram_matrix(POLY1, [(j,) for j in range(65)])
    with pytest.raises(DomainError):
        gram_matrix(POLY1, [])
    with pytest.raises(DomainError):
        gram_matrix(POLY1, [(0,)], grid_size=7)
    with pytest.raises(DomainError):
        gram_matrix(POLY1, [(0, 0)])
    with pytest.raises(DomainError):
        GramMatrix([(0,), (1,)], np.array([[1.0, 0.1], [0.2, 1.0]]), 0.0)
    G = gram_matrix(POLY2, [(0,), (2,)])
    doc = json.loads(G.to_json())
    assert doc["shifts"] == [[0], [2]]
    assert np.allclose(np.array(doc["entries"]).reshape(2, 2), G.entries, rtol=0, atol=0)


def test_gram_two_dimensional():
    phi = Polyharmonic(2, 2)
    G = gram_matrix(phi, [(0, 0), (1, 0), (0, 1), (1, 1)], grid_size=32, rel_tol=1e-5)
    assert G.deviation() <= 1e-6


@pytest.mark.parametrize(
    "phi, M, T",
    [(POLY1, 128, 16), (POLY2, 16, 16), (GMQ, 16, 16), (GAUSS, 16, 32)],
    ids=["poly1", "poly2", "gmq", "gauss"],
)
def test_plancherel_consistency(phi, M, T):
    Phi = synthesize(phi, "scaling", bandlimit=PI * M * 64, M=M, T=T)
    riemann = math.fsum(Phi.values**2) / M
    diag = gram_matrix(phi, [(0,)]).entries[0, 0]
    assert riemann == pytest.approx(diag, abs=1e-4)


# --- basis change -----------------------------------------------------------------

def test_basis_change_coefficients_of_q():
    b = basis_change_L_to_Phi(POLY1, CoefficientSequence.delta())
    q = lambda xi: float(symbol_values(POLY1, np.array([xi]), "basis-factor")[0])
    b0 = integrate.quad(q, -PI, PI, epsabs=1e-14, points=[0.0])[0] / (2 * PI)
    assert b.get(0) == pytest.approx(b0, abs=1e-10)
    b3 = integrate.quad(lambda t: q(t) * math.cos(3 * t), -PI, PI, epsabs=1e-14, points=[0.0])[0] / (2 * PI)
    assert b.get(3) == pytest.approx(b3, abs=1e-10)
    assert b.get(1) == b.get(-1)


@pytest.mark.parametrize("phi", INTERPOLATORS + [GAUSS], ids=lambda p: p.label())
def test_basis_change_round_trip(phi):
    a = CoefficientSequence({0: 1.0, 2: -0.5, -3: 0.25})
    back = basis_change_Phi_to_L(phi, basis_change_L_to_Phi(phi, a))
    for j in range(-20, 21):
        assert back.get(j) == pytest.approx(a.get(j), abs=1e-8)


def test_basis_change_validation():
    with pytest.raises(DomainError):
        basis_change_L_to_Phi(POLY1, CoefficientSequence.delta(), J=6)
    with pytest.raises(DomainError):
        basis_change_L_to_Phi(POLY1, CoefficientSequence.delta(2))
    with pytest.raises(DomainError):
        basis_change_L_to_Phi(POLY1, CoefficientSequence({600: 1.0}), J=10)


@pytest.mark.parametrize("phi", [POLY1, GMQ], ids=lambda p: p.label())
def test_basis_change_function_equality(phi):
    L = synthesize(phi, "fundamental", T=32)
    Phi = synthesize(phi, "scaling", T=32)
    a = CoefficientSequence({0: 1.0, 1: -0.5})
    b = basis_change_L_to_Phi(phi, a)
    window = CoefficientSequence({j: v for j, v in b.coeffs.items() if abs(j[0]) <= 12})
    rng = np.random.default_rng(5)
    pts = rng.integers(-7 * 16, 7 * 16 + 1, 100) / 16.0
    lhs = np.array(cardinal_interpolant(Phi, window, pts[:, None]))
    rhs = np.array(cardinal_interpolant(L, a, pts[:, None]))
    assert np.max(np.abs(lhs - rhs)) <= 1e-5


# --- refinement probe --------------------------------------------------------------

@pytest.mark.parametrize("phi", [POLY1, POLY2], ids=lambda p: p.label())
def test_refinement_probe_polyharmonic(phi):
    assert refinement_mask_probe(phi) <= 1e-8


def test_refinement_probe_reports_for_other_families():
    v = refinement_mask_probe(GMQ)
    assert math.isfinite(v) and v >= 0
    assert refinement_mask_probe(GMQ) == v


def test_refinement_probe_validation():
    with pytest.raises(DomainError):
        refinement_mask_probe(POLY1, 500)
    with pytest.raises(DomainError):
        refinement_mask_probe(POLY1, 256)
