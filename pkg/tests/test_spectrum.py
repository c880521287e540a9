import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ftgraph import (
    ArgumentError,
    Coupling,
    DefectArray,
    IncompleteSpectrumError,
    SpectralProblem,
    fig3_geometry,
    find_spectrum,
    level_count,
    oracle_spectrum,
    residual_eq19,
    spectral_function,
    sqrt_prime_positions,
)
from ftgraph import spectrum as spectrum_mod
from ftgraph.spectrum import matching_determinant, spectral_derivative, spectral_function_from_residual

HALF_PI = math.pi / 2


def box(alpha=2.0, positions=(), L=HALF_PI):
    return SpectralProblem(Coupling(alpha), DefectArray(positions), L)


@st.composite
def problems(draw, max_n=5):
    alpha = draw(st.floats(0.2, 5.0)) * draw(st.sampled_from([1, -1]))
    L = draw(st.floats(1.0, 6.0))
    n = draw(st.integers(0, max_n))
    fr = sorted(draw(st.lists(st.floats(-0.95, 0.95), min_size=n, max_size=n, unique=True)))
    pos = [L * f for f in fr]
    if any(b - a < 1e-3 for a, b in zip(pos, pos[1:])):
        pos = pos[:1]
    return box(alpha, tuple(pos), L)


def test_free_box_roots():
    spec = find_spectrum(box(), 10.5)
    np.testing.assert_allclose(spec.roots, np.arange(1, 11), atol=1e-10)


@pytest.mark.parametrize("alpha", [0.3, 1.5, 5.0, 27.0, -4.0])
def test_centered_defect_keeps_box_levels(alpha):
    spec = find_spectrum(box(alpha, (0.0,)), 40.5)
    np.testing.assert_allclose(spec.roots, np.arange(1, 41), atol=1e-10)


def test_phase_rejected():
    with pytest.raises(ArgumentError):
        SpectralProblem(Coupling(2.0, 0.5), DefectArray(), 1.0)


@pytest.mark.parametrize("pos,L", [((1.0,), 1.0), ((-2.0,), 1.5), ((), 0.0), ((), -1.0)])
def test_geometry_validated(pos, L):
    with pytest.raises(ArgumentError):
        SpectralProblem(Coupling(2.0), DefectArray(pos), L)


@given(problems(), st.floats(0.05, 30))
def test_single_and_free_formula(p, k):
    if p.n == 0:
        assert spectral_function(p, k) == pytest.approx(math.sin(2 * k * p.L), abs=1e-13)
    elif p.n == 1:
        s = p.defects.positions[0]
        expected = math.sin(2 * k * p.L) + p.coupling.beta * math.sin(2 * k * s)
        assert spectral_function(p, k) == pytest.approx(expected, abs=1e-13)


@given(problems(), st.floats(0.05, 30))
def test_residual_normalisation(p, k):
    assert spectral_function_from_residual(p, k) == pytest.approx(spectral_function(p, k), abs=1e-10)


@given(problems(), st.floats(0.05, 30))
def test_derivative_matches_difference(p, k):
    h = 1e-6
    fd = (spectral_function(p, k + h) - spectral_function(p, k - h)) / (2 * h)
    scale = 2 * p.L * (1 + abs(p.coupling.beta)) ** p.n
    assert spectral_derivative(p, k) == pytest.approx(fd, abs=1e-5 * scale)


def test_residual_free_box_zero():
    p = box(L=1.3)
    assert abs(residual_eq19(p, math.pi / (2 * p.L))) < 1e-13


@pytest.mark.parametrize("n", range(1, 6))
def test_transparent_defect_residual(n):
    p = box(1.0, (0.2,), L=1.1)
    assert abs(residual_eq19(p, n * math.pi / (2 * p.L))) < 1e-13


def test_wall_limit():
    # a nearly opaque defect splits the box: Neumann-Dirichlet on the left
    # piece (alpha -> infinity forces psi' -> 0 from the left) and
    # Dirichlet-Dirichlet on the right piece
    L, s = 3.0, 0.7
    spec = find_spectrum(box(1e6, (s,), L), 20.0)
    left = (np.arange(1, 40) - 0.5) * math.pi / (L + s)
    right = np.arange(1, 40) * math.pi / (L - s)
    expected = np.sort(np.concatenate([left, right]))
    expected = expected[expected <= 20.0]
    assert len(spec) == len(expected)
    np.testing.assert_allclose(spec.roots, expected, rtol=1e-4)


def test_small_alpha_swaps_pieces():
    L, s = 3.0, 0.7
    spec = find_spectrum(box(1e-6, (s,), L), 20.0)
    left = np.arange(1, 40) * math.pi / (L + s)
    right = (np.arange(1, 40) - 0.5) * math.pi / (L - s)
    expected = np.sort(np.concatenate([left, right]))
    expected = expected[expected <= 20.0]
    np.testing.assert_allclose(spec.roots, expected, rtol=1e-4)


@given(problems(), st.floats(0.3, 25))
def test_prufer_count_matches_roots(p, k_max):
    spec = find_spectrum(p, k_max)
    assert len(spec) == level_count(p, k_max)
    assert spec.weyl_deviation(p) <= p.n + 2
    assert np.all(np.diff(spec.roots) > 0)


@given(problems(max_n=4), st.floats(0.3, 12))
def test_oracle_agrees(p, k_max):
    fast, slow = find_spectrum(p, k_max), oracle_spectrum(p, k_max)
    assert len(fast) == len(slow)
    np.testing.assert_allclose(fast.roots, slow.roots, atol=1e-8)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("alpha", [1.5, 27.0])
def test_oracle_fig3_geometry(n, alpha):
    d, L = fig3_geometry(n)
    p = SpectralProblem(Coupling(alpha), d, L)
    k_max = 205 * p.mean_spacing
    fast, slow = find_spectrum(p, k_max), oracle_spectrum(p, k_max)
    np.testing.assert_allclose(fast.roots[:200], slow.roots[:200], atol=1e-8)


def test_oracle_determinant_vanishes_at_levels():
    p = SpectralProblem(Coupling(2.0), sqrt_prime_positions(3), 6.0)
    roots = find_spectrum(p, 5.0).roots
    scale = np.max(np.abs(matching_determinant(p, np.linspace(0.1, 5, 400))))
    assert np.max(np.abs(matching_determinant(p, roots))) < 1e-8 * scale


def test_oracle_free_box_equals_fast():
    p = box(L=2.0)
    assert oracle_spectrum(p, 20.0).roots.tolist() == pytest.approx(find_spectrum(p, 20.0).roots.tolist(), abs=1e-12)


@given(problems(max_n=3), st.floats(0.2, 5.0))
def test_scale_covariance(p, c):
    k_max = 10.0
    a = find_spectrum(p, k_max)
    b = find_spectrum(p.scaled(1 / c), k_max * c)
    n = min(len(a), len(b))
    assert abs(len(a) - len(b)) <= 1
    np.testing.assert_allclose(b.roots[:n] / c, a.roots[:n], rtol=1e-10)


@given(problems(max_n=4))
def test_sign_of_alpha_irrelevant(p):
    flipped = SpectralProblem(Coupling(-p.coupling.alpha), p.defects, p.L)
    np.testing.assert_allclose(find_spectrum(p, 15.0).roots, find_spectrum(flipped, 15.0).roots, atol=1e-11)


def test_level_on_k_max_is_kept():
    p = SpectralProblem(Coupling(0.3), DefectArray((0.25,)), 0.5)
    k_star = 70 * math.pi
    assert abs(spectral_function(p, k_star)) < 1e-12
    assert find_spectrum(p, k_star).roots[-1] == pytest.approx(k_star, rel=1e-12)


def test_weyl_bound_fig3_n7():
    d, L = fig3_geometry(7)
    p = SpectralProblem(Coupling(2.0), d, L)
    spec = find_spectrum(p, 2100 * p.mean_spacing)
    assert len(spec) >= 2000
    assert spec.weyl_deviation(p) <= p.n + 2


def test_incomplete_spectrum_reports_windows(monkeypatch):
    p = SpectralProblem(Coupling(2.0), sqrt_prime_positions(3), 6.0)
    # pretend the exact counter sees one extra level everywhere
    real = spectrum_mod.level_count
    monkeypatch.setattr(spectrum_mod, "level_count", lambda q, k: real(q, k) + 1)
    with pytest.raises(IncompleteSpectrumError) as info:
        find_spectrum(p, 10.0)
    assert info.value.windows
    assert info.value.partial is not None and len(info.value.partial) > 0
