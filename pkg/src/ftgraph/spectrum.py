"""Dirichlet bound states of the defect chain inside the box ``[-L, L]``.

Levels are the positive zeros of the real spectral function

    F(k) = sin 2kL + beta * sum_i sin 2k s_i
         + beta**2 * sum_{i>j} sin 2k(L - s_i + s_j) + ...

(2**N terms; even chains carry ``L`` minus the alternating sum, odd chains
the alternating sum itself). Only ``phi = 0`` is covered.

:func:`find_spectrum` brackets sign changes of ``F`` and bisects them. Its
completeness check uses a Prufer-angle shooting count, which gives the exact
number of levels below any ``k``; windows whose root count disagrees are
rescanned on a finer grid. :func:`oracle_spectrum` solves the same problem
from scratch as a dense plane-wave matching determinant.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, IncompleteSpectrumError
from .model import Coupling, DefectArray
from .scattering import alternating_chains, chain_phasors, momentum_chunks, transfer_arrays
from .summation import neumaier_sum

log = logging.getLogger(__name__)

ORACLE_MAX_N = 8
REFINE_ROUNDS = 4
WINDOW_SPACINGS = 64
ORACLE_GRID_PER_SPACING = 32


@dataclass(frozen=True)
class SpectralProblem:
    """Defects with common coupling inside Dirichlet walls at ``x = -L`` and ``x = L``."""

    coupling: Coupling
    defects: DefectArray
    L: float

    def __post_init__(self):
        if self.coupling.phi != 0.0:
            raise ArgumentError("bound states are only defined here for phi = 0")
        L = float(self.L)
        if not math.isfinite(L) or L <= 0.0:
            raise ArgumentError(f"half-length L must be finite and > 0, got {self.L!r}")
        pos = self.defects.positions
        if pos and not (-L < pos[0] and pos[-1] < L):
            raise ArgumentError("every defect must lie strictly inside (-L, L)")
        object.__setattr__(self, "L", L)

    @property
    def n(self) -> int:
        return self.defects.n

    @property
    def mean_spacing(self) -> float:
        """Mean level spacing in ``k``, ``pi / (2L)``."""
        return math.pi / (2.0 * self.L)

    def weyl_count(self, k) -> np.ndarray:
        return 2.0 * self.L * np.asarray(k, dtype=float) / math.pi

    def scaled(self, factor: float) -> "SpectralProblem":
        return SpectralProblem(self.coupling, self.defects.scaled(factor), factor * self.L)


@dataclass(frozen=True)
class Spectrum:
    """Sorted levels ``k_n`` in ``(0, k_max]`` with their ``|F(k_n)|`` residuals."""

    roots: np.ndarray
    k_max: float
    residuals: np.ndarray

    def __len__(self):
        return len(self.roots)

    def count_below(self, k: float) -> int:
        return int(np.searchsorted(self.roots, k, side="right"))

    def weyl_deviation(self, problem: SpectralProblem) -> float:
        """``max |N(k) - 2Lk/pi|`` over the staircase, checked just before and at each level."""
        if len(self.roots) == 0:
            return float(problem.weyl_count(self.k_max))
        w = problem.weyl_count(self.roots)
        n = np.arange(1, len(self.roots) + 1)
        dev = max(np.max(np.abs(n - w)), np.max(np.abs(n - 1 - w)))
        return float(max(dev, abs(len(self.roots) - problem.weyl_count(self.k_max))))


# -- spectral function -----------------------------------------------------

def _spectral_sums(p: SpectralProblem, ks: np.ndarray, derivative: bool = False) -> np.ndarray:
    pos = p.defects.as_array()
    orders, sums = alternating_chains(pos)
    coef = p.coupling.beta ** orders.astype(float)
    even = orders % 2 == 0
    # wave number multiplying each term: 2(L - a) for even chains, 2a for odd
    rate = np.where(even, 2.0 * (p.L - sums), 2.0 * sums)
    out = np.empty(len(ks))
    for sl in momentum_chunks(len(pos), ks):
        _, ph, _ = chain_phasors(pos, ks[sl], exact_products=False)
        wall = np.exp(2j * p.L * ks[sl])
        # even chains: exp(2ikL) * conj(phasor) = exp(2ik(L - a)); odd: phasor itself
        z = np.where(even[:, None], wall[None, :] * np.conj(ph), ph)
        terms = z.real * rate[:, None] if derivative else z.imag
        out[sl] = neumaier_sum(terms * coef[:, None])
    return out


def spectral_function(p: SpectralProblem, k):
    """Evaluate ``F(k)``; scalar in, float out, array in, array out."""
    ks = np.atleast_1d(np.asarray(k, dtype=float))
    if np.any(ks < 0.0) or not np.all(np.isfinite(ks)):
        raise ArgumentError("spectral function needs finite k >= 0")
    out = _spectral_sums(p, ks)
    return float(out[0]) if np.ndim(k) == 0 else out


def spectral_derivative(p: SpectralProblem, k):
    """Analytic ``dF/dk``; used to split grid cells hiding a close pair of levels."""
    ks = np.atleast_1d(np.asarray(k, dtype=float))
    out = _spectral_sums(p, ks, derivative=True)
    return float(out[0]) if np.ndim(k) == 0 else out


def residual_eq19(p: SpectralProblem, k):
    """``(R - w)(R' - w) - T T'`` with ``w = exp(-2ikL)``, amplitudes from transfer matrices.

    Vanishes exactly at the levels. It relates to the spectral function by

        F(k) = Re[ i * D_N(k) * residual / (2 w) ],   D_N = gamma**N / T,

    see :func:`spectral_function_from_residual`.
    """
    ks = np.atleast_1d(np.asarray(k, dtype=float))
    T, R, Tp, Rp = transfer_arrays(p.coupling, p.defects, ks)
    w = np.exp(-2j * p.L * ks)
    res = (R - w) * (Rp - w) - T * Tp
    return complex(res[0]) if np.ndim(k) == 0 else res


def spectral_function_from_residual(p: SpectralProblem, k):
    """Recover ``F(k)`` from :func:`residual_eq19` via the normalisation factor ``i D / (2w)``."""
    ks = np.atleast_1d(np.asarray(k, dtype=float))
    T = transfer_arrays(p.coupling, p.defects, ks)[0]
    D = p.coupling.gamma ** p.n / T
    w = np.exp(-2j * p.L * ks)
    F = np.real(1j * D * residual_eq19(p, ks) / (2.0 * w))
    return float(F[0]) if np.ndim(k) == 0 else F


# -- exact counting --------------------------------------------------------

def prufer_phase(p: SpectralProblem, k) -> np.ndarray:
    """Prufer angle at ``x = L`` of the solution with ``psi(-L) = 0``.

    On a free interval the angle ``atan2(k psi, psi')`` advances by exactly
    ``k * length``; a defect rescales ``tan`` of the angle by ``1/alpha**2``
    without leaving the current branch of width ``pi``. The angle is
    continuous and increasing in ``k`` and equals ``n * pi`` at the ``n``-th
    level, so ``floor(phase / pi)`` counts the levels below ``k``. ``alpha``
    and ``-alpha`` give the same levels (a sign flip of ``psi`` past each
    defect), so only ``|alpha|`` is used.
    """
    ks = np.asarray(k, dtype=float)
    a = abs(p.coupling.alpha)
    edges = [-p.L, *p.defects.positions, p.L]
    theta = np.zeros_like(ks)
    for i, (x0, x1) in enumerate(zip(edges, edges[1:])):
        if i > 0:
            m = np.floor(theta / math.pi)
            r = theta - m * math.pi
            theta = m * math.pi + np.arctan2(np.sin(r) / a, a * np.cos(r))
        theta = theta + ks * (x1 - x0)
    return theta


def level_count(p: SpectralProblem, k) -> np.ndarray:
    """Number of levels strictly below ``k`` (exact away from the levels themselves)."""
    return np.floor(prufer_phase(p, k) / math.pi).astype(int)


# -- root search -----------------------------------------------------------

def _bisect(f, a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised bisection of sign-changing brackets to adjacent doubles."""
    a, b = a.copy(), b.copy()
    fa = f(a)
    for _ in range(200):
        m = 0.5 * (a + b)
        active = np.nonzero((m > a) & (m < b))[0]
        if len(active) == 0:
            break
        fm = f(m[active])
        left = np.sign(fm) == np.sign(fa[active])
        a[active[left]] = m[active[left]]
        fa[active[left]] = fm[left]
        b[active[~left]] = m[active[~left]]
    return a, b


def _polish(f, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Bisect and return whichever final endpoint has the smaller ``|f|``."""
    if len(a) == 0:
        return np.empty(0)
    a, b = _bisect(f, a, b)
    return np.where(np.abs(f(a)) <= np.abs(f(b)), a, b)


class _Scanner:
    """Sign-change bracketing of ``f`` on per-window grids.

    When ``df`` is given, cells whose ends share a sign but whose slope turns
    are split at the extremum if ``f`` changes sign there, recovering close
    pairs of levels that fall inside a single cell.
    """

    def __init__(self, f, df=None):
        self.f = f
        self.df = df

    def brackets(self, windows, step):
        """``(a, b, window_index)`` for every sign change in the given windows.

        Each window ``(lo, hi)`` gets its own uniform grid with cells no wider
        than ``step``, plus one cell past ``hi`` so a level on the edge is
        still bracketed; brackets beyond ``hi`` are dropped later.
        """
        grids, owner = [], []
        for w, (lo, hi) in windows:
            n = max(2, int(math.ceil((hi - lo) / step)))
            grids.append(np.linspace(lo, hi + (hi - lo) / n, n + 2))
            owner.append(np.full(n + 1, w))
        ka = np.concatenate([g[:-1] for g in grids])
        kb = np.concatenate([g[1:] for g in grids])
        owner = np.concatenate(owner)
        pts = np.concatenate(grids)
        vals = self.f(pts)
        split = np.cumsum([len(g) for g in grids])[:-1]
        fa = np.concatenate([v[:-1] for v in np.split(vals, split)])
        fb = np.concatenate([v[1:] for v in np.split(vals, split)])
        sa, sb = np.sign(fa), np.sign(fb)
        # a grid point that is an exact zero becomes a degenerate bracket
        hit = sb == 0
        cross = sa * sb < 0
        a = [ka[cross], kb[hit]]
        b = [kb[cross], kb[hit]]
        who = [owner[cross], owner[hit]]
        if self.df is not None:
            calm = sa * sb > 0
            dvals = self.df(pts)
            da = np.concatenate([v[:-1] for v in np.split(dvals, split)])
            db = np.concatenate([v[1:] for v in np.split(dvals, split)])
            turn = calm & (da * db < 0)
            if np.any(turn):
                ea, eb = _bisect(self.df, ka[turn], kb[turn])
                ext = 0.5 * (ea + eb)
                flip = np.sign(self.f(ext)) == -sa[turn]
                a += [ka[turn][flip], ext[flip]]
                b += [ext[flip], kb[turn][flip]]
                who += [owner[turn][flip]] * 2
        return np.concatenate(a), np.concatenate(b), np.concatenate(who)

    def roots(self, a, b):
        degenerate = a == b
        out = np.empty(len(a))
        out[degenerate] = a[degenerate]
        out[~degenerate] = _polish(self.f, a[~degenerate], b[~degenerate])
        return out


def _window_edges(p: SpectralProblem, k_max: float) -> np.ndarray:
    """Window boundaries, nudged off any level so the exact counts are unambiguous."""
    width = WINDOW_SPACINGS * p.mean_spacing
    m = max(1, int(math.ceil(k_max / width)))
    edges = np.linspace(0.0, k_max, m + 1)
    inner = edges[1:-1]
    for _ in range(8):
        frac = prufer_phase(p, inner) / math.pi
        close = np.abs(frac - np.round(frac)) < 1e-6
        if not np.any(close):
            break
        inner[close] += 1e-3 * p.mean_spacing
    edges[1:-1] = inner
    return edges


def _expected_counts(p: SpectralProblem, edges: np.ndarray) -> np.ndarray:
    counts = level_count(p, edges)
    counts[0] = 0
    # a level sitting on k_max itself belongs to (0, k_max]
    top = prufer_phase(p, edges[-1]) / math.pi
    if abs(top - round(top)) < 1e-9:
        counts[-1] = int(round(top))
    return np.diff(counts)


def _keep(roots, owner, edges):
    """Drop roots outside their window; a root within rounding above ``k_max`` is ``k_max``."""
    lo, hi = edges[owner], edges[owner + 1]
    k_max = edges[-1]
    roots = np.where((roots > k_max) & (roots - k_max <= 1e-12 * k_max), k_max, roots)
    inside = (roots > lo) & (roots <= hi)
    return roots[inside], owner[inside]


def _search(p: SpectralProblem, k_max: float, step0: float, scanner: _Scanner) -> Spectrum:
    edges = _window_edges(p, k_max)
    want = _expected_counts(p, edges)
    windows = list(enumerate(zip(edges[:-1], edges[1:])))
    a, b, who = scanner.brackets(windows, step0)
    roots, owner = _keep(scanner.roots(a, b), who, edges)
    found = np.bincount(owner, minlength=len(want))
    step = step0
    for _ in range(REFINE_ROUNDS):
        bad = np.nonzero(found != want)[0]
        if len(bad) == 0:
            break
        step *= 0.5
        log.debug("rescanning %d window(s) at step %g", len(bad), step)
        ra, rb, rw = scanner.brackets([windows[w] for w in bad], step)
        new_roots, new_owner = _keep(scanner.roots(ra, rb), rw, edges)
        stale = np.isin(owner, bad)
        roots = np.concatenate([roots[~stale], new_roots])
        owner = np.concatenate([owner[~stale], new_owner])
        found = np.bincount(owner, minlength=len(want))
    order = np.argsort(roots, kind="stable")
    roots = roots[order]
    spec = Spectrum(roots, float(k_max), np.abs(spectral_function(p, roots)) if len(roots) else np.empty(0))
    bad = np.nonzero(found != want)[0]
    if len(bad):
        windows_info = [(float(edges[w]), float(edges[w + 1]), int(found[w]), int(want[w])) for w in bad]
        raise IncompleteSpectrumError(
            f"{len(bad)} window(s) kept a wrong level count after {REFINE_ROUNDS} refinements",
            windows=windows_info,
            partial=spec,
        )
    return spec


def find_spectrum(p: SpectralProblem, k_max: float, base_grid_per_mean_spacing: int = 8) -> Spectrum:
    """All levels in ``(0, k_max]`` as zeros of the spectral function.

    ``F`` is sampled ``base_grid_per_mean_spacing`` times per mean spacing and
    sign changes are bisected to adjacent doubles (well past a relative
    tolerance of 1e-12). Each window of 64 mean spacings is checked against
    the exact level count; mismatched windows are rescanned at half the
    step, up to four times, before :class:`IncompleteSpectrumError` is raised.
    """
    if not k_max > 0.0 or not math.isfinite(k_max):
        raise ArgumentError("k_max must be finite and > 0")
    if base_grid_per_mean_spacing < 1:
        raise ArgumentError("base_grid_per_mean_spacing must be >= 1")
    scanner = _Scanner(lambda k: _spectral_sums(p, k), lambda k: _spectral_sums(p, k, derivative=True))
    return _search(p, float(k_max), p.mean_spacing / base_grid_per_mean_spacing, scanner)


# -- dense oracle ----------------------------------------------------------

def matching_matrix(p: SpectralProblem, ks: np.ndarray) -> np.ndarray:
    """``(len(ks), 2N+2, 2N+2)`` plane-wave matching systems.

    Unknowns are ``(A_j, B_j)`` of ``psi = A_j exp(ikx) + B_j exp(-ikx)`` on
    interval ``j = 0..N``. Rows: Dirichlet at ``-L``, then per defect the
    value and (divided by ``k``) derivative conditions, then Dirichlet at ``L``.
    """
    a = p.coupling.alpha
    n = p.n
    size = 2 * n + 2
    M = np.zeros((len(ks), size, size), dtype=complex)
    e = lambda x: np.exp(1j * ks * x)  # noqa: E731
    M[:, 0, 0] = e(-p.L)
    M[:, 0, 1] = e(p.L)
    for j, s in enumerate(p.defects.positions):
        ep, em = e(s), e(-s)
        r = 1 + 2 * j
        # psi(s+0) - psi(s-0) / alpha
        M[:, r, 2 * j] = -ep / a
        M[:, r, 2 * j + 1] = -em / a
        M[:, r, 2 * j + 2] = ep
        M[:, r, 2 * j + 3] = em
        # [psi'(s+0) - alpha psi'(s-0)] / k
        M[:, r + 1, 2 * j] = -1j * a * ep
        M[:, r + 1, 2 * j + 1] = 1j * a * em
        M[:, r + 1, 2 * j + 2] = 1j * ep
        M[:, r + 1, 2 * j + 3] = -1j * em
    M[:, -1, -2] = e(p.L)
    M[:, -1, -1] = e(-p.L)
    return M


def matching_determinant(p: SpectralProblem, k) -> np.ndarray:
    """Real determinant of the matching system.

    Switching each interval to the real basis ``(cos kx, sin kx)`` multiplies
    the plane-wave determinant by ``(i/2)**(N+1)`` and makes every row real,
    so that product is real up to rounding.
    """
    ks = np.atleast_1d(np.asarray(k, dtype=float))
    det = np.linalg.det(matching_matrix(p, ks)) * (0.5j) ** (p.n + 1)
    return det.real


def oracle_spectrum(p: SpectralProblem, k_max: float) -> Spectrum:
    """Brute-force levels from sign changes of the dense matching determinant (``N <= 8``).

    The grid is 32 points per mean spacing; completeness is checked and
    refined exactly as in :func:`find_spectrum`. Residuals are ``|F(k_n)|``.
    """
    if p.n > ORACLE_MAX_N:
        raise ArgumentError(f"oracle is dense and limited to N <= {ORACLE_MAX_N}")
    if not k_max > 0.0 or not math.isfinite(k_max):
        raise ArgumentError("k_max must be finite and > 0")
    scanner = _Scanner(lambda k: matching_determinant(p, k))
    return _search(p, float(k_max), p.mean_spacing / ORACLE_GRID_PER_SPACING, scanner)
