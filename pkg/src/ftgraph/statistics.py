"""Level-spacing statistics and transmission fluctuation diagnostics."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, DegenerateSignalError
from .spectrum import Spectrum

HIST_BIN_WIDTH = 0.2
HIST_RANGE = 4.0
MIN_SCAN_POINTS = 512


@dataclass(frozen=True)
class SpacingSample:
    """Nearest-neighbour spacings rescaled to unit mean."""

    spacings: np.ndarray
    n_levels_used: int
    n_discarded_low: int


@dataclass(frozen=True)
class DistributionComparison:
    bin_edges: np.ndarray
    densities: np.ndarray
    ks_wigner: float
    ks_poisson: float


def unfold(spec, discard_low: int = 50) -> SpacingSample:
    """Drop the lowest ``discard_low`` levels and divide spacings by their mean.

    The smooth level density is constant in ``k`` (``2L/pi``), so one global
    mean spacing unfolds the sequence. ``spec`` may be a :class:`Spectrum` or
    any increasing sequence of levels.
    """
    roots = np.asarray(spec.roots if isinstance(spec, Spectrum) else spec, dtype=float)
    if discard_low < 0:
        raise ArgumentError("discard_low must be >= 0")
    if len(roots) < discard_low + 100:
        raise ArgumentError(f"need at least {discard_low + 100} levels, got {len(roots)}")
    kept = roots[discard_low:]
    gaps = np.diff(kept)
    if np.any(gaps < 0):
        raise ArgumentError("levels must be sorted")
    return SpacingSample(gaps / gaps.mean(), len(kept), discard_low)


def wigner_pdf(s):
    """GOE surmise ``(pi/2) s exp(-pi s^2 / 4)``."""
    s = _nonneg(s)
    return 0.5 * np.pi * s * np.exp(-0.25 * np.pi * s * s)


def poisson_pdf(s):
    s = _nonneg(s)
    return np.exp(-s)


def wigner_cdf(s):
    return -np.expm1(-0.25 * np.pi * np.square(s))


def poisson_cdf(s):
    return -np.expm1(-np.asarray(s, dtype=float))


REFERENCE_CDFS = {"wigner": wigner_cdf, "poisson": poisson_cdf}


def _nonneg(s):
    arr = np.asarray(s, dtype=float)
    if np.any(arr < 0):
        raise ArgumentError("spacing must be >= 0")
    return arr if arr.ndim else float(arr)


def ks_distance(sample, reference: str) -> float:
    """Sup distance between the empirical CDF of ``sample`` and a reference CDF.

    Both one-sided gaps are checked at every jump, so the left limit of the
    empirical step counts as well.
    """
    spacings = sample.spacings if isinstance(sample, SpacingSample) else sample
    x = np.sort(np.asarray(spacings, dtype=float))
    if len(x) == 0:
        raise ArgumentError("empty sample")
    try:
        cdf = REFERENCE_CDFS[reference](x)
    except KeyError:
        raise ArgumentError(f"reference must be one of {sorted(REFERENCE_CDFS)}") from None
    n = len(x)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - cdf), np.max(cdf - (i - 1) / n)))


def compare(sample: SpacingSample, bin_width: float = HIST_BIN_WIDTH, s_max: float = HIST_RANGE) -> DistributionComparison:
    """Density histogram plus KS distances to both references.

    Bins of ``bin_width`` start at 0 and run to ``s_max``, extended as needed
    to cover the largest spacing so the density integrates to one.
    """
    top = max(s_max, float(np.max(sample.spacings)))
    nbins = int(math.ceil(top / bin_width - 1e-12))
    edges = bin_width * np.arange(nbins + 1)
    if edges[-1] < top:
        edges = np.append(edges, edges[-1] + bin_width)
    densities, edges = np.histogram(sample.spacings, bins=edges, density=True)
    return DistributionComparison(
        bin_edges=edges,
        densities=densities,
        ks_wigner=ks_distance(sample, "wigner"),
        ks_poisson=ks_distance(sample, "poisson"),
    )


@dataclass(frozen=True)
class Autocorrelation:
    lags: np.ndarray
    values: np.ndarray
    width: float


def transmission_autocorrelation(k, signal, max_lag: float) -> Autocorrelation:
    """Normalised autocorrelation of a transmission scan on a uniform grid.

    ``C(dk) = <d(k) d(k+dk)> / <d(k)^2>`` with ``d`` the mean-subtracted
    signal; each lag averages over the ``n - m`` overlapping pairs. ``width``
    is the first lag where ``C`` drops to 1/2 (linear interpolation), or
    ``nan`` if it never does within ``max_lag``.
    """
    k = np.asarray(k, dtype=float)
    y = np.asarray(signal, dtype=float)
    if k.shape != y.shape or k.ndim != 1:
        raise ArgumentError("k and signal must be matching 1-D arrays")
    if len(k) < MIN_SCAN_POINTS:
        raise ArgumentError(f"need at least {MIN_SCAN_POINTS} scan points, got {len(k)}")
    dk = np.diff(k)
    step = dk.mean()
    if step <= 0 or np.max(np.abs(dk - step)) > 1e-9 * max(1.0, abs(k[-1])):
        raise ArgumentError("scan must be on a uniform increasing k-grid")
    d = y - y.mean()
    var = np.mean(d * d)
    if var <= 1e-28 * max(1.0, float(np.mean(y * y))):
        raise DegenerateSignalError("signal has zero variance")
    m_max = min(len(k) - 1, int(math.floor(max_lag / step + 1e-9)))
    n = len(d)
    # full linear autocorrelation via zero-padded FFT
    size = 1 << int(math.ceil(math.log2(2 * n)))
    spec = np.fft.rfft(d, size)
    raw = np.fft.irfft(spec * np.conj(spec), size)[: m_max + 1]
    values = raw / (n - np.arange(m_max + 1)) / var
    values[0] = 1.0
    lags = step * np.arange(m_max + 1)
    below = np.nonzero(values <= 0.5)[0]
    if len(below):
        j = below[0]
        c0, c1 = values[j - 1], values[j]
        width = lags[j - 1] + (c0 - 0.5) / (c0 - c1) * step
    else:
        width = float("nan")
    return Autocorrelation(lags, values, float(width))


def count_local_extrema(signal) -> int:
    """Interior points where the discrete slope changes sign."""
    dy = np.diff(np.asarray(signal, dtype=float))
    dy = dy[dy != 0]
    return int(np.count_nonzero(dy[:-1] * dy[1:] < 0))
