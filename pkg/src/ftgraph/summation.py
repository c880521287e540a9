"""Compensated summation of long oscillatory sums.

The closed-form amplitudes and the spectral function add up to 2**N terms of
unit-order magnitude with heavy cancellation, so plain accumulation loses
digits as N grows.
"""
from __future__ import annotations

import math

import numpy as np


class Neumaier:
    """Running Neumaier (improved Kahan) sum over real arrays of a fixed shape.

    Terms are fed one array at a time so callers can generate them lazily
    instead of materialising an ``(n_terms, n_points)`` block.
    """

    def __init__(self, shape=()):
        self.total = np.zeros(shape)
        self.comp = np.zeros(shape)

    def add(self, values) -> None:
        t = self.total + values
        big = np.abs(self.total) >= np.abs(values)
        self.comp += np.where(big, (self.total - t) + values, (values - t) + self.total)
        self.total = t

    @property
    def value(self) -> np.ndarray:
        return self.total + self.comp


def neumaier_sum(terms) -> np.ndarray:
    """Sum ``terms`` along axis 0; complex input is compensated per component."""
    terms = np.asarray(terms)
    if np.iscomplexobj(terms):
        return neumaier_sum(terms.real) + 1j * neumaier_sum(terms.imag)
    acc = Neumaier(terms.shape[1:])
    for row in terms:
        acc.add(row)
    return acc.value


def fsum_complex(values) -> complex:
    """Correctly rounded sum of a 1-D complex sequence (via :func:`math.fsum`)."""
    values = np.asarray(values, dtype=complex)
    return complex(math.fsum(values.real), math.fsum(values.imag))


# -- error-free transformations (double-double building blocks) -------------

_SPLITTER = 134217729.0  # 2**27 + 1


def two_sum(a, b):
    """``a + b = s + e`` exactly."""
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def two_prod(a, b):
    """``a * b = p + e`` exactly (Dekker), valid while ``|a*b|`` is far from overflow."""
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def dd_mul(xh, xl, y):
    """Double-double ``(xh + xl)`` times a plain double ``y``, renormalised."""
    p, e = two_prod(xh, y)
    return two_sum(p, e + xl * y)


def dd_mul_dd(xh, xl, yh, yl):
    p, e = two_prod(xh, yh)
    return two_sum(p, e + (xh * yl + xl * yh))


def dd_add(ah, al, bh, bl):
    s, e = two_sum(ah, bh)
    return two_sum(s, e + al + bl)
