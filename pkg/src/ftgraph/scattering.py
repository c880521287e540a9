"""Scattering amplitudes of N identical scale-invariant defects.

Three independent routes to the same numbers:

* :func:`recursive_amplitudes` peels the leftmost defect off and composes it
  with the amplitudes of the rest,
* :func:`closed_form_amplitudes` evaluates the explicit exponential sums
  ``T = gamma**N / D(k)`` and ``R = B(k) / D(k)`` term by term (2**N terms),
* :func:`transfer_matrix_amplitudes` multiplies 2x2 plane-wave transfer
  matrices derived directly from the connection condition, O(N).

Every ``*_arrays`` function is vectorised over a 1-D grid of momenta and
returns ``(T, R, Tprime, Rprime)`` arrays; the scalar functions wrap them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import ArgumentError, CapacityError, DegeneracyError
from .model import Coupling, DefectArray, ScatteringAmplitudes
from .summation import dd_add, dd_mul, dd_mul_dd, fsum_complex, neumaier_sum

MAX_CLOSED_FORM_N = 24
MAX_ENUMERATE_N = 20
DEGENERACY_THRESHOLD = 1e-14
FREQUENCY_MERGE_TOL = 1e-12
METHODS = ("recursion", "closedform", "transfer")

# Below this many momenta a term-major fsum beats a point-major Neumaier loop.
_FSUM_POINTS = 8


def _momenta(k) -> np.ndarray:
    ks = np.atleast_1d(np.asarray(k, dtype=float))
    if ks.ndim != 1:
        raise ArgumentError("momenta must form a 1-D grid")
    if not np.all(np.isfinite(ks)) or np.any(ks <= 0.0):
        raise ArgumentError("momentum k must be finite and > 0")
    return ks


def _wrap(k, arrays) -> ScatteringAmplitudes:
    T, R, Tp, Rp = (complex(a[0]) for a in arrays)
    return ScatteringAmplitudes(float(k), T, R, Tp, Rp)


# -- single defect ---------------------------------------------------------

def single_defect_amplitudes(c: Coupling, s: float, k: float) -> ScatteringAmplitudes:
    """Amplitudes of one defect at ``s``; ``|T|`` does not depend on ``k`` or ``s``."""
    (kk,) = _momenta(k)
    T = c.gamma
    R = c.beta * np.exp(2j * kk * s)
    return ScatteringAmplitudes(kk, T, complex(R), T.conjugate(), -complex(R).conjugate())


# -- recursion -------------------------------------------------------------

def _recursive_left(c: Coupling, pos: np.ndarray, ks: np.ndarray):
    """Left-incidence ``(T, R)`` for positions in the given (not necessarily sorted) order."""
    T = np.ones_like(ks, dtype=complex)
    R = np.zeros_like(ks, dtype=complex)
    t1 = c.gamma
    for s in pos[::-1]:
        r1 = c.beta * np.exp(2j * ks * s)
        den = 1.0 + np.conj(r1) * R
        if np.any(np.abs(den) < DEGENERACY_THRESHOLD):
            raise DegeneracyError("recursion denominator vanished")
        T, R = t1 * T / den, (r1 + R) / den
    return T, R


def recursive_arrays(c: Coupling, d: DefectArray, k):
    ks = _momenta(k)
    pos = d.as_array()
    T, R = _recursive_left(c, pos, ks)
    Tr, Rr = _recursive_left(c, pos[::-1], ks)
    # right-incidence amplitudes: conjugated left amplitudes of the reversed list
    return T, R, np.conj(Tr), -np.conj(Rr)


def recursive_amplitudes(c: Coupling, d: DefectArray, k: float) -> ScatteringAmplitudes:
    """Compose single-defect amplitudes from the left; ``N = 0`` is the free line."""
    return _wrap(k, recursive_arrays(c, d, k))


# -- closed form -----------------------------------------------------------

def alternating_chains(pos) -> tuple[np.ndarray, np.ndarray]:
    """Every strictly decreasing index chain ``i > j > m > ...`` of ``pos``.

    Returns ``(orders, sums)``: the chain length and the alternating sum
    ``s_i - s_j + s_m - ...`` (plus sign on the largest index), in order of
    increasing length and, within a length, lexicographic over the
    decreasing index tuples. The empty chain comes first with sum 0.
    """
    pos = np.asarray(pos, dtype=float)
    n = len(pos)
    orders, sums = [np.zeros(1, dtype=int)], [np.zeros(1)]
    for length in range(1, n + 1):
        idx = np.array(list(combinations(range(n - 1, -1, -1), length)), dtype=int)
        signs = np.where(np.arange(length) % 2 == 0, 1.0, -1.0)
        sums.append((pos[idx] * signs).sum(axis=1))
        orders.append(np.full(len(idx), length))
    return np.concatenate(orders), np.concatenate(sums)


def _dd_cmul(hi: np.ndarray, lo: np.ndarray, f: np.ndarray):
    """Double-double complex ``(hi + lo)`` times plain complex ``f``."""
    fr, fi = f.real, f.imag
    rh, rl = dd_add(*dd_mul(hi.real, lo.real, fr), *dd_mul(hi.imag, lo.imag, -fi))
    ih, il = dd_add(*dd_mul(hi.real, lo.real, fi), *dd_mul(hi.imag, lo.imag, fr))
    return rh + 1j * ih, rl + 1j * il


def chain_phasors(pos, ks: np.ndarray, exact_products: bool = True):
    """``(orders, hi, lo)`` phasors of every decreasing index chain at momenta ``ks``.

    ``hi + lo`` is ``exp(2i k_n (s_i - s_j + s_m - ...))`` for chain ``j`` in
    double-double precision, built as a product of the per-defect phasors
    ``exp(2i k s)`` and their conjugates rather than from the rounded
    alternating sum. All terms then belong to one consistently perturbed
    geometry, and the products themselves add no rounding, so the heavy
    cancellation inside ``D_N`` cannot amplify independent term errors.
    Rows follow the chain order of :func:`alternating_chains`. With
    ``exact_products=False`` the products are rounded and ``lo`` is zero.
    """
    pos = np.asarray(pos, dtype=float)
    n = len(pos)
    ph = np.exp(2j * np.outer(pos, ks))
    orders = [np.zeros(1, dtype=int)]
    his = [np.ones((1, len(ks)), dtype=complex)]
    los = [np.zeros((1, len(ks)), dtype=complex)]
    for length in range(1, n + 1):
        idx = np.array(list(combinations(range(n - 1, -1, -1), length)), dtype=int)
        hi = ph[idx[:, 0]].copy()
        lo = np.zeros_like(hi)
        for col in range(1, length):
            f = ph[idx[:, col]]
            f = np.conj(f) if col % 2 else f
            if exact_products:
                hi, lo = _dd_cmul(hi, lo, f)
            else:
                hi *= f
        orders.append(np.full(len(idx), length))
        his.append(hi)
        los.append(lo)
    return np.concatenate(orders), np.concatenate(his), np.concatenate(los)


def beta_powers(beta: float, max_order: int):
    """``beta**l`` for ``l = 0..max_order`` as double-double ``(hi, lo)`` arrays."""
    hi = np.ones(max_order + 1)
    lo = np.zeros(max_order + 1)
    for l in range(1, max_order + 1):
        hi[l], lo[l] = dd_mul(hi[l - 1], lo[l - 1], beta)
    return hi, lo


def momentum_chunks(n_defects: int, ks: np.ndarray, max_elems: int = 1 << 22):
    """Split ``ks`` so a ``(2**n_defects, chunk)`` block stays below ``max_elems``."""
    step = max(1, max_elems >> n_defects)
    for lo in range(0, len(ks), step):
        yield slice(lo, lo + step)


def sum_terms(hi: np.ndarray, lo: np.ndarray) -> np.ndarray:
    """Compensated column sums of double-double ``(n_terms, n_points)`` blocks."""
    terms = np.concatenate([hi, lo])
    if terms.shape[1] <= _FSUM_POINTS:
        return np.array([fsum_complex(col) for col in terms.T])
    return neumaier_sum(terms)


def closed_form_sums(c: Coupling, pos, ks: np.ndarray):
    """``(D_N(k), B_N(k))`` for positions in the given order."""
    D = np.empty(len(ks), dtype=complex)
    B = np.zeros(len(ks), dtype=complex)
    bh, bl = beta_powers(c.beta, len(pos))
    for sl in momentum_chunks(len(pos), ks):
        orders, ph, pl = chain_phasors(pos, ks[sl])
        ch, cl = bh[orders][:, None], bl[orders][:, None]
        rh, rl = dd_mul_dd(ph.real, pl.real, ch, cl)
        ih, il = dd_mul_dd(ph.imag, pl.imag, ch, cl)
        th, tl = rh + 1j * ih, rl + 1j * il
        even = orders % 2 == 0
        D[sl] = sum_terms(th[even], tl[even])
        if np.any(~even):
            B[sl] = sum_terms(th[~even], tl[~even])
    return D, B


def _closed_form_left(c: Coupling, pos: np.ndarray, ks: np.ndarray):
    D, B = closed_form_sums(c, pos, ks)
    if np.any(np.abs(D) < DEGENERACY_THRESHOLD):
        raise DegeneracyError("closed-form denominator D_N(k) vanished")
    return c.gamma ** len(pos) / D, B / D


def closed_form_arrays(c: Coupling, d: DefectArray, k):
    if d.n > MAX_CLOSED_FORM_N:
        raise CapacityError(f"closed form enumerates 2**N terms; N={d.n} > {MAX_CLOSED_FORM_N}")
    ks = _momenta(k)
    pos = d.as_array()
    T, R = _closed_form_left(c, pos, ks)
    Tr, Rr = _closed_form_left(c, pos[::-1], ks)
    return T, R, np.conj(Tr), -np.conj(Rr)


def closed_form_amplitudes(c: Coupling, d: DefectArray, k: float) -> ScatteringAmplitudes:
    """Evaluate ``T = gamma**N / D`` and ``R = B / D`` from the explicit sums."""
    return _wrap(k, closed_form_arrays(c, d, k))


# -- transfer matrices -----------------------------------------------------

def transfer_arrays(c: Coupling, d: DefectArray, k):
    """O(N) amplitudes from products of per-defect transfer matrices.

    Writing ``psi = A exp(ikx) + B exp(-ikx)`` on each interval, the
    connection condition at ``s`` maps left coefficients to right ones by

        M(s) = exp(i phi) / t * [[1,                   beta exp(-2iks)],
                                 [beta exp(2iks),      1              ]]

    with ``t = 2 alpha / (1 + alpha**2)``. Only the bracketed matrix ``K`` is
    multiplied out; the scalar prefactor is restored analytically using
    ``det M(s) = exp(2 i phi)``, which keeps the product finite for extreme
    ``alpha``. From ``M = M_N ... M_1``:

        T  = det M / M22,   R  = M21 / M22,
        T' = 1 / M22,       R' = -M12 / M22.
    """
    ks = _momenta(k)
    beta = c.beta
    p11 = np.ones_like(ks, dtype=complex)
    p22 = np.ones_like(ks, dtype=complex)
    p12 = np.zeros_like(ks, dtype=complex)
    p21 = np.zeros_like(ks, dtype=complex)
    for s in d.positions:
        up = beta * np.exp(2j * ks * s)
        down = np.conj(up)
        p11, p12, p21, p22 = (
            p11 + down * p21,
            p12 + down * p22,
            up * p11 + p21,
            up * p12 + p22,
        )
    n = d.n
    # M22 = (e^{i phi}/t)^N K22 and det M = e^{2iN phi}
    T = c.gamma ** n / p22
    Tp = np.conj(c.gamma) ** n / p22
    return T, p21 / p22, Tp, -p12 / p22


def transfer_matrix_amplitudes(c: Coupling, d: DefectArray, k: float) -> ScatteringAmplitudes:
    """O(N) transfer-matrix amplitudes; the default method for scans."""
    return _wrap(k, transfer_arrays(c, d, k))


_ARRAY_METHODS = {
    "recursion": recursive_arrays,
    "closedform": closed_form_arrays,
    "transfer": transfer_arrays,
}


def amplitude_arrays(c: Coupling, d: DefectArray, k, method: str = "transfer"):
    """Dispatch to one of :data:`METHODS` over a momentum grid."""
    try:
        fn = _ARRAY_METHODS[method]
    except KeyError:
        raise ArgumentError(f"unknown method {method!r}; choose from {METHODS}") from None
    return fn(c, d, k)


# -- frequency content -----------------------------------------------------

@dataclass(frozen=True)
class ClosedFormTerms:
    """Distinct oscillation frequencies of the sums ``D_N(k)`` and ``B_N(k)``.

    Each entry is ``(frequency, orders)``: a term ``exp(i * frequency * k)``
    whose coefficient is ``sum(beta**l for l in orders)``. ``orders`` has more
    than one element only where distinct chains share a frequency.
    """

    d_terms: tuple
    b_terms: tuple

    @property
    def d_frequencies(self) -> np.ndarray:
        return np.array([f for f, _ in self.d_terms])

    @property
    def b_frequencies(self) -> np.ndarray:
        return np.array([f for f, _ in self.b_terms])

    def d_coefficients(self, beta: float) -> np.ndarray:
        return np.array([sum(beta ** l for l in orders) for _, orders in self.d_terms])

    def b_coefficients(self, beta: float) -> np.ndarray:
        return np.array([sum(beta ** l for l in orders) for _, orders in self.b_terms])


def _merge(freq: np.ndarray, orders: np.ndarray, tol: float) -> tuple:
    perm = np.argsort(freq, kind="stable")
    merged = []
    for f, l in zip(freq[perm], orders[perm]):
        if merged and f - merged[-1][0] <= tol:
            merged[-1][1].append(int(l))
        else:
            merged.append((float(f), [int(l)]))
    return tuple((f, tuple(ls)) for f, ls in merged)


def enumerate_frequencies(d: DefectArray, tol: float = FREQUENCY_MERGE_TOL) -> ClosedFormTerms:
    """List the frequencies ``2 * (s_i - s_j + s_m - ...)`` of ``D_N`` and ``B_N``.

    Frequencies closer than ``tol`` are merged; for incommensurate positions
    both lists hold exactly ``2**(N-1)`` entries.
    """
    if not 1 <= d.n <= MAX_ENUMERATE_N:
        raise CapacityError(f"frequency enumeration needs 1 <= N <= {MAX_ENUMERATE_N}, got {d.n}")
    orders, sums = alternating_chains(d.as_array())
    even = orders % 2 == 0
    return ClosedFormTerms(
        d_terms=_merge(2.0 * sums[even], orders[even], tol),
        b_terms=_merge(2.0 * sums[~even], orders[~even], tol),
    )
