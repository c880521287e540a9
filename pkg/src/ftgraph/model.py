"""Physical parameters shared by every part of the package.

A defect is a scale-invariant point interaction: the wavefunction and its
derivative jump as

    psi(s+0)  = exp(i phi) / alpha * psi(s-0)
    psi'(s+0) = exp(i phi) * alpha * psi'(s-0)

No length scale enters these conditions, so a single defect scatters
identically at every energy.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError

TWO_PI = 2.0 * math.pi
MAX_GENERATED_DEFECTS = 24


@dataclass(frozen=True)
class Coupling:
    """Common strength ``alpha`` and phase ``phi`` of every defect.

    ``alpha`` may be any finite nonzero real; ``alpha`` and ``-alpha`` give the
    same reflection strength ``beta``. ``phi`` is reduced into ``[0, 2*pi)``.
    """

    alpha: float
    phi: float = 0.0

    def __post_init__(self):
        alpha = float(self.alpha)
        phi = float(self.phi)
        if not math.isfinite(alpha) or alpha == 0.0:
            raise ArgumentError(f"alpha must be finite and nonzero, got {self.alpha!r}")
        if not math.isfinite(phi):
            raise ArgumentError(f"phi must be finite, got {self.phi!r}")
        phi = math.fmod(phi, TWO_PI)
        if phi < 0.0:
            phi += TWO_PI
        if phi >= TWO_PI:
            phi = 0.0
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "phi", phi)

    @classmethod
    def from_theta(cls, theta: float, phi: float = 0.0) -> "Coupling":
        """Build from the mixing angle of the unitary ``U``, ``alpha = -cot(theta/2)``."""
        half = 0.5 * theta
        s = math.sin(half)
        if s == 0.0:
            raise ArgumentError("theta = 0 mod 2*pi gives an infinite alpha")
        return cls(-math.cos(half) / s, phi)

    @property
    def theta(self) -> float:
        """Mixing angle in ``(-pi, pi)`` with ``alpha = -cot(theta/2)``."""
        return -2.0 * math.atan(1.0 / self.alpha)

    @property
    def beta(self) -> float:
        """Signed single-defect reflection strength, ``(1 - a^2) / (1 + a^2)``."""
        a2 = self.alpha * self.alpha
        return (1.0 - a2) / (1.0 + a2)

    @property
    def transmission_modulus(self) -> float:
        """Signed ``2a / (1 + a^2)``; equals ``|gamma|`` up to the sign of alpha."""
        return 2.0 * self.alpha / (1.0 + self.alpha * self.alpha)

    @property
    def gamma(self) -> complex:
        """Single-defect transmission amplitude ``2a/(1+a^2) * exp(i phi)``."""
        return self.transmission_modulus * cmath.exp(1j * self.phi)


@dataclass(frozen=True)
class DefectArray:
    """Strictly increasing, finite defect positions ``s_1 < ... < s_N``."""

    positions: tuple = field(default=())

    def __post_init__(self):
        pos = tuple(float(x) for x in self.positions)
        if not all(math.isfinite(x) for x in pos):
            raise ArgumentError("defect positions must be finite")
        if any(b <= a for a, b in zip(pos, pos[1:])):
            raise ArgumentError("defect positions must be strictly increasing")
        object.__setattr__(self, "positions", pos)

    def __len__(self):
        return len(self.positions)

    def __iter__(self):
        return iter(self.positions)

    @property
    def n(self) -> int:
        return len(self.positions)

    def as_array(self) -> np.ndarray:
        return np.array(self.positions, dtype=float)

    def scaled(self, factor: float) -> "DefectArray":
        return DefectArray(tuple(factor * x for x in self.positions))


@dataclass(frozen=True)
class ScatteringAmplitudes:
    """Left-incidence ``T, R`` and right-incidence ``Tprime, Rprime`` at momentum ``k``.

    Sign convention: for a wave incident from the left the solution reads
    ``exp(ikx) - R exp(-ikx)`` to the left of all defects and ``T exp(ikx)``
    to the right of them.
    """

    k: float
    T: complex
    R: complex
    Tprime: complex
    Rprime: complex

    @property
    def transmission(self) -> float:
        return abs(self.T) ** 2

    @property
    def reflection(self) -> float:
        return abs(self.R) ** 2

    def as_tuple(self) -> tuple:
        return (self.T, self.R, self.Tprime, self.Rprime)

    def max_difference(self, other: "ScatteringAmplitudes") -> float:
        return max(abs(a - b) for a, b in zip(self.as_tuple(), other.as_tuple()))


def prime_sequence(count: int) -> list[int]:
    """First ``count`` terms of ``1, 2, 3, 5, 7, 11, ...`` (1 counted as the first)."""
    if count <= 0:
        return []
    seq = [1]
    candidate = 2
    while len(seq) < count:
        if all(candidate % p for p in seq[1:] if p * p <= candidate):
            seq.append(candidate)
        candidate += 1
    return seq


def _check_generated_size(n: int) -> int:
    if isinstance(n, bool) or int(n) != n:
        raise ArgumentError(f"N must be an integer, got {n!r}")
    n = int(n)
    if not 0 <= n <= MAX_GENERATED_DEFECTS:
        raise ArgumentError(f"N must lie in [0, {MAX_GENERATED_DEFECTS}], got {n}")
    return n


def sqrt_prime_positions(n: int) -> DefectArray:
    """Positions ``s_i = sum_{j<=i} sqrt(p_j)`` with ``p = 1, 2, 3, 5, 7, ...``.

    The square-root gaps are mutually incommensurate, which stands in for a
    generic random arrangement.
    """
    n = _check_generated_size(n)
    gaps = np.sqrt(np.array(prime_sequence(n), dtype=float))
    return DefectArray(tuple(np.cumsum(gaps)))


def fig3_box_halflength(n: int) -> float:
    """Half-length ``L`` of the level-statistics box for ``n`` defects.

    Fixed by ``s_1 : 2L = 1 : (p_1 + ... + p_{n+1})`` with ``s_1 = 1``, using
    the plain prime sum (not square roots).
    """
    n = _check_generated_size(n)
    if n == 0:
        raise ArgumentError("the box rule needs at least one defect")
    return 0.5 * sum(prime_sequence(n + 1))


BOX_RULES = ("printed", "sqrt")


def fig3_geometry(n: int, rule: str = "printed") -> tuple[DefectArray, float]:
    """Defects and box half-length for the level-statistics experiment.

    ``"printed"`` keeps :func:`sqrt_prime_positions` and takes ``L`` from
    :func:`fig3_box_halflength`. ``"sqrt"`` reads the box rule with square
    roots instead: the ``n + 1`` intervals between the walls have lengths
    ``sqrt(p_1), ..., sqrt(p_{n+1})``, so the first defect sits ``s_1 = 1``
    from the left wall.
    """
    if rule == "printed":
        return sqrt_prime_positions(n), fig3_box_halflength(n)
    if rule == "sqrt":
        n = _check_generated_size(n)
        gaps = np.sqrt(np.array(prime_sequence(n + 1), dtype=float))
        L = 0.5 * float(gaps.sum())
        return DefectArray(tuple(-L + np.cumsum(gaps[:-1]))), L
    raise ArgumentError(f"box rule must be one of {BOX_RULES}, got {rule!r}")
