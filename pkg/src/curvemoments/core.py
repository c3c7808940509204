"""Curve specifications, coefficient vectors, and direct evaluation of the
exponential sum

    F_a(alpha) = sum_{|n| <= N} a_n exp(2*pi*i*(alpha_1*n^{k_1} + ... + alpha_d*n^{k_d}))

on the d-torus.  Everything here is pure and immutable; downstream modules
(counting, quadrature, ...) build on these types.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    IntegerOverflow,
    NonIncreasingExponents,
    NonPositiveExponent,
)

# Frequency components and lattice keys are kept inside a signed 128-bit
# range; parameters that would exceed it are rejected rather than silently
# degraded.  (Native ints are unbounded, so this is a contract, not a
# wraparound hazard.)
INTEGER_WIDTH_BITS = 128
KEY_LIMIT = 1 << (INTEGER_WIDTH_BITS - 1)


@dataclass(frozen=True)
class CurveSpec:
    """Integer power curve n -> (n^{k_1}, ..., n^{k_d}) with k_1 < ... < k_d."""

    exponents: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.exponents)

    @property
    def top(self) -> int:
        """Largest exponent k = k_d."""
        return self.exponents[-1]

    @property
    def weight_sum(self) -> int:
        """Sum of the curve exponents; governs the scaling exponents."""
        return sum(self.exponents)

    @property
    def complement(self) -> tuple[int, ...]:
        """Degrees in {1, ..., k} missing from the curve, sorted."""
        return tuple(sorted(set(range(1, self.top + 1)) - set(self.exponents)))

    @property
    def complement_sum(self) -> int:
        return sum(self.complement)

    @property
    def critical_p(self) -> int:
        """Critical integrability exponent k*(k+1)."""
        return self.top * (self.top + 1)

    @property
    def is_full(self) -> bool:
        """True when the curve uses every degree 1..k (empty complement)."""
        return not self.complement

    def label(self) -> str:
        return ",".join(str(k) for k in self.exponents)


def make_curve(exponents: Sequence[int]) -> CurveSpec:
    """Validate an exponent tuple and build the curve specification.

    Raises NonPositiveExponent / NonIncreasingExponents on bad input.
    """
    exps = tuple(int(k) for k in exponents)
    if not exps:
        raise NonIncreasingExponents("exponent tuple must be non-empty")
    if any(k < 1 for k in exps):
        raise NonPositiveExponent(f"exponents must be >= 1, got {exps}")
    if any(a >= b for a, b in zip(exps, exps[1:])):
        raise NonIncreasingExponents(f"exponents must be strictly increasing, got {exps}")
    curve = CurveSpec(exps)
    # complement identity: sum(l_i) = k(k+1)/2 - weight_sum
    assert curve.weight_sum + curve.complement_sum == curve.top * (curve.top + 1) // 2
    return curve


def full_curve(k: int) -> CurveSpec:
    """The complete curve (1, 2, ..., k)."""
    return make_curve(tuple(range(1, k + 1)))


@dataclass(frozen=True)
class TorusPoint:
    """Point on the d-torus, coordinates canonicalized to [0, 1)."""

    coords: tuple[float, ...]

    def __init__(self, coords: Iterable[float]) -> None:
        object.__setattr__(self, "coords", tuple(float(c) % 1.0 for c in coords))

    @property
    def dim(self) -> int:
        return len(self.coords)


def _as_point(point, d: int) -> np.ndarray:
    coords = point.coords if isinstance(point, TorusPoint) else tuple(point)
    if len(coords) != d:
        raise DimensionMismatch(f"point has {len(coords)} coordinates, curve needs {d}")
    return np.asarray([float(c) % 1.0 for c in coords], dtype=float)


@dataclass(frozen=True)
class CoefficientVector:
    """Complex weights a_n for |n| <= N, stored at index n + N.

    ``exact_values`` holds the same entries as Gaussian-integer pairs
    (re, im) whenever every entry is one; exact vectors feed the exact
    counting paths downstream.
    """

    N: int
    values: np.ndarray
    exact_values: tuple[tuple[int, int], ...] | None = None

    def __post_init__(self) -> None:
        if self.N < 0:
            raise ValueError("N must be nonnegative")
        if self.values.shape != (2 * self.N + 1,):
            raise ValueError(
                f"expected {2 * self.N + 1} coefficients, got {self.values.shape}"
            )
        self.values.setflags(write=False)

    @property
    def is_exact(self) -> bool:
        return self.exact_values is not None

    def value(self, n: int) -> complex:
        """Coefficient a_n, n in [-N, N]."""
        return complex(self.values[n + self.N])

    def l2_norm(self) -> float:
        return math.sqrt(self.l2_norm_squared())

    def l2_norm_squared(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2))

    def scaled(self, c: complex) -> "CoefficientVector":
        return coefficients(self.N, self.values * c)

    def normalized(self) -> "CoefficientVector":
        nrm = self.l2_norm()
        if nrm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return coefficients(self.N, self.values / nrm)


def coefficients(N: int, values: Sequence[complex] | np.ndarray) -> CoefficientVector:
    """Build a coefficient vector, tagging it exact when every entry is a
    Gaussian integer."""
    arr = np.asarray(values, dtype=complex).copy()
    exact = None
    if arr.size and all(
        float(v.real).is_integer() and float(v.imag).is_integer() for v in arr
    ):
        exact = tuple((int(v.real), int(v.imag)) for v in arr)
    return CoefficientVector(int(N), arr, exact)


def ones(N: int) -> CoefficientVector:
    return coefficients(N, np.ones(2 * N + 1))


def zero_mean(N: int) -> CoefficientVector:
    """Alternating-sign weights a_n = (-1)^n."""
    n = np.arange(-N, N + 1)
    return coefficients(N, np.where(n % 2 == 0, 1.0, -1.0))


def random_unit(N: int, seed: int = 0) -> CoefficientVector:
    """Seeded complex Gaussian vector normalized to unit l2 norm."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(2 * N + 1) + 1j * rng.standard_normal(2 * N + 1)
    return coefficients(N, v / np.linalg.norm(v))

def random_gaussian_int(N: int, seed: int = 0, spread: int = 9) -> CoefficientVector:
    """Seeded Gaussian-integer vector (exact mode); entries in [-spread, spread]^2."""
    rng = np.random.default_rng(seed)
    re = rng.integers(-spread, spread + 1, size=2 * N + 1)
    im = rng.integers(-spread, spread + 1, size=2 * N + 1)
    return coefficients(N, re + 1j * im)


GENERATORS = {
    "ones": lambda N, seed=0: ones(N),
    "zero-mean": lambda N, seed=0: zero_mean(N),
    "random-unit": random_unit,
    "random-int": random_gaussian_int,
}


def generate(name: str, N: int, seed: int = 0) -> CoefficientVector:
    try:
        gen = GENERATORS[name]
    except KeyError:
        raise ValueError(f"unknown coefficient generator {name!r}") from None
    return gen(N, seed=seed)


def save_coefficients(coeffs: CoefficientVector, path) -> None:
    payload = {
        "N": coeffs.N,
        "values": [[float(v.real), float(v.imag)] for v in coeffs.values],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh)


def load_coefficients(path) -> CoefficientVector:
    with open(path) as fh:
        payload = json.load(fh)
    N = int(payload["N"])
    vals = [complex(re, im) for re, im in payload["values"]]
    if len(vals) != 2 * N + 1:
        raise ValueError(f"expected {2 * N + 1} values, file has {len(vals)}")
    return coefficients(N, vals)


def frequency_map(curve: CurveSpec, N: int) -> list[tuple[int, ...]]:
    """Frequency vectors (n^{k_1}, ..., n^{k_d}) for n = -N..N, in coefficient
    index order.  Exact integers; n = +-|n| may collide when all exponents are
    even."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    if N > 1 and N ** curve.top >= KEY_LIMIT:
        raise IntegerOverflow(
            f"N^k = {N}^{curve.top} exceeds the {INTEGER_WIDTH_BITS}-bit key width"
        )
    return [tuple(n ** k for k in curve.exponents) for n in range(-N, N + 1)]


def _float_frequencies(curve: CurveSpec, N: int) -> np.ndarray:
    """Frequency table as float64, shape (d, 2N+1)."""
    freqs = frequency_map(curve, N)
    return np.asarray(freqs, dtype=float).T


def eval_points(curve: CurveSpec, coeffs: CoefficientVector, points: np.ndarray) -> np.ndarray:
    """Evaluate F_a at many torus points; ``points`` has shape (P, d).

    The phase of each term is reduced modulo 1 before the complex
    exponential is taken, so large frequencies do not inflate the
    trigonometric argument.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float)) % 1.0
    if pts.shape[1] != curve.dim:
        raise DimensionMismatch(
            f"points have dimension {pts.shape[1]}, curve needs {curve.dim}"
        )
    freqs = _float_frequencies(curve, coeffs.N)  # (d, 2N+1)
    # per-term fractional parts, then a final reduction of the sum
    phase = np.zeros((pts.shape[0], 2 * coeffs.N + 1))
    for j in range(curve.dim):
        phase += (pts[:, j : j + 1] * freqs[j]) % 1.0
    phase %= 1.0
    return np.exp(2j * np.pi * phase) @ coeffs.values


def eval_extension(curve: CurveSpec, coeffs: CoefficientVector, point) -> complex:
    """F_a(alpha) at a single torus point."""
    alpha = _as_point(point, curve.dim)
    return complex(eval_points(curve, coeffs, alpha[None, :])[0])


def sup_norm_bound(coeffs: CoefficientVector) -> float:
    """Cauchy-Schwarz sup bound sqrt(2N+1) * ||a||_2; |F| never exceeds it."""
    return math.sqrt((2 * coeffs.N + 1) * coeffs.l2_norm_squared())


def modulated(curve: CurveSpec, coeffs: CoefficientVector, beta) -> CoefficientVector:
    """Multiply each a_n by exp(2*pi*i * beta . nu(n)); shifts F by -beta."""
    b = _as_point(beta, curve.dim)
    freqs = _float_frequencies(curve, coeffs.N)
    phase = np.zeros(2 * coeffs.N + 1)
    for j in range(curve.dim):
        phase += (b[j] * freqs[j]) % 1.0
    return coefficients(coeffs.N, coeffs.values * np.exp(2j * np.pi * (phase % 1.0)))
