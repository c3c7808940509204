"""Lower bounds on moments and extension constants.

Two constructions with a_n = 1: the diagonal tuples give
moment >= (2N+1)^{p/2}, and on the box |alpha_i| <= 1/(8 d N^{k_i}) every
phase stays within pi/4, so Re F >= (sqrt(2)/2)(2N+1) there and the box
contributes ((sqrt(2)/2)(2N+1))^p * |box| to the moment.  All constants are
explicit so each claim is checkable as a plain inequality.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import CoefficientVector, CurveSpec, eval_points, ones
from .counting import MomentValue, moment_auto
from .quadrature import DEFAULT_MEM_BUDGET_MB

COS_QUARTER_PI = math.sqrt(2.0) / 2.0


@dataclass(frozen=True)
class MajorArcBox:
    """Box around the origin where the unit-weight sum stays of size ~N."""

    curve: CurveSpec
    N: int

    @property
    def half_widths(self) -> tuple[float, ...]:
        d = self.curve.dim
        return tuple(1.0 / (8 * d * self.N ** k) for k in self.curve.exponents)

    @property
    def measure(self) -> float:
        return math.prod(2.0 * w for w in self.half_widths)

    def corners(self) -> list[tuple[float, ...]]:
        return [
            tuple(s * w for s, w in zip(signs, self.half_widths))
            for signs in itertools.product((-1.0, 1.0), repeat=self.curve.dim)
        ]

    def sample(self, count: int, seed: int = 0) -> np.ndarray:
        rng = np.random.default_rng(seed)
        hw = np.asarray(self.half_widths)
        return rng.uniform(-hw, hw, size=(count, self.curve.dim))


def diagonal_lower_bound(N: int, u: int) -> int:
    """Count of diagonal solutions (m_i) = (n_i): (2N+1)^u, a moment floor."""
    return (2 * N + 1) ** u


def major_arc_min(curve: CurveSpec, N: int, samples: int, seed: int = 0) -> float:
    """Minimum of Re F over seeded box samples plus all 2^d corners, a_n = 1.

    Never falls below (sqrt(2)/2)(2N+1): each of the d phases is at most
    2*pi/(8d) in magnitude, so their sum stays within pi/4.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    box = MajorArcBox(curve, N)
    pts = np.vstack([box.sample(samples, seed), np.asarray(box.corners())])
    values = eval_points(curve, ones(N), pts)
    return float(values.real.min())


def major_arc_moment_bound(curve: CurveSpec, N: int, p: int) -> float:
    """((sqrt(2)/2)(2N+1))^p * |box|: what the box alone puts under |F|^p."""
    if p % 2 != 0:
        raise ValueError("p must be even")
    box = MajorArcBox(curve, N)
    return (COS_QUARTER_PI * (2 * N + 1)) ** p * box.measure


class KLowerBound(NamedTuple):
    """Certified floor for the extension constant from the a_n = 1 probe."""

    value: float            # moment^{1/p} / sqrt(2N+1), the true l2 normalization
    paper_normalized: float  # moment^{1/p} / sqrt(N), for cross-reading
    moment: MomentValue


def k_lower_bound(
    curve: CurveSpec,
    N: int,
    p: int,
    mem_budget_mb: int = DEFAULT_MEM_BUDGET_MB,
) -> KLowerBound:
    """Extension-constant floor ||F_1||_p / ||1||_2 = moment^{1/p} / sqrt(2N+1)."""
    if p % 2 != 0 or p < 2:
        raise ValueError("p must be a positive even integer")
    moment = moment_auto(curve, ones(N), p // 2, mem_budget_mb)
    root = moment.value ** (1.0 / p)
    return KLowerBound(
        value=root / math.sqrt(2 * N + 1),
        paper_normalized=root / math.sqrt(N) if N > 0 else math.inf,
        moment=moment,
    )


@dataclass(frozen=True)
class SharpnessReport:
    """All lower bounds for one (curve, N, p) with a_n = 1, plus the checks."""

    curve: tuple[int, ...]
    N: int
    p: int
    moment: float
    moment_exact: bool
    diagonal_bound: float
    major_arc_bound: float
    box_measure: float
    arc_min: float
    arc_floor: float
    k_lower: float
    k_lower_paper: float
    moment_above_diagonal: bool
    moment_above_major_arc: bool
    arc_min_above_floor: bool

    @property
    def all_hold(self) -> bool:
        return (
            self.moment_above_diagonal
            and self.moment_above_major_arc
            and self.arc_min_above_floor
        )

    def to_dict(self) -> dict:
        return {
            "curve": list(self.curve),
            "N": self.N,
            "p": self.p,
            "lambda": self.moment,
            "lambda_exact": self.moment_exact,
            "diag_lb": self.diagonal_bound,
            "major_arc_lb": self.major_arc_bound,
            "box_measure": self.box_measure,
            "arc_min": self.arc_min,
            "arc_floor": self.arc_floor,
            "k_lower": self.k_lower,
            "k_lower_paper_normalized": self.k_lower_paper,
            "moment_above_diagonal": self.moment_above_diagonal,
            "moment_above_major_arc": self.moment_above_major_arc,
            "arc_min_above_floor": self.arc_min_above_floor,
        }


def sharpness_report(
    curve: CurveSpec,
    N: int,
    p: int,
    samples: int = 1000,
    seed: int = 0,
    mem_budget_mb: int = DEFAULT_MEM_BUDGET_MB,
) -> SharpnessReport:
    """Compute every lower bound for a_n = 1 and verify the inequalities."""
    if p % 2 != 0 or p < 2:
        raise ValueError("p must be a positive even integer")
    u = p // 2
    box = MajorArcBox(curve, N)
    lower = k_lower_bound(curve, N, p, mem_budget_mb)
    moment = lower.moment
    diag = float(diagonal_lower_bound(N, u))
    arc_bound = major_arc_moment_bound(curve, N, p)
    arc_min = major_arc_min(curve, N, samples, seed)
    floor = COS_QUARTER_PI * (2 * N + 1)
    return SharpnessReport(
        curve=curve.exponents,
        N=N,
        p=p,
        moment=moment.value,
        moment_exact=moment.exact,
        diagonal_bound=diag,
        major_arc_bound=arc_bound,
        box_measure=box.measure,
        arc_min=arc_min,
        arc_floor=floor,
        k_lower=lower.value,
        k_lower_paper=lower.paper_normalized,
        moment_above_diagonal=moment.value >= diag,
        moment_above_major_arc=moment.value >= arc_bound,
        arc_min_above_floor=arc_min >= floor,
    )
