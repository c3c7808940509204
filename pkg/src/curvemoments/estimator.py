"""Lower estimates of the best extension constant.

K(p, N) is the supremum of ||F_a||_p over unit-l2 coefficient vectors.  The
objective mean|F_a|^p is a polynomial in the coefficients but not concave,
so the engine runs projected gradient ascent from several starts (all-ones,
box-corner-aligned, seeded random) and reports the best value found --
always a certified lower estimate, never claimed to be the supremum.

On a Nyquist grid for even p both the objective and its first variation

    dPhi/d(conj a_n) = (p/2) * avg |F|^{p-2} F exp(-2*pi*i alpha.nu(n))

are quadrature-exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import quadrature
from .core import CoefficientVector, CurveSpec, coefficients, modulated, ones
from .errors import GridTooLarge, OddExponentUnsupported
from .quadrature import DEFAULT_MEM_BUDGET_MB, TorusGrid, phase_tables
from .sharpness import MajorArcBox, k_lower_bound


@dataclass(frozen=True)
class AscentConfig:
    max_iters: int = 200
    step_init: float = 0.5
    step_shrink: float = 0.5
    step_grow: float = 1.4
    armijo: float = 1e-4
    min_step: float = 1e-14
    tol: float = 1e-9
    multistarts: int = 8
    seed: int = 0
    grid_oversample: int = 2  # used only for non-even p
    mem_budget_mb: int = DEFAULT_MEM_BUDGET_MB

    def __post_init__(self) -> None:
        if self.max_iters < 1 or self.multistarts < 1 or self.grid_oversample < 1:
            raise ValueError("iteration, multistart and oversample counts must be >= 1")
        if not (0 < self.tol < 1):
            raise ValueError("tolerance must be in (0, 1)")
        if min(self.step_init, self.step_shrink, self.armijo, self.min_step) <= 0:
            raise ValueError("step parameters must be positive")


@dataclass(frozen=True)
class EstimateResult:
    curve: tuple[int, ...]
    N: int
    p: float
    k_hat: float
    argmax: CoefficientVector
    iterations: int
    converged: bool
    certified_lower: float
    restriction_estimate: float
    objective: float
    objective_history: tuple[float, ...] = field(repr=False, default=())

    def to_dict(self) -> dict:
        return {
            "curve": list(self.curve),
            "N": self.N,
            "p": self.p,
            "k_hat": self.k_hat,
            "iterations": self.iterations,
            "converged": self.converged,
            "certified_lower": self.certified_lower,
            "restriction_estimate": self.restriction_estimate,
            "objective": self.objective,
            "argmax": [[float(v.real), float(v.imag)] for v in self.argmax.values],
        }


def _objective(tables, values: np.ndarray, p: float, dims) -> float:
    """mean over the grid of |F|^p, slab by slab."""
    step = quadrature._slab_rows(dims)
    weighted = tables[0] * values[None, :]
    partial = []
    for r0 in range(0, dims[0], step):
        slab = quadrature._eval_slab(tables, weighted[r0 : r0 + step])
        partial.append(float(quadrature._abs_power(slab, p).sum()))
    return math.fsum(partial) / math.prod(dims)


def _gradient_pairs(tables, values: np.ndarray, p: float, dims) -> np.ndarray:
    """g_n = (p/2) avg |F|^{p-2} F conj(phase_n), complex vector."""
    d = len(dims)
    step = quadrature._slab_rows(dims)
    weighted = tables[0] * values[None, :]
    g = np.zeros(len(values), dtype=complex)
    for r0 in range(0, dims[0], step):
        rows = weighted[r0 : r0 + step]
        slab = quadrature._eval_slab(tables, rows)
        big = np.abs(slab) ** (p - 2) * slab if p != 2 else slab
        t0c = np.conj(tables[0][r0 : r0 + rows.shape[0]])
        if d == 1:
            g += t0c.T @ big
        elif d == 2:
            g += np.einsum("rn,rn->n", t0c, big @ np.conj(tables[1]))
        else:
            for n in range(len(values)):
                w = t0c[:, n].reshape((-1,) + (1,) * (d - 1))
                for ax in range(1, d):
                    shape = [1] * d
                    shape[ax] = -1
                    w = w * np.conj(tables[ax][:, n]).reshape(shape)
                g[n] += (big * w).sum()
    return (p / 2.0) * g / math.prod(dims)


def moment_gradient(
    curve: CurveSpec,
    coeffs: CoefficientVector,
    p: int,
    grid: TorusGrid,
) -> np.ndarray:
    """Partials of Phi(a) = mean|F_a|^p w.r.t. (Re a_n, Im a_n), interleaved.

    Requires even p and a grid meeting the Nyquist bound for u = p/2, which
    make the returned derivatives quadrature-exact.
    """
    if not (isinstance(p, int) or float(p).is_integer()) or int(p) % 2 or p < 2:
        raise OddExponentUnsupported(
            f"analytic gradient needs even integer p >= 2, got {p}"
        )
    p = int(p)
    if not quadrature.is_nyquist(grid, curve, coeffs.N, p // 2):
        raise GridTooLarge(
            f"grid {grid.dims} is below the Nyquist bound for p = {p}; "
            "gradient exactness cannot be certified"
        )
    tables = phase_tables(curve, coeffs.N, grid.dims)
    g = _gradient_pairs(tables, coeffs.values, float(p), grid.dims)
    out = np.empty(2 * len(g))
    out[0::2] = 2.0 * g.real
    out[1::2] = 2.0 * g.imag
    return out


def _starts(curve: CurveSpec, N: int, config: AscentConfig) -> list[np.ndarray]:
    width = 2 * N + 1
    base = ones(N).values / math.sqrt(width)
    corner = MajorArcBox(curve, N).corners()[-1]
    aligned = modulated(curve, ones(N), tuple(-c for c in corner)).values
    aligned = aligned / np.linalg.norm(aligned)
    starts = [base, aligned]
    rng = np.random.default_rng(config.seed)
    for _ in range(max(0, config.multistarts - len(starts))):
        v = rng.standard_normal(width) + 1j * rng.standard_normal(width)
        starts.append(v / np.linalg.norm(v))
    return starts[: max(config.multistarts, 1)]


def _ascend(tables, start: np.ndarray, p: float, dims, config: AscentConfig):
    a = start / np.linalg.norm(start)
    phi = _objective(tables, a, p, dims)
    history = [phi]
    step = config.step_init
    accepted = 0
    converged = False
    for _ in range(config.max_iters):
        v = 2.0 * _gradient_pairs(tables, a, p, dims)
        tangent = v - np.vdot(a, v).real * a
        tnorm2 = float(np.vdot(tangent, tangent).real)
        if tnorm2 <= 1e-30:
            converged = True
            break
        improved = False
        while step >= config.min_step:
            cand = a + step * v
            cand /= np.linalg.norm(cand)
            phi_c = _objective(tables, cand, p, dims)
            if phi_c >= phi + config.armijo * step * tnorm2:
                improved = True
                break
            step *= config.step_shrink
        if not improved:
            converged = True
            break
        gain = phi_c - phi
        a, phi = cand, phi_c
        history.append(phi)
        accepted += 1
        step *= config.step_grow
        if gain <= config.tol * max(phi, 1.0):
            converged = True
            break
    return a, phi, accepted, converged, history


def estimate_K(
    curve: CurveSpec,
    N: int,
    p,
    config: AscentConfig | None = None,
) -> EstimateResult:
    """Best-over-multistarts ascent estimate of the extension constant.

    The all-ones start pins the result at or above the unit-weight floor
    moment^{1/p} / sqrt(2N+1); accepted steps never decrease the objective.
    """
    if p < 2:
        raise ValueError("p must be >= 2")
    config = config or AscentConfig()
    p = float(p)
    even = p.is_integer() and int(p) % 2 == 0
    if even:
        grid = quadrature.nyquist_grid(curve, N, int(p) // 2, config.mem_budget_mb)
    else:
        u_eff = config.grid_oversample * math.ceil(p / 2.0)
        grid = quadrature.nyquist_grid(curve, N, u_eff, config.mem_budget_mb)
    tables = phase_tables(curve, N, grid.dims)
    best = None
    for start in _starts(curve, N, config):
        a, phi, iters, conv, hist = _ascend(tables, start, p, grid.dims, config)
        if best is None or phi > best[1]:
            best = (a, phi, iters, conv, hist)
    a, phi, iters, conv, hist = best
    a = a / np.linalg.norm(a)
    k_hat = phi ** (1.0 / p)
    certified = k_hat
    if even:
        certified = max(k_hat, k_lower_bound(curve, N, int(p), config.mem_budget_mb).value)
    return EstimateResult(
        curve=curve.exponents,
        N=N,
        p=p,
        k_hat=k_hat,
        argmax=coefficients(N, a),
        iterations=iters,
        converged=conv,
        certified_lower=certified,
        restriction_estimate=k_hat * k_hat,
        objective=phi,
        objective_history=tuple(hist),
    )


def restriction_constant(
    curve: CurveSpec,
    N: int,
    p,
    config: AscentConfig | None = None,
) -> float:
    """Duality estimate of the restriction constant: square of the extension
    estimate.  An estimate, not a certified value."""
    return estimate_K(curve, N, p, config).restriction_estimate
