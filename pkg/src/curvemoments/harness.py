"""Sweeps over (curve, N, p), scaling-exponent fits, and report emission.

A sweep produces one row per (N, p) carrying the moment (exact where the
counting budget allows, grid quadrature otherwise -- the exactness flag
always says which), the lower bounds for the unit-weight probe, estimator
output, and the reduction-check diagnostics.  Fitting log(value) against
log(N) then compares the slope with the predicted growth exponent:
p - weight_sum for moments at p >= k(k+1), and the lower-bound envelope
max(p/2, p - weight_sum) below that threshold.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone

import numpy as np

from ._version import __version__
from .core import CurveSpec, generate, load_coefficients, make_curve
from .counting import moment_auto
from .errors import ConfigInvalid, EngineError, InsufficientRows, IoFailure
from .estimator import AscentConfig, estimate_K
from .quadrature import DEFAULT_MEM_BUDGET_MB
from .reduction import theorem_bound_check, verify_decomposition, verify_dominance
from .sharpness import sharpness_report

CSV_COLUMNS = [
    "curve",
    "N",
    "p",
    "lambda",
    "lambda_exact",
    "diag_lb",
    "major_arc_lb",
    "k_lower",
    "k_hat",
    "a_hat",
    "decomp_residual",
    "dominance_max_ratio",
    "bound_ratio",
    "notes",
]

KNOWN_CHECKS = ("moment", "reduce", "sharpness", "estimate")


@dataclass(frozen=True)
class SweepConfig:
    curve: tuple[int, ...]
    N_list: tuple[int, ...]
    p_list: tuple[int, ...]
    coeffs: str = "ones"
    seed: int = 0
    checks: tuple[str, ...] = ("moment",)
    fit_quantity: str | None = None
    fit_tolerance: float = 0.6
    samples: int = 1000
    multistarts: int = 8
    mem_budget_mb: int = DEFAULT_MEM_BUDGET_MB
    include_timestamp: bool = True

    def validate(self) -> None:
        try:
            make_curve(self.curve)
        except EngineError as exc:
            raise ConfigInvalid(f"bad curve: {exc}") from exc
        if not self.N_list or not self.p_list:
            raise ConfigInvalid("N and p lists must be non-empty")
        if any(b <= a for a, b in zip(self.N_list, self.N_list[1:])):
            raise ConfigInvalid(f"N list must be strictly increasing: {self.N_list}")
        if any(N < 1 for N in self.N_list):
            raise ConfigInvalid("N values must be >= 1")
        if any(p < 2 or p % 2 for p in self.p_list):
            raise ConfigInvalid(f"p values must be even and >= 2: {self.p_list}")
        unknown = set(self.checks) - set(KNOWN_CHECKS)
        if unknown:
            raise ConfigInvalid(f"unknown checks: {sorted(unknown)}")
        if self.fit_quantity is not None:
            if self.fit_quantity not in ("lambda", "K"):
                raise ConfigInvalid(f"fit quantity must be lambda or K: {self.fit_quantity}")
            if len(self.N_list) < 3:
                raise ConfigInvalid("exponent fits need at least 3 values of N")
        if self.mem_budget_mb < 1 or self.samples < 1 or self.multistarts < 1:
            raise ConfigInvalid("budgets, samples and multistarts must be positive")


@dataclass
class SweepRow:
    curve: str
    N: int
    p: int
    lam: float | None = None
    lambda_exact: bool | None = None
    diag_lb: float | None = None
    major_arc_lb: float | None = None
    k_lower: float | None = None
    k_hat: float | None = None
    a_hat: float | None = None
    decomp_residual: float | None = None
    dominance_max_ratio: float | None = None
    bound_ratio: float | None = None
    notes: str = ""

    def to_dict(self) -> dict:
        return {
            "curve": self.curve,
            "N": self.N,
            "p": self.p,
            "lambda": self.lam,
            "lambda_exact": self.lambda_exact,
            "diag_lb": self.diag_lb,
            "major_arc_lb": self.major_arc_lb,
            "k_lower": self.k_lower,
            "k_hat": self.k_hat,
            "a_hat": self.a_hat,
            "decomp_residual": self.decomp_residual,
            "dominance_max_ratio": self.dominance_max_ratio,
            "bound_ratio": self.bound_ratio,
            "notes": self.notes,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SweepRow":
        return cls(
            curve=d["curve"],
            N=int(d["N"]),
            p=int(d["p"]),
            lam=d.get("lambda"),
            lambda_exact=d.get("lambda_exact"),
            diag_lb=d.get("diag_lb"),
            major_arc_lb=d.get("major_arc_lb"),
            k_lower=d.get("k_lower"),
            k_hat=d.get("k_hat"),
            a_hat=d.get("a_hat"),
            decomp_residual=d.get("decomp_residual"),
            dominance_max_ratio=d.get("dominance_max_ratio"),
            bound_ratio=d.get("bound_ratio"),
            notes=d.get("notes") or "",
        )


@dataclass(frozen=True)
class FitResult:
    quantity: str
    p: int
    slope: float
    intercept: float
    residual: float
    predicted: float
    tolerance: float
    verdict: bool
    in_theorem_range: bool
    n_points: int
    alt_predicted: float | None = None
    note: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class SweepReport:
    config: SweepConfig
    rows: list[SweepRow] = field(default_factory=list)
    fits: list[FitResult] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)
    version: str = __version__

    def to_dict(self, include_timestamp: bool | None = None) -> dict:
        stamp = (
            self.config.include_timestamp
            if include_timestamp is None
            else include_timestamp
        )
        return {
            "version": self.version,
            "generated_at": datetime.now(timezone.utc).isoformat() if stamp else None,
            "config": asdict(self.config),
            "rows": [r.to_dict() for r in self.rows],
            "fits": [f.to_dict() for f in self.fits],
            "failures": self.failures,
        }


def _row_coefficients(config: SweepConfig, N: int):
    if config.coeffs.startswith("file:"):
        coeffs = load_coefficients(config.coeffs[5:])
        if coeffs.N != N:
            raise ConfigInvalid(
                f"coefficient file has N={coeffs.N}, sweep row wants N={N}"
            )
        return coeffs
    return generate(config.coeffs, N, seed=config.seed)


def run_sweep(config: SweepConfig) -> SweepReport:
    """One row per (N, p); check failures are recorded on the row and in
    report.failures, never aborting the sweep."""
    config.validate()
    curve = make_curve(config.curve)
    report = SweepReport(config)
    for N in config.N_list:
        for p in config.p_list:
            row = SweepRow(curve.label(), N, p)
            notes: list[str] = []
            u = p // 2
            try:
                coeffs = _row_coefficients(config, N)
            except (EngineError, OSError, ValueError) as exc:
                row.notes = f"coefficients: {type(exc).__name__}: {exc}"
                report.failures.append(row.notes)
                report.rows.append(row)
                continue
            if "moment" in config.checks:
                try:
                    mom = moment_auto(curve, coeffs, u, config.mem_budget_mb)
                    row.lam = mom.value
                    row.lambda_exact = mom.exact
                except EngineError as exc:
                    notes.append(f"moment: {type(exc).__name__}: {exc}")
            if "reduce" in config.checks:
                try:
                    dec = verify_decomposition(curve, coeffs, u, config.mem_budget_mb)
                    dom = verify_dominance(curve, coeffs, u, mem_budget_mb=config.mem_budget_mb)
                    bnd = theorem_bound_check(curve, coeffs, u, config.mem_budget_mb)
                    row.decomp_residual = dec.decomposition_residual
                    row.dominance_max_ratio = dom.dominance_max_ratio
                    row.bound_ratio = bnd.bound_ratio
                    if row.lam is None and dec.moment is not None:
                        row.lam = dec.moment.value
                        row.lambda_exact = dec.moment.exact
                    tol = 0.0 if dec.exact else 1e-10 * max(abs(dec.moment.value), 1.0)
                    if dec.decomposition_residual > tol:
                        notes.append("decomposition residual nonzero")
                    if dom.dominance_violations:
                        notes.append(f"dominance violations: {dom.dominance_violations}")
                    if bnd.box_bound_ok is False:
                        notes.append("bound ratio above box ceiling")
                except EngineError as exc:
                    notes.append(f"reduce: {type(exc).__name__}: {exc}")
            if "sharpness" in config.checks:
                try:
                    sharp = sharpness_report(
                        curve, N, p, config.samples, config.seed, config.mem_budget_mb
                    )
                    row.diag_lb = sharp.diagonal_bound
                    row.major_arc_lb = sharp.major_arc_bound
                    row.k_lower = sharp.k_lower
                    if not sharp.all_hold:
                        notes.append("sharpness inequality violated")
                    if config.coeffs != "ones":
                        notes.append("lower bounds use the unit-weight probe")
                except EngineError as exc:
                    notes.append(f"sharpness: {type(exc).__name__}: {exc}")
            if "estimate" in config.checks:
                try:
                    est = estimate_K(
                        curve,
                        N,
                        p,
                        AscentConfig(
                            multistarts=config.multistarts,
                            seed=config.seed,
                            mem_budget_mb=config.mem_budget_mb,
                        ),
                    )
                    row.k_hat = est.k_hat
                    row.a_hat = est.restriction_estimate
                    if not est.converged:
                        notes.append("estimator hit iteration cap")
                except EngineError as exc:
                    notes.append(f"estimate: {type(exc).__name__}: {exc}")
            row.notes = "; ".join(notes)
            for note in notes:
                if "violat" in note or "residual nonzero" in note or "above box" in note:
                    report.failures.append(f"N={N} p={p}: {note}")
            report.rows.append(row)
    if config.fit_quantity is not None:
        for p in config.p_list:
            rows_p = [r for r in report.rows if r.p == p]
            try:
                fit = fit_exponent(
                    rows_p, config.fit_quantity, tolerance=config.fit_tolerance
                )
                report.fits.append(fit)
                if not fit.verdict:
                    report.failures.append(
                        f"fit p={p}: slope {fit.slope:.3f} vs predicted {fit.predicted:.3f}"
                    )
            except EngineError as exc:
                report.failures.append(f"fit p={p}: {type(exc).__name__}: {exc}")
    return report


def fit_exponent(rows, quantity: str, tolerance: float = 0.6) -> FitResult:
    """Least-squares slope of log(value) against log(N), with the predicted
    exponent and a verdict flag.

    Below the critical p = k(k+1) the prediction switches to the
    lower-bound envelope and the fit is labeled out-of-theorem-range.
    """
    if quantity not in ("lambda", "K"):
        raise ConfigInvalid(f"fit quantity must be lambda or K: {quantity}")
    usable = []
    for r in rows:
        val = r.lam if quantity == "lambda" else r.k_hat
        if val is not None and val > 0:
            usable.append((r.N, val, r.p, r.curve))
    if len(usable) < 3:
        raise InsufficientRows(f"need >= 3 rows with positive values, got {len(usable)}")
    ps = {t[2] for t in usable}
    curves = {t[3] for t in usable}
    if len(ps) != 1 or len(curves) != 1:
        raise InsufficientRows(f"rows mix p values {ps} or curves {curves}")
    p = ps.pop()
    curve = make_curve(tuple(int(x) for x in curves.pop().split(",")))
    logs_n = np.log([t[0] for t in usable])
    logs_v = np.log([t[1] for t in usable])
    coeffs_fit = np.polyfit(logs_n, logs_v, 1)
    slope, intercept = float(coeffs_fit[0]), float(coeffs_fit[1])
    residual = float(np.max(np.abs(logs_v - (slope * logs_n + intercept))))
    in_range = p >= curve.critical_p
    if quantity == "lambda":
        theorem = float(p - curve.weight_sum)
        predicted = theorem if in_range else max(p / 2.0, theorem)
    else:
        theorem = 0.5 * (1.0 - 2.0 * curve.weight_sum / p)
        predicted = theorem if in_range else max(0.0, theorem)
    note = "" if in_range else "out-of-theorem-range; predicted from lower-bound envelope"
    alt = None
    if curve.is_full:
        # printed form of the classical special case differs from the
        # duality-derived exponent; record it so the data can arbitrate
        alt = float(p - curve.top * (curve.top + 1))
    return FitResult(
        quantity=quantity,
        p=p,
        slope=slope,
        intercept=intercept,
        residual=residual,
        predicted=predicted,
        tolerance=tolerance,
        verdict=bool(abs(slope - predicted) <= tolerance),
        in_theorem_range=in_range,
        n_points=len(usable),
        alt_predicted=alt,
        note=note,
    )


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_report(report: SweepReport, fmt: str, path) -> None:
    """Write the report; CSV columns are fixed, JSON mirrors rows plus the
    config echo and engine version.  Unknown formats fail before any write."""
    if not report.rows:
        raise ConfigInvalid("refusing to emit an empty report")
    if fmt not in ("json", "csv"):
        raise ConfigInvalid(f"unknown report format {fmt!r}")
    try:
        if fmt == "json":
            # serialize fully before opening so a bad payload never leaves
            # a truncated file behind
            text = json.dumps(report.to_dict(), indent=2, sort_keys=True)
            with open(path, "w") as fh:
                fh.write(text + "\n")
        else:
            with open(path, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(CSV_COLUMNS)
                for row in report.rows:
                    d = row.to_dict()
                    writer.writerow([_csv_cell(d[c]) for c in CSV_COLUMNS])
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def _parse_csv_cell(text: str):
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    try:
        return float(text)
    except ValueError:
        return text


def load_rows(path) -> list[SweepRow]:
    """Rows back from an emitted JSON or CSV report."""
    try:
        with open(path) as fh:
            head = fh.read(1)
            fh.seek(0)
            if head == "{":
                payload = json.load(fh)
                return [SweepRow.from_dict(d) for d in payload["rows"]]
            reader = csv.reader(fh)
            header = next(reader)
            if header != CSV_COLUMNS:
                raise IoFailure(f"unexpected CSV header in {path}")
            rows = []
            for line in reader:
                d = dict(zip(CSV_COLUMNS, (_parse_csv_cell(c) for c in line)))
                # curve and notes stay verbatim strings
                d["curve"] = line[0]
                d["notes"] = line[-1]
                rows.append(SweepRow.from_dict(d))
            return rows
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    except (KeyError, ValueError, json.JSONDecodeError) as exc:
        raise IoFailure(f"cannot parse {path}: {exc}") from exc
