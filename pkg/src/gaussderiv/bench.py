"""Correctness-gated timing comparisons of the direct and recursive paths.

Every cell first runs both methods once and checks agreement at the module's
tolerance (this run doubles as warmup and is discarded); only then are the
timed repetitions taken and a ratio reported.  Cells whose sizes exceed the
configured caps are recorded as skips, mirroring how the largest symmetrizer
grid points are simply not computable.

Wall-clock ratios are machine dependent; the only asserted facts
(:func:`acceptance_floors`) are conservative floors on two cells where the
recursive/streaming paths win by orders of magnitude on any hardware.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from . import kde, moments, quadform, symmetrizer, symvec
from .caps import DEFAULT_MATRIX_CAP_BYTES, DEFAULT_VECTOR_CAP, CapExceededError, checked_length
from .hermite import gaussian_derivative

DEFAULT_REPS = 3


@dataclass
class BenchReport:
    """One timed comparison cell; ``ratio`` is mean_a / mean_b when gated."""

    scenario: str
    module: str
    d: int
    r: int
    method_a: str
    method_b: str
    tol: float
    s: int | None = None
    n: int | None = None
    reps: int = 0
    mean_a_s: float | None = None
    min_a_s: float | None = None
    mean_b_s: float | None = None
    min_b_s: float | None = None
    ratio: float | None = None
    agree: bool = False
    skipped: bool = False
    skip_reason: str | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def _rel_err(a, b) -> float:
    a = np.asarray(a, dtype=float).reshape(-1)
    b = np.asarray(b, dtype=float).reshape(-1)
    scale = max(1.0, float(np.abs(a).max(initial=0.0)))
    return float(np.abs(a - b).max(initial=0.0)) / scale


def _timed(fn: Callable[[], object], reps: int) -> tuple[float, float]:
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return float(np.mean(times)), float(np.min(times))


def run_pair(
    report: BenchReport,
    fa: Callable[[], object],
    fb: Callable[[], object],
    *,
    reps: int = DEFAULT_REPS,
    compare: Callable[[object, object], bool] | None = None,
) -> BenchReport:
    """Fill in a report: correctness gate first, timings only if it passes."""
    reps = max(int(reps), 1)
    try:
        ya = fa()
        yb = fb()
    except CapExceededError as exc:
        report.skipped = True
        report.skip_reason = f"cap: {exc}"
        return report
    agree = compare(ya, yb) if compare is not None else _rel_err(ya, yb) <= report.tol
    report.agree = bool(agree)
    report.reps = reps
    if not agree:
        return report
    report.mean_a_s, report.min_a_s = _timed(fa, reps)
    report.mean_b_s, report.min_b_s = _timed(fb, reps)
    report.ratio = report.mean_a_s / report.mean_b_s if report.mean_b_s > 0 else math.inf
    return report


def symmetrizer_suite(
    d_values=(2, 3, 4),
    r_values=(2, 4, 6, 8),
    *,
    reps: int = DEFAULT_REPS,
    cap_bytes: int = DEFAULT_MATRIX_CAP_BYTES,
) -> list[BenchReport]:
    out = []
    for d in d_values:
        for r in r_values:
            rep = BenchReport(
                scenario=f"symmetrizer d={d} r={r}",
                module="symmetrizer",
                d=d,
                r=r,
                method_a="direct",
                method_b="recursive",
                tol=0.0,
            )
            out.append(
                run_pair(
                    rep,
                    lambda d=d, r=r: symmetrizer.symmetrizer_direct(d, r, cap_bytes=cap_bytes),
                    lambda d=d, r=r: symmetrizer.symmetrizer_recursive(d, r, cap_bytes=cap_bytes),
                    reps=reps,
                    compare=lambda a, b: a.equals_exact(b),
                )
            )
    return out


def symv_suite(
    d_values=(2, 3, 4),
    r_values=(2, 4, 6, 8),
    *,
    reps: int = DEFAULT_REPS,
    seed: int = 0,
    cap: int = DEFAULT_VECTOR_CAP,
) -> list[BenchReport]:
    rng = np.random.default_rng(seed)
    out = []
    for d in d_values:
        for r in r_values:
            rep = BenchReport(
                scenario=f"symv d={d} r={r}",
                module="symvec",
                d=d,
                r=r,
                method_a="direct",
                method_b="recursive",
                tol=1e-12,
            )
            try:
                v = rng.standard_normal(checked_length(d, r, cap))
            except CapExceededError as exc:
                rep.skipped, rep.skip_reason = True, f"cap: {exc}"
                out.append(rep)
                continue
            out.append(
                run_pair(
                    rep,
                    lambda v=v, d=d, r=r: symvec.symv_direct(v, d, r, cap=cap),
                    lambda v=v, d=d, r=r: symvec.symv_recursive(v, d, r, cap=cap),
                    reps=reps,
                )
            )
    return out


def deriv_suite(
    d_values=(2, 3, 4),
    r_values=(2, 4, 6, 8, 10),
    *,
    reps: int = DEFAULT_REPS,
    seed: int = 0,  # unused: the standard grid evaluates at the all-ones point
    cap: int = DEFAULT_VECTOR_CAP,
) -> list[BenchReport]:
    out = []
    for d in d_values:
        x = np.ones(d)
        sigma = np.eye(d)
        for r in r_values:
            for other in ("full_recursive", "unique"):
                rep = BenchReport(
                    scenario=f"deriv d={d} r={r} {other}",
                    module="hermite",
                    d=d,
                    r=r,
                    method_a="direct",
                    method_b=other,
                    tol=1e-10,
                )
                out.append(
                    run_pair(
                        rep,
                        lambda x=x, s=sigma, r=r: gaussian_derivative(x, s, r, "direct", cap=cap),
                        lambda x=x, s=sigma, r=r, m=other: gaussian_derivative(x, s, r, m, cap=cap),
                        reps=reps,
                    )
                )
    return out


def moments_suite(
    d_values=(2, 3, 4),
    r_values=(2, 4, 6, 8, 10),
    *,
    reps: int = DEFAULT_REPS,
    cap: int = DEFAULT_VECTOR_CAP,
) -> list[BenchReport]:
    out = []
    for d in d_values:
        mu, sigma = np.zeros(d), np.eye(d)
        for r in r_values:
            rep = BenchReport(
                scenario=f"moments d={d} r={r}",
                module="moments",
                d=d,
                r=r,
                method_a="explicit",
                method_b="hermite",
                tol=1e-10,
            )
            out.append(
                run_pair(
                    rep,
                    lambda mu=mu, s=sigma, r=r: moments.moment_vector(mu, s, r, "explicit", cap=cap),
                    lambda mu=mu, s=sigma, r=r: moments.moment_vector(mu, s, r, "hermite", cap=cap),
                    reps=reps,
                )
            )
    return out


def quadform_suite(
    d_values=(2, 3, 4),
    orders=((1, 1), (2, 1), (2, 2), (3, 1), (3, 2), (4, 1)),
    *,
    reps: int = DEFAULT_REPS,
    cap: int = DEFAULT_VECTOR_CAP,
) -> list[BenchReport]:
    out = []
    for d in d_values:
        a_mat = np.diag(np.arange(1.0, d + 1.0))
        b_mat = np.diag(np.arange(float(d), 0.0, -1.0))
        mu, sigma = np.zeros(d), np.eye(d)
        for r, s in orders:
            rep = BenchReport(
                scenario=f"quadform d={d} r={r} s={s}",
                module="quadform",
                d=d,
                r=r,
                s=s,
                method_a="vector_moment",
                method_b="cumulant_recursive",
                tol=1e-9,
            )
            out.append(
                run_pair(
                    rep,
                    lambda a=a_mat, b=b_mat, mu=mu, sg=sigma, r=r, s=s: quadform.nu_joint(
                        a, b, mu, sg, r, s, "vector_moment", cap=cap
                    ),
                    lambda a=a_mat, b=b_mat, mu=mu, sg=sigma, r=r, s=s: quadform.nu_joint(
                        a, b, mu, sg, r, s, "cumulant_recursive"
                    ),
                    reps=reps,
                )
            )
    return out


def vstat_suite(
    d_values=(2,),
    r_values=(0, 2, 4),
    n_values=(100,),
    *,
    reps: int = DEFAULT_REPS,
    seed: int = 0,
    cap: int = DEFAULT_VECTOR_CAP,
) -> list[BenchReport]:
    out = []
    for d in d_values:
        for n in n_values:
            data = np.random.default_rng(seed).standard_normal((n, d))
            sigma = np.eye(d)
            for r in r_values:
                rep = BenchReport(
                    scenario=f"vstat d={d} r={r} n={n}",
                    module="kde",
                    d=d,
                    r=r,
                    n=n,
                    method_a="direct",
                    method_b="cumulant",
                    tol=1e-9,
                )
                out.append(
                    run_pair(
                        rep,
                        lambda X=data, s=sigma, r=r: kde.vstat_q(X, s, r, "direct", cap=cap),
                        lambda X=data, s=sigma, r=r: kde.vstat_q(X, s, r, "cumulant"),
                        reps=reps,
                    )
                )
    return out


def sparsity_curve(
    d_values=(2, 3, 4, 5, 6, 7),
    r_values=(1, 2, 3, 4),
    *,
    cap_bytes: int = DEFAULT_MATRIX_CAP_BYTES,
) -> list[dict]:
    """Proportion of stored entries in the lower triangle, per ``(d, r)``."""
    rows = []
    for d in d_values:
        for r in r_values:
            row = {"d": d, "r": r, "skipped": False, "skip_reason": None}
            try:
                s = symmetrizer.symmetrizer_direct(d, r, cap_bytes=cap_bytes)
                side = s.side
                lower = s.nnz_lower()
                total = side * (side + 1) // 2
                row.update(
                    nnz_lower=lower, total_lower=total, proportion=lower / total
                )
            except CapExceededError as exc:
                row.update(skipped=True, skip_reason=f"cap: {exc}", nnz_lower=None,
                           total_lower=None, proportion=None)
            rows.append(row)
    return rows


SUITES = {
    "symmetrizer": symmetrizer_suite,
    "symv": symv_suite,
    "deriv": deriv_suite,
    "moments": moments_suite,
    "quadform": quadform_suite,
    "vstat": vstat_suite,
}

# Conservative speedup floors that hold across hardware: the recursive symv
# beats permutation enumeration by far more than 10x at (d=2, r=8), and the
# streaming cumulant V-statistic beats per-pair derivative vectors by far
# more than 2x at (d=2, r=4, n=1000).
SYMV_FLOOR = 10.0
VSTAT_FLOOR = 2.0


def acceptance_floors(*, reps: int = DEFAULT_REPS, seed: int = 0) -> tuple[list[BenchReport], bool]:
    """Run the two asserted performance cells and evaluate their floors."""
    reports = []
    reports += symv_suite(d_values=(2,), r_values=(8,), reps=reps, seed=seed)
    reports += vstat_suite(d_values=(2,), r_values=(4,), n_values=(1000,), reps=reps, seed=seed)
    floors = (SYMV_FLOOR, VSTAT_FLOOR)
    passed = all(
        rep.agree and not rep.skipped and rep.ratio is not None and rep.ratio >= floor
        for rep, floor in zip(reports, floors)
    )
    return reports, passed


def run_suite(name: str, *, reps: int = DEFAULT_REPS, seed: int = 0, **grid) -> list[BenchReport]:
    """Dispatch a named suite; ``acceptance`` runs the asserted floor cells."""
    if reps < 3:
        raise ValueError(f"benchmark suites need at least 3 repetitions, got {reps}")
    if name == "acceptance":
        reports, _ = acceptance_floors(reps=reps, seed=seed)
        return reports
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; expected one of {sorted(SUITES)} or 'acceptance'")
    fn = SUITES[name]
    kwargs = dict(reps=reps)
    if name in ("symv", "deriv", "vstat"):
        kwargs["seed"] = seed
    return fn(**grid, **kwargs)
