"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines.  Tolerances are pinned here, not configurable.
"""

import itertools
import math
import time

import numpy as np
import pytest

from gaussderiv import bench, kde, moments, quadform, symmetrizer, symvec
from gaussderiv.hermite import gaussian_derivative
from gaussderiv.indexing import tuple_index, unique_ordering
from gaussderiv.kron import kron_pow_batch, kron_seq

from .oracles import brute_kron_seq, finite_difference_coordinate, isserlis_moment


def _report(num: int, description: str, ok: bool) -> None:
    print(f"[ACCEPTANCE {num:02d}] {'PASS' if ok else 'FAIL'} - {description}")
    assert ok, f"acceptance criterion {num} failed: {description}"


def random_spd(rng, d):
    a = rng.standard_normal((d, d))
    return a @ a.T + d * np.eye(d)


def test_criterion_01_symmetrizer_exact_equality():
    t0 = time.perf_counter()
    grid = [(d, r) for d in (1, 2, 3) for r in range(0, 6)] + [(4, r) for r in range(0, 4)]
    ok = True
    for d, r in grid:
        direct = symmetrizer.symmetrizer_direct(d, r)
        recursive = symmetrizer.symmetrizer_recursive(d, r)
        ok = ok and direct.equals_exact(recursive)
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < 60.0
    _report(1, f"direct == recursive exactly on the full grid in {elapsed:.1f}s", ok)


def test_criterion_02_three_fold_product_average():
    rng = np.random.default_rng(2)
    d = 2
    s = symmetrizer.symmetrizer_direct(d, 3)
    worst = 0.0
    for _ in range(10):
        xs = [rng.standard_normal(d) for _ in range(3)]
        got = s.matvec(kron_seq(xs))
        want = np.zeros(d**3)
        for perm in itertools.permutations(range(3)):
            want += brute_kron_seq([xs[p] for p in perm])
        want /= 6.0
        worst = max(worst, float(np.abs(got - want).max()))
    _report(2, f"3-fold product average, worst abs err {worst:.2e} <= 1e-12", worst <= 1e-12)


def test_criterion_03_sparsity_numbers_and_shape():
    ok = symmetrizer.symmetrizer_direct(7, 2).nnz_lower() == 70
    ok = ok and symmetrizer.symmetrizer_direct(6, 4).nnz_lower() == 9801
    for d in (2, 3, 4, 5, 6, 7):
        rows = bench.sparsity_curve(d_values=(d,), r_values=(1, 2, 3, 4))
        props = [row["proportion"] for row in rows if not row["skipped"]]
        ok = ok and len(props) >= 3 and all(a > b for a, b in zip(props, props[1:]))
    _report(3, "stored-entry counts 70 / 9801 exact; proportions decrease in r", ok)


def test_criterion_04_symv_oracle_and_large_product():
    worst = 0.0
    for d in (2, 3, 4):
        for r in range(1, 7):
            rng = np.random.default_rng(41 * d + r)
            mat = symmetrizer.symmetrizer_direct(d, r) if d**r <= 4096 else None
            for _ in range(10):
                v = rng.standard_normal(d**r)
                a = symvec.symv_direct(v, d, r)
                b = symvec.symv_recursive(v, d, r)
                scale = max(1.0, float(np.abs(a).max()))
                worst = max(worst, float(np.abs(a - b).max()) / scale)
                if mat is not None:
                    worst = max(worst, float(np.abs(mat.matvec(v) - b).max()) / scale)
    big = symvec.symv_recursive(np.arange(1.0, 4.0**8 + 1.0), 4, 8)
    ok = worst <= 1e-12 and big.shape == (4**8,) and np.all(np.isfinite(big))
    _report(4, f"symv triple oracle worst rel err {worst:.2e}; (4,8) product feasible", ok)


def test_criterion_05_derivative_methods_and_finite_differences():
    worst = 0.0
    for d in (1, 2, 3, 4):
        for r in range(0, 7):
            rng = np.random.default_rng(100 * d + r)
            sigma = random_spd(rng, d)
            x = rng.standard_normal(d)
            vals = [gaussian_derivative(x, sigma, r, m) for m in ("direct", "full_recursive", "unique")]
            scale = max(1e-300, float(np.abs(vals[0]).max()))
            for other in vals[1:]:
                worst = max(worst, float(np.abs(other - vals[0]).max()) / scale)
    ok = worst <= 1e-10

    fd_worst = 0.0
    for d in (1, 2, 3):
        for r in (1, 2, 3):
            rng = np.random.default_rng(500 + 10 * d + r)
            sigma = random_spd(rng, d)
            x = rng.standard_normal(d)
            full = gaussian_derivative(x, sigma, r, "unique")
            denom = max(float(np.abs(full).max()), 1e-12)

            def lower(pt, sigma=sigma, r=r):
                return gaussian_derivative(pt, sigma, r - 1, "unique")

            for i in range(d**r):
                tup = tuple_index(i + 1, d, r)
                fd = finite_difference_coordinate(lower, x, tup[0] - 1)
                approx = fd[i // d] if r > 1 else fd[0]
                fd_worst = max(fd_worst, abs(full[i] - approx) / denom)
    ok = ok and fd_worst <= 1e-4
    _report(
        5,
        f"triple agreement rel {worst:.2e} <= 1e-10; finite differences rel {fd_worst:.2e} <= 1e-4",
        ok,
    )


def test_criterion_06_moment_oracles():
    worst = 0.0
    for d in (1, 2, 3):
        for r in (2, 4, 6, 8):
            rng = np.random.default_rng(61 * d + r)
            sigma = random_spd(rng, d)
            vec = moments.moment_vector(np.zeros(d), sigma, r)
            scale = max(1.0, float(np.abs(vec).max()))
            if d**r <= 1024:
                coords_iter = range(d**r)
                for i in coords_iter:
                    coords = tuple(t - 1 for t in tuple_index(i + 1, d, r))
                    worst = max(worst, abs(vec[i] - isserlis_moment(coords, sigma)) / scale)
            else:
                # every coordinate class once; the full vector is tied to the
                # class representatives by the symmetry fixed-point check
                sym_err = float(np.abs(symvec.symv_recursive(vec, d, r) - vec).max()) / scale
                worst = max(worst, sym_err)
                ordering = unique_ordering(d, r)
                for slot, m in enumerate(ordering.multi_indices):
                    coords = tuple(
                        coord for coord, count in enumerate(m) for _ in range(count)
                    )
                    rep = int(np.argmax(ordering.expansion == slot))
                    worst = max(worst, abs(vec[rep] - isserlis_moment(coords, sigma)) / scale)
    ok = worst <= 1e-10

    path_worst = 0.0
    for d in (1, 2, 3, 4):
        for r in range(0, 7):
            rng = np.random.default_rng(62 * d + r)
            sigma = random_spd(rng, d)
            mu = rng.standard_normal(d)
            a = moments.moment_vector(mu, sigma, r, "explicit")
            b = moments.moment_vector(mu, sigma, r, "hermite")
            path_worst = max(path_worst, float(np.abs(a - b).max()) / max(1.0, float(np.abs(a).max())))
    ok = ok and path_worst <= 1e-10

    rng = np.random.default_rng(63)
    d, n = 2, 10**6
    sigma = random_spd(rng, d)
    mu = rng.standard_normal(d)
    draws = rng.multivariate_normal(mu, sigma, size=n)
    mc_ok = True
    for r in (1, 2, 3, 4):
        powers = kron_pow_batch(draws, r)
        est = powers.mean(axis=0)
        se = powers.std(axis=0, ddof=1) / math.sqrt(n)
        want = moments.moment_vector(mu, sigma, r)
        mc_ok = mc_ok and bool(np.all(np.abs(est - want) <= 5.0 * se + 1e-12))
    ok = ok and mc_ok
    _report(
        6,
        f"Isserlis worst rel {worst:.2e}; path agreement {path_worst:.2e}; Monte Carlo within 5 SE",
        ok,
    )


def test_criterion_07_quadratic_form_paths_and_values():
    worst = 0.0
    for d in (2, 3):
        rng = np.random.default_rng(70 + d)
        for _ in range(10):
            a = rng.standard_normal((d, d))
            a = (a + a.T) / 2
            b = rng.standard_normal((d, d))
            b = (b + b.T) / 2
            sigma = random_spd(rng, d)
            mu = rng.standard_normal(d)
            for r, s in [(1, 0), (2, 0), (1, 1), (2, 1), (3, 1), (2, 2), (0, 2), (4, 0)]:
                x = quadform.nu_joint(a, b, mu, sigma, r, s, "vector_moment")
                y = quadform.nu_joint(a, b, mu, sigma, r, s, "cumulant_recursive")
                worst = max(worst, abs(x - y) / max(1.0, abs(x)))
    ok = worst <= 1e-9

    a = np.array([[1.0, 1.0], [1.0, 0.0]])
    b = np.array([[2.0, 0.0], [0.0, 1.0]])
    sigma = np.array([[1.5, 0.4], [0.4, 1.2]])
    mu = np.array([0.5, -1.0])
    k11 = quadform.kappa_joint(a, b, mu, sigma, 1, 1)
    want11 = 2 * np.trace(a @ sigma @ b @ sigma) + 4 * mu @ a @ sigma @ b @ mu
    ok = ok and abs(k11 - want11) <= 1e-12 * max(1.0, abs(want11))

    f1, f2 = a @ sigma, b @ sigma
    want22 = 8 * (4 * np.trace(f1 @ f1 @ f2 @ f2) + 2 * np.trace(f1 @ f2 @ f1 @ f2))
    k22 = quadform.kappa_joint(a, b, np.zeros(2), sigma, 2, 2)
    ok = ok and abs(k22 - want22) <= 1e-12 * max(1.0, abs(want22))
    _report(
        7,
        f"nu path agreement worst rel {worst:.2e} <= 1e-9; joint cumulant closed forms exact",
        ok,
    )


def _reconstruct_kappas_from_vector_moments(a, b, mu, sigma, rmax, smax):
    """Solve the moment-cumulant recursions for the cumulants, using only
    vector-moment-path values of the mixed moments."""
    nus = {
        (i, j): quadform.nu_joint(a, b, mu, sigma, i, j, "vector_moment")
        for i in range(rmax + 1)
        for j in range(smax + 1)
    }
    kappas = {}
    for t in range(1, rmax + 1):
        kappas[t, 0] = nus[t, 0] - sum(
            math.comb(t - 1, i) * kappas[t - i, 0] * nus[i, 0] for i in range(1, t)
        )
    for t in range(1, smax + 1):
        kappas[0, t] = nus[0, t] - sum(
            math.comb(t - 1, j) * kappas[0, t - j] * nus[0, j] for j in range(1, t)
        )
    for bb in range(1, smax + 1):
        for aa in range(1, rmax + 1):
            rest = sum(
                math.comb(aa, i) * math.comb(bb - 1, j) * kappas[aa - i, bb - j] * nus[i, j]
                for i in range(aa + 1)
                for j in range(bb)
                if (i, j) != (0, 0)
            )
            kappas[aa, bb] = nus[aa, bb] - rest
    return kappas


def test_criterion_08_published_formula_refutation():
    a = np.array([[0.0, 1.0], [1.0, 0.0]])
    b = np.array([[1.0, 0.0], [0.0, -1.0]])
    mu, sigma = np.zeros(2), np.eye(2)
    corrected = quadform.kappa_joint(a, b, mu, sigma, 2, 2)
    published = quadform.mathai_provost_formula(a, b, mu, sigma, 2, 2)
    deviation = abs(published - corrected) / abs(corrected)
    recon = _reconstruct_kappas_from_vector_moments(a, b, mu, sigma, 2, 2)[2, 2]
    consistency = abs(recon - corrected) / max(1.0, abs(corrected))
    ok = deviation > 0.10 and consistency <= 1e-9
    _report(
        8,
        f"published formula off by {deviation:.0%}; corrected one matches the "
        f"vector-moment reconstruction to {consistency:.2e}",
        ok,
    )


def test_criterion_09_bridge_and_vstat_paths():
    worst = 0.0
    for d in (1, 2, 3):
        rng = np.random.default_rng(90 + d)
        for _ in range(20):
            sigma = random_spd(rng, d)
            b_mat = rng.standard_normal((d, d))
            b_mat = (b_mat + b_mat.T) / 2
            x = rng.standard_normal(d)
            for r, s in [(0, 0), (1, 0), (2, 0), (3, 0), (0, 1), (1, 1), (2, 1), (0, 2), (1, 2)]:
                u = kde.eta(x, b_mat, sigma, r, s, "direct")
                v = kde.eta(x, b_mat, sigma, r, s, "nu_bridge")
                worst = max(worst, abs(u - v) / max(1e-12, abs(u)))
    ok = worst <= 1e-9

    rng = np.random.default_rng(91)
    data = rng.standard_normal((100, 2))
    sigma = random_spd(rng, 2)
    vworst = 0.0
    for r in (0, 1, 2, 3):
        u = kde.vstat_q(data, sigma, r, "direct")
        v = kde.vstat_q(data, sigma, r, "cumulant")
        vworst = max(vworst, abs(u - v) / max(1e-12, abs(u)))
    ok = ok and vworst <= 1e-9
    _report(
        9,
        f"derivative bridge worst rel {worst:.2e}; V-statistic paths {vworst:.2e} (n=100)",
        ok,
    )


def test_criterion_10_performance_floors():
    t0 = time.perf_counter()
    reports, passed = bench.acceptance_floors(reps=3, seed=0)
    elapsed = time.perf_counter() - t0
    lines = ", ".join(f"{rep.scenario}: {rep.ratio:.0f}x" for rep in reports)
    ok = passed and elapsed < 600.0
    _report(10, f"speedup floors ({lines}) in {elapsed:.0f}s", ok)


def test_criterion_11_bandwidth_selection_sanity():
    n = 1000
    href = (4.0 / (3 * n)) ** 0.2
    ok = True
    ratios = []
    for seed in range(5):
        data = np.random.default_rng(seed).standard_normal((n, 1))
        sel = kde.select_bandwidth(data, 0, "CV")
        h = math.sqrt(sel.h_mat[0, 0])
        ratios.append(h / href)
        ok = ok and (href / 2 < h < href * 2)
    _report(
        11,
        "CV-selected univariate bandwidths within factor 2 of the reference rule "
        f"(ratios {', '.join(f'{t:.2f}' for t in ratios)})",
        ok,
    )
