"""Acceptance criteria, one test per criterion at its stated tolerance.

The terminal summary prints one PASS/FAIL line per criterion.  Criterion 8
is marked as an expected failure: its ratio bar does not hold at
``alpha = 0.2, n = 6`` (see the decisions ledger), and the test still
evaluates the criterion as written.
"""
import itertools
import math
import time

import numpy as np
import pytest

from adstab import extract, families, ghzx, qcore, stabset

SQRT_HALF = 1 / math.sqrt(2)


def test_criterion_01_threshold_regression():
    t0 = time.perf_counter()
    th = ghzx.thresholds(2, 0.4)
    elapsed = time.perf_counter() - t0
    assert abs(th.gamma_minus - 0.3236) <= 5e-4
    assert abs(th.gamma_plus - 0.5636) <= 5e-4
    assert abs(th.gamma_e - 0.4364) <= 5e-4
    # window [0.324, 0.564] and kappa t in [0.391, 0.829] to the quoted digits
    assert (round(th.gamma_minus, 3), round(th.gamma_plus, 3)) == (0.324, 0.564)
    kt = (-math.log1p(-th.gamma_minus), -math.log1p(-th.gamma_plus))
    assert (round(kt[0], 3), round(kt[1], 3)) == (0.391, 0.829)
    assert elapsed < 1.0


def test_criterion_02_complementarity():
    t0 = time.perf_counter()
    worst = 0.0
    for n in range(2, 9):
        for alpha in np.round(np.arange(0.05, 0.651, 0.05), 10):
            th = ghzx.thresholds(n, float(alpha))
            worst = max(worst, abs(th.gamma_e + th.gamma_plus - 1.0))
    assert worst <= 1e-12
    assert time.perf_counter() - t0 < 1.0


@pytest.mark.parametrize("n", [2, 3])
def test_criterion_03_lp_certification(n):
    dic = stabset.stabilizer_dictionary(n)
    mismatches, worst = [], 0.0
    for alpha in (0.2, 0.4, 0.55, SQRT_HALF):
        for g in np.linspace(0.0, 1.0, 100):
            pt = ghzx.ghzx_point(n, alpha, float(g))
            rho = pt.density()
            if stabset.membership_lp(rho, dic).inside != ghzx.membership_closed(pt):
                mismatches.append((alpha, g))
            cert = stabset.robustness_lp(rho, dic)
            worst = max(worst, abs(cert.value - ghzx.rom_closed(pt)))
    assert mismatches == []
    assert worst <= 1e-6


def test_criterion_04_enumeration_counts():
    t0 = time.perf_counter()
    counts = {n: len(stabset.enumerate_stabilizer_states(n)) for n in range(1, 5)}
    assert counts == {1: 6, 2: 60, 3: 1080, 4: 36720}
    ins = {n: families.classify_all(n)["insulator"] for n in (2, 3, 4)}
    assert ins == {2: 8, 3: 32, 4: 220}
    assert time.perf_counter() - t0 < 60.0


def test_criterion_05_bell_splitting():
    phi = qcore.pure_density(qcore.ghz_vector(2, SQRT_HALF))
    psi = qcore.pure_density(qcore.dicke_vector(2, 1))
    for g in np.linspace(0.05, 0.95, 10):
        ch = qcore.amplitude_damping_kraus(g)
        rp, rs = qcore.apply_local_channel(phi, ch), qcore.apply_local_channel(psi, ch)
        assert abs(stabset.robustness_lp(rp).value - (1 + g * (1 - g))) <= 1e-6
        assert abs(stabset.robustness_lp(rs).value - 1.0) <= 1e-6
        assert abs(qcore.concurrence(rp) - (1 - g) ** 2) <= 1e-10
        assert abs(qcore.concurrence(rs) - (1 - g)) <= 1e-10


def test_criterion_06_antiw_threshold():
    thr = (math.sqrt(3) - 1) / 2
    dic = stabset.stabilizer_dictionary(3)
    grid = np.linspace(0.0, 1.0, 1001)
    verdicts = [
        stabset.membership_lp(families.dicke_trajectory(3, 2, float(g)), dic).inside for g in grid
    ]
    first_inside = grid[verdicts.index(True)]
    assert all(verdicts[verdicts.index(True):])  # single flip
    assert abs(first_inside - thr) <= 1e-3
    for g in np.linspace(0.0, 1.0, 201):
        terms = families.antiw3_decomposition(float(g))
        w = np.array([t[0] for t in terms])
        assert abs(w.sum() - 1.0) <= 1e-12
        assert (w.min() >= 0.0) == (g >= thr)


def test_criterion_07_extraction(rng):
    for n in range(2, 6):
        for alpha in (0.15, 0.4, 0.7, 0.9):
            for g in (0.0, 0.2, 0.5, 0.8, 0.95):
                dec, ps = extract.simulate_parity_extraction(ghzx.ghzx_density(n, alpha, g))
                res = extract.parity_extract(n, alpha, g)
                assert np.max(np.abs(dec - res.decoded)) < 1e-12
                assert abs(ps - res.success_probability) < 1e-12
    for _ in range(100):
        n = int(rng.integers(2, 9))
        alpha = float(rng.uniform(0.01, 0.99))
        g = float(rng.uniform(0.0, 0.99))
        lhs, rhs = extract.lossless_identity_check(n, alpha, g)
        assert abs(lhs - rhs) <= 1e-12
    eps = []
    for n in range(2, 11):
        cat = extract.cat_injection(n)
        assert abs(cat["success_probability"] - (2 - math.sqrt(2))) <= cat["epsilon_n"] / 2 + 1e-15
        eps.append(cat["epsilon_n"])
    assert all(a > b for a, b in zip(eps, eps[1:]))


def test_criterion_08a_window_bound():
    for alpha in (0.2, 0.3, 0.4):
        for n in range(2, 13):
            delta, bound = ghzx.window_width_and_bound(n, alpha)
            assert delta <= bound


@pytest.mark.xfail(strict=True, reason="bound/Delta_6 = 1.329 at alpha = 0.2 exceeds 1.15")
def test_criterion_08b_window_ratio():
    bad = []
    for alpha, n in itertools.product((0.2, 0.3, 0.4), range(6, 13)):
        delta, bound = ghzx.window_width_and_bound(n, alpha)
        if bound / delta > 1.15:
            bad.append((alpha, n, bound / delta))
    assert bad == []


def test_criterion_09_phase_twist():
    rep = ghzx.phase_twist_analysis(2, 0.35, math.pi / 8)
    assert abs(rep.gamma_minus - 0.413) <= 1e-3
    assert abs(rep.gamma_plus - 0.472) <= 1e-3
    assert abs(rep.delta_n - 0.155) <= 1e-3
    for phi in (0.0, math.pi / 4):
        assert abs(ghzx.phase_twist_analysis(2, 0.35, phi).delta_n) <= 1e-12


def test_criterion_10_property_suites():
    for n in (3, 4):
        res = families.haar_endpoint_test(n, 10_000, seed=12345)
        assert res["fraction"] >= (1 - 2.0**-n) - 3 * res["sigma"]
    # separable decompositions at death surfaces
    assert ghzx.separable_decomposition_at_death(3, 0.4) < 1e-12
    r2 = (0.4 / math.sqrt(1 - 0.16)) ** 2
    site = [0.5, 0.6, r2 / 0.3]
    assert ghzx.separable_decomposition_at_death(3, 0.4, site) < 1e-12
    # tau is an explicit mixture of product states: rho = beta^2 tau + alpha^2 |000><000|
    psi = qcore.pure_density(qcore.ghz_vector(3, 0.4))
    rho = np.asarray(qcore.apply_local_channel(psi, qcore.amplitude_damping_kraus, site))
    model = 0.84 * ghzx.phase_averaged_tau(site)
    model[0, 0] += 0.16
    assert np.max(np.abs(rho - model)) < 1e-12
    # complementary channel
    for n, g in ((2, 0.3), (3, 0.7)):
        psi = qcore.pure_density(qcore.ghz_vector(n, 0.3))
        env = np.asarray(qcore.complementary_ad_output(psi, g))
        alt = np.asarray(qcore.apply_local_channel(psi, qcore.amplitude_damping_kraus(1 - g)))
        assert np.max(np.abs(env - alt)) < 1e-12
    # the PT block determinant, and with it the negativity's zero set, is the
    # same for every bipartition; the negativity values themselves differ
    for n, alpha, g in ((3, 0.3, 0.2), (4, 0.6, 0.4), (5, 0.45, 0.1), (4, 0.3, 0.7)):
        rho = ghzx.ghzx_density(n, alpha, g)
        b2 = 1 - alpha * alpha
        closed = b2 * (1 - g) ** n * (b2 * g**n - alpha * alpha)
        d = 2**n
        for m in range(1, 2 ** (n - 1)):
            cut = [k for k in range(n) if (m >> (n - 1 - k)) & 1]
            x = sum(1 << (n - 1 - k) for k in cut)
            pt = qcore.partial_transpose(rho, cut)
            det = np.linalg.det(pt[np.ix_([x, (d - 1) ^ x], [x, (d - 1) ^ x])]).real
            assert abs(det - closed) < 1e-12
            assert (qcore.negativity(rho, cut) > 1e-10) == (closed < 0)
