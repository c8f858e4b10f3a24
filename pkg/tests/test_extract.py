import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adstab import extract, ghzx, qcore
from conftest import random_density


def test_protocol_constants():
    # quoted reference values ~1.015 and ~1.134
    assert round(extract.H_THRESHOLD, 3) == 1.015
    assert round(extract.T_THRESHOLD, 3) == 1.134
    assert extract.H_THRESHOLD == pytest.approx(1.0154053378, abs=1e-10)
    assert extract.T_THRESHOLD == pytest.approx(1.1338934190, abs=1e-10)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_cnot_cascade(n):
    u = extract.cnot_cascade(n)
    d = 2**n
    assert np.array_equal(u @ u.T, np.eye(d))
    assert u[0, 0] == 1
    assert u[1 << (n - 1), d - 1] == 1


def test_success_probability_on_arbitrary_state(rng):
    m = np.asarray(random_density(rng, 3))
    dec, ps = extract.simulate_parity_extraction(m)
    assert ps == pytest.approx(m[0, 0].real + m[7, 7].real, abs=1e-15)
    assert dec[0, 1] == pytest.approx(m[0, 7] / ps, abs=1e-14)
    assert np.trace(dec).real == pytest.approx(1.0, abs=1e-14)


@settings(max_examples=30, deadline=None)
@given(n=st.integers(2, 6), alpha=st.floats(0.02, 0.98), gamma=st.floats(0.0, 0.99))
def test_lossless_identity(n, alpha, gamma):
    lhs, rhs = extract.lossless_identity_check(n, alpha, gamma)
    assert abs(lhs - rhs) <= 1e-12


def test_decoded_octahedron_tracks_window():
    # the decoded qubit sits inside the octahedron exactly on [gamma_-, gamma_+]
    th = ghzx.thresholds(4, 0.2)
    for g in np.linspace(0.01, 0.99, 99):
        res = extract.parity_extract(4, 0.2, float(g))
        if min(abs(g - th.gamma_minus), abs(g - th.gamma_plus)) < 1e-6:
            continue
        inside = th.gamma_minus <= g <= th.gamma_plus
        assert res.flags["outside_octahedron"] == (not inside)


def test_twirl_sign_correction():
    res = extract.parity_extract(3, 0.8, 0.3)  # alpha > beta gives z > 0; flip to check
    flipped = extract.ExtractionResult(
        res.success_probability, res.decoded, (res.bloch[0], 0.0, -res.bloch[2]), res.corrected_coordinate
    )
    tw = extract.twirl_and_classify(flipped)
    assert tw.bloch[2] >= 0
    assert tw.h_polarization == pytest.approx(tw.corrected_coordinate / math.sqrt(2))
    assert tw.t_polarization == pytest.approx(tw.corrected_coordinate / math.sqrt(3))


def test_reborn_branch_reaches_t_region_at_n6():
    # quoted reference: at alpha = 0.20 the n = 6 reborn branch enters the T-type region
    th = ghzx.thresholds(6, 0.2)
    best = max(
        extract.twirl_and_classify(extract.parity_extract(6, 0.2, float(g))).corrected_coordinate
        for g in np.linspace(th.gamma_plus, 1.0, 400)[1:-1]
    )
    assert best > extract.T_THRESHOLD
    assert best == pytest.approx(1.2808, abs=5e-4)


def test_large_n_coordinate():
    assert extract.large_n_coordinate(1.0) == 1.0
    ustar = 1 + math.sqrt(2)
    assert extract.large_n_coordinate(ustar) == pytest.approx(math.sqrt(2), abs=1e-15)
    us = np.linspace(1, 20, 500)
    assert max(extract.large_n_coordinate(u) for u in us) <= math.sqrt(2) + 1e-15
    with pytest.raises(ValueError):
        extract.large_n_coordinate(0.5)


def test_large_n_limit_from_finite_n():
    n, alpha = 60, 0.3
    r = alpha / math.sqrt(1 - alpha**2)
    for s in (3.0, 4.0, 6.0):
        g = -math.expm1(-s / n)
        res = extract.parity_extract(n, alpha, g)
        u = r * math.exp(s / 2)
        if u < 1:
            continue
        assert res.corrected_coordinate == pytest.approx(extract.large_n_coordinate(u), abs=1e-10)


def test_cat_injection_matches_matrix_simulation():
    for n in (2, 4, 7):
        cat = extract.cat_injection(n)
        rho = ghzx.ghzx_density(n, 1 / math.sqrt(2), cat["gamma_star"])
        dec, ps = extract.simulate_parity_extraction(rho)
        assert np.max(np.abs(dec - cat["decoded"])) < 1e-12
        assert ps == pytest.approx(cat["success_probability"], abs=1e-12)
    fids = [extract.cat_injection(n)["fidelity_with_H"] for n in range(2, 11)]
    assert all(a < b for a, b in zip(fids, fids[1:]))
    assert 1 - fids[-1] < 1e-7
