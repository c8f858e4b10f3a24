"""GHZ-X closed forms.

Frozen constants come from tests/oracles/frozen_values.py (mpmath, 50 digits,
raw threshold equations).
"""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adstab import ghzx, qcore, stabset

# [DERIVED] oracle values
N2_A04 = dict(gamma_minus=0.323611084270578, gamma_plus=0.563564219528015, gamma_e=0.436435780471985)
KT_N2_A04 = (0.39098704924541, 0.829114038301766)
C_N2_A04_G05 = 0.183303027798234
WINDOW = {  # (alpha, n): (Delta_n, bound)
    (0.2, 2): (0.482156560278759, 3.10310363079829),
    (0.2, 6): (0.0171358375861599, 0.0227718996445376),
    (0.2, 12): (7.72532176412844e-8, 7.72535448905939e-8),
    (0.3, 6): (0.00234494672271731, 0.00245921926846617),
    (0.4, 2): (0.239953135257437, 0.727723627949905),
    (0.4, 9): (1.04951773898494e-7, 1.04952386211602e-7),
    (0.4, 12): (1.62786044738715e-11, 1.62786044992706e-11),
}
TWIST = (0.412998731993596, 0.471604050732522, 0.154763590388941)
DEPHASED_GM = 0.229551030734066
POWER_LAW = (0.265208214526353, 0.865557857603285)
POINT_N3 = (0.10421875, 0.38390625, 0.185880505970906)
ROM_N3 = 1.25270576111232


def test_threshold_values():
    th = ghzx.thresholds(2, 0.4)
    for k, v in N2_A04.items():
        assert getattr(th, k) == pytest.approx(v, abs=1e-13)
    assert th.gamma_gme == pytest.approx(th.gamma_e, abs=1e-15)  # equal for n = 2
    assert th.regime == "II"
    assert (-math.log1p(-th.gamma_minus), -math.log1p(-th.gamma_plus)) == pytest.approx(KT_N2_A04, abs=1e-12)


def test_point_example():
    pt = ghzx.ghzx_point(2, 0.4, 0.5)
    m = pt.density()
    assert (m[0, 0].real, m[1, 1].real + m[2, 2].real, m[3, 3].real) == pytest.approx((0.37, 0.42, 0.21), abs=1e-15)
    assert pt.coherence == pytest.approx(C_N2_A04_G05, abs=1e-15)
    p3 = ghzx.ghzx_point(3, 0.3, 0.25)
    assert (p3.p0, p3.pn, p3.coherence.real) == pytest.approx(POINT_N3, abs=1e-15)
    assert ghzx.rom_closed(ghzx.ghzx_point(3, 0.2, 0.1)) == pytest.approx(ROM_N3, abs=1e-14)


@settings(max_examples=25, deadline=None)
@given(n=st.integers(2, 5), alpha=st.floats(0.01, 0.99), gamma=st.floats(0, 1))
def test_point_matches_channel_evolution(n, alpha, gamma):
    psi = qcore.pure_density(qcore.ghz_vector(n, alpha))
    full = np.asarray(qcore.apply_local_channel(psi, qcore.amplitude_damping_kraus(gamma)))
    assert np.max(np.abs(full - ghzx.ghzx_density(n, alpha, gamma))) < 1e-13


@pytest.mark.parametrize("phase", [0.3, 1.1, 2.5])
def test_complex_coherence_diamond_matches_lp(phase):
    dic = stabset.stabilizer_dictionary(2)
    for g in np.linspace(0.05, 0.95, 19):
        pt = ghzx.ghzx_point(2, 0.45, float(g), coherence_phase=phase)
        margin = min(pt.p0, pt.pn) - abs(pt.coherence.real) - abs(pt.coherence.imag)
        if abs(margin) < 1e-6:
            continue
        assert stabset.membership_lp(pt.density(), dic).inside == ghzx.membership_closed(pt)


def test_endpoint_is_inside():
    for n in (2, 5, 8):
        assert ghzx.membership_closed(ghzx.ghzx_point(n, 0.3, 1.0))


@pytest.mark.parametrize("n", [2, 3, 4, 6])
def test_threshold_equations_vanish(n):
    for alpha in (0.1, 0.3, 0.5):
        th = ghzx.thresholds(n, alpha)
        if th.gamma_minus is None:
            continue
        assert abs(ghzx.f_n(n, alpha, th.gamma_minus)) < 1e-13
        pt = ghzx.ghzx_point(n, alpha, th.gamma_plus)
        assert abs(pt.coherence.real - pt.pn) < 1e-13
        assert 0 < th.gamma_minus < th.gamma_plus < 1
        assert th.gamma_gme <= th.gamma_e + 1e-15


def test_regimes_and_boundaries():
    a1, a2 = ghzx.alpha_boundaries(3)
    assert ghzx.thresholds(3, a1 / 2).regime == "I"
    assert ghzx.thresholds(3, (a1 + a2) / 2).regime == "II"
    assert ghzx.thresholds(3, (a2 + 0.7) / 2).regime == "III"
    assert ghzx.thresholds(3, 0.9).regime == "no-window"
    assert ghzx.thresholds(3, a1).regime == "I/II"
    assert ghzx.thresholds(3, a2).regime == "II/III"
    edge = ghzx.thresholds(3, 1 / math.sqrt(2))
    assert edge.regime == "III/no-window"
    assert edge.gamma_minus == edge.gamma_plus == 0.0
    th = ghzx.thresholds(3, 0.9)
    assert th.gamma_minus is None and th.gamma_plus is None and th.gamma_e == 1.0


def test_regime_orderings():
    # I: gamma_e < gamma_- < gamma_+; II: gamma_- < gamma_e < gamma_+; III: gamma_- < gamma_+ < gamma_e
    a1, a2 = ghzx.alpha_boundaries(4)
    t1 = ghzx.thresholds(4, a1 / 2)
    t2 = ghzx.thresholds(4, (a1 + a2) / 2)
    t3 = ghzx.thresholds(4, (a2 + 0.7) / 2)
    assert t1.gamma_e < t1.gamma_minus < t1.gamma_plus
    assert t2.gamma_minus < t2.gamma_e < t2.gamma_plus
    assert t3.gamma_minus < t3.gamma_plus < t3.gamma_e


def test_window_widths():
    for (alpha, n), (delta, bound) in WINDOW.items():
        d, b = ghzx.window_width_and_bound(n, alpha)
        assert d == pytest.approx(delta, rel=1e-9)
        assert b == pytest.approx(bound, rel=1e-12)


def test_resource_mirror():
    for alpha, g in ((0.4, 0.8), (0.55, 0.9), (0.2, 0.99)):
        lhs, rhs = ghzx.resource_mirror_check(alpha, g)
        assert abs(lhs - rhs) < 1e-12
    with pytest.raises(ValueError):
        ghzx.resource_mirror_check(0.4, 0.3)


def test_slice_witness_matches_lp():
    dic = stabset.stabilizer_dictionary(2)
    for alpha in (0.3, 0.5, 0.65):
        for g in np.linspace(0.0, 0.95, 12):
            rho = ghzx.ghzx_density(2, alpha, float(g))
            assert ghzx.slice_witness_n2(rho) == stabset.membership_lp(rho, dic).inside


# --------------------------------------------------------------------------
# channel variants


def test_dephased_thresholds():
    th = ghzx.dephased_thresholds(2, 0.2, 0.6)
    assert th.gamma_minus == pytest.approx(DEPHASED_GM, abs=1e-13)
    assert ghzx.dephased_gamma_minus_n2(0.2, 0.6) == pytest.approx(DEPHASED_GM, abs=1e-13)
    assert th.gamma_e + th.gamma_plus == pytest.approx(1.0, abs=1e-15)
    assert th.regime == "re-entrant"
    assert ghzx.dephased_thresholds(2, 0.6, 0.5).regime == "no-window"
    with pytest.raises(ValueError):
        ghzx.dephased_thresholds(2, 0.2, 0.0)


def test_dephased_reduces_to_plain():
    a = ghzx.dephased_thresholds(3, 0.3, 1.0)
    b = ghzx.thresholds(3, 0.3)
    assert a == b


def test_phase_twist():
    rep = ghzx.phase_twist_analysis(2, 0.35, math.pi / 8)
    assert (rep.gamma_minus, rep.gamma_plus, rep.delta_n) == pytest.approx(TWIST, abs=1e-13)
    assert rep.gamma_minus_closed == pytest.approx(TWIST[0], abs=1e-13)
    assert rep.F_n == pytest.approx(math.sqrt(2), abs=1e-15)
    for phi in (0.0, math.pi / 4, math.pi / 2):
        r = ghzx.phase_twist_analysis(2, 0.35, phi)
        assert r.F_n == 1.0 and r.delta_n == 0.0


def test_phase_covariant_profiles():
    P = qcore.PhaseCovariantProfile
    r = 0.3  # n = 2 so r^(2/n) = 0.3
    assert ghzx.phase_covariant_thresholds(P.pure_ad(), 2, r) == pytest.approx((0.3, 0.7, True), abs=1e-13)
    ge, gp, holds = ghzx.phase_covariant_thresholds(P.dephased(0.6), 2, r)
    assert (ge, gp, holds) == pytest.approx((0.18, 0.82, True), abs=1e-13)
    ge, gp, holds = ghzx.phase_covariant_thresholds(P.power_law(0.7), 2, r)
    assert (ge, gp) == pytest.approx(POWER_LAW, abs=1e-12)
    assert not holds
    with pytest.raises(ValueError):
        ghzx.phase_covariant_thresholds(P.phase_twist(0.2), 2, r)


def test_multiple_roots_are_refused():
    wiggly = qcore.PhaseCovariantProfile.custom(
        lambda g: math.sqrt((0.5 + 0.5 * math.cos(20 * g)) * (1 - g)), "cos20"
    )
    with pytest.raises(ghzx.ThresholdAmbiguityError):
        ghzx.phase_covariant_thresholds(wiggly, 2, 0.5)


# --------------------------------------------------------------------------
# site-dependent damping


def test_nonuniform_surfaces():
    alpha = 0.4
    r2 = alpha**2 / (1 - alpha**2)
    death = [0.5, 0.6, r2 / 0.3]
    res = ghzx.nonuniform_analysis(alpha, death)
    assert res["on_death_surface"] and not res["on_rebirth_surface"]
    assert abs(res["pt_determinant"]) < 1e-15
    rebirth = [0.2, 0.3, 1 - r2 / (0.8 * 0.7)]
    res = ghzx.nonuniform_analysis(alpha, rebirth)
    assert res["on_rebirth_surface"]
    p0, p1, c = res["endpoints"]
    assert c == pytest.approx(p1, abs=1e-15)
    uni = ghzx.nonuniform_analysis(alpha, [0.3] * 3)
    pt = ghzx.ghzx_point(3, alpha, 0.3)
    assert uni["endpoints"] == pytest.approx((pt.p0, pt.pn, pt.coherence.real), abs=1e-15)
    assert uni["membership"] == ghzx.membership_closed(pt)


def test_separable_at_death_and_facet_mirror():
    assert ghzx.separable_decomposition_at_death(4, 0.3) < 1e-12
    with pytest.raises(ValueError):
        ghzx.separable_decomposition_at_death(3, 0.4, [0.1, 0.2, 0.3])
    lhs, rhs = ghzx.facet_minor_mirror(0.4, [0.2, 0.5, 0.7])
    r2 = 0.16 / 0.84
    assert lhs == pytest.approx(rhs, rel=1e-12)
    assert lhs == pytest.approx(r2 / (0.8 * 0.5 * 0.3), rel=1e-12)
    lhs, rhs = ghzx.facet_minor_mirror(0.4, [0.2, 0.5, 0.7], subset=[1, 2])
    assert lhs == pytest.approx(rhs, rel=1e-12)
