import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fasrelay import (DegenerateGeometryError, ScenarioConfig, elevation_angle,
                      fas_spectrum, link_state, los_probability,
                      path_loss_coeff, slant_ranges)
from fasrelay.geometry import SPEED_OF_LIGHT, trajectory_geometry


def test_slant_ranges_reference_geometry(urban):
    d1, d2 = slant_ranges(urban, 0.0)
    # UAV at (50, 0, 100), BS at (100, 0, 40), UE at (-100, 100, 0)
    assert d1 == pytest.approx(math.sqrt(6100.0), rel=1e-12)
    assert d2 == pytest.approx(math.sqrt(42500.0), rel=1e-12)
    _, d2_pi = slant_ranges(urban, math.pi)
    assert d2_pi == pytest.approx(150.0, rel=1e-12)


def test_slant_ranges_degenerate_endpoint():
    cfg = ScenarioConfig(bs_position=(50.0, 0.0, 100.0), uav_altitude=100.0)
    with pytest.raises(DegenerateGeometryError):
        slant_ranges(cfg, 0.0)


@settings(max_examples=60, deadline=None)
@given(theta=st.floats(-10.0, 10.0))
def test_slant_ranges_periodic(theta):
    cfg = ScenarioConfig()
    d = slant_ranges(cfg, theta)
    d_wrapped = slant_ranges(cfg, theta + 2.0 * math.pi)
    assert d[0] == pytest.approx(d_wrapped[0], rel=1e-9)
    assert d[1] == pytest.approx(d_wrapped[1], rel=1e-9)


def test_slant_range_spread_bounded_by_diameter(urban):
    thetas = np.linspace(0.0, 2.0 * math.pi, 721)
    d1 = np.array([slant_ranges(urban, t)[0] for t in thetas])
    d2 = np.array([slant_ranges(urban, t)[1] for t in thetas])
    assert d1.max() - d1.min() <= 2.0 * urban.flight_radius + 1e-9
    assert d2.max() - d2.min() <= 2.0 * urban.flight_radius + 1e-9


def test_elevation_angle_reference_values():
    assert elevation_angle(100.0, 100.0) == pytest.approx(90.0)
    assert elevation_angle(100.0, 50.0) == pytest.approx(30.0)
    assert elevation_angle(150.0, 100.0) == pytest.approx(
        math.degrees(math.asin(2.0 / 3.0)), rel=1e-12)
    assert elevation_angle(100.0, -50.0) == pytest.approx(-30.0)


def test_elevation_angle_domain_error():
    with pytest.raises(ValueError):
        elevation_angle(100.0, 101.0)
    with pytest.raises(ValueError):
        elevation_angle(0.0, 0.0)


def test_los_probability_reference_values():
    a, b = 12.08, 0.11
    assert los_probability(a, a, b) == pytest.approx(1.0 / (1.0 + a), rel=1e-12)
    # direct high-precision evaluations of the logistic form
    assert los_probability(90.0, a, b) == pytest.approx(
        1.0 / (1.0 + a * math.exp(-b * (90.0 - a))), rel=1e-15)
    assert los_probability(90.0, a, b) == pytest.approx(0.9977162, abs=5e-7)
    assert los_probability(0.0, a, b) == pytest.approx(0.0214499, abs=5e-7)


@settings(max_examples=80, deadline=None)
@given(phi=st.floats(-90.0, 89.0), dphi=st.floats(0.001, 50.0))
def test_los_probability_monotone_in_elevation(phi, dphi):
    hi = min(phi + dphi, 90.0)
    assert los_probability(phi, 12.08, 0.11) <= los_probability(hi, 12.08, 0.11)


def test_path_loss_unit_distance_identity():
    f_c = 2.5e9
    d = SPEED_OF_LIGHT / (4.0 * math.pi * f_c)
    assert path_loss_coeff(d, f_c, 0.0) == pytest.approx(1.0, rel=1e-12)


def test_path_loss_reference_values():
    # free-space amplitude-squared at 100 m and 2.5 GHz
    ref = (SPEED_OF_LIGHT / (4.0 * math.pi * 2.5e9 * 100.0)) ** 2
    assert ref == pytest.approx(9.1063e-9, rel=1e-4)
    assert path_loss_coeff(100.0, 2.5e9, 0.0) == pytest.approx(ref, rel=1e-14)
    assert path_loss_coeff(100.0, 2.5e9, 1.6) == pytest.approx(
        ref * 10.0 ** -0.16, rel=1e-14)


@settings(max_examples=50, deadline=None)
@given(d=st.floats(1.0, 1e5), eta_lo=st.floats(0.0, 20.0),
       extra=st.floats(0.0, 30.0))
def test_path_loss_ordering_in_excess_loss(d, eta_lo, extra):
    assert path_loss_coeff(d, 2.5e9, eta_lo) >= path_loss_coeff(d, 2.5e9, eta_lo + extra)


def test_elevation_increases_with_altitude(urban):
    import dataclasses
    phis = []
    for z in (60.0, 120.0, 300.0, 700.0):
        cfg = dataclasses.replace(urban, uav_altitude=z)
        d1, d2 = slant_ranges(cfg, 0.7)
        phis.append((elevation_angle(d1, z - cfg.bs_position[2]),
                     elevation_angle(d2, z - cfg.ue_position[2])))
    for (a1, a2), (b1, b2) in zip(phis, phis[1:]):
        assert b1 > a1
        assert b2 > a2


def test_link_state_hop1_fields(urban):
    state = link_state(urban, None, None, 0.3, hop=1, link_type="nlos")
    d1, _ = slant_ranges(urban, 0.3)
    assert state.distance == pytest.approx(d1)
    beta = path_loss_coeff(d1, urban.carrier_freq, urban.eta_nlos)
    assert state.beta == pytest.approx(beta, rel=1e-14)
    assert state.gamma_bar == pytest.approx(urban.p1 * beta / urban.noise_power, rel=1e-14)
    assert state.vartheta == pytest.approx(urban.m_nlos / state.gamma_bar, rel=1e-14)


def test_link_state_probability_pairing(urban):
    fas = fas_spectrum(2, 0.5)
    los = link_state(urban, fas, 0.01, 1.1, hop=2, link_type="los")
    nlos = link_state(urban, fas, 0.01, 1.1, hop=2, link_type="nlos")
    assert los.link_prob + nlos.link_prob == pytest.approx(1.0, abs=1e-14)


def test_link_state_hop2_vartheta_cancellation(urban):
    # the eigenvalue sum cancels: vartheta2 = m * sigma^2 / (p2 * beta)
    fas = fas_spectrum(2, 0.5)
    p2 = 0.37
    state = link_state(urban, fas, p2, 2.0, hop=2, link_type="los")
    direct = urban.m_los * urban.noise_power / (p2 * state.beta)
    assert state.vartheta == pytest.approx(direct, rel=1e-13)


def test_link_state_gamma_example():
    # 40 dBm through a 1e-9 gain over -100 dBm noise gives SNR 1e5
    assert 10.0 * 1e-9 / 1e-13 == pytest.approx(1e5)
    assert 5 / 1e5 == pytest.approx(5e-5)


def test_link_state_requires_spectrum_for_hop2(urban):
    with pytest.raises(ValueError):
        link_state(urban, None, 0.1, 0.0, hop=2, link_type="los")


def test_scenario_validation_rejects_bad_fields():
    with pytest.raises(ValueError):
        ScenarioConfig(m_los=0)
    with pytest.raises(ValueError):
        ScenarioConfig(eta_los=30.0, eta_nlos=1.0)
    with pytest.raises(ValueError):
        ScenarioConfig(flight_radius=-1.0)


def test_trajectory_geometry_matches_scalar_ops(urban):
    thetas = np.linspace(0.0, 2.0 * math.pi, 17)
    geo = trajectory_geometry(urban, thetas)
    for i, t in enumerate(thetas):
        d1, d2 = slant_ranges(urban, t)
        assert geo.d1[i] == pytest.approx(d1, rel=1e-14)
        assert geo.d2[i] == pytest.approx(d2, rel=1e-14)
        phi1 = elevation_angle(d1, urban.uav_altitude - urban.bs_position[2])
        assert geo.phi1[i] == pytest.approx(phi1, rel=1e-12)
        p = los_probability(phi1, urban.los_a, urban.los_b)
        assert geo.p_los1[i] == pytest.approx(p, rel=1e-12)
        for lt in ("los", "nlos"):
            assert geo.beta2[lt][i] == pytest.approx(
                path_loss_coeff(d2, urban.carrier_freq, urban.eta_db(lt)), rel=1e-13)
