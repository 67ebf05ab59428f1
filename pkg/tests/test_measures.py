"""Constructors, ball-mass laws, Frostman fits, energies, and serialization."""

import math

import numpy as np
import pytest

from frostlab.errors import ParameterError, ResourceError
from frostlab.fitting import loglog_fit
from frostlab.measures import (
    DiscreteMeasure,
    annulus_pair_mass,
    annulus_pair_profile,
    ball_mass,
    cantor_measure,
    chain_triple_mass,
    chain_triple_profile,
    energy_integral,
    frostman_fit,
    lebesgue_box_measure,
    load_measure_binary,
    load_measure_json,
    measure_from_atoms,
    product_measure,
    radial_power_measure,
    random_ball_measure,
    save_measure_binary,
    save_measure_json,
    sphere_measure,
)

# shared fixtures; module scope keeps the big pair sums to one evaluation
BALL = random_ball_measure(3, 9000, seed=11)
CANTOR3 = cantor_measure(1 / 3, 10)
CANTOR4SQ = product_measure([cantor_measure(0.25, 6)] * 2)

# Monte-Carlo oracle for the s=1 energy of the uniform unit ball (analytic
# value 6/5): 1e7 pairs, seed 20260819, measured 1.1996193
BALL_ENERGY_MC = 1.1996193


def dirac(d=1):
    return measure_from_atoms(np.zeros((1, d)), np.array([1.0]))


# ---- constructors ----

def test_cantor_depth1_atoms():
    mu = cantor_measure(1 / 3, 1)
    np.testing.assert_allclose(mu.atoms[:, 0], [0.0, 2 / 3])
    np.testing.assert_allclose(mu.weights, [0.5, 0.5])
    assert abs(mu.nominal_s - math.log(2) / math.log(3)) < 1e-14


def test_cantor_quarter_dimension():
    mu = cantor_measure(0.25, 8)
    assert mu.n_atoms == 2**8
    assert abs(mu.nominal_s - 0.5) < 1e-14
    assert np.all(mu.weights == 2.0**-8)


def test_cantor_half_degenerates_to_dyadic_grid():
    mu = cantor_measure(0.5, 6)
    assert abs(mu.nominal_s - 1.0) < 1e-14
    np.testing.assert_allclose(np.sort(mu.atoms[:, 0]), np.arange(64) / 64.0)


def test_cantor_parameter_errors():
    with pytest.raises(ParameterError):
        cantor_measure(0.6, 4)
    with pytest.raises(ParameterError):
        cantor_measure(1 / 3, 0)
    with pytest.raises(ParameterError):
        cantor_measure(1 / 3, 25)


def test_product_mass_and_dimension():
    mu = CANTOR4SQ
    assert mu.n_atoms == 4096
    assert abs(mu.total_mass - 1.0) < 1e-12
    assert abs(mu.nominal_s - 1.0) < 1e-14


def test_product_mixed_factors():
    mu = product_measure([cantor_measure(0.5, 5), cantor_measure(0.25, 5)])
    assert abs(mu.nominal_s - 1.5) < 1e-14
    assert mu.dim == 2


def test_product_single_factor_is_identity():
    c = cantor_measure(1 / 3, 4)
    assert product_measure([c]) is c


def test_product_size_cap():
    big = cantor_measure(0.5, 13)
    with pytest.raises(ResourceError):
        product_measure([big, big])


def test_radial_power_lebesgue_case():
    mu = radial_power_measure(2, 2.0, 128)
    w = mu.weights[mu.weights > 0]
    # s=d means constant density; only the origin cell differs (exact cell mass)
    assert np.unique(np.round(w, 14)).size <= 2


def test_radial_power_log_density_mass_ratio():
    mu = radial_power_measure(3, 0.0, 256, log_u=2.0)
    assert np.isfinite(mu.total_mass)
    ratios = [ball_mass(mu, np.zeros(3), 2.0**-m) / math.log(2.0**m) ** (1 - 2.0)
              for m in range(2, 6)]
    assert max(ratios) / min(ratios) < 1.10


def test_radial_power_errors():
    with pytest.raises(ParameterError):
        radial_power_measure(2, 2.5, 128)
    with pytest.raises(ParameterError):
        radial_power_measure(2, -0.1, 128)
    with pytest.raises(ParameterError):
        radial_power_measure(3, 0.0, 128)  # s=0 needs log_u > 1


def test_sphere_measure_basic():
    circ = sphere_measure(2, 1.0, 256)
    np.testing.assert_allclose(np.linalg.norm(circ.atoms, axis=1), 1.0, atol=1e-12)
    assert np.all(circ.weights == 1.0 / 256)
    sp2 = sphere_measure(3, 2.0, 512)
    np.testing.assert_allclose(np.linalg.norm(sp2.atoms, axis=1), 2.0, atol=1e-12)
    assert abs(sp2.total_mass - 1.0) < 1e-12


# ---- ball_mass ----

def test_ball_mass_full_and_dirac():
    mu = cantor_measure(1 / 3, 6)
    assert ball_mass(mu, np.array([0.5]), 10.0) == pytest.approx(1.0)
    assert ball_mass(dirac(), np.zeros(1), 1e-9) == pytest.approx(1.0)


def test_ball_mass_self_similar_scales():
    for m in range(0, 8):
        assert ball_mass(CANTOR3, np.zeros(1), 3.0**-m) == pytest.approx(
            2.0**-m, abs=2.0**-10)


def test_ball_mass_monotone_in_r():
    rng = np.random.default_rng(2)
    x = CANTOR4SQ.atoms[17]
    masses = [ball_mass(CANTOR4SQ, x, r) for r in np.sort(rng.uniform(0.01, 2, 20))]
    assert np.all(np.diff(masses) >= 0)


# ---- frostman_fit ----

def test_frostman_fit_lebesgue_box():
    rep = frostman_fit(lebesgue_box_measure(2, 1.0, 256), n_probes=128)
    assert abs(rep.fitted_s - 2.0) <= 0.1
    assert rep.constant > 0


def test_frostman_fit_cantor():
    rep = frostman_fit(cantor_measure(1 / 3, 12), n_probes=128)
    assert abs(rep.fitted_s - 0.6309) <= 0.1
    assert rep.lower_regular


def test_frostman_fit_radial_power():
    rep = frostman_fit(radial_power_measure(2, 1.5, 512), n_probes=128)
    assert abs(rep.fitted_s - 1.5) <= 0.1


def test_frostman_fit_sphere():
    rep = frostman_fit(sphere_measure(3, 1.0, 4096), n_probes=128, r_min=0.06)
    assert abs(rep.fitted_s - 2.0) <= 0.1


def test_frostman_fit_dirac():
    rep = frostman_fit(dirac(2), n_probes=4, r_min=0.01, r_max=0.5)
    assert abs(rep.fitted_s) <= 0.05


def test_frostman_fit_product_additivity():
    a = cantor_measure(1 / 3, 6)
    b = cantor_measure(0.25, 6)
    sa = frostman_fit(a, n_probes=64).fitted_s
    sb = frostman_fit(b, n_probes=64).fitted_s
    sab = frostman_fit(product_measure([a, b]), n_probes=64).fitted_s
    assert abs(sab - (sa + sb)) <= 0.15


def test_frostman_fit_errors():
    with pytest.raises(ParameterError):
        frostman_fit(CANTOR3, r_min=0.5, r_max=0.25)
    with pytest.raises(ParameterError):
        frostman_fit(CANTOR3, r_min=CANTOR3.resolution / 10, r_max=0.25)


# ---- energy_integral ----

def test_energy_dirac_pair_divergent():
    mu = measure_from_atoms(np.zeros((2, 1)), np.array([0.5, 0.5]))
    rep = energy_integral(mu, 0.5)
    assert rep.divergent and math.isinf(rep.value)


def test_energy_ball_matches_monte_carlo():
    rep = energy_integral(BALL, 1.0)
    assert not rep.divergent
    assert abs(rep.value - BALL_ENERGY_MC) / BALL_ENERGY_MC < 0.02


def test_energy_cantor_partial_sums_stabilize():
    e10 = energy_integral(cantor_measure(1 / 3, 10), 0.5).value
    e11 = energy_integral(cantor_measure(1 / 3, 11), 0.5).value
    assert e11 / e10 == pytest.approx(1.0, abs=0.05)


def test_energy_divergence_flags_around_dimension():
    assert not energy_integral(CANTOR3, 0.53).divergent
    assert energy_integral(CANTOR3, 0.73).divergent
    assert not energy_integral(CANTOR4SQ, 0.85).divergent
    assert energy_integral(CANTOR4SQ, 1.15).divergent
    assert not energy_integral(lebesgue_box_measure(2, 1.0, 128), 1.85).divergent


def test_energy_domain_errors():
    with pytest.raises(ParameterError):
        energy_integral(CANTOR3, 0.0)
    with pytest.raises(ParameterError):
        energy_integral(CANTOR3, 1.5)  # above dim of the ambient space


# ---- annulus and chain masses ----

def test_annulus_profile_slope_near_one():
    eps = [2.0**-m for m in range(3, 9)]
    prof = annulus_pair_profile(BALL, 0.5, eps)
    fit = loglog_fit(np.array(eps), prof)
    assert abs(fit.slope - 1.0) <= 0.1


def test_annulus_saturation_and_dirac():
    sat = annulus_pair_mass(BALL, 0.5, 10.0)
    far = annulus_pair_profile(BALL, 0.5, [5.0])[0]
    assert sat == pytest.approx(far)  # everything beyond t is captured
    assert annulus_pair_mass(dirac(3), 0.5, 0.25) == 0.0


def test_chain_triple_slope_near_two():
    eps = [2.0**-m for m in range(3, 8)]
    prof = chain_triple_profile(BALL, 0.5, eps)
    fit = loglog_fit(np.array(eps), prof)
    assert abs(fit.slope - 2.0) <= 0.15


def test_chain_triple_dirac_and_saturation():
    assert chain_triple_mass(dirac(3), 0.5, 0.25) == 0.0
    sat = chain_triple_mass(BALL, 0.5, 10.0)
    pair_sat = annulus_pair_mass(BALL, 0.5, 10.0)
    assert sat > 0.5 * pair_sat**2 / BALL.total_mass  # Cauchy-Schwarz direction


# ---- serialization ----

def _assert_measures_equal(a: DiscreteMeasure, b: DiscreteMeasure):
    assert a.dim == b.dim and a.construction == b.construction
    np.testing.assert_array_equal(a.atoms, b.atoms)
    np.testing.assert_array_equal(a.weights, b.weights)
    assert (a.nominal_s is None) == (b.nominal_s is None)
    if a.nominal_s is not None:
        assert a.nominal_s == b.nominal_s
    assert a.resolution == b.resolution


def test_json_round_trip(tmp_path):
    mu = cantor_measure(0.25, 5)
    path = tmp_path / "m.json"
    save_measure_json(mu, path)
    _assert_measures_equal(mu, load_measure_json(path))


def test_binary_round_trip(tmp_path):
    mu = product_measure([cantor_measure(1 / 3, 4), cantor_measure(0.25, 4)])
    path = tmp_path / "m.fmeas"
    save_measure_binary(mu, path)
    _assert_measures_equal(mu, load_measure_binary(path))


def test_binary_rejects_bad_magic(tmp_path):
    path = tmp_path / "junk.bin"
    path.write_bytes(b"NOTMEAS1" + b"\x00" * 64)
    with pytest.raises(ParameterError):
        load_measure_binary(path)
