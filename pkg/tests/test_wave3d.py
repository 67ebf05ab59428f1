"""Wave module tests: closed-form oracles, small-time order, blowup probe."""

import numpy as np
import pytest

from frostlab.errors import DomainError, ParameterError
from frostlab.measures import (
    cantor_measure,
    lebesgue_box_measure,
    product_measure,
)
from frostlab.norms import grid_operator_handle, lp_norm, opnorm_lower
from frostlab.spectral import SpectralGrid, load_field_binary
from frostlab.wave3d import (
    WaveField,
    blowup_probe,
    gaussian_wave_target,
    pointwise_limit_fit,
    sharpness_family,
    wave_solution,
)


@pytest.fixture(scope="module")
def grid128():
    return SpectralGrid(dim=3, n_per_axis=128, box_half_width=2.0)


@pytest.fixture(scope="module")
def grid32():
    return SpectralGrid(dim=3, n_per_axis=32, box_half_width=2.0)


@pytest.fixture(scope="module")
def mu_lattice():
    return lebesgue_box_measure(3, 1.5, 48)


@pytest.fixture(scope="module")
def mu_small():
    return lebesgue_box_measure(3, 0.5, 8)


def gaussian(a):
    return lambda pts: np.exp(
        -np.sum(np.asarray(pts, dtype=float) ** 2, axis=-1) / (2.0 * a * a))


def interior_mask(grid, margin):
    axis = grid.space_axis()
    x, y, z = np.meshgrid(axis, axis, axis, indexing="ij")
    return np.maximum(np.maximum(np.abs(x), np.abs(y)), np.abs(z)) <= margin


# ---- closed-form solution checks ----

def test_constant_data_gives_u_equals_t(grid128, mu_lattice):
    t = 0.4
    u = wave_solution(lambda pts: np.ones(len(pts)), mu_lattice, t, grid128)
    assert u.t == t
    eps = 2.0 / grid128.freq_max
    inside = interior_mask(grid128, 1.5 - t - 4 * eps)
    assert inside.sum() > 10_000
    assert np.max(np.abs(u.values[inside] / t - 1.0)) <= 1e-4


def test_gaussian_data_matches_closed_form(grid128, mu_lattice):
    a, t = 0.35, 0.5
    u = wave_solution(gaussian(a), mu_lattice, t, grid128)
    target = gaussian_wave_target(a, t, grid128)
    assert np.max(np.abs(u.values - target)) <= 1e-4
    core = interior_mask(grid128, 0.5)
    assert np.max(np.abs(u.values[core] - target[core])) <= 1e-8


def test_wave_solution_is_linear(grid32, mu_small):
    f = gaussian(0.3)(mu_small.atoms)
    g = np.cos(3.0 * mu_small.atoms[:, 0])
    ua = wave_solution(f, mu_small, 0.5, grid32).values
    ub = wave_solution(g, mu_small, 0.5, grid32).values
    uc = wave_solution(2.0 * f - 0.5 * g, mu_small, 0.5, grid32).values
    scale = np.max(np.abs(uc))
    assert np.max(np.abs(uc - (2.0 * ua - 0.5 * ub))) <= 1e-12 * scale


def test_wave_solution_validation(grid32, mu_small):
    grid2 = SpectralGrid(dim=2, n_per_axis=32, box_half_width=2.0)
    with pytest.raises(ParameterError):
        wave_solution(lambda p: np.ones(len(p)), mu_small, 0.5, grid2)
    with pytest.raises(DomainError):
        wave_solution(lambda p: np.ones(len(p)), mu_small, 1.5, grid32)


# ---- small-time pointwise limit ----

def test_pointwise_order_meets_quadratic_rate(grid128, mu_lattice):
    rep = pointwise_limit_fit(gaussian(0.35), mu_lattice, grid128)
    assert rep.times == (0.2, 0.1, 0.05)
    assert all(b < a for a, b in zip(rep.errors, rep.errors[1:]))
    assert 1.7 <= rep.order <= 2.2
    blob = rep.verdict_json()
    assert blob["construction"] == "small-time-limit"
    assert blob["order"] == rep.order
    rows = rep.csv_rows()
    assert rows[0] == "t,sup_error"
    assert len(rows) == 4


def test_pointwise_validation(grid128, grid32, mu_small):
    f = gaussian(0.3)
    with pytest.raises(ParameterError):
        pointwise_limit_fit(f, mu_small, grid128, times=(0.2, 0.1))
    with pytest.raises(ParameterError):
        pointwise_limit_fit(f, mu_small, grid128, times=(0.2, 0.1, 0.1))
    grid2 = SpectralGrid(dim=2, n_per_axis=32, box_half_width=2.0)
    with pytest.raises(ParameterError):
        pointwise_limit_fit(f, mu_small, grid2)
    with pytest.raises(DomainError):
        pointwise_limit_fit(f, mu_small, grid32, times=(1.5, 0.2, 0.1))


def test_gaussian_target_validation(grid128):
    with pytest.raises(ParameterError):
        gaussian_wave_target(0.0, 0.5, grid128)
    grid2 = SpectralGrid(dim=2, n_per_axis=32, box_half_width=2.0)
    with pytest.raises(ParameterError):
        gaussian_wave_target(0.3, 0.5, grid2)


# ---- field container ----

def test_wave_field_validation(grid32):
    n = grid32.n_per_axis
    with pytest.raises(ParameterError):
        WaveField(grid32, 0.5, np.ones((n, n)))
    bad = np.ones((n, n, n))
    bad[0, 0, 0] = np.nan
    with pytest.raises(ParameterError):
        WaveField(grid32, 0.5, bad)
    grid2 = SpectralGrid(dim=2, n_per_axis=32, box_half_width=2.0)
    with pytest.raises(ParameterError):
        WaveField(grid2, 0.5, np.ones((32, 32)))


def test_slice_csv_and_binary_roundtrip(grid32, mu_small, tmp_path):
    u = wave_solution(gaussian(0.3), mu_small, 0.5, grid32)
    rows = u.slice_csv_rows(0.0)
    assert rows[0] == "x,y,u"
    assert len(rows) == 1 + 32 * 32
    x, y, val = (float(v) for v in rows[1].split(","))
    axis = grid32.space_axis()
    k = int(np.argmin(np.abs(axis)))
    assert (x, y) == (axis[0], axis[0])
    assert val == u.values[0, 0, k]
    with pytest.raises(DomainError):
        u.slice_csv_rows(5.0)
    path = tmp_path / "field.bin"
    u.save_binary(path)
    back = load_field_binary(path)
    assert back.rep == "space"
    assert np.array_equal(back.values.real, u.values)


# ---- blowup probing ----

def test_blowup_probe_sharpness_family():
    f_fam, mu_fam, p = sharpness_family()
    assert p == 1.5
    rep = blowup_probe(f_fam, mu_fam, 1.0, family_p=p)
    assert rep.compare == pytest.approx(2.0, abs=1e-12)
    assert abs(rep.boxdim_estimate - 2.0) <= 0.25
    assert not rep.inconclusive
    for dim in rep.level_dims:
        assert 2.0 <= dim <= 2.4
    assert all(b > a for a, b in zip(rep.thresholds, rep.thresholds[1:]))
    for counts in rep.counts:
        assert all(c > 0 for c in counts)
        assert all(b < a for a, b in zip(counts, counts[1:]))
    blob = rep.verdict_json()
    assert blob["construction"] == "superlevel-boxdim"
    assert blob["boxdim_estimate"] == rep.boxdim_estimate
    rows = rep.csv_rows()
    assert rows[0] == "n,threshold,eps,count,level_dim"
    assert len(rows) == 1 + 3 * 3


def test_blowup_smooth_data_has_empty_superlevel(mu_small):
    f_fam = lambda grid: gaussian(0.3)
    rep = blowup_probe(f_fam, mu_small, 0.5, refinements=(32, 64),
                       thresholds=(10.0, 10.0), box_eps=(0.25, 0.5, 1.0))
    assert rep.level_dims == (0.0, 0.0)
    assert rep.boxdim_estimate == 0.0
    assert not rep.inconclusive
    assert all(c == 0 for row in rep.counts for c in row)


def test_blowup_saturated_threshold_fills_the_box(mu_small):
    f_fam = lambda grid: gaussian(0.3)
    rep = blowup_probe(f_fam, mu_small, 0.5, refinements=(32, 64),
                       thresholds=(-1e30, -1e30), box_eps=(0.25, 0.5, 1.0))
    assert rep.level_dims == pytest.approx((3.0, 3.0), abs=1e-9)
    for n, counts in zip(rep.refinements, rep.counts):
        dx = 4.0 / n
        assert counts == tuple(
            int(round((4.0 / e) ** 3)) for e in rep.box_eps)


def test_blowup_validation(mu_small):
    f_fam = lambda grid: gaussian(0.3)
    with pytest.raises(ParameterError):
        blowup_probe(f_fam, mu_small, 0.5, refinements=(64,))
    with pytest.raises(ParameterError):
        blowup_probe(f_fam, mu_small, 0.5, refinements=(64, 32))
    with pytest.raises(ParameterError):
        blowup_probe(f_fam, mu_small, 0.5, refinements=(32, 64),
                     box_eps=(0.25, 0.5))
    with pytest.raises(ParameterError):
        blowup_probe(f_fam, mu_small, 0.5, refinements=(32, 64),
                     box_eps=(0.3, 0.5, 1.0))
    with pytest.raises(ParameterError):
        blowup_probe(f_fam, mu_small, 0.5, refinements=(32, 64),
                     box_eps=(0.25, 0.5, 1.0), thresholds=(1.0,))
    with pytest.raises(ParameterError):
        blowup_probe(f_fam, mu_small, 0.5, refinements=(32, 64),
                     box_eps=(0.25, 0.5, 1.0), thresholds=(2.0, 1.0))
    with pytest.raises(ParameterError):
        blowup_probe(f_fam, mu_small, 0.5, refinements=(32, 64),
                     box_eps=(0.25, 0.5, 1.0), threshold_fraction=1.0)


def test_sharpness_family_profile():
    f_fam, mu_fam, _ = sharpness_family()
    grid = SpectralGrid(dim=3, n_per_axis=64, box_half_width=2.0)
    f = f_fam(grid)
    inside = f(np.array([[0.25, 0.0, 0.0]]))[0]
    assert inside == pytest.approx(16.0 / np.log(4.0), rel=1e-12)
    assert f(np.array([[0.6, 0.0, 0.0]]))[0] == 0.0
    # clamp: the origin takes the cell-size value
    floor = grid.spacing
    assert f(np.array([[0.0, 0.0, 0.0]]))[0] == pytest.approx(
        floor**-2.0 / np.log(1.0 / floor), rel=1e-12)
    mu = mu_fam(grid)
    assert mu.resolution == pytest.approx(grid.spacing, rel=1e-12)
    with pytest.raises(ParameterError):
        sharpness_family(support_radius=0.6)


def test_energy_ratio_consistent_with_certified_lower_bound(grid32, mu_small):
    # s_mu + s_nu = 3 + 2.27 > 4: bounded evolution regime at p = 2
    c = cantor_measure(0.4, 3)
    nu = product_measure([c, c, c])
    grid = SpectralGrid(dim=3, n_per_axis=64, box_half_width=2.0)
    op = lambda vals: wave_solution(vals, mu_small, 1.0, grid).to_complex_field()
    handle = grid_operator_handle(op, nu, label="wave-t1")
    est = opnorm_lower(handle, mu_small, nu, 2.0, "bumps", seed=7)
    assert 0.05 < est.value < 0.09
    g = gaussian(0.3)(mu_small.atoms)
    ratio = lp_norm(handle.apply(g), nu, 2.0) / lp_norm(g, mu_small, 2.0)
    assert ratio <= est.value * 1.05
