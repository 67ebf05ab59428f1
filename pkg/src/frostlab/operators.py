"""Convolution-type operators acting on weighted measures.

Spherical averages, the [1,2]-range maximal operator, dyadic low-pass
smoothing, generic multiplier convolutions, and Riesz-kernel row sums.
Every operator has a fast frequency-side path through
:mod:`frostlab.spectral`; the spherical average additionally ships a direct
quadrature evaluator used as a cross-check oracle.

Normalization: all sphere multipliers belong to probability measures on the
sphere (value 1 at the origin), so constants here are comparable across
dimensions only through exponents, not prefactors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.spatial.distance import cdist
from scipy.special import i0e, j0

from .errors import ConfigError, DomainError, ParameterError
from .measures import DiscreteMeasure, _sphere_area, _unit_ball_volume, measure_hash
from .spectral import (
    ComplexField,
    SpectralGrid,
    _atom_values,
    _check_in_box,
    lowpass_phi_hat,
    measure_fourier,
    mollifier_hat,
    to_space,
)

__all__ = [
    "KernelSpec",
    "sphere_kernel",
    "lowpass_dyadic_kernel",
    "riesz_kernel",
    "truncated_riesz_kernel",
    "custom_kernel",
    "sphere_multiplier",
    "sphere_spatial_kernel",
    "default_mollify_eps",
    "spherical_average",
    "quadrature_spherical_average",
    "maximal_function",
    "default_t_grid",
    "dyadic_operator",
    "convolve_distribution",
    "riesz_row_sum",
    "RieszRowReport",
    "sphere_l2_profile",
    "make_run_manifest",
]


# ---- kernel specifications ----

@dataclass(frozen=True)
class KernelSpec:
    """A radial convolution kernel described on one or both sides of the transform.

    multiplier maps |xi| arrays to multiplier values; spatial_form maps
    (|x| array, eps) to mollified kernel values.  premollified kernels carry
    their smoothing inside spatial_form / multiplier and receive no extra
    damping in convolve_distribution.
    """

    kind: str
    multiplier: Callable | None = None
    spatial_form: Callable | None = None
    mollify_eps: float | None = None
    premollified: bool = False
    params: dict = field(default_factory=dict)


def sphere_multiplier(dim: int) -> Callable:
    """Transform of the probability measure on the unit sphere, as a radial function."""
    if dim == 3:
        return lambda rho: np.sinc(2.0 * np.asarray(rho, dtype=np.float64))
    if dim == 2:
        return lambda rho: j0(2.0 * math.pi * np.asarray(rho, dtype=np.float64))
    raise ParameterError(f"sphere multiplier needs dim 2 or 3, got {dim}")


def sphere_spatial_kernel(dim: int, t: float, eps: float, r) -> np.ndarray:
    """Gaussian-mollified kernel of the radius-t sphere, evaluated at radii r.

    Closed forms; stable for r*t >> eps^2 because only nonpositive exponents
    appear.  dim=2 routes the Bessel growth through i0e.
    """
    r = np.asarray(r, dtype=np.float64)
    e2 = eps * eps
    if dim == 3:
        amp = (2.0 * math.pi * e2) ** -1.5
        x = r * t / e2
        small = x < 1e-4
        rs = np.where(small, 1.0, r)
        full = amp * (e2 / (2.0 * rs * t)) * (
            np.exp(-((rs - t) ** 2) / (2.0 * e2))
            - np.exp(-((rs + t) ** 2) / (2.0 * e2)))
        lim = amp * np.exp(-(r * r + t * t) / (2.0 * e2)) * (1.0 + x * x / 6.0)
        return np.where(small, lim, full)
    if dim == 2:
        amp = 1.0 / (2.0 * math.pi * e2)
        return amp * np.exp(-((r - t) ** 2) / (2.0 * e2)) * i0e(r * t / e2)
    raise ParameterError(f"sphere kernel needs dim 2 or 3, got {dim}")


def sphere_kernel(dim: int, t: float, mollify_eps: float | None = None) -> KernelSpec:
    if t <= 0:
        raise ParameterError(f"sphere radius must be positive, got {t}")
    base = sphere_multiplier(dim)
    return KernelSpec(
        kind="sphere",
        multiplier=lambda rho: base(t * np.asarray(rho, dtype=np.float64)),
        spatial_form=lambda r, eps: sphere_spatial_kernel(dim, t, eps, r),
        mollify_eps=mollify_eps,
        params={"dim": dim, "t": float(t)})


def lowpass_dyadic_kernel(dim: int, j: int) -> KernelSpec:
    """Low-pass kernel at dyadic scale j: multiplier phi_hat(2^-j |xi|).

    Spatial side is the dilated Gaussian 2^{jd} phi(2^j x); it is already
    smooth, so the kernel is marked premollified.
    """
    if dim not in (1, 2, 3):
        raise ParameterError(f"dim must be 1, 2 or 3, got {dim}")
    scale = 2.0 ** (-j)
    amp = 2.0 ** (j * dim) * (math.pi / 36.0) ** (dim / 2.0)

    def spatial(r, eps=None):
        r = np.asarray(r, dtype=np.float64)
        return amp * np.exp(-(math.pi ** 2) * (2.0 ** j * r) ** 2 / 36.0)

    return KernelSpec(
        kind="lowpass_dyadic",
        multiplier=lambda rho: lowpass_phi_hat(scale * np.asarray(rho, dtype=np.float64)),
        spatial_form=spatial,
        premollified=True,
        params={"dim": dim, "j": int(j)})


def riesz_kernel(dim: int, alpha: float) -> KernelSpec:
    """Kernel with multiplier |xi|^-alpha, 0 < alpha < dim (locally integrable)."""
    if not (0.0 < alpha < dim):
        raise ParameterError(
            f"riesz exponent must satisfy 0 < alpha < dim, got alpha={alpha} dim={dim}")

    def mult(rho):
        rho = np.asarray(rho, dtype=np.float64)
        with np.errstate(divide="ignore"):
            return np.where(rho > 0.0, rho ** -alpha, np.inf)

    return KernelSpec(kind="riesz", multiplier=mult,
                      params={"dim": dim, "alpha": float(alpha)})


_TRIESZ_TABLE_SIZE = 32768
_TRIESZ_QUAD_NODES = 128


def truncated_riesz_kernel(dim: int, alpha: float, eps: float,
                           r_max: float) -> KernelSpec:
    """Mollified |x|^{alpha-dim} on the unit ball, tabulated radially.

    The profile is the shell integral of mollified sphere kernels,
    S_{d-1} int_0^1 rho^{alpha-1} K(rho; r, eps) drho, computed by
    Gauss-Legendre after substituting rho = u^{1/alpha} to flatten the
    endpoint.  Both evaluation routes (gridded transform and direct sum)
    consume the same table, so their disagreement isolates periodization
    and binning error.
    """
    if dim not in (2, 3):
        raise ParameterError(f"dim must be 2 or 3, got {dim}")
    if not (0.0 < alpha < dim):
        raise ParameterError(
            f"truncation exponent must satisfy 0 < alpha < dim, got {alpha}")
    if eps <= 0:
        raise ParameterError(f"eps must be positive, got {eps}")
    if r_max <= 0:
        raise ParameterError(f"r_max must be positive, got {r_max}")
    nodes, wts = np.polynomial.legendre.leggauss(_TRIESZ_QUAD_NODES)
    u = 0.5 * (nodes + 1.0)
    uw = 0.5 * wts
    rho = u ** (1.0 / alpha)
    r_tab = np.linspace(0.0, r_max, _TRIESZ_TABLE_SIZE)
    area = _sphere_area(dim)
    k_tab = np.zeros_like(r_tab)
    for p, w in zip(rho, uw):
        k_tab += w * sphere_spatial_kernel(dim, p, eps, r_tab)
    k_tab *= area / alpha

    def spatial(r, _eps=None):
        return np.interp(np.asarray(r, dtype=np.float64), r_tab, k_tab)

    return KernelSpec(
        kind="truncated_riesz_spatial",
        spatial_form=spatial,
        mollify_eps=float(eps),
        premollified=True,
        params={"dim": dim, "alpha": float(alpha), "eps": float(eps),
                "r_max": float(r_max)})


def custom_kernel(multiplier: Callable, spatial_form: Callable | None = None,
                  mollify_eps: float | None = None, **params) -> KernelSpec:
    return KernelSpec(kind="custom_multiplier", multiplier=multiplier,
                      spatial_form=spatial_form, mollify_eps=mollify_eps,
                      params=params)


def default_mollify_eps(grid: SpectralGrid) -> float:
    """One frequency-band width of smoothing: eps = 2 / freq_max."""
    return 2.0 / grid.freq_max


# ---- spherical averages ----

def _check_t(t: float, grid: SpectralGrid) -> None:
    if t <= 0:
        raise ParameterError(f"sphere radius must be positive, got {t}")
    if t > grid.box_half_width / 2.0:
        raise DomainError(
            f"sphere radius {t} exceeds box_half_width/2 = "
            f"{grid.box_half_width / 2.0}; wrap-around would contaminate the average")


def spherical_average(f, mu: DiscreteMeasure, t: float, grid: SpectralGrid,
                      mollify_eps: float | None = None) -> ComplexField:
    """Average of f d(mu) over the radius-t sphere around each grid point.

    Frequency-side composition: transform of the weighted measure, damped by
    the sphere multiplier at dilation t and a Gaussian mollifier, inverted to
    the space side.  The real part carries the average; the imaginary part is
    roundoff for real inputs.
    """
    _check_t(t, grid)
    eps = default_mollify_eps(grid) if mollify_eps is None else float(mollify_eps)
    hat = measure_fourier(f, mu, grid)
    rho = grid.freq_radii()
    mult = sphere_multiplier(grid.dim)(t * rho) * mollifier_hat(eps * rho)
    return to_space(ComplexField(grid, hat.values * mult, rep="freq"))


def quadrature_spherical_average(f, mu: DiscreteMeasure, t: float,
                                 grid: SpectralGrid,
                                 mollify_eps: float | None = None,
                                 chunk: int = 32) -> ComplexField:
    """Direct-sum oracle for spherical_average: sum_i f_i w_i K_t(|x - x_i|).

    O(n_grid * n_atoms); intended for cross-checks on modest grids.
    """
    _check_t(t, grid)
    _check_in_box(mu, grid)
    eps = default_mollify_eps(grid) if mollify_eps is None else float(mollify_eps)
    coeffs = _atom_values(f, mu) * mu.weights
    axes = [grid.space_axis()] * grid.dim
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    out = np.zeros(pts.shape[0], dtype=np.complex128)
    for lo in range(0, mu.n_atoms, chunk):
        dist = cdist(pts, mu.atoms[lo:lo + chunk])
        out += sphere_spatial_kernel(grid.dim, t, eps, dist) @ coeffs[lo:lo + chunk]
    shape = (grid.n_per_axis,) * grid.dim
    return ComplexField(grid, out.reshape(shape), rep="space")


def default_t_grid(n: int = 64) -> np.ndarray:
    """Geometric grid 2^(j/n), j = 0..n, covering [1,2]; nested across n | m."""
    if n < 1:
        raise ParameterError(f"need at least one interval, got n={n}")
    return 2.0 ** (np.arange(n + 1) / n)


def maximal_function(f, mu: DiscreteMeasure, t_grid, grid: SpectralGrid,
                     mollify_eps: float | None = None) -> ComplexField:
    """Pointwise max of |spherical average| over a sorted t-grid inside [1,2].

    One measure transform is shared across all radii; each radius costs one
    inverse transform.  Refining the t-grid can only increase the output.
    """
    t_arr = np.asarray(t_grid, dtype=np.float64)
    if t_arr.ndim != 1 or t_arr.size == 0:
        raise ParameterError("t_grid must be a nonempty 1-d list of radii")
    if np.any(np.diff(t_arr) < 0):
        raise ParameterError("t_grid must be sorted ascending")
    if t_arr[0] < 1.0 or t_arr[-1] > 2.0:
        raise ParameterError(
            f"t_grid must lie in [1, 2], got range [{t_arr[0]}, {t_arr[-1]}]")
    _check_t(float(t_arr[-1]), grid)
    eps = default_mollify_eps(grid) if mollify_eps is None else float(mollify_eps)
    hat = measure_fourier(f, mu, grid)
    rho = grid.freq_radii()
    damp = mollifier_hat(eps * rho)
    base = sphere_multiplier(grid.dim)
    best = None
    for t in t_arr:
        sp = to_space(ComplexField(grid, hat.values * (base(t * rho) * damp),
                                   rep="freq"))
        mag = np.abs(sp.values)
        best = mag if best is None else np.maximum(best, mag)
    return ComplexField(grid, best.astype(np.complex128), rep="space")


# ---- dyadic low-pass and generic convolution ----

def dyadic_operator(f, mu: DiscreteMeasure, j: int, grid: SpectralGrid) -> ComplexField:
    """Low-pass smoothing of f d(mu) at scale 2^-j via multiplier phi_hat(2^-j xi)."""
    if 2.0 ** j > grid.freq_max / 4.0:
        raise DomainError(
            f"dyadic scale 2^{j} exceeds freq_max/4 = {grid.freq_max / 4.0}; "
            "the pass band would alias")
    hat = measure_fourier(f, mu, grid)
    mult = lowpass_phi_hat(2.0 ** (-j) * grid.freq_radii())
    return to_space(ComplexField(grid, hat.values * mult, rep="freq"))


def _riesz_dc_value(grid: SpectralGrid, alpha: float) -> float:
    """Mean of |xi|^-alpha over the frequency cell at the origin.

    Computed exactly on the ball of equal volume; valid because alpha < dim
    keeps the singularity locally integrable.
    """
    d = grid.dim
    cell = grid.freq_step ** d
    r_eq = (cell / _unit_ball_volume(d)) ** (1.0 / d)
    return _sphere_area(d) * r_eq ** (d - alpha) / ((d - alpha) * cell)


def convolve_distribution(kernel: KernelSpec, f, mu: DiscreteMeasure,
                          grid: SpectralGrid) -> ComplexField:
    """Convolve f d(mu) with a kernel given by multiplier or radial table.

    Multiplier kernels are damped by the Gaussian mollifier at the kernel's
    eps (default one band, 2/freq_max) unless premollified.  A singular
    multiplier value away from the origin, or at the origin without a
    finite-mean rule, is a configuration error.
    """
    hat = measure_fourier(f, mu, grid)
    rho = grid.freq_radii()
    if kernel.multiplier is not None:
        mult = np.asarray(kernel.multiplier(rho), dtype=np.complex128)
        bad = ~np.isfinite(mult)
        if bad.any():
            origin = rho == 0.0
            if kernel.kind == "riesz" and not (bad & ~origin).any():
                mult[origin] = _riesz_dc_value(grid, kernel.params["alpha"])
            else:
                raise ConfigError(
                    "kernel.multiplier",
                    f"{kernel.kind} kernel is singular at {int(bad.sum())} grid "
                    "frequencies and no finite-mean rule applies")
        if not kernel.premollified:
            eps = (default_mollify_eps(grid) if kernel.mollify_eps is None
                   else kernel.mollify_eps)
            mult = mult * mollifier_hat(eps * rho)
        return to_space(ComplexField(grid, hat.values * mult, rep="freq"))
    if kernel.spatial_form is None:
        raise ConfigError("kernel",
                          f"{kernel.kind} has neither multiplier nor spatial form")
    sampled = kernel.spatial_form(_space_radii(grid), kernel.mollify_eps)
    kern_hat = np.fft.fftn(np.fft.ifftshift(sampled)) * grid.spacing ** grid.dim
    return to_space(ComplexField(grid, hat.values * kern_hat, rep="freq"))


def _space_radii(grid: SpectralGrid) -> np.ndarray:
    """Radial distances from the origin, arranged for an ifftshifted kernel grid."""
    ax = grid.space_axis()
    mesh = np.meshgrid(*([ax] * grid.dim), indexing="ij")
    return np.sqrt(sum(m * m for m in mesh))


# ---- Riesz row sums ----

@dataclass(frozen=True)
class RieszRowReport:
    """Dyadic-shell decomposition of a Riesz row sum around one point."""

    total: float
    levels: np.ndarray         # shell indices m (distance band [2^-m, 2^-m+1])
    contributions: np.ndarray  # 2^{m(d-alpha)} * shell mass per level
    alpha: float
    x: np.ndarray


def riesz_row_sum(mu: DiscreteMeasure, alpha_mu: float, x,
                  level_cap: int = 30, chunk: int = 2 ** 21) -> RieszRowReport:
    """Schur-type row sum sum_m 2^{m(d-alpha)} mu(shell_m(x)) over dyadic shells.

    Shell m collects atoms at distance in (2^-m, 2^{-m+1}]; atoms closer than
    the deepest shell (including x itself) are dropped, as are distances
    above 2.  Streaming over atom chunks keeps memory flat for
    multi-million-atom measures.
    """
    x = np.asarray(x, dtype=np.float64).reshape(mu.dim)
    if level_cap < 1:
        raise ParameterError(f"level_cap must be >= 1, got {level_cap}")
    shell_mass = np.zeros(level_cap + 1)
    for lo in range(0, mu.n_atoms, chunk):
        diff = mu.atoms[lo:lo + chunk] - x
        dist = np.sqrt(np.einsum("ij,ij->i", diff, diff))
        keep = dist > 0.0
        # band (2^-m, 2^-m+1] holds dist iff m = floor(1 - log2 dist)
        m = np.floor(1.0 - np.log2(dist[keep])).astype(np.int64)
        sel = (m >= 0) & (m <= level_cap)
        shell_mass += np.bincount(m[sel],
                                  weights=mu.weights[lo:lo + chunk][keep][sel],
                                  minlength=level_cap + 1)
    levels = np.arange(level_cap + 1)
    contributions = 2.0 ** (levels * (mu.dim - alpha_mu)) * shell_mass
    return RieszRowReport(total=float(contributions.sum()), levels=levels,
                          contributions=contributions, alpha=float(alpha_mu), x=x)


# ---- small-scale L2 profile ----

def sphere_l2_profile(f, mu: DiscreteMeasure, grid: SpectralGrid,
                      j_values) -> np.ndarray:
    """L2(R^d) norms of the radius-2^-j spherical average of f d(mu).

    Pure frequency-side quadrature: sqrt of sum |fmu_hat|^2 sigma_hat(2^-j xi)^2
    times the frequency cell volume.  No mollifier, so the decaying tail of
    sigma_hat is kept intact and growth exponents are unbiased.
    """
    j_arr = [int(j) for j in np.atleast_1d(j_values)]
    hat = measure_fourier(f, mu, grid)
    power = np.abs(hat.values) ** 2
    rho = grid.freq_radii()
    cell = grid.freq_step ** grid.dim
    base = sphere_multiplier(grid.dim)
    out = np.empty(len(j_arr))
    for i, j in enumerate(j_arr):
        mult = base(2.0 ** (-j) * rho)
        out[i] = math.sqrt(float(np.sum(power * mult * mult)) * cell)
    return out


# ---- run manifests ----

def make_run_manifest(kind: str, params: dict, grid: SpectralGrid,
                      mu: DiscreteMeasure) -> dict:
    """JSON-ready record of one operator run: kernel, grid shape, measure hash."""
    return {
        "kernel": {"kind": kind, "params": {k: params[k] for k in sorted(params)}},
        "grid": {"dim": grid.dim, "n_per_axis": grid.n_per_axis,
                 "box_half_width": grid.box_half_width},
        "measure": {"hash": measure_hash(mu), "n_atoms": mu.n_atoms,
                    "total_mass": mu.total_mass,
                    "construction": mu.construction},
    }
