"""Frequency-side machinery: uniform grids, Fourier transforms of weighted
atomic measures, dyadic cutoffs, and scaling-law fits.

Transform convention: F(xi) = sum_i f(x_i) w_i exp(-2 pi i x_i . xi), i.e. the
transform of the measure f dmu with frequencies in cycles per unit length.
Grid frequencies are the FFT frequencies k/(2L) for a box [-L, L]^d, natural
(DC-first) FFT ordering throughout.

Two evaluation paths feed the same contract:

* exact binning when every atom sits on the spatial lattice (grid-backed
  measures are built that way on purpose), and
* Gaussian-gridding spreading with 2x oversampling otherwise, accurate to
  ~1e-9 relative against the direct sum, which stays available as the oracle
  (`direct_fourier`).
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.fft

from .errors import DomainError, FitError, ParameterError, ResourceError
from .fitting import FitReport, line_fit
from .measures import DiscreteMeasure

_FIELD_MAGIC = b"FFLD0001"

# memory guards: plain fields cap at 2^24 complex values (268 MB), the
# oversampled spreading grid at 2^25 (536 MB); the 5 GB sandbox allows no more
_MAX_FIELD_VALUES = 2**24
_MAX_SPREAD_VALUES = 2**25

_SPREAD_HALF_WIDTH = 10  # Gaussian spreading reaches this many fine cells each side

_fft_workers = 1


def set_fft_workers(n: int) -> None:
    """Cap FFT worker threads (results are identical for any cap)."""
    global _fft_workers
    _fft_workers = max(1, int(n))


@dataclass(frozen=True)
class SpectralGrid:
    """Uniform grid on [-L, L]^dim with n_per_axis points per axis.

    Spatial pitch is 2L/n; the frequency lattice is fftfreq(n, d=pitch) in
    cycles per unit, so the largest resolved frequency is freq_max = n/(4L).
    """

    dim: int
    n_per_axis: int
    box_half_width: float

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ParameterError(f"dim must be 1, 2 or 3, got {self.dim}")
        n = self.n_per_axis
        if n < 8 or (n & (n - 1)) != 0:
            raise ParameterError(f"n_per_axis must be a power of two >= 8, got {n}")
        if self.box_half_width <= 0:
            raise ParameterError("box_half_width must be positive")
        if n**self.dim > _MAX_FIELD_VALUES:
            raise ResourceError(
                f"{n}^{self.dim} grid values exceed the cap {_MAX_FIELD_VALUES}")

    @property
    def spacing(self) -> float:
        return 2.0 * self.box_half_width / self.n_per_axis

    @property
    def freq_step(self) -> float:
        return 1.0 / (2.0 * self.box_half_width)

    @property
    def freq_max(self) -> float:
        return self.n_per_axis / (4.0 * self.box_half_width)

    def axis_freqs(self) -> np.ndarray:
        return np.fft.fftfreq(self.n_per_axis, d=self.spacing)

    def freq_radii(self) -> np.ndarray:
        f = self.axis_freqs()
        sq = np.zeros((self.n_per_axis,) * self.dim)
        for a in range(self.dim):
            shape = [1] * self.dim
            shape[a] = self.n_per_axis
            sq = sq + (f**2).reshape(shape)
        return np.sqrt(sq)

    def space_axis(self) -> np.ndarray:
        return -self.box_half_width + self.spacing * np.arange(self.n_per_axis)

    def checkerboard(self) -> np.ndarray:
        # (-1)^(k_1+...+k_d) over FFT index layout; the same array also maps
        # lattice positions -L + j dx, because fftfreq index parity matches
        k = np.fft.fftfreq(self.n_per_axis, d=1.0 / self.n_per_axis)
        sign = np.where(np.round(k).astype(np.int64) % 2 == 0, 1.0, -1.0)
        out = np.ones((self.n_per_axis,) * self.dim)
        for a in range(self.dim):
            shape = [1] * self.dim
            shape[a] = self.n_per_axis
            out = out * sign.reshape(shape)
        return out


def default_grid(dim: int) -> SpectralGrid:
    """The workhorse grids: 4096 (d=1), 1024^2 (d=2), 256^3 (d=3) on [-2,2]^d."""
    n = {1: 4096, 2: 1024, 3: 256}[dim]
    return SpectralGrid(dim=dim, n_per_axis=n, box_half_width=2.0)


@dataclass
class ComplexField:
    """Complex values on a spectral grid, in space or frequency representation."""

    grid: SpectralGrid
    values: np.ndarray
    rep: str  # "freq" | "space"

    def __post_init__(self):
        n = self.grid.n_per_axis
        if self.values.shape != (n,) * self.grid.dim:
            raise ParameterError("field shape does not match grid")
        if self.rep not in ("freq", "space"):
            raise ParameterError(f"rep must be 'freq' or 'space', got {self.rep!r}")

    def copy(self) -> "ComplexField":
        return ComplexField(self.grid, self.values.copy(), self.rep)


# ---- atom -> grid transforms ----

def _atom_values(f, mu: DiscreteMeasure) -> np.ndarray:
    if f is None:
        return np.ones(mu.n_atoms)
    if callable(f):
        vals = np.asarray(f(mu.atoms))
    else:
        vals = np.asarray(f)
    if vals.shape != (mu.n_atoms,):
        raise ParameterError("f must give one value per atom")
    if not np.all(np.isfinite(vals)):
        raise ParameterError("f takes non-finite values on the atoms")
    return vals


def direct_fourier(f, mu: DiscreteMeasure, xi_points) -> np.ndarray:
    """Direct nonuniform sum at arbitrary frequencies: the oracle path.

    xi_points: (m, dim).  Cost is O(m * atoms); use for spot checks only.
    """
    xi = np.atleast_2d(np.asarray(xi_points, dtype=np.float64))
    if xi.shape[1] != mu.dim:
        raise ParameterError("frequency points must match the measure dimension")
    c = _atom_values(f, mu) * mu.weights
    out = np.empty(xi.shape[0], dtype=np.complex128)
    step = max(1, int(2_000_000 // max(mu.n_atoms, 1)))
    for i0 in range(0, xi.shape[0], step):
        phase = xi[i0:i0 + step] @ mu.atoms.T
        out[i0:i0 + step] = np.exp(-2j * np.pi * phase) @ c
    return out


def _check_in_box(mu: DiscreteMeasure, grid: SpectralGrid):
    L = grid.box_half_width
    if mu.dim != grid.dim:
        raise ParameterError("measure and grid dimensions differ")
    if np.any(mu.atoms < -L) or np.any(mu.atoms >= L):
        raise DomainError("measure support must lie inside [-L, L) of the grid box")


def _lattice_indices(mu: DiscreteMeasure, grid: SpectralGrid):
    """Integer lattice coordinates when every atom is on a grid node, else None."""
    scaled = (mu.atoms + grid.box_half_width) / grid.spacing
    idx = np.round(scaled)
    if np.max(np.abs(scaled - idx)) > 1e-9:
        return None
    return idx.astype(np.int64)


def _spread_gaussian(c: np.ndarray, u: np.ndarray, n_fine: int, tau: float,
                     dim: int) -> np.ndarray:
    """Scatter complex strengths c at torus positions u onto the fine grid."""
    w = _SPREAD_HALF_WIDTH
    offsets = np.arange(-w, w + 1)
    h = 1.0 / n_fine
    total = np.zeros(n_fine**dim)
    real_only = np.isrealobj(c)
    if not real_only:
        total = total.astype(np.complex128)
        total_im = np.zeros(n_fine**dim)

    chunk = 2048 if dim <= 2 else 512
    for i0 in range(0, u.shape[0], chunk):
        ub = u[i0:i0 + chunk]
        cb = c[i0:i0 + chunk]
        nearest = np.round(ub * n_fine).astype(np.int64)
        # per-axis weights (B, 2w+1) and wrapped indices
        wts, idxs = [], []
        for a in range(dim):
            du = ub[:, a][:, None] - (nearest[:, a][:, None] + offsets[None, :]) * h
            wts.append(np.exp(-du**2 / (4.0 * tau)))
            idxs.append((nearest[:, a][:, None] + offsets[None, :]) % n_fine)
        if dim == 1:
            wt = wts[0] * cb[:, None]
            flat = idxs[0]
        elif dim == 2:
            wt = (wts[0][:, :, None] * wts[1][:, None, :]) * cb[:, None, None]
            flat = idxs[0][:, :, None] * n_fine + idxs[1][:, None, :]
        else:
            wt = (wts[0][:, :, None, None] * wts[1][:, None, :, None]
                  * wts[2][:, None, None, :]) * cb[:, None, None, None]
            flat = (idxs[0][:, :, None, None] * n_fine
                    + idxs[1][:, None, :, None]) * n_fine + idxs[2][:, None, None, :]
        flat = flat.ravel()
        if real_only:
            total += np.bincount(flat, weights=wt.real.ravel(), minlength=n_fine**dim)
        else:
            total += np.bincount(flat, weights=wt.real.ravel(), minlength=n_fine**dim)
            total_im += np.bincount(flat, weights=wt.imag.ravel(), minlength=n_fine**dim)
    if not real_only:
        total = total + 1j * total_im
    return total.reshape((n_fine,) * dim)


def measure_fourier(f, mu: DiscreteMeasure, grid: SpectralGrid) -> ComplexField:
    """Fourier transform of f dmu sampled on the grid's frequency lattice.

    f may be None (constant 1), a callable on the atom array, or a per-atom
    value array.  Atoms exactly on the spatial lattice are binned (no error
    beyond roundoff); otherwise a Gaussian-gridding spreader with 2x
    oversampling evaluates the same sum to ~1e-9 relative accuracy.
    """
    _check_in_box(mu, grid)
    c = _atom_values(f, mu) * mu.weights
    n = grid.n_per_axis

    lattice = _lattice_indices(mu, grid)
    if lattice is not None:
        flat = lattice[:, 0]
        for a in range(1, grid.dim):
            flat = flat * n + lattice[:, a]
        binned = np.bincount(flat, weights=c, minlength=n**grid.dim)
        binned = binned.reshape((n,) * grid.dim)
        spectrum = scipy.fft.fftn(binned, workers=_fft_workers)
        return ComplexField(grid, grid.checkerboard() * spectrum, "freq")

    n_fine = 2 * n
    if n_fine**grid.dim > _MAX_SPREAD_VALUES:
        raise ResourceError(
            "oversampled spreading grid too large; align atoms to the lattice "
            "or use a coarser grid")
    # variance for unit-torus coordinates; R=2 oversampling, truncation at
    # _SPREAD_HALF_WIDTH fine cells leaves ~1e-9 relative error
    tau = _SPREAD_HALF_WIDTH / (12.0 * math.pi * n * n)
    u = (mu.atoms + grid.box_half_width) / (2.0 * grid.box_half_width)
    spread = _spread_gaussian(c, u, n_fine, tau, grid.dim)
    fine_spec = scipy.fft.fftn(spread, workers=_fft_workers)

    # central n modes per axis, then deconvolve the Gaussian window
    keep = np.fft.fftfreq(n, d=1.0 / n).astype(np.int64)  # -n/2..n/2-1, fft order
    grids = np.meshgrid(*([keep] * grid.dim), indexing="ij")
    central = fine_spec[tuple(g % n_fine for g in grids)]
    ghat = math.sqrt(4.0 * math.pi * tau) * np.exp(-4.0 * np.pi**2 * tau * keep.astype(float)**2)
    deconv = np.ones((n,) * grid.dim)
    for a in range(grid.dim):
        shape = [1] * grid.dim
        shape[a] = n
        deconv = deconv * (n_fine * ghat).reshape(shape)
    return ComplexField(grid, grid.checkerboard() * central / deconv, "freq")


def to_space(field: ComplexField) -> ComplexField:
    """Inverse transform: f(x_j) = sum_k F(xi_k) exp(2 pi i x_j . xi_k) dxi^d."""
    if field.rep != "freq":
        raise ParameterError("to_space expects a frequency-side field")
    g = field.grid
    scale = (g.n_per_axis * g.freq_step) ** g.dim
    vals = scale * scipy.fft.ifftn(field.values * g.checkerboard(), workers=_fft_workers)
    return ComplexField(g, vals, "space")


def to_freq(field: ComplexField) -> ComplexField:
    """Forward transform of a space-side field by the same convention."""
    if field.rep != "space":
        raise ParameterError("to_freq expects a space-side field")
    g = field.grid
    vals = g.spacing**g.dim * g.checkerboard() * scipy.fft.fftn(field.values,
                                                                workers=_fft_workers)
    return ComplexField(g, vals, "freq")


def field_l2sq(field: ComplexField) -> float:
    """Riemann-sum L^2 norm squared in the field's own representation."""
    g = field.grid
    cell = (g.freq_step if field.rep == "freq" else g.spacing) ** g.dim
    return float(np.sum(np.abs(field.values) ** 2) * cell)


def field_at_points(field: ComplexField, points) -> np.ndarray:
    """Multilinear interpolation of a space-side field at arbitrary points."""
    if field.rep != "space":
        raise ParameterError("field_at_points expects a space-side field")
    g = field.grid
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if pts.shape[1] != g.dim:
        raise ParameterError("points must match the grid dimension")
    x = (pts + g.box_half_width) / g.spacing
    if np.any(x < 0) or np.any(x > g.n_per_axis - 1):
        raise DomainError("interpolation points outside the grid box")
    lo = np.floor(x).astype(np.int64)
    lo = np.minimum(lo, g.n_per_axis - 2)
    frac = x - lo
    out = np.zeros(pts.shape[0], dtype=np.complex128)
    for corner in range(2**g.dim):
        bits = [(corner >> a) & 1 for a in range(g.dim)]
        weight = np.ones(pts.shape[0])
        idx = []
        for a, b in enumerate(bits):
            weight = weight * (frac[:, a] if b else 1.0 - frac[:, a])
            idx.append(lo[:, a] + b)
        out += weight * field.values[tuple(idx)]
    return out


# ---- smooth cutoffs ----

_CHI_LO = 1.5
_CHI_HI = 2.0


def _smooth_step(t):
    """C-infinity step: 0 for t <= 0, 1 for t >= 1, exp(-1/t) blend between."""
    t = np.asarray(t, dtype=float)
    num = np.where(t > 0, np.exp(-1.0 / np.maximum(t, 1e-300)), 0.0)
    den = num + np.where(1 - t > 0, np.exp(-1.0 / np.maximum(1 - t, 1e-300)), 0.0)
    return num / den


def lowpass_chi(r):
    """Smooth radial step: 1 on [0, 1.5], 0 on [2, inf)."""
    r = np.asarray(r, dtype=float)
    return 1.0 - _smooth_step((r - _CHI_LO) / (_CHI_HI - _CHI_LO))


def annulus_beta(r):
    """Dyadic annulus profile chi(r) - chi(2r): support [0.75, 2], 1 on [1, 1.5].

    Built so that beta0 + sum_{j>=1} beta(2^-j r) telescopes to exactly 1.
    """
    r = np.asarray(r, dtype=float)
    return lowpass_chi(r) - lowpass_chi(2.0 * r)


def beta0(r):
    """Low-pass completion of the dyadic partition; equals chi."""
    return lowpass_chi(r)


def mollifier_hat(rho):
    """Transform of the unit Gaussian mollifier: exp(-2 pi^2 rho^2), value 1 at 0."""
    rho = np.asarray(rho, dtype=float)
    return np.exp(-2.0 * np.pi**2 * rho**2)


def lowpass_phi_hat(rho):
    """Nonnegative low-pass with nonnegative spatial profile.

    exp(-36 rho^2) = (exp(-18 rho^2))^2, the squared transform of a Gaussian
    mollifier; below machine epsilon outside the unit ball.
    """
    rho = np.asarray(rho, dtype=float)
    return np.exp(-36.0 * rho**2)


@dataclass(frozen=True)
class CutoffSpec:
    """Descriptor for one radial cutoff profile.

    support and plateau are radial intervals; profile maps |xi| arrays to values.
    """

    kind: str
    support: tuple
    plateau: tuple
    profile: Callable


CUTOFFS = {
    "littlewood_paley_annulus": CutoffSpec(
        "littlewood_paley_annulus", (0.75, 2.0), (1.0, 1.5), annulus_beta),
    "low_pass": CutoffSpec("low_pass", (0.0, 2.0), (0.0, 1.5), lowpass_chi),
    "mollifier": CutoffSpec("mollifier", (0.0, math.inf), (0.0, 0.0), mollifier_hat),
}


def littlewood_paley(field: ComplexField, j: int) -> ComplexField:
    """Project onto the dyadic annulus |xi| ~ 2^j (j >= 1), or the low-pass (j=0)."""
    if field.rep != "freq":
        raise ParameterError("littlewood_paley expects a frequency-side field")
    if j < 0:
        raise ParameterError(f"j must be nonnegative, got {j}")
    hi = CUTOFFS["littlewood_paley_annulus"].support[1]
    if j >= 1 and 2.0**j * hi > field.grid.freq_max:
        raise DomainError(
            f"annulus 2^{j} * [{CUTOFFS['littlewood_paley_annulus'].support[0]}, {hi}] "
            f"exceeds freq_max {field.grid.freq_max}")
    radii = field.grid.freq_radii()
    mult = beta0(radii) if j == 0 else annulus_beta(radii * 2.0**-j)
    return ComplexField(field.grid, field.values * mult, "freq")


def partition_residual(grid: SpectralGrid) -> float:
    """max over grid frequencies of |beta0 + sum_j beta(2^-j .) - 1|."""
    radii = grid.freq_radii()
    j_max = max(1, int(math.ceil(math.log2(max(grid.freq_max, 1.0) / _CHI_LO))) + 1)
    total = beta0(radii)
    for j in range(1, j_max + 1):
        total = total + annulus_beta(radii * 2.0**-j)
    return float(np.max(np.abs(total - 1.0)))


# ---- scaling-law fits ----

def decay_fit(field: ComplexField, shell_count: int | None = None) -> FitReport:
    """Fit the max modulus over dyadic shells 2^m <= |xi| < 2^(m+1).

    Returns the log-log line fit; the decay exponent estimate is -slope.
    """
    if field.rep != "freq":
        raise ParameterError("decay_fit expects a frequency-side field")
    radii = field.grid.freq_radii()
    m_max = int(math.floor(math.log2(field.grid.freq_max)))  # 2^(m+1) <= freq_max
    shells = range(0, m_max)
    if shell_count is not None:
        shells = range(0, min(m_max, shell_count))
    log_r, log_peak = [], []
    mods = np.abs(field.values)
    for m in shells:
        mask = (radii >= 2.0**m) & (radii < 2.0**(m + 1))
        if not np.any(mask):
            continue
        peak = float(mods[mask].max())
        if peak <= 0:
            continue
        log_r.append(m * math.log(2.0))
        log_peak.append(math.log(peak))
    if len(log_r) < 3:
        raise FitError("fewer than 3 usable dyadic shells for the decay fit")
    return line_fit(np.array(log_r), np.array(log_peak))


def strichartz_profile(f, mu: DiscreteMeasure, grid: SpectralGrid,
                       r_values, s: float) -> np.ndarray:
    """Localized-energy statistic r^-(d-s) * int_{|xi|<=r} |F|^2 for several r."""
    r_values = np.asarray(r_values, dtype=float)
    if np.any(r_values < 1):
        raise ParameterError("radii must be >= 1")
    if np.any(r_values > grid.freq_max):
        raise DomainError(f"radius beyond freq_max {grid.freq_max}")
    field = measure_fourier(f, mu, grid)
    radii = grid.freq_radii()
    power = np.abs(field.values) ** 2
    cell = grid.freq_step**grid.dim
    out = np.empty(r_values.size)
    for i, r in enumerate(r_values):
        out[i] = r ** -(grid.dim - s) * float(power[radii <= r].sum()) * cell
    return out


def strichartz_energy(f, mu: DiscreteMeasure, grid: SpectralGrid,
                      r: float, s: float) -> float:
    """Single-radius version of strichartz_profile."""
    return float(strichartz_profile(f, mu, grid, [r], s)[0])


def annulus_energy_profile(f, nu: DiscreteMeasure, grid: SpectralGrid,
                           j_values) -> np.ndarray:
    """Annulus energies for several j sharing one transform of f dnu."""
    field = measure_fourier(f, nu, grid)
    power = np.abs(field.values) ** 2
    cell = grid.freq_step**grid.dim
    return np.array([float(np.sum(annulus_band_weight(grid, j) * power)) * cell
                     for j in j_values])


def annulus_energy(f, nu: DiscreteMeasure, grid: SpectralGrid, j: int) -> float:
    """int |transform of f dnu|^2 beta(2^-j xi) dxi over the grid."""
    return float(annulus_energy_profile(f, nu, grid, [j])[0])


def annulus_growth_fit(f, nu: DiscreteMeasure, grid: SpectralGrid,
                       j_values) -> FitReport:
    """log2 growth exponent of the annulus energies across j."""
    j_arr = np.asarray(list(j_values), dtype=float)
    energies = annulus_energy_profile(f, nu, grid, j_values)
    if np.any(energies <= 0):
        raise FitError("nonpositive annulus energy; cannot fit a growth exponent")
    return line_fit(j_arr, np.log2(energies))


def annulus_band_weight(grid: SpectralGrid, j: int) -> np.ndarray:
    """beta(2^-j |xi|) on the grid (j >= 1), with the aliasing guard."""
    if j < 1:
        raise ParameterError("annulus weights start at j = 1")
    hi = CUTOFFS["littlewood_paley_annulus"].support[1]
    if 2.0**j * hi > grid.freq_max:
        raise DomainError(f"annulus 2^{j} exceeds freq_max {grid.freq_max}")
    return annulus_beta(grid.freq_radii() * 2.0**-j)


# ---- serialization ----

def save_field_binary(field: ComplexField, path) -> None:
    with open(path, "wb") as fh:
        fh.write(_FIELD_MAGIC)
        fh.write(struct.pack("<IQdB", field.grid.dim, field.grid.n_per_axis,
                             field.grid.box_half_width,
                             0 if field.rep == "freq" else 1))
        inter = np.empty(field.values.size * 2)
        inter[0::2] = field.values.real.ravel()
        inter[1::2] = field.values.imag.ravel()
        fh.write(inter.astype("<f8").tobytes())


def load_field_binary(path) -> ComplexField:
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != _FIELD_MAGIC:
            raise ParameterError(f"{path}: bad magic {magic!r}")
        dim, n, L, repflag = struct.unpack("<IQdB", fh.read(21))
        grid = SpectralGrid(dim=dim, n_per_axis=n, box_half_width=L)
        count = 2 * n**dim
        inter = np.frombuffer(fh.read(8 * count), dtype="<f8")
    values = (inter[0::2] + 1j * inter[1::2]).reshape((n,) * dim)
    return ComplexField(grid, values.copy(), "freq" if repflag == 0 else "space")


def field_csv_rows(field: ComplexField, limit: int = 2**20):
    """Yield (coords..., re, im) rows; refuses fields above the row cap."""
    g = field.grid
    if g.n_per_axis**g.dim > limit:
        raise ResourceError(f"field has more than {limit} values; export binary instead")
    axes = [g.axis_freqs() if field.rep == "freq" else g.space_axis()
            for _ in range(g.dim)]
    mesh = np.meshgrid(*axes, indexing="ij")
    flat = [m.ravel() for m in mesh]
    vals = field.values.ravel()
    for i in range(vals.size):
        yield [float(a[i]) for a in flat] + [float(vals[i].real), float(vals[i].imag)]
