"""Fourier representation of periodic 3-D vector fields.

Fields live on the torus [0, L)^3 and are stored as Fourier-series
coefficients c_k with u(x) = sum_k c_k exp(i k.x), where the wavevectors
are k = (2*pi/L) * m for integer triples m in [-n/2, n/2)^3 (numpy FFT
layout).  Real-valued fields correspond to Hermitian coefficient arrays,
c_{-k} = conj(c_k).

Conventions enforced throughout:
  * the mean mode c_0 is zero (required by the |k|^{-1}-weighted norms),
  * the Nyquist planes m_j = -n/2 are zero (their Hermitian partner is
    not representable on the grid),
  * nonlinear products are dealiased with the 2/3 rule, which makes the
    conservative-form transport term exactly energy-neutral.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft

# pocketfft output is bitwise independent of the worker count
_FFT_WORKERS = min(2, os.cpu_count() or 1)


@dataclass(eq=False)
class Grid:
    """Cubic n x n x n Fourier grid on a torus of side L."""

    n: int
    box_length: float

    def __post_init__(self):
        if self.n < 4 or self.n % 2 != 0:
            raise ValueError(f"grid size must be an even integer >= 4, got n={self.n}")
        if not self.box_length > 0:
            raise ValueError(f"box length must be positive, got {self.box_length}")
        n = self.n
        m = np.fft.fftfreq(n, d=1.0 / n).astype(np.int64)  # signed mode indices
        self.m1, self.m2, self.m3 = np.meshgrid(m, m, m, indexing="ij")
        scale = 2.0 * np.pi / self.box_length
        self.k1 = scale * self.m1
        self.k2 = scale * self.m2
        self.k3 = scale * self.m3
        self.k_sq = self.k1**2 + self.k2**2 + self.k3**2
        self.k_mag = np.sqrt(self.k_sq)
        self.nonzero = self.k_sq > 0
        # modes whose Hermitian partner exists on the grid
        nyq = n // 2
        self.nyquist = (self.m1 == -nyq) | (self.m2 == -nyq) | (self.m3 == -nyq)
        cut = n // 3
        self.dealias_mask = (
            (np.abs(self.m1) <= cut) & (np.abs(self.m2) <= cut) & (np.abs(self.m3) <= cut)
        )
        self.inv_k_sq = np.zeros_like(self.k_sq)
        np.divide(1.0, self.k_sq, out=self.inv_k_sq, where=self.nonzero)
        # multiplier forms of the mode-zeroing rules, for hot loops
        self.clean_multiplier = (~self.nyquist).astype(np.float64)
        self.clean_multiplier[0, 0, 0] = 0.0
        self.dealias_multiplier = self.clean_multiplier * self.dealias_mask
        self.k_stack = np.stack([self.k1, self.k2, self.k3])
        for arr in (self.m1, self.m2, self.m3, self.k1, self.k2, self.k3,
                    self.k_sq, self.k_mag, self.nonzero, self.nyquist,
                    self.dealias_mask, self.inv_k_sq, self.clean_multiplier,
                    self.dealias_multiplier, self.k_stack):
            arr.flags.writeable = False

    @property
    def volume(self) -> float:
        return self.box_length**3

    @property
    def k_components(self):
        return self.k1, self.k2, self.k3

    def same_as(self, other: "Grid") -> bool:
        return self.n == other.n and self.box_length == other.box_length


def make_grid(n: int, box_length: float) -> Grid:
    return Grid(int(n), float(box_length))


@dataclass(eq=False)
class SpectralVectorField:
    """Three-component velocity field in Fourier-series coefficients.

    ``coeffs`` has shape (3, n, n, n), complex, in numpy FFT mode layout.
    Instances are treated as immutable values; all operations return new
    fields.
    """

    grid: Grid
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        n = self.grid.n
        if self.coeffs.shape != (3, n, n, n):
            raise ValueError(
                f"coefficient array shape {self.coeffs.shape} does not match grid n={n}"
            )
        if self.coeffs.dtype != np.complex128:
            self.coeffs = self.coeffs.astype(np.complex128)
        self.coeffs.flags.writeable = False

    def copy_coeffs(self) -> np.ndarray:
        out = self.coeffs.copy()
        out.flags.writeable = True
        return out


def _clean(grid: Grid, coeffs: np.ndarray) -> np.ndarray:
    """Zero the mean mode and the Nyquist planes in place."""
    coeffs *= grid.clean_multiplier
    return coeffs


def make_field(grid: Grid, coeffs: np.ndarray) -> SpectralVectorField:
    """Build a field from raw coefficients, enforcing zero-mean and Nyquist-free."""
    out = np.array(coeffs, dtype=np.complex128, copy=True)
    return SpectralVectorField(grid, _clean(grid, out))


def zero_field(grid: Grid) -> SpectralVectorField:
    return SpectralVectorField(grid, np.zeros((3, grid.n, grid.n, grid.n), np.complex128))


def forward_transform(grid: Grid, samples: np.ndarray) -> SpectralVectorField:
    """Physical samples (3, n, n, n) on the uniform grid -> coefficient field."""
    samples = np.asarray(samples)
    n = grid.n
    if samples.shape != (3, n, n, n):
        raise ValueError(f"sample array shape {samples.shape} does not match grid n={n}")
    coeffs = sfft.fftn(samples, axes=(1, 2, 3), workers=_FFT_WORKERS) / n**3
    return SpectralVectorField(grid, _clean(grid, coeffs))


def inverse_transform(f: SpectralVectorField) -> np.ndarray:
    """Coefficient field -> real physical samples of shape (3, n, n, n)."""
    n = f.grid.n
    return np.real(sfft.ifftn(f.coeffs * n**3, axes=(1, 2, 3), workers=_FFT_WORKERS))


def coeff_magnitude(f: SpectralVectorField) -> np.ndarray:
    """Per-mode Euclidean magnitude across the three components, shape (n, n, n)."""
    return np.sqrt(np.sum(np.abs(f.coeffs) ** 2, axis=0))


def hermitian_defect(f: SpectralVectorField) -> float:
    """Max |c_k - conj(c_{-k})| relative to the largest coefficient."""
    flipped = f.coeffs[:, ::-1, ::-1, ::-1]
    mirrored = np.roll(flipped, 1, axis=(1, 2, 3))
    defect = np.max(np.abs(f.coeffs - np.conj(mirrored)))
    scale = np.max(np.abs(f.coeffs))
    return float(defect / scale) if scale > 0 else 0.0


def divergence_defect(f: SpectralVectorField) -> float:
    """Max |k . c_k| / (|k| |c_k|) over populated modes."""
    g = f.grid
    dot = np.abs(g.k1 * f.coeffs[0] + g.k2 * f.coeffs[1] + g.k3 * f.coeffs[2])
    denom = g.k_mag * coeff_magnitude(f)
    mask = denom > 0
    if not np.any(mask):
        return 0.0
    return float(np.max(dot[mask] / denom[mask]))


def leray_project(f: SpectralVectorField) -> SpectralVectorField:
    """Per-mode orthogonal projection onto divergence-free fields.

    c_k -> (I - k k^T/|k|^2) c_k for k != 0; the zero mode passes through.
    """
    g = f.grid
    dot = g.k1 * f.coeffs[0] + g.k2 * f.coeffs[1] + g.k3 * f.coeffs[2]
    dot *= g.inv_k_sq
    out = f.copy_coeffs()
    out[0] -= g.k1 * dot
    out[1] -= g.k2 * dot
    out[2] -= g.k3 * dot
    # k = 0 and Nyquist modes are untouched by the projection, so cleanliness
    # of the input carries over; zero-mean inputs stay zero-mean exactly
    return SpectralVectorField(g, out)


def dealias(f: SpectralVectorField) -> SpectralVectorField:
    """Zero every mode with any |m_j| > n/3 (2/3 rule)."""
    out = f.copy_coeffs()
    out[:, ~f.grid.dealias_mask] = 0.0
    return SpectralVectorField(f.grid, out)


def gradient_component(f: SpectralVectorField, j: int) -> SpectralVectorField:
    """Spectral partial derivative d/dx_j applied componentwise."""
    k = f.grid.k_components[j]
    return SpectralVectorField(f.grid, 1j * k * f.coeffs)


def bilinear_term(f: SpectralVectorField, g: SpectralVectorField) -> SpectralVectorField:
    """Projected transport term P(f . grad g), pseudo-spectral.

    Computed in conservative form: component i is sum_j d_j (f_j g_i),
    which equals (f . grad g)_i when div f = 0.  Products are formed in
    physical space, differentiated spectrally, dealiased with the 2/3
    rule, then Leray-projected.  Output is zero-mean and divergence-free.
    """
    gr = f.grid
    if not gr.same_as(g.grid):
        raise ValueError("fields live on different grids")
    n = gr.n
    fp = inverse_transform(f)
    if f is g:
        # symmetric tensor: six distinct products suffice
        pairs = ((0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2))
        products = np.stack([fp[a] * fp[b] for a, b in pairs])
        slot = {p: i for i, p in enumerate(pairs)}
        index = {(i, j): slot[tuple(sorted((i, j)))] for i in range(3) for j in range(3)}
    else:
        gp = inverse_transform(g)
        products = (fp[None, :] * gp[:, None]).reshape(9, n, n, n)
        index = {(i, j): 3 * i + j for i in range(3) for j in range(3)}
    prod_hat = sfft.fftn(products, axes=(1, 2, 3), workers=_FFT_WORKERS)
    kk = gr.k_components
    out = np.empty((3, n, n, n), np.complex128)
    for i in range(3):
        acc = kk[0] * prod_hat[index[i, 0]]
        acc += kk[1] * prod_hat[index[i, 1]]
        acc += kk[2] * prod_hat[index[i, 2]]
        out[i] = acc
    out *= 1j / n**3 * gr.dealias_multiplier
    return leray_project(SpectralVectorField(gr, out))


def nonlinear_term(u: SpectralVectorField) -> SpectralVectorField:
    """P(u . grad u) for divergence-free u."""
    return bilinear_term(u, u)


def taylor_green(grid: Grid, amplitude: float) -> SpectralVectorField:
    """Classical Taylor-Green vortex, built exactly in coefficient space.

    u = A (sin a1 cos a2 cos a3, -cos a1 sin a2 cos a3, 0) with
    a_j = (2 pi / L) x_j; divergence-free, supported on the eight modes
    m = (+-1, +-1, +-1).
    """
    n = grid.n
    out = np.zeros((3, n, n, n), np.complex128)
    a = float(amplitude)
    for s1 in (1, -1):
        for s2 in (1, -1):
            for s3 in (1, -1):
                idx = (s1 % n, s2 % n, s3 % n)
                out[(0,) + idx] = -0.125j * a * s1
                out[(1,) + idx] = 0.125j * a * s2
    return SpectralVectorField(grid, out)


@dataclass
class SpectrumProfile:
    """Radial amplitude envelope for random divergence-free data.

    ``shape`` is "plateau" (flat envelope) or "power_law" (envelope
    |m|^exponent); the band is m_lo <= |m| <= m_hi in integer-lattice
    units.  ``seed`` fixes the phases, so equal seeds give bit-identical
    fields.
    """

    shape: str = "plateau"
    amplitude: float = 1.0
    m_lo: float = 1.0
    m_hi: float = 2.0
    exponent: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.shape not in ("plateau", "power_law"):
            raise ValueError(f"unknown profile shape {self.shape!r}")
        if self.amplitude < 0:
            raise ValueError("amplitude must be nonnegative")
        if not 0 < self.m_lo <= self.m_hi:
            raise ValueError("need 0 < m_lo <= m_hi")


def random_divfree_field(grid: Grid, profile: SpectrumProfile) -> SpectralVectorField:
    """Random divergence-free field with |c_k| following the radial envelope.

    Each Hermitian mode pair in the band gets a random tangent (k-orthogonal)
    complex direction of exact magnitude equal to the envelope value, so
    shell averages of |c_k| match the envelope exactly and no projection
    loss occurs.
    """
    n = grid.n
    m_mag = np.sqrt(grid.m1**2 + grid.m2**2 + grid.m3**2).astype(float)
    band = (m_mag >= profile.m_lo) & (m_mag <= profile.m_hi) & ~grid.nyquist & grid.nonzero
    # canonical representative of each +-k pair: lexicographically positive m
    half = (grid.m1 > 0) | ((grid.m1 == 0) & (grid.m2 > 0)) | (
        (grid.m1 == 0) & (grid.m2 == 0) & (grid.m3 > 0)
    )
    sel = band & half
    if not np.any(band):
        raise ValueError(
            f"profile band [{profile.m_lo}, {profile.m_hi}] contains no lattice modes"
        )
    idx = np.argwhere(sel)
    kvec = np.stack([grid.k1[sel], grid.k2[sel], grid.k3[sel]], axis=1)
    kn = kvec / np.linalg.norm(kvec, axis=1, keepdims=True)
    # orthonormal tangent basis for each k
    helper = np.zeros_like(kn)
    use_x = np.abs(kn[:, 0]) < 0.9
    helper[use_x, 0] = 1.0
    helper[~use_x, 1] = 1.0
    e1 = np.cross(kn, helper)
    e1 /= np.linalg.norm(e1, axis=1, keepdims=True)
    e2 = np.cross(kn, e1)

    rng = np.random.default_rng(profile.seed)
    zeta = rng.normal(size=(len(idx), 4))
    z1 = zeta[:, 0] + 1j * zeta[:, 1]
    z2 = zeta[:, 2] + 1j * zeta[:, 3]
    norm = np.sqrt(np.abs(z1) ** 2 + np.abs(z2) ** 2)
    # amplitudes are degenerate only with probability zero; guard anyway
    norm[norm == 0] = 1.0
    z1, z2 = z1 / norm, z2 / norm

    if profile.shape == "plateau":
        env = np.full(len(idx), profile.amplitude)
    else:
        env = profile.amplitude * m_mag[sel] ** profile.exponent

    cvec = env[:, None] * (z1[:, None] * e1 + z2[:, None] * e2)

    out = np.zeros((3, n, n, n), np.complex128)
    i1, i2, i3 = idx[:, 0], idx[:, 1], idx[:, 2]
    j1, j2, j3 = (-i1) % n, (-i2) % n, (-i3) % n
    for c in range(3):
        out[c, i1, i2, i3] = cvec[:, c]
        out[c, j1, j2, j3] = np.conj(cvec[:, c])
    return SpectralVectorField(grid, out)


def scale_field(f: SpectralVectorField, factor: float) -> SpectralVectorField:
    return SpectralVectorField(f.grid, f.coeffs * factor)


def add_fields(f: SpectralVectorField, g: SpectralVectorField) -> SpectralVectorField:
    if not f.grid.same_as(g.grid):
        raise ValueError("fields live on different grids")
    return SpectralVectorField(f.grid, f.coeffs + g.coeffs)


def sub_fields(f: SpectralVectorField, g: SpectralVectorField) -> SpectralVectorField:
    if not f.grid.same_as(g.grid):
        raise ValueError("fields live on different grids")
    return SpectralVectorField(f.grid, f.coeffs - g.coeffs)
