"""Critical-space functionals and executable interpolation inequalities.

All norms are stated directly in Fourier-series coefficients c_k, with
|c_k| the Euclidean magnitude across the three components:

  * x_norm:        sum_{k!=0} |k|^sigma |c_k|          (sigma > -3)
  * l2_norm:       (L^3 sum_k |c_k|^2)^{1/2}           (Parseval)
  * hs_dot_norm:   (L^3 sum_{k!=0} |k|^{2s} |c_k|^2)^{1/2}
  * gevrey_xm1:    sum_{k!=0} e^{r|k|} |c_k| / |k|

The check_* functions evaluate both sides of the interpolation
inequalities between these spaces and return an InequalityReport.  Where
a continuum proof integrates a radial weight over a ball, the checker
uses the same closed-form integral evaluated at the proof's split point;
the lattice sums approach those integrals as the grid grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft

from .spectral import Grid, SpectralVectorField, coeff_magnitude

REL_TOL = 1e-12

# exp overflow threshold for float64
_EXP_MAX = 709.0


@dataclass
class NormSpec:
    """Named norm: kind in {lei_lin, l2, sobolev_dot, gevrey_xm1}."""

    kind: str
    sigma: float = 0.0
    s: float = 0.0
    radius: float = 0.0

    def __post_init__(self):
        if self.kind not in ("lei_lin", "l2", "sobolev_dot", "gevrey_xm1"):
            raise ValueError(f"unknown norm kind {self.kind!r}")
        if self.kind == "lei_lin" and self.sigma <= -3:
            raise ValueError("lei_lin norms need sigma > -3 on the lattice")
        if self.kind == "gevrey_xm1" and self.radius < 0:
            raise ValueError("gevrey radius must be nonnegative")


@dataclass
class FilterSpec:
    """Sharp radial cutoff; |k| <= delta goes to the low part."""

    delta: float

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("filter cutoff must be positive")


@dataclass
class InequalityReport:
    lhs: float
    rhs: float
    margin: float = field(init=False)
    holds: bool = field(init=False)
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.margin = self.rhs - self.lhs
        self.holds = bool(self.lhs <= self.rhs * (1.0 + REL_TOL))


def x_norm(f: SpectralVectorField, sigma: float) -> float:
    if sigma <= -3:
        raise ValueError(f"x_norm requires sigma > -3, got {sigma}")
    g = f.grid
    mag = coeff_magnitude(f)
    w = np.zeros_like(g.k_mag)
    np.power(g.k_mag, sigma, out=w, where=g.nonzero)
    return float(np.sum(w * mag, where=g.nonzero))


def l2_norm(f: SpectralVectorField) -> float:
    return float(np.sqrt(f.grid.volume * np.sum(np.abs(f.coeffs) ** 2)))


def hs_dot_norm(f: SpectralVectorField, s: float) -> float:
    g = f.grid
    mag_sq = np.sum(np.abs(f.coeffs) ** 2, axis=0)
    w = np.zeros_like(g.k_mag)
    np.power(g.k_mag, 2.0 * s, out=w, where=g.nonzero)
    return float(np.sqrt(g.volume * np.sum(w * mag_sq, where=g.nonzero)))


def gevrey_xm1_norm(f: SpectralVectorField, radius: float) -> float:
    if radius < 0:
        raise ValueError("gevrey radius must be nonnegative")
    g = f.grid
    kmax = float(np.max(g.k_mag))
    if radius * kmax > _EXP_MAX:
        raise OverflowError(
            f"exp({radius} * |k_max|={kmax}) is not representable; radius too large"
        )
    mag = coeff_magnitude(f)
    w = np.zeros_like(g.k_mag)
    np.divide(np.exp(radius * g.k_mag), g.k_mag, out=w, where=g.nonzero)
    return float(np.sum(w * mag, where=g.nonzero))


def gevrey_x1_norm(f: SpectralVectorField, radius: float) -> float:
    """sum_{k!=0} e^{r|k|} |k| |c_k|, the X^1 norm with analyticity weight."""
    if radius < 0:
        raise ValueError("gevrey radius must be nonnegative")
    g = f.grid
    kmax = float(np.max(g.k_mag))
    if radius * kmax > _EXP_MAX:
        raise OverflowError(
            f"exp({radius} * |k_max|={kmax}) is not representable; radius too large"
        )
    mag = coeff_magnitude(f)
    return float(np.sum(np.exp(radius * g.k_mag) * g.k_mag * mag, where=g.nonzero))


def evaluate_norm(f: SpectralVectorField, spec: NormSpec) -> float:
    if spec.kind == "lei_lin":
        return x_norm(f, spec.sigma)
    if spec.kind == "l2":
        return l2_norm(f)
    if spec.kind == "sobolev_dot":
        return hs_dot_norm(f, spec.s)
    return gevrey_xm1_norm(f, spec.radius)


def low_pass(f: SpectralVectorField, spec: FilterSpec) -> SpectralVectorField:
    out = f.copy_coeffs()
    out[:, f.grid.k_mag > spec.delta] = 0.0
    return SpectralVectorField(f.grid, out)


def high_pass(f: SpectralVectorField, spec: FilterSpec) -> SpectralVectorField:
    out = f.copy_coeffs()
    out[:, f.grid.k_mag <= spec.delta] = 0.0
    return SpectralVectorField(f.grid, out)


def check_lem1(f: SpectralVectorField) -> InequalityReport:
    """X^0 <= sqrt(X^{-1} X^1); exact Cauchy-Schwarz on the lattice.

    Equality holds precisely for fields supported on a single shell
    |k| = const.
    """
    lhs = x_norm(f, 0.0)
    rhs = math.sqrt(x_norm(f, -1.0) * x_norm(f, 1.0))
    return InequalityReport(lhs, rhs, params={"name": "x0_interpolation"})


def _ball_constant(sigma: float) -> float:
    """Closed-form low-frequency Cauchy-Schwarz constant.

    From (int_{|xi|<lam} |xi|^{2 sigma} d xi)^{1/2} = sqrt(4 pi/(2 sigma + 3))
    lam^{sigma+3/2}, mapped to coefficient-normalized norms: the integral
    convention carries an extra (2 pi)^3 on X-type sums and (2 pi)^{3/2}
    on L^2, leaving a net (2 pi)^{-3/2}.
    """
    return math.sqrt(4.0 * math.pi / (2.0 * sigma + 3.0)) * (2.0 * math.pi) ** -1.5


def _shell_constant(sigma: float, s: float) -> float:
    """High-frequency analog from int_{|xi|>lam} |xi|^{2(sigma-s)} d xi."""
    return math.sqrt(4.0 * math.pi / (2.0 * (s - sigma) - 3.0)) * (2.0 * math.pi) ** -1.5


def check_lem2(f: SpectralVectorField, sigma: float, s: float) -> InequalityReport:
    """X^sigma against the L^2 / H-dot-s interpolation bound.

    Both sides are evaluated at the proof's split radius
    lam = (||f||_{Hs} / ||f||_{L2})^{1/s}; the resulting right side equals
    C(s, sigma) ||f||_{L2}^{1-theta} ||f||_{Hs}^theta with
    theta = (sigma + 3/2)/s.
    """
    if not 0.0 < sigma + 1.5 < s:
        raise ValueError(f"need 0 < sigma + 3/2 < s, got sigma={sigma}, s={s}")
    l2 = l2_norm(f)
    hs = hs_dot_norm(f, s)
    if l2 == 0.0 or hs == 0.0:
        raise ValueError("interpolation check needs a nonzero field")
    lam = (hs / l2) ** (1.0 / s)
    theta = (sigma + 1.5) / s
    low = _ball_constant(sigma) * lam ** (sigma + 1.5) * l2
    high = _shell_constant(sigma, s) * lam ** (sigma + 1.5 - s) * hs
    lhs = x_norm(f, sigma)
    return InequalityReport(
        lhs,
        low + high,
        params={
            "name": "l2_hs_interpolation",
            "sigma": sigma,
            "s": s,
            "lambda": lam,
            "theta": theta,
            "exponents": (1.0 - theta, theta),
            "constant": _ball_constant(sigma) + _shell_constant(sigma, s),
        },
    )


def check_lem3(f: SpectralVectorField, sigma: float, sigma0: float) -> InequalityReport:
    """X^sigma against the L^2 / X^{sigma0} interpolation bound.

    The high-frequency part |k|^{sigma - sigma0} <= lam^{sigma - sigma0}
    is exact on the lattice; the low part uses the closed-form ball
    integral.  Split at lam = (||f||_{X^{sigma0}} / ||f||_{L2})^{1/(3/2+sigma0)}.
    The unnumbered constant of the bound is reported empirically as
    lhs / (||f||_{L2}^{1-theta} ||f||_{X^{sigma0}}^theta).
    """
    if not -1.5 < sigma <= sigma0:
        raise ValueError(f"need -3/2 < sigma <= sigma0, got {sigma}, {sigma0}")
    l2 = l2_norm(f)
    x0 = x_norm(f, sigma0)
    if l2 == 0.0 or x0 == 0.0:
        raise ValueError("interpolation check needs a nonzero field")
    lam = (x0 / l2) ** (1.0 / (1.5 + sigma0))
    theta = (sigma + 1.5) / (1.5 + sigma0)
    low = _ball_constant(sigma) * lam ** (sigma + 1.5) * l2
    high = lam ** (sigma - sigma0) * x0
    lhs = x_norm(f, sigma)
    return InequalityReport(
        lhs,
        low + high,
        params={
            "name": "l2_xsigma_interpolation",
            "sigma": sigma,
            "sigma0": sigma0,
            "lambda": lam,
            "theta": theta,
            "exponents": ((sigma0 - sigma) / (1.5 + sigma0), theta),
            "empirical_ratio": lhs / (l2 ** (1.0 - theta) * x0**theta),
        },
    )


def tensor_convolution(f: SpectralVectorField, g: SpectralVectorField) -> np.ndarray:
    """Exact (linear, unwrapped) coefficient convolution of the tensor f (x) g.

    Returns T[i, j] = conv(g_i, f_j) on the doubled mode range, as an
    array of shape (3, 3, 2n-1, 2n-1, 2n-1) in ascending-m layout:
    axis index a corresponds to mode a - n, covering modes -n .. n-2.
    """
    if not f.grid.same_as(g.grid):
        raise ValueError("fields live on different grids")
    n = f.grid.n
    m = 2 * n  # padded size covers the 2n-1 support
    fs = sfft.fftshift(f.coeffs, axes=(1, 2, 3))
    gs = sfft.fftshift(g.coeffs, axes=(1, 2, 3))
    fpad = np.zeros((3, m, m, m), np.complex128)
    gpad = np.zeros((3, m, m, m), np.complex128)
    fpad[:, :n, :n, :n] = fs
    gpad[:, :n, :n, :n] = gs
    fhat = sfft.fftn(fpad, axes=(1, 2, 3))
    ghat = sfft.fftn(gpad, axes=(1, 2, 3))
    out = np.empty((3, 3, 2 * n - 1, 2 * n - 1, 2 * n - 1), np.complex128)
    for i in range(3):
        for j in range(3):
            conv = sfft.ifftn(ghat[i] * fhat[j])
            out[i, j] = conv[: 2 * n - 1, : 2 * n - 1, : 2 * n - 1]
    return out


LEM2_PAIRS = ((-1.0, 1.0), (-1.0, 2.0), (0.0, 2.0))
LEM3_PAIRS = ((-1.0, 0.0), (-1.0, 1.0), (0.0, 1.0))


def lemma_sweep(trials: int, seed: int, n_grid: int = 16, n_product: int = 8) -> dict:
    """Property sweep of the interpolation checks over random spectra.

    Each trial draws a fresh profile (shape, band, amplitude) and checks
    the Cauchy-Schwarz interpolation, both two-space interpolations at
    the standard parameter pairs, and Young's product inequality on a
    small companion grid.  Returns counters and worst margins.
    """
    from .spectral import SpectrumProfile, make_grid, random_divfree_field

    rng = np.random.default_rng(seed)
    grid = make_grid(n_grid, 2.0 * math.pi)
    pgrid = make_grid(n_product, 2.0 * math.pi)

    def draw(g):
        shape = "plateau" if rng.random() < 0.5 else "power_law"
        m_hi = float(rng.integers(2, max(g.n // 3, 3)))
        profile = SpectrumProfile(
            shape=shape,
            amplitude=float(np.exp(rng.uniform(np.log(0.01), np.log(10.0)))),
            m_lo=1.0,
            m_hi=m_hi,
            exponent=float(rng.uniform(-2.5, 0.0)),
            seed=int(rng.integers(0, 2**32)),
        )
        return random_divfree_field(g, profile)

    counts = {"lem1": 0, "lem2": 0, "lem3": 0, "product": 0}
    worst = {"lem1": math.inf, "lem2": math.inf, "lem3": math.inf, "product": math.inf}
    failures = []
    for trial in range(trials):
        f = draw(grid)
        rep = check_lem1(f)
        counts["lem1"] += rep.holds
        worst["lem1"] = min(worst["lem1"], rep.margin / rep.rhs if rep.rhs else math.inf)
        if not rep.holds:
            failures.append(("lem1", trial))
        for sigma, s in LEM2_PAIRS:
            rep = check_lem2(f, sigma, s)
            counts["lem2"] += rep.holds
            worst["lem2"] = min(worst["lem2"], rep.margin / rep.rhs)
            if not rep.holds:
                failures.append(("lem2", trial, sigma, s))
        for sigma, sigma0 in LEM3_PAIRS:
            rep = check_lem3(f, sigma, sigma0)
            counts["lem3"] += rep.holds
            worst["lem3"] = min(worst["lem3"], rep.margin / rep.rhs)
            if not rep.holds:
                failures.append(("lem3", trial, sigma, sigma0))
        fp = draw(pgrid)
        gp = draw(pgrid)
        rep = product_x0_check(fp, gp)
        counts["product"] += rep.holds
        worst["product"] = min(worst["product"], rep.margin / rep.rhs if rep.rhs else math.inf)
        if not rep.holds:
            failures.append(("product", trial))
    expected = {
        "lem1": trials,
        "lem2": trials * len(LEM2_PAIRS),
        "lem3": trials * len(LEM3_PAIRS),
        "product": trials,
    }
    return {
        "trials": trials,
        "counts": counts,
        "expected": expected,
        "worst_relative_margin": worst,
        "all_hold": counts == expected,
        "failures": failures,
    }


def product_x0_check(f: SpectralVectorField, g: SpectralVectorField) -> InequalityReport:
    """X^0 of the exact tensor convolution vs the product of X^0 norms.

    This is Young's inequality for the l^1 coefficient convolution; it
    holds for every pair of lattice fields.
    """
    conv = tensor_convolution(f, g)
    n = f.grid.n
    ax = np.arange(2 * n - 1) - n
    m1, m2, m3 = np.meshgrid(ax, ax, ax, indexing="ij")
    nonzero = (m1 != 0) | (m2 != 0) | (m3 != 0)
    mag = np.sqrt(np.sum(np.abs(conv) ** 2, axis=(0, 1)))
    lhs = float(np.sum(mag, where=nonzero))
    rhs = x_norm(f, 0.0) * x_norm(g, 0.0)
    return InequalityReport(lhs, rhs, params={"name": "x0_product_young"})
