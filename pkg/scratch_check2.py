"""Scratch: convolution oracle chain + nonlinear_term equivalence + solver order."""
import time
import numpy as np

from torusns.spectral import (
    make_grid, taylor_green, random_divfree_field, SpectrumProfile,
    nonlinear_term, dealias, SpectralVectorField, make_field, leray_project,
)
from torusns.norms import tensor_convolution, x_norm, l2_norm, product_x0_check
from torusns.solver import (
    StepScheme, step, simulate, duhamel_oracle, heat_semigroup, _phi1, _phi2,
)


def direct_tensor_convolution(f, g):
    """O(n^6) shift-and-accumulate exact convolution (independent oracle)."""
    n = f.grid.n
    import scipy.fft as sfft
    fs = sfft.fftshift(f.coeffs, axes=(1, 2, 3))
    gs = sfft.fftshift(g.coeffs, axes=(1, 2, 3))
    out = np.zeros((3, 3, 2 * n - 1, 2 * n - 1, 2 * n - 1), complex)
    for i in range(3):
        for j in range(3):
            for a in range(n):
                for b in range(n):
                    for c in range(n):
                        v = gs[i, a, b, c]
                        if v != 0:
                            out[i, j, a:a + n, b:b + n, c:c + n] += v * fs[j]
    return out


def conv_nonlinear_reference(u):
    """Dealiased P(u.grad u) assembled from the exact convolution."""
    g = u.grid
    n = g.n
    conv = tensor_convolution(u, u)  # T[i,j] = conv(u_i, u_j), index a <-> mode a - n
    # extract central n-grid (modes -n/2 .. n/2-1): index = mode + n
    lo = n - n // 2
    hi = lo + n
    import scipy.fft as sfft
    T = conv[:, :, lo:hi, lo:hi, lo:hi]
    T = sfft.ifftshift(T, axes=(2, 3, 4))
    out = np.zeros((3, n, n, n), complex)
    kk = g.k_components
    for i in range(3):
        for j in range(3):
            out[i] += 1j * kk[j] * T[i, j]
    out[:, ~g.dealias_mask] = 0.0
    out[:, 0, 0, 0] = 0.0
    out[:, g.nyquist] = 0.0
    return leray_project(SpectralVectorField(g, out))


# 1) direct O(n^6) vs padded-FFT convolution on n=4
g4 = make_grid(4, 2 * np.pi)
f = random_divfree_field(g4, SpectrumProfile("plateau", 1.0, 1, 1, seed=1))
h = random_divfree_field(g4, SpectrumProfile("power_law", 1.0, 1, 1, exponent=-1, seed=2))
t0 = time.time()
cd = direct_tensor_convolution(f, h)
cf = tensor_convolution(f, h)
print("n=4 direct vs fft conv:", np.max(np.abs(cd - cf)), f"({time.time()-t0:.2f}s)")

# 2) nonlinear_term vs convolution reference on n=8, dealiased random fields
g8 = make_grid(8, 2 * np.pi)
errs = []
t0 = time.time()
for seed in range(5):
    u = random_divfree_field(g8, SpectrumProfile("plateau", 0.7, 1, 2, seed=seed))
    nt = nonlinear_term(u)
    ref = conv_nonlinear_reference(u)
    scale = np.max(np.abs(ref.coeffs))
    errs.append(np.max(np.abs(nt.coeffs - ref.coeffs)) / scale)
print("n=8 NL vs conv ref rel err:", max(errs), f"({time.time()-t0:.2f}s)")

# plus one direct-conv check on n=8 (slow path)
t0 = time.time()
u = random_divfree_field(g8, SpectrumProfile("plateau", 0.7, 1, 2, seed=99))
cd = direct_tensor_convolution(u, u)
cf = tensor_convolution(u, u)
print("n=8 direct vs fft conv:", np.max(np.abs(cd - cf)) / np.max(np.abs(cd)),
      f"({time.time()-t0:.2f}s)")

# TG vs convolution oracle
tg = taylor_green(g8, 1.0)
nt = nonlinear_term(tg)
ref = conv_nonlinear_reference(tg)
print("TG NL vs conv:", np.max(np.abs(nt.coeffs - ref.coeffs)) / np.max(np.abs(ref.coeffs)))

# product_x0_check young
rep = product_x0_check(f, h)
print("young n=4:", rep.lhs, rep.rhs, rep.holds)

# 3) phi function accuracy at branch point
import mpmath  # noqa - only used here for reference
for z in (-1e-3, -9.9e-3, -1.01e-2, -0.5, -30.0):
    za = np.array([z])
    p1 = _phi1(za)[0]
    p2 = _phi2(za)[0]
    e1 = float(mpmath.mpf(1) * (mpmath.expm1(z) / z)) if z != 0 else 1.0
    e2 = float((mpmath.expm1(z) - z) / mpmath.mpf(z) ** 2)
    print(f"phi z={z}: phi1 rel {abs(p1-e1)/abs(e1):.2e} phi2 rel {abs(p2-e2)/abs(e2):.2e}")

# 4) step order: Richardson on TG, n=8, nu=1
nu = 1.0
u0 = taylor_green(g8, 1.0)
t_end = 0.08


def advance(u, kind, dt):
    s = StepScheme(kind, dt)
    v = dealias(u)
    for _ in range(round(t_end / dt)):
        v = step(v, s, nu)
    return v


for kind in ("exponential_euler", "etdrk2"):
    sols = [advance(u0, kind, dt) for dt in (0.008, 0.004, 0.002)]
    e1 = l2_norm(SpectralVectorField(g8, sols[0].coeffs - sols[2].coeffs))
    e2 = l2_norm(SpectralVectorField(g8, sols[1].coeffs - sols[2].coeffs))
    print(kind, "observed order ~", np.log2(e1 / e2) if e2 > 0 else "inf", e1, e2)

# 5) one etdrk2 step vs duhamel oracle, TG n=8, dt=1e-3
dt = 1e-3
u_step = step(dealias(u0), StepScheme("etdrk2", dt), nu)
fine = simulate(u0, nu, StepScheme("etdrk2", dt / 64), t_end=dt, sample_every=dt / 64)
orac = duhamel_oracle(fine, dt, 64)
mild = heat_semigroup(dealias(u0), nu, dt).coeffs - orac.coeffs
err = np.max(np.abs(u_step.coeffs - mild))
rel = err / np.max(np.abs(mild))
print("etdrk2 vs duhamel(64):", err, "rel:", rel)
x0err = x_norm(SpectralVectorField(g8, u_step.coeffs - mild), 0.0) / x_norm(
    SpectralVectorField(g8, mild), 0.0)
print("  in X0 relative:", x0err)

# oracle self-convergence on the trajectory itself
traj = simulate(u0, nu, StepScheme("etdrk2", 1e-3), t_end=0.2, sample_every=5e-3)
t_check = 0.2
ref_resid = []
for q in (8, 16, 32, 64, 128):
    o = duhamel_oracle(traj, t_check, q)
    resid = traj.state_at(t_check).coeffs - heat_semigroup(traj.states[0], nu, t_check).coeffs + o.coeffs
    ref_resid.append(x_norm(SpectralVectorField(g8, resid), 0.0))
print("oracle self-convergence residuals:", ref_resid)
