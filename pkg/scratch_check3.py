"""Scratch: energy balance, linear runs, enq1/2/3 constants, eQ2/gevrey on TG."""
import time
import numpy as np

from torusns.spectral import (
    make_grid, taylor_green, random_divfree_field, SpectrumProfile,
    SpectralVectorField, dealias, scale_field,
)
from torusns.norms import x_norm, l2_norm, gevrey_xm1_norm
from torusns.solver import (
    StepScheme, simulate, heat_semigroup, energy_balance,
    verify_enq1, verify_enq2, verify_enq3,
)

# linear run == heat semigroup
g = make_grid(16, 2 * np.pi)
u0 = random_divfree_field(g, SpectrumProfile("power_law", 0.5, 1, 5, exponent=-1.0, seed=3))
traj = simulate(u0, 1.0, StepScheme("etdrk2", 1e-2), t_end=0.5, sample_every=0.1, nonlinear=False)
errs = []
for t, s in zip(traj.times, traj.states):
    ref = heat_semigroup(u0, 1.0, t)
    scale = np.max(np.abs(ref.coeffs))
    errs.append(np.max(np.abs(s.coeffs - ref.coeffs)) / scale)
print("linear vs heat rel:", max(errs))

# energy balance on TG n=16 nu=0.1 dt=1e-3 t_end=1
t0 = time.time()
tg = taylor_green(g, 1.0)
traj = simulate(tg, 0.1, StepScheme("etdrk2", 1e-3), t_end=1.0, sample_every=1e-3)
eb = energy_balance(traj)
print(f"energy balance ({time.time()-t0:.1f}s): max resid {eb['max_abs_residual']:.3e}, "
      f"rel {eb['max_abs_residual']/eb['initial_l2_sq']:.3e}")
l2s = [l2_norm(s) for s in traj.states]
print("energy monotone:", all(l2s[i+1] <= l2s[i] + 1e-12 for i in range(len(l2s)-1)))

# sparser sampling for energy balance
traj2 = simulate(tg, 0.1, StepScheme("etdrk2", 1e-3), t_end=1.0, sample_every=1e-2)
eb2 = energy_balance(traj2)
print(f"energy balance sparse samples: rel {eb2['max_abs_residual']/eb2['initial_l2_sq']:.3e}")

# enq1/2/3 on a random small pair, n=8, T=0.5
g8 = make_grid(8, 2 * np.pi)
f0 = random_divfree_field(g8, SpectrumProfile("plateau", 0.05, 1, 2, seed=11))
h0 = random_divfree_field(g8, SpectrumProfile("plateau", 0.05, 1, 2, seed=12))
ftraj = simulate(f0, 1.0, StepScheme("etdrk2", 2.5e-3), t_end=0.5, sample_every=5e-3)
htraj = simulate(h0, 1.0, StepScheme("etdrk2", 2.5e-3), t_end=0.5, sample_every=5e-3)
for name, fn in (("enq1", verify_enq1), ("enq2", verify_enq2), ("enq3", verify_enq3)):
    rep = fn(ftraj, htraj, 0.5)
    print(name, f"lhs={rep.lhs:.4e} rhs={rep.rhs:.4e} holds={rep.holds} ratio={rep.lhs/rep.rhs:.3f}")
    # with (2pi)^-3 on enq2:
    if name == "enq2":
        print("   enq2 with (2pi)^-3 rhs:", rep.rhs * (2*np.pi)**-3, "would hold:",
              rep.lhs <= rep.rhs * (2*np.pi)**-3)

# single-shell decaying linear flow f = g
shell = random_divfree_field(g8, SpectrumProfile("plateau", 0.3, 1, 1, seed=7))
st = simulate(shell, 1.0, StepScheme("etdrk2", 2.5e-3), t_end=1.0, sample_every=5e-3, nonlinear=False)
for name, fn in (("enq1", verify_enq1), ("enq2", verify_enq2), ("enq3", verify_enq3)):
    rep = fn(st, st, 1.0)
    print("single-shell", name, f"lhs={rep.lhs:.4e} rhs={rep.rhs:.4e} holds={rep.holds}")

# TG small-data run (criterion 5 style, shrunk): nu=1, n=16, X^{-1}(u0)=0.3
A = 0.3 * np.sqrt(1.5)
tg = taylor_green(g, A)
print("u0 X^-1:", x_norm(tg, -1.0), "L2:", l2_norm(tg))
t0 = time.time()
traj = simulate(tg, 1.0, StepScheme("etdrk2", 2e-3), t_end=2.0, sample_every=0.02)
print(f"small TG run {time.time()-t0:.1f}s")

# eQ2: X^-1(t) + (nu/2) int X^1 <= X^-1(0)
times = traj.times
xm1 = np.array([x_norm(s, -1.0) for s in traj.states])
x1 = np.array([x_norm(s, 1.0) for s in traj.states])
worst = -np.inf
for i in range(len(times)):
    lhs = xm1[i] + 0.5 * np.trapz(x1[:i+1], times[:i+1])
    worst = max(worst, lhs - xm1[0])
print("eQ2 worst lhs-rhs:", worst)

# gevrey pointwise: e^{sqrt(nu t)|D|} X^-1 <= 2 X^-1(0)
gv = np.array([gevrey_xm1_norm(s, np.sqrt(1.0 * t)) for t, s in zip(times, traj.states)])
print("gevrey max lhs / (2 u0):", np.max(gv) / (2 * xm1[0]))

# sigma case 2 margins (sigma=0,1), checked t >= 20*0.02 = 0.4
x0 = np.array([x_norm(s, 0.0) for s in traj.states])
x1n = x1
from math import e as E
for sigma, series in ((0.0, x0), (1.0, x1n)):
    Cnu = ((sigma + 1) / E) ** (sigma + 1)
    worst = 0.0
    for i, t in enumerate(times):
        if t < 0.4:
            continue
        # interp xm1 at t/2 (log-linear)
        xm1_half = np.exp(np.interp(t / 2, times, np.log(xm1)))
        rhs = 2 * Cnu * t ** (-(sigma + 1) / 2) * xm1_half
        worst = max(worst, series[i] / rhs)
    print(f"sigma case2 sigma={sigma}: worst lhs/rhs = {worst:.4f}")

# split inequality J-stream with and without factor 2 (TG, lam(t))
lam = lambda t: 5 * np.sqrt(2) * np.log(2) / (4 * np.sqrt(t))
worst_no2, worst_2 = 0.0, 0.0
gmag = np.sqrt(g.k1**2 + g.k2**2 + g.k3**2)
for i, t in enumerate(times):
    if t < 0.4:
        continue
    lm = lam(t)
    mask = (gmag > lm)
    from torusns.spectral import coeff_magnitude
    mg = coeff_magnitude(traj.states[i])
    J = float(np.sum((mg / np.where(gmag > 0, gmag, 1.0))[mask & (gmag > 0)]))
    xm1_half = np.exp(np.interp(t / 2, times, np.log(xm1)))
    rhs1 = np.exp(-np.sqrt(t / 2) * lm) * xm1_half
    if rhs1 > 0 and J > 0:
        worst_no2 = max(worst_no2, J / rhs1)
        worst_2 = max(worst_2, J / (2 * rhs1))
print("J-stream worst ratio without 2:", worst_no2, "with 2:", worst_2)
