"""Scratch: wellposed pipeline on the TG 1/96 datum + a nontrivial split case."""
import time
import numpy as np

from torusns.spectral import (
    make_grid, taylor_green, random_divfree_field, SpectrumProfile,
    SpectralVectorField, add_fields, sub_fields, scale_field,
)
from torusns.norms import x_norm, l2_norm
from torusns.solver import StepScheme, simulate
from torusns.wellposed import (
    rescale_initial_data, split_initial_data, check_conditions,
    find_epsilon_T, picard_fixed_point, global_smallness_check,
)

# rescale example: ||u0||_L2 = 1, eps0 = 1 -> lam = 5
g = make_grid(16, 2 * np.pi)
u = taylor_green(g, 1.0)
u = scale_field(u, 1.0 / l2_norm(u))
lam, v = rescale_initial_data(u, 1.0)
print("lam:", lam, "new L2:", l2_norm(v), "expect", 5 ** -0.5)
print("X^-1 invariance:", x_norm(u, -1.0), x_norm(v, -1.0))

# criterion-4 pipeline
nu = 1.0
tg = taylor_green(g, 1.0)
tg = scale_field(tg, (1.0 / 96.0) / l2_norm(tg))
print("u0 L2:", l2_norm(tg), "X^-1:", x_norm(tg, -1.0))

t0 = time.time()
split = split_initial_data(tg, nu)
print("k0:", split.k0, "tail:", split.tail, "lam:", split.lam,
      "a0 zero:", not np.any(split.a0.coeffs))
recon = np.max(np.abs(add_fields(split.a0, split.b0).coeffs - tg.coeffs))
print("exact reconstruction:", recon)

T_full = 0.5
a_traj = simulate(split.a0, nu, StepScheme("etdrk2", 1e-3), t_end=T_full,
                  sample_every=5e-3, check_cfl=False) if np.any(split.a0.coeffs) else None
if a_traj is None:
    from torusns.solver import Trajectory, FluidParams
    times = np.arange(0, T_full + 1e-12, 5e-3)
    zero = SpectralVectorField(g, np.zeros_like(tg.coeffs))
    a_traj = Trajectory(times, [zero] * len(times), FluidParams(nu))

rep = find_epsilon_T(a_traj, split.b0, nu, l2_norm(tg))
print("conditions all_hold:", rep.all_hold, "eps:", rep.epsilon, "T:", rep.T)
for k, v in rep.conditions.items():
    print("  ", k, f"lhs={v['lhs']:.4e} rhs={v['rhs']:.4e} holds={v['holds']}")

crep, mesh, b_states = picard_fixed_point(split.b0, a_traj, rep.epsilon, rep.T, nu)
print("picard: converged", crep.converged, "iters", crep.iterations,
      "ratio", crep.observed_ratio)
print("distances:", crep.iterate_distances)

# cross-validate against the time stepper
utraj = simulate(tg, nu, StepScheme("etdrk2", 1e-3), t_end=rep.T, sample_every=5e-3)
uT = utraj.state_at(rep.T)
combo = add_fields(a_traj.state_at(rep.T), b_states[-1])
err = x_norm(sub_fields(uT, combo), 0.0)
print("fixed point vs simulate, X^0 err:", err, f"({time.time()-t0:.1f}s)")

# ball invariants
b0_l2, b0_xm1 = l2_norm(split.b0), x_norm(split.b0, -1.0)
print("ball: linf_l2", crep.fixed_point_norms['linf_l2'], "<=", 2*b0_l2,
      "| linf_xm1", crep.fixed_point_norms['linf_xm1'], "<=", 2*b0_xm1,
      "| l1x1", crep.fixed_point_norms['l1_x1'], "<=", rep.epsilon * 1.1)

# nontrivial split: big low-frequency + small high tail
big = random_divfree_field(g, SpectrumProfile("plateau", 0.03, 1, 2, seed=5))
small = random_divfree_field(g, SpectrumProfile("power_law", 5e-4, 3, 5, exponent=-2.0, seed=6))
u0 = add_fields(big, small)
print("\nnontrivial: u0 L2", l2_norm(u0), "X^-1", x_norm(u0, -1.0))
sp = split_initial_data(u0, nu)
print("k0:", sp.k0, "tail:", sp.tail, "lam:", sp.lam,
      "a0 modes:", int(np.count_nonzero(np.abs(sp.a0.coeffs).sum(axis=0) > 0)),
      "b0 modes:", int(np.count_nonzero(np.abs(sp.b0.coeffs).sum(axis=0) > 0)))
gs = sp.a0.grid
print("grid L after split:", gs.box_length, "k0/lam:", sp.k0 / sp.lam)
# the rescaled system evolves on timescales shrunk by lam^2
scl = sp.lam ** 2
t0 = time.time()
a_traj = simulate(sp.a0, nu, StepScheme("etdrk2", 1e-3 / scl), t_end=0.5 / scl,
                  sample_every=5e-3 / scl)
rep = find_epsilon_T(a_traj, sp.b0, nu, l2_norm(add_fields(sp.a0, sp.b0)))
print("all_hold:", rep.all_hold, "eps:", rep.epsilon, "T:", rep.T, "blocking:", rep.blocking())
crep, mesh, b_states = picard_fixed_point(sp.b0, a_traj, rep.epsilon, rep.T, nu)
print("picard converged:", crep.converged, "ratio:", crep.observed_ratio, "iters:", crep.iterations)
# cross-validation on the rescaled datum
u0r = add_fields(sp.a0, sp.b0)
utraj = simulate(u0r, nu, StepScheme("etdrk2", 1e-3 / scl), t_end=rep.T, sample_every=5e-3 / scl)
combo = add_fields(a_traj.state_at(rep.T), b_states[-1])
err = x_norm(sub_fields(utraj.state_at(rep.T), combo), 0.0)
rel = err / x_norm(utraj.state_at(rep.T), 0.0)
print("cross-validation X^0 err:", err, "rel:", rel, f"({time.time()-t0:.1f}s)")

print("\nsmallness:", global_smallness_check(scale_field(tg, 0.4 / x_norm(tg, -1.0)), 1.0))
