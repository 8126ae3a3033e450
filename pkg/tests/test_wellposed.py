import math

import numpy as np
import pytest

from torusns.norms import l2_norm, x_norm
from torusns.solver import FluidParams, StepScheme, Trajectory, simulate
from torusns.spectral import (
    SpectralVectorField,
    add_fields,
    make_field,
    make_grid,
    scale_field,
    sub_fields,
    taylor_green,
    zero_field,
)
from torusns.wellposed import (
    check_conditions,
    find_epsilon_T,
    global_smallness_check,
    heat_flow_l1x1,
    picard_fixed_point,
    picard_iterate,
    rescale_initial_data,
    split_initial_data,
)

from conftest import random_field, single_mode_field


def zero_trajectory(grid, t_end, cadence, nu=1.0):
    times = np.round(np.arange(0, round(t_end / cadence) + 1) * cadence, 12)
    z = zero_field(grid)
    return Trajectory(times, [z] * len(times), FluidParams(nu))


class TestRescale:
    def test_reference_factor(self, grid16):
        u = taylor_green(grid16, 1.0)
        u = scale_field(u, 1.0 / l2_norm(u))
        lam, v = rescale_initial_data(u, 1.0)
        assert abs(lam - 5.0) < 1e-12
        assert abs(l2_norm(v) - 5.0**-0.5) < 1e-12

    def test_critical_norm_invariance_and_energy_scaling(self, grid16):
        for seed in range(25):
            u = random_field(grid16, seed, amplitude=0.1 + seed / 10)
            eps0 = 0.5 + seed / 7
            lam, v = rescale_initial_data(u, eps0)
            xm1_u, xm1_v = x_norm(u, -1.0), x_norm(v, -1.0)
            assert abs(xm1_v - xm1_u) < 1e-12 * xm1_u
            l2_u, l2_v = l2_norm(u), l2_norm(v)
            assert abs(l2_v - lam**-0.5 * l2_u) < 1e-12 * l2_v
            assert l2_v < eps0

    def test_bad_inputs(self, grid8):
        with pytest.raises(ValueError):
            rescale_initial_data(taylor_green(grid8, 1.0), 0.0)
        with pytest.raises(ValueError):
            rescale_initial_data(zero_field(grid8), 1.0)


class TestSplit:
    def test_band_limited_below_two(self, grid16):
        # enough critical-norm mass in shells 1..sqrt(3) that every cutoff
        # below 2 fails the tail bound; the first workable shell is 2
        c = np.zeros((3, 16, 16, 16), complex)
        for m in ((1, 0, 0), (1, 1, 0), (1, 1, 1)):
            idx = tuple(mi % 16 for mi in m)
            neg = tuple((-mi) % 16 for mi in m)
            c[(1,) + idx] = 0.2 if m != (1, 0, 0) else 0.0
            c[(2,) + idx] = 0.2 if m == (1, 0, 0) else 0.0
            c[(1,) + neg] = np.conj(c[(1,) + idx])
            c[(2,) + neg] = np.conj(c[(2,) + idx])
        u0 = make_field(make_grid(16, 2 * np.pi), c)
        split = split_initial_data(u0, nu=1.0)
        assert abs(split.k0 / split.lam - 2.0) < 1e-12
        assert split.tail == 0.0

    def test_tiny_datum_splits_at_first_shell(self, grid16):
        u0 = scale_field(taylor_green(grid16, 1.0), 1e-3)
        split = split_initial_data(u0, nu=1.0)
        assert split.lam == 1.0
        assert split.k0 == 1.0
        assert not np.any(split.a0.coeffs)
        assert np.array_equal(split.b0.coeffs, u0.coeffs)

    def test_exact_reconstruction_and_tail(self, grid16):
        u0 = add_fields(
            random_field(grid16, 1, amplitude=0.3, m_hi=2),
            random_field(grid16, 2, amplitude=1e-4, m_hi=5),
        )
        split = split_initial_data(u0, nu=1.0)
        recon = add_fields(split.a0, split.b0)
        g = split.a0.grid
        rescaled = SpectralVectorField(g, split.lam * u0.coeffs)
        assert np.array_equal(recon.coeffs, rescaled.coeffs)
        assert split.tail < min(1.0 / 16.0, 1.0 / 16.0)
        # independent tail summation
        mag = np.sqrt(np.sum(np.abs(split.b0.coeffs) ** 2, axis=0))
        mask = g.nonzero & (g.k_mag >= split.k0)
        direct = float(np.sum((mag / np.where(g.nonzero, g.k_mag, 1.0))[mask]))
        assert abs(direct - split.tail) < 1e-13 * max(split.tail, 1e-300)

    def test_tail_monotone_in_cutoff(self, grid16):
        u0 = random_field(grid16, 3, amplitude=0.01)
        g = u0.grid
        mag = np.sqrt(np.sum(np.abs(u0.coeffs) ** 2, axis=0))
        weighted = np.where(g.nonzero, mag / np.where(g.nonzero, g.k_mag, 1.0), 0.0)
        radii = np.unique(g.k_mag[g.nonzero])[:10]
        tails = [float(np.sum(weighted[g.nonzero & (g.k_mag >= r)])) for r in radii]
        assert all(b <= a + 1e-15 for a, b in zip(tails, tails[1:]))

    def test_top_shell_failure(self, grid8):
        g = make_grid(8, 2 * np.pi)
        top = np.unique(g.k_mag[~g.nyquist])[-1]
        mask = np.isclose(g.k_mag, top)
        idx = tuple(np.argwhere(mask)[0])
        c = np.zeros((3, 8, 8, 8), complex)
        c[(1,) + idx] = 10.0
        neg = tuple((-i) % 8 for i in idx)
        c[(1,) + neg] = 10.0
        u0 = make_field(g, c)
        with pytest.raises(ValueError):
            split_initial_data(u0, nu=1.0)


class TestConditions:
    def test_zero_high_part_vacuous(self, grid16):
        a_traj = zero_trajectory(grid16, 0.5, 0.05)
        rep = check_conditions(a_traj, zero_field(grid16), 1.0 / 48.0, 0.5, 1.0, 0.01)
        for name in ("C1", "C2", "C3", "C5", "C7"):
            assert rep.conditions[name]["holds"]

    def test_printed_arithmetic_for_c4(self, grid16):
        b0 = taylor_green(grid16, 1.0)
        b0 = scale_field(b0, (1.0 / 96.0) / l2_norm(b0))
        a_traj = zero_trajectory(grid16, 0.5, 0.05)
        rep = check_conditions(a_traj, b0, 1.0 / 48.0, 0.5, 1.0, 1.0 / 96.0)
        c4 = rep.conditions["C4"]
        assert abs(c4["lhs"] - 1.0 / 24.0) < 1e-14
        assert abs(c4["rhs"] - 1.0 / 12.0) < 1e-15
        assert c4["holds"]

    def test_heat_flow_budget_vanishes_with_horizon(self, grid16):
        b0 = scale_field(taylor_green(grid16, 1.0), 0.01)
        values = [heat_flow_l1x1(b0, 1.0, T) for T in (0.8, 0.4, 0.2, 0.1, 0.05)]
        assert all(b < a for a, b in zip(values, values[1:]))
        assert values[-1] < values[0] / 4.0

    def test_epsilon_range_enforced(self, grid16):
        a_traj = zero_trajectory(grid16, 0.5, 0.05)
        with pytest.raises(ValueError):
            check_conditions(a_traj, zero_field(grid16), 0.05, 0.5, 1.0, 0.01)

    def test_horizon_beyond_trajectory(self, grid16):
        a_traj = zero_trajectory(grid16, 0.5, 0.05)
        with pytest.raises(ValueError):
            check_conditions(a_traj, zero_field(grid16), 1.0 / 48.0, 0.9, 1.0, 0.01)


@pytest.fixture(scope="module")
def tg_pipeline(grid16):
    """Taylor-Green datum at energy 1/96: split, conditions, low-part run."""
    nu = 1.0
    u0 = taylor_green(grid16, 1.0)
    u0 = scale_field(u0, (1.0 / 96.0) / l2_norm(u0))
    split = split_initial_data(u0, nu)
    if np.any(split.a0.coeffs):
        a_traj = simulate(split.a0, nu, StepScheme("etdrk2", 1e-3), 0.5, 5e-3)
    else:
        a_traj = zero_trajectory(split.a0.grid, 0.5, 5e-3, nu)
    return u0, split, a_traj


class TestSearchAndContraction:
    def test_find_epsilon_T_succeeds(self, tg_pipeline):
        u0, split, a_traj = tg_pipeline
        rep = find_epsilon_T(a_traj, split.b0, 1.0, l2_norm(u0))
        assert rep.all_hold
        assert 0 < rep.epsilon < 1.0 / 24.0
        assert rep.T > 0

    def test_zero_high_part_fixed_point_is_zero(self, grid16):
        a_traj = zero_trajectory(grid16, 0.2, 0.02)
        report, mesh, states = picard_fixed_point(
            zero_field(grid16), a_traj, 1.0 / 48.0, 0.2, 1.0
        )
        assert report.converged and report.iterations == 1
        assert all(not np.any(s.coeffs) for s in states)

    def test_linear_variant_reproduces_heat_flow(self, grid16):
        from torusns.solver import heat_factor

        b0 = scale_field(taylor_green(grid16, 1.0), 1e-3)
        a_traj = zero_trajectory(grid16, 0.2, 0.02)
        report, mesh, states = picard_fixed_point(
            b0, a_traj, 1.0 / 48.0, 0.2, 1.0, include_quadratic=False
        )
        assert report.converged
        for t, s in zip(mesh, states):
            ref = heat_factor(grid16, 1.0, t) * b0.coeffs
            assert np.max(np.abs(s.coeffs - ref)) < 1e-15

    def test_contraction_and_cross_validation(self, tg_pipeline):
        u0, split, a_traj = tg_pipeline
        nu = 1.0
        rep = find_epsilon_T(a_traj, split.b0, nu, l2_norm(u0))
        report, mesh, b_states = picard_fixed_point(
            split.b0, a_traj, rep.epsilon, rep.T, nu
        )
        assert report.converged
        assert report.observed_ratio <= 0.6
        # ball invariants
        b0_l2, b0_xm1 = l2_norm(split.b0), x_norm(split.b0, -1.0)
        assert report.fixed_point_norms["linf_l2"] <= 2.0 * b0_l2 * (1 + 1e-12)
        assert report.fixed_point_norms["linf_xm1"] <= 2.0 * b0_xm1 * (1 + 1e-12)
        assert report.fixed_point_norms["l1_x1"] <= rep.epsilon * 1.1
        # fixed point against the time stepper
        utraj = simulate(u0, nu, StepScheme("etdrk2", 1e-3), rep.T, 5e-3)
        combo = add_fields(a_traj.state_at(rep.T), b_states[-1])
        err = x_norm(sub_fields(utraj.state_at(rep.T), combo), 0.0)
        assert err < 1e-6

    def test_rescaled_nontrivial_split_pipeline(self, grid16):
        nu = 1.0
        u0 = add_fields(
            random_field(grid16, 5, amplitude=0.03, m_hi=2),
            random_field(grid16, 6, amplitude=5e-4, m_hi=5, exponent=-2.0),
        )
        split = split_initial_data(u0, nu)
        assert split.lam > 1.0
        assert np.any(split.a0.coeffs) and np.any(split.b0.coeffs)
        scl = split.lam**2
        a_traj = simulate(
            split.a0, nu, StepScheme("etdrk2", 1e-3 / scl), 0.5 / scl, 5e-3 / scl
        )
        rep = find_epsilon_T(a_traj, split.b0, nu, l2_norm(u0))
        assert rep.all_hold, rep.blocking()
        report, mesh, b_states = picard_fixed_point(
            split.b0, a_traj, rep.epsilon, rep.T, nu
        )
        assert report.converged
        assert report.observed_ratio <= 0.6
        u0r = add_fields(split.a0, split.b0)
        utraj = simulate(u0r, nu, StepScheme("etdrk2", 1e-3 / scl), rep.T, 5e-3 / scl)
        combo = add_fields(a_traj.state_at(rep.T), b_states[-1])
        rel = x_norm(sub_fields(utraj.state_at(rep.T), combo), 0.0) / x_norm(
            utraj.state_at(rep.T), 0.0
        )
        assert rel < 1e-6


class TestGlobalSmallness:
    def test_thresholds(self, grid16):
        u = taylor_green(grid16, 1.0)
        for target, expect in ((0.4, (True, True)), (0.7, (True, False))):
            v = scale_field(u, target / x_norm(u, -1.0))
            rep = global_smallness_check(v, 1.0)
            assert abs(rep["xm1"] - target) < 1e-12
            assert (rep["global_small"], rep["halfnu_small"]) == expect

    def test_single_shell_example(self, grid8):
        u = single_mode_field(grid8, component=1, m=(1, 0, 0), coeff=0.2)
        rep = global_smallness_check(u, 1.0)
        assert abs(rep["xm1"] - 0.4) < 1e-14
        assert rep["global_small"] and rep["halfnu_small"]
