import math

import numpy as np
import pytest

from torusns.norms import l2_norm, x_norm
from torusns.solver import (
    FluidParams,
    IntegrationError,
    StepScheme,
    Trajectory,
    duhamel_oracle,
    energy_balance,
    heat_semigroup,
    simulate,
    step,
    verify_enq1,
    verify_enq2,
    verify_enq3,
)
from torusns.spectral import (
    SpectralVectorField,
    dealias,
    make_grid,
    scale_field,
    sub_fields,
    taylor_green,
    zero_field,
)
from torusns.wellposed import rescale_initial_data

from conftest import random_field, single_mode_field


def field_err(a, b):
    scale = max(np.max(np.abs(a.coeffs)), np.max(np.abs(b.coeffs)), 1e-300)
    return np.max(np.abs(a.coeffs - b.coeffs)) / scale


class TestHeatSemigroup:
    def test_halving_time(self, grid8):
        f = single_mode_field(grid8, m=(1, 0, 0))
        out = heat_semigroup(f, 1.0, math.log(2.0))
        assert abs(out.coeffs[1, 1, 0, 0] - 0.5) < 1e-15

    def test_zero_time_identity(self, grid8):
        f = random_field(grid8, 0)
        assert heat_semigroup(f, 1.0, 0.0) is f

    def test_semigroup_law(self, grid16):
        f = random_field(grid16, 1)
        one = heat_semigroup(heat_semigroup(f, 0.7, 0.3), 0.7, 0.45)
        two = heat_semigroup(f, 0.7, 0.75)
        assert field_err(one, two) < 1e-13

    def test_negative_time_rejected(self, grid8):
        with pytest.raises(ValueError):
            heat_semigroup(random_field(grid8, 0), 1.0, -0.1)


class TestStep:
    def test_single_mode_equals_heat(self, grid8):
        u = single_mode_field(grid8, m=(1, 0, 0), coeff=0.4 - 0.1j)
        s = StepScheme("etdrk2", 1e-2)
        out = step(u, s, 1.0)
        ref = heat_semigroup(u, 1.0, 1e-2)
        assert field_err(out, ref) < 1e-14

    def test_nonlinear_off_equals_heat_exactly(self, grid16):
        u = random_field(grid16, 2)
        s = StepScheme("exponential_euler", 5e-3)
        out = step(u, s, 0.8, nonlinear=False)
        ref = heat_semigroup(u, 0.8, 5e-3)
        assert np.array_equal(out.coeffs, ref.coeffs)

    @pytest.mark.parametrize(
        "kind,min_order", [("exponential_euler", 0.9), ("etdrk2", 1.9)]
    )
    def test_convergence_order(self, grid8, kind, min_order):
        nu, t_end = 1.0, 0.08
        u0 = dealias(taylor_green(grid8, 1.0))

        def advance(dt):
            u = u0
            for _ in range(round(t_end / dt)):
                u = step(u, StepScheme(kind, dt), nu)
            return u

        coarse, mid, fine = (advance(dt) for dt in (8e-3, 4e-3, 2e-3))
        e1 = l2_norm(sub_fields(coarse, fine))
        e2 = l2_norm(sub_fields(mid, fine))
        observed = math.log2(e1 / e2)
        assert observed >= min_order

    def test_overflow_raises_integration_error(self, grid8):
        u = scale_field(taylor_green(grid8, 1.0), 1e154)
        with np.errstate(invalid="ignore", over="ignore"):
            with pytest.raises(IntegrationError):
                step(u, StepScheme("etdrk2", 10.0), 1e-12, t=0.5)

    def test_invariants_preserved(self, grid16):
        u = dealias(random_field(grid16, 3, amplitude=0.3))
        out = step(u, StepScheme("etdrk2", 1e-3), 1.0)
        from torusns.spectral import divergence_defect, hermitian_defect

        assert divergence_defect(out) < 1e-12
        assert hermitian_defect(out) < 1e-12
        assert not np.any(out.coeffs[:, 0, 0, 0])

    def test_bad_scheme_rejected(self):
        with pytest.raises(ValueError):
            StepScheme("rk4", 1e-3)
        with pytest.raises(ValueError):
            StepScheme("etdrk2", 0.0)


class TestSimulate:
    def test_zero_datum_stays_zero(self, grid8):
        traj = simulate(zero_field(grid8), 1.0, StepScheme("etdrk2", 1e-2), 0.1, 0.05)
        for s in traj.states:
            assert not np.any(s.coeffs)

    def test_linear_run_matches_heat(self, grid16):
        u0 = random_field(grid16, 4)
        traj = simulate(
            u0, 1.0, StepScheme("etdrk2", 1e-2), 0.5, 0.1, nonlinear=False
        )
        for t, state in zip(traj.times, traj.states):
            assert field_err(state, heat_semigroup(u0, 1.0, t)) < 1e-12

    def test_energy_monotone_on_taylor_green(self, grid16):
        traj = simulate(taylor_green(grid16, 1.0), 1.0, StepScheme("etdrk2", 1e-3), 0.2, 1e-2)
        l2s = [l2_norm(s) for s in traj.states]
        for a, b in zip(l2s, l2s[1:]):
            assert b <= a * (1.0 + 1e-12)

    def test_mesh_validation(self, grid8):
        u0 = taylor_green(grid8, 1.0)
        with pytest.raises(ValueError):
            simulate(u0, 1.0, StepScheme("etdrk2", 1e-2), 0.1, 0.0033)
        with pytest.raises(ValueError):
            simulate(u0, 1.0, StepScheme("etdrk2", 3e-2), 0.1, 0.03)

    def test_cfl_guard_trips(self, grid16):
        u0 = taylor_green(grid16, 50.0)
        with pytest.raises(IntegrationError):
            simulate(u0, 1e-6, StepScheme("etdrk2", 0.05), 0.5, 0.05)

    def test_trajectory_validation(self, grid8):
        f = taylor_green(grid8, 1.0)
        with pytest.raises(ValueError):
            Trajectory(np.array([0.1, 0.2]), [f, f], FluidParams(1.0))
        with pytest.raises(ValueError):
            Trajectory(np.array([0.0, 0.0]), [f, f], FluidParams(1.0))


class TestDuhamelOracle:
    def test_zero_trajectory(self, grid8):
        traj = simulate(zero_field(grid8), 1.0, StepScheme("etdrk2", 1e-2), 0.1, 0.05)
        assert not np.any(duhamel_oracle(traj, 0.1, 8).coeffs)

    def test_single_mode_linear_flow_integrates_to_zero(self, grid8):
        u0 = single_mode_field(grid8, m=(1, 0, 0), coeff=0.3)
        traj = simulate(u0, 1.0, StepScheme("etdrk2", 1e-2), 0.2, 0.05)
        orac = duhamel_oracle(traj, 0.2, 16)
        assert np.max(np.abs(orac.coeffs)) < 1e-14

    def test_one_step_against_oracle(self, grid8):
        nu, dt = 1.0, 1e-3
        u0 = dealias(taylor_green(grid8, 1.0))
        fine = simulate(u0, nu, StepScheme("etdrk2", dt / 64), dt, dt / 64)
        mild = sub_fields(heat_semigroup(u0, nu, dt), duhamel_oracle(fine, dt, 64))
        stepped = step(u0, StepScheme("etdrk2", dt), nu)
        err = x_norm(sub_fields(stepped, mild), 0.0) / x_norm(mild, 0.0)
        assert err < 1e-8

    def test_self_convergence_with_quadrature_refinement(self, grid8):
        nu = 1.0
        u0 = taylor_green(grid8, 1.0)
        traj = simulate(u0, nu, StepScheme("etdrk2", 1e-3), 0.2, 5e-3)
        t = 0.2
        heat = heat_semigroup(traj.states[0], nu, t)
        residuals = []
        for q in (8, 16, 32, 64):
            resid = traj.state_at(t).coeffs - heat.coeffs + duhamel_oracle(traj, t, q).coeffs
            residuals.append(x_norm(SpectralVectorField(traj.grid, resid), 0.0))
        assert residuals[1] < residuals[0] * 0.6  # trapezoid refinement bites
        assert all(b <= a * (1 + 1e-9) for a, b in zip(residuals, residuals[1:]))

    def test_out_of_range_time(self, grid8):
        traj = simulate(taylor_green(grid8, 1.0), 1.0, StepScheme("etdrk2", 1e-2), 0.1, 0.05)
        with pytest.raises(ValueError):
            duhamel_oracle(traj, 0.3, 8)
        with pytest.raises(ValueError):
            duhamel_oracle(traj, 0.1, 1)


@pytest.fixture(scope="module")
def small_pair(grid8):
    f0 = random_field(grid8, 11, amplitude=0.05, m_hi=2)
    g0 = random_field(grid8, 12, amplitude=0.05, m_hi=2)
    scheme = StepScheme("etdrk2", 2.5e-3)
    return (
        simulate(f0, 1.0, scheme, 0.5, 5e-3),
        simulate(g0, 1.0, scheme, 0.5, 5e-3),
    )


class TestTrilinearEstimates:
    def test_zero_pair_degenerate(self, grid8):
        traj = simulate(zero_field(grid8), 1.0, StepScheme("etdrk2", 1e-2), 0.1, 0.05)
        for verify in (verify_enq1, verify_enq2, verify_enq3):
            rep = verify(traj, traj, 0.1)
            assert rep.lhs == 0.0 and rep.rhs == 0.0 and rep.holds

    def test_single_shell_linear_flow(self, grid8):
        u0 = random_field(grid8, 7, amplitude=0.3, m_hi=1)
        traj = simulate(u0, 1.0, StepScheme("etdrk2", 2.5e-3), 1.0, 5e-3, nonlinear=False)
        for verify in (verify_enq1, verify_enq2, verify_enq3):
            rep = verify(traj, traj, 1.0)
            assert rep.holds and rep.margin > 0

    def test_random_small_pair(self, small_pair):
        f_traj, g_traj = small_pair
        for verify in (verify_enq1, verify_enq2, verify_enq3):
            rep = verify(f_traj, g_traj, 0.5)
            assert rep.holds and rep.margin > 0

    def test_mesh_mismatch_rejected(self, grid8, small_pair):
        f_traj, _ = small_pair
        other = simulate(
            random_field(grid8, 13, amplitude=0.05), 1.0, StepScheme("etdrk2", 2.5e-3), 0.5, 0.05
        )
        with pytest.raises(ValueError):
            verify_enq1(f_traj, other, 0.5)


class TestEnergyBalance:
    def test_zero_trajectory(self, grid8):
        traj = simulate(zero_field(grid8), 1.0, StepScheme("etdrk2", 1e-2), 0.1, 0.05)
        assert energy_balance(traj)["max_abs_residual"] == 0.0

    def test_linear_flow_residual_is_quadrature_error(self, grid8):
        u0 = random_field(grid8, 5, amplitude=1.0, m_hi=2)
        resid = []
        for cadence in (0.05, 0.025, 0.0125):
            traj = simulate(
                u0, 1.0, StepScheme("etdrk2", 0.0025), 0.4, cadence, nonlinear=False
            )
            resid.append(energy_balance(traj)["max_abs_residual"])
        # pure trapezoid error in int ||grad u||^2: second-order in cadence
        assert resid[1] < resid[0] / 3.0
        assert resid[2] < resid[1] / 3.0

    def test_taylor_green_budget(self, grid16):
        traj = simulate(taylor_green(grid16, 1.0), 0.1, StepScheme("etdrk2", 1e-3), 0.3, 1e-3)
        eb = energy_balance(traj)
        assert eb["max_abs_residual"] <= 1e-5 * eb["initial_l2_sq"]


class TestScalingProperty:
    def test_rescaled_run_reproduces_rescaled_state(self, grid16):
        nu, t_end = 1.0, 0.1
        u0 = dealias(random_field(grid16, 6, amplitude=0.5, m_hi=4))
        traj = simulate(u0, nu, StepScheme("etdrk2", 1e-3), t_end, t_end)
        lam, v0 = rescale_initial_data(u0, 2.0 * l2_norm(u0))
        vtraj = simulate(
            v0, nu, StepScheme("etdrk2", 1e-3 / lam**2), t_end / lam**2, t_end / lam**2
        )
        expect = SpectralVectorField(v0.grid, lam * traj.states[-1].coeffs)
        err = np.max(np.abs(vtraj.states[-1].coeffs - expect.coeffs))
        assert err < 1e-10 * np.max(np.abs(expect.coeffs))
