import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from torusns.norms import (
    FilterSpec,
    NormSpec,
    check_lem1,
    check_lem2,
    check_lem3,
    gevrey_xm1_norm,
    high_pass,
    hs_dot_norm,
    l2_norm,
    lemma_sweep,
    low_pass,
    product_x0_check,
    x_norm,
)
from torusns.spectral import (
    SpectralVectorField,
    coeff_magnitude,
    gradient_component,
    inverse_transform,
    make_field,
    make_grid,
    scale_field,
    zero_field,
)
from torusns.io import to_jsonable

from conftest import random_field, single_mode_field
from test_spectral import direct_tensor_convolution


@pytest.fixture(scope="module")
def cos_field(grid8):
    """u = 2 cos(x1) e2: one Hermitian pair on the unit shell."""
    return single_mode_field(grid8, component=1, m=(1, 0, 0), coeff=1.0)


class TestXNorm:
    def test_single_shell_values(self, cos_field):
        for sigma in (-1.0, 0.0, 1.0):
            assert abs(x_norm(cos_field, sigma) - 2.0) < 1e-14

    def test_zero_field(self, grid8):
        for sigma in (-2.5, -1.0, 0.0, 2.0):
            assert x_norm(zero_field(grid8), sigma) == 0.0

    def test_sigma_bound_rejected(self, cos_field):
        with pytest.raises(ValueError):
            x_norm(cos_field, -3.0)

    def test_against_direct_summation(self, grid16):
        f = random_field(grid16, 12)
        mag = coeff_magnitude(f)
        g = grid16
        total = 0.0
        for idx in np.argwhere(mag > 0):
            total += mag[tuple(idx)]
        assert abs(x_norm(f, 0.0) - total) < 1e-13 * total


class TestL2Norm:
    def test_single_shell_value(self, cos_field):
        assert abs(l2_norm(cos_field) - math.sqrt(2 * (2 * math.pi) ** 3)) < 1e-12

    def test_zero(self, grid8):
        assert l2_norm(zero_field(grid8)) == 0.0

    def test_against_physical_quadrature(self, grid16):
        f = random_field(grid16, 3)
        samples = inverse_transform(f)
        h = grid16.box_length / grid16.n
        riemann = math.sqrt(float(np.sum(samples**2)) * h**3)
        assert abs(l2_norm(f) - riemann) < 1e-12 * riemann


class TestSobolevNorm:
    def test_single_shell_all_s(self, cos_field):
        expect = math.sqrt(2 * (2 * math.pi) ** 3)
        for s in (-1.0, 0.0, 0.5, 2.0):
            assert abs(hs_dot_norm(cos_field, s) - expect) < 1e-12

    def test_s0_equals_l2(self, grid16):
        f = random_field(grid16, 8)
        assert abs(hs_dot_norm(f, 0.0) - l2_norm(f)) < 1e-13 * l2_norm(f)

    def test_gradient_relation(self, grid16):
        f = random_field(grid16, 9)
        grad_sq = sum(l2_norm(gradient_component(f, j)) ** 2 for j in range(3))
        h1 = hs_dot_norm(f, 1.0)
        assert abs(math.sqrt(grad_sq) - h1) < 1e-12 * h1


class TestGevreyNorm:
    def test_radius_zero_is_critical_norm(self, grid16):
        f = random_field(grid16, 4)
        assert gevrey_xm1_norm(f, 0.0) == x_norm(f, -1.0)

    def test_single_shell_value(self, cos_field):
        assert abs(gevrey_xm1_norm(cos_field, math.log(2.0)) - 4.0) < 1e-13

    def test_monotone_in_radius(self, grid16):
        f = random_field(grid16, 5)
        values = [gevrey_xm1_norm(f, r) for r in (0.0, 0.1, 0.5, 1.0)]
        assert all(values[i] <= values[i + 1] for i in range(len(values) - 1))

    def test_against_direct_summation(self, grid16):
        f = random_field(grid16, 6)
        g = grid16
        mag = coeff_magnitude(f)
        total = 0.0
        for idx in np.argwhere(mag > 0):
            k = g.k_mag[tuple(idx)]
            total += math.exp(0.5 * k) * mag[tuple(idx)] / k
        got = gevrey_xm1_norm(f, 0.5)
        assert abs(got - total) < 1e-13 * total

    def test_overflow_guard(self, grid16):
        f = random_field(grid16, 7)
        with pytest.raises(OverflowError):
            gevrey_xm1_norm(f, 60.0)

    def test_negative_radius_rejected(self, cos_field):
        with pytest.raises(ValueError):
            gevrey_xm1_norm(cos_field, -0.1)


class TestFilters:
    def test_low_below_first_shell_is_zero(self, grid16):
        f = random_field(grid16, 1)
        low = low_pass(f, FilterSpec(0.5))
        assert not np.any(low.coeffs)

    def test_delta_above_top_shell(self, grid16):
        f = random_field(grid16, 2)
        top = float(np.max(grid16.k_mag)) + 1.0
        assert not np.any(high_pass(f, FilterSpec(top)).coeffs)
        assert np.array_equal(low_pass(f, FilterSpec(top)).coeffs, f.coeffs)

    @given(seed=st.integers(0, 10_000), delta=st.floats(0.3, 10.0))
    def test_completeness_exact(self, seed, delta):
        g = make_grid(8, 2 * np.pi)
        f = random_field(g, seed)
        spec = FilterSpec(delta)
        recon = low_pass(f, spec).coeffs + high_pass(f, spec).coeffs
        assert np.array_equal(recon, f.coeffs)

    def test_boundary_shell_goes_low(self, grid8):
        f = single_mode_field(grid8, m=(1, 0, 0))
        low = low_pass(f, FilterSpec(1.0))
        assert np.array_equal(low.coeffs, f.coeffs)

    def test_idempotent_and_disjoint(self, grid16):
        f = random_field(grid16, 3)
        spec = FilterSpec(2.5)
        low = low_pass(f, spec)
        assert np.array_equal(low_pass(low, spec).coeffs, low.coeffs)
        assert not np.any(high_pass(low, spec).coeffs)

    def test_energy_pythagoras(self, grid16):
        f = random_field(grid16, 4)
        spec = FilterSpec(2.5)
        total = l2_norm(f) ** 2
        parts = l2_norm(low_pass(f, spec)) ** 2 + l2_norm(high_pass(f, spec)) ** 2
        assert abs(total - parts) < 1e-12 * total

    def test_bad_delta(self):
        with pytest.raises(ValueError):
            FilterSpec(0.0)


class TestLem1:
    def test_single_shell_equality(self, cos_field):
        rep = check_lem1(cos_field)
        assert rep.holds
        assert abs(rep.lhs - 2.0) < 1e-14 and abs(rep.rhs - 2.0) < 1e-14
        assert abs(rep.margin) < 1e-12

    def test_zero_field_degenerate(self, grid8):
        rep = check_lem1(zero_field(grid8))
        assert rep.lhs == rep.rhs == 0.0 and rep.holds

    def test_two_shell_strict_inequality(self, grid8):
        c = np.zeros((3, 8, 8, 8), complex)
        for m, w in (((1, 0, 0), 0.5), ((0, 2, 0), 0.5)):
            idx = tuple(mi % 8 for mi in m)
            neg = tuple((-mi) % 8 for mi in m)
            c[(1,) + idx] = w
            c[(1,) + neg] = w
        rep = check_lem1(make_field(grid8, c))
        assert rep.holds and rep.margin > 1e-3

    @given(seed=st.integers(0, 2**31 - 1))
    def test_holds_on_random_fields(self, seed):
        g = make_grid(16, 2 * np.pi)
        rep = check_lem1(random_field(g, seed))
        assert rep.holds


class TestLem2:
    def test_exponent_report(self, grid16):
        rep = check_lem2(random_field(grid16, 1), -1.0, 1.0)
        assert rep.params["exponents"] == (0.5, 0.5)
        assert rep.params["theta"] == 0.5

    def test_single_shell_holds(self, cos_field):
        rep = check_lem2(cos_field, -1.0, 2.0)
        assert rep.holds and rep.margin > 0

    @pytest.mark.parametrize("sigma,s", [(-1.0, 1.0), (-1.0, 2.0), (0.0, 2.0)])
    def test_random_sweep(self, grid16, sigma, s):
        for seed in range(50):
            rep = check_lem2(random_field(grid16, seed), sigma, s)
            assert rep.holds

    def test_range_violations(self, cos_field):
        with pytest.raises(ValueError):
            check_lem2(cos_field, -1.5, 1.0)
        with pytest.raises(ValueError):
            check_lem2(cos_field, 0.0, 1.0)

    def test_zero_field_rejected(self, grid8):
        with pytest.raises(ValueError):
            check_lem2(zero_field(grid8), -1.0, 1.0)


class TestLem3:
    def test_theta_value(self, grid16):
        rep = check_lem3(random_field(grid16, 2), -1.0, 0.0)
        assert abs(rep.params["theta"] - 1.0 / 3.0) < 1e-15

    def test_endpoint_sigma_equal(self, cos_field):
        rep = check_lem3(cos_field, 0.0, 0.0)
        assert rep.params["theta"] == 1.0
        assert rep.holds

    @pytest.mark.parametrize("sigma,sigma0", [(-1.0, 0.0), (-1.0, 1.0), (0.0, 1.0)])
    def test_random_sweep(self, grid16, sigma, sigma0):
        for seed in range(50):
            rep = check_lem3(random_field(grid16, seed), sigma, sigma0)
            assert rep.holds
            assert rep.params["empirical_ratio"] > 0

    def test_range_violation(self, cos_field):
        with pytest.raises(ValueError):
            check_lem3(cos_field, 0.5, 0.0)


class TestProductCheck:
    def test_single_mode_three_term_convolution(self, grid8):
        f = single_mode_field(grid8, component=1, m=(1, 0, 0), coeff=1.0)
        rep = product_x0_check(f, f)
        # conv support {0, +-2k}; X^0 excludes the zero mode: two modes of
        # magnitude 1 each from the (3,3)-tensor Frobenius sum
        assert rep.holds
        assert abs(rep.rhs - 4.0) < 1e-13
        assert abs(rep.lhs - 2.0) < 1e-13

    def test_zero_field(self, grid8):
        rep = product_x0_check(zero_field(grid8), zero_field(grid8))
        assert rep.lhs == 0.0 and rep.rhs == 0.0 and rep.holds

    def test_against_direct_convolution(self, grid8):
        f = random_field(grid8, 21, amplitude=0.8)
        g = random_field(grid8, 22, amplitude=1.1)
        rep = product_x0_check(f, g)
        conv = direct_tensor_convolution(f, g)
        n = 8
        ax = np.arange(2 * n - 1) - n
        m1, m2, m3 = np.meshgrid(ax, ax, ax, indexing="ij")
        nonzero = (m1 != 0) | (m2 != 0) | (m3 != 0)
        mag = np.sqrt(np.sum(np.abs(conv) ** 2, axis=(0, 1)))
        lhs = float(np.sum(mag[nonzero]))
        assert abs(rep.lhs - lhs) < 1e-12 * lhs
        assert rep.holds

    def test_grid_mismatch(self, grid8, grid16):
        with pytest.raises(ValueError):
            product_x0_check(random_field(grid8, 0), random_field(grid16, 0))


class TestHomogeneity:
    @given(factor=st.floats(1e-3, 1e3), seed=st.integers(0, 10_000))
    def test_all_norms_scale_linearly(self, factor, seed):
        g = make_grid(8, 2 * np.pi)
        f = random_field(g, seed)
        scaled = scale_field(f, factor)
        for value, ref in (
            (x_norm(scaled, -1.0), x_norm(f, -1.0)),
            (x_norm(scaled, 1.0), x_norm(f, 1.0)),
            (l2_norm(scaled), l2_norm(f)),
            (hs_dot_norm(scaled, 0.7), hs_dot_norm(f, 0.7)),
            (gevrey_xm1_norm(scaled, 0.3), gevrey_xm1_norm(f, 0.3)),
        ):
            assert abs(value - factor * ref) < 1e-11 * max(value, 1e-300)


def test_norm_spec_validation():
    with pytest.raises(ValueError):
        NormSpec("lei_lin", sigma=-3.0)
    with pytest.raises(ValueError):
        NormSpec("unknown")
    with pytest.raises(ValueError):
        NormSpec("gevrey_xm1", radius=-1.0)


def test_inequality_report_serializes(cos_field):
    rep = check_lem1(cos_field)
    obj = to_jsonable(rep)
    assert set(obj) == {"lhs", "rhs", "margin", "holds", "params"}
    import json

    json.dumps(obj)


def test_lemma_sweep_small():
    result = lemma_sweep(25, seed=42)
    assert result["all_hold"]
    assert result["counts"]["lem1"] == 25
    assert result["counts"]["lem2"] == 75
