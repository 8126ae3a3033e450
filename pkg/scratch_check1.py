"""Scratch validation of the spectral core before freezing tests."""
import numpy as np

from torusns.spectral import (
    make_grid, forward_transform, inverse_transform, leray_project,
    taylor_green, random_divfree_field, SpectrumProfile, nonlinear_term,
    coeff_magnitude, hermitian_defect, divergence_defect, dealias,
    SpectralVectorField, make_field,
)
from torusns.norms import x_norm, l2_norm, hs_dot_norm, gevrey_xm1_norm, check_lem1

g = make_grid(8, 2 * np.pi)

# single-mode field u = 2 cos(x1) e2
c = np.zeros((3, 8, 8, 8), complex)
c[1, 1, 0, 0] = 1.0
c[1, -1 % 8, 0, 0] = 1.0
u = make_field(g, c)
print("x_norm sigma -1,0,1:", x_norm(u, -1), x_norm(u, 0), x_norm(u, 1))
print("l2 expected", np.sqrt(2 * (2 * np.pi) ** 3), "got", l2_norm(u))
print("hs s=2:", hs_dot_norm(u, 2.0))
print("gevrey ln2:", gevrey_xm1_norm(u, np.log(2)))

# round trip
phys = inverse_transform(u)
x = np.linspace(0, 2 * np.pi, 8, endpoint=False)
expect = 2 * np.cos(x)[:, None, None] * np.ones((8, 8, 8))
print("physical match:", np.max(np.abs(phys[1] - expect)))

# random field round trip + parseval
prof = SpectrumProfile(shape="plateau", amplitude=1.0, m_lo=1, m_hi=3, seed=42)
f = random_divfree_field(g, prof)
print("hermitian defect:", hermitian_defect(f))
print("divergence defect:", divergence_defect(f))
samples = inverse_transform(f)
f2 = forward_transform(g, samples)
print("roundtrip err:", np.max(np.abs(f2.coeffs - f.coeffs)))
print("parseval:", np.mean(np.sum(samples**2, axis=0)), np.sum(coeff_magnitude(f) ** 2))

# same seed determinism
f3 = random_divfree_field(g, prof)
print("seed determinism:", np.array_equal(f.coeffs, f3.coeffs))

# Leray: projection of axis-aligned mode
c = np.zeros((3, 8, 8, 8), complex)
c[0, 1, 0, 0] = 1.0 + 2j
c[1, 1, 0, 0] = 2.0
c[2, 1, 0, 0] = 3.0
c[:, -1 % 8, 0, 0] = np.conj(c[:, 1, 0, 0])
w = make_field(g, c)
pw = leray_project(w)
print("leray axis k=(1,0,0):", pw.coeffs[:, 1, 0, 0])  # expect (0, 2, 3)
ppw = leray_project(pw)
print("idempotent:", np.max(np.abs(ppw.coeffs - pw.coeffs)))

# TG checks
tg = taylor_green(g, 1.0)
print("TG divergence:", divergence_defect(tg))
print("TG hermitian:", hermitian_defect(tg))
print("TG mean-square:", np.sum(coeff_magnitude(tg) ** 2), "expected 0.25")
print("TG populated per component:",
      np.count_nonzero(tg.coeffs[0]), np.count_nonzero(tg.coeffs[1]), np.count_nonzero(tg.coeffs[2]))
tg_phys = inverse_transform(tg)
X, Y, Z = np.meshgrid(x, x, x, indexing="ij")
exact0 = np.sin(X) * np.cos(Y) * np.cos(Z)
exact1 = -np.cos(X) * np.sin(Y) * np.cos(Z)
print("TG physical err:", np.max(np.abs(tg_phys[0] - exact0)), np.max(np.abs(tg_phys[1] - exact1)),
      np.max(np.abs(tg_phys[2])))

# nonlinear term basics
nt = nonlinear_term(tg)
print("NL zero-mean:", np.abs(nt.coeffs[:, 0, 0, 0]).max(), "div:", divergence_defect(nt))
ip = float(np.sum(np.real(nt.coeffs * np.conj(tg.coeffs))))
scale = l2_norm(nt) * l2_norm(tg) / (2 * np.pi) ** 3
print("orthogonality <N,u>:", ip, "relative:", abs(ip) / scale)

# single +-k field: nonlinear term should vanish
c = np.zeros((3, 8, 8, 8), complex)
c[1, 1, 0, 0] = 0.5 - 0.25j
c[1, -1 % 8, 0, 0] = np.conj(c[1, 1, 0, 0])
single = make_field(g, c)
nts = nonlinear_term(single)
print("single-mode NL max:", np.max(np.abs(nts.coeffs)))

# lem1 equality on single shell
rep = check_lem1(u)
print("lem1 single shell:", rep.lhs, rep.rhs, rep.margin)
