import math

import numpy as np
import pytest
from scipy import integrate

from fockspace.exceptions import DimensionMismatch, DomainError
from fockspace.kernel import FockParams, h_alpha
from fockspace.normcheck import (
    NormQuery,
    SpaceParams,
    exponent_slope,
    growth_bound_ratio,
    kernel_log_norm,
    kernel_log_norm_cartesian,
    log_closed_form,
    log_psi,
    norm_estimate_ratio,
    norm_sweep,
    omega_integral_ratio,
    polynomial_log_norm,
    rkhs_defect,
    slope_test,
)
from fockspace.quad import QuadSpec, integrate_plane
from fockspace.mittag import LogComplex


def test_query_validation():
    with pytest.raises(DimensionMismatch):
        NormQuery(FockParams(1, 1, 1), SpaceParams(2, 1, 1), 2, 0.0)
    with pytest.raises(DomainError):
        NormQuery(FockParams(1, 1, 1), SpaceParams(1, 2, 1), 2, 0.0)
    with pytest.raises(DomainError):
        NormQuery(FockParams(1, 1, 1), SpaceParams(1, 1, 1), 0.5, 0.0)
    with pytest.raises(DimensionMismatch):
        kernel_log_norm(NormQuery(FockParams(2, 1, 1), SpaceParams(2, 1, 1), 2, [1.0, 2.0, 3.0]))


@pytest.mark.parametrize("n,ell,c,rho_p,t", [
    (2, 1.0, 1.0, 0.0, 0.0), (2, 2.0, 1.5, 2.0, 1.3), (3, 1.5, 0.5, -3.0, 2.0),
    (4, 3.0, 2.0, 4.0, 0.7),
])
def test_psi_against_scipy(n, ell, c, rho_p, t):
    def f(s):
        R = math.hypot(t, s)
        return (1 + R) ** rho_p * math.exp(-c * R ** (2 * ell)) * s ** (2 * n - 3)
    ref, _ = integrate.quad(f, 0, np.inf, epsabs=0, epsrel=1e-13, limit=200)
    got = math.exp(log_psi(n, ell, c, rho_p, np.array([t]))[0])
    assert got == pytest.approx(2 * (n - 1) * ref, rel=1e-10)


def test_psi_gaussian_closed_form():
    # ell = 1, rho = 0: Psi(t) = e^{-c t^2} c^{-(n-1)} (n-1)!
    t = np.array([0.0, 0.5, 2.0, 5.0])
    for n in (2, 3):
        got = log_psi(n, 1.0, 0.7, 0.0, t)
        ref = -0.7 * t**2 - (n - 1) * math.log(0.7) + math.lgamma(n)
        assert np.allclose(got, ref, atol=1e-11)


# -- kernel norms ---------------------------------------------------------------


def test_kernel_norm_examples():
    fp, sp = FockParams(1, 1, 1), SpaceParams(1, 1, 1, 0)
    assert kernel_log_norm(NormQuery(fp, sp, 2, 0.0)) == pytest.approx(0.0, abs=1e-12)
    assert kernel_log_norm(NormQuery(fp, sp, 2, 2.0)) == pytest.approx(2.0, rel=1e-12)
    for z in (0.0, 1.5, 3 + 1j):
        assert norm_estimate_ratio(NormQuery(fp, sp, 2, z)) == pytest.approx(1.0, rel=1e-10)
    # p = 1 with ell = 1: |e^{w conj z}| integrates to 2 e^{|z|^2/2}
    assert norm_estimate_ratio(NormQuery(fp, sp, 1, 2.0)) == pytest.approx(2.0, rel=1e-10)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("ell", [1.0, 1.5, 2.0])
def test_rkhs_identity(n, ell):
    d = rkhs_defect(FockParams(n, ell, 1.3), [0.0, 0.7, 1.5, 2.5])
    assert np.all(np.abs(d) < 1e-9)


def test_norm_depends_on_modulus_only():
    fp, sp = FockParams(2, 1.5, 1.0), SpaceParams(2, 1.5, 1.0, 1.0)
    a = kernel_log_norm(NormQuery(fp, sp, 3, [1.0, 0.0]))
    b = kernel_log_norm(NormQuery(fp, sp, 3, [0.6j, -0.8]))
    assert a == pytest.approx(b, rel=1e-13)


@pytest.mark.slow
@pytest.mark.parametrize("ell,p,rho,z", [
    (2.0, 3, 1.0, [0.6 + 0.3j, -0.4j]),
    (1.5, 2, 0.0, [1.0, 0.5]),
])
def test_reduction_against_cartesian_cubature(ell, p, rho, z):
    q = NormQuery(FockParams(2, ell, 1.0), SpaceParams(2, ell, 1.0, rho), p, np.array(z))
    a = kernel_log_norm(q)
    b = kernel_log_norm_cartesian(q, nodes=24)
    assert abs(math.exp(p * (a - b)) - 1) < 1e-3


def test_finite_p_against_plane_quadrature_n1():
    # kernel_log_norm uses its own radial/angular scheme; compare with integrate_plane
    fp, sp, p, r = FockParams(1, 2.0, 1.0), SpaceParams(1, 2.0, 1.5, 1.0), 3.0, 1.7

    def f(w):
        lv = p * (np.asarray(h_alpha(fp, r * w).log_mag) + sp.rho * np.log1p(np.abs(w))
                  - sp.alpha / 2 * np.abs(w) ** 4)
        return LogComplex(lv, np.zeros_like(lv))

    ref = float(integrate_plane(f).log_abs) / p
    assert kernel_log_norm(NormQuery(fp, sp, p, r)) == pytest.approx(ref, rel=1e-10)


@pytest.mark.parametrize("n,rho", [(1, 0.0), (1, 1.0), (2, 1.0), (2, -1.0)])
def test_sup_norm_against_grid(n, rho):
    fp, sp, r = FockParams(n, 2.0, 1.0), SpaceParams(n, 2.0, 1.0, rho), 1.8
    got = kernel_log_norm(NormQuery(fp, sp, "inf", np.eye(n)[0] * r))
    # brute force over u_1 = t e^{i theta} and |u'| = s
    t = np.linspace(0, 4, 401)[:, None, None]
    th = np.linspace(-np.pi, np.pi, 181)[None, :, None]
    s = (np.linspace(0, 2, 101) if n > 1 else np.zeros(1))[None, None, :]
    u1 = t * np.exp(1j * th)
    R = np.sqrt(t**2 + s**2)
    lv = (np.asarray(h_alpha(fp, r * u1).log_mag) + rho * np.log1p(R) - 0.5 * R**4)
    brute = lv.max()
    assert got >= brute - 1e-12
    assert got - brute < 1e-3


def test_spec_example_n2_ell2_p3():
    sw = norm_sweep(FockParams(2, 2, 1), SpaceParams(2, 2, 1, 1), 3, np.linspace(0, 3, 7))
    assert np.all(np.isfinite(sw.ratio))
    assert sw.band < 5


def test_different_weight_ratio_bounded_and_stable():
    fp, sp, radii = FockParams(1, 2, 1), SpaceParams(1, 2, 1.5, 0), np.linspace(0, 2.5, 6)
    a = norm_sweep(fp, sp, 4, radii)
    b = norm_sweep(fp, sp, 4, radii, QuadSpec().refined())
    assert a.band < 3
    assert abs(a.band / b.band - 1) < 0.05


def test_sup_ratio_bounded():
    sw = norm_sweep(FockParams(1, 2, 1), SpaceParams(1, 2, 1, 1), "inf", np.linspace(0, 10, 11))
    assert sw.band < 4


def test_closed_form_exponent():
    q = NormQuery(FockParams(2, 2, 1), SpaceParams(2, 2, 2, 1), 4, [3.0, 0.0])
    expo = 1 + 2 * 2 * 1 * 0.75
    assert log_closed_form(q) == pytest.approx(expo * math.log(4) + 81 / 4, rel=1e-14)


def test_slope_test_certifies_exponent():
    fp, sp = FockParams(1, 2, 1), SpaceParams(1, 2, 1, 0)
    radii = np.linspace(12, 24, 5)
    sw = norm_sweep(fp, sp, "inf", radii)
    assert slope_test(sw)
    assert not slope_test(sw, 0.5)
    assert not slope_test(sw, -0.5)
    assert exponent_slope([0, 1, 3], [0, math.log(2), math.log(4)]) == pytest.approx(1.0)


# -- Omega integral -------------------------------------------------------------


def test_omega_at_origin():
    # Omega(0, w) = H(0) e^{-|w|^2/2} = e^{-|w|^2/2}, whose mass is 2.
    assert omega_integral_ratio(1.0, 0.0, [0.0], ell=1.0)[0] == pytest.approx(2.0, rel=1e-10)


@pytest.mark.parametrize("c", [0.0, 2.0])
def test_omega_bounded(c):
    r = omega_integral_ratio(1.0, c, np.linspace(0, 3, 7), ell=2.0)
    assert np.all(np.isfinite(r))
    assert max(r.max(), 1 / r.min()) < 10


# -- growth bound ---------------------------------------------------------------


def test_growth_bound_constant_function():
    z = np.linspace(0, 4, 9)
    r = growth_bound_ratio(SpaceParams(1, 1, 1, 0), 2, [1], z)
    assert np.allclose(r, np.exp(-(z**2) / 2), rtol=1e-13)


def test_polynomial_norm_quadrature_matches_orthogonality():
    sp = SpaceParams(1, 2, 1, 0)
    exact = polynomial_log_norm(sp, 2, [1, 2, 1])

    def f(w):
        lv = 2 * (np.log(np.abs(1 + 2 * w + w * w) + 1e-300) - 0.5 * np.abs(w) ** 4)
        return LogComplex(lv, np.zeros_like(lv))

    assert exact == pytest.approx(float(integrate_plane(f).log_abs) / 2, rel=1e-10)


@pytest.mark.parametrize("space,p,f", [
    (SpaceParams(1, 2, 1, 0), 2, [0, 0, 0, 1]),
    (SpaceParams(1, 2, 1, 1), 3, [1, 2, 1]),
    (SpaceParams(1, 1.5, 2, -1), 1, [0.5, 0, 1j]),
    (SpaceParams(1, 2, 1, 1), "inf", [1, 2, 1]),
])
def test_growth_bound_bounded(space, p, f):
    z = np.linspace(0, 4, 17)[:, None] * np.exp(1j * np.linspace(0, 2 * np.pi, 8))[None, :]
    r = growth_bound_ratio(space, p, f, z.ravel())
    assert np.all(np.isfinite(r)) and r.max() < 5


def test_polynomial_multi_index():
    sp = SpaceParams(2, 1, 1, 0)
    got = polynomial_log_norm(sp, 2, {(1, 0): 1.0, (0, 1): 1.0})
    # ||z_j||^2 = (2/pi^2) * pi * pi = 2 with the unit ball of C^2 normalized
    assert got == pytest.approx(math.log(2.0), rel=1e-14)
    with pytest.raises(DomainError):
        polynomial_log_norm(sp, 3, {(1, 0): 1.0})
