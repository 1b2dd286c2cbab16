import math

import numpy as np
import pytest
from scipy import integrate

from fockspace.exceptions import DomainError, ToleranceNotMet
from fockspace.mittag import LogComplex
from fockspace.quad import (
    QuadSpec,
    est_cm_integral_log,
    from_complex_function,
    integrate_half_line,
    integrate_line,
    integrate_plane,
    lemma_est_cm_check,
    lemma_est_sup_check,
    lemma_estuv_check,
)


def log_real(lv):
    lv = np.asarray(lv, float)
    return LogComplex(lv, np.zeros_like(lv))


def gaussian(w):
    return log_real(-np.abs(w) ** 2)


def test_quadspec_validation():
    with pytest.raises(DomainError):
        QuadSpec(angular_nodes=33)
    with pytest.raises(DomainError):
        QuadSpec(rel_tol=0)
    with pytest.raises(DomainError):
        QuadSpec(radial_nodes=3)
    s = QuadSpec().refined()
    assert s.radial_nodes == 240 and s.angular_nodes == 64


# -- plane integrals ----------------------------------------------------------


def test_unit_disk_has_mass_one():
    res = integrate_plane(lambda w: log_real(np.zeros(w.shape)), r_max=1.0)
    assert res.to_complex().real == pytest.approx(1.0, rel=1e-12)


def test_gaussian_mass():
    res = integrate_plane(gaussian)
    assert res.converged
    assert res.to_complex().real == pytest.approx(1.0, rel=1e-10)


def test_fourth_moment():
    res = integrate_plane(lambda w: log_real(4 * np.log(np.abs(w) + 1e-300) - np.abs(w) ** 2))
    assert res.to_complex().real == pytest.approx(2.0, rel=1e-10)


@pytest.mark.parametrize("z", [0, 2 + 1j, -7j, 15])
def test_translated_gaussian(z):
    f = lambda w: log_real(-np.abs(w - z) ** 2)
    centered = integrate_plane(f, center=z)
    assert centered.to_complex().real == pytest.approx(1.0, rel=1e-10)
    if abs(z) < 10:
        origin = integrate_plane(f)
        assert origin.to_complex().real == pytest.approx(1.0, rel=1e-8)


def test_complex_integrand_against_closed_form():
    # int w^2 conj(w)^2 e^{-|w|^2} dA = 2 and the w^2 moment vanishes.
    f = from_complex_function(lambda w: (w**2 * np.conj(w) ** 2 + w**2) * np.exp(-np.abs(w) ** 2))
    res = integrate_plane(f)
    assert abs(res.to_complex() - 2.0) < 1e-9


def test_vector_valued_components_scale_independently():
    def f(w):
        lv = -np.abs(w)[..., None] ** 2 + np.array([0.0, 800.0])
        return log_real(lv)

    res = integrate_plane(f)
    assert np.allclose(res.log_abs, [0.0, 800.0], atol=1e-10)


@pytest.mark.parametrize("ell", [1, 2, 3])
def test_refinement_stability(ell):
    f = lambda w: log_real(-np.abs(w) ** (2 * ell))
    spec = QuadSpec()
    a = integrate_plane(f, spec).to_complex().real
    b = integrate_plane(f, spec.refined()).to_complex().real
    exact = math.gamma(1 / ell) / ell
    assert abs(a - b) / exact < spec.rel_tol
    assert a == pytest.approx(exact, rel=1e-10)


def test_strict_tolerance_not_met():
    spec = QuadSpec(radial_nodes=15, max_refinements=1, rel_tol=1e-14)
    f = lambda w: log_real(-np.abs(w) ** 2 + np.log(np.abs(np.sin(20 * np.abs(w))) + 1e-300))
    with pytest.raises(ToleranceNotMet):
        integrate_plane(f, spec, strict=True)
    res = integrate_plane(f, spec)
    assert not res.converged


def test_line_and_half_line_against_scipy():
    f = lambda x: np.exp(-x) * np.cos(3 * x) + 2
    res = integrate_line(lambda x: LogComplex.from_complex(f(x).astype(complex)), 0.0, 5.0)
    ref, _ = integrate.quad(f, 0, 5, epsabs=0, epsrel=1e-13)
    assert res.to_complex().real == pytest.approx(ref, rel=1e-12)
    half = integrate_half_line(lambda r: 3 * np.log(r + 1e-300) - r**2)
    assert half.to_complex().real == pytest.approx(0.5, rel=1e-11)


# -- est:sup -------------------------------------------------------------------


def test_est_sup_trivial_case():
    ratios = lemma_est_sup_check(1.0, 0.0, [0, 0.5, 3, 10, 100])
    assert np.all(ratios == 1.0)


def test_est_sup_examples():
    (r,) = lemma_est_sup_check(1.0, 3.0, [5.0])
    assert 1.0 <= r < 2.0
    (r,) = lemma_est_sup_check(2.0, -4.0, [0.0])
    assert r == 1.0
    with pytest.raises(DomainError):
        lemma_est_sup_check(0.0, 1.0, [1.0])


@pytest.mark.parametrize("alpha,beta", [(1, 3), (0.5, 6), (2, -4), (1, -2)])
def test_est_sup_bounded_and_stable(alpha, beta):
    grid = np.linspace(0, 60, 61)
    r1 = lemma_est_sup_check(alpha, beta, grid)
    r2 = lemma_est_sup_check(alpha, beta, grid, n_grid=8001)
    assert np.all(r1 >= 1.0 - 1e-15)
    assert r1.max() < 1e3
    assert abs(r1.max() / r2.max() - 1) < 0.05 and abs(r1.min() / r2.min() - 1) < 0.05


# -- est:Cm --------------------------------------------------------------------


def test_est_cm_ell_one_is_constant():
    y = np.array([0.0, 0.5, 1.0, 2.0, 4.0])
    r = lemma_est_cm_check(1.0, 0.0, 1.0, 2, y)
    assert np.allclose(r, r[0], rtol=1e-9)
    assert r[0] == pytest.approx(1.0, rel=1e-10)


def test_est_cm_against_scipy():
    a, b, ell, n, y = 1.0, 2.0, 2.0, 2, 1.5
    f = lambda r: (1 + y + r) ** b * math.exp(-a * (y * y + r * r) ** ell) * r ** (2 * n - 3)
    ref, _ = integrate.quad(f, 0, np.inf, epsabs=0, epsrel=1e-12)
    assert math.exp(est_cm_integral_log(a, b, ell, n, y)) == pytest.approx(2 * (n - 1) * ref, rel=1e-9)


@pytest.mark.parametrize(
    "a,b,ell,n,ys",
    [
        (1.0, 2.0, 2.0, 2, np.linspace(1, 6, 11)),
        (0.5, -3.0, 3.0, 3, np.linspace(1, 4, 7)),
        (1.0, 1.0, 1.5, 4, np.linspace(0, 8, 9)),
    ],
)
def test_est_cm_bounded_and_stable(a, b, ell, n, ys):
    r1 = lemma_est_cm_check(a, b, ell, n, ys)
    r2 = lemma_est_cm_check(a, b, ell, n, ys, QuadSpec().refined())
    C = max(r1.max(), 1 / r1.min())
    assert np.all(np.isfinite(r1)) and C < 1e2
    assert np.allclose(r1, r2, rtol=0.05)


def test_est_cm_requires_n_two():
    with pytest.raises(DomainError):
        lemma_est_cm_check(1.0, 0.0, 1.0, 1, [1.0])


# -- estuv ----------------------------------------------------------------------


def test_estuv_gaussian_case():
    i_rat, j_rat = lemma_estuv_check(1.0, 0.0, [0, 2, 5])
    assert np.allclose(i_rat, 1.0, rtol=1e-9)
    assert np.all(np.isfinite(j_rat))


def test_estuv_bounded_and_stable():
    grid = [0, 2, 5, 10]
    i1, j1 = lemma_estuv_check(1.0, 3.0, grid)
    i2, j2 = lemma_estuv_check(1.0, 3.0, grid, QuadSpec().refined())
    for r in (i1, j1):
        assert np.all(np.isfinite(r))
        assert max(r.max(), 1 / r.min()) < 20
    assert np.allclose(i1, i2, rtol=0.05)
    assert np.allclose(j1, j2, rtol=0.05)
