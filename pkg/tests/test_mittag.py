import cmath
import math

import numpy as np
import pytest

from fockspace.exceptions import DomainError, NonConvergence
from fockspace.mittag import (
    ASYMPTOTIC,
    CONTOUR,
    SERIES,
    LogComplex,
    MLParams,
    asymptotic_regime,
    crossover_radius,
    exponential_part_coefficients,
    log_add,
    log_gamma,
    ml_asymptotic,
    ml_contour,
    ml_eval,
    ml_eval_detailed,
    ml_series,
    ml_series_log,
)

from oracles import log_gamma_reference, ml_reference


def rel(x, y):
    return abs(x - y) / abs(y)


# -- LogComplex ------------------------------------------------------------


def test_logcomplex_roundtrip_and_phase_range():
    vals = np.array([1 + 2j, -3.0, -1j, 1e-300 + 0j, 0j])
    lc = LogComplex.from_complex(vals)
    back = lc.to_complex()
    # relative error of exp(log_mag) grows with |log_mag|
    tol = 4e-16 * (1 + np.abs(np.where(np.isfinite(lc.log_mag), lc.log_mag, 0)))
    assert np.all(np.abs(back - vals) <= tol * np.abs(vals))
    assert lc.log_mag[-1] == -np.inf
    assert np.all(lc.phase > -np.pi) and np.all(lc.phase <= np.pi)
    assert LogComplex.from_complex(-2.0).phase == pytest.approx(np.pi)


def test_logcomplex_arithmetic():
    x, y = 3 - 4j, -1 + 0.5j
    a, b = LogComplex.from_complex(x), LogComplex.from_complex(y)
    assert rel((a * b).to_complex(), x * y) < 1e-15
    assert rel((a / b).to_complex(), x / y) < 1e-15
    assert rel(a.conjugate().to_complex(), x.conjugate()) < 1e-15
    assert rel(log_add(a, b).to_complex(), x + y) < 1e-15
    # sums far beyond the double range
    big = LogComplex(1000.0, 0.3)
    s = log_add(big, big)
    assert s.log_mag == pytest.approx(1000 + math.log(2))
    assert s.phase == pytest.approx(0.3)


# -- log_gamma -------------------------------------------------------------


def test_log_gamma_examples():
    assert log_gamma(1.0) == 0.0 or abs(log_gamma(1.0)) < 1e-16
    assert log_gamma(0.5) == pytest.approx(math.log(math.sqrt(math.pi)), rel=1e-14)
    assert log_gamma(7.25) == pytest.approx(log_gamma_reference(7.25), rel=1e-14)


def test_log_gamma_relative_accuracy():
    xs = np.concatenate([np.linspace(0.01, 5, 997), np.geomspace(5, 1e4, 200)])
    got = log_gamma(xs)
    ref = np.array([log_gamma_reference(x) for x in xs])
    err = np.abs(got - ref) / np.maximum(np.abs(ref), 1e-300)
    assert err.max() < 1e-13


def test_log_gamma_domain():
    with pytest.raises(DomainError):
        log_gamma(0.0)
    with pytest.raises(DomainError):
        log_gamma(np.array([1.0, -2.0]))


# -- parameters ------------------------------------------------------------


@pytest.mark.parametrize("a,b,m", [(0, 1, 0), (1.5, 1, 0), (0.5, 0, 0), (0.5, 1, -1), (0.5, 1, 1.5)])
def test_params_invalid(a, b, m):
    with pytest.raises(DomainError):
        MLParams(a, b, m)


def test_crossover_radius_values():
    assert crossover_radius(MLParams(1, 1)) == pytest.approx(700.0)
    assert crossover_radius(MLParams(0.5, 0.5)) == pytest.approx(max(15, 350**0.5))
    # clipped so that r^(1/a) stays below the overflow threshold
    R = crossover_radius(MLParams(1 / 3, 1 / 3))
    assert R ** 3 <= 700 + 1e-9


# -- series ----------------------------------------------------------------


def test_series_examples():
    assert ml_series(MLParams(1, 1), 1.0) == pytest.approx(math.e, rel=1e-15)
    assert ml_series(MLParams(1, 2), 0.0) == pytest.approx(1.0, rel=1e-15)
    ref = ml_reference(0.5, 0.5, 0, 2.0)
    assert rel(ml_series(MLParams(0.5, 0.5), 2.0), ref) < 1e-12


def test_series_derivative_of_exp():
    for m in range(5):
        assert rel(ml_series(MLParams(1, 1, m), 2 - 1j), cmath.exp(2 - 1j)) < 1e-14


def test_series_nonconvergence():
    with pytest.raises(NonConvergence):
        ml_series(MLParams(1 / 3, 1 / 3), 200.0)


def test_series_tol_must_be_positive():
    with pytest.raises(DomainError):
        ml_series(MLParams(1, 1), 1.0, tol=0.0)


def test_series_log_form_beyond_double_range():
    # e^{20^2} overflows nothing in log form
    v = ml_series_log(MLParams(0.5, 0.5), 20.0)
    ref_log = math.log(2 * 20) + 400
    assert v.log_mag == pytest.approx(ref_log, rel=1e-13)


@pytest.mark.parametrize("a,b", [(0.5, 0.5), (1 / 3, 1 / 3), (2 / 3, 2 / 3), (0.75, 1.3)])
@pytest.mark.parametrize("m", [0, 1, 3])
def test_series_against_oracle_well_conditioned(a, b, m):
    rng = np.random.default_rng(7)
    r = rng.uniform(0.0, 4.0, 12)
    # keep the arguments where the series does not cancel
    theta = rng.uniform(-0.15, 0.15, 12) * a
    lam = r * np.exp(1j * theta)
    got = ml_series(MLParams(a, b, m), lam)
    for g, z in zip(got, lam):
        assert rel(g, ml_reference(a, b, m, z)) < 1e-12


# -- asymptotics -----------------------------------------------------------


def test_exponential_part_coefficients_first_derivative():
    # d/dl (2 l e^{l^2}) = (2 + 4 l^2) e^{l^2}
    coefs = dict((e, c) for c, e in exponential_part_coefficients(MLParams(0.5, 0.5, 1)))
    assert coefs == {0.0: 2.0, 2.0: 4.0}


def test_asymptotic_examples():
    v = ml_asymptotic(MLParams(0.5, 0.5), 30.0)
    assert v.log_mag == pytest.approx(math.log(60) + 900, rel=1e-14)
    v = ml_asymptotic(MLParams(1, 1, 3), 50.0)
    assert v.log_mag == pytest.approx(50.0, rel=1e-14)
    v = ml_asymptotic(MLParams(0.5, 0.5, 1), -100.0)
    assert v.log_mag <= math.log(10.0) - 2 * math.log(100)
    assert asymptotic_regime(MLParams(0.5, 0.5, 1), -100.0) == "algebraic-decay"
    assert asymptotic_regime(MLParams(0.5, 0.5, 1), 100.0) == "exponential"


@pytest.mark.parametrize("m", [0, 2])
def test_asymptotic_leading_ratio_tends_to_one(m):
    p = MLParams(0.5, 0.5, m)
    for lam in [14.0, 16.0, 18.0]:
        a = ml_asymptotic(p, lam).to_complex()
        assert rel(a, ml_reference(0.5, 0.5, m, lam)) < 1e-12


# -- contour ---------------------------------------------------------------


@pytest.mark.parametrize("a,b", [(0.5, 0.5), (1 / 3, 1 / 3), (2 / 3, 2 / 3), (0.5, 1.7)])
@pytest.mark.parametrize("m", [0, 2])
def test_contour_against_oracle(a, b, m):
    rng = np.random.default_rng(3)
    s0 = rng.uniform(0.5, 25.0, 10)
    lam = s0**a * np.exp(1j * rng.uniform(-np.pi, np.pi, 10))
    got = ml_contour(MLParams(a, b, m), lam).to_complex()
    for g, z in zip(got, lam):
        assert rel(g, ml_reference(a, b, m, z)) < 1e-12


# -- dispatcher ------------------------------------------------------------


def test_eval_examples():
    v = ml_eval(MLParams(1, 1), 10 + 5j).to_complex()
    assert rel(v, cmath.exp(10 + 5j)) < 1e-10
    v = ml_eval(MLParams(0.5, 0.5), 0.0).to_complex()
    assert v == pytest.approx(1 / math.sqrt(math.pi), rel=1e-15)


def test_eval_exp_identity():
    rng = np.random.default_rng(11)
    lam = rng.uniform(0, 20, 400) * np.exp(1j * rng.uniform(-np.pi, np.pi, 400))
    got = ml_eval(MLParams(1, 1), lam)
    err = np.abs(got.log_mag - lam.real) + np.abs(np.angle(np.exp(1j * (got.phase - lam.imag))))
    assert err.max() < 1e-12 * 20


def test_eval_recurrence():
    rng = np.random.default_rng(5)
    for _ in range(30):
        a = rng.uniform(0.2, 1.0)
        b = rng.uniform(0.1, 3.0)
        lam = rng.uniform(0, 3.0) * cmath.exp(1j * rng.uniform(-np.pi, np.pi))
        lhs = ml_eval(MLParams(a, b), lam).to_complex()
        rhs = lam * ml_eval(MLParams(a, a + b), lam).to_complex() + 1 / math.gamma(b)
        assert rel(lhs, rhs) < 1e-10


def test_eval_conjugate_symmetry():
    rng = np.random.default_rng(2)
    lam = rng.uniform(0, 10, 200) * np.exp(1j * rng.uniform(-np.pi, np.pi, 200))
    for a in (0.5, 1 / 3, 2 / 3):
        p = MLParams(a, a, 1)
        v = ml_eval(p, lam)
        w = ml_eval(p, lam.conjugate())
        assert np.max(np.abs(v.log_mag - w.log_mag)) < 1e-12
        assert np.max(np.abs(np.sin(v.phase + w.phase))) < 1e-12


@pytest.mark.parametrize("a,b", [(0.5, 0.5), (1 / 3, 1 / 3), (2 / 3, 2 / 3), (1.0, 1.0)])
@pytest.mark.parametrize("m", [0, 3])
def test_eval_against_oracle_whole_plane(a, b, m):
    rng = np.random.default_rng(13)
    s0 = rng.uniform(0.01, 100.0, 20)
    lam = s0**a * np.exp(1j * rng.uniform(-np.pi, np.pi, 20))
    ev = ml_eval_detailed(MLParams(a, b, m), lam)
    got = ev.value.to_complex()
    for g, z in zip(got, lam):
        assert rel(g, ml_reference(a, b, m, z)) < 1e-11
    assert set(ev.branch) <= {SERIES, ASYMPTOTIC, CONTOUR}


def test_eval_branches_and_warnings():
    p = MLParams(0.5, 0.5)
    R = crossover_radius(p)
    assert ml_eval_detailed(p, 2.0).branch == SERIES
    assert ml_eval_detailed(p, 2 * R).branch == ASYMPTOTIC
    ev = ml_eval_detailed(p, -4.0)
    assert ev.branch in (ASYMPTOTIC, CONTOUR)
    assert "series-cancellation" in ev.warnings
    ev = ml_eval_detailed(p, 2 * R * cmath.exp(1j * 0.75 * 0.5 * math.pi))
    assert "sector-boundary" in ev.warnings


def test_eval_array_shape():
    lam = np.ones((3, 4)) * (1 + 1j)
    v = ml_eval(MLParams(0.5, 0.5, 1), lam)
    assert np.shape(v.log_mag) == (3, 4)


@pytest.mark.parametrize("ell", [1.0, 1.5, 2.0, 3.0])
@pytest.mark.parametrize("m", [0, 1, 2, 3])
def test_crossover_continuity(ell, m):
    p = MLParams(1 / ell, 1 / ell, m)
    R = crossover_radius(p)
    for r in np.linspace(0.9 * R, 0.999 * R, 5):
        # angles where the plain series stays summable in double precision
        phi_max = math.acos(max(-1.0, 1 - 10.0 / r**ell))
        for phi in np.linspace(-phi_max, phi_max, 5):
            lam = r * cmath.exp(1j * phi / ell)
            s = ml_series_log(p, lam)
            a = ml_asymptotic(p, lam)
            diff = abs(cmath.exp(a.log_mag - s.log_mag + 1j * (a.phase - s.phase)) - 1)
            assert diff < 1e-6
