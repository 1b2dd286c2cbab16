r"""Numerical checks of the kernel norm estimates and the pointwise growth bound.

For :math:`z\in\mathbb C^n` the norm of :math:`K_\alpha(\cdot,z)` in
:math:`F^p_{\beta,\rho}` depends on :math:`|z|` only. Rotating
:math:`z` to :math:`(|z|,0,\dots,0)` and writing :math:`w=(u_1,u')`,

.. math::

    \|K_\alpha(\cdot,z)\|^p = n\int_{\mathbb C}|H_\alpha(|z|u_1)|^p\,
    \Psi(|u_1|)\,dA(u_1),\qquad
    \Psi(t)=\int_{\mathbb C^{n-1}}(1+|w|)^{\rho p}e^{-\frac{\beta p}{2}|w|^{2\ell}}
    \,dV_{n-1}(u'),

with :math:`\Psi` itself a one-dimensional radial integral. For
``p = inf`` the coefficients of :math:`H_\alpha` are positive, so
:math:`|H_\alpha(\lambda)|\le H_\alpha(|\lambda|)` and the supremum is a
search along the positive axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .decide import ExtExponent
from .exceptions import DimensionMismatch, DomainError
from .kernel import FockParams, as_points, h_alpha, log_monomial_norm_sq
from .mittag import LogComplex
from .quad import (
    QuadSpec,
    _angular,
    adaptive_gk,
    half_line_cutoff,
    integrate_plane,
)

Exponent = Union[float, int, str, ExtExponent]

# angular peak widths covered by the clustered half of the trapezoid nodes
_CLUSTER = 6.0


def exponent_value(p: Exponent) -> float:
    """``p`` as a float in ``[1, inf]``."""
    if isinstance(p, ExtExponent):
        return float(p)
    if isinstance(p, str):
        return float(ExtExponent.parse(p))
    p = float(p)
    if not p >= 1:
        raise DomainError(f"exponent must be >= 1, got {p}")
    return p


@dataclass(frozen=True)
class SpaceParams:
    """The space ``F^p_{alpha,rho}`` on ``C^n`` (``p`` supplied separately)."""

    n: int
    ell: float
    alpha: float
    rho: float = 0.0

    def __post_init__(self):
        FockParams(self.n, self.ell, self.alpha)  # same validation
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "ell", float(self.ell))
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "rho", float(self.rho))


@dataclass(frozen=True)
class NormQuery:
    """Norm of ``K_alpha(., z)`` (kernel ``fp``) in the space ``space`` with exponent ``p``."""

    fp: FockParams
    space: SpaceParams
    p: Exponent
    z: object = 0.0

    def __post_init__(self):
        if self.space.n != self.fp.n:
            raise DimensionMismatch("kernel and space dimensions differ")
        if self.space.ell != self.fp.ell:
            raise DomainError("kernel and space must share ell")
        exponent_value(self.p)

    @property
    def radius(self) -> float:
        return float(np.linalg.norm(as_points(self.z, self.fp.n)))


# -- the weight of the reduced integral ------------------------------------


def log_psi(n: int, ell: float, c: float, rho_p: float, t, rel_tol: float = 1e-12,
            truncation_factor: float = 46.0) -> np.ndarray:
    """``log Psi(t)`` for the weight ``(1+|w|)^{rho_p} e^{-c|w|^{2 ell}}``.

    ``Psi(t) = 2(n-1) int_0^inf (1+R)^{rho_p} e^{-c R^{2 ell}} s^{2n-3} ds`` with
    ``R = sqrt(t^2+s^2)``. Each ``t`` gets its own cut-off ``S(t)``, using
    ``(t^2+s^2)^ell - t^{2 ell} >= max(s^{2 ell}, ell t^{2 ell-2} s^2)``.
    """
    if n < 2:
        raise DomainError("Psi is only defined for n >= 2")
    t = np.asarray(t, dtype=float)
    flat = t.ravel()
    s_far = (truncation_factor / c) ** (1 / (2 * ell))
    T = (truncation_factor + (2 * n - 3) * math.log(truncation_factor)
         + abs(rho_p) * math.log1p(s_far) + 5.0)
    s_a = (T / c) ** (1 / (2 * ell))
    with np.errstate(divide="ignore"):
        s_b = np.sqrt(T / (c * ell * flat ** (2 * ell - 2)))
    S = np.minimum(s_a, s_b) if ell > 1 else np.full(flat.shape, s_a)

    def func(x):
        s = S[None, :] * x[:, None]
        R2 = flat[None, :] ** 2 + s * s
        with np.errstate(divide="ignore"):
            lv = (np.log(S)[None, :] + rho_p * np.log1p(np.sqrt(R2)) - c * R2**ell
                  + (2 * n - 3) * np.log(s))
        if n == 2:
            lv = np.where(x[:, None] == 0, np.log(S)[None, :] + rho_p * np.log1p(flat)
                          - c * flat ** (2 * ell), lv)
        val = LogComplex(lv, np.zeros_like(lv))
        return val, lv

    res = adaptive_gk(func, 0.0, 1.0, rel_tol, init_panels=4)
    return (np.asarray(res.log_abs) + math.log(2 * (n - 1))).reshape(t.shape)


def _log_radial_weight(space: SpaceParams, p: float, t, rel_tol: float) -> np.ndarray:
    """log of the weight multiplying ``|H(|z| u_1)|^p`` at ``|u_1| = t``."""
    t = np.asarray(t, dtype=float)
    c = space.alpha * p / 2
    rho_p = space.rho * p
    if space.n == 1:
        return rho_p * np.log1p(t) - c * t ** (2 * space.ell)
    return math.log(space.n) + log_psi(space.n, space.ell, c, rho_p, t, rel_tol)


# -- kernel norms ----------------------------------------------------------------


def _log_norm_finite(fp: FockParams, space: SpaceParams, p: float, r: float,
                     spec: QuadSpec) -> tuple[float, bool]:
    inner_tol = 0.1 * spec.rel_tol

    def h_part(w):
        lv = p * np.asarray(h_alpha(fp, r * w).log_mag)
        return LogComplex(lv, np.zeros_like(lv))

    def envelope(t):
        t = np.asarray(t, float)
        with np.errstate(divide="ignore"):
            return (np.log(t) + p * np.asarray(h_alpha(fp, r * t).log_mag)
                    + _log_radial_weight(space, p, t, inner_tol))

    t_max, t_peak = half_line_cutoff(envelope, spec.truncation_factor)

    def radial(t):
        # |H(r t e^{i theta})|^p peaks at theta = 0 with curvature ~ p alpha ell^2 (rt)^ell
        curv = p * fp.alpha * fp.ell**2 * (r * t) ** fp.ell
        with np.errstate(divide="ignore"):
            eps = np.minimum(1.0, _CLUSTER / np.sqrt(curv))
        val, mass, _ = _angular(h_part, 0.0, t, spec.angular_nodes, spec.rel_tol,
                                spec.max_angular_nodes, eps)
        w = _log_radial_weight(space, p, t, inner_tol)
        return val.scale(w), mass + w

    res = adaptive_gk(radial, 0.0, t_max, spec.rel_tol,
                      init_panels=max(1, spec.radial_nodes // 15),
                      max_rounds=spec.max_refinements, breakpoints=(t_peak,))
    return float(res.log_abs) / p, bool(res.converged)


def _rho_star(space: SpaceParams) -> float:
    """Maximizer over ``R >= 0`` of ``rho log(1+R) - (alpha/2) R^{2 ell}``."""
    if space.rho <= 0:
        return 0.0
    g = lambda R: space.rho / (1 + R) - space.alpha * space.ell * R ** (2 * space.ell - 1)
    hi = 1.0
    while g(hi) > 0:
        hi *= 2
    return brentq(g, 0.0, hi, xtol=1e-15)


def _log_norm_sup(fp: FockParams, space: SpaceParams, r: float, n_grid: int = 4001) -> float:
    """``sup_w |K(w, z)| (1+|w|)^rho e^{-(beta/2)|w|^{2 ell}}`` in log form."""
    r_star = _rho_star(space) if space.n > 1 else 0.0

    def log_f(t):
        t = np.asarray(t, float)
        R = np.maximum(t, r_star)
        return (np.asarray(h_alpha(fp, r * t).log_mag) + space.rho * np.log1p(R)
                - space.alpha / 2 * R ** (2 * space.ell))

    t_max, _ = half_line_cutoff(log_f, 10.0)
    ts = np.linspace(0.0, t_max, n_grid)
    lv = log_f(ts)
    i = int(np.argmax(lv))
    best = float(lv[i])
    step = ts[1] - ts[0]
    lo, hi = max(0.0, ts[i] - step), ts[i] + step
    res = minimize_scalar(lambda x: -float(log_f(np.array([x]))[0]), bounds=(lo, hi),
                          method="bounded", options={"xatol": 1e-13})
    return max(best, -float(res.fun))


def kernel_log_norm(q: NormQuery, spec: QuadSpec = QuadSpec()) -> float:
    """``log ||K_alpha(., z)||_{F^p_{beta,rho}}``."""
    p = exponent_value(q.p)
    if math.isinf(p):
        return _log_norm_sup(q.fp, q.space, q.radius)
    return _log_norm_finite(q.fp, q.space, p, q.radius, spec)[0]


kernel_norm = kernel_log_norm


def log_closed_form(q: NormQuery) -> float:
    """``log[(1+|z|)^{rho + 2n(ell-1)/p'} e^{alpha^2/(2 beta) |z|^{2 ell}}]``."""
    p = exponent_value(q.p)
    inv_pc = 1.0 - 1.0 / p  # 1/p'
    fp, sp = q.fp, q.space
    r = q.radius
    expo = sp.rho + 2 * fp.n * (fp.ell - 1) * inv_pc
    return expo * math.log1p(r) + fp.alpha**2 / (2 * sp.alpha) * r ** (2 * fp.ell)


def norm_estimate_ratio(q: NormQuery, spec: QuadSpec = QuadSpec()) -> float:
    return math.exp(kernel_log_norm(q, spec) - log_closed_form(q))


@dataclass
class NormSweep:
    radii: np.ndarray
    log_norm: np.ndarray
    log_closed: np.ndarray

    @property
    def log_ratio(self) -> np.ndarray:
        return self.log_norm - self.log_closed

    @property
    def ratio(self) -> np.ndarray:
        return np.exp(self.log_ratio)

    @property
    def band(self) -> float:
        """Smallest ``C`` with every ratio in ``[1/C, C]``."""
        lr = self.log_ratio
        return float(math.exp(max(lr.max(), -lr.min())))


def norm_sweep(fp: FockParams, space: SpaceParams, p: Exponent, radii: Sequence[float],
               spec: QuadSpec = QuadSpec()) -> NormSweep:
    radii = np.asarray(radii, dtype=float)
    ln, lc = [], []
    for r in radii:
        q = NormQuery(fp, space, p, _axis_point(r, fp.n))
        ln.append(kernel_log_norm(q, spec))
        lc.append(log_closed_form(q))
    return NormSweep(radii, np.array(ln), np.array(lc))


def _axis_point(r: float, n: int) -> np.ndarray:
    z = np.zeros(n, complex)
    z[0] = r
    return z


def exponent_slope(radii, log_ratio) -> float:
    """Least-squares slope of ``log ratio`` against ``log(1+|z|)``."""
    x = np.log1p(np.asarray(radii, dtype=float))
    y = np.asarray(log_ratio, dtype=float)
    return float(np.polyfit(x, y, 1)[0])


def slope_test(sweep: NormSweep, shift: float = 0.0, threshold: float = 0.25) -> bool:
    """Accept the closed-form exponent shifted by ``shift``.

    The shifted family's log-ratio is ``log_ratio - shift log(1+|z|)``; the
    exponent is rejected when its regression slope exceeds ``threshold`` in size.
    """
    lr = sweep.log_ratio - shift * np.log1p(sweep.radii)
    return abs(exponent_slope(sweep.radii, lr)) <= threshold


def rkhs_defect(fp: FockParams, radii, spec: QuadSpec = QuadSpec()) -> np.ndarray:
    """``log||K_z||_{F^2_alpha} - (1/2) log K(z,z)`` over ``radii``."""
    sp = SpaceParams(fp.n, fp.ell, fp.alpha, 0.0)
    out = []
    for r in np.asarray(radii, dtype=float):
        ln = kernel_log_norm(NormQuery(fp, sp, 2, _axis_point(r, fp.n)), spec)
        out.append(ln - 0.5 * float(h_alpha(fp, r * r).log_mag))
    return np.array(out)


# -- direct four-dimensional cross-check (n = 2) -----------------------------------


def kernel_log_norm_cartesian(q: NormQuery, nodes: int = 28, half_width: float | None = None
                              ) -> float:
    """Tensor Gauss-Legendre over the four real coordinates of ``C^2``.

    Uses no structure of the integrand; intended as a loose independent check
    of the reduced integral. Finite ``p`` only.
    """
    if q.fp.n != 2:
        raise DomainError("the Cartesian cross-check is written for n = 2")
    p = exponent_value(q.p)
    if math.isinf(p):
        raise DomainError("finite p required")
    sp = q.space
    if half_width is None:
        half_width = 1.2 * (2 * 40.0 / (sp.alpha * p)) ** (1 / (2 * sp.ell)) + 0.5 * q.radius
    x, w = np.polynomial.legendre.leggauss(nodes)
    x, w = half_width * x, half_width * w
    z = as_points(q.z, 2)
    plane = (x[:, None] + 1j * x[None, :]).ravel()
    log_wt = np.log(w[:, None] * w[None, :]).ravel()
    chunks = []
    for w1, lw1 in zip(plane, log_wt):
        lam = w1 * np.conj(z[0]) + plane * np.conj(z[1])
        R = np.sqrt(abs(w1) ** 2 + np.abs(plane) ** 2)
        chunks.append(p * np.asarray(h_alpha(q.fp, lam).log_mag) + sp.rho * p * np.log1p(R)
                      - sp.alpha * p / 2 * R ** (2 * sp.ell) + lw1 + log_wt)
    lv = np.concatenate(chunks)
    top = lv.max()
    # normalized measure on C^2: dV = (2/pi^2) dx
    log_int = top + math.log(np.exp(lv - top).sum()) + math.log(2.0) - 2 * math.log(math.pi)
    return log_int / p


# -- Omega integral and growth bound -------------------------------------------------


def omega_integral_ratio(alpha: float, c: float, z_grid, ell: float = 1.0, n: int = 1,
                         spec: QuadSpec = QuadSpec()) -> np.ndarray:
    """``int Omega(z, w)(1+|w|)^c dV(w) / (1+|z|)^c``.

    ``Omega(z, w) = e^{-(alpha/2)|z|^{2 ell}} |K(z,w)| e^{-(alpha/2)|w|^{2 ell}}``, so the
    integral is ``e^{-(alpha/2)|z|^{2 ell}}`` times the ``F^1_{alpha,c}`` norm of ``K(., z)``.
    """
    fp = FockParams(n, ell, alpha)
    sp = SpaceParams(n, ell, alpha, c)
    out = []
    for z in np.asarray(z_grid, dtype=complex).ravel():
        r = abs(z)
        ln = kernel_log_norm(NormQuery(fp, sp, 1, _axis_point(r, n)), spec)
        out.append(math.exp(ln - alpha / 2 * r ** (2 * ell) - c * math.log1p(r)))
    return np.array(out)


Polynomial = Union[Sequence[complex], Mapping[tuple, complex]]


def _monomials(f: Polynomial, n: int) -> dict[tuple, complex]:
    if isinstance(f, Mapping):
        out = {tuple(int(v) for v in k): complex(c) for k, c in f.items()}
    else:
        if n != 1:
            raise DimensionMismatch("coefficient lists describe polynomials in one variable")
        out = {(k,): complex(c) for k, c in enumerate(f)}
    for k in out:
        if len(k) != n:
            raise DimensionMismatch(f"multi-index {k} for n={n}")
    return {k: c for k, c in out.items() if c != 0}


def polynomial_eval(f: Polynomial, z, n: int = 1) -> np.ndarray:
    pts = as_points(z, n)
    out = np.zeros(pts.shape[:-1], complex)
    for nu, c in _monomials(f, n).items():
        out = out + c * np.prod(pts ** np.array(nu), axis=-1)
    return out


def polynomial_log_norm(space: SpaceParams, p: Exponent, f: Polynomial,
                        spec: QuadSpec = QuadSpec()) -> float:
    """``log ||f||_{F^p_{alpha,rho}}`` of a polynomial.

    Exact from monomial orthogonality when ``p = 2`` and ``rho = 0``; otherwise by
    plane quadrature (``n = 1``) or a grid supremum (``p = inf``, ``n = 1``).
    """
    p = exponent_value(p)
    mono = _monomials(f, space.n)
    if not mono:
        return -math.inf
    fp = FockParams(space.n, space.ell, space.alpha)
    if p == 2 and space.rho == 0:
        logs = [2 * math.log(abs(c)) + log_monomial_norm_sq(fp, nu) for nu, c in mono.items()]
        top = max(logs)
        return 0.5 * (top + math.log(sum(math.exp(v - top) for v in logs)))
    if space.n != 1:
        raise DomainError("polynomial norms for n >= 2 need p = 2 and rho = 0")
    a, ell, rho = space.alpha, space.ell, space.rho
    if math.isinf(p):
        R = 5.0 + (60.0 / a) ** (1 / (2 * ell))
        rr = np.linspace(0, R, 801)[:, None]
        th = 2 * np.pi * np.arange(256) / 256
        w = rr * np.exp(1j * th)[None, :]
        with np.errstate(divide="ignore"):
            lv = (np.log(np.abs(polynomial_eval(f, w))) + rho * np.log1p(rr)
                  - a / 2 * rr ** (2 * ell))
        return float(lv.max())

    def integrand(w):
        with np.errstate(divide="ignore"):
            lv = p * (np.log(np.abs(polynomial_eval(f, w))) + rho * np.log1p(np.abs(w))
                      - a / 2 * np.abs(w) ** (2 * ell))
        return LogComplex(lv, np.zeros_like(lv))

    res = integrate_plane(integrand, spec)
    return float(res.log_abs) / p


def growth_bound_ratio(space: SpaceParams, p: Exponent, f: Polynomial, z_grid,
                       spec: QuadSpec = QuadSpec()) -> np.ndarray:
    """``|f(z)| / (||f|| (1+|z|)^{-rho + 2n(ell-1)/p} e^{(alpha/2)|z|^{2 ell}})``."""
    pv = exponent_value(p)
    n, ell = space.n, space.ell
    log_norm = polynomial_log_norm(space, p, f, spec)
    pts = as_points(z_grid, n)
    r = np.linalg.norm(pts, axis=-1)
    with np.errstate(divide="ignore"):
        log_f = np.log(np.abs(polynomial_eval(f, pts, n)))
    expo = -space.rho + 2 * n * (ell - 1) / pv
    return np.exp(log_f - log_norm - expo * np.log1p(r) - space.alpha / 2 * r ** (2 * ell))
