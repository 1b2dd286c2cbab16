r"""Numerical Bergman projection on :math:`\mathbb C` and the rescaling operator.

Everything here is one-dimensional (``n = 1``). For :math:`\beta < 2\alpha`

.. math::

    \delta = \Bigl(\frac{\alpha}{2\alpha-\beta}\Bigr)^{1/\ell},\qquad
    \kappa = \alpha\delta^\ell = \frac{\alpha^2}{2\alpha-\beta},\qquad
    T_\delta f(z) = \delta f(\delta z)\,e^{(\alpha-\beta)|\delta z|^{2\ell}},

and :math:`P_\alpha = P_\kappa\circ T_\delta`. Functions are carried in
log-polar form (:class:`SampledFunction`) together with a growth hint
``|f(w)| <~ exp((c/2)|w|^{2 ell})``; the projection integral is only attempted
when that hint makes it absolutely convergent.

All projections of one call share a single set of quadrature nodes, so the
computed :math:`P_\alpha f` is itself a finite combination of kernels and
hence exactly holomorphic in ``z``; finite-difference holomorphy residuals
therefore measure truncation, not quadrature noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .exceptions import DomainError, PreconditionViolation
from .kernel import FockParams, h_alpha
from .mittag import LogComplex, log_add
from .normcheck import exponent_value
from .quad import QuadSpec, integrate_plane

LogEvaluator = Callable[[np.ndarray], LogComplex]

# floor in every relative deviation |a - b| / (|a| + |b| + _FLOOR)
_FLOOR = 1e-12


# -- parameters ---------------------------------------------------------------


@dataclass(frozen=True)
class RescaleParams:
    alpha: float
    beta: float
    ell: float = 1.0
    delta: float = field(init=False)
    kappa: float = field(init=False)

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError(f"alpha must be positive, got {self.alpha}")
        if not self.beta > 0:
            raise DomainError(f"beta must be positive, got {self.beta}")
        if not self.ell >= 1:
            raise DomainError(f"ell must be >= 1, got {self.ell}")
        if not self.beta < 2 * self.alpha:
            raise PreconditionViolation(
                f"rescaling needs beta < 2 alpha, got beta={self.beta}, alpha={self.alpha}"
            )
        gap = 2 * self.alpha - self.beta
        object.__setattr__(self, "delta", (self.alpha / gap) ** (1.0 / self.ell))
        object.__setattr__(self, "kappa", self.alpha**2 / gap)

    def kappa_identity_defect(self) -> float:
        """Relative gap between the two expressions for kappa."""
        return abs(self.alpha * self.delta**self.ell - self.kappa) / self.kappa


@dataclass(frozen=True)
class DecayHint:
    """Asserts ``|f(w)| <~ exp((c/2)|w|^(2 ell))`` up to polynomial factors."""

    c: float
    ell: float = 1.0

    def in_exponent(self, ell: float) -> float:
        """The constant ``c'`` with ``|f| <~ exp((c'/2)|w|^(2 ell))`` for another ``ell``.

        Bounded (``c <= 0``) and slower-growing hints become ``0``, which the
        strict admissibility test treats as "arbitrarily small"; faster growth
        becomes ``inf``.
        """
        if self.ell == ell:
            return self.c
        if self.c <= 0 or self.ell < ell:
            return 0.0
        return math.inf


@dataclass(frozen=True)
class SampledFunction:
    """A function on C given by a log-polar evaluator and a growth hint."""

    log_eval: LogEvaluator
    decay: DecayHint
    name: str = ""

    @classmethod
    def from_complex(cls, f: Callable[[np.ndarray], np.ndarray], c: float = 0.0,
                     ell: float = 1.0, name: str = "") -> "SampledFunction":
        return cls(lambda w: LogComplex.from_complex(f(np.asarray(w, complex))),
                   DecayHint(c, ell), name)

    def __call__(self, w):
        return self.log_eval(np.asarray(w, dtype=complex)).to_complex()


def linear_combination(a: complex, f: SampledFunction, b: complex,
                       g: SampledFunction) -> SampledFunction:
    """``a f + b g`` without leaving log-polar form."""
    la, lb = LogComplex.from_complex(a), LogComplex.from_complex(b)
    ell = max(f.decay.ell, g.decay.ell)
    c = max(f.decay.in_exponent(ell), g.decay.in_exponent(ell))
    return SampledFunction(
        lambda w: log_add(f.log_eval(w) * la, g.log_eval(w) * lb),
        DecayHint(c, ell),
        f"({a})*{f.name}+({b})*{g.name}",
    )


def admissible(alpha: float, ell: float, f: SampledFunction) -> bool:
    """Whether the projection integral of ``f`` converges absolutely."""
    return f.decay.in_exponent(ell) < 2 * alpha


# -- sample families ------------------------------------------------------------


def _log_abs_power(w, k: float):
    with np.errstate(divide="ignore"):
        return k * np.log(np.abs(w))


def monomial(m: int, ell: float = 1.0) -> SampledFunction:
    if m < 0 or int(m) != m:
        raise DomainError(f"monomial degree must be a non-negative integer, got {m}")
    m = int(m)
    return SampledFunction(
        lambda w: LogComplex(_log_abs_power(w, m) if m else np.zeros(np.shape(w)),
                             m * np.angle(w)),
        DecayHint(0.0, ell), f"z^{m}",
    )


def constant_one(ell: float = 1.0) -> SampledFunction:
    return monomial(0, ell)


def conjugate_sample(ell: float = 1.0) -> SampledFunction:
    """``w -> conj(w)``, orthogonal to every holomorphic function."""
    return SampledFunction(lambda w: LogComplex(_log_abs_power(w, 1), -np.angle(w)),
                           DecayHint(0.0, ell), "conj(z)")


def borderline_sample(beta: float, ell: float = 1.0, rho: float = 1.0, nu: int = 0) -> SampledFunction:
    """``w^nu (1+|w|)^{-(nu+rho+3)} exp((beta/2)|w|^{2 ell})``.

    It lies in ``L^p_{beta, rho}`` for every ``p``; the projection integral
    converges exactly when ``beta < 2 alpha``.
    """

    def log_eval(w):
        r = np.abs(w)
        lv = 0.5 * beta * r ** (2 * ell) - (nu + rho + 3) * np.log1p(r)
        if nu:
            lv = lv + _log_abs_power(w, nu)
        return LogComplex(lv, nu * np.angle(w))

    return SampledFunction(log_eval, DecayHint(beta, ell), f"borderline(nu={nu})")


def damped_conjugate(beta: float, ell: float = 1.0, power: float = 6.0) -> SampledFunction:
    """``conj(w) (1+|w|)^{-power} exp((beta/2)|w|^{2 ell})``."""

    def log_eval(w):
        r = np.abs(w)
        return LogComplex(_log_abs_power(w, 1) - power * np.log1p(r) + 0.5 * beta * r ** (2 * ell),
                          -np.angle(w))

    return SampledFunction(log_eval, DecayHint(beta, ell), "damped_conj")


def radial_square(beta: float, ell: float = 1.0, eps: float = 0.1) -> SampledFunction:
    """``|w|^2 exp((beta/2 - eps)|w|^{2 ell})``; its projection is a constant."""

    def log_eval(w):
        r = np.abs(w)
        return LogComplex(_log_abs_power(w, 2) + (0.5 * beta - eps) * r ** (2 * ell),
                          np.zeros(np.shape(w)))

    return SampledFunction(log_eval, DecayHint(beta - 2 * eps, ell), "radial_square")


def quarter_square(beta: float, ell: float = 1.0) -> SampledFunction:
    """``w^2 exp((beta/4)|w|^{2 ell})``."""

    def log_eval(w):
        r = np.abs(w)
        return LogComplex(_log_abs_power(w, 2) + 0.25 * beta * r ** (2 * ell), 2 * np.angle(w))

    return SampledFunction(log_eval, DecayHint(beta / 2, ell), "quarter_square")


def shifted_bump(beta: float, ell: float = 1.0, center: complex = 0.5 + 0.25j) -> SampledFunction:
    """``(1+|w-a|^2)^{-2} exp((beta/2)|w|^{2 ell})``: neither radial nor holomorphic."""

    def log_eval(w):
        r = np.abs(w)
        return LogComplex(-2 * np.log1p(np.abs(w - center) ** 2) + 0.5 * beta * r ** (2 * ell),
                          np.zeros(np.shape(w)))

    return SampledFunction(log_eval, DecayHint(beta, ell), "shifted_bump")


SAMPLES = {
    "one": lambda beta, ell: constant_one(ell),
    "conj": lambda beta, ell: conjugate_sample(ell),
    "borderline": lambda beta, ell: borderline_sample(beta, ell),
    "damped_conj": lambda beta, ell: damped_conjugate(beta, ell),
    "radial_square": lambda beta, ell: radial_square(beta, ell),
    "quarter_square": lambda beta, ell: quarter_square(beta, ell),
    "shifted_bump": lambda beta, ell: shifted_bump(beta, ell),
}


def named_sample(name: str, beta: float, ell: float = 1.0) -> SampledFunction:
    """Look up a sample by name; ``z^m`` is also accepted for monomials."""
    if name.startswith("z^"):
        return monomial(int(name[2:]), ell)
    try:
        return SAMPLES[name](beta, ell)
    except KeyError:
        known = ", ".join(sorted(SAMPLES) + ["z^<m>"])
        raise DomainError(f"unknown sample {name!r}; known: {known}") from None


# -- the projection ---------------------------------------------------------------


@dataclass
class Projection:
    """Values of ``P_alpha f`` with the absolute mass of each defining integral."""

    values: np.ndarray
    log_mass: np.ndarray
    rel_err: np.ndarray
    converged: bool


def bergman_project_detailed(alpha: float, ell: float, f: SampledFunction, z,
                             spec: QuadSpec = QuadSpec()) -> Projection:
    if not admissible(alpha, ell, f):
        raise PreconditionViolation(
            f"projection needs growth constant c < 2 alpha = {2 * alpha}, "
            f"got c = {f.decay.in_exponent(ell)} ({f.name or 'unnamed'})"
        )
    fp = FockParams(1, ell, alpha)
    z = np.asarray(z, dtype=complex)
    zf = z.ravel()

    def integrand(w):
        kern = h_alpha(fp, zf * np.conj(w)[..., None])
        fv = f.log_eval(w)
        lv = (np.asarray(fv.log_mag) - alpha * np.abs(w) ** (2 * ell))[..., None]
        return LogComplex(np.asarray(kern.log_mag) + lv,
                          np.asarray(kern.phase) + np.asarray(fv.phase)[..., None])

    res = integrate_plane(integrand, spec)
    vals = np.asarray(res.to_complex(), dtype=complex).reshape(z.shape)
    return Projection(vals, np.asarray(res.log_l1).reshape(z.shape),
                      np.asarray(res.rel_err).reshape(z.shape), bool(res.converged))


def bergman_project(alpha: float, ell: float, f: SampledFunction, z,
                    spec: QuadSpec = QuadSpec()):
    r""":math:`P_\alpha f(z) = \int f(w) K_\alpha(z,w) e^{-\alpha|w|^{2\ell}}\,dA(w)`."""
    vals = bergman_project_detailed(alpha, ell, f, z, spec).values
    return complex(vals) if vals.ndim == 0 else vals


def t_delta(rp: RescaleParams, f: SampledFunction) -> SampledFunction:
    """``delta f(delta z) exp((alpha - beta)|delta z|^{2 ell})``."""
    d, ell = rp.delta, rp.ell
    c = rp.delta ** (2 * ell) * (f.decay.in_exponent(ell) + 2 * (rp.alpha - rp.beta))

    def log_eval(w):
        w = np.asarray(w, dtype=complex)
        v = f.log_eval(d * w)
        return v.scale(math.log(d) + (rp.alpha - rp.beta) * np.abs(d * w) ** (2 * ell))

    return SampledFunction(log_eval, DecayHint(c, ell), f"T({f.name})")


def t_delta_inverse(rp: RescaleParams, g: SampledFunction) -> SampledFunction:
    """The unique ``f`` with ``T_delta f = g``: ``g(z/delta) exp((beta-alpha)|z|^{2 ell}) / delta``."""
    d, ell = rp.delta, rp.ell
    c = g.decay.in_exponent(ell) * d ** (-2 * ell) + 2 * (rp.beta - rp.alpha)

    def log_eval(w):
        w = np.asarray(w, dtype=complex)
        v = g.log_eval(w / d)
        return v.scale(-math.log(d) + (rp.beta - rp.alpha) * np.abs(w) ** (2 * ell))

    return SampledFunction(log_eval, DecayHint(c, ell), f"Tinv({g.name})")


def relative_deviation(a, b, floor=_FLOOR) -> np.ndarray:
    a, b = np.asarray(a, complex), np.asarray(b, complex)
    return np.abs(a - b) / (np.abs(a) + np.abs(b) + floor)


def noise_floor(proj: Projection, spec: QuadSpec) -> np.ndarray:
    """Absolute level below which a computed projection is indistinguishable from zero."""
    return np.maximum(_FLOOR, 10 * spec.rel_tol * np.exp(proj.log_mass))


# -- weighted norms -------------------------------------------------------------


def lp_log_norm(f: SampledFunction, a: float, ell: float, p, rho: float = 0.0,
                spec: QuadSpec = QuadSpec(), sup_radius: float = 8.0) -> float:
    r"""``log`` of :math:`\|f\|_{L^p_{a,\rho}}`, weight :math:`(1+|w|)^\rho e^{-(a/2)|w|^{2\ell}}`.

    ``p = inf`` takes the maximum over a polar grid of radius ``sup_radius``.
    """
    pv = exponent_value(p)

    def log_weighted(w):
        r = np.abs(w)
        return np.asarray(f.log_eval(w).log_mag) + rho * np.log1p(r) - 0.5 * a * r ** (2 * ell)

    if math.isinf(pv):
        r = np.linspace(0, sup_radius, 801)[:, None]
        th = np.linspace(-np.pi, np.pi, 256, endpoint=False)[None, :]
        return float(np.max(log_weighted(r * np.exp(1j * th))))

    def integrand(w):
        lv = pv * log_weighted(w)
        return LogComplex(lv, np.zeros_like(lv))

    return float(integrate_plane(integrand, spec).log_abs) / pv


def norm_equivalence_ratio(rp: RescaleParams, f: SampledFunction, p, rho: float = 0.0,
                           spec: QuadSpec = QuadSpec()) -> float:
    """``||T_delta f||_{L^p_{kappa,rho}} / ||f||_{L^p_{beta,rho}}``.

    Substituting ``u = delta z`` gives the exact sandwich
    ``delta^{1-2/p} min(1, delta^-rho) <= ratio <= delta^{1-2/p} max(1, delta^-rho)``.
    """
    num = lp_log_norm(t_delta(rp, f), rp.kappa, rp.ell, p, rho, spec,
                      sup_radius=8.0 / rp.delta)
    den = lp_log_norm(f, rp.beta, rp.ell, p, rho, spec)
    return math.exp(num - den)


def norm_equivalence_bounds(rp: RescaleParams, p, rho: float = 0.0) -> tuple[float, float]:
    pv = exponent_value(p)
    base = rp.delta ** (1 - 2 / pv)
    s = rp.delta ** (-rho)
    return base * min(1.0, s), base * max(1.0, s)


# -- identity checks ------------------------------------------------------------------


def factorization_check(rp: RescaleParams, f: SampledFunction, z_grid,
                        spec: QuadSpec = QuadSpec()) -> float:
    """max over the grid of the relative gap between ``P_alpha f`` and ``P_kappa T_delta f``."""
    lhs = bergman_project_detailed(rp.alpha, rp.ell, f, z_grid, spec).values
    rhs = bergman_project_detailed(rp.kappa, rp.ell, t_delta(rp, f), z_grid, spec).values
    return float(np.max(relative_deviation(lhs, rhs)))


def reproduction_defect(alpha: float, ell: float, degrees: Sequence[int], z_grid,
                        spec: QuadSpec = QuadSpec()) -> np.ndarray:
    """Per degree ``m``, max relative gap between ``P_alpha(w^m)`` and ``z^m``."""
    z = np.asarray(z_grid, dtype=complex)
    out = []
    for m in degrees:
        got = bergman_project_detailed(alpha, ell, monomial(m, ell), z, spec).values
        out.append(np.max(relative_deviation(got, z**m)))
    return np.array(out)


def linearity_defect(alpha: float, ell: float, a: complex, f: SampledFunction, b: complex,
                     g: SampledFunction, z_grid, spec: QuadSpec = QuadSpec()) -> float:
    lhs = bergman_project_detailed(alpha, ell, linear_combination(a, f, b, g), z_grid, spec).values
    pf = bergman_project_detailed(alpha, ell, f, z_grid, spec).values
    pg = bergman_project_detailed(alpha, ell, g, z_grid, spec).values
    return float(np.max(relative_deviation(lhs, a * pf + b * pg)))


def taylor_coefficients(values: np.ndarray, radius: float, rel_cut: float = 1e-12,
                        abs_floor: float = 0.0) -> np.ndarray:
    """Taylor coefficients from equally spaced samples on ``|z| = radius``.

    Coefficients whose contribution on the circle is below ``rel_cut`` of the
    largest sample, or below ``abs_floor``, are dropped so that aliasing and
    quadrature noise are not amplified outside the circle.
    """
    values = np.asarray(values, dtype=complex)
    N = values.size
    coef = np.fft.fft(values) / N
    cut = max(rel_cut * np.max(np.abs(values), initial=0.0), abs_floor)
    keep = np.abs(coef) > cut
    coef = np.where(keep, coef, 0) / radius ** np.arange(N)
    nz = np.flatnonzero(coef)
    return coef[: nz.max() + 1] if nz.size else np.zeros(1, complex)


def _polyval(w, coef):
    with np.errstate(over="ignore", invalid="ignore"):
        return np.polynomial.polynomial.polyval(w, coef)


def polynomial_sample(coef, ell: float = 1.0) -> SampledFunction:
    coef = np.asarray(coef, dtype=complex)
    return SampledFunction.from_complex(
        lambda w: _polyval(w, coef), 0.0, ell,
        f"poly(deg={coef.size - 1})",
    )


def idempotence_check(alpha: float, ell: float, f: SampledFunction, z_grid,
                      spec: QuadSpec = QuadSpec(), n_circle: int = 128,
                      radius: float | None = None, max_circle: int = 1024) -> float:
    """max relative gap between ``P_alpha(P_alpha f)`` and ``P_alpha f`` on the grid.

    The inner projection is sampled on a circle enclosing the grid and
    represented by its Taylor polynomial before being projected again; the
    number of samples doubles until the top quarter of the coefficients is
    negligible. Values at the quadrature noise level count as zero.
    """
    z = np.asarray(z_grid, dtype=complex).ravel()
    R = radius if radius is not None else 1.1 * float(np.max(np.abs(z), initial=0.0)) + 0.25
    N = n_circle
    while True:
        circle = R * np.exp(2j * np.pi * np.arange(N) / N)
        inner = bergman_project_detailed(alpha, ell, f, np.concatenate([z, circle]), spec)
        once, on_circle = inner.values[: z.size], inner.values[z.size:]
        coef = taylor_coefficients(on_circle, R, abs_floor=float(noise_floor(inner, spec).max()))
        if coef.size <= 3 * N // 4 or 2 * N > max_circle:
            break
        N *= 2
    if np.any(coef):
        twice = bergman_project_detailed(alpha, ell, polynomial_sample(coef, ell), z, spec).values
    else:
        twice = np.zeros(z.size, complex)
    floor = noise_floor(inner, spec)[: z.size]
    return float(np.max(relative_deviation(twice, once, floor)))


# -- image of the projection ----------------------------------------------------


def holomorphy_residual(values_center, values_stencil, floor=0.0) -> np.ndarray:
    """Dimensionless ``d/d conj(z)`` residual from a five-point stencil.

    ``values_stencil`` holds ``F(z+h), F(z-h), F(z+ih), F(z-ih)`` along the
    last axis. For holomorphic ``F`` the result is ``O(h^3)``; for ``conj(z)``
    it is ``h/|z|``. ``floor`` is an absolute noise level added to the
    scale, for functions that vanish identically.
    """
    c = np.asarray(values_center, complex)
    s = np.asarray(values_stencil, complex)
    dx = s[..., 0] - s[..., 1]
    dy = s[..., 2] - s[..., 3]
    dbar = dx + 1j * dy
    d = dx - 1j * dy
    return np.abs(dbar) / (np.abs(d) + 4 * (np.abs(c) + floor) + _FLOOR)


def stencil_points(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    h = 1e-4 * (1 + np.abs(z))
    return z[..., None] + h[..., None] * np.array([1, -1, 1j, -1j])


@dataclass
class ImageRow:
    sample: str
    check: str
    value: float
    threshold: float

    @property
    def passed(self) -> bool:
        return bool(self.value <= self.threshold)

    def to_dict(self) -> dict:
        return {"sample": self.sample, "check": self.check, "value": self.value,
                "threshold": self.threshold, "passed": self.passed}


@dataclass
class ImageReport:
    rows: list[ImageRow]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)


def _image_radius(rp: RescaleParams) -> float:
    # exp(-(kappa/2) R^{2 ell}) = exp(-8) is far enough out for the decay proxy
    return (16.0 / rp.kappa) ** (1.0 / (2 * rp.ell))


def projection_image_check(
    rp: RescaleParams,
    p,
    rho: float,
    samples: Sequence[SampledFunction],
    spec: QuadSpec = QuadSpec(),
    holomorphic: Sequence[SampledFunction] = (),
    z_grid=None,
    holo_tol: float = 1e-8,
    decay_tol: float = 0.1,
    round_trip_tol: float = 1e-6,
) -> ImageReport:
    """Checks that ``P_alpha`` maps ``L^p_{beta,rho}`` samples into ``F^p_{kappa,rho}``.

    For each sample: (a) the five-point holomorphy residual of ``P_alpha f``,
    (b) the weighted integrand ``(|P f|(1+|z|)^rho e^{-(kappa/2)|z|^{2 ell}})^p``
    (``|z|`` times it for finite ``p``) on the outer ring relative to its
    maximum over the rings. For each holomorphic ``g`` in the target space,
    the round trip ``P_alpha(T_delta^{-1} g) = g``.
    """
    pv = exponent_value(p)
    ell = rp.ell
    if z_grid is None:
        z_grid = np.array([0.3 + 0.2j, -0.7 + 0.5j, 1.1 - 0.4j])
    z = np.asarray(z_grid, dtype=complex).ravel()
    R = _image_radius(rp)
    ring_r = np.linspace(0.0, R, 9)[1:]
    ring_t = np.exp(2j * np.pi * (np.arange(8) + 0.5) / 8)
    rings = (ring_r[:, None] * ring_t[None, :]).ravel()
    pts = np.concatenate([z, stencil_points(z).ravel(), rings])
    rows: list[ImageRow] = []
    for f in samples:
        vals = bergman_project_detailed(rp.alpha, ell, f, pts, spec)
        pf = vals.values
        center, stencil = pf[: z.size], pf[z.size: 5 * z.size].reshape(z.size, 4)
        # quadrature noise floor for projections that vanish identically
        # stencil rounding is ~1e-16 of the mass; this keeps a vanishing P f near 1e-10
        floor = 1e-6 * np.exp(vals.log_mass[: z.size])
        res = holomorphy_residual(center, stencil, floor)
        rows.append(ImageRow(f.name, "holomorphy", float(res.max()), holo_tol))
        ring_abs = np.abs(pf[5 * z.size:])
        ring_abs = np.where(ring_abs > noise_floor(vals, spec)[5 * z.size:], ring_abs, 0.0)
        ring_vals = ring_abs.reshape(ring_r.size, ring_t.size).max(axis=1)
        with np.errstate(divide="ignore"):
            lw = np.log(ring_vals) + rho * np.log1p(ring_r) - 0.5 * rp.kappa * ring_r ** (2 * ell)
        if not math.isinf(pv):
            lw = pv * lw + np.log(ring_r)
        if np.all(np.isneginf(lw)):
            decay = 0.0
        else:
            decay = float(np.exp(lw[-1] - lw.max()))
        rows.append(ImageRow(f.name, "weighted_decay", decay, decay_tol))
    for g in holomorphic:
        got = bergman_project_detailed(rp.alpha, ell, t_delta_inverse(rp, g), z, spec).values
        dev = float(np.max(relative_deviation(got, g(z))))
        rows.append(ImageRow(g.name, "round_trip", dev, round_trip_tol))
    return ImageReport(rows)


# -- necessity of beta < 2 alpha ------------------------------------------------------


@dataclass
class DivergenceReport:
    radii: np.ndarray
    log_partial: np.ndarray

    @property
    def log_increments(self) -> np.ndarray:
        return np.diff(self.log_partial)

    @property
    def diverges(self) -> bool:
        """Partial integrals still growing, with no sign of the increments dying out."""
        inc = self.log_increments
        return bool(np.all(inc > 0) and inc[-1] >= 0.5 * inc[0])


def divergence_exhibit(alpha: float, beta: float, ell: float = 1.0, z: complex = 1.0,
                       rho: float = 1.0, r_start: float = 2.0, doublings: int = 4,
                       spec: QuadSpec = QuadSpec()) -> DivergenceReport:
    """Partial integrals of ``|f(w) K_alpha(z,w)| e^{-alpha|w|^{2 ell}}`` over growing disks.

    ``f`` is the radial member of :func:`borderline_sample`. No precondition is
    enforced: for ``beta >= 2 alpha`` this exhibits the divergence of the
    defining integral.
    """
    fp = FockParams(1, ell, alpha)
    f = borderline_sample(beta, ell, rho)

    def integrand(w):
        lv = (np.asarray(h_alpha(fp, z * np.conj(w)).log_mag) + np.asarray(f.log_eval(w).log_mag)
              - alpha * np.abs(w) ** (2 * ell))
        return LogComplex(lv, np.zeros_like(lv))

    radii = r_start * 2.0 ** np.arange(doublings + 1)
    logs = np.array([float(integrate_plane(integrand, spec, r_max=float(R)).log_abs)
                     for R in radii])
    return DivergenceReport(radii, logs)
