r"""Bergman kernel of the generalized Fock space :math:`F^2_\alpha` on :math:`\mathbb C^n`.

The weight is :math:`e^{-\alpha|z|^{2\ell}}` against the volume measure
normalized so that the unit ball has measure one. The monomials are
orthogonal with

.. math::

    \|w^\nu\|^2 = \frac1\ell\,\alpha^{-(|\nu|+n)/\ell}
    \frac{n!\,\nu!\,\Gamma\bigl((|\nu|+n)/\ell\bigr)}{(n-1+|\nu|)!},

and summing :math:`z^\nu\bar w^\nu/\|w^\nu\|^2` gives
:math:`K_\alpha(z,w) = H_\alpha(z\cdot\bar w)` with

.. math::

    H_\alpha(\lambda) = \frac{\ell\,\alpha^{n/\ell}}{n!}
    E^{(n-1)}_{1/\ell,1/\ell}(\alpha^{1/\ell}\lambda).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import gammaln, wofz

from .exceptions import DimensionMismatch, DomainError, SectorViolation
from .mittag import EPS, LogComplex, MLEvaluation, MLParams, log_add, ml_eval_detailed

_HALF_HALF_RADIUS = 30.0


@dataclass(frozen=True)
class FockParams:
    n: int
    ell: float
    alpha: float

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n}")
        if not self.ell >= 1:
            raise DomainError(f"ell must be >= 1, got {self.ell}")
        if not self.alpha > 0:
            raise DomainError(f"alpha must be positive, got {self.alpha}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "ell", float(self.ell))
        object.__setattr__(self, "alpha", float(self.alpha))

    @property
    def ml_params(self) -> MLParams:
        return MLParams(1.0 / self.ell, 1.0 / self.ell, self.n - 1)

    def with_alpha(self, alpha: float) -> "FockParams":
        return FockParams(self.n, self.ell, alpha)


def as_points(z, n: int) -> np.ndarray:
    """Coerce ``z`` to a complex array of shape ``(..., n)``.

    For ``n = 1`` a bare scalar or an array of scalars is accepted and
    treated as a collection of points of ``C``.
    """
    arr = np.asarray(z, dtype=complex)
    if n == 1 and (arr.ndim == 0 or arr.shape[-1] != 1):
        return arr[..., None]
    if arr.ndim == 0 or arr.shape[-1] != n:
        raise DimensionMismatch(f"expected points of C^{n}, got array of shape {arr.shape}")
    return arr


def hermitian_pairing(z, w, n: int) -> np.ndarray:
    """``z . conj(w) = sum_j z_j conj(w_j)`` broadcast over leading axes."""
    zz = as_points(z, n)
    ww = as_points(w, n)
    return np.sum(zz * np.conj(ww), axis=-1)


# -- monomial norms ------------------------------------------------------


def log_monomial_norm_sq(fp: FockParams, nu: Sequence[int]) -> float:
    """Natural log of the squared :math:`F^2_\\alpha` norm of :math:`w^\\nu`."""
    nu = tuple(int(v) for v in nu)
    if len(nu) != fp.n:
        raise DimensionMismatch(f"multi-index of length {len(nu)} for n={fp.n}")
    if any(v < 0 for v in nu):
        raise DomainError("multi-index entries must be non-negative")
    k = sum(nu)
    n, ell = fp.n, fp.ell
    return (
        -math.log(ell)
        - (k + n) / ell * math.log(fp.alpha)
        + math.lgamma(n + 1)
        + sum(math.lgamma(v + 1) for v in nu)
        + math.lgamma((k + n) / ell)
        - math.lgamma(n + k)
    )


def monomial_norm_sq(fp: FockParams, nu: Sequence[int]) -> float:
    return math.exp(log_monomial_norm_sq(fp, nu))


def log_series_coefficient(fp: FockParams, k) -> np.ndarray:
    """log of the coefficient of ``lambda^k`` in :math:`H_\\alpha`."""
    k = np.asarray(k, dtype=float)
    n, ell = fp.n, fp.ell
    return (
        math.log(ell)
        + (k + n) / ell * math.log(fp.alpha)
        - gammaln(n + 1)
        + gammaln(n + k)
        - gammaln(k + 1)
        - gammaln((k + n) / ell)
    )


# -- H_alpha and the kernel -------------------------------------------------


def _log_prefactor(fp: FockParams) -> float:
    return math.log(fp.ell) + fp.n / fp.ell * math.log(fp.alpha) - math.lgamma(fp.n + 1)


def h_alpha_detailed(fp: FockParams, lam) -> MLEvaluation:
    """:math:`H_\\alpha(\\lambda)` with the Mittag-Leffler branch diagnostics."""
    lam = np.asarray(lam, dtype=complex)
    ev = ml_eval_detailed(fp.ml_params, fp.alpha ** (1.0 / fp.ell) * lam)
    ev.value = ev.value.scale(_log_prefactor(fp))
    return ev


def _log_e_half_half(x: np.ndarray) -> LogComplex:
    """log-polar ``E_{1/2,1/2}(x) = 1/sqrt(pi) + x e^{x^2} erfc(-x)`` via the Faddeeva function."""
    x2 = x * x
    right = x.real >= 0
    # e^{x^2} erfc(-x) is 2 e^{x^2} - w(ix) on the right half plane and w(-ix) on the left
    w = LogComplex.from_complex(wofz(np.where(right, 1j * x, -1j * x)))
    w = LogComplex(w.log_mag, np.where(right, w.phase + np.pi, w.phase))
    grow = LogComplex(np.where(right, math.log(2.0) + x2.real, -np.inf), x2.imag)
    e_half_one = log_add(grow, w)
    lead = LogComplex(np.full(x.shape, -0.5 * math.log(math.pi)), np.zeros(x.shape))
    return log_add(lead, e_half_one * LogComplex.from_complex(x))


def h_alpha(fp: FockParams, lam) -> LogComplex:
    lam = np.asarray(lam, dtype=complex)
    if fp.ell == 1.0:
        # E^{(n-1)}_{1,1} = exp, so H is an exponential
        return LogComplex(_log_prefactor(fp) + fp.alpha * lam.real, fp.alpha * lam.imag)
    if fp.ell == 2.0 and fp.n == 1:
        x = math.sqrt(fp.alpha) * lam
        # outside the growth sector the closed form cancels to ~|x|^2 eps
        easy = (np.abs(x) <= _HALF_HALF_RADIUS) | (np.abs(np.angle(x)) <= np.pi / 4)
        if easy.all():
            return _log_e_half_half(x).scale(_log_prefactor(fp))
        out_m = np.empty(x.shape)
        out_p = np.empty(x.shape)
        v = _log_e_half_half(x[easy]).scale(_log_prefactor(fp))
        out_m[easy], out_p[easy] = v.log_mag, v.phase
        v = h_alpha_detailed(fp, lam[~easy]).value
        out_m[~easy], out_p[~easy] = v.log_mag, v.phase
        return LogComplex(out_m, out_p)
    return h_alpha_detailed(fp, lam).value


def kernel_eval(fp: FockParams, z, w) -> LogComplex:
    """:math:`K_\\alpha(z, w) = H_\\alpha(z\\cdot\\bar w)` in log-polar form."""
    return h_alpha(fp, hermitian_pairing(z, w, fp.n))


def kernel_series(fp: FockParams, z, w, terms: int = 200) -> np.ndarray:
    """Truncated power series of the kernel; only sensible for small ``|z . conj(w)|``."""
    lam = hermitian_pairing(z, w, fp.n)
    k = np.arange(terms)
    coef = np.exp(log_series_coefficient(fp, k))
    return np.polynomial.polynomial.polyval(lam, coef)


# -- sectors and pointwise estimates ----------------------------------------


@dataclass(frozen=True)
class Sector:
    """``D(0, delta)`` together with the sector ``|arg lambda| <= pi / (N ell)``."""

    delta: float = 0.25
    N: float = 8.0
    ell: float = 1.0

    def __post_init__(self):
        if not self.delta > 0:
            raise DomainError("delta must be positive")
        if not self.N > 2:
            raise DomainError("N must exceed 2")
        if not self.ell >= 1:
            raise DomainError("ell must be >= 1")

    @property
    def half_angle(self) -> float:
        return math.pi / (self.N * self.ell)

    def contains(self, lam):
        lam = np.asarray(lam, dtype=complex)
        # boundary rays are included; allow for the rounding of np.angle
        inside = (np.abs(lam) < self.delta) | (lam == 0) | (
            np.abs(np.angle(lam)) <= self.half_angle * (1 + 8 * EPS)
        )
        return bool(inside) if inside.ndim == 0 else inside


def sector_contains(s: Sector, lam):
    return s.contains(lam)


def log_exp_power(alpha: float, ell: float, lam) -> np.ndarray:
    """``log |exp(alpha lambda^ell)|`` with the principal power."""
    lam = np.asarray(lam, dtype=complex)
    r = np.abs(lam)
    return alpha * r**ell * np.cos(ell * np.angle(lam))


def log_pointwise_ratio(fp: FockParams, lam) -> np.ndarray:
    """``log |H| - n(ell-1) log(1+|lam|) - log|e^{alpha lam^ell}|`` without a sector check."""
    lam = np.asarray(lam, dtype=complex)
    h = h_alpha(fp, lam)
    return (
        np.asarray(h.log_mag)
        - fp.n * (fp.ell - 1) * np.log1p(np.abs(lam))
        - log_exp_power(fp.alpha, fp.ell, lam)
    )


def pointwise_estimate_ratio(fp: FockParams, s: Sector, lam):
    """:math:`|H_\\alpha(\\lambda)| / ((1+|\\lambda|)^{n(\\ell-1)}|e^{\\alpha\\lambda^\\ell}|)` on the sector."""
    inside = np.asarray(s.contains(lam))
    if not np.all(inside):
        raise SectorViolation("argument outside the sector S^delta_N")
    out = np.exp(log_pointwise_ratio(fp, lam))
    return float(out) if np.ndim(out) == 0 else out


def rough_bound_ratio(fp: FockParams, lam):
    """:math:`|H_\\alpha(\\lambda)| / ((1+|\\lambda|)^{n(\\ell-1)} e^{\\alpha|\\lambda|^\\ell})`, any ``lambda``."""
    lam = np.asarray(lam, dtype=complex)
    h = h_alpha(fp, lam)
    r = np.abs(lam)
    out = np.exp(
        np.asarray(h.log_mag) - fp.n * (fp.ell - 1) * np.log1p(r) - fp.alpha * r**fp.ell
    )
    return float(out) if np.ndim(out) == 0 else out


def kernel_verify_rows(fp: FockParams, s: Sector, radii, angles) -> list[dict]:
    """Sweep ``lambda = r e^{i theta}`` and tabulate the pointwise ratio.

    Inside the sector the ratio is the two-sided estimate; outside it the
    one-sided rough bound is reported instead.
    """
    rr, tt = np.meshgrid(np.asarray(radii, float), np.asarray(angles, float), indexing="ij")
    lam = (rr * np.exp(1j * tt)).ravel()
    inside = np.asarray(s.contains(lam))
    with np.errstate(over="ignore"):
        # only used inside the sector, where it is moderate
        sector_ratio = np.exp(log_pointwise_ratio(fp, lam))
    bound_ratio = np.asarray(rough_bound_ratio(fp, lam))
    rows = []
    for i, l in enumerate(lam):
        rows.append(
            {
                "re": float(l.real),
                "im": float(l.imag),
                "in_sector": bool(inside[i]),
                "ratio": float(sector_ratio[i] if inside[i] else bound_ratio[i]),
            }
        )
    return rows
