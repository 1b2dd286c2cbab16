r"""Two-parametric Mittag-Leffler functions and their derivatives.

.. math::

    E_{a,b}(\lambda) = \sum_{k\ge0} \frac{\lambda^k}{\Gamma(ak+b)},
    \qquad 0 < a \le 1,\ b > 0.

Values are returned in log-polar form (:class:`LogComplex`) because the
functions grow like :math:`e^{|\lambda|^{1/a}}`. Two evaluation routes are
provided:

* :func:`ml_series` sums the defining series term by term in log-space with
  compensated accumulation;
* :func:`ml_asymptotic` uses the large-argument expansion

  .. math::

      E^{(m)}_{a,b}(\lambda) \approx \frac1a \frac{d^m}{d\lambda^m}
      \bigl(\lambda^{(1-b)/a} e^{\lambda^{1/a}}\bigr)
      - \sum_{k\ge1} \frac{d^m}{d\lambda^m}\frac{\lambda^{-k}}{\Gamma(b-ak)}

  with the algebraic sum truncated at its smallest term.

In the wedge where the exponential part decays both routes can lose
accuracy at moderate ``|lambda|`` (the series by cancellation, the expansion
by truncation). :func:`ml_contour` covers that gap by trapezoidal inversion
of the Laplace transform :math:`s^{a-b}/(s^a-\lambda)` on a parabolic
Hankel contour.

:func:`ml_eval` uses the series below :func:`crossover_radius` and the
expansion above it; below the radius, points where the series is badly
conditioned go to whichever of the other two routes has the smaller error
estimate.

All functions accept scalars or numpy arrays of complex arguments.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from .exceptions import DomainError, NonConvergence

ArrayLike = Union[complex, float, np.ndarray]

EPS = np.finfo(float).eps
MAX_SERIES_TERMS = 10**6
# largest exponent whose exp() is still a finite double
LOG_OVERFLOW = 700.0

SERIES = "series"
ASYMPTOTIC = "asymptotic"
CONTOUR = "contour"

_WARN_CANCELLATION = "series-cancellation"
_WARN_PRECISION = "precision-loss"
_WARN_SECTOR = "sector-boundary"


def _wrap_phase(phase):
    """Map angles to the principal interval (-pi, pi]."""
    out = np.mod(np.asarray(phase, dtype=float) + np.pi, 2 * np.pi) - np.pi
    out = np.where(out == -np.pi, np.pi, out)
    if np.ndim(out) == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class LogComplex:
    """A complex number ``exp(log_mag) * exp(1j * phase)``.

    ``log_mag`` may be ``-inf`` (the value zero). Fields may be floats or
    equally shaped numpy arrays.
    """

    log_mag: float | np.ndarray
    phase: float | np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "phase", _wrap_phase(self.phase))
        if np.ndim(self.log_mag) == 0:
            object.__setattr__(self, "log_mag", float(self.log_mag))

    @classmethod
    def from_complex(cls, value: ArrayLike) -> "LogComplex":
        v = np.asarray(value, dtype=complex)
        with np.errstate(divide="ignore"):
            return cls(np.log(np.abs(v)), np.angle(v))

    def to_complex(self):
        with np.errstate(over="ignore", invalid="ignore"):
            out = np.exp(self.log_mag) * np.exp(1j * np.asarray(self.phase))
        if np.ndim(out) == 0:
            return complex(out)
        return out

    def __mul__(self, other: "LogComplex") -> "LogComplex":
        if not isinstance(other, LogComplex):
            other = LogComplex.from_complex(other)
        return LogComplex(
            np.add(self.log_mag, other.log_mag), np.add(self.phase, other.phase)
        )

    __rmul__ = __mul__

    def __truediv__(self, other: "LogComplex") -> "LogComplex":
        if not isinstance(other, LogComplex):
            other = LogComplex.from_complex(other)
        return LogComplex(
            np.subtract(self.log_mag, other.log_mag),
            np.subtract(self.phase, other.phase),
        )

    def conjugate(self) -> "LogComplex":
        return LogComplex(self.log_mag, np.negative(self.phase))

    def scale(self, log_factor) -> "LogComplex":
        """Multiply by the positive number ``exp(log_factor)``."""
        return LogComplex(np.add(self.log_mag, log_factor), self.phase)

    def __getitem__(self, idx) -> "LogComplex":
        return LogComplex(np.asarray(self.log_mag)[idx], np.asarray(self.phase)[idx])


def log_add(x: LogComplex, y: LogComplex) -> LogComplex:
    """``x + y`` computed without leaving log-polar form."""
    lx = np.asarray(x.log_mag, dtype=float)
    ly = np.asarray(y.log_mag, dtype=float)
    top = np.maximum(lx, ly)
    safe = np.where(np.isfinite(top), top, 0.0)
    with np.errstate(invalid="ignore"):
        s = np.exp(lx - safe + 1j * np.asarray(x.phase)) + np.exp(
            ly - safe + 1j * np.asarray(y.phase)
        )
    with np.errstate(divide="ignore"):
        return LogComplex(np.log(np.abs(s)) + safe, np.angle(s))


# -- log Gamma -------------------------------------------------------------

# Lanczos approximation, g = 7, nine coefficients; relative error of Gamma
# itself is ~1e-15 on [0.5, inf).
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2 * math.pi)
_EULER_GAMMA = 0.57721566490153286061

_BERNOULLI_EVEN = [
    Fraction(1, 6),
    Fraction(-1, 30),
    Fraction(1, 42),
    Fraction(-1, 30),
    Fraction(5, 66),
    Fraction(-691, 2730),
    Fraction(7, 6),
    Fraction(-3617, 510),
]


def _zeta_int(s: int, n: int = 12) -> float:
    """Riemann zeta at an integer s >= 2 by Euler-Maclaurin summation."""
    terms = [float(k) ** -s for k in range(1, n)]
    terms.append(n ** (1 - s) / (s - 1))
    terms.append(0.5 * n**-s)
    rising = float(s)  # s (s+1) ... (s + 2j - 2)
    fact = 2.0
    for j, bern in enumerate(_BERNOULLI_EVEN, start=1):
        terms.append(float(bern) / fact * rising * n ** (-s - 2 * j + 1))
        rising *= (s + 2 * j - 1) * (s + 2 * j)
        fact *= (2 * j + 1) * (2 * j + 2)
    return math.fsum(terms)


# log Gamma(1 + e) = -gamma e + sum_{k>=2} (-1)^k zeta(k) e^k / k
_TAYLOR_NEAR_ONE = [0.0, -_EULER_GAMMA] + [
    (-1) ** k * _zeta_int(k) / k for k in range(2, 34)
]
_TAYLOR_RADIUS = 0.2


def _lgamma_near_one(eps: np.ndarray) -> np.ndarray:
    out = np.zeros_like(eps)
    for c in reversed(_TAYLOR_NEAR_ONE[1:]):
        out = (out + c) * eps
    return out


def _lgamma_lanczos(x: np.ndarray) -> np.ndarray:
    z = x - 1.0
    acc = np.full_like(z, _LANCZOS[0])
    for i, c in enumerate(_LANCZOS[1:], start=1):
        acc = acc + c / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * np.log(t) - t + np.log(acc)


def log_gamma(x):
    """Natural log of the Gamma function for real ``x > 0``.

    Lanczos (g=7) on most of the axis; in a window of radius 0.2 around the
    zeros at 1 and 2 a Taylor expansion with zeta coefficients keeps the
    relative accuracy; arguments below 1/2 are shifted up by one.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("log_gamma requires x > 0")
    out = np.empty_like(arr)
    shift = np.zeros_like(arr)

    work = arr.copy()
    small = work < 0.5
    shift[small] = np.log(work[small])
    work[small] += 1.0

    near1 = np.abs(work - 1.0) < _TAYLOR_RADIUS
    near2 = np.abs(work - 2.0) < _TAYLOR_RADIUS
    rest = ~(near1 | near2)
    out[near1] = _lgamma_near_one(work[near1] - 1.0)
    e2 = work[near2] - 2.0
    out[near2] = np.log1p(e2) + _lgamma_near_one(e2)
    out[rest] = _lgamma_lanczos(work[rest])
    out = out - shift
    if out.ndim == 0:
        return float(out)
    return out


def _log_abs_rgamma(x: float) -> tuple[float, float]:
    """``(log|1/Gamma(x)|, sign(1/Gamma(x)))`` for any real x; -inf at poles."""
    if x > 0:
        return -log_gamma(x), 1.0
    if abs(x - round(x)) <= 1e-13 * max(1.0, abs(x)):
        return -math.inf, 0.0
    # reflection: 1/Gamma(x) = sin(pi x) Gamma(1 - x) / pi
    frac = math.fmod(x, 2.0)
    s = math.sin(math.pi * frac)
    return math.log(abs(s)) + log_gamma(1.0 - x) - math.log(math.pi), math.copysign(1.0, s)


# -- parameters ------------------------------------------------------------


@dataclass(frozen=True)
class MLParams:
    """Parameters of :math:`E^{(m)}_{a,b}`: ``0 < a <= 1``, ``b > 0``, ``m >= 0``."""

    a: float
    b: float
    m: int = 0

    def __post_init__(self):
        if not (0 < self.a <= 1):
            raise DomainError(f"a must lie in (0, 1], got {self.a}")
        if not self.b > 0:
            raise DomainError(f"b must be positive, got {self.b}")
        if int(self.m) != self.m or self.m < 0:
            raise DomainError(f"m must be a non-negative integer, got {self.m}")
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "m", int(self.m))


def crossover_radius(params: MLParams) -> float:
    """Radius beyond which :func:`ml_eval` always uses the asymptotic branch.

    ``max(15, (700 a)^a)`` clipped to ``700^a`` so that the largest series
    term ``~exp(|lambda|^(1/a))`` stays representable.
    """
    a = params.a
    return min(max(15.0, (LOG_OVERFLOW * a) ** a), LOG_OVERFLOW**a)


# -- series ----------------------------------------------------------------


@dataclass
class _SeriesOut:
    value: LogComplex
    log_abs_sum: np.ndarray  # log of sum_k |t_k|
    log_max_term: np.ndarray
    nterms: np.ndarray


def _series(params: MLParams, lam: np.ndarray, tol: float) -> _SeriesOut:
    a, b, m = params.a, params.b, params.m
    lam = np.asarray(lam, dtype=complex).ravel()
    npts = lam.size
    r = np.abs(lam)
    if npts and r.max() > 0:
        peak = r.max() ** (1.0 / a) / a
        if peak > MAX_SERIES_TERMS:
            raise NonConvergence(
                f"series for |lambda|={r.max():.4g} needs more than {MAX_SERIES_TERMS} terms"
            )
    with np.errstate(divide="ignore"):
        logr = np.log(r)
    theta = np.angle(lam)

    out_log = np.full(npts, -np.inf)
    out_ph = np.zeros(npts)
    out_abs = np.full(npts, -np.inf)
    out_max = np.full(npts, -np.inf)
    out_n = np.zeros(npts, dtype=int)

    idx = np.arange(npts)
    big = np.full(npts, -np.inf)  # running max log term, the scale
    s_re = np.zeros(npts)
    s_im = np.zeros(npts)
    c_re = np.zeros(npts)
    c_im = np.zeros(npts)
    s_abs = np.zeros(npts)
    peak_k = np.zeros(npts, dtype=int)
    small_run = np.zeros(npts, dtype=int)

    block = 256
    coef = np.empty(0)
    coef_start = m
    k = m
    while idx.size:
        j = k - m
        if j >= MAX_SERIES_TERMS:
            raise NonConvergence(f"series did not converge within {MAX_SERIES_TERMS} terms")
        if k - coef_start >= coef.size:
            coef_start = k
            ks = np.arange(k, k + block, dtype=float)
            coef = (
                log_gamma(ks + 1.0)
                - log_gamma(ks - m + 1.0)
                - log_gamma(a * ks + b)
            )
        lc = coef[k - coef_start]
        if j == 0:
            lt = np.full(idx.size, lc)
        else:
            lt = lc + j * logr
        ph = j * theta

        grow = lt > big
        if grow.any():
            with np.errstate(invalid="ignore", over="ignore"):
                factor = np.where(np.isfinite(big), np.exp(big - lt), 0.0)
            factor = np.where(grow, factor, 1.0)
            s_re *= factor
            s_im *= factor
            c_re *= factor
            c_im *= factor
            s_abs *= factor
            big = np.where(grow, lt, big)
            peak_k = np.where(grow, k, peak_k)

        with np.errstate(invalid="ignore"):
            mag = np.exp(lt - big)
        mag = np.where(np.isfinite(lt), mag, 0.0)
        t_re = mag * np.cos(ph)
        t_im = mag * np.sin(ph)
        # Neumaier compensated summation, componentwise
        for s, c, t in ((s_re, c_re, t_re), (s_im, c_im, t_im)):
            tot = s + t
            c += np.where(np.abs(s) >= np.abs(t), (s - tot) + t, (t - tot) + s)
            s[:] = tot
        s_abs += mag

        cur = np.hypot(s_re + c_re, s_im + c_im)
        small = (mag < tol * cur) & (k > peak_k)
        small_run = np.where(small, small_run + 1, 0)
        done = small_run >= 3
        if done.any():
            sel = idx[done]
            fr = s_re[done] + c_re[done]
            fi = s_im[done] + c_im[done]
            with np.errstate(divide="ignore"):
                out_log[sel] = np.log(np.hypot(fr, fi)) + big[done]
                out_abs[sel] = np.log(s_abs[done]) + big[done]
            out_ph[sel] = np.arctan2(fi, fr)
            out_max[sel] = big[done]
            out_n[sel] = k - m + 1
            keep = ~done
            idx = idx[keep]
            logr, theta = logr[keep], theta[keep]
            big, peak_k, small_run = big[keep], peak_k[keep], small_run[keep]
            s_re, s_im = s_re[keep], s_im[keep]
            c_re, c_im = c_re[keep], c_im[keep]
            s_abs = s_abs[keep]
        k += 1

    return _SeriesOut(LogComplex(out_log, out_ph), out_abs, out_max, out_n)


def _shape_like(value: LogComplex, shape) -> LogComplex:
    if shape == ():
        return LogComplex(float(value.log_mag[0]), float(value.phase[0]))
    return LogComplex(np.reshape(value.log_mag, shape), np.reshape(value.phase, shape))


def ml_series_log(params: MLParams, lam: ArrayLike, tol: float = 1e-16) -> LogComplex:
    """:math:`E^{(m)}_{a,b}(\\lambda)` by direct summation, in log-polar form.

    The sum stops once three consecutive terms fall below ``tol`` times the
    partial sum, past the largest term.
    """
    if not tol > 0:
        raise DomainError("tol must be positive")
    shape = np.shape(lam)
    return _shape_like(_series(params, lam, tol).value, shape)


def ml_series(params: MLParams, lam: ArrayLike, tol: float = 1e-16):
    """Complex value of the truncated series; may overflow to ``inf`` for very large ``lambda``."""
    return ml_series_log(params, lam, tol).to_complex()


# -- asymptotics -----------------------------------------------------------


def exponential_part_coefficients(params: MLParams) -> list[tuple[float, float]]:
    """Expand :math:`\\frac1a \\frac{d^m}{d\\lambda^m}(\\lambda^{c} e^{\\lambda^{s}})`.

    Returns pairs ``(coefficient, exponent)`` with
    ``c = (1-b)/a``, ``s = 1/a`` such that the derivative equals
    ``exp(lambda^s) * sum coefficient * lambda^exponent``.
    """
    c0 = (1.0 - params.b) / params.a
    s = 1.0 / params.a
    terms: dict[int, float] = {0: 1.0 / params.a}
    for step in range(params.m):
        nxt: dict[int, float] = defaultdict(float)
        for i, coef in terms.items():
            e = c0 + i * s - step
            if e != 0.0:
                nxt[i] += coef * e
            nxt[i + 1] += coef * s
        terms = {i: c for i, c in nxt.items() if c != 0.0}
    return sorted(
        ((c, c0 + i * s - params.m) for i, c in terms.items()), key=lambda t: t[1]
    )


def _exponential_part(params: MLParams, lam: np.ndarray) -> LogComplex:
    """``d^m/dlam^m (1/a) lam^{(1-b)/a} exp(lam^{1/a})`` on the principal branch."""
    lam = np.asarray(lam, dtype=complex).ravel()
    with np.errstate(divide="ignore"):
        lr = np.log(np.abs(lam))
    th = np.angle(lam)
    acc = LogComplex(np.full(lam.size, -np.inf), np.zeros(lam.size))
    for coef, expo in exponential_part_coefficients(params):
        term = LogComplex(
            math.log(abs(coef)) + expo * lr,
            expo * th + (np.pi if coef < 0 else 0.0),
        )
        acc = log_add(acc, term)
    s = 1.0 / params.a
    rs = np.exp(s * lr)
    return LogComplex(acc.log_mag + rs * np.cos(s * th), acc.phase + rs * np.sin(s * th))


_TAIL_TERMS = 96


def _tail_coefficients(params: MLParams) -> tuple[np.ndarray, np.ndarray]:
    """log-magnitude and sign of ``-(-1)^m (k)_m / Gamma(b - a k)``, k = 1..K."""
    m = params.m
    logs = np.empty(_TAIL_TERMS)
    signs = np.empty(_TAIL_TERMS)
    for k in range(1, _TAIL_TERMS + 1):
        lr, sg = _log_abs_rgamma(params.b - params.a * k)
        rising = math.lgamma(k + m) - math.lgamma(k)
        logs[k - 1] = lr + rising
        signs[k - 1] = -sg * (-1) ** m
    return logs, signs


@dataclass
class _AsymOut:
    value: LogComplex
    log_err: np.ndarray
    exponential: np.ndarray  # mask: exponential term included


def _asymptotic(params: MLParams, lam: np.ndarray) -> _AsymOut:
    a = params.a
    lam = np.asarray(lam, dtype=complex).ravel()
    r = np.abs(lam)
    theta = np.angle(lam)
    with np.errstate(divide="ignore"):
        logr = np.log(r)

    # exponential part, present up to the Stokes line |arg| = min(a pi, pi)
    use_exp = np.abs(theta) <= min(a * np.pi, np.pi) + 1e-15
    lm = np.full(r.size, -np.inf)
    ph = np.zeros(r.size)
    if use_exp.any():
        part = _exponential_part(params, lam[use_exp])
        lm[use_exp] = part.log_mag
        ph[use_exp] = part.phase
    exp_val = LogComplex(lm, ph)

    # algebraic part, truncated before its terms start growing
    tl, ts = _tail_coefficients(params)
    ks = np.arange(1, _TAIL_TERMS + 1) + params.m
    with np.errstate(invalid="ignore"):
        lt = tl[None, :] - ks[None, :] * logr[:, None]
    lt = np.where(np.isnan(lt), -np.inf, lt)
    ph = -ks[None, :] * theta[:, None] + np.where(ts < 0, np.pi, 0.0)[None, :]
    finite = np.isfinite(lt)
    masked = np.where(finite, lt, np.inf)
    run_min = np.minimum.accumulate(masked, axis=1)
    prev_min = np.concatenate([np.full((r.size, 1), np.inf), run_min[:, :-1]], axis=1)
    growing = finite & (lt > prev_min)
    first_grow = np.where(growing.any(axis=1), growing.argmax(axis=1), _TAIL_TERMS)
    include = np.arange(_TAIL_TERMS)[None, :] < first_grow[:, None]
    include &= finite
    top = np.max(np.where(include, lt, -np.inf), axis=1)
    safe_top = np.where(np.isfinite(top), top, 0.0)
    ncol = int(first_grow.max()) if r.size else 0
    expo = np.where(include[:, :ncol], lt[:, :ncol] - safe_top[:, None], -np.inf)
    tsum = (np.exp(expo) * np.exp(1j * ph[:, :ncol])).sum(axis=1)
    with np.errstate(divide="ignore"):
        tail_val = LogComplex(np.log(np.abs(tsum)) + safe_top, np.angle(tsum))
    # error proxy: the smallest retained term (first omitted one is comparable)
    omitted = np.where(first_grow < _TAIL_TERMS, np.min(masked, axis=1), -np.inf)
    last_inc = np.min(np.where(include, lt, np.inf), axis=1)
    tail_err = np.where(first_grow < _TAIL_TERMS, last_inc, omitted)
    tail_err = np.where(np.isfinite(tail_err), tail_err, -np.inf)

    value = log_add(exp_val, tail_val)
    scale = np.maximum(np.asarray(exp_val.log_mag), np.asarray(tail_val.log_mag))
    with np.errstate(invalid="ignore"):
        round_err = scale + math.log(8 * EPS) + np.log1p(np.abs(np.where(
            np.isfinite(exp_val.log_mag), exp_val.log_mag, 0.0)))
    log_err = np.logaddexp(tail_err, round_err)
    # exponential switching across the Stokes line is not resolved; its size
    # there bounds what the truncated expansion can get right
    pre = np.full(r.size, -np.inf)
    for coef, expo in exponential_part_coefficients(params):
        pre = np.logaddexp(pre, math.log(abs(coef)) + expo * logr)
    stokes_err = pre - np.exp(logr / a)
    if not (a == 1.0 and float(params.b).is_integer()):
        # for a = 1 and integer b the tail terminates and the form is exact
        log_err = np.logaddexp(log_err, stokes_err)
    return _AsymOut(value, log_err, use_exp)


def asymptotic_regime(params: MLParams, lam: ArrayLike):
    """``"exponential"`` inside ``|arg lambda| < a 3pi/4``, else ``"algebraic-decay"``."""
    theta = np.abs(np.angle(np.asarray(lam, dtype=complex)))
    out = np.where(theta < params.a * 0.75 * np.pi, "exponential", "algebraic-decay")
    return str(out) if out.ndim == 0 else out


def ml_asymptotic(params: MLParams, lam: ArrayLike) -> LogComplex:
    """Large-argument expansion of :math:`E^{(m)}_{a,b}(\\lambda)`.

    Meaningful for ``|lambda|`` beyond :func:`crossover_radius`; in the
    algebraic-decay regime only the ``O(lambda^{-1-m})`` sum is significant.
    """
    shape = np.shape(lam)
    return _shape_like(_asymptotic(params, lam).value, shape)


# -- contour integral ------------------------------------------------------

# E^{(m)}_{a,b}(z) = residue + m!/(2 pi i) int_G e^s s^{a-b} / (s^a - z)^{m+1} ds
# on the parabola s(u) = mu (1 + iu)^2; the residue at s0 = z^{1/a} is the
# exponential part and is added only when the contour passes left of s0.
_CONTOUR_L = 38.0
_MU_MIN = 2.0
_MU_EXCLUDE_MAX = 6.0


@dataclass
class _ContourOut:
    value: LogComplex
    log_err: np.ndarray


def _contour(params: MLParams, lam: np.ndarray, chunk: int = 4096) -> _ContourOut:
    a, b, m = params.a, params.b, params.m
    lam = np.asarray(lam, dtype=complex).ravel()
    r = np.abs(lam)
    theta = np.angle(lam)
    has_pole = np.abs(theta) <= a * np.pi
    s0_abs = r ** (1.0 / a)
    half = np.cos(0.5 * theta / a)
    c2 = np.where(has_pole, s0_abs * half**2, 0.0)

    mu_excl = np.maximum(4.0 * c2, _MU_MIN)
    include = has_pole & (mu_excl > _MU_EXCLUDE_MAX)
    mu = np.where(include, c2 / 4.0, mu_excl)
    re_w = np.sqrt(np.where(has_pole, s0_abs, 0.0) / mu) * np.maximum(half, 0.0)
    d_up = np.where(include, 1.0, np.minimum(1.0, 1.0 - re_w))
    h = 2 * np.pi * d_up / (_CONTOUR_L + 4.0 * mu)
    U = np.sqrt(1.0 + (_CONTOUR_L + 10.0) / mu)
    nside = np.ceil(U / h).astype(int)

    log_mag = np.empty(lam.size)
    phase = np.empty(lam.size)
    log_err = np.empty(lam.size)
    order = np.argsort(nside)
    fact = math.factorial(m)
    for start in range(0, lam.size, chunk):
        sel = order[start : start + chunk]
        n_max = int(nside[sel].max())
        k = np.arange(-n_max, n_max + 1)
        u = k[None, :] * h[sel, None]
        live = np.abs(k)[None, :] <= nside[sel, None]
        s = mu[sel, None] * (1.0 + 1j * u) ** 2
        log_s = np.log(s)
        sa = np.exp(a * log_s)
        integrand = np.exp(s + (a - b) * log_s) / (sa - lam[sel, None]) ** (m + 1)
        integrand = np.where(live, integrand * (1.0 + 1j * u), 0.0)
        w = fact * mu[sel] * h[sel] / np.pi
        total = w * integrand.sum(axis=1)
        coarse = 2 * w * np.where((k % 2 == 0)[None, :], integrand, 0.0).sum(axis=1)
        size = w * np.abs(integrand).sum(axis=1)
        disc = np.abs(total - coarse)
        with np.errstate(divide="ignore", invalid="ignore"):
            rel_disc = np.where(np.abs(total) > 0, disc / np.abs(total), 1.0)
        disc = disc * np.minimum(1.0, rel_disc)
        err = disc + 16 * EPS * size
        val = LogComplex.from_complex(total)
        log_mag[sel] = val.log_mag
        phase[sel] = val.phase
        with np.errstate(divide="ignore"):
            log_err[sel] = np.log(err)

    value = LogComplex(log_mag, phase)
    if include.any():
        res = _exponential_part(params, lam[include])
        inc = LogComplex(np.asarray(value.log_mag)[include], np.asarray(value.phase)[include])
        merged = log_add(inc, res)
        lm = np.asarray(value.log_mag).copy()
        ph = np.asarray(value.phase).copy()
        lm[include] = merged.log_mag
        ph[include] = merged.phase
        round_err = np.asarray(res.log_mag) + math.log(8 * EPS)
        log_err[include] = np.logaddexp(log_err[include], round_err)
        value = LogComplex(lm, ph)
    return _ContourOut(value, log_err)


def ml_contour(params: MLParams, lam: ArrayLike) -> LogComplex:
    """:math:`E^{(m)}_{a,b}(\\lambda)` by trapezoidal Laplace inversion on a parabolic contour.

    Accurate in the moderate-``|lambda|`` wedge where the power series suffers
    cancellation and the asymptotic sum is not yet sharp.
    """
    shape = np.shape(lam)
    return _shape_like(_contour(params, lam).value, shape)


# -- dispatcher ------------------------------------------------------------


@dataclass
class MLEvaluation:
    value: LogComplex
    branch: np.ndarray | str
    rel_err: np.ndarray | float
    warnings: list[str]


# series results with a worse estimated relative error than this are
# compared against the asymptotic branch
_SWITCH_TOL = 1e-13
_WARN_TOL = 1e-8
_SECTOR_WINDOW = 0.02
# predicted log condition number above which the series is not attempted
_HOPELESS = math.log(1e7)


def ml_eval_detailed(
    params: MLParams, lam: ArrayLike, radius: float | None = None
) -> MLEvaluation:
    shape = np.shape(lam)
    lam = np.asarray(lam, dtype=complex).ravel()
    R = crossover_radius(params) if radius is None else radius
    r = np.abs(lam)

    log_mag = np.empty(lam.size)
    phase = np.empty(lam.size)
    branch = np.full(lam.size, SERIES, dtype=object)
    rel = np.zeros(lam.size)
    warn: set[str] = set()

    near = r < R
    far = ~near
    cand = np.flatnonzero(near & (r > 0))
    # skip the series where cancellation is predicted to be hopeless:
    # sum |t_k| is about E(|lambda|), the sum itself about the expansion at lambda
    lr = np.log(np.maximum(r[cand], 1e-300))
    pred_abs = np.zeros(cand.size)
    for coef, expo in exponential_part_coefficients(params):
        pred_abs = np.logaddexp(
            pred_abs, math.log(abs(coef)) + expo * lr + r[cand] ** (1 / params.a)
        )
    # small sums are cheap to attempt; their own condition estimate decides below
    hopeless = np.zeros(cand.size, bool)
    big = pred_abs > _HOPELESS
    if big.any():
        pred_val = np.asarray(_asymptotic(params, lam[cand[big]]).value.log_mag)
        hopeless[big] = pred_abs[big] - pred_val > _HOPELESS
    run = np.sort(np.concatenate([cand[~hopeless], np.flatnonzero(near & (r == 0))]))
    shaky = cand[hopeless]
    rel[shaky] = np.inf

    if run.size:
        ser = _series(params, lam[run], 1e-16)
        with np.errstate(invalid="ignore"):
            rel_s = np.exp(ser.log_abs_sum - ser.value.log_mag) * EPS * (
                4.0 + np.abs(ser.log_max_term)
            )
        rel_s = np.where(np.isfinite(rel_s), rel_s, np.inf)
        log_mag[run] = ser.value.log_mag
        phase[run] = ser.value.phase
        rel[run] = rel_s
        shaky = np.concatenate([shaky, run[(rel_s > _SWITCH_TOL) & (r[run] > 0)]])

    if shaky.size:
        asy = _asymptotic(params, lam[shaky])
        con = _contour(params, lam[shaky])
        with np.errstate(invalid="ignore"):
            rel_a = np.exp(asy.log_err - asy.value.log_mag)
            rel_c = np.exp(con.log_err - con.value.log_mag)
        for alt, rel_alt, name in ((asy, rel_a, ASYMPTOTIC), (con, rel_c, CONTOUR)):
            rel_alt = np.where(np.isfinite(rel_alt), rel_alt, np.inf)
            better = rel_alt < rel[shaky]
            pick = shaky[better]
            if pick.size:
                log_mag[pick] = np.asarray(alt.value.log_mag)[better]
                phase[pick] = np.asarray(alt.value.phase)[better]
                rel[pick] = rel_alt[better]
                branch[pick] = name
                warn.add(_WARN_CANCELLATION)

    if far.any():
        asy = _asymptotic(params, lam[far])
        log_mag[far] = asy.value.log_mag
        phase[far] = asy.value.phase
        with np.errstate(invalid="ignore"):
            rel[far] = np.exp(asy.log_err - asy.value.log_mag)
        branch[far] = ASYMPTOTIC
        edge = np.abs(np.abs(np.angle(lam[far])) - 0.75 * params.a * np.pi)
        if np.any(edge < _SECTOR_WINDOW):
            warn.add(_WARN_SECTOR)
    if np.any(rel > _WARN_TOL):
        warn.add(_WARN_PRECISION)

    value = _shape_like(LogComplex(log_mag, phase), shape)
    if shape == ():
        return MLEvaluation(value, str(branch[0]), float(rel[0]), sorted(warn))
    return MLEvaluation(value, branch.reshape(shape), rel.reshape(shape), sorted(warn))


def ml_eval(params: MLParams, lam: ArrayLike, radius: float | None = None) -> LogComplex:
    """Hybrid evaluation of :math:`E^{(m)}_{a,b}(\\lambda)` in log-polar form."""
    return ml_eval_detailed(params, lam, radius).value
