r"""Weighted quadrature over the plane and the lemma oracles built on it.

Integrals over :math:`\mathbb C` use the measure normalized so that the unit
disk has mass one, :math:`dA = dx\,dy/\pi`. They are done in polar
coordinates about a chosen center: adaptive Gauss-Kronrod (7/15) panels in
the radius and a periodic trapezoid rule in the angle, the latter doubled
until the even-node sub-rule agrees.

Integrands are supplied in log-polar form so that factors such as
:math:`e^{\alpha|w|^{2\ell}}` never overflow; every integrand component
carries its own running scale and results come back the same way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .exceptions import DomainError, ToleranceNotMet
from .mittag import LogComplex

# Gauss-Kronrod 7/15 on [-1, 1]
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
# 15 nodes ordered from -1 to 1, with matching weights
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KW = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GW = np.zeros(15)
_gauss_pos = [1, 3, 5, 7]
for _i, _w in zip(_gauss_pos, _WG):
    _GW[_i] = _w
    _GW[14 - _i] = _w



@dataclass(frozen=True)
class QuadSpec:
    """Quadrature configuration.

    ``radial_nodes`` sets the initial number of radial nodes (15 per panel),
    ``angular_nodes`` the initial even trapezoid count, ``truncation_factor``
    how far below its peak the integrand must fall before the radius is
    cut off, and ``max_refinements`` bounds both the number of panel
    bisection rounds and the angular doublings.
    """

    radial_nodes: int = 120
    angular_nodes: int = 32
    truncation_factor: float = 46.0
    rel_tol: float = 1e-10
    max_refinements: int = 40
    max_angular_nodes: int = 1 << 14

    def __post_init__(self):
        if self.radial_nodes < 15:
            raise DomainError("radial_nodes must be at least 15")
        if self.angular_nodes < 2 or self.angular_nodes % 2:
            raise DomainError("angular_nodes must be a positive even integer")
        if not 0 < self.rel_tol < 1:
            raise DomainError("rel_tol must lie in (0, 1)")
        if not self.truncation_factor > 0:
            raise DomainError("truncation_factor must be positive")
        if self.max_refinements < 1:
            raise DomainError("max_refinements must be positive")

    def refined(self, factor: int = 2) -> "QuadSpec":
        """Same tolerances, ``factor`` times the initial nodes in each direction."""
        return replace(
            self,
            radial_nodes=self.radial_nodes * factor,
            angular_nodes=self.angular_nodes * factor,
        )


@dataclass
class QuadResult:
    """Integral in log-polar form with error and absolute-mass estimates (logs)."""

    value: LogComplex
    log_err: np.ndarray
    log_l1: np.ndarray
    converged: bool
    evaluations: int
    r_max: float = math.nan
    info: dict = field(default_factory=dict)

    @property
    def log_abs(self):
        return self.value.log_mag

    def to_complex(self):
        return self.value.to_complex()

    @property
    def rel_err(self):
        """Error estimate relative to the absolute mass ``int |f|``."""
        return np.exp(np.asarray(self.log_err) - np.asarray(self.log_l1))


# -- adaptive Gauss-Kronrod core --------------------------------------------

# func(x) -> (LogComplex values of shape (len(x), *tail), log|.| mass density
# of the same shape); the mass density is what error targets are relative to.
LineIntegrand = Callable[[np.ndarray], tuple]


def _safe_max(a, axis=0):
    m = np.max(a, axis=axis)
    return np.where(np.isfinite(m), m, -np.inf)


class _Scaled:
    """Running per-component scale for accumulating exponentials."""

    def __init__(self, tail):
        self.scale = np.full(tail, -np.inf)

    def absorb(self, logs):
        new = np.maximum(self.scale, _safe_max(logs, axis=0))
        with np.errstate(invalid="ignore"):
            factor = np.where(np.isfinite(self.scale), np.exp(self.scale - new), 0.0)
        self.scale = new
        return factor

    def apply(self, logs):
        s = np.where(np.isfinite(self.scale), self.scale, 0.0)
        with np.errstate(invalid="ignore"):
            return np.where(np.isfinite(logs), np.exp(logs - s), 0.0)


def adaptive_gk(
    func: LineIntegrand,
    a: float,
    b: float,
    rel_tol: float,
    init_panels: int = 8,
    max_rounds: int = 40,
    breakpoints: Sequence[float] = (),
    max_panels: int = 4096,
) -> QuadResult:
    """Globally adaptive G7K15 integration of a vector-valued log-scaled integrand.

    Convergence: summed ``|K15 - G7|`` below ``rel_tol`` times the integral
    of the mass density, for every component.
    """
    if not b > a:
        raise DomainError("integration interval must have b > a")
    edges = np.linspace(a, b, init_panels + 1)
    edges = np.unique(np.concatenate([edges, [x for x in breakpoints if a < x < b]]))
    lo, hi = edges[:-1], edges[1:]

    scale = None
    kron = gauss = mass = None  # (panels, *tail), complex/complex/real at `scale`
    p_lo = np.empty(0)
    p_hi = np.empty(0)
    evaluations = 0
    converged = False
    for _ in range(max_rounds + 1):
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        x = (mid[:, None] + half[:, None] * _NODES[None, :]).ravel()
        vals, log_abs = func(x)
        evaluations += x.size
        lv = np.asarray(vals.log_mag)
        tail = lv.shape[1:]
        lv = lv.reshape((lo.size, 15) + tail)
        ph = np.asarray(vals.phase).reshape(lv.shape)
        la = np.asarray(log_abs).reshape(lv.shape)
        if scale is None:
            scale = _Scaled(tail)
            kron = np.zeros((0,) + tail, complex)
            gauss = np.zeros((0,) + tail, complex)
            mass = np.zeros((0,) + tail)
        factor = scale.absorb(np.concatenate([lv, la], axis=1).reshape((-1,) + tail))
        kron = kron * factor
        gauss = gauss * factor
        mass = mass * factor
        ev = scale.apply(lv) * np.exp(1j * ph)
        ea = scale.apply(la)
        shape_w = (1, 15) + (1,) * len(tail)
        hw = half.reshape((-1,) + (1,) * len(tail))
        k_new = hw * np.sum(ev * _KW.reshape(shape_w), axis=1)
        g_new = hw * np.sum(ev * _GW.reshape(shape_w), axis=1)
        m_new = hw * np.sum(ea * _KW.reshape(shape_w), axis=1)

        kron = np.concatenate([kron, k_new])
        gauss = np.concatenate([gauss, g_new])
        mass = np.concatenate([mass, m_new])
        p_lo = np.concatenate([p_lo, lo])
        p_hi = np.concatenate([p_hi, hi])

        err_p = np.abs(kron - gauss)
        total_mass = mass.sum(axis=0)
        target = rel_tol * total_mass
        tot_err = err_p.sum(axis=0)
        with np.errstate(invalid="ignore", divide="ignore"):
            score = err_p / np.where(target > 0, target, np.inf)
        score = score.reshape(score.shape[0], -1).max(axis=1) if tail else score
        if np.all(tot_err <= target):
            converged = True
            break
        if p_lo.size >= max_panels:
            break
        # bisect the worst panels (at least one, at most half of them)
        order = np.argsort(score)[::-1]
        worst = score[order[0]]
        n_split = max(1, int(np.sum(score >= 0.25 * worst)))
        n_split = min(n_split, max(1, p_lo.size // 2) if p_lo.size > 8 else p_lo.size)
        split = order[:n_split]
        keep = np.ones(p_lo.size, bool)
        keep[split] = False
        s_lo, s_hi = p_lo[split], p_hi[split]
        smid = 0.5 * (s_lo + s_hi)
        lo = np.concatenate([s_lo, smid])
        hi = np.concatenate([smid, s_hi])
        kron, gauss, mass = kron[keep], gauss[keep], mass[keep]
        p_lo, p_hi = p_lo[keep], p_hi[keep]

    total = kron.sum(axis=0)
    s = np.where(np.isfinite(scale.scale), scale.scale, -np.inf)
    with np.errstate(divide="ignore"):
        value = LogComplex(np.log(np.abs(total)) + s, np.angle(total))
        log_err = np.log(np.abs(kron - gauss).sum(axis=0)) + s
        log_l1 = np.log(mass.sum(axis=0)) + s
    return QuadResult(value, log_err, log_l1, converged, evaluations, r_max=b,
                      info={"panels": int(p_lo.size)})


# -- plane integrals ------------------------------------------------------

# evaluator(w) -> LogComplex with shape w.shape + tail
PlaneIntegrand = Callable[[np.ndarray], LogComplex]


def _angle_map(phi, eps):
    """Periodic map clustering nodes at ``theta = 0``; ``eps = 1`` is the identity.

    ``theta = 2 atan2(eps sin(phi/2), cos(phi/2))`` is analytic and periodic, so
    the trapezoid rule in ``phi`` keeps its spectral accuracy.
    """
    c, s = np.cos(0.5 * phi), np.sin(0.5 * phi)
    e = eps[:, None]
    theta = 2 * np.arctan2(e * s, c)
    log_jac = np.log(e) - np.log(c * c + e * e * s * s)
    return theta, log_jac


def _angular(evaluator, center, r, n_ang, rel_tol, max_nodes, eps=None):
    """Trapezoid in the angle at each radius, doubled until the sub-rule agrees.

    Each radius is refined on its own. ``eps`` (one value per radius, at most 1)
    clusters the nodes around ``theta = 0`` for integrands peaked there.
    Returns (LogComplex integral over theta of f * r / pi, log of |f| mass,
    largest node count used).
    """
    r = np.asarray(r, dtype=float)
    eps = np.ones(r.size) if eps is None else np.clip(np.asarray(eps, float), 1e-8, 1.0)

    def sample(rows, phi):
        theta, lj = _angle_map(phi, eps[rows])
        v = evaluator(center + r[rows][:, None] * np.exp(1j * theta))
        lv = np.asarray(v.log_mag)
        lj = lj.reshape(lj.shape + (1,) * (lv.ndim - 2))
        return lv + lj, np.asarray(v.phase)

    rows = np.arange(r.size)
    lv, ph = sample(rows, np.broadcast_to(2 * np.pi * np.arange(n_ang) / n_ang, (r.size, n_ang)))
    tail = lv.shape[2:]
    out_m = np.empty((r.size,) + tail)
    out_full = np.empty((r.size,) + tail, complex)
    out_abs = np.empty((r.size,) + tail)
    n = n_ang
    used = n_ang
    while rows.size:
        m = _safe_max(lv, axis=1)
        m_b = np.where(np.isfinite(m), m, 0.0)[:, None]
        with np.errstate(invalid="ignore"):
            e = np.where(np.isfinite(lv), np.exp(lv - m_b), 0.0)
        z = e * np.exp(1j * ph)
        full = z.mean(axis=1)
        half = z[:, ::2].mean(axis=1)
        absm = e.mean(axis=1)
        ok = np.abs(full - half) <= 0.1 * rel_tol * absm + 1e-300
        ok = ok.reshape(ok.shape[0], -1).all(axis=1)
        if 2 * n > max_nodes:
            ok[:] = True
        done = rows[ok]
        out_m[done], out_full[done], out_abs[done] = m[ok], full[ok], absm[ok]
        if done.size:
            used = max(used, n)
        if ok.all():
            break
        # evaluate only the new midpoints of the unfinished radii
        keep = ~ok
        rows, lv, ph = rows[keep], lv[keep], ph[keep]
        mids = 2 * np.pi * (np.arange(n) + 0.5) / n
        lvm, phm = sample(rows, np.broadcast_to(mids, (rows.size, n)))
        lv2 = np.empty((rows.size, 2 * n) + tail)
        ph2 = np.empty_like(lv2)
        lv2[:, ::2], lv2[:, 1::2] = lv, lvm
        ph2[:, ::2], ph2[:, 1::2] = ph, phm
        lv, ph, n = lv2, ph2, 2 * n
    # r dr dtheta / pi, and the angular mean is dtheta / (2 pi)
    with np.errstate(divide="ignore"):
        jac = (np.log(r) + math.log(2.0)).reshape((-1,) + (1,) * len(tail))
        val = LogComplex(np.log(np.abs(out_full)) + out_m + jac, np.angle(out_full))
        mass = np.log(out_abs) + out_m + jac
    return val, mass, used


def probe_radius(
    evaluator: PlaneIntegrand,
    center: complex = 0.0,
    truncation_factor: float = 46.0,
    start: float = 1.0,
    max_radius: float = 1e4,
    n_rad: int = 96,
    n_ang: int = 128,
) -> tuple[float, float, float]:
    """Find a radius beyond which ``r |f|`` stays ``truncation_factor`` below its peak.

    Returns ``(r_max, log_peak, r_peak)``.
    """
    R = start
    theta = 2 * np.pi * np.arange(n_ang) / n_ang
    while True:
        r = np.linspace(0.0, R, n_rad + 1)[1:]
        w = center + r[:, None] * np.exp(1j * theta)[None, :]
        lv = np.asarray(evaluator(w).log_mag)
        lv = lv.reshape(lv.shape[:2] + (-1,)).max(axis=2)
        env = lv.max(axis=1) + np.log(r)
        peak = env.max()
        if not np.isfinite(peak):
            raise DomainError("integrand vanishes on the whole probe grid")
        above = np.flatnonzero(env > peak - truncation_factor)
        last = above.max()
        if last < n_rad - 1:
            # a little margin past the last significant probe
            r_max = r[min(last + 2, n_rad - 1)]
            return float(r_max), float(peak), float(r[np.argmax(env)])
        if R >= max_radius:
            raise DomainError(f"integrand does not decay within radius {max_radius}")
        R *= 1.6


def integrate_plane(
    evaluator: PlaneIntegrand,
    spec: QuadSpec = QuadSpec(),
    center: complex = 0.0,
    r_max: Optional[float] = None,
    strict: bool = False,
) -> QuadResult:
    """:math:`\\int_{\\mathbb C} f\\,dA` with ``dA`` normalized to unit disk mass one.

    ``evaluator`` maps an array of points to a :class:`LogComplex` of shape
    ``w.shape + tail`` (``tail`` for vector-valued integrands).
    """
    breaks: list[float] = []
    if r_max is None:
        r_max, _, r_peak = probe_radius(evaluator, center, spec.truncation_factor)
        breaks.append(r_peak)
    angular_used = [spec.angular_nodes]

    def radial(r):
        val, mass, n = _angular(
            evaluator, center, r, spec.angular_nodes, spec.rel_tol, spec.max_angular_nodes
        )
        angular_used.append(n)
        return val, mass

    res = adaptive_gk(
        radial,
        0.0,
        float(r_max),
        spec.rel_tol,
        init_panels=max(1, spec.radial_nodes // 15),
        max_rounds=spec.max_refinements,
        breakpoints=breaks,
    )
    res.info["angular_nodes"] = max(angular_used)
    if not res.converged and strict:
        raise ToleranceNotMet(
            f"plane quadrature did not reach rel_tol={spec.rel_tol}"
        )
    return res


def integrate_line(
    log_f: Callable[[np.ndarray], LogComplex],
    a: float,
    b: float,
    spec: QuadSpec = QuadSpec(),
    breakpoints: Sequence[float] = (),
    strict: bool = False,
) -> QuadResult:
    """Adaptive integral of a log-scaled 1-D integrand over ``[a, b]``."""

    def func(x):
        v = log_f(x)
        return v, v.log_mag

    res = adaptive_gk(
        func, a, b, spec.rel_tol,
        init_panels=max(1, spec.radial_nodes // 15),
        max_rounds=spec.max_refinements,
        breakpoints=breakpoints,
    )
    if not res.converged and strict:
        raise ToleranceNotMet(f"line quadrature did not reach rel_tol={spec.rel_tol}")
    return res


def half_line_cutoff(log_f: Callable[[np.ndarray], np.ndarray], truncation_factor=46.0,
                     start=1.0, max_radius=1e4, n=400) -> tuple[float, float]:
    """Cut-off ``r_max`` and peak location for a real log-integrand on ``[0, inf)``."""
    R = start
    while True:
        r = np.linspace(0.0, R, n + 1)[1:]
        lv = np.asarray(log_f(r), dtype=float)
        lv = lv.reshape(lv.shape[0], -1).max(axis=1)
        peak = lv.max()
        if not np.isfinite(peak):
            raise DomainError("integrand vanishes on the whole probe grid")
        last = np.flatnonzero(lv > peak - truncation_factor).max()
        if last < n - 1:
            return float(r[min(last + 2, n - 1)]), float(r[np.argmax(lv)])
        if R >= max_radius:
            raise DomainError(f"integrand does not decay within radius {max_radius}")
        R *= 1.6


def integrate_half_line(
    log_f: Callable[[np.ndarray], np.ndarray],
    spec: QuadSpec = QuadSpec(),
    strict: bool = False,
) -> QuadResult:
    """``int_0^inf exp(log_f(r)) dr`` for a positive integrand given by its log."""
    r_max, r_peak = half_line_cutoff(log_f, spec.truncation_factor)

    def wrapped(x):
        lv = np.asarray(log_f(x), dtype=float)
        return LogComplex(lv, np.zeros_like(lv))

    return integrate_line(wrapped, 0.0, r_max, spec, breakpoints=(r_peak,), strict=strict)


def from_complex_function(f: Callable[[np.ndarray], np.ndarray]) -> PlaneIntegrand:
    """Wrap an ordinary complex-valued function as a log-polar integrand."""
    return lambda w: LogComplex.from_complex(f(w))


# -- lemma oracles ------------------------------------------------------------


def lemma_est_sup_check(alpha: float, beta: float, a_grid, n_grid: int = 4001) -> np.ndarray:
    """``sup_{x>=0} (1+x)^beta e^{-alpha (x-a)^2} / (1+a)^beta`` for each ``a``.

    The supremum is taken over a dense grid containing ``x = a`` and then
    polished by a bounded scalar optimization around the best grid point.
    """
    if not alpha > 0:
        raise DomainError("alpha must be positive")
    out = []
    for a in np.asarray(a_grid, dtype=float):
        if a < 0:
            raise DomainError("a must be non-negative")

        def logf(x):
            return beta * np.log1p(x) - alpha * (x - a) ** 2

        width = 10.0 + abs(beta) / alpha + a
        xs = np.concatenate([np.linspace(0.0, a + width, n_grid), [a]])
        lv = logf(xs)
        i = int(np.argmax(lv))
        best = lv[i]
        step = (a + width) / (n_grid - 1)
        lo = max(0.0, xs[i] - 2 * step)
        hi = xs[i] + 2 * step
        if hi > lo:
            res = minimize_scalar(lambda x: -logf(x), bounds=(lo, hi), method="bounded",
                                  options={"xatol": 1e-12})
            best = max(best, -res.fun)
        out.append(math.exp(best - beta * math.log1p(a)))
    return np.array(out)


def est_cm_integral_log(a: float, b: float, ell: float, n: int, y: float,
                        spec: QuadSpec = QuadSpec()) -> float:
    """log of the integral over ``C^{n-1}`` of ``(1+y+|w|)^b e^{-a(y^2+|w|^2)^ell}``.

    Radially reduced: ``2(n-1) int_0^inf (1+y+r)^b e^{-a(y^2+r^2)^ell} r^{2n-3} dr``.
    """
    if n < 2:
        raise DomainError("the C^{n-1} integral needs n >= 2")

    def log_f(r):
        r = np.asarray(r, float)
        with np.errstate(divide="ignore"):
            return (b * np.log1p(y + r) - a * (y * y + r * r) ** ell
                    + (2 * n - 3) * np.log(r))

    res = integrate_half_line(log_f, spec)
    return float(res.log_abs) + math.log(2 * (n - 1))


def lemma_est_cm_check(a: float, b: float, ell: float, n: int, y_grid,
                       spec: QuadSpec = QuadSpec()) -> np.ndarray:
    """Ratio of the ``C^{n-1}`` integral to ``(1+y)^{b-2(n-1)(ell-1)} e^{-a y^{2 ell}}``."""
    if not a > 0:
        raise DomainError("a must be positive")
    out = []
    for y in np.asarray(y_grid, dtype=float):
        lhs = est_cm_integral_log(a, b, ell, n, y, spec)
        rhs = (b - 2 * (n - 1) * (ell - 1)) * math.log1p(y) - a * y ** (2 * ell)
        out.append(math.exp(lhs - rhs))
    return np.array(out)


def estuv_integrals_log(a: float, b: float, z: complex, spec: QuadSpec = QuadSpec()):
    """``(log I_{a,b}(z), log J_{a,b}(z))`` by plane quadrature."""
    z = complex(z)
    rz = abs(z)

    def f_i(w):
        lv = -a * np.abs(w - z) ** 2 - b * np.log1p(np.abs(w))
        return LogComplex(lv, np.zeros_like(lv))

    def f_j(w):
        lv = -a * (np.abs(w) - rz) ** 2 - b * np.log1p(np.abs(w))
        return LogComplex(lv, np.zeros_like(lv))

    i_res = integrate_plane(f_i, spec, center=z)
    j_res = integrate_plane(f_j, spec)
    return float(i_res.log_abs), float(j_res.log_abs)


def lemma_estuv_check(a: float, b: float, z_grid, spec: QuadSpec = QuadSpec()):
    """Ratios ``I (1+|z|)^b`` and ``J (1+|z|)^{b-1}`` over ``z_grid``."""
    if not a > 0:
        raise DomainError("a must be positive")
    i_rat, j_rat = [], []
    for z in np.asarray(z_grid, dtype=complex):
        li, lj = estuv_integrals_log(a, b, z, spec)
        t = math.log1p(abs(z))
        i_rat.append(math.exp(li + b * t))
        j_rat.append(math.exp(lj + (b - 1) * t))
    return np.array(i_rat), np.array(j_rat)
