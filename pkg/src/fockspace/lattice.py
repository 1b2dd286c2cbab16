r"""Coverings of C by balls of radius :math:`\tau_r(z) = r(1+|z|)^{1-\ell}` and the
random-sign harness that exhibits failing embeddings.

The covering is built from concentric rings. A ring of ``M`` equally spaced
centers at radius ``rho`` with ball radius ``t`` covers exactly the band
``rho cos(pi/M) +- sqrt(t^2 - rho^2 sin^2(pi/M))`` (the worst points lie on the
bisectors between neighbours), so rings are stacked until the bands reach
``R_max``. Coverage and overlap are then audited on probe grids.

The harness forms :math:`\Phi_t = \sum_k \epsilon_k K_\beta(\cdot, z_k) /
\|K_\beta(\cdot, z_k)\|_{F^p_{\beta,\rho}}` with seeded signs and measures its
:math:`F^q_{\beta,\eta}` norm against :math:`\|\{1\}\|_{\ell^p} = N^{1/p}`.
Kernel bumps are local: with :math:`a = |z|^\ell`, :math:`b = |w|^\ell` and
:math:`\varphi = \arg(z\bar w)`,
:math:`|K_\beta(z,w)| e^{-\beta(|z|^{2\ell}+|w|^{2\ell})/2}` is at most a
polynomial factor times :math:`e^{-\beta D^2/2}`,
:math:`D^2 = a^2 + b^2 - 2ab\,c(\ell\varphi)` with :math:`c = \cos` inside the
growth sector :math:`|\ell\varphi| < \pi/2` and ``0`` outside. Pairs with
:math:`\beta D^2/2` above a cutoff are dropped, and the integral is a fixed
polar product rule whose spacing follows the bump width.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from .decide import EmbeddingQuery, ExtExponent, embed_decide
from .exceptions import DomainError, SectorViolation
from .kernel import FockParams, Sector, h_alpha
from .normcheck import NormQuery, SpaceParams, exponent_value, kernel_log_norm
from .quad import QuadSpec

# nodes of a 6-point Gauss-Legendre rule on [0, 1]
_GL_X, _GL_W = np.polynomial.legendre.leggauss(6)
_GL_X = 0.5 * (_GL_X + 1)
_GL_W = 0.5 * _GL_W


@dataclass(frozen=True)
class RadiusFunction:
    r: float
    ell: float = 1.0

    def __post_init__(self):
        if not self.r > 0:
            raise DomainError(f"r must be positive, got {self.r}")
        if not self.ell >= 1:
            raise DomainError(f"ell must be >= 1, got {self.ell}")

    def __call__(self, z):
        return self.r * (1 + np.abs(z)) ** (1 - self.ell)


# -- coverings ----------------------------------------------------------------------


@dataclass
class Covering:
    centers: np.ndarray
    radius_function: RadiusFunction
    R_max: float
    ring_radii: np.ndarray
    ring_sizes: np.ndarray
    ring_phases: np.ndarray
    max_overlap: int = 0
    coverage: float = math.nan
    _tree: cKDTree | None = field(default=None, repr=False)

    @property
    def r(self) -> float:
        return self.radius_function.r

    @property
    def radii(self) -> np.ndarray:
        return self.radius_function(self.centers)

    def __len__(self) -> int:
        return self.centers.size

    @property
    def tree(self) -> cKDTree:
        if self._tree is None:
            self._tree = cKDTree(np.column_stack([self.centers.real, self.centers.imag]))
        return self._tree

    def counts(self, points) -> np.ndarray:
        """Number of balls containing each point."""
        pts = np.asarray(points, dtype=complex).ravel()
        xy = np.column_stack([pts.real, pts.imag])
        # a ball containing p has its center beyond |p| - r, where tau is smaller
        reach = self.radius_function(np.maximum(np.abs(pts) - self.r, 0))
        lists = self.tree.query_ball_point(xy, reach)
        tau = self.radii
        idx = np.repeat(np.arange(pts.size), [len(l) for l in lists])
        cen = np.fromiter((k for l in lists for k in l), dtype=np.intp, count=idx.size)
        inside = np.abs(pts[idx] - self.centers[cen]) < tau[cen]
        return np.bincount(idx[inside], minlength=pts.size)


def _ring_band(rho: float, t: float, M: int) -> tuple[float, float]:
    s, c = math.sin(math.pi / M), math.cos(math.pi / M)
    h2 = t * t - (rho * s) ** 2
    if h2 <= 0:
        return math.inf, -math.inf
    h = math.sqrt(h2)
    return rho * c - h, rho * c + h


def _ring_count(rho: float, t: float, spacing: float) -> int:
    return max(3, math.ceil(2 * math.pi * rho / (spacing * t)))


def build_covering(rf: RadiusFunction, R_max: float, spacing: float = 1.0,
                   probe_points: int = 10_000) -> Covering:
    """Greedy ring covering of ``D(0, R_max)``, audited on a probe grid.

    ``spacing`` is the arc step between neighbours in units of the local ball
    radius; it must lie in (0, 2).
    """
    if not R_max > 0:
        raise DomainError(f"R_max must be positive, got {R_max}")
    if not 0 < spacing < 2:
        raise DomainError("spacing must lie in (0, 2)")
    centers = [np.zeros(1, complex)]
    rings, sizes, phases = [0.0], [1], [0.0]
    covered = rf.r * (1 - 1e-12)
    while covered < R_max:
        step = 0.8 * float(rf(covered))
        while True:
            rho = covered + step
            t = float(rf(rho))
            M = _ring_count(rho, t, spacing)
            lo, hi = _ring_band(rho, t, M)
            if lo <= covered and hi > covered:
                break
            step *= 0.5
            if step < 1e-12:
                raise DomainError("ring construction stalled")
        # stagger alternate rings to reduce overlap
        phase = 0.5 * (len(rings) % 2) * 2 * math.pi / M
        centers.append(rho * np.exp(1j * (2 * math.pi * np.arange(M) / M + phase)))
        rings.append(rho)
        sizes.append(M)
        phases.append(phase)
        covered = hi
    cov = Covering(np.concatenate(centers), rf, float(R_max), np.array(rings),
                   np.array(sizes), np.array(phases))
    if probe_points:
        audit = coverage_audit(cov, probe_points)
        cov.coverage, cov.max_overlap = audit
    return cov


def probe_grid(R_max: float, n_points: int = 10_000) -> np.ndarray:
    """Square grid restricted to the closed disk, with at least ``n_points`` points."""
    side = math.ceil(math.sqrt(4 * n_points / math.pi)) + 1
    while True:
        x = np.linspace(-R_max, R_max, side)
        z = (x[:, None] + 1j * x[None, :]).ravel()
        z = z[np.abs(z) <= R_max]
        if z.size >= n_points:
            return z
        side += 2


def coverage_audit(cov: Covering, n_points: int = 10_000) -> tuple[float, int]:
    """(fraction of probe points covered, largest number of balls at a probe point)."""
    counts = cov.counts(probe_grid(cov.R_max, n_points))
    return float(np.mean(counts >= 1)), int(counts.max())


def overlap_audit(rf: RadiusFunction, sizes: Sequence[float] = (3, 5, 7, 10),
                  n_points: int = 10_000) -> list[dict]:
    rows = []
    for R in sizes:
        cov = build_covering(rf, R, probe_points=n_points)
        rows.append({"R_max": float(R), "centers": len(cov), "coverage": cov.coverage,
                     "max_overlap": cov.max_overlap})
    return rows


def radius_property_ratio(rf: RadiusFunction, z, n_angles: int = 64) -> np.ndarray:
    """Per ``z``, max of ``(1+|z|)/(1+|w|)`` and its inverse over ``w`` on ``dB_{tau(z)}(z)``.

    The extremes over the closed ball are attained on its boundary.
    """
    z = np.asarray(z, dtype=complex).ravel()
    t = rf(z)
    w = z[:, None] + t[:, None] * np.exp(2j * np.pi * np.arange(n_angles) / n_angles)[None, :]
    # include the radial extremes exactly
    u = np.where(z == 0, 1.0, z / np.where(z == 0, 1, np.abs(z)))
    w = np.concatenate([w, (z + t * u)[:, None], (z - t * u)[:, None]], axis=1)
    a = (1 + np.abs(z))[:, None]
    b = 1 + np.abs(w)
    return np.maximum(a / b, b / a).max(axis=1)


# -- subharmonic estimate --------------------------------------------------------------


def subharmonic_estimate_check(fp: FockParams, rf: RadiusFunction, z_grid,
                               sector: Sector | None = None, n_samples: int = 64,
                               seed: int = 0, boundary: bool = False) -> np.ndarray:
    r"""``|K(z,w)| e^{-(a/2)(|w|^{2l} + |z|^{2l})} / (1+|z|)^{2(l-1)}`` for ``w`` in ``B_{tau(z)}(z)``.

    Returns an array ``(len(z_grid), n_samples)``. ``w`` is uniform in the
    ball (seeded) or on its boundary. Raises :class:`SectorViolation` unless
    every ``z conj(w)`` lies in ``sector``.
    """
    if fp.n != 1:
        raise DomainError("subharmonic estimate check is implemented for n = 1")
    if rf.ell != fp.ell:
        raise DomainError("radius function and space must share ell")
    sector = sector or Sector(ell=fp.ell)
    z = np.asarray(z_grid, dtype=complex).ravel()
    rng = np.random.default_rng(seed)
    th = rng.uniform(0, 2 * np.pi, (z.size, n_samples))
    rad = np.ones_like(th) if boundary else np.sqrt(rng.uniform(0, 1, th.shape))
    w = z[:, None] + rf(z)[:, None] * rad * np.exp(1j * th)
    lam = z[:, None] * np.conj(w)
    if not np.all(sector.contains(lam)):
        raise SectorViolation("r too large: z conj(w) leaves the sector for some w in the ball")
    a, ell = fp.alpha, fp.ell
    lv = (np.asarray(h_alpha(fp, lam).log_mag)
          - 0.5 * a * (np.abs(w) ** (2 * ell) + np.abs(z[:, None]) ** (2 * ell))
          - 2 * (ell - 1) * np.log1p(np.abs(z[:, None])))
    return np.exp(lv)


# -- random sign harness ----------------------------------------------------------------


def bump_width(beta: float, ell: float, rho) -> np.ndarray:
    """Width of a normalized kernel bump centred at radius ``rho``."""
    return 1.0 / (math.sqrt(beta) * ell * (1 + np.asarray(rho, float)) ** (ell - 1))


def polar_product_grid(beta: float, ell: float, R_out: float,
                       density: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and ``dA`` weights (unit disk mass one) following the bump width.

    Radial 6-point Gauss panels two widths wide (``density`` scales the
    panel count), and at each radius a trapezoid ring with node spacing one
    width.
    """
    # s(rho) = sqrt(beta) ((1+rho)^ell - 1) makes the width constant
    sb = math.sqrt(beta)
    s_out = sb * ((1 + R_out) ** ell - 1)
    n_pan = max(4, math.ceil(density * s_out / 2))
    s_edges = np.linspace(0, s_out, n_pan + 1)
    rho_edges = (1 + s_edges / sb) ** (1 / ell) - 1
    lo, hi = rho_edges[:-1], rho_edges[1:]
    rho = (lo[:, None] + (hi - lo)[:, None] * _GL_X[None, :]).ravel()
    w_rho = ((hi - lo)[:, None] * _GL_W[None, :]).ravel()
    widths = bump_width(beta, ell, rho)
    M = np.maximum(16, np.ceil(2 * np.pi * rho / (widths / density)).astype(int))
    M += M % 2
    nodes, weights = [], []
    for r, wr, m in zip(rho, w_rho, M):
        th = 2 * np.pi * np.arange(m) / m
        nodes.append(r * np.exp(1j * th))
        # r dr dtheta / pi with dtheta = 2 pi / m
        weights.append(np.full(m, 2 * r * wr / m))
    return np.concatenate(nodes), np.concatenate(weights)


def kernel_pairs(beta: float, ell: float, nodes: np.ndarray, cov: Covering,
                 cutoff: float = 25.0) -> tuple[np.ndarray, np.ndarray]:
    """Index pairs (node, center) with ``beta D^2 / 2 < cutoff``.

    Centers sit on rings, so per ring the admissible centers form one
    angular window around the node, which is enumerated directly.
    """
    s2 = 2 * cutoff / beta
    a = np.abs(nodes) ** ell
    theta = np.angle(nodes)
    starts = np.concatenate([[0], np.cumsum(cov.ring_sizes)[:-1]])
    out_n, out_c = [], []
    for rho, M, phase, st in zip(cov.ring_radii, cov.ring_sizes, cov.ring_phases, starts):
        b = rho**ell
        sel = np.nonzero((a - b) ** 2 < s2)[0]
        if sel.size == 0:
            continue
        aa = a[sel]
        full = aa * aa + b * b < s2
        with np.errstate(divide="ignore", invalid="ignore"):
            kap = (aa * aa + b * b - s2) / (2 * aa * b)
        half = np.where(full, np.pi, np.arccos(np.clip(kap, -1, 1)) / ell)
        step = 2 * np.pi / M
        k0 = np.ceil((theta[sel] - half - phase) / step).astype(np.int64)
        k1 = np.floor((theta[sel] + half - phase) / step).astype(np.int64)
        cnt = np.where(full | (k1 - k0 + 1 >= M), M, np.maximum(k1 - k0 + 1, 0))
        k0 = np.where(cnt == M, 0, k0)
        node_idx = np.repeat(sel, cnt)
        offs = np.arange(node_idx.size) - np.repeat(np.cumsum(cnt) - cnt, cnt)
        out_n.append(node_idx)
        out_c.append(st + (np.repeat(k0, cnt) + offs) % M)
    if not out_n:
        return np.zeros(0, np.intp), np.zeros(0, np.intp)
    return np.concatenate(out_n), np.concatenate(out_c)


@dataclass
class KhinchineResult:
    sizes: np.ndarray
    centers: np.ndarray
    ratios: np.ndarray  # (len(sizes), trials)
    slope: float
    threshold: float = 0.1

    @property
    def medians(self) -> np.ndarray:
        return np.median(self.ratios, axis=1)

    @property
    def grows(self) -> bool:
        return bool(self.slope > self.threshold)

    @property
    def verdict(self) -> str:
        return "unbounded" if self.grows else "bounded"

    def rows(self) -> list[dict]:
        out = []
        for i, R in enumerate(self.sizes):
            for t, v in enumerate(self.ratios[i]):
                out.append({"R_max": float(R), "trial": t, "ratio": float(v)})
        return out

    def to_json(self) -> dict:
        return {"trend_slope": self.slope, "verdict": self.verdict,
                "medians": [float(m) for m in self.medians],
                "sizes": [float(s) for s in self.sizes], "centers": [int(c) for c in self.centers]}


def regression_slope(sizes, values) -> float:
    """Least-squares slope of log(values) against log(sizes)."""
    return float(np.polyfit(np.log(np.asarray(sizes, float)),
                            np.log(np.asarray(values, float)), 1)[0])


class _NormCache:
    """Kernel norms ``||K_beta(., z)||_{F^p_{beta,rho}}`` by ``|z|`` (rings share radii)."""

    def __init__(self, beta: float, ell: float, p, rho: float, spec: QuadSpec):
        self.fp = FockParams(1, ell, beta)
        self.space = SpaceParams(1, ell, beta, rho)
        self.p, self.spec = p, spec
        self.cache: dict[float, float] = {}

    def __call__(self, radii: np.ndarray) -> np.ndarray:
        keys = np.round(np.asarray(radii, float), 12)
        uniq, inv = np.unique(keys, return_inverse=True)
        vals = np.empty(uniq.size)
        for i, r in enumerate(uniq):
            r = float(r)
            if r not in self.cache:
                self.cache[r] = kernel_log_norm(NormQuery(self.fp, self.space, self.p, r), self.spec)
            vals[i] = self.cache[r]
        return vals[inv]


def random_sum_norms(cov: Covering, signs: np.ndarray, log_norm: np.ndarray, beta: float,
                     ell: float, q: float, eta: float, density: float = 1.0,
                     cutoff: float = 25.0, chunk: int = 20_000) -> np.ndarray:
    """``||sum_k signs[k, t] K_beta(., z_k) e^{-log_norm[k]}||_{F^q_{beta,eta}}`` for each column ``t``."""
    fp = FockParams(1, ell, beta)
    signs = np.asarray(signs, float).reshape(len(cov), -1)
    s0 = math.sqrt(2 * cutoff / beta)
    R_out = (float(np.abs(cov.centers).max()) ** ell + s0) ** (1 / ell) + 0.5
    nodes, weights = polar_product_grid(beta, ell, R_out, density)
    acc = np.zeros(signs.shape[1])
    for lo in range(0, nodes.size, chunk):
        nd = nodes[lo:lo + chunk]
        ni, ci = kernel_pairs(beta, ell, nd, cov, cutoff)
        kv = h_alpha(fp, nd[ni] * np.conj(cov.centers[ci]))
        lz = np.abs(nd[ni])
        lv = (np.asarray(kv.log_mag) - log_norm[ci] + eta * np.log1p(lz)
              - 0.5 * beta * lz ** (2 * ell))
        amp = np.exp(lv + 1j * np.asarray(kv.phase))
        for t in range(signs.shape[1]):
            v = amp * signs[ci, t]
            phi = (np.bincount(ni, weights=v.real, minlength=nd.size)
                   + 1j * np.bincount(ni, weights=v.imag, minlength=nd.size))
            acc[t] += weights[lo:lo + chunk] @ np.abs(phi) ** q
    return acc ** (1 / q)


def origin_covering(rf: RadiusFunction) -> Covering:
    """The one-ball covering ``{0}`` of ``D(0, r)``."""
    return Covering(np.zeros(1, complex), rf, rf.r, np.zeros(1), np.ones(1, int), np.zeros(1),
                    max_overlap=1, coverage=1.0)


def single_center_ratio(beta: float, ell: float, p, q, rho: float, eta: float,
                        density: float = 1.0, spec: QuadSpec = QuadSpec()) -> tuple[float, float]:
    """(harness ratio, kernel-norm ratio) for the lone center ``z_0 = 0``.

    The second value is ``||K_beta(., 0)||_{F^q_{beta,eta}} / ||K_beta(., 0)||_{F^p_{beta,rho}}``
    from two ``normcheck`` quadratures; both numbers should agree.
    """
    cov = origin_covering(RadiusFunction(1.0, ell))
    log_norm = _NormCache(beta, ell, p, rho, spec)(np.zeros(1))
    got = random_sum_norms(cov, np.ones((1, 1)), log_norm, beta, ell, exponent_value(q), eta,
                           density)[0]
    fp = FockParams(1, ell, beta)
    num = kernel_log_norm(NormQuery(fp, SpaceParams(1, ell, beta, eta), q, 0.0), spec)
    return float(got), math.exp(num - log_norm[0])


def khinchine_ratio_experiment(
    beta: float,
    ell: float,
    p,
    q,
    rho: float,
    eta: float,
    sizes: Sequence[float] = (3, 5, 7),
    trials: int = 9,
    seed: int = 0,
    r: float = 1.0,
    density: float = 1.0,
    cutoff: float = 25.0,
    max_centers: int = 50_000,
    chunk: int = 20_000,
    spec: QuadSpec = QuadSpec(),
    threshold: float = 0.1,
) -> KhinchineResult:
    r"""Median of ``||Phi_t||_{F^q_{beta,eta}} / ||{c_k}||_{l^p}`` with ``c_k = 1``, per size.

    ``Phi_t = sum_k eps_k K_beta(., z_k) / ||K_beta(., z_k)||_{F^p_{beta,rho}}``
    with i.i.d. seeded signs over the covering of ``D(0, R_max)``. The
    verdict is the regression slope of log median against log ``R_max``.
    """
    pv, qv = exponent_value(p), exponent_value(q)
    if math.isinf(pv) or math.isinf(qv) or not qv < pv:
        raise DomainError("the harness needs finite exponents with q < p")
    if trials < 1:
        raise DomainError("trials must be positive")
    rf = RadiusFunction(r, ell)
    norms = _NormCache(beta, ell, p, rho, spec)
    rng = np.random.default_rng(seed)
    ratios, counts = [], []
    for R in sizes:
        cov = build_covering(rf, float(R), probe_points=0)
        N = len(cov)
        if N > max_centers:
            raise DomainError(f"covering of radius {R} has {N} centers, above max_centers={max_centers}")
        signs = rng.choice([-1.0, 1.0], size=(N, trials))
        log_norm = norms(np.abs(cov.centers))
        fq = random_sum_norms(cov, signs, log_norm, beta, ell, qv, eta, density, cutoff, chunk)
        ratios.append(fq / N ** (1 / pv))
        counts.append(N)
    ratios = np.array(ratios)
    sizes_a = np.asarray(sizes, float)
    slope = regression_slope(sizes_a, np.median(ratios, axis=1)) if len(sizes) > 1 else math.nan
    return KhinchineResult(sizes_a, np.array(counts), ratios, slope, threshold)


# -- single-kernel necessity ------------------------------------------------------------


@dataclass
class KernelRatioSweep:
    radii: np.ndarray
    log_ratio: np.ndarray
    embeds: bool

    @property
    def ratio(self) -> np.ndarray:
        return np.exp(self.log_ratio)

    @property
    def step_factors(self) -> np.ndarray:
        return np.exp(np.diff(self.log_ratio))

    @property
    def band(self) -> float:
        return float(np.exp(self.log_ratio.max() - self.log_ratio.min()))


def kernel_ratio_sweep(n: int, ell: float, p, q, beta: float, gamma: float, rho: float,
                       eta: float, radii: Sequence[float], alpha: float | None = None,
                       spec: QuadSpec = QuadSpec()) -> KernelRatioSweep:
    r"""``||K_alpha(., z)||_{F^q_{gamma,eta}} / ||K_alpha(., z)||_{F^p_{beta,rho}}`` along ``|z|``.

    ``alpha`` defaults to ``beta``. ``embeds`` records the exact decision for
    the same parameters.
    """
    alpha = beta if alpha is None else alpha
    fp = FockParams(n, ell, alpha)
    num_space = SpaceParams(n, ell, gamma, eta)
    den_space = SpaceParams(n, ell, beta, rho)
    radii = np.asarray(radii, float)
    out = []
    for r in radii:
        z = np.zeros(n, complex)
        z[0] = r
        num = kernel_log_norm(NormQuery(fp, num_space, q, z), spec)
        den = kernel_log_norm(NormQuery(fp, den_space, p, z), spec)
        out.append(num - den)
    query = EmbeddingQuery(n=n, ell=_exact(ell), p=ExtExponent.parse(_exponent_text(p)),
                           q=ExtExponent.parse(_exponent_text(q)), beta=_exact(beta),
                           gamma=_exact(gamma), rho=_exact(rho), eta=_exact(eta))
    return KernelRatioSweep(radii, np.array(out), embed_decide(query))


def _exact(x):
    from .decide import as_fraction

    return as_fraction(x)


def _exponent_text(p) -> str:
    if isinstance(p, str):
        return p
    return "inf" if math.isinf(float(p)) else str(p)
