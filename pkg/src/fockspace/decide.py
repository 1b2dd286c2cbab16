"""Exact decision procedures for embeddings and projection boundedness.

All parameters are held as :class:`fractions.Fraction`; the characterizations
involve strict and non-strict inequalities whose thresholds are hit exactly
by natural parameter choices, so floats are never used for comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .exceptions import DomainError

Rational = Union[int, str, Fraction]


def as_fraction(x) -> Fraction:
    """Parse ``x`` exactly: ints, Fractions, ``"a/b"`` or decimal strings.

    Floats are converted through their shortest decimal representation so
    that ``0.1`` means one tenth rather than the nearest binary double.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise DomainError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if x != x or x in (float("inf"), float("-inf")):
            raise DomainError(f"not a finite rational: {x}")
        return Fraction(repr(x))
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"cannot parse rational {x!r}") from exc
    raise DomainError(f"cannot interpret {x!r} as a rational")


@dataclass(frozen=True)
class ExtExponent:
    """An exponent in ``[1, inf]``; ``value is None`` encodes infinity."""

    value: Optional[Fraction]

    def __post_init__(self):
        if self.value is not None:
            v = as_fraction(self.value)
            if v < 1:
                raise DomainError(f"exponent must be >= 1, got {v}")
            object.__setattr__(self, "value", v)

    @classmethod
    def parse(cls, x) -> "ExtExponent":
        if isinstance(x, ExtExponent):
            return x
        if isinstance(x, str) and x.strip().lower() in ("inf", "infinity", "oo", "∞"):
            return INF
        if isinstance(x, float) and x == float("inf"):
            return INF
        return cls(as_fraction(x))

    @property
    def is_inf(self) -> bool:
        return self.value is None

    def reciprocal(self) -> Fraction:
        return Fraction(0) if self.value is None else 1 / self.value

    def conjugate(self) -> "ExtExponent":
        if self.value is None:
            return ExtExponent(Fraction(1))
        if self.value == 1:
            return INF
        return ExtExponent(self.value / (self.value - 1))

    def __lt__(self, other: "ExtExponent") -> bool:
        # compare via reciprocals: p < q  iff  1/p > 1/q
        return self.reciprocal() > other.reciprocal()

    def __le__(self, other: "ExtExponent") -> bool:
        return self.reciprocal() >= other.reciprocal()

    def __str__(self) -> str:
        return "inf" if self.value is None else str(self.value)

    def __float__(self) -> float:
        return float("inf") if self.value is None else float(self.value)


INF = ExtExponent(None)


@dataclass(frozen=True)
class EmbeddingQuery:
    """Does ``F^p_{beta,rho}`` embed in ``F^q_{gamma,eta}`` on ``C^n`` with exponent ``ell``?"""

    n: int
    ell: Fraction
    p: ExtExponent
    q: ExtExponent
    beta: Fraction
    gamma: Fraction
    rho: Fraction = Fraction(0)
    eta: Fraction = Fraction(0)

    def __post_init__(self):
        _set(self, "ell", as_fraction(self.ell))
        _set(self, "p", ExtExponent.parse(self.p))
        _set(self, "q", ExtExponent.parse(self.q))
        for name in ("beta", "gamma", "rho", "eta"):
            _set(self, name, as_fraction(getattr(self, name)))
        _check_common(self.n, self.ell)
        if self.beta <= 0 or self.gamma <= 0:
            raise DomainError("beta and gamma must be positive")


@dataclass(frozen=True)
class ProjectionQuery:
    """Is ``P_alpha`` bounded from ``L^p_{beta,rho}`` to ``L^q_{gamma,eta}``?"""

    n: int
    ell: Fraction
    p: ExtExponent
    q: ExtExponent
    alpha: Fraction
    beta: Fraction
    gamma: Fraction
    rho: Fraction = Fraction(0)
    eta: Fraction = Fraction(0)

    def __post_init__(self):
        _set(self, "ell", as_fraction(self.ell))
        _set(self, "p", ExtExponent.parse(self.p))
        _set(self, "q", ExtExponent.parse(self.q))
        for name in ("alpha", "beta", "gamma", "rho", "eta"):
            _set(self, name, as_fraction(getattr(self, name)))
        _check_common(self.n, self.ell)
        if self.alpha <= 0 or self.beta <= 0 or self.gamma <= 0:
            raise DomainError("alpha, beta and gamma must be positive")


def _set(obj, name, value):
    object.__setattr__(obj, name, value)


def _check_common(n, ell):
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise DomainError(f"dimension n must be a positive integer, got {n}")
    if ell < 1:
        raise DomainError(f"ell must be >= 1, got {ell}")


@dataclass(frozen=True)
class Decision:
    decision: bool
    branch: Optional[str]  # "1", "2", "3" or None
    kappa: Optional[Fraction] = None

    def to_json(self) -> dict:
        out = {"decision": self.decision, "branch": self.branch or "none"}
        if self.kappa is not None:
            out["kappa"] = str(self.kappa)
        return out


def embed_decision(q: EmbeddingQuery) -> Decision:
    """Decide the embedding and report which of the three conditions holds."""
    if q.beta < q.gamma:
        return Decision(True, "1")
    if q.beta > q.gamma:
        return Decision(False, None)
    gap = q.rho - q.eta
    dp, dq = q.p.reciprocal(), q.q.reciprocal()
    if q.p <= q.q:
        if 2 * q.n * (q.ell - 1) * (dp - dq) <= gap:
            return Decision(True, "2")
        return Decision(False, None)
    if 2 * q.n * (dq - dp) < gap:
        return Decision(True, "3")
    return Decision(False, None)


def embed_decide(q: EmbeddingQuery) -> bool:
    return embed_decision(q).decision


def projection_c(q: ProjectionQuery) -> Fraction:
    """``gamma (2 alpha - beta) / alpha^2``; non-positive when ``beta >= 2 alpha``."""
    return q.gamma * (2 * q.alpha - q.beta) / q.alpha**2


def kappa(alpha, beta) -> Fraction:
    """``alpha^2 / (2 alpha - beta)``, the weight of the image space of ``P_alpha``."""
    alpha, beta = as_fraction(alpha), as_fraction(beta)
    if beta >= 2 * alpha:
        raise DomainError("kappa requires beta < 2 alpha")
    return alpha**2 / (2 * alpha - beta)


def projection_decision(q: ProjectionQuery) -> Decision:
    if q.beta >= 2 * q.alpha:
        return Decision(False, None)
    k = kappa(q.alpha, q.beta)
    emb = embed_decision(
        EmbeddingQuery(q.n, q.ell, q.p, q.q, k, q.gamma, q.rho, q.eta)
    )
    return Decision(emb.decision, emb.branch, k)


def projection_decide(q: ProjectionQuery) -> bool:
    return projection_decision(q).decision
