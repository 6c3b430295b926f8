"""Closed-form error and tail bounds for the normal approximation.

Products of large powers are evaluated in the log domain; the tests hold
them against exact rational arithmetic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field


from .errors import PreconditionViolated

THEOREM1_CUBIC_CONSTANT = 4536
THEOREM1_QUADRATIC_CONSTANT = 78
EVENT_A_K = 8


@dataclass(frozen=True)
class BoundInputs:
    sup_norm: float
    d_max: int
    ell: int
    n: int
    m: int
    sigma: float

    def __post_init__(self):
        for name in ("sup_norm", "d_max", "ell", "n", "m", "sigma"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")


@dataclass(frozen=True)
class Theorem1Bound:
    value: float
    cubic_term: float
    quadratic_term: float
    preconditions_met: bool
    violated: list[str] = field(default_factory=list)

    def __iter__(self):
        # unpacks as (value, preconditions_met, violated)
        return iter((self.value, self.preconditions_met, self.violated))

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "terms": {"cubic": self.cubic_term, "quadratic": self.quadratic_term},
            "preconditions_met": self.preconditions_met,
            "violated": list(self.violated),
        }


def theorem1_preconditions(d_max: int, ell: int, n: int, m: int) -> list[str]:
    """Violated hypotheses, using exact integer fourth-power comparisons."""
    violated = []
    if d_max < 2:
        violated.append("d_max >= 2")
    if d_max ** 4 > n:
        violated.append("d_max <= n^(1/4)")
    if ell < 12:
        violated.append("ell >= 12")
    if ell ** 4 > n:
        violated.append("ell <= n^(1/4)")
    if m < n:
        violated.append("m >= n")
    if m < 7 * d_max ** 2 * ell:
        violated.append("m >= 7 d_max^2 ell")
    return violated


def theorem1_bound(inp: BoundInputs) -> Theorem1Bound:
    log_h = math.log(inp.sup_norm)
    log_d = math.log(inp.d_max)
    log_l = math.log(inp.ell)
    log_n = math.log(inp.n)
    log_s = math.log(inp.sigma)
    cubic = math.exp(
        3 * log_h + 2 * log_d + 10 * log_l + log_n - math.log(THEOREM1_CUBIC_CONSTANT) - 3 * log_s
    )
    quadratic = math.exp(
        2 * log_h + 2 * log_d + 8 * log_l + 0.5 * log_n - math.log(THEOREM1_QUADRATIC_CONSTANT) - 2 * log_s
    )
    violated = theorem1_preconditions(inp.d_max, inp.ell, inp.n, inp.m)
    return Theorem1Bound(cubic + quadratic, cubic, quadratic, not violated, violated)


def _require(cond: bool, text: str) -> None:
    if not cond:
        raise PreconditionViolated(f"requires {text}")


def _log_tail(d_max: int, ell: int, m: int, k: int, m_power: int) -> float:
    return (
        2 * k * (math.log(d_max) + math.log(ell))
        - math.log(math.factorial(k))
        - m_power * math.log(m)
    )


def kv_tail_bound(d_max: int, ell: int, m: int, k: int, n: int) -> tuple[float, float]:
    """Bounds on P[K_v >= ell + k - 1] for one vertex and for some vertex.

    Returns ``(single, union)`` unclamped.
    """
    _require(k >= 1, "k >= 1")
    _require(m >= 8 * max(k, ell), f"m >= 8 max(k, ell) = {8 * max(k, ell)} (m = {m})")
    _require(m >= n, f"m >= n for the union bound (m = {m}, n = {n})")
    single = math.exp(_log_tail(d_max, ell, m, k, k))
    union = math.exp(_log_tail(d_max, ell, m, k, k - 1))
    return single, union


def gamma_bound(d_max: int, ell: int, m: int, n: int) -> float:
    """Bound on the probability that K_v > ell + 6 for some v."""
    _require(m >= max(n, 8 * max(EVENT_A_K, ell)), "m >= max(n, 8 max(8, ell))")
    return kv_tail_bound(d_max, ell, m, EVENT_A_K, n)[1]


@dataclass(frozen=True)
class IntersectionBounds:
    xi_hit: float  # P[xi_v meets alpha]
    xi_overlap: float  # E|xi_v & alpha|
    eta_hit: float  # P[eta_v meets alpha, A]
    eta_overlap: float  # E|eta_v & alpha| I_A

    def __iter__(self):
        return iter((self.xi_hit, self.xi_overlap, self.eta_hit, self.eta_overlap))


def intersection_bounds(alpha_size: int, v_in_alpha: bool, d_max: int, ell: int, m: int) -> IntersectionBounds:
    _require(m >= 2 * d_max * (alpha_size + ell), "m >= 2 d_max (|alpha| + ell)")
    ind = 1.0 if v_in_alpha else 0.0
    near = 2 * d_max * alpha_size * (ell - 1) / m
    far = 2 * d_max * alpha_size * (3 * ell + 11) / m
    return IntersectionBounds(ind + near, ell * ind + near, ind + far, (3 * ell + 12) * ind + far)


@dataclass(frozen=True)
class CorollaryBounds:
    """Sums over all vertices of the four intersection bounds.

    ``sums`` are the intermediate expressions, ``aggregates`` the closed
    forms ``c |alpha| d_max ell`` with c in (2, 3, 8, 10).
    """

    sums: tuple[float, float, float, float]
    aggregates: tuple[float, float, float, float]


def corollary_bounds(alpha_size: int, d_max: int, ell: int, m: int, n: int) -> CorollaryBounds:
    _require(d_max >= 2, "d_max >= 2")
    _require(ell >= 12, "ell >= 12")
    _require(m >= max(n, 2 * d_max * (alpha_size + ell)), "m >= max(n, 2 d_max (|alpha| + ell))")
    a = alpha_size
    near = 2 * d_max * a * (ell - 1) * n / m
    far = 2 * d_max * a * (3 * ell + 11) * n / m
    sums = (a + near, ell * a + near, a + far, (3 * ell + 12) * a + far)
    base = a * d_max * ell
    return CorollaryBounds(sums, (2.0 * base, 3.0 * base, 8.0 * base, 10.0 * base))
