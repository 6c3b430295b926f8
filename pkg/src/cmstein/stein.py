"""The rebuild coupling and the variance identity.

``rebuild_independent`` removes the internal pairs of the truncated
component ``T_ell(v)`` and puts them back one at a time, each either
matched together (a coin with heads probability ``1/(size - 1)``) or spliced
into a uniformly chosen existing pair. The result is a uniform
configuration independent of ``T_ell(v)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional

import numpy as np

from . import rng as rngmod
from .config import Configuration, from_partner, sample_configuration
from .degseq import DegreeSequence
from .errors import ZeroVariance
from .explore import TruncatedComponent, explore_truncated
from .stats import LocalStatistic, StatisticSummary, evaluate_at, evaluate_statistic

EVENT_A_SLACK = 6


@dataclass(frozen=True)
class CouplingRecord:
    vertex: int
    xi: tuple[int, ...]
    eta: frozenset[int]
    k_v: int
    s_xi: int
    xi_degree_sum: int
    on_event_A: bool
    w: Optional[float] = None
    w_prime: Optional[float] = None
    g_term: Optional[float] = None
    delta: Optional[float] = None
    u_change: Optional[float] = None
    component: Optional[TruncatedComponent] = field(default=None, repr=False, compare=False)

    def to_json(self) -> dict:
        return {
            "vertex": self.vertex + 1,
            "xi": [c + 1 for c in self.xi],
            "eta": sorted(c + 1 for c in self.eta),
            "k_v": self.k_v,
            "s_xi": self.s_xi,
            "on_event_A": self.on_event_A,
            "w": self.w,
            "w_prime": self.w_prime,
            "g_term": self.g_term,
            "delta": self.delta,
        }


def rebuild_independent(g: Configuration, v: int, ell: int, rng: np.random.Generator):
    """Return ``(G'_v, record)`` where ``record`` lacks the statistic fields."""
    t = explore_truncated(g, v, ell)
    partner, colour_of, _ = g.lists
    m = g.m
    new = list(partner)
    present = bytearray(b"\x01") * m
    # internal pairs of the truncated component, re-inserted by smallest ball label
    pairs = sorted((a, b) for _, _, a, b in t.edges)
    for a, b in pairs:
        present[a] = present[b] = 0
    k_v = len(pairs)
    n_present = m - 2 * k_v
    touched = set()
    for a, b in pairs:
        size_after = n_present + 2
        if rng.random() < 1.0 / (size_after - 1):
            new[a], new[b] = b, a
        else:
            assert n_present > 0, "tails with nothing to split"
            while True:
                i = int(rng.integers(m))
                if present[i]:
                    break
            j = new[i]
            new[i], new[a] = a, i
            new[j], new[b] = b, j
            touched.add(colour_of[i])
            touched.add(colour_of[j])
        present[a] = present[b] = 1
        n_present += 2

    g2 = from_partner(g.degrees, np.array(new, dtype=np.int64), layout=(g.colour_of, g.first_ball), check=False)
    xi = t.colours
    record = CouplingRecord(
        vertex=v,
        xi=xi,
        eta=frozenset(xi) | frozenset(touched),
        k_v=k_v,
        s_xi=t.unpaired_count,
        xi_degree_sum=sum(t.degrees),
        on_event_A=k_v <= ell + EVENT_A_SLACK,
        component=t,
    )
    return g2, record


def _u_change(g2: Configuration, h: LocalStatistic, summary: StatisticSummary, eta) -> float:
    # T_ell(w) can only change if xi_w meets eta, and then it meets eta in both graphs
    q = summary.touching(sorted(eta))
    if q.size == 0:
        return 0.0
    return float((evaluate_at(g2, h, q) - summary.per_vertex[q]).sum())


def coupling_draw(
    g: Configuration,
    v: int,
    h: LocalStatistic,
    summary: StatisticSummary,
    sigma: float,
    rng: np.random.Generator,
    mu: float | None = None,
) -> CouplingRecord:
    if not sigma > 0:
        raise ZeroVariance("coupling needs a positive standard deviation")
    if mu is None:
        mu = summary.mean_hint if summary.mean_hint is not None else 0.0
    g2, rec = rebuild_independent(g, v, h.ell, rng)
    change = _u_change(g2, h, summary, rec.eta)
    w = (summary.value - mu) / sigma
    delta = change / sigma
    return replace(
        rec,
        w=w,
        w_prime=w + delta,
        g_term=-(g.n / sigma) * float(summary.per_vertex[v]),
        delta=delta,
        u_change=change,
    )


class VarianceEstimate(NamedTuple):
    sigma2_hat: float
    std_error: float


def variance_identity_samples(
    d: DegreeSequence, h: LocalStatistic, replications: int, seed: int, threads: int = 1
) -> np.ndarray:
    """Per-replication values of ``-n * X_I * (U'_I - U)``."""

    def one(r):
        rng = rngmod.stream(seed, rngmod.COUPLING, r)
        g = sample_configuration(d, rng)
        i = int(rng.integers(d.n))
        summary = evaluate_statistic(g, h)
        g2, rec = rebuild_independent(g, i, h.ell, rng)
        x_i = float(summary.per_vertex[i])
        if x_i == 0.0:
            return 0.0
        return -d.n * x_i * _u_change(g2, h, summary, rec.eta)

    return np.array(rngmod.replicate(one, replications, threads), dtype=float)


def estimate_variance_identity(
    d: DegreeSequence, h: LocalStatistic, replications: int, seed: int, threads: int = 1
) -> VarianceEstimate:
    if replications < 2:
        raise ValueError("need at least two replications")
    x = variance_identity_samples(d, h, replications, seed, threads)
    return VarianceEstimate(float(x.mean()), float(x.std(ddof=1) / np.sqrt(len(x))))
