"""Degree sequences, degree distributions and the giant-component conditions."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import EmptySequence, InvalidDistribution, OddTotalDegree, ZeroMeanDegree
from .rng import as_generator


@dataclass(frozen=True)
class DegreeSequence:
    degrees: np.ndarray = field(repr=False)
    m: int
    d_max: int

    @property
    def n(self) -> int:
        return len(self.degrees)

    def __repr__(self) -> str:
        return f"DegreeSequence(n={self.n}, m={self.m}, d_max={self.d_max})"

    def __eq__(self, other) -> bool:
        return isinstance(other, DegreeSequence) and np.array_equal(self.degrees, other.degrees)

    def __hash__(self) -> int:
        return hash(self.degrees.tobytes())

    def to_list(self) -> list[int]:
        return [int(x) for x in self.degrees]

    @cached_property
    def layout(self) -> tuple[np.ndarray, np.ndarray]:
        """``(colour_of, first_ball)``: balls of colour c are first_ball[c]..first_ball[c+1]-1."""
        first_ball = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(self.degrees, out=first_ball[1:])
        colour_of = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)
        colour_of.setflags(write=False)
        first_ball.setflags(write=False)
        return colour_of, first_ball


def validate(degrees: Iterable[int]) -> DegreeSequence:
    arr = np.asarray(list(degrees), dtype=np.int64)
    if arr.ndim != 1:
        raise ValueError("degrees must be a flat sequence")
    if arr.size == 0:
        raise EmptySequence("degree sequence is empty")
    if (arr < 0).any():
        raise ValueError("degrees must be nonnegative")
    m = int(arr.sum())
    if m % 2:
        raise OddTotalDegree(f"total degree {m} is odd; no perfect matching exists")
    arr.setflags(write=False)
    return DegreeSequence(arr, m, int(arr.max()))


def read_degree_sequence(text: str) -> DegreeSequence:
    """Parse a JSON array or newline-delimited integers."""
    text = text.strip()
    if text.startswith("["):
        return validate(json.loads(text))
    return validate(int(tok) for tok in text.split())


@dataclass(frozen=True)
class DegreeDistribution:
    probabilities: Mapping[int, float]

    def __post_init__(self):
        probs = {}
        for k, p in dict(self.probabilities).items():
            k, p = int(k), float(p)
            if k < 0 or not math.isfinite(p) or p < 0:
                raise InvalidDistribution(f"bad mass {p!r} at degree {k!r}")
            if p > 0:
                probs[k] = probs.get(k, 0.0) + p
        total = math.fsum(probs.values())
        if abs(total - 1.0) > 1e-12:
            raise InvalidDistribution(f"masses sum to {total!r}, not 1")
        object.__setattr__(self, "probabilities", dict(sorted(probs.items())))

    def __getitem__(self, k: int) -> float:
        return self.probabilities.get(k, 0.0)

    @property
    def support(self) -> list[int]:
        return list(self.probabilities)

    @property
    def mean(self) -> float:
        return moment(self, 1)

    def to_json(self) -> dict[str, float]:
        return {str(k): p for k, p in self.probabilities.items()}

    @classmethod
    def from_json(cls, obj: Mapping) -> "DegreeDistribution":
        return cls({int(k): float(v) for k, v in obj.items()})


def empirical_distribution(d: DegreeSequence) -> DegreeDistribution:
    values, counts = np.unique(d.degrees, return_counts=True)
    n = d.n
    probs = {int(k): c / n for k, c in zip(values, counts)}
    # renormalise so the sum is exactly 1 within the constructor tolerance
    total = math.fsum(probs.values())
    return DegreeDistribution({k: p / total for k, p in probs.items()})


def moment(pi: DegreeDistribution, k: int, truncate: int | None = None) -> float:
    if k < 1:
        raise ValueError("moment order must be >= 1")
    return math.fsum(
        (j ** k) * p for j, p in pi.probabilities.items() if truncate is None or j <= truncate
    )


def size_bias(pi: DegreeDistribution) -> DegreeDistribution:
    mean = moment(pi, 1)
    if mean <= 0:
        raise ZeroMeanDegree("size-biasing needs a positive mean degree")
    probs = {j: j * p / mean for j, p in pi.probabilities.items() if j > 0}
    total = math.fsum(probs.values())
    return DegreeDistribution({j: p / total for j, p in probs.items()})


def threshold_margin(pi: DegreeDistribution) -> float:
    """E D* - 2, positive exactly in the supercritical regime."""
    mean = moment(pi, 1)
    if mean <= 0:
        raise ZeroMeanDegree("threshold needs a positive mean degree")
    return moment(pi, 2) / mean - 2.0


def tv_distance(p: DegreeDistribution, q: DegreeDistribution) -> float:
    keys = set(p.probabilities) | set(q.probabilities)
    return 0.5 * math.fsum(abs(p[j] - q[j]) for j in keys)


def sample_degree_sequence(pi: DegreeDistribution, n: int, cap: int, seed) -> DegreeSequence:
    """Draw ``n`` i.i.d. degrees from ``pi`` clamped at ``cap``.

    An odd total is repaired by incrementing the degree of the last vertex
    with nonzero degree.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if cap < 1:
        raise ValueError("cap must be at least 1")
    rng = as_generator(seed)
    support = np.array(pi.support, dtype=np.int64)
    probs = np.array([pi[j] for j in pi.support])
    degrees = np.minimum(rng.choice(support, size=n, p=probs / probs.sum()), cap)
    if degrees.sum() % 2:
        nz = np.flatnonzero(degrees)
        degrees[nz[-1]] += 1
    return validate(degrees)


@dataclass(frozen=True)
class ConditionReport:
    mean_size_bias: float
    threshold_margin: float
    pi1: float
    third_moment: float
    tv_to_limit: float
    d_max_exponent: float
    verdicts: list[bool]
    # per-family-member diagnostics
    ns: list[int] = field(default_factory=list)
    tv_degree: list[float] = field(default_factory=list)
    tv_size_biased: list[float] = field(default_factory=list)
    mean_gap: list[float] = field(default_factory=list)
    third_moment_gap: list[float] = field(default_factory=list)
    beta_fit: float = float("nan")
    d_max: list[int] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "mean_size_bias": self.mean_size_bias,
            "threshold_margin": self.threshold_margin,
            "pi1": self.pi1,
            "third_moment": self.third_moment,
            "tv_to_limit": self.tv_to_limit,
            "d_max_exponent": self.d_max_exponent,
            "beta_fit": self.beta_fit,
            "verdicts": {str(i + 1): v for i, v in enumerate(self.verdicts)},
            "family": [
                {
                    "n": n,
                    "d_max": dm,
                    "tv_degree": a,
                    "tv_size_biased": b,
                    "mean_gap": c,
                    "third_moment_gap": e,
                }
                for n, dm, a, b, c, e in zip(
                    self.ns, self.d_max, self.tv_degree, self.tv_size_biased,
                    self.mean_gap, self.third_moment_gap,
                )
            ],
        }


TV_FINAL_TOL = 0.02
DMAX_SLOPE_LIMIT = 0.25 - 0.01
THIRD_MOMENT_REL_TOL = 0.05


def _loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    x = np.log(np.asarray(xs, dtype=float))
    y = np.log(np.asarray(ys, dtype=float))
    if np.ptp(x) == 0:
        return float("nan")
    return float(np.polyfit(x, y, 1)[0])


def _non_increasing(values: Sequence[float]) -> bool:
    return all(b <= a for a, b in zip(values, values[1:]))


def check_conditions(pi: DegreeDistribution, family: Sequence[DegreeSequence]) -> ConditionReport:
    """Numeric diagnostics for the seven giant-component CLT conditions.

    Never raises on a violated condition; failures show up in ``verdicts``.
    """
    if len(family) < 2:
        raise ValueError("need at least two family members")
    family = sorted(family, key=lambda d: d.n)
    mean = moment(pi, 1)
    margin = threshold_margin(pi) if mean > 0 else float("-inf")
    mean_star = margin + 2.0
    third = moment(pi, 3)
    pi_star = size_bias(pi) if mean > 0 else None

    ns, tv_deg, tv_star, gaps, third_gaps, dmax = [], [], [], [], [], []
    for d in family:
        emp = empirical_distribution(d)
        ns.append(d.n)
        dmax.append(d.d_max)
        tv_deg.append(tv_distance(emp, pi))
        if pi_star is not None and emp.mean > 0:
            tv_star.append(tv_distance(size_bias(emp), pi_star))
        else:
            tv_star.append(1.0)
        gaps.append(abs(emp.mean - mean))
        third_gaps.append(abs(moment(emp, 3) - third))

    slope = _loglog_slope(ns, [max(x, 1) for x in dmax])
    positive = [(n, t) for n, t in zip(ns, tv_star) if t > 0]
    beta = -_loglog_slope(*zip(*positive)) if len(positive) >= 2 else float("inf")

    verdicts = [
        margin > 0,
        pi[1] > 0,
        math.isfinite(third),
        _non_increasing(tv_deg) and tv_deg[-1] < TV_FINAL_TOL,
        third_gaps[-1] <= THIRD_MOMENT_REL_TOL * max(third, 1.0),
        _non_increasing(tv_star) and tv_star[-1] < TV_FINAL_TOL and gaps[-1] < TV_FINAL_TOL,
        bool(slope < DMAX_SLOPE_LIMIT),
    ]
    return ConditionReport(
        mean_size_bias=mean_star,
        threshold_margin=margin,
        pi1=pi[1],
        third_moment=third,
        tv_to_limit=tv_deg[-1],
        d_max_exponent=slope,
        verdicts=verdicts,
        ns=ns,
        tv_degree=tv_deg,
        tv_size_biased=tv_star,
        mean_gap=gaps,
        third_moment_gap=third_gaps,
        beta_fit=beta,
        d_max=dmax,
    )
