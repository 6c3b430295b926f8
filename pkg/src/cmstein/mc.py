"""Monte Carlo experiments: CLT checks and variance scaling."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field
from typing import Iterator, NamedTuple, Optional

import numpy as np
from scipy import special, stats as sps

from . import rng as rngmod
from .bounds import BoundInputs, theorem1_bound
from .config import sample_configuration
from .degseq import (
    DegreeDistribution,
    DegreeSequence,
    empirical_distribution,
    sample_degree_sequence,
    threshold_margin,
    validate,
)
from .errors import DegenerateVariance, EmptySample, ValidationError
from .explore import largest_component_size
from .stats import LocalStatistic, small_component_indicator, statistic_from_json, statistic_value

MODES = ("statistic", "giant_component")
MIN_ELL = 12


def _psi(x):
    # antiderivative of the standard normal CDF
    return x * special.ndtr(x) + np.exp(-0.5 * x * x) / math.sqrt(2 * math.pi)


def wasserstein_to_std_normal(samples) -> float:
    """Exact L1 distance between the empirical CDF of ``samples`` and Phi."""
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    n = x.size
    if n == 0:
        raise EmptySample("no samples")
    total = _psi(x[0]) + _psi(-x[-1])
    if n > 1:
        a, b = x[:-1], x[1:]
        p = np.arange(1, n) / n
        c = np.clip(special.ndtri(p), a, b)
        psi_a, psi_b, psi_c = _psi(a), _psi(b), _psi(c)
        below = p * (c - a) - (psi_c - psi_a)
        above = (psi_b - psi_c) - p * (b - c)
        total += np.sum(below + above)
    return float(total)


def ell_rule(n: int, delta: float = 1.0) -> int:
    return max(MIN_ELL, math.ceil(n ** (delta / 10)))


@dataclass
class ExperimentConfig:
    n_grid: list[int]
    replications: int
    master_seed: int = 0
    mode: str = "giant_component"
    distribution: Optional[DegreeDistribution] = None
    degrees: Optional[DegreeSequence] = None
    ell: Optional[int] = None
    delta: float = 1.0
    statistic: Optional[dict] = None
    cap: Optional[int] = None
    resample_degrees: bool = False
    track_reduction: bool = True
    theorem1: bool = True

    def __post_init__(self):
        self.n_grid = [int(n) for n in self.n_grid]
        if self.replications < 2:
            raise ValidationError("replications must be at least 2")
        if any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ValidationError("n_grid must be strictly increasing")
        if self.mode not in MODES:
            raise ValidationError(f"mode must be one of {MODES}")
        if (self.distribution is None) == (self.degrees is None):
            raise ValidationError("give exactly one of distribution or degrees")
        if self.degrees is not None and self.n_grid != [self.degrees.n]:
            raise ValidationError("with explicit degrees, n_grid must be [len(degrees)]")
        if self.resample_degrees and self.distribution is None:
            raise ValidationError("resample_degrees needs a distribution")
        if self.mode == "statistic" and self.statistic is None:
            raise ValidationError("mode 'statistic' needs a statistic")
        if self.statistic is not None:
            statistic_from_json(self.statistic)

    def ell_for(self, n: int) -> int:
        return self.ell if self.ell is not None else ell_rule(n, self.delta)

    def local_statistic(self, n: int) -> LocalStatistic:
        if self.mode == "giant_component":
            return small_component_indicator(self.ell_for(n))
        return statistic_from_json(self.statistic)

    def degree_cap(self) -> int:
        if self.cap is not None:
            return self.cap
        return max(self.distribution.support)

    def to_json(self) -> dict:
        out = {
            "n_grid": self.n_grid,
            "replications": self.replications,
            "master_seed": self.master_seed,
            "mode": self.mode,
            "distribution": self.distribution.to_json() if self.distribution else None,
            "degrees": self.degrees.to_list() if self.degrees is not None else None,
            "ell": self.ell,
            "delta": self.delta,
            "statistic": self.statistic,
            "cap": self.cap,
            "resample_degrees": self.resample_degrees,
            "track_reduction": self.track_reduction,
            "theorem1": self.theorem1,
        }
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "ExperimentConfig":
        obj = dict(obj)
        known = set(cls.__dataclass_fields__)
        unknown = set(obj) - known
        if unknown:
            raise ValidationError(f"unknown experiment keys: {sorted(unknown)}")
        if obj.get("distribution") is not None:
            obj["distribution"] = DegreeDistribution.from_json(obj["distribution"])
        if obj.get("degrees") is not None:
            obj["degrees"] = validate(obj["degrees"])
            obj.setdefault("n_grid", [obj["degrees"].n])
        if "n_grid" not in obj or "replications" not in obj:
            raise ValidationError("experiment needs n_grid and replications")
        return cls(**obj)


@dataclass
class PerN:
    n: int
    ell: int
    m: int
    d_max: int
    raw: np.ndarray = field(repr=False)
    samples: np.ndarray = field(repr=False)
    mean_U: float
    var_U: float
    var_over_n: float
    var_over_n_se: float
    wasserstein: float
    anderson_statistic: float
    anderson_critical_1pct: float
    theorem1_bound_value: Optional[float] = None
    theorem1_preconditions_met: Optional[bool] = None
    reduction_mismatch_frequency: Optional[float] = None

    def to_json(self) -> dict:
        out = {k: v for k, v in asdict(self).items() if k not in ("raw", "samples")}
        out["raw"] = self.raw.tolist()
        out["samples"] = self.samples.tolist()
        return out


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    per_n: list[PerN]

    def to_json(self) -> dict:
        return {"config": self.config.to_json(), "per_n": [p.to_json() for p in self.per_n]}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "replication", "raw_value", "standardized_value"])
        for p in self.per_n:
            for r, (raw, z) in enumerate(zip(p.raw.tolist(), p.samples.tolist())):
                w.writerow([p.n, r, repr(raw), repr(z)])
        return buf.getvalue()


def jackknife_variance_se(x: np.ndarray) -> float:
    """Jackknife standard error of the sample variance."""
    r = len(x)
    if r < 3:
        return float("inf")
    y = x - x.mean()
    s1, s2 = y.sum(), (y * y).sum()
    loo_sum = s1 - y
    loo = (s2 - y * y - loo_sum * loo_sum / (r - 1)) / (r - 2)
    return float(math.sqrt((r - 1) / r * np.sum((loo - loo.mean()) ** 2)))


def _degree_sequence(cfg: ExperimentConfig, n: int, *key: int) -> DegreeSequence:
    if cfg.degrees is not None:
        return cfg.degrees
    return sample_degree_sequence(
        cfg.distribution, n, cfg.degree_cap(), rngmod.stream(cfg.master_seed, rngmod.DEGREES, n, *key)
    )


def _run_n(cfg: ExperimentConfig, n: int, threads: int) -> PerN:
    base = _degree_sequence(cfg, n)
    h = cfg.local_statistic(n)
    giant = cfg.mode == "giant_component"
    track = giant and cfg.track_reduction

    def one(r):
        d = _degree_sequence(cfg, n, r) if cfg.resample_degrees else base
        g = sample_configuration(d, rngmod.stream(cfg.master_seed, rngmod.CONFIGURATION, n, r))
        if not giant:
            return statistic_value(g, h), False
        largest = largest_component_size(g)
        mismatch = track and (d.n - largest) != statistic_value(g, h)
        return float(largest), mismatch

    out = rngmod.replicate(one, cfg.replications, threads)
    raw = np.array([v for v, _ in out], dtype=float)
    mean = float(raw.mean())
    var = float(raw.var(ddof=1))
    if var == 0.0:
        raise DegenerateVariance(f"sample variance is exactly zero at n={n}")
    sd = math.sqrt(var)
    z = (raw - mean) / sd
    ad = sps.anderson(raw, "norm")
    crit = float(ad.critical_values[list(ad.significance_level).index(1.0)])
    result = PerN(
        n=base.n,
        ell=h.ell,
        m=base.m,
        d_max=base.d_max,
        raw=raw,
        samples=z,
        mean_U=mean,
        var_U=var,
        var_over_n=var / base.n,
        var_over_n_se=jackknife_variance_se(raw) / base.n,
        wasserstein=wasserstein_to_std_normal(z),
        anderson_statistic=float(ad.statistic),
        anderson_critical_1pct=crit,
    )
    if cfg.theorem1:
        b = theorem1_bound(BoundInputs(h.sup_norm, max(base.d_max, 1), h.ell, base.n, max(base.m, 1), sd))
        result.theorem1_bound_value = b.value
        result.theorem1_preconditions_met = b.preconditions_met
    if track:
        result.reduction_mismatch_frequency = sum(mm for _, mm in out) / cfg.replications
    return result


def run_clt_experiment(cfg: ExperimentConfig, threads: int = 1, log=None) -> ExperimentResult:
    per_n = []
    for n in cfg.n_grid:
        p = _run_n(cfg, n, threads)
        if log is not None:
            log(f"n={p.n} mean={p.mean_U:.4f} var/n={p.var_over_n:.5f} dW={p.wasserstein:.4f}")
        per_n.append(p)
    return ExperimentResult(cfg, per_n)


class ScalingRow(NamedTuple):
    n: int
    var_over_n: float
    std_error: float


@dataclass
class ScalingStudy:
    rows: list[ScalingRow]
    threshold_margin: float
    supercritical: bool
    result: ExperimentResult = field(repr=False)

    def __iter__(self) -> Iterator[ScalingRow]:
        return iter(self.rows)

    def to_json(self) -> dict:
        return {
            "rows": [r._asdict() for r in self.rows],
            "threshold_margin": self.threshold_margin,
            "condition_1": self.supercritical,
        }


def scaling_rows(result: ExperimentResult) -> list[ScalingRow]:
    return [ScalingRow(p.n, p.var_over_n, p.var_over_n_se) for p in result.per_n]


def variance_scaling_study(cfg: ExperimentConfig, threads: int = 1, result: ExperimentResult | None = None) -> ScalingStudy:
    if cfg.mode != "giant_component":
        raise ValidationError("variance scaling runs in giant_component mode")
    if result is None:
        result = run_clt_experiment(cfg, threads)
    pi = cfg.distribution if cfg.distribution is not None else empirical_distribution(cfg.degrees)
    margin = threshold_margin(pi)
    return ScalingStudy(scaling_rows(result), margin, margin > 0, result)


def sample_statistic(d: DegreeSequence, h: LocalStatistic, replications: int, seed: int, threads: int = 1) -> np.ndarray:
    """``U`` over independent configurations on a fixed degree sequence."""

    def one(r):
        return statistic_value(sample_configuration(d, rngmod.stream(seed, rngmod.CONFIGURATION, r)), h)

    return np.array(rngmod.replicate(one, replications, threads), dtype=float)


def variance_with_se(x: np.ndarray) -> tuple[float, float]:
    """Sample variance and its large-sample standard error."""
    r = len(x)
    v = float(x.var(ddof=1))
    m4 = float(np.mean((x - x.mean()) ** 4))
    return v, math.sqrt(max(m4 - v * v * (r - 3) / (r - 1), 0.0) / r)
