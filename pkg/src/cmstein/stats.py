"""Local statistics ``U = sum_v h(T_ell(v))`` and their evaluation."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .config import Configuration
from .errors import StatisticOutOfBound, UnknownStatistic
from .explore import ExplorationBatch, TruncatedComponent, explore_many, explore_truncated


@dataclass(frozen=True)
class LocalStatistic:
    """A bounded function of truncated components.

    ``evaluate`` sees one :class:`TruncatedComponent`. Built-ins also carry a
    vectorised ``evaluate_batch`` over an :class:`ExplorationBatch`; when
    present it must agree with ``evaluate`` vertex by vertex.
    """

    name: str
    ell: int
    sup_norm: float
    evaluate: Callable[[TruncatedComponent], float] = field(repr=False, compare=False)
    evaluate_batch: Optional[Callable[[ExplorationBatch], np.ndarray]] = field(default=None, repr=False, compare=False)
    # built-ins compare equal when name and parameters match
    params: dict = field(default_factory=dict, hash=False)

    def __post_init__(self):
        if self.ell < 1:
            raise ValueError("ell must be at least 1")
        if not self.sup_norm > 0:
            raise ValueError("sup_norm must be positive")

    def __call__(self, t: TruncatedComponent) -> float:
        value = float(self.evaluate(t))
        if abs(value) > self.sup_norm:
            raise StatisticOutOfBound(f"{self.name}: |h| = {abs(value)} exceeds {self.sup_norm}")
        return value

    def to_json(self) -> dict:
        return {"statistic": self.name, **self.params}


def small_component_indicator(ell: int) -> LocalStatistic:
    """1 when the component of the root has at most ``ell`` vertices."""
    return LocalStatistic(
        "small_component_indicator", ell, 1.0,
        lambda t: 0.0 if t.truncated else 1.0,
        lambda b: (b.unpaired == 0).astype(float),
        {"ell": ell},
    )


def degree_indicator(k: int) -> LocalStatistic:
    return LocalStatistic(
        "degree_indicator", 1, 1.0,
        lambda t: 1.0 if t.root_degree == k else 0.0,
        lambda b: (b.root_degree == k).astype(float),
        {"k": k},
    )


def capped_component_size(ell: int) -> LocalStatistic:
    return LocalStatistic(
        "capped_component_size", ell, float(ell),
        lambda t: float(t.size),
        lambda b: b.n_colours.astype(float),
        {"ell": ell},
    )


BUILTINS = {
    "small_component_indicator": (small_component_indicator, "ell"),
    "degree_indicator": (degree_indicator, "k"),
    "capped_component_size": (capped_component_size, "ell"),
}


def statistic_from_json(obj: dict) -> LocalStatistic:
    """Build a built-in from ``{"statistic": name, <param>: value}``."""
    name = obj.get("statistic")
    if name not in BUILTINS:
        raise UnknownStatistic(f"unknown statistic {name!r}; choose from {sorted(BUILTINS)}")
    ctor, param = BUILTINS[name]
    if param not in obj:
        raise UnknownStatistic(f"{name} needs parameter {param!r}")
    return ctor(int(obj[param]))


@dataclass(frozen=True)
class StatisticSummary:
    value: float
    per_vertex: np.ndarray
    colours: np.ndarray  # n x ell, -1 padded explored colour sets
    n_colours: np.ndarray
    index_ptr: np.ndarray
    index_vertices: np.ndarray
    mean_hint: Optional[float] = None
    variance_hint: Optional[float] = None

    def xi(self, v: int) -> np.ndarray:
        return self.colours[v, : self.n_colours[v]]

    def inverted_index(self, colour: int) -> np.ndarray:
        """Vertices whose explored colour set contains ``colour``."""
        return self.index_vertices[self.index_ptr[colour] : self.index_ptr[colour + 1]]

    def touching(self, colour_set: Sequence[int]) -> np.ndarray:
        """Sorted vertices ``w`` whose explored set meets ``colour_set``."""
        parts = [self.inverted_index(int(c)) for c in colour_set]
        if not parts:
            return np.empty(0, dtype=np.int64)
        return np.unique(np.concatenate(parts))


def _values(g: Configuration, h: LocalStatistic, batch: ExplorationBatch) -> np.ndarray:
    if h.evaluate_batch is not None:
        values = np.asarray(h.evaluate_batch(batch), dtype=float)
        bad = np.abs(values) > h.sup_norm
        if bad.any():
            raise StatisticOutOfBound(f"{h.name} exceeds its declared bound {h.sup_norm}")
        return values
    return np.array([h(explore_truncated(g, int(v), h.ell)) for v in batch.vertices], dtype=float)


def evaluate_at(g: Configuration, h: LocalStatistic, vertices) -> np.ndarray:
    """``h(T_ell(w))`` for each ``w`` in ``vertices``."""
    return _values(g, h, explore_many(g, vertices, h.ell))


def build_index(colours: np.ndarray, n_colours: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    owners = np.repeat(np.arange(len(n_colours)), n_colours)
    # padding sits at the end of each row, so the row-major mask lines up with owners
    flat = colours[colours >= 0]
    order = np.argsort(flat, kind="stable")
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(flat, minlength=n), out=ptr[1:])
    return ptr, owners[order]


def evaluate_statistic(
    g: Configuration,
    h: LocalStatistic,
    mean_hint: float | None = None,
    variance_hint: float | None = None,
    with_index: bool = True,
) -> StatisticSummary:
    batch = explore_many(g, None, h.ell)
    values = _values(g, h, batch)
    if with_index:
        ptr, owners = build_index(batch.colours, batch.n_colours, g.n)
    else:
        ptr = owners = np.empty(0, dtype=np.int64)
    return StatisticSummary(
        value=float(values.sum()),
        per_vertex=values,
        colours=batch.colours,
        n_colours=batch.n_colours,
        index_ptr=ptr,
        index_vertices=owners,
        mean_hint=mean_hint,
        variance_hint=variance_hint,
    )


def statistic_value(g: Configuration, h: LocalStatistic) -> float:
    """``U`` alone, skipping the inverted index."""
    return evaluate_statistic(g, h, with_index=False).value
