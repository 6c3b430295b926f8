"""Truncated breadth-first exploration (Algorithm A) and connected components.

Exploration order is canonical: colours are visited by BFS wave, then by
colour label within a wave, and each colour's unpaired balls by ball label.
When a colour joins the explored set, all its loops and all pairings with
already-explored colours are revealed at once.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .config import Configuration
from .errors import InvalidVertex


@dataclass(frozen=True)
class TruncatedComponent:
    root: int
    colours: tuple[int, ...]
    # (colour_a, colour_b, ball_a, ball_b) with ball_a < ball_b
    edges: tuple[tuple[int, int, int, int], ...]
    unpaired: tuple[int, ...]
    degrees: tuple[int, ...] = field(compare=False)

    @property
    def unpaired_count(self) -> int:
        return len(self.unpaired)

    @property
    def truncated(self) -> bool:
        return bool(self.unpaired)

    @property
    def size(self) -> int:
        return len(self.colours)

    @property
    def root_degree(self) -> int:
        return self.degrees[0]

    def colour_edges(self) -> list[tuple[int, int]]:
        return sorted((min(a, b), max(a, b)) for a, b, _, _ in self.edges)

    def key(self) -> tuple:
        """Rooted labelled multigraph plus unpaired count."""
        return self.root, tuple(sorted(self.colours)), tuple(self.colour_edges()), self.unpaired_count

    def to_json(self) -> dict:
        return {
            "root": self.root + 1,
            "colours": [c + 1 for c in self.colours],
            "edges": [[a + 1, b + 1] for a, b in self.colour_edges()],
            "unpaired": self.unpaired_count,
        }


def explore_truncated(g: Configuration, v: int, ell: int) -> TruncatedComponent:
    if ell < 1:
        raise ValueError("ell must be at least 1")
    if not 0 <= v < g.n:
        raise InvalidVertex(f"vertex {v + 1} not in 1..{g.n}")
    partner, colour_of, first = g.lists
    explored = {v}
    order = [v]
    unpaired: set[int] = set()
    edges = []

    def absorb(c):
        for b in range(first[c], first[c + 1]):
            p = partner[b]
            pc = colour_of[p]
            if pc in explored:
                if pc != c:
                    unpaired.discard(p)
                    edges.append((pc, c, p, b) if p < b else (c, pc, b, p))
                elif b < p:
                    edges.append((c, c, b, p))
            else:
                unpaired.add(b)

    absorb(v)
    wave = [v]
    while len(order) < ell and unpaired:
        nxt = []
        for c in wave:
            for b in range(first[c], first[c + 1]):
                if len(order) >= ell or not unpaired:
                    break
                if b not in unpaired:
                    continue
                w = colour_of[partner[b]]
                explored.add(w)
                order.append(w)
                nxt.append(w)
                absorb(w)
        wave = sorted(nxt)
        if not wave:
            break
    degs = g.degrees.degrees
    return TruncatedComponent(
        root=v,
        colours=tuple(order),
        edges=tuple(edges),
        unpaired=tuple(sorted(unpaired)),
        degrees=tuple(int(degs[c]) for c in order),
    )


@dataclass(frozen=True)
class ExplorationBatch:
    """Compact Algorithm A output for many roots at once."""

    vertices: np.ndarray
    colours: np.ndarray  # len(vertices) x ell, -1 padded
    n_colours: np.ndarray
    unpaired: np.ndarray
    internal: np.ndarray
    root_degree: np.ndarray

    def colour_set(self, i: int) -> np.ndarray:
        return self.colours[i, : self.n_colours[i]]


def explore_many(g: Configuration, vertices: Sequence[int] | np.ndarray | None, ell: int) -> ExplorationBatch:
    if ell < 1:
        raise ValueError("ell must be at least 1")
    if vertices is None:
        vertices = np.arange(g.n, dtype=np.int64)
    vertices = np.asarray(vertices, dtype=np.int64)
    if vertices.size and (vertices.min() < 0 or vertices.max() >= g.n):
        raise InvalidVertex("vertex out of range")
    colours, n_colours, unpaired, internal = _kernels.explore_batch(
        g.partner, g.colour_of, g.first_ball, vertices, int(ell)
    )
    return ExplorationBatch(vertices, colours, n_colours, unpaired, internal, g.degrees.degrees[vertices])


@dataclass(frozen=True)
class ComponentPartition:
    component_id: np.ndarray
    sizes: list[int]

    @property
    def largest(self) -> int:
        return max(self.sizes)

    @property
    def not_in_largest(self) -> int:
        return sum(self.sizes) - self.largest


def components(g: Configuration) -> ComponentPartition:
    labels, sizes = _kernels.component_labels(g.partner, g.colour_of, g.n)
    return ComponentPartition(labels, sizes.tolist())


def largest_component_size(g: Configuration) -> int:
    _, sizes = _kernels.component_labels(g.partner, g.colour_of, g.n)
    return int(sizes.max())
