"""Configurations: perfect matchings of coloured balls.

Balls are labelled ``0..m-1`` internally and coloured by vertex, with the
balls of colour ``v`` occupying ``first_ball[v]:first_ball[v+1]``. The JSON
format uses 1-based ball labels.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

import numpy as np

from .degseq import DegreeSequence, validate
from .errors import InvalidConfiguration
from .rng import as_generator


@dataclass(frozen=True, eq=False)
class Configuration:
    degrees: DegreeSequence
    partner: np.ndarray = field(repr=False)
    colour_of: np.ndarray = field(repr=False)
    first_ball: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.degrees.n

    @property
    def m(self) -> int:
        return self.degrees.m

    @cached_property
    def lists(self) -> tuple[list[int], list[int], list[int]]:
        """Python-list views for scalar-heavy loops."""
        return self.partner.tolist(), self.colour_of.tolist(), self.first_ball.tolist()

    def pairs(self) -> list[tuple[int, int]]:
        b = np.arange(self.m)
        keep = b < self.partner
        return list(zip(b[keep].tolist(), self.partner[keep].tolist()))

    def key(self) -> tuple[int, ...]:
        return tuple(self.partner.tolist())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Configuration)
            and self.degrees == other.degrees
            and np.array_equal(self.partner, other.partner)
        )

    def __hash__(self) -> int:
        return hash(self.partner.tobytes())

    def to_json(self) -> dict:
        return {
            "degrees": self.degrees.to_list(),
            "pairs": [[a + 1, b + 1] for a, b in self.pairs()],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Configuration":
        d = validate(obj["degrees"])
        partner = np.full(d.m, -1, dtype=np.int64)
        for a, b in obj["pairs"]:
            a, b = int(a) - 1, int(b) - 1
            if not (0 <= a < d.m and 0 <= b < d.m):
                raise InvalidConfiguration(f"ball label out of range in pair {[a + 1, b + 1]}")
            if partner[a] != -1 or partner[b] != -1:
                raise InvalidConfiguration(f"ball reused in pair {[a + 1, b + 1]}")
            partner[a], partner[b] = b, a
        return from_partner(d, partner)


def ball_layout(d: DegreeSequence) -> tuple[np.ndarray, np.ndarray]:
    return d.layout


def check_involution(partner: np.ndarray) -> None:
    m = len(partner)
    idx = np.arange(m)
    if m and (partner.min() < 0 or partner.max() >= m):
        raise InvalidConfiguration("partner array has unmatched or out-of-range balls")
    if (partner == idx).any():
        raise InvalidConfiguration("a ball is matched to itself")
    if not np.array_equal(partner[partner], idx):
        raise InvalidConfiguration("partner array is not an involution")


def from_partner(d: DegreeSequence, partner, layout=None, check: bool = True) -> Configuration:
    partner = np.asarray(partner, dtype=np.int64)
    if len(partner) != d.m:
        raise InvalidConfiguration(f"expected {d.m} balls, got {len(partner)}")
    if check:
        check_involution(partner)
    colour_of, first_ball = layout if layout is not None else ball_layout(d)
    partner.setflags(write=False)
    return Configuration(d, partner, colour_of, first_ball)


def sample_configuration(d: DegreeSequence, seed) -> Configuration:
    """Uniform perfect matching: shuffle the balls, pair consecutive entries."""
    if d.m < 2:
        raise InvalidConfiguration("need at least two balls")
    rng = as_generator(seed)
    perm = rng.permutation(d.m)
    partner = np.empty(d.m, dtype=np.int64)
    partner[perm[0::2]] = perm[1::2]
    partner[perm[1::2]] = perm[0::2]
    return from_partner(d, partner, check=False)


@dataclass(frozen=True)
class SubConfiguration:
    colour_set: frozenset[int]
    internal_pairs: frozenset[tuple[int, int]]
    unpaired: tuple[int, ...]

    @property
    def s(self) -> int:
        return len(self.unpaired)

    def key(self) -> tuple:
        return tuple(sorted(self.internal_pairs)), self.unpaired


def restrict(g: Configuration, colours: Iterable[int]) -> SubConfiguration:
    cset = frozenset(int(c) for c in colours)
    for c in cset:
        if not 0 <= c < g.n:
            raise ValueError(f"colour {c} out of range")
    partner, colour_of, first = g.lists
    internal, unpaired = set(), []
    for c in sorted(cset):
        for b in range(first[c], first[c + 1]):
            p = partner[b]
            if colour_of[p] in cset:
                internal.add((min(b, p), max(b, p)))
            else:
                unpaired.append(b)
    return SubConfiguration(cset, frozenset(internal), tuple(sorted(unpaired)))
