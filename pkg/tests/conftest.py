from collections import Counter

import numpy as np
import pytest
from scipy import stats

from cmstein.config import from_partner
from cmstein.degseq import validate


def make_config(degrees, pairs):
    """Configuration from 1-based ball pairs."""
    d = validate(degrees)
    partner = np.empty(d.m, dtype=np.int64)
    for a, b in pairs:
        partner[a - 1], partner[b - 1] = b - 1, a - 1
    return from_partner(d, partner)


def all_matchings(balls):
    balls = list(balls)
    if not balls:
        yield ()
        return
    first, rest = balls[0], balls[1:]
    for i, other in enumerate(rest):
        for tail in all_matchings(rest[:i] + rest[i + 1 :]):
            yield ((first, other),) + tail


def matching_keys(degrees):
    """Partner-tuple keys of every perfect matching of ``degrees``."""
    d = validate(degrees)
    keys = []
    for mt in all_matchings(range(d.m)):
        partner = [0] * d.m
        for a, b in mt:
            partner[a], partner[b] = b, a
        keys.append(tuple(partner))
    return keys


def chi_square_uniform(counts: Counter, support) -> float:
    observed = np.array([counts.get(k, 0) for k in support], dtype=float)
    assert sum(counts.values()) == observed.sum(), "samples outside the enumerated support"
    if len(support) == 1:
        return 1.0
    return stats.chisquare(observed).pvalue


def independence_pvalue(pairs) -> float:
    """Chi-square test of independence for a list of (row, col) labels."""
    rows = sorted({r for r, _ in pairs})
    cols = sorted({c for _, c in pairs})
    if len(rows) < 2 or len(cols) < 2:
        return 1.0
    table = np.zeros((len(rows), len(cols)))
    ri = {r: i for i, r in enumerate(rows)}
    ci = {c: i for i, c in enumerate(cols)}
    for r, c in pairs:
        table[ri[r], ci[c]] += 1
    return stats.chi2_contingency(table, correction=False).pvalue


def random_degrees(rng, n_max=40, d_max=4, n_min=2):
    n = int(rng.integers(n_min, n_max + 1))
    degs = rng.integers(0, d_max + 1, size=n)
    if degs.sum() % 2:
        degs[int(rng.integers(n))] += 1
    if degs.sum() < 2:
        degs[0] += 2
    return validate(degs)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


SMALL_SEQUENCES = [(1, 1, 1, 1), (2, 1, 1), (2, 2), (1, 2, 2, 1)]


@pytest.fixture
def path_graph():
    # path 1 - 2 - 3 on d = (1, 2, 1)
    return make_config((1, 2, 1), [(1, 2), (3, 4)])


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)

