"""Shared fixtures and independent oracles for the test suite.

Oracles here are deliberately naive: full-matrix DP for edit distance,
breadth-first search for components, direct enumeration for routing.  They
never share code with the library paths they check.
"""

from __future__ import annotations

import random
from collections import deque

import pytest

from dcstego import MarkovModel, Seed, UniformModel


def oracle_levenshtein(a, b) -> int:
    """Textbook full-matrix DP, kept independent of the library."""
    rows = len(a) + 1
    cols = len(b) + 1
    d = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        d[i][0] = i
    for j in range(cols):
        d[0][j] = j
    for i in range(1, rows):
        for j in range(1, cols):
            d[i][j] = min(
                d[i - 1][j] + 1,
                d[i][j - 1] + 1,
                d[i - 1][j - 1] + (a[i - 1] != b[j - 1]),
            )
    return d[rows - 1][cols - 1]


def oracle_components(seqs, threshold):
    """BFS connected components of the distance-<=threshold graph.

    Returns groups of indices in canonical order (sorted by smallest
    member).
    """
    n = len(seqs)
    adjacency = [[] for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if oracle_levenshtein(seqs[i], seqs[j]) <= threshold:
                adjacency[i].append(j)
                adjacency[j].append(i)
    seen = [False] * n
    groups = []
    for start in range(n):
        if seen[start]:
            continue
        queue = deque([start])
        seen[start] = True
        component = []
        while queue:
            u = queue.popleft()
            component.append(u)
            for v in adjacency[u]:
                if not seen[v]:
                    seen[v] = True
                    queue.append(v)
        groups.append(tuple(sorted(component)))
    return tuple(sorted(groups, key=lambda g: g[0]))


def random_tokens(rng: random.Random, length: int, alphabet: int):
    return tuple(rng.randrange(alphabet) for _ in range(length))


def random_markov(rng: random.Random, alphabet: int) -> MarkovModel:
    """Row-stochastic chain with strictly positive entries."""
    rows = []
    for _ in range(alphabet):
        weights = [rng.random() + 0.05 for _ in range(alphabet)]
        total = sum(weights)
        rows.append([w / total for w in weights])
    weights = [rng.random() + 0.05 for _ in range(alphabet)]
    total = sum(weights)
    return MarkovModel(rows, [w / total for w in weights])


@pytest.fixture
def seed() -> Seed:
    return Seed(bytes(range(32)))


@pytest.fixture
def uniform4() -> UniformModel:
    return UniformModel(4)


@pytest.fixture
def markov4() -> MarkovModel:
    return MarkovModel(
        [
            [0.70, 0.20, 0.10, 0.00],
            [0.10, 0.60, 0.20, 0.10],
            [0.25, 0.25, 0.25, 0.25],
            [0.05, 0.15, 0.30, 0.50],
        ],
        [0.40, 0.30, 0.20, 0.10],
    )
