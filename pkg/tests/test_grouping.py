"""Grouping against the brute-force component oracle."""

from __future__ import annotations

import random

import pytest

from dcstego import group, levenshtein
from dcstego.codebook import Codebook
from dcstego.errors import ParameterError
from conftest import oracle_components, random_tokens


def book_of(seqs) -> Codebook:
    multiplicity: dict[tuple, int] = {}
    for s in seqs:
        multiplicity[s] = multiplicity.get(s, 0) + 1
    return Codebook(entries=tuple(seqs), multiplicity=multiplicity)


def test_all_identical_single_group():
    book = book_of([(1, 2, 3)] * 6)
    partition = group(book, 0)
    assert partition.count == 1
    assert partition.groups == ((0, 1, 2, 3, 4, 5),)


def test_two_separated_clusters():
    # Intra-cluster distance <= 1, inter-cluster distance >= threshold + 5.
    cluster_a = [(0, 0, 0, 0, 0, 0), (0, 0, 0, 0, 0, 1)]
    cluster_b = [(7, 6, 7, 6, 7, 6), (7, 6, 7, 6, 7, 7)]
    for a in cluster_a:
        for b in cluster_b:
            assert levenshtein(a, b) >= 1 + 5
    partition = group(book_of(cluster_a + cluster_b), 1)
    assert partition.count == 2
    assert partition.groups == ((0, 1), (2, 3))


def test_transitive_chain_merges():
    # a-b and b-c within threshold, a-c beyond it: one group regardless.
    a = (0, 0, 0, 0)
    b = (0, 0, 1, 1)
    c = (1, 1, 1, 1)
    assert levenshtein(a, b) == 2
    assert levenshtein(b, c) == 2
    assert levenshtein(a, c) == 4
    partition = group(book_of([a, b, c]), 2)
    assert partition.count == 1


def test_oracle_equivalence_500_random_codebooks():
    rng = random.Random(11)
    for _ in range(500):
        alphabet = rng.randrange(2, 9)
        block_len = rng.randrange(1, 11)
        k = rng.randrange(1, 33)
        threshold = rng.randrange(0, block_len + 2)
        seqs = [random_tokens(rng, block_len, alphabet) for _ in range(k)]
        partition = group(book_of(seqs), threshold)
        assert partition.groups == oracle_components(seqs, threshold)


def test_separation_exceeds_threshold():
    rng = random.Random(13)
    for _ in range(50):
        seqs = [random_tokens(rng, 8, 4) for _ in range(16)]
        threshold = rng.randrange(0, 5)
        partition = group(book_of(seqs), threshold)
        for gi in range(partition.count):
            for gj in range(gi + 1, partition.count):
                for x in partition.groups[gi]:
                    for y in partition.groups[gj]:
                        assert levenshtein(seqs[x], seqs[y]) > threshold


def test_merge_monotonicity():
    rng = random.Random(29)
    for _ in range(100):
        seqs = [random_tokens(rng, 6, 3) for _ in range(12)]
        book = book_of(seqs)
        counts = [group(book, t).count for t in range(0, 8)]
        assert counts == sorted(counts, reverse=True)


def test_duplicates_share_group():
    seqs = [(1, 2), (3, 4), (1, 2)]
    partition = group(book_of(seqs), 0)
    assert partition.group_of[0] == partition.group_of[2]
    assert partition.group_of[1] != partition.group_of[0]


def test_group_of_covers_all_indices():
    rng = random.Random(31)
    seqs = [random_tokens(rng, 5, 3) for _ in range(20)]
    partition = group(book_of(seqs), 2)
    assert sorted(partition.group_of) == list(range(20))
    assert sorted(i for g in partition.groups for i in g) == list(range(20))


def test_negative_threshold_rejected():
    with pytest.raises(ParameterError):
        group(book_of([(1,)]), -1)
