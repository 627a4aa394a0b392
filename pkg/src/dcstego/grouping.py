"""Partition a codebook into components under "edit distance <= threshold".

Merging pairs at distance <= d_T makes every cross-group distance at least
d_T + 1, which is the separation the decoder's minimum-distance rule needs.
Duplicates merge for free (distance 0); only distinct sequences are
compared, after a counting-filter prunes pairs whose token histograms
already certify a distance above the threshold.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codebook import Codebook
from .distance import bag_counts, pairwise_capped
from .errors import ParameterError
from .model import Tokens


class UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, u: int) -> int:
        root = u
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[u] != root:  # path compression
            self.parent[u], u = root, self.parent[u]
        return root

    def union(self, u: int, v: int) -> None:
        ru, rv = self.find(u), self.find(v)
        if ru != rv:
            if rv < ru:
                ru, rv = rv, ru
            self.parent[rv] = ru


@dataclass(frozen=True)
class Partition:
    """Disjoint candidate-index groups in canonical order.

    Groups are sorted by their smallest member index; members within a
    group are sorted ascending.
    """

    groups: tuple[tuple[int, ...], ...]
    group_of: dict[int, int]
    threshold: int

    @property
    def count(self) -> int:
        return len(self.groups)

    def sizes(self) -> list[int]:
        return [len(g) for g in self.groups]


def group(codebook: Codebook, threshold: int) -> Partition:
    """Connected components of the distance-<=threshold graph."""
    if threshold < 0:
        raise ParameterError("distance threshold must be >= 0")
    distinct = codebook.distinct()
    m = len(distinct)
    uf = UnionFind(m)
    if m > 1:
        seqs = np.asarray(distinct, dtype=np.int64)
        alphabet = int(seqs.max()) + 1
        counts = bag_counts(seqs, alphabet)
        iu, ju = np.triu_indices(m, 1)
        bag = np.abs(counts[iu] - counts[ju]).sum(axis=1)
        near = (bag + 1) // 2 <= threshold  # counting-filter lower bound
        if near.any():
            ai, aj = iu[near], ju[near]
            d = pairwise_capped(seqs[ai], seqs[aj], threshold + 1)
            for x, y in zip(ai[d <= threshold].tolist(), aj[d <= threshold].tolist()):
                uf.union(x, y)
    return _partition_from_components(codebook, distinct, uf, threshold)


def _partition_from_components(
    codebook: Codebook, distinct: list[Tokens], uf: UnionFind, threshold: int
) -> Partition:
    seq_root = {seq: uf.find(idx) for idx, seq in enumerate(distinct)}
    members: dict[int, list[int]] = {}
    for index, seq in enumerate(codebook.entries):
        members.setdefault(seq_root[seq], []).append(index)
    ordered = sorted(members.values(), key=lambda g: g[0])
    group_of = {}
    for gid, g in enumerate(ordered):
        for index in g:
            group_of[index] = gid
    return Partition(
        groups=tuple(tuple(g) for g in ordered),
        group_of=group_of,
        threshold=threshold,
    )
