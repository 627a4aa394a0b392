"""Proportional leaf allocation and per-group bit-prefix codes.

A complete binary tree with k = 2^ell leaves is shared out so that a group
of size q owns exactly q leaves; the group's code is the common prefix of
its leaves' root-to-leaf paths.  Routing ell message bits to a leaf and
reading off the owner therefore hits group g with probability exactly
|g| / k, which is the property the security argument rests on.

Allocation order and tie-breaks are normative: groups are processed by
descending size (ties by canonical group order); each group takes the
deepest node whose subtree still holds enough free leaves (ties leftmost)
and occupies the leftmost free leaves inside it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParameterError
from .grouping import Partition


@dataclass(frozen=True)
class PrefixCodebook:
    """Leaf ownership and codes for one block's partition."""

    ell: int
    leaf_owner: tuple[int, ...]
    codes: dict[int, str]
    merged: dict[int, int]

    def code_of(self, gid: int) -> str:
        return self.codes[self.merged[gid]]


def _leaf_path(leaf: int, ell: int) -> str:
    return format(leaf, f"0{ell}b") if ell else ""


def _common_prefix(a: str, b: str) -> str:
    n = 0
    for x, y in zip(a, b):
        if x != y:
            break
        n += 1
    return a[:n]


def allocate(partition: Partition, k: int) -> PrefixCodebook:
    """Assign leaves and codes to every group of the partition."""
    if k < 1 or k & (k - 1):
        raise ParameterError(f"k must be a power of two, got {k}")
    sizes = partition.sizes()
    if sum(sizes) != k:
        raise ParameterError(f"group sizes {sizes} do not sum to k={k}")
    ell = k.bit_length() - 1
    free = [True] * k
    owner = [-1] * k
    codes: dict[int, str] = {}
    order = sorted(range(len(sizes)), key=lambda g: (-sizes[g], g))
    for gid in order:
        q = sizes[gid]
        node_depth, node_pos = _deepest_fitting_node(free, ell, q)
        span = 1 << (ell - node_depth)
        start = node_pos * span
        taken = []
        for leaf in range(start, start + span):
            if free[leaf]:
                free[leaf] = False
                owner[leaf] = gid
                taken.append(leaf)
                if len(taken) == q:
                    break
        codes[gid] = _common_prefix(
            _leaf_path(taken[0], ell), _leaf_path(taken[-1], ell)
        )
    merged: dict[int, int] = {}
    first_with_code: dict[str, int] = {}
    for gid in range(len(sizes)):
        rep = first_with_code.setdefault(codes[gid], gid)
        merged[gid] = rep
    return PrefixCodebook(
        ell=ell, leaf_owner=tuple(owner), codes=codes, merged=merged
    )


def _deepest_fitting_node(free: list[bool], ell: int, q: int) -> tuple[int, int]:
    """Deepest (then leftmost) node whose subtree has >= q free leaves."""
    for depth in range(ell, -1, -1):
        span = 1 << (ell - depth)
        if span < q:
            continue
        for pos in range(1 << depth):
            start = pos * span
            if sum(free[start : start + span]) >= q:
                return depth, pos
    raise ParameterError("no node can hold the group (sizes inconsistent)")


def unit_match(pcb: PrefixCodebook, bits: str) -> tuple[int, str]:
    """Route the first ell bits root-to-leaf; return (merged group, its code).

    The returned code is the consumed prefix and is always a prefix of the
    routed bits, because owned leaves share it by construction.
    """
    if len(bits) < pcb.ell:
        raise ParameterError(f"need at least {pcb.ell} bits, got {len(bits)}")
    leaf = int(bits[: pcb.ell], 2) if pcb.ell else 0
    gid = pcb.merged[pcb.leaf_owner[leaf]]
    return gid, pcb.codes[gid]


def expected_bits_per_block(pcb: PrefixCodebook, partition: Partition) -> float:
    """Capacity: sum over groups of (q/k) * |code|, in bits."""
    k = len(pcb.leaf_owner)
    return sum(
        len(pcb.codes[pcb.merged[gid]]) * len(g) / k
        for gid, g in enumerate(partition.groups)
    )
