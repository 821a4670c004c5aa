"""Resolving sets and metric dimension.

A query set R resolves a graph when the vector of hop distances to R is
different for every node, i.e. observing d(R, v) pins down v exactly.  The
metric dimension is the smallest size of a resolving set.  ``md_exact``
finds it by exhaustive search over subsets in increasing cardinality;
``md_greedy`` is the scalable stand-in that adds one query at a time to cut
the number of still-confusable node pairs.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .graphs import (
    DisconnectedGraphError,
    DistanceMatrix,
    Graph,
    distance_matrix,
    matrix_is_connected,
)


class CapExceededError(RuntimeError):
    """A capped search ran out of budget before producing its answer."""


@dataclass(frozen=True)
class QuerySet:
    """An ordered set of query nodes; indices are distinct and nonnegative."""

    nodes: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(v < 0 for v in self.nodes):
            raise ValueError("query nodes must be nonnegative")
        if len(set(self.nodes)) != len(self.nodes):
            raise ValueError("duplicate query node")

    def __len__(self) -> int:
        return len(self.nodes)

    def __iter__(self):
        return iter(self.nodes)


def observation_vector(dm: DistanceMatrix, r: QuerySet, v: int) -> np.ndarray:
    """Distances from each query in ``r`` to target ``v``, in query order."""
    if not 0 <= v < dm.n:
        raise IndexError(f"target {v} out of range")
    rows = np.asarray(r.nodes, dtype=np.int64)
    if rows.size and (rows.max() >= dm.n):
        raise IndexError("query node out of range")
    return dm.d[rows, v]


def candidate_targets(dm: DistanceMatrix, r: QuerySet, obs) -> np.ndarray:
    """All nodes whose observation vector under ``r`` equals ``obs``.

    An empty query set leaves every node a candidate.
    """
    obs_arr = np.asarray(obs, dtype=np.int64)
    if obs_arr.shape != (len(r),):
        raise ValueError(f"observation length {obs_arr.size} != |R| = {len(r)}")
    rows = np.asarray(r.nodes, dtype=np.int64)
    if rows.size == 0:
        return np.arange(dm.n)
    if rows.max() >= dm.n:
        raise IndexError("query node out of range")
    mask = (dm.d[rows] == obs_arr[:, None]).all(axis=0)
    return np.nonzero(mask)[0]


def is_resolving(dm: DistanceMatrix, r: QuerySet) -> bool:
    """True iff distinct nodes get distinct observation vectors under ``r``."""
    rows = np.asarray(r.nodes, dtype=np.int64)
    if rows.size == 0:
        return dm.n <= 1
    if rows.max() >= dm.n:
        raise IndexError("query node out of range")
    signatures = dm.d[rows]
    return np.unique(signatures, axis=1).shape[1] == dm.n


def _pair_separation_masks(labels: np.ndarray) -> tuple[list[int], int]:
    """Per-query bitmask over target pairs the query tells apart.

    ``labels[w, t]`` is the response to query ``w`` when the target is
    ``t``.  Pair (x, y) with x < y gets one bit; query w separates it when
    labels[w, x] != labels[w, y].  Returns (masks, full_mask).
    """
    n_targets = labels.shape[1]
    pairs = list(combinations(range(n_targets), 2))
    full = (1 << len(pairs)) - 1
    masks = []
    for w in range(labels.shape[0]):
        row = labels[w]
        m = 0
        for k, (x, y) in enumerate(pairs):
            if row[x] != row[y]:
                m |= 1 << k
        masks.append(m)
    return masks, full


def _min_separating_subset(
    masks: list[int], full: int, cap: int
) -> tuple[int, tuple[int, ...]] | None:
    """Smallest subset of queries whose separation masks cover ``full``.

    Searches cardinalities 1..cap; within a cardinality, combinations are
    tried in lexicographic order, so the first hit is the canonical
    witness.  Returns None when even the union of all masks falls short
    (separation is impossible), raises nothing itself.
    """
    union = 0
    useful = [w for w, m in enumerate(masks) if m]
    for m in masks:
        union |= m
    if union != full:
        return None
    for k in range(1, cap + 1):
        for combo in combinations(useful, k):
            acc = 0
            for w in combo:
                acc |= masks[w]
            if acc == full:
                return k, combo
    return None


def md_exact(g: Graph, cap: int | None = None) -> tuple[int, QuerySet]:
    """Exact metric dimension with a lexicographically-first witness.

    Exhaustive search in increasing cardinality over query subsets, with a
    pairwise-distinguishability table as the pruning structure.  Meant for
    n up to around 20.  ``cap`` limits the cardinality searched; if no
    resolving set exists within it, CapExceededError is raised.
    """
    dm = distance_matrix(g)
    if not matrix_is_connected(dm):
        raise DisconnectedGraphError("metric dimension needs a connected graph")
    if g.n == 1:
        return 0, QuerySet(())
    limit = g.n if cap is None else cap
    if not 1 <= limit <= g.n:
        raise ValueError(f"cap must be in 1..{g.n}, got {cap}")
    masks, full = _pair_separation_masks(dm.d)
    found = _min_separating_subset(masks, full, limit)
    if found is None:
        raise CapExceededError(f"no resolving set of size <= {limit}")
    size, witness = found
    return size, QuerySet(witness)


def _greedy_refinement(labels: np.ndarray) -> list[int]:
    """Greedy query selection by partition refinement.

    Maintains the partition of targets into classes with equal responses to
    the chosen queries.  Each round picks the query minimizing the number
    of still-unseparated pairs, breaking ties by smaller worst-class size
    and then by lower query index.  Targets in singleton classes drop out.
    """
    n_queries, n_targets = labels.shape
    active = np.arange(n_targets)
    class_of = np.zeros(n_targets, dtype=np.int64)
    chosen: list[int] = []
    chosen_set: set[int] = set()
    width = int(labels.max()) + 1 if labels.size else 1
    while active.size:
        best = None
        for w in range(n_queries):
            if w in chosen_set:
                continue
            keys = class_of[active] * width + labels[w, active]
            counts = np.bincount(keys)
            counts = counts[counts > 1]
            if counts.size:
                unresolved = int((counts * (counts - 1) // 2).sum())
                worst = int(counts.max())
            else:
                unresolved = 0
                worst = 1
            score = (unresolved, worst, w)
            if best is None or score < best:
                best = score
        if best is None:  # every query used and pairs remain: not separable
            raise ValueError("targets are not separable by the given queries")
        unresolved, _, w = best
        total_pairs_before = _unresolved_pairs(class_of, active)
        if unresolved >= total_pairs_before:
            raise ValueError("targets are not separable by the given queries")
        chosen.append(w)
        chosen_set.add(w)
        keys = class_of[active] * width + labels[w, active]
        _, new_ids, counts = np.unique(keys, return_inverse=True, return_counts=True)
        class_of[active] = new_ids
        active = active[counts[new_ids] > 1]
    return chosen


def _unresolved_pairs(class_of: np.ndarray, active: np.ndarray) -> int:
    if not active.size:
        return 0
    _, counts = np.unique(class_of[active], return_counts=True)
    return int((counts * (counts - 1) // 2).sum())


def md_greedy(g: Graph, dm: DistanceMatrix | None = None) -> QuerySet:
    """Greedy resolving set; scalable upper bound on the metric dimension.

    Pass a precomputed ``dm`` to skip the all-pairs BFS.  The result is
    verified resolving before it is returned.
    """
    if dm is None:
        dm = distance_matrix(g)
    if not matrix_is_connected(dm):
        raise DisconnectedGraphError("metric dimension needs a connected graph")
    if g.n == 1:
        return QuerySet(())
    chosen = _greedy_refinement(dm.d)
    result = QuerySet(tuple(chosen))
    if not is_resolving(dm, result):  # pragma: no cover - termination guarantees this
        raise RuntimeError("greedy produced a non-resolving set")
    return result
