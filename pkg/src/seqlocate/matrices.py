"""Binary-matrix warm-up for localization games.

Columns of a 0/1 matrix play the role of hidden targets and rows the role
of queries: querying row w reveals the bit A[w, target].  Column
distinctness is the resolvability condition, the query complexity QC is
the smallest row set keeping columns distinct, and SQC is its adaptive
game value.  For Bernoulli(q) entries the number of rows where the
distinct/not-distinct probability flips has a sharp threshold, computed by
``qc_threshold``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .game import AdversaryPolicy, Player1Policy, Transcript, _LabelGameEngine, _play_on_labels
from .localization import CapExceededError, _greedy_refinement, _min_separating_subset, _pair_separation_masks


class UndefinedQueryComplexityError(RuntimeError):
    """QC/SQC asked of a matrix with equal columns: no row set can resolve."""


class MatrixFormatError(ValueError):
    """Malformed matrix text input."""


@dataclass(frozen=True)
class BinaryMatrix:
    """An m-by-n 0/1 matrix; rows are queries, columns are candidate targets."""

    m: int
    n: int
    bits: np.ndarray  # (m, n) uint8, entries in {0, 1}

    def __post_init__(self) -> None:
        if self.m < 1 or self.n < 1:
            raise ValueError("matrix dimensions must be positive")
        if self.bits.shape != (self.m, self.n):
            raise ValueError("bit array shape does not match declared dimensions")
        if self.bits.dtype != np.uint8 or not np.isin(self.bits, (0, 1)).all():
            raise ValueError("entries must be uint8 zeros and ones")


class CollisionStats(NamedTuple):
    x_pairs: int  # unordered pairs of identical columns
    z_zero: int  # all-zero columns
    z_one: int  # all-one columns


def sample_bernoulli(m: int, n: int, q: float, seed) -> BinaryMatrix:
    """I.i.d. Bernoulli(q) entries; identical seed means identical matrix."""
    if m < 1 or n < 1:
        raise ValueError("matrix dimensions must be positive")
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"need 0 <= q <= 1, got {q}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    bits = (rng.random((m, n)) < q).astype(np.uint8)
    return BinaryMatrix(m, n, bits)


def _packed_columns(a: BinaryMatrix) -> np.ndarray:
    """Columns packed into 64-bit words, one row per column."""
    packed = np.packbits(a.bits, axis=0)  # ceil(m/8) x n bytes
    cols = np.ascontiguousarray(packed.T)
    pad = (-cols.shape[1]) % 8
    if pad:
        cols = np.concatenate([cols, np.zeros((cols.shape[0], pad), dtype=np.uint8)], axis=1)
    return cols.view(np.uint64)


def collision_stats(a: BinaryMatrix) -> CollisionStats:
    """Column collision counts: equal pairs, all-zero and all-one columns.

    Columns are compared as packed 64-bit words after a lexicographic
    sort, so the count runs in about n log n word operations; dimension
    sweeps at n in the thousands rely on this.
    """
    keys = _packed_columns(a)
    order = np.lexsort(keys.T[::-1])
    sorted_keys = keys[order]
    if sorted_keys.shape[0] > 1:
        boundary = np.nonzero((sorted_keys[1:] != sorted_keys[:-1]).any(axis=1))[0]
        run_edges = np.concatenate([[0], boundary + 1, [sorted_keys.shape[0]]])
        runs = np.diff(run_edges)
    else:
        runs = np.array([1])
    x_pairs = int((runs * (runs - 1) // 2).sum())
    col_sums = a.bits.sum(axis=0)
    return CollisionStats(
        x_pairs=x_pairs,
        z_zero=int((col_sums == 0).sum()),
        z_one=int((col_sums == a.m).sum()),
    )


def columns_pairwise_distinct(a: BinaryMatrix) -> bool:
    return collision_stats(a).x_pairs == 0


def qc_threshold(n: int, q: float) -> float:
    """Row count where Bernoulli(q) columns flip from colliding to distinct.

    Defined for 0 < q <= 1/2; larger q is mapped to 1 - q by the 0/1
    symmetry of the entries (the collision probability q**2 + (1-q)**2 is
    already symmetric).
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must lie strictly between 0 and 1, got {q}")
    if q > 0.5:
        q = 1.0 - q
    collision = q * q + (1.0 - q) * (1.0 - q)
    # log(n) / log(1/sqrt(collision)), simplified to avoid the sqrt rounding
    return -2.0 * math.log(n) / math.log(collision)


def gamma_qc_sqc(q: float) -> tuple[float, float]:
    """Decay parameters (gamma_qc, gamma_sqc) for Bernoulli(q) matrices.

    gamma_sqc = max(q, 1-q) is the worst cell fraction a single adaptive
    bit query can leave; gamma_qc = sqrt(q**2 + (1-q)**2) is the
    root-mean-square analogue for non-adaptive row sets.
    """
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must lie strictly between 0 and 1, got {q}")
    return math.hypot(q, 1.0 - q), max(q, 1.0 - q)


def _require_distinct(a: BinaryMatrix) -> None:
    if not columns_pairwise_distinct(a):
        raise UndefinedQueryComplexityError(
            "matrix has equal columns; no row set can tell the targets apart"
        )


def qc_exact(a: BinaryMatrix, cap: int | None = None) -> tuple[int, tuple[int, ...]]:
    """Smallest row set keeping all columns distinct, with its witness.

    Exhaustive search in increasing cardinality (lexicographic witness).
    Raises UndefinedQueryComplexityError when the full matrix already has
    equal columns, CapExceededError when nothing fits within ``cap``.
    """
    _require_distinct(a)
    limit = a.m if cap is None else cap
    if not 1 <= limit <= a.m:
        raise ValueError(f"cap must be in 1..{a.m}, got {cap}")
    if a.n == 1:
        return 0, ()
    masks, full = _pair_separation_masks(a.bits)
    found = _min_separating_subset(masks, full, limit)
    if found is None:
        raise CapExceededError(f"no distinguishing row set of size <= {limit}")
    return found


def qc_greedy(a: BinaryMatrix) -> tuple[int, ...]:
    """Greedy row set keeping all columns distinct (partition refinement)."""
    _require_distinct(a)
    if a.n == 1:
        return ()
    return tuple(_greedy_refinement(a.bits))


def sqc_exact(a: BinaryMatrix, cap: int | None = None) -> int:
    """Adaptive game value on the matrix: bit queries, both sides optimal."""
    _require_distinct(a)
    if a.n == 1:
        return 0
    engine = _LabelGameEngine(a.bits)
    value = engine.minimax_value()
    if cap is not None and value > cap:
        raise CapExceededError(f"game value {value} exceeds cap {cap}")
    return value


def sqc_maxgain_worstcase(a: BinaryMatrix, cap: int | None = None) -> int:
    """Worst-case MAX-GAIN step count on the matrix game."""
    _require_distinct(a)
    if a.n == 1:
        return 0
    engine = _LabelGameEngine(a.bits)
    value = engine.maxgain_worst_value()
    if cap is not None and value > cap:
        raise CapExceededError(f"worst-case step count {value} exceeds cap {cap}")
    return value


def sqc_play(
    a: BinaryMatrix,
    p1: Player1Policy,
    p2: AdversaryPolicy,
    step_cap: int | None = None,
) -> Transcript:
    """Play one matrix game; identical semantics to the graph game with
    cells indexed by the bit values {0, 1}."""
    _require_distinct(a)
    return _play_on_labels(a.bits, p1, p2, step_cap)


def read_matrix(text: str) -> BinaryMatrix:
    """Parse the plain-text format: header "M N", then M rows of 0/1 digits."""
    lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln]
    if not lines:
        raise MatrixFormatError("empty input")
    head = lines[0].split()
    if len(head) != 2:
        raise MatrixFormatError(f"bad header {lines[0]!r}, expected 'M N'")
    try:
        m, n = int(head[0]), int(head[1])
    except ValueError as exc:
        raise MatrixFormatError(f"bad header {lines[0]!r}") from exc
    if m < 1 or n < 1:
        raise MatrixFormatError(f"bad dimensions m={m}, n={n}")
    if len(lines) - 1 != m:
        raise MatrixFormatError(f"header promises {m} rows, found {len(lines) - 1}")
    rows = []
    for ln in lines[1:]:
        if len(ln) != n or set(ln) - {"0", "1"}:
            raise MatrixFormatError(f"bad row {ln!r}, expected {n} 0/1 digits")
        rows.append([int(ch) for ch in ln])
    return BinaryMatrix(m, n, np.array(rows, dtype=np.uint8))


def write_matrix(a: BinaryMatrix) -> str:
    out = [f"{a.m} {a.n}"]
    out.extend("".join(str(int(b)) for b in row) for row in a.bits)
    return "\n".join(out) + "\n"
