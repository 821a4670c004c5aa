"""The adaptive localization game.

Player 1 queries nodes one at a time and learns the hop distance from each
query to a hidden target; the adversary answers with any distance that is
consistent with at least one remaining candidate.  The value of the game
with both sides optimal is the sequential metric dimension.  MAX-GAIN is
the greedy query rule: pick the node whose distance partition has the
smallest largest cell.

The machinery is generic over a response table ``labels[w, t]`` (the answer
to query w when the target is t), so the same engine drives both the graph
game (labels = hop distances) and the binary-matrix game.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .graphs import DisconnectedGraphError, DistanceMatrix, Graph, distance_matrix, matrix_is_connected
from .localization import CapExceededError, QuerySet

_P1_KINDS = ("max-gain", "exact-minimax", "fixed-sequence")
_ADV_KINDS = ("fixed-target", "greedy-max-cell", "exact-minimax")

# Exact minimax state is memoized on candidate bitsets, one bit per target.
_BITSET_LIMIT = 64


@dataclass(frozen=True)
class Player1Policy:
    """Query-selection rule for the seeker."""

    kind: str
    sequence: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in _P1_KINDS:
            raise ValueError(f"unknown player-1 policy {self.kind!r}")
        if self.kind == "fixed-sequence":
            if not self.sequence:
                raise ValueError("fixed-sequence policy needs at least one node")
            if len(set(self.sequence)) != len(self.sequence):
                raise ValueError("fixed-sequence nodes must be distinct")
        elif self.sequence:
            raise ValueError(f"policy {self.kind!r} takes no sequence")

    @classmethod
    def max_gain(cls) -> "Player1Policy":
        return cls("max-gain")

    @classmethod
    def exact_minimax(cls) -> "Player1Policy":
        return cls("exact-minimax")

    @classmethod
    def fixed_sequence(cls, nodes) -> "Player1Policy":
        return cls("fixed-sequence", tuple(int(v) for v in nodes))


@dataclass(frozen=True)
class AdversaryPolicy:
    """Answer-selection rule for the hider."""

    kind: str
    target: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in _ADV_KINDS:
            raise ValueError(f"unknown adversary policy {self.kind!r}")
        if self.kind == "fixed-target":
            if self.target is None or self.target < 0:
                raise ValueError("fixed-target policy needs a target node")
        elif self.target is not None:
            raise ValueError(f"policy {self.kind!r} takes no target")

    @classmethod
    def fixed_target(cls, target: int) -> "AdversaryPolicy":
        return cls("fixed-target", int(target))

    @classmethod
    def greedy_max_cell(cls) -> "AdversaryPolicy":
        return cls("greedy-max-cell")

    @classmethod
    def exact_minimax(cls) -> "AdversaryPolicy":
        return cls("exact-minimax")


@dataclass
class GameState:
    """One side's view of a running game: history plus remaining candidates."""

    queries: list[int]
    observations: list[int]
    candidates: np.ndarray

    def __post_init__(self) -> None:
        if len(self.queries) != len(self.observations):
            raise ValueError("queries and observations must have equal length")
        if len(set(self.queries)) != len(self.queries):
            raise ValueError("repeated query in history")


def initial_state(n: int) -> GameState:
    return GameState(queries=[], observations=[], candidates=np.arange(n))


@dataclass(frozen=True)
class TranscriptStep:
    step: int  # 1-based
    query: int
    answer: int
    candidates: int  # |T| after this step


@dataclass
class Transcript:
    """Record of one played game."""

    initial_candidates: int
    steps: list[TranscriptStep] = field(default_factory=list)
    resolved: bool = False
    final_candidates: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))

    @property
    def num_steps(self) -> int:
        return len(self.steps)

    def candidate_sizes(self) -> list[int]:
        """|T| before play, then after each step."""
        return [self.initial_candidates] + [s.candidates for s in self.steps]

    def to_json_lines(self) -> str:
        lines = [
            json.dumps(
                {"step": s.step, "query": s.query, "answer": s.answer, "candidates": s.candidates}
            )
            for s in self.steps
        ]
        return "\n".join(lines) + ("\n" if lines else "")


class _LabelGameEngine:
    """Shared machinery over a response table, array path plus bitset path.

    The array path (candidate index arrays, bincount scoring) scales to
    thousands of targets and drives played games.  The bitset path encodes
    candidate sets as ints for memoized exact minimax, and is limited to
    64 targets.
    """

    def __init__(self, labels: np.ndarray) -> None:
        labels = np.asarray(labels)
        if labels.ndim != 2 or labels.shape[0] == 0 or labels.shape[1] == 0:
            raise ValueError("label table must be 2-d and nonempty")
        self.labels = labels
        self.nq, self.nt = labels.shape
        self._cells: list[dict[int, int]] | None = None
        self._value_memo: dict[int, int] = {}
        self._worst_memo: dict[int, int] = {}

    # ---- array path -------------------------------------------------

    def reducer_score(self, t: np.ndarray, w: int) -> int:
        counts = np.bincount(self.labels[w, t])
        return int(counts.max())

    def best_reducer(self, t: np.ndarray, pool) -> tuple[int, int]:
        """argmin of reducer score over the pool, lowest index on ties."""
        best_w = -1
        best_s = t.size + 1
        for w in pool:
            s = self.reducer_score(t, int(w))
            if s < best_s:
                best_s = s
                best_w = int(w)
        if best_w < 0:
            raise ValueError("empty query pool")
        return best_w, best_s

    def greedy_answer(self, t: np.ndarray, w: int) -> int:
        """Label of the largest cell of t under query w; smallest on ties."""
        counts = np.bincount(self.labels[w, t])
        return int(np.argmax(counts))

    def restrict(self, t: np.ndarray, w: int, l: int) -> np.ndarray:
        return t[self.labels[w, t] == l]

    # ---- bitset path ------------------------------------------------

    @property
    def full_mask(self) -> int:
        return (1 << self.nt) - 1

    def cell_bitmasks(self) -> list[dict[int, int]]:
        if self._cells is None:
            if self.nt > _BITSET_LIMIT:
                raise ValueError(
                    f"exact game machinery handles at most {_BITSET_LIMIT} targets, got {self.nt}"
                )
            cells: list[dict[int, int]] = []
            for w in range(self.nq):
                row = self.labels[w]
                d: dict[int, int] = {}
                for t in range(self.nt):
                    lab = int(row[t])
                    d[lab] = d.get(lab, 0) | (1 << t)
                cells.append(d)
            self._cells = cells
        return self._cells

    def _split(self, mask: int, w: int) -> list[int] | None:
        """Nonempty cells of mask under w, or None when w does not split."""
        out = []
        for cm in self.cell_bitmasks()[w].values():
            cell = mask & cm
            if cell == mask:
                return None
            if cell:
                out.append(cell)
        return out

    def minimax_value(self, mask: int | None = None) -> int:
        """Game value with both sides optimal, memoized on candidate bitsets.

        Queries whose partition leaves the candidate set whole are skipped;
        they can never be optimal.  A splitting query always exists here
        (any candidate separates itself in the graph game, and matrix
        callers pre-check column distinctness), so the recursion is
        well-founded.
        """
        if mask is None:
            mask = self.full_mask
        memo = self._value_memo

        def value(m: int) -> int:
            if m & (m - 1) == 0:
                return 0
            cached = memo.get(m)
            if cached is not None:
                return cached
            best: int | None = None
            for w in range(self.nq):
                cells = self._split(m, w)
                if cells is None:
                    continue
                worst = 0
                for cell in cells:
                    v = value(cell) + 1
                    if v > worst:
                        worst = v
                    if best is not None and worst >= best:
                        break
                if best is None or worst < best:
                    best = worst
                if best == 1:
                    break
            if best is None:
                raise ValueError("candidate set admits no splitting query")
            memo[m] = best
            return best

        return value(mask)

    def exact_p1_choice(self, mask: int) -> int:
        """Lowest-index query achieving the optimal game value from mask."""
        target_value = self.minimax_value(mask)
        for w in range(self.nq):
            cells = self._split(mask, w)
            if cells is None:
                continue
            worst = 1 + max(self.minimax_value(c) for c in cells)
            if worst == target_value:
                return w
        raise RuntimeError("no query achieves the computed value")  # pragma: no cover

    def exact_answer(self, mask: int, w: int) -> int:
        """Label maximizing the remaining game value; smallest on ties."""
        best_l: int | None = None
        best_v = -1
        for lab in sorted(self.cell_bitmasks()[w]):
            cell = mask & self.cell_bitmasks()[w][lab]
            if not cell:
                continue
            v = self.minimax_value(cell)
            if v > best_v:
                best_v = v
                best_l = lab
        if best_l is None:
            raise ValueError("no consistent answer")  # pragma: no cover
        return best_l

    def maxgain_choice_bitset(self, mask: int) -> tuple[int, int]:
        """MAX-GAIN on a bitset state; ties to the lowest query index.

        Matches ``best_reducer`` over the not-yet-queried pool: an already
        queried node never splits the current candidate set, so it can
        never beat a splitting query, and the lowest-index tie rule picks
        the same winner in both paths.
        """
        size = mask.bit_count()
        best_w = -1
        best_s = size + 1
        for w in range(self.nq):
            worst = 0
            for cm in self.cell_bitmasks()[w].values():
                c = (mask & cm).bit_count()
                if c > worst:
                    worst = c
            if worst < best_s:
                best_s = worst
                best_w = w
        return best_w, best_s

    def maxgain_worst_value(self, mask: int | None = None) -> int:
        """Steps needed when player 1 is pinned to MAX-GAIN and the
        adversary plays the full worst case (tree maximum, memoized)."""
        if mask is None:
            mask = self.full_mask
        memo = self._worst_memo

        def walk(m: int) -> int:
            if m & (m - 1) == 0:
                return 0
            cached = memo.get(m)
            if cached is not None:
                return cached
            w, score = self.maxgain_choice_bitset(m)
            if score >= m.bit_count():
                raise ValueError("candidate set admits no splitting query")
            cells = self._split(m, w)
            result = 1 + max(walk(c) for c in cells)
            memo[m] = result
            return result

        return walk(mask)

    def mask_of(self, t: np.ndarray) -> int:
        m = 0
        for j in t:
            m |= 1 << int(j)
        return m


def _play_on_labels(
    labels: np.ndarray,
    p1: Player1Policy,
    p2: AdversaryPolicy,
    step_cap: int | None,
) -> Transcript:
    engine = _LabelGameEngine(labels)
    nq, nt = engine.nq, engine.nt
    if p2.kind == "fixed-target" and not p2.target < nt:
        raise ValueError(f"target {p2.target} out of range")
    if p1.kind == "fixed-sequence" and max(p1.sequence) >= nq:
        raise ValueError("fixed-sequence node out of range")
    cap = nt if step_cap is None else step_cap
    if cap < 1:
        raise ValueError(f"step cap must be >= 1, got {step_cap}")
    t = np.arange(nt)
    queried: set[int] = set()
    transcript = Transcript(initial_candidates=nt)
    while t.size > 1 and len(transcript.steps) < cap:
        if p1.kind == "max-gain":
            pool = [w for w in range(nq) if w not in queried]
            w, _ = engine.best_reducer(t, pool)
        elif p1.kind == "exact-minimax":
            w = engine.exact_p1_choice(engine.mask_of(t))
        else:
            if len(transcript.steps) >= len(p1.sequence):
                break  # sequence exhausted with candidates remaining
            w = p1.sequence[len(transcript.steps)]
        if p2.kind == "fixed-target":
            l = int(labels[w, p2.target])
        elif p2.kind == "greedy-max-cell":
            l = engine.greedy_answer(t, w)
        else:
            l = engine.exact_answer(engine.mask_of(t), w)
        t = engine.restrict(t, w, l)
        if t.size == 0:  # pragma: no cover - answers are always consistent
            raise RuntimeError("inconsistent answer emptied the candidate set")
        queried.add(int(w))
        transcript.steps.append(
            TranscriptStep(step=len(transcript.steps) + 1, query=int(w), answer=int(l), candidates=int(t.size))
        )
    transcript.resolved = t.size == 1
    transcript.final_candidates = t
    return transcript


def _require_connected(dm: DistanceMatrix) -> None:
    if not matrix_is_connected(dm):
        raise DisconnectedGraphError("the distance game needs a connected graph")


def distance_partition(dm: DistanceMatrix, t: np.ndarray, w: int) -> dict[int, np.ndarray]:
    """Partition of candidate set ``t`` by distance to ``w``; nonempty cells only."""
    t = np.asarray(t)
    if t.size == 0:
        raise ValueError("candidate set is empty")
    if not 0 <= w < dm.n:
        raise IndexError(f"query {w} out of range")
    row = dm.d[w, t]
    return {int(l): t[row == l] for l in np.unique(row)}


def reducer_score(dm: DistanceMatrix, t: np.ndarray, w: int) -> int:
    """Size of the largest cell of the distance partition of ``t`` under ``w``."""
    t = np.asarray(t)
    if t.size == 0:
        raise ValueError("candidate set is empty")
    if not 0 <= w < dm.n:
        raise IndexError(f"query {w} out of range")
    _, counts = np.unique(dm.d[w, t], return_counts=True)
    return int(counts.max())


def max_gain_query(dm: DistanceMatrix, state: GameState, pool=None) -> int:
    """The MAX-GAIN choice: query minimizing the worst remaining cell.

    The default pool is every node not yet queried.  Ties go to the lowest
    node index.
    """
    if state.candidates.size < 2:
        raise ValueError("max-gain needs at least two candidates")
    if pool is None:
        queried = set(state.queries)
        pool = [w for w in range(dm.n) if w not in queried]
    else:
        pool = [int(w) for w in pool]
    if not pool:
        raise ValueError("empty query pool")
    best_w = -1
    best_s = state.candidates.size + 1
    for w in pool:
        s = reducer_score(dm, state.candidates, w)
        if s < best_s:
            best_s = s
            best_w = w
    return best_w


def adversary_answer(dm: DistanceMatrix, state: GameState, w: int, policy: AdversaryPolicy) -> int:
    """The adversary's distance answer to query ``w`` under ``policy``."""
    if state.candidates.size == 0:
        raise ValueError("candidate set is empty")
    if not 0 <= w < dm.n:
        raise IndexError(f"query {w} out of range")
    if policy.kind == "fixed-target":
        if policy.target >= dm.n:
            raise ValueError(f"target {policy.target} out of range")
        return int(dm.d[w, policy.target])
    engine = _LabelGameEngine(dm.d)
    if policy.kind == "greedy-max-cell":
        return engine.greedy_answer(state.candidates, w)
    return engine.exact_answer(engine.mask_of(state.candidates), w)


def play_game(
    dm: DistanceMatrix,
    p1: Player1Policy,
    p2: AdversaryPolicy,
    step_cap: int | None = None,
) -> Transcript:
    """Play one game to resolution or to the step cap.

    Reaching the cap with more than one candidate left is reported on the
    transcript (``resolved`` False), not raised.
    """
    _require_connected(dm)
    return _play_on_labels(dm.d, p1, p2, step_cap)


def smd_exact(g: Graph, cap: int | None = None) -> int:
    """Sequential metric dimension: game value with both sides optimal.

    Memoized minimax over candidate bitsets; meant for small graphs
    (hard limit 64 nodes).  Raises CapExceededError when the value
    exceeds ``cap``.
    """
    dm = distance_matrix(g)
    _require_connected(dm)
    if g.n == 1:
        return 0
    engine = _LabelGameEngine(dm.d)
    value = engine.minimax_value()
    if cap is not None and value > cap:
        raise CapExceededError(f"game value {value} exceeds cap {cap}")
    return value


def smd_maxgain_worstcase(g: Graph, cap: int | None = None) -> int:
    """Worst-case step count of the MAX-GAIN rule against any adversary.

    Full maximum over adversary answers (memoized tree walk), with player 1
    pinned to MAX-GAIN.  The large-scale estimate counterpart is a single
    ``play_game`` against the greedy-max-cell adversary.
    """
    dm = distance_matrix(g)
    _require_connected(dm)
    if g.n == 1:
        return 0
    engine = _LabelGameEngine(dm.d)
    value = engine.maxgain_worst_value()
    if cap is not None and value > cap:
        raise CapExceededError(f"worst-case step count {value} exceeds cap {cap}")
    return value


def f_separator_exists(
    dm: DistanceMatrix, w_set, gamma: float, f_value: float
) -> tuple[bool, int | None]:
    """Does some query split node set W with no cell above |W|*gamma + f_value?

    Scans queries in index order and returns the first witness, or
    (False, None).
    """
    nodes = np.asarray(list(w_set) if isinstance(w_set, QuerySet) else w_set, dtype=np.int64)
    if nodes.size == 0:
        raise ValueError("W must be nonempty")
    if nodes.min() < 0 or nodes.max() >= dm.n:
        raise IndexError("node in W out of range")
    bound = nodes.size * gamma + f_value
    for w in range(dm.n):
        _, counts = np.unique(dm.d[w, nodes], return_counts=True)
        if counts.max() <= bound:
            return True, w
    return False, None
