"""Monte Carlo harness: dimension sweeps, threshold sweeps, level fractions.

Every trial derives its own RNG seed from the base seed and the cell
coordinates, so trials are independent of execution order and thread
count, and re-running a config reproduces the output byte for byte.
Wall-clock timings are kept on the in-memory records for diagnostics but
never serialized, precisely to keep reruns byte-identical.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from time import perf_counter

import numpy as np

from .ermodel import bound_prediction, er_parameters, predicted_level_fractions, sample_gnp
from .game import AdversaryPolicy, Player1Policy, play_game, smd_exact
from .graphs import Graph, distance_matrix, distances_from_sources, is_connected
from .localization import md_greedy
from .matrices import columns_pairwise_distinct, sample_bernoulli, qc_threshold

KIND_MD_SMD_SWEEP = "md_smd_sweep"
KIND_THRESHOLD_SWEEP = "threshold_sweep"
KIND_LEVEL_FRACTIONS = "level_fractions"
_KINDS = (KIND_MD_SMD_SWEEP, KIND_THRESHOLD_SWEEP, KIND_LEVEL_FRACTIONS)

_MAX_RESAMPLES = 10

_P_RULE = re.compile(r"^\s*([0-9.eE+-]+)\s*/\s*N\^\s*([0-9.eE+-]+)\s*$")


class ExperimentError(RuntimeError):
    """A sweep cell could not be completed (e.g. persistent disconnection)."""


@dataclass
class ExperimentConfig:
    """One experiment: a grid of cells plus execution knobs.

    ``p_or_q`` is either a list of values applied to every n, or a
    parametric rule string "c/N^a" evaluated per n.  ``caps`` recognizes
    "step_cap" (per-game step limit; default n) and "exact_n_limit" (run
    the exact game value as well for n at or below it; default 0, off).
    ``m_values`` (threshold sweeps) defaults to a grid straddling the
    predicted threshold.  ``sources_per_graph`` applies to level-fraction
    runs.
    """

    kind: str
    n_values: list[int]
    p_or_q: list[float] | str
    trials: int
    base_seed: int
    caps: dict = field(default_factory=dict)
    output_path: str = "sweep.csv"
    m_values: list[int] | None = None
    sources_per_graph: int = 50
    threads: int = 1

    def __post_init__(self) -> None:
        kind = self.kind.lower().replace("-", "_")
        if kind not in _KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        self.kind = kind
        if not self.n_values or any(n < 3 for n in self.n_values):
            raise ValueError("n_values must be nonempty with every n >= 3")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.sources_per_graph < 1:
            raise ValueError("sources_per_graph must be >= 1")
        if isinstance(self.p_or_q, str):
            if _P_RULE.match(self.p_or_q) is None:
                raise ValueError(f"bad p rule {self.p_or_q!r}, expected 'c/N^a'")
        elif not self.p_or_q:
            raise ValueError("p_or_q must be nonempty")

    def p_values_for(self, n: int) -> list[float]:
        if isinstance(self.p_or_q, str):
            match = _P_RULE.match(self.p_or_q)
            coeff, power = float(match.group(1)), float(match.group(2))
            return [coeff / n**power]
        return [float(p) for p in self.p_or_q]

    @property
    def step_cap(self) -> int | None:
        return self.caps.get("step_cap")

    @property
    def exact_n_limit(self) -> int:
        return int(self.caps.get("exact_n_limit", 0))

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json_file(cls, path) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def derive_trial_seed(base_seed: int, *parts) -> int:
    """Stable per-trial seed: base_seed XOR a hash of the cell coordinates.

    The hash must not vary across processes or runs, so it is built from a
    cryptographic digest of the repr of the parts, not from ``hash()``.
    """
    digest = hashlib.blake2b(repr(parts).encode("utf-8"), digest_size=8).digest()
    return (int(base_seed) ^ int.from_bytes(digest, "big")) & (2**63 - 1)


@dataclass
class TrialRecord:
    n: int
    p: float
    trial_index: int
    seed: int
    md_greedy_size: int
    smd_estimate_steps: int
    smd_exact: int | None
    bound_lower: float | None
    bound_upper: float | None
    md_predicted: float | None
    wall_time_ms: float
    # In-memory only: |T| before play followed by |T| after each step.
    candidate_trajectory: list[int] = field(default_factory=list)


TRIAL_CSV_FIELDS = [
    "n",
    "p",
    "trial_index",
    "seed",
    "md_greedy_size",
    "smd_estimate_steps",
    "smd_exact",
    "bound_lower",
    "bound_upper",
    "md_predicted",
]


@dataclass
class SummaryRow:
    n: int
    p: float
    trials: int
    md_greedy_mean: float
    md_greedy_stderr: float
    smd_estimate_mean: float
    smd_estimate_stderr: float
    bound_lower: float | None
    bound_upper: float | None
    md_predicted: float | None
    estimator: str = "maxgain-vs-greedy-adversary-lower-estimate"


SUMMARY_CSV_FIELDS = [
    "n",
    "p",
    "trials",
    "md_greedy_mean",
    "md_greedy_stderr",
    "smd_estimate_mean",
    "smd_estimate_stderr",
    "bound_lower",
    "bound_upper",
    "md_predicted",
    "estimator",
]


@dataclass
class ThresholdRow:
    n: int
    q: float
    m: int
    trials: int
    p_distinct: float


THRESHOLD_CSV_FIELDS = ["n", "q", "m", "trials", "p_distinct"]


@dataclass
class LevelFractionRow:
    n: int
    p: float
    level: int
    empirical_fraction: float
    predicted_fraction: float | None
    ratio_max_deviation: float | None  # only for levels at or below the regime index


LEVEL_CSV_FIELDS = [
    "n",
    "p",
    "level",
    "empirical_fraction",
    "predicted_fraction",
    "ratio_max_deviation",
]


def _format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".6g")
    return str(value)


def write_csv(rows, path, fields) -> None:
    """Write dataclass rows with a fixed column order and LF endings.

    Floats carry 6 significant digits; identical rows always serialize to
    identical bytes.
    """
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(fields)
        for row in rows:
            writer.writerow([_format_value(getattr(row, f)) for f in fields])


def summary_path_for(output_path) -> Path:
    p = Path(output_path)
    return p.with_name(p.stem + ".summary" + p.suffix)


def _map_ordered(fn, tasks, threads: int):
    """Apply fn to tasks, possibly in a thread pool, preserving task order."""
    if threads <= 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, tasks))


def _sample_connected(n: int, p: float, rng: np.random.Generator) -> tuple[Graph, int]:
    for attempt in range(_MAX_RESAMPLES + 1):
        g = sample_gnp(n, p, rng)
        if is_connected(g):
            return g, attempt
    raise ExperimentError(
        f"cell (n={n}, p={p}): disconnected after {_MAX_RESAMPLES} resamples"
    )


def _stderr(values: list[int]) -> float:
    if len(values) < 2:
        return 0.0
    return float(np.std(values, ddof=1) / math.sqrt(len(values)))


def run_md_smd_sweep(cfg: ExperimentConfig) -> tuple[list[TrialRecord], list[SummaryRow]]:
    """Greedy resolving-set size vs adaptive game length across the grid.

    Per trial: sample a connected G(n, p), run the greedy resolving set,
    and play MAX-GAIN against the greedy-max-cell adversary (a single
    played path, i.e. a lower-bound-flavored estimate of the worst case).
    Cells that stay disconnected after 10 resamples raise ExperimentError.
    """
    if cfg.kind != KIND_MD_SMD_SWEEP:
        raise ValueError(f"config kind is {cfg.kind!r}")
    tasks = [
        (n, p, t)
        for n in cfg.n_values
        for p in cfg.p_values_for(n)
        for t in range(cfg.trials)
    ]

    def run_trial(task) -> TrialRecord:
        n, p, trial = task
        seed = derive_trial_seed(cfg.base_seed, "md_smd", n, p, trial)
        rng = np.random.default_rng(seed)
        started = perf_counter()
        g, _ = _sample_connected(n, p, rng)
        dm = distance_matrix(g)
        greedy = md_greedy(g, dm=dm)
        transcript = play_game(
            dm,
            Player1Policy.max_gain(),
            AdversaryPolicy.greedy_max_cell(),
            step_cap=cfg.step_cap,
        )
        exact = smd_exact(g) if n <= cfg.exact_n_limit else None
        params = er_parameters(n, p)
        if params.regime_valid:
            bounds = bound_prediction(params)
            lower, upper, md_pred = bounds.smd_lower, bounds.smd_upper, bounds.md_value
        else:
            lower = upper = md_pred = None
        return TrialRecord(
            n=n,
            p=p,
            trial_index=trial,
            seed=seed,
            md_greedy_size=len(greedy),
            smd_estimate_steps=transcript.num_steps,
            smd_exact=exact,
            bound_lower=lower,
            bound_upper=upper,
            md_predicted=md_pred,
            wall_time_ms=(perf_counter() - started) * 1e3,
            candidate_trajectory=transcript.candidate_sizes(),
        )

    records = _map_ordered(run_trial, tasks, cfg.threads)
    summaries = []
    for n in cfg.n_values:
        for p in cfg.p_values_for(n):
            cell = [r for r in records if r.n == n and r.p == p]
            summaries.append(
                SummaryRow(
                    n=n,
                    p=p,
                    trials=len(cell),
                    md_greedy_mean=float(np.mean([r.md_greedy_size for r in cell])),
                    md_greedy_stderr=_stderr([r.md_greedy_size for r in cell]),
                    smd_estimate_mean=float(np.mean([r.smd_estimate_steps for r in cell])),
                    smd_estimate_stderr=_stderr([r.smd_estimate_steps for r in cell]),
                    bound_lower=cell[0].bound_lower,
                    bound_upper=cell[0].bound_upper,
                    md_predicted=cell[0].md_predicted,
                )
            )
    return records, summaries


def _default_m_grid(n: int, q: float) -> list[int]:
    center = qc_threshold(n, q)
    low = max(1, math.floor(0.6 * center))
    high = math.ceil(1.4 * center)
    return list(range(low, high + 1))


def run_threshold_sweep(cfg: ExperimentConfig) -> list[ThresholdRow]:
    """Fraction of Bernoulli(q) matrices with all columns distinct, per m.

    The m grid defaults to one straddling the predicted threshold.  m = 0
    needs no sampling: zero-row columns are all equal, so the fraction is
    0 for n >= 2 (and 1 for a single column).
    """
    if cfg.kind != KIND_THRESHOLD_SWEEP:
        raise ValueError(f"config kind is {cfg.kind!r}")
    if isinstance(cfg.p_or_q, str):
        raise ValueError("threshold sweeps take explicit q values, not a rule")
    cells = [
        (n, q, m)
        for n in cfg.n_values
        for q in cfg.p_or_q
        for m in (cfg.m_values if cfg.m_values is not None else _default_m_grid(n, q))
    ]

    def run_cell(cell) -> ThresholdRow:
        n, q, m = cell
        if m < 0:
            raise ValueError(f"row count must be >= 0, got {m}")
        if m == 0:
            return ThresholdRow(n=n, q=q, m=0, trials=cfg.trials, p_distinct=1.0 if n == 1 else 0.0)
        distinct = 0
        for trial in range(cfg.trials):
            seed = derive_trial_seed(cfg.base_seed, "threshold", n, q, m, trial)
            a = sample_bernoulli(m, n, q, seed)
            if columns_pairwise_distinct(a):
                distinct += 1
        return ThresholdRow(n=n, q=q, m=m, trials=cfg.trials, p_distinct=distinct / cfg.trials)

    return _map_ordered(run_cell, cells, cfg.threads)


def run_level_fractions(cfg: ExperimentConfig) -> list[LevelFractionRow]:
    """Empirical distance-level fractions vs the predicted masses.

    Per cell: ``trials`` connected graphs, ``sources_per_graph`` distinct
    sources each; fractions aggregate over all source rows.  For levels at
    or below the regime index the row also carries the worst relative
    deviation of the level-set size from its predicted delta**l.
    """
    if cfg.kind != KIND_LEVEL_FRACTIONS:
        raise ValueError(f"config kind is {cfg.kind!r}")
    cells = [(n, p) for n in cfg.n_values for p in cfg.p_values_for(n)]

    def run_cell(cell) -> list[LevelFractionRow]:
        n, p = cell
        params = er_parameters(n, p)
        predicted = predicted_level_fractions(params)
        counts: dict[int, int] = {}
        total = 0
        worst_dev: dict[int, float] = {}
        for trial in range(cfg.trials):
            seed = derive_trial_seed(cfg.base_seed, "levels", n, p, trial)
            rng = np.random.default_rng(seed)
            g, _ = _sample_connected(n, p, rng)
            k = min(cfg.sources_per_graph, n)
            sources = np.sort(rng.choice(n, size=k, replace=False))
            dist = distances_from_sources(g, sources)
            levels, level_counts = np.unique(dist, return_counts=True)
            for l, cnt in zip(levels, level_counts):
                counts[int(l)] = counts.get(int(l), 0) + int(cnt)
            total += dist.size
            for l in range(1, params.i + 1):
                sizes = (dist == l).sum(axis=1)
                dev = float(np.abs(sizes / params.delta**l - 1.0).max())
                worst_dev[l] = max(worst_dev.get(l, 0.0), dev)
        rows = []
        for level in sorted(set(counts) | set(predicted)):
            if level == 0:
                continue  # the source itself, mass 1/n, not a prediction target
            rows.append(
                LevelFractionRow(
                    n=n,
                    p=p,
                    level=level,
                    empirical_fraction=counts.get(level, 0) / total,
                    predicted_fraction=predicted.get(level),
                    ratio_max_deviation=worst_dev.get(level),
                )
            )
        return rows

    nested = _map_ordered(run_cell, cells, cfg.threads)
    return [row for rows in nested for row in rows]


def run_experiment(cfg: ExperimentConfig) -> dict:
    """Dispatch on config kind, write the CSV outputs, return a summary."""
    if cfg.kind == KIND_MD_SMD_SWEEP:
        records, summaries = run_md_smd_sweep(cfg)
        write_csv(records, cfg.output_path, TRIAL_CSV_FIELDS)
        summary_path = summary_path_for(cfg.output_path)
        write_csv(summaries, summary_path, SUMMARY_CSV_FIELDS)
        return {
            "kind": cfg.kind,
            "rows": len(records),
            "output": str(cfg.output_path),
            "summary": str(summary_path),
        }
    if cfg.kind == KIND_THRESHOLD_SWEEP:
        rows = run_threshold_sweep(cfg)
        write_csv(rows, cfg.output_path, THRESHOLD_CSV_FIELDS)
        return {"kind": cfg.kind, "rows": len(rows), "output": str(cfg.output_path)}
    rows = run_level_fractions(cfg)
    write_csv(rows, cfg.output_path, LEVEL_CSV_FIELDS)
    return {"kind": cfg.kind, "rows": len(rows), "output": str(cfg.output_path)}
