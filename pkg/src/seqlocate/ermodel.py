"""Erdos-Renyi sampling and query-complexity predictions.

For G(n, p) with mean degree delta = n*p, the distance distribution from a
typical node concentrates on a narrow band of levels.  The calculators here
expose the level structure (regime index ``i``, tail mass parameter ``c``),
the dominant-mass parameters ``gamma_smd`` / ``gamma_md`` that drive the
adaptive and non-adaptive query-complexity predictions, and the resulting
step-count bounds.

All logarithms are natural unless a name says otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graphs import Graph


@dataclass(frozen=True)
class ErParameters:
    """Derived quantities for one (n, p) pair.

    delta is the mean degree n*p.  The regime index ``i`` is the largest
    integer with delta**i <= n/ln(n): balls of radius up to ``i`` are small,
    level i+1 carries the bulk of the mass and level i+2 the complement
    e^(-c).  For i = 0 the graph is dense enough that distances are just
    {1, 2} with masses p and 1-p, and ``c`` is not defined.

    gamma_smd bounds the worst single cell an adaptive distance query can
    leave behind (as a fraction of the candidate set); gamma_md is the
    root-mean-square analogue that governs non-adaptive resolving sets.
    zeta is the concentration half-width for level sizes, exposed for
    diagnostics only; no bound below consumes it.

    regime_valid means the analysis window applies: delta > ln(n) and
    1 - p > 1/sqrt(n).  The classical window wants delta > ln(n)**5;
    regime_relaxed flags parameters that clear only the relaxed gate.
    """

    n: int
    p: float
    delta: float
    i: int
    c: float | None
    zeta: float
    gamma_smd: float
    gamma_md: float
    eta: float
    regime_valid: bool
    regime_relaxed: bool


@dataclass(frozen=True)
class BoundPrediction:
    """Predicted step counts for one (n, p) pair.

    smd_upper comes from repeated gamma_smd shrinking of the candidate set;
    smd_lower is the eta-scaled version with the binary-search floor
    log2(n); md_value is the non-adaptive analogue built from gamma_md.
    f_gamma and f_eta are the two adaptivity-gap readouts: the ratio of the
    per-step decay rates and the eta factor itself.
    """

    smd_upper: float
    smd_lower: float
    md_value: float
    f_gamma: float
    f_eta: float


def er_parameters(n: int, p: float, force_i: int | None = None) -> ErParameters:
    """Compute the level structure and decay parameters for G(n, p).

    ``force_i`` overrides the regime-index rule (largest i with
    delta**i <= n/ln(n)); use it to probe boundary cases where the
    finite-n rule and the asymptotic order-of-growth rule disagree.
    """
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    if not 0.0 < p < 1.0:
        raise ValueError(f"need 0 < p < 1, got {p}")
    ln_n = math.log(n)
    delta = n * p
    threshold = n / ln_n
    if force_i is not None:
        if force_i < 0:
            raise ValueError("force_i must be >= 0")
        i = int(force_i)
    elif delta <= 1.0:
        # Sub-critical mean degree: delta**i never grows, the index rule is
        # vacuous and the regime gate below fails anyway.
        i = 0
    else:
        i = 0
        while delta ** (i + 1) <= threshold:
            i += 1
    if i == 0:
        c = None
        mass_near = p
        mass_far = 1.0 - p
    else:
        c = delta ** (i + 1) / n
        mass_near = 1.0 - math.exp(-c) - delta**i / n  # level i+1
        mass_far = math.exp(-c)  # level i+2
        if mass_near <= 0.0 or mass_far <= 0.0:
            # Reachable only through force_i: the chosen index puts more
            # than all the mass below level i+1, or exp(-c) underflows.
            raise ValueError(
                f"level index i={i} gives a degenerate mass split at "
                f"n={n}, p={p}; the two-level decay model does not apply"
            )
    gamma_smd = max(mass_near, mass_far)
    gamma_md = math.hypot(mass_near, mass_far)
    eta = 1.0 + math.log(math.log(1.0 / gamma_smd)) / ln_n
    zeta = max(math.sqrt(ln_n / delta), delta**i / n)
    regime_valid = delta > ln_n and (1.0 - p) > 1.0 / math.sqrt(n)
    regime_relaxed = regime_valid and not delta > ln_n**5
    return ErParameters(
        n=n,
        p=p,
        delta=delta,
        i=i,
        c=c,
        zeta=zeta,
        gamma_smd=gamma_smd,
        gamma_md=gamma_md,
        eta=eta,
        regime_valid=regime_valid,
        regime_relaxed=regime_relaxed,
    )


def bound_prediction(params: ErParameters) -> BoundPrediction:
    """Step-count predictions from the decay parameters.

    Requires ``params.regime_valid``; outside the window the gamma values
    do not mean anything and this raises rather than extrapolate.
    """
    if not params.regime_valid:
        raise ValueError(
            f"(n={params.n}, p={params.p}) is outside the analysis window; "
            "no bound prediction is defined"
        )
    ln_n = math.log(params.n)
    rate_smd = -math.log(params.gamma_smd)
    rate_md = -math.log(params.gamma_md)
    smd_upper = ln_n / rate_smd
    smd_lower = max(params.eta * smd_upper, math.log2(params.n))
    # The binary-search floor can overshoot the upper bound in a narrow
    # window where gamma_smd dips just under 1/2 at finite n; a lower bound
    # is never allowed to exceed its matching upper bound.
    smd_lower = min(smd_lower, smd_upper)
    return BoundPrediction(
        smd_upper=smd_upper,
        smd_lower=smd_lower,
        md_value=ln_n / rate_md,
        f_gamma=rate_md / rate_smd,
        f_eta=params.eta,
    )


def predicted_level_fractions(params: ErParameters) -> dict[int, float]:
    """Expected fraction of nodes at each distance from a typical node.

    For i >= 1 the map covers levels 1..i+2: geometric growth delta**l/n up
    to level i, then the two dominant masses.  For i = 0 distances are
    {1, 2} with masses p and 1 - p.  Fractions sum to 1 up to a
    2*delta**(i-1)/n truncation error.
    """
    if not params.regime_valid:
        raise ValueError(
            f"(n={params.n}, p={params.p}) is outside the analysis window"
        )
    if params.i == 0:
        return {1: params.p, 2: 1.0 - params.p}
    fractions = {l: params.delta**l / params.n for l in range(1, params.i + 1)}
    tail = math.exp(-params.c)
    fractions[params.i + 1] = 1.0 - tail - params.delta**params.i / params.n
    fractions[params.i + 2] = tail
    return fractions


def sample_gnp(n: int, p: float, seed) -> Graph:
    """Sample G(n, p): each unordered pair is an edge independently w.p. p.

    ``seed`` is an int or a numpy Generator (handy for resampling loops).
    Identical seed means identical graph.  Pairs are selected by geometric
    gap-skipping over the linearized upper triangle, so the cost is
    O(expected edges) rather than O(n**2).
    """
    if n < 1:
        raise ValueError(f"node count must be positive, got {n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"need 0 <= p <= 1, got {p}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    total = n * (n - 1) // 2
    if total == 0 or p == 0.0:
        lin = np.empty(0, dtype=np.int64)
    elif p == 1.0:
        lin = np.arange(total, dtype=np.int64)
    else:
        chunks = []
        pos = -1
        while True:
            batch = int((total - pos) * p * 1.1) + 16
            gaps = rng.geometric(p, size=batch).astype(np.int64)
            idx = pos + np.cumsum(gaps)
            cut = int(np.searchsorted(idx, total, side="left"))
            if cut < idx.size:
                chunks.append(idx[:cut])
                break
            chunks.append(idx)
            pos = int(idx[-1])
        lin = np.concatenate(chunks) if chunks else np.empty(0, dtype=np.int64)
    # Linear index k -> pair (u, v) with u < v, rows ordered by u.
    row_start = np.zeros(n, dtype=np.int64)
    if n > 1:
        row_start[1:] = np.cumsum(np.arange(n - 1, 0, -1, dtype=np.int64))
    u = np.searchsorted(row_start, lin, side="right") - 1
    v = lin - row_start[u] + u + 1
    return Graph.from_edge_arrays(n, u, v)
