"""Sparse-action selection oracles.

Given a parameter vector, pick a support of at most H coordinates and the
best feasible action on it: exact top-H selection (Euclidean balls only),
greedy marginal-gain construction (any geometry), brute-force enumeration
(the benchmark), and certification of the submodularity ratio that governs
the greedy approximation factor 1 - exp(-gamma).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import (
    ActionSetGeometry,
    SupportSet,
    best_action_on_support,
    value_on_support,
)

__all__ = [
    "GreedyTrace",
    "RatioCertificate",
    "exact_top_h",
    "greedy_select",
    "brute_force",
    "submodularity_ratio",
]

BRUTE_FORCE_BUDGET = 10**6
EXHAUSTIVE_RATIO_MAX_DIM = 10
_BATCH = 1 << 16


@dataclass(frozen=True)
class GreedyTrace:
    """Record of one greedy run: what was picked and how contested each pick was.

    ``step_gaps[k]`` is the margin between the best and second-best marginal
    gain at step k (inf when fewer than two candidates remained), and
    ``min_gap`` is the smallest such margin — the quantity the greedy-locking
    algorithm compares against its error radius.
    """

    selected: tuple[int, ...]
    marginal_gains: tuple[float, ...]
    step_gaps: tuple[float, ...]
    min_gap: float
    value: float

    def as_support(self) -> SupportSet:
        return SupportSet(self.selected, capacity=len(self.selected))


@dataclass(frozen=True)
class RatioCertificate:
    """Submodularity ratio gamma and the greedy factor alpha = 1 - e^-gamma.

    ``exhaustive`` distinguishes a certified minimum over all subset pairs
    from a sampled upper estimate; ``instance_count`` is the number of
    (S, Omega) pairs inspected.
    """

    gamma: float
    alpha: float
    instance_count: int
    exhaustive: bool


def top_h_indices(theta: np.ndarray, h: int) -> np.ndarray:
    """Indices of the h largest |theta_i|, ties resolved to the lower index."""
    order = np.argsort(-np.abs(np.asarray(theta, dtype=float)), kind="stable")
    return np.sort(order[:h])


def exact_top_h(geom: ActionSetGeometry, theta, h: int):
    """Exact sparse maximization on a Euclidean ball: keep the h largest |theta_i|.

    Returns ``(support, action, value)``. Only valid for the Euclidean ball,
    where restricting to any support makes the optimum the scaled unit vector
    of theta on that support, so the best support is the top-h magnitude set.
    """
    if geom.kind != "euclidean_ball":
        raise ValueError(f"exact_top_h needs a euclidean_ball, got {geom.kind}")
    th = np.asarray(theta, dtype=float)
    if not 1 <= h <= geom.dim:
        raise ValueError(f"need 1 <= h <= {geom.dim}, got {h}")
    support = SupportSet(top_h_indices(th, h), capacity=h)
    action = best_action_on_support(geom, support, th)
    return support, action, value_on_support(geom, support, th)


def _gains_for_candidates(geom, th, chosen: list, cand: np.ndarray, base: float):
    """Marginal gains h(G + {v}) - h(G) for every candidate v, vectorized."""
    sub = th[cand]
    kind = geom.kind
    if kind == "euclidean_ball":
        ssq = float(np.sum(th[chosen] ** 2))
        return geom.radius * (np.sqrt(ssq + sub**2) - math.sqrt(ssq))
    if kind == "lp_ball":
        q = geom.dual_exponent
        qs = float(np.sum(np.abs(th[chosen]) ** q))
        return geom.radius * ((qs + np.abs(sub) ** q) ** (1.0 / q) - qs ** (1.0 / q))
    if kind == "l1_ball":
        cur = float(np.max(np.abs(th[chosen]))) if chosen else 0.0
        return geom.radius * (np.maximum(cur, np.abs(sub)) - cur)
    if kind == "hypercube":
        b = geom.bounds[cand]
        return np.maximum(b[:, 0] * sub, b[:, 1] * sub)
    if kind == "ellipsoid":
        combos = np.concatenate(
            [np.tile(np.asarray(chosen, dtype=np.intp), (cand.size, 1)), cand[:, None]],
            axis=1,
        )
        a_sub = geom.matrix[combos[:, :, None], combos[:, None, :]]
        th_sub = th[combos]
        sol = np.linalg.solve(a_sub, th_sub[..., None])[..., 0]
        vals = np.sqrt(np.maximum(np.einsum("ij,ij->i", th_sub, sol), 0.0))
        return vals - base
    # generic fallback for any future kind
    return np.array([value_on_support(geom, chosen + [int(v)], th) - base for v in cand])


def greedy_select(geom: ActionSetGeometry, theta, h: int) -> GreedyTrace:
    """Greedily build a support of exactly h coordinates by marginal gain.

    Parameters
    ----------
    geom : ActionSetGeometry
    theta : array of shape (d,)
        Parameter vector the gains are evaluated against.
    h : int
        Number of coordinates to select, 1 <= h <= d.

    Returns
    -------
    GreedyTrace
        Picks in selection order plus per-step gains and best-vs-second
        margins. Gain ties resolve to the lower coordinate index, so the
        trace is deterministic.
    """
    th = np.asarray(theta, dtype=float)
    if th.shape != (geom.dim,):
        raise ValueError(f"theta has shape {th.shape}, expected ({geom.dim},)")
    if not 1 <= h <= geom.dim:
        raise ValueError(f"need 1 <= h <= {geom.dim}, got {h}")

    chosen: list[int] = []
    gains_rec, gap_rec = [], []
    base = 0.0
    remaining = np.arange(geom.dim, dtype=np.intp)
    for _ in range(h):
        gains = _gains_for_candidates(geom, th, chosen, remaining, base)
        best = int(np.argmax(gains))
        if remaining.size >= 2:
            rest = np.delete(gains, best)
            gap_rec.append(float(gains[best] - np.max(rest)))
        else:
            gap_rec.append(math.inf)
        gains_rec.append(float(gains[best]))
        base += float(gains[best])
        chosen.append(int(remaining[best]))
        remaining = np.delete(remaining, best)

    return GreedyTrace(
        selected=tuple(chosen),
        marginal_gains=tuple(gains_rec),
        step_gaps=tuple(gap_rec),
        min_gap=min(gap_rec),
        value=base,
    )


def _combo_values(geom, th, combos: np.ndarray) -> np.ndarray:
    """Support values for a (n, h) array of index combinations."""
    sub = th[combos]
    kind = geom.kind
    if kind == "euclidean_ball":
        return geom.radius * np.sqrt(np.sum(sub**2, axis=1))
    if kind == "lp_ball":
        q = geom.dual_exponent
        return geom.radius * np.sum(np.abs(sub) ** q, axis=1) ** (1.0 / q)
    if kind == "l1_ball":
        return geom.radius * np.max(np.abs(sub), axis=1)
    if kind == "hypercube":
        b = geom.bounds[combos]
        return np.sum(np.maximum(b[..., 0] * sub, b[..., 1] * sub), axis=1)
    if kind == "ellipsoid":
        a_sub = geom.matrix[combos[:, :, None], combos[:, None, :]]
        sol = np.linalg.solve(a_sub, sub[..., None])[..., 0]
        return np.sqrt(np.maximum(np.einsum("ij,ij->i", sub, sol), 0.0))
    return np.array([value_on_support(geom, c, th) for c in combos])


def brute_force(geom: ActionSetGeometry, theta, h: int):
    """Enumerate every size-h support and return the best ``(support, action, value)``.

    The benchmark oracle: exact but exponential, guarded at 10^6 supports.
    Value ties resolve to the lexicographically smallest support (the first
    one produced by enumeration order).
    """
    th = np.asarray(theta, dtype=float)
    if th.shape != (geom.dim,):
        raise ValueError(f"theta has shape {th.shape}, expected ({geom.dim},)")
    if not 1 <= h <= geom.dim:
        raise ValueError(f"need 1 <= h <= {geom.dim}, got {h}")
    n_support = math.comb(geom.dim, h)
    if n_support > BRUTE_FORCE_BUDGET:
        raise ValueError(
            f"C({geom.dim},{h}) = {n_support} supports exceed the enumeration budget"
        )

    from itertools import combinations, islice

    best_combo, best_val = None, -math.inf
    combo_iter = combinations(range(geom.dim), h)
    while True:
        block = list(islice(combo_iter, _BATCH))
        if not block:
            break
        combos = np.asarray(block, dtype=np.intp)
        vals = _combo_values(geom, th, combos)
        i = int(np.argmax(vals))
        if vals[i] > best_val:  # strict: preserves the lexicographic tie rule
            best_val = float(vals[i])
            best_combo = block[i]

    support = SupportSet(best_combo, capacity=h)
    action = best_action_on_support(geom, support, th)
    return support, action, value_on_support(geom, support, th)


def _mask_values(geom, th) -> np.ndarray:
    """Support value for every bitmask subset of [d] (index = mask)."""
    d = geom.dim
    vals = np.empty(1 << d)
    vals[0] = 0.0
    for mask in range(1, 1 << d):
        idx = [i for i in range(d) if mask >> i & 1]
        vals[mask] = value_on_support(geom, idx, th)
    return vals


def submodularity_ratio(
    geom: ActionSetGeometry,
    theta,
    mode: str = "exhaustive",
    budget: int = 2000,
    seed: int = 0,
) -> RatioCertificate:
    """Certify (or estimate) the submodularity ratio of the support-value function.

    The ratio is the largest gamma with
    ``sum_{w in Omega - S} (h(S + w) - h(S)) >= gamma * (h(S + Omega) - h(S))``
    over subset pairs; 0/0 counts as 1 and the result is clamped to [0, 1].
    Exhaustive mode inspects all 4^d pairs (requires d <= 10) and certifies
    the minimum; sampled mode inspects ``budget`` random pairs and therefore
    only upper-estimates gamma.
    """
    th = np.asarray(theta, dtype=float)
    if th.shape != (geom.dim,):
        raise ValueError(f"theta has shape {th.shape}, expected ({geom.dim},)")
    d = geom.dim
    tol = 1e-12

    if mode == "exhaustive":
        if d > EXHAUSTIVE_RATIO_MAX_DIM:
            raise ValueError(f"exhaustive mode needs d <= {EXHAUSTIVE_RATIO_MAX_DIM}, got {d}")
        vals = _mask_values(geom, th)
        n = 1 << d
        masks = np.arange(n)
        in_set = (masks[:, None] >> np.arange(d)[None, :] & 1).astype(bool)  # (n, d)
        gamma = 1.0
        for s_mask in range(n):
            s_bits = in_set[s_mask]
            # singleton gains h(S + {w}) - h(S), zeroed for w already in S
            gains = np.where(s_bits, 0.0, vals[s_mask | (1 << np.arange(d))] - vals[s_mask])
            nums = in_set @ gains  # for every Omega: sum over w in Omega - S
            dens = vals[masks | s_mask] - vals[s_mask]
            binding = dens > tol
            if np.any(binding):
                ratios = np.maximum(nums[binding], 0.0) / dens[binding]
                gamma = min(gamma, float(np.min(ratios)))
        pairs = n * n
        certified = True
    elif mode == "sampled":
        if budget < 1:
            raise ValueError("budget must be >= 1")
        rng = np.random.default_rng(seed)
        cache: dict[int, float] = {0: 0.0}

        def val(mask: int) -> float:
            v = cache.get(mask)
            if v is None:
                idx = [i for i in range(d) if mask >> i & 1]
                v = value_on_support(geom, idx, th)
                cache[mask] = v
            return v

        gamma = 1.0
        top = (1 << d) - 1
        for _ in range(budget):
            s_mask = int(rng.integers(0, top + 1))
            o_mask = int(rng.integers(0, top + 1))
            den = val(s_mask | o_mask) - val(s_mask)
            if den <= tol:
                continue
            num = sum(
                val(s_mask | (1 << w)) - val(s_mask)
                for w in range(d)
                if o_mask >> w & 1 and not s_mask >> w & 1
            )
            gamma = min(gamma, max(num, 0.0) / den)
        pairs = budget
        certified = False
    else:
        raise ValueError(f"mode must be 'exhaustive' or 'sampled', got {mode!r}")

    gamma = float(min(max(gamma, 0.0), 1.0))
    return RatioCertificate(
        gamma=gamma,
        alpha=float(1.0 - math.exp(-gamma)),
        instance_count=pairs,
        exhaustive=certified,
    )
