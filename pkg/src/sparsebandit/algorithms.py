"""Online algorithms: explore with a fixed basis, verify, then exploit.

Three modes share one phase machine. Every cycle c starts with d exploration
steps (one sweep of the basis) followed by a least-squares refresh:

* ``sort_lock``   — lock the top-H support of theta_hat once the H-th/(H+1)-th
  magnitude gap exceeds twice the error radius; exploit c steps per cycle
  after locking.
* ``greedy_lock`` — same schedule, but the support comes from greedy selection
  and the test compares the minimum greedy step gap against
  2 * lipschitz * eps_c.
* ``greedy_schedule`` — never verifies: every cycle exploits floor(sqrt(c))
  steps on a fresh greedy support. Suited to sets where the gap test is
  uninformative (boxes, l1 balls).

Locking freezes the exploited support but never stops exploration or the
estimate: the exploit action is recomputed from the newest theta_hat every
cycle. ``run_horizon`` executes the same machine vectorized per phase block;
it is stream-equivalent to driving select_action/observe step by step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .estimation import (
    ExplorationBasis,
    OlsState,
    empirical_sort_gap,
    error_radius,
    initial_ols_state,
    ols_update,
)
from .geometry import ActionSetGeometry, SupportSet, best_action_on_support
from .oracles import greedy_select

__all__ = [
    "MODES",
    "Environment",
    "AlgorithmState",
    "RunTrace",
    "make_environment",
    "make_state",
    "select_action",
    "observe",
    "run_horizon",
]

MODES = ("sort_lock", "greedy_lock", "greedy_schedule")

EXPLORE, EXPLOIT = 0, 1


class Environment:
    """Linear rewards theta_star . x + Gaussian noise from a seeded stream.

    One normal variate is consumed per reward (also when sigma is 0), so any
    two consumers drawing the same number of rewards see the same stream.
    """

    def __init__(self, theta_star, sigma: float, geom: ActionSetGeometry, seed=0):
        th = np.array(theta_star, dtype=float)
        if th.shape != (geom.dim,):
            raise ValueError(f"theta_star has shape {th.shape}, expected ({geom.dim},)")
        if sigma < 0:
            raise ValueError("sigma must be >= 0")
        th.setflags(write=False)
        self.theta_star = th
        self.sigma = float(sigma)
        self.geom = geom
        self.rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)

    def mean_reward(self, x) -> float:
        return float(self.theta_star @ np.asarray(x, dtype=float))

    def noisy(self, means) -> np.ndarray:
        m = np.atleast_1d(np.asarray(means, dtype=float))
        return m + self.sigma * self.rng.standard_normal(m.shape[0])

    def reward(self, x) -> float:
        return float(self.noisy([self.mean_reward(x)])[0])


def make_environment(theta_star, sigma, geom, seed=0) -> Environment:
    return Environment(theta_star, sigma, geom, seed)


@dataclass(frozen=True, eq=False)
class AlgorithmState:
    """Immutable snapshot of the phase machine between two bandit rounds."""

    mode: str
    geom: ActionSetGeometry
    basis: ExplorationBasis
    sparsity: int
    delta: float
    lipschitz: float  # L_X in the greedy stopping test
    ols: OlsState
    cycle: int = 1
    phase: int = EXPLORE
    step_in_phase: int = 0
    pending: tuple[float, ...] = ()  # rewards of the current exploration sweep
    support_found: bool = False
    est_support: SupportSet | None = None  # candidate until locked, then frozen
    exploit_action: np.ndarray | None = None
    exploit_length: int = 0
    last_eps: float = math.nan
    last_gap: float = math.nan


def make_state(
    mode: str,
    geom: ActionSetGeometry,
    basis: ExplorationBasis,
    h: int,
    delta: float,
) -> AlgorithmState:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if not 1 <= h <= geom.dim:
        raise ValueError(f"need 1 <= h <= {geom.dim}, got {h}")
    if mode == "sort_lock" and h >= geom.dim:
        raise ValueError("sort_lock needs h < dim so a rank gap exists")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    if basis.dim != geom.dim:
        raise ValueError("basis and geometry dimension mismatch")
    return AlgorithmState(
        mode=mode,
        geom=geom,
        basis=basis,
        sparsity=h,
        delta=delta,
        lipschitz=geom.radius,
        ols=initial_ols_state(geom.dim),
    )


def _support_of_action(action: np.ndarray, h: int) -> SupportSet:
    return SupportSet(np.flatnonzero(action), capacity=max(h, 1))


def select_action(state: AlgorithmState) -> tuple[np.ndarray, SupportSet]:
    """The action the machine plays this round. Pure: state is not touched."""
    if state.phase == EXPLORE:
        x = state.basis.actions[state.step_in_phase]
        return x, _support_of_action(x, state.sparsity)
    return state.exploit_action, state.est_support


def _verify(state: AlgorithmState, ols: OlsState):
    """End-of-sweep bookkeeping: gap, error radius, lock decision, support."""
    c = ols.cycle
    d = state.geom.dim
    eps = error_radius(state.basis, c, d, state.delta)
    if state.mode == "sort_lock":
        gap, candidate = empirical_sort_gap(ols.theta_hat, state.sparsity)
        threshold = 2.0 * eps
    else:
        trace = greedy_select(state.geom, ols.theta_hat, state.sparsity)
        gap, candidate = trace.min_gap, trace.as_support()
        threshold = 2.0 * state.lipschitz * eps

    if state.mode == "greedy_schedule":
        return eps, gap, True, candidate, max(math.isqrt(c), 1)
    if state.support_found:
        return eps, gap, True, state.est_support, c
    if gap > threshold:  # strict, so a zero gap never locks
        return eps, gap, True, candidate, c
    return eps, gap, False, candidate, 0


def observe(state: AlgorithmState, reward: float) -> AlgorithmState:
    """Fold one observed reward into the machine and advance it."""
    d = state.geom.dim
    if state.phase == EXPLORE:
        pending = state.pending + (float(reward),)
        if len(pending) < d:
            return replace(state, pending=pending, step_in_phase=state.step_in_phase + 1)
        ols = ols_update(state.ols, state.basis, pending)
        eps, gap, exploit_now, support, m = _verify(state, ols)
        locked = state.support_found or (
            exploit_now and state.mode != "greedy_schedule"
        )
        base = replace(
            state,
            ols=ols,
            pending=(),
            step_in_phase=0,
            support_found=locked,
            est_support=support,
            last_eps=eps,
            last_gap=gap,
        )
        if exploit_now:
            action = best_action_on_support(state.geom, support, ols.theta_hat)
            return replace(
                base, phase=EXPLOIT, exploit_action=action, exploit_length=m
            )
        return replace(base, cycle=state.cycle + 1, phase=EXPLORE)

    k = state.step_in_phase + 1
    if k < state.exploit_length:
        return replace(state, step_in_phase=k)
    return replace(
        state,
        cycle=state.cycle + 1,
        phase=EXPLORE,
        step_in_phase=0,
        exploit_action=None,
        exploit_length=0,
    )


@dataclass(eq=False)
class RunTrace:
    """Complete record of one run, compact enough for T in the hundreds of thousands.

    Per-step arrays index into ``action_pool`` (the d basis rows plus one
    exploit action per exploiting cycle) rather than storing a (T, d) matrix.
    Per-cycle arrays cover the ``completed_cycles`` sweeps whose estimate was
    actually formed; a final partial sweep appears only in the step arrays.
    """

    mode: str
    horizon: int
    dim: int
    sparsity: int
    delta: float
    action_pool: np.ndarray
    step_action: np.ndarray  # (T,) int32 index into action_pool
    step_cycle: np.ndarray  # (T,) int32, 1-based
    step_phase: np.ndarray  # (T,) uint8, 0 explore / 1 exploit
    step_mean: np.ndarray  # (T,) theta_star . x_t
    step_reward: np.ndarray  # (T,)
    cycle_theta: np.ndarray  # (C, d)
    cycle_eps: np.ndarray  # (C,)
    cycle_gap: np.ndarray  # (C,)
    cycle_locked: np.ndarray  # (C,) bool, support frozen as of this cycle
    cycle_exploit_len: np.ndarray  # (C,) int32 scheduled exploit steps
    cycle_support: list  # (C,) tuples: estimate after each sweep
    lock_cycle: int  # first locked cycle, -1 if never
    completed_cycles: int

    def support_at_step(self, t: int) -> tuple | None:
        """Estimate in force at step t: the last sweep finished before it."""
        c = int(self.step_cycle[t])
        have = c if self.step_phase[t] == EXPLOIT else c - 1
        if have < 1:
            return None
        return self.cycle_support[min(have, self.completed_cycles) - 1]


def run_horizon(env: Environment, state: AlgorithmState, horizon: int) -> RunTrace:
    """Run exactly ``horizon`` rounds, truncating the final cycle mid-phase.

    Rewards are drawn in per-phase blocks from the same stream the step API
    consumes one draw at a time, so both produce identical traces for a
    given seed.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    if state.cycle != 1 or state.step_in_phase or state.ols.cycle or state.pending:
        raise ValueError("run_horizon needs a freshly initialized state")
    if env.geom.kind != state.geom.kind or env.geom.dim != state.geom.dim:
        raise ValueError("environment and state disagree on the action set")

    d = state.geom.dim
    basis = state.basis
    explore_means = basis.actions @ env.theta_star

    pool = [basis.actions]
    pool_rows = d
    step_action = np.empty(horizon, dtype=np.int32)
    step_cycle = np.empty(horizon, dtype=np.int32)
    step_phase = np.empty(horizon, dtype=np.uint8)
    step_mean = np.empty(horizon)
    step_reward = np.empty(horizon)
    thetas, epss, gaps, lockeds, mlens, supports = [], [], [], [], [], []

    ols = state.ols
    work = state
    lock_cycle = -1
    t = 0
    cycle = 1
    while t < horizon:
        n = min(d, horizon - t)
        sl = slice(t, t + n)
        step_action[sl] = np.arange(n, dtype=np.int32)
        step_cycle[sl] = cycle
        step_phase[sl] = EXPLORE
        step_mean[sl] = explore_means[:n]
        step_reward[sl] = env.noisy(explore_means[:n])
        t += n
        if n < d:
            break  # horizon fell inside the sweep: no estimate this cycle

        ols = ols_update(ols, basis, step_reward[t - d : t])
        eps, gap, exploit_now, support, m = _verify(work, ols)
        locked = work.support_found or (exploit_now and work.mode != "greedy_schedule")
        if locked and lock_cycle < 0:
            lock_cycle = cycle
        work = replace(work, ols=ols, support_found=locked, est_support=support)
        thetas.append(ols.theta_hat)
        epss.append(eps)
        gaps.append(gap)
        lockeds.append(locked)
        mlens.append(m if exploit_now else 0)
        supports.append(support.indices)

        if exploit_now and t < horizon:
            action = best_action_on_support(state.geom, support, ols.theta_hat)
            pool.append(action[None, :])
            aid = pool_rows
            pool_rows += 1
            n = min(m, horizon - t)
            sl = slice(t, t + n)
            step_action[sl] = aid
            step_cycle[sl] = cycle
            step_phase[sl] = EXPLOIT
            mean = float(env.theta_star @ action)
            step_mean[sl] = mean
            step_reward[sl] = env.noisy(np.full(n, mean))
            t += n
        cycle += 1

    c_done = len(thetas)
    return RunTrace(
        mode=state.mode,
        horizon=horizon,
        dim=d,
        sparsity=state.sparsity,
        delta=state.delta,
        action_pool=np.concatenate(pool, axis=0),
        step_action=step_action,
        step_cycle=step_cycle,
        step_phase=step_phase,
        step_mean=step_mean,
        step_reward=step_reward,
        cycle_theta=np.asarray(thetas) if thetas else np.empty((0, d)),
        cycle_eps=np.asarray(epss),
        cycle_gap=np.asarray(gaps),
        cycle_locked=np.asarray(lockeds, dtype=bool),
        cycle_exploit_len=np.asarray(mlens, dtype=np.int32),
        cycle_support=supports,
        lock_cycle=lock_cycle,
        completed_cycles=c_done,
    )
