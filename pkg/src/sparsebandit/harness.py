"""Experiment orchestration: configs, multi-trial runs, regret ledgers, CSVs.

A flat INI-style config file describes one experiment (action-set geometry,
algorithm mode, horizon, trial count, how theta* and the benchmark factor
alpha are chosen). ``run_experiment`` fans the trials out to worker
processes, each seeded independently, and reduces them in trial order so
results are reproducible regardless of scheduling. ``export_csv`` writes the
four artifact tables (per-step regret, per-cycle estimation, per-step support
recovery, one-row summary) with round-trip float formatting, so re-exporting
the same result is byte-identical.
"""

from __future__ import annotations

import configparser
import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .algorithms import (
    EXPLOIT,
    EXPLORE,
    MODES,
    Environment,
    RunTrace,
    make_state,
    run_horizon,
)
from .estimation import empirical_sort_gap, make_basis, warmup_bound_c0
from .geometry import (
    ActionSetGeometry,
    ellipsoid,
    euclidean_ball,
    hypercube,
    l1_ball,
    lp_ball,
)
from .oracles import brute_force, greedy_select, submodularity_ratio

__all__ = [
    "ExperimentConfig",
    "TrialRecord",
    "ExperimentResult",
    "load_config",
    "build_geometry",
    "make_gap_controlled_theta",
    "random_spd_matrix",
    "generate_theta",
    "run_experiment",
    "export_csv",
]

GEOMETRY_KINDS = ("euclidean_ball", "ellipsoid", "lp_ball", "l1_ball", "hypercube")
THETA_SOURCES = ("uniform", "explicit", "gap_controlled")
ALPHA_SOURCES = ("one", "exhaustive", "value")
ORACLE_MODE = "oracle"  # debug policy that plays the benchmark every step

GAP_VALIDATION_TOL = 1e-9
EXHAUSTIVE_ALPHA_MAX_DIM = 10


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    mode: str
    trials: int
    horizon: int
    seed: int
    delta: float
    sigma: float
    sigma_factor: float
    basis: str
    geometry_kind: str
    dim: int
    sparsity: int
    radius: float
    p: float | None
    bounds_low: tuple[float, ...] | None
    bounds_high: tuple[float, ...] | None
    matrix_file: str | None
    matrix_seed: int
    matrix_eig_low: float | None
    theta_source: str
    theta_file: str | None
    theta_values: tuple[float, ...] | None
    theta_style: str
    theta_gap: float
    alpha_source: str
    alpha_value: float


def _parse_float_list(raw: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in raw.split(",") if tok.strip())


# section -> key -> converter; anything else in the file is an error
_SCHEMA = {
    "experiment": {
        "name": str,
        "mode": str,
        "trials": int,
        "horizon": int,
        "seed": int,
        "delta": float,
        "sigma": float,
        "sigma_factor": float,
        "basis": str,
    },
    "geometry": {
        "kind": str,
        "dim": int,
        "sparsity": int,
        "radius": float,
        "p": float,
        "bounds_low": _parse_float_list,
        "bounds_high": _parse_float_list,
        "matrix_file": str,
        "matrix_seed": int,
        "matrix_eig_low": float,
    },
    "theta": {
        "source": str,
        "file": str,
        "values": _parse_float_list,
        "style": str,
        "gap": float,
    },
    "alpha": {
        "source": str,
        "value": float,
    },
}

_DEFAULTS = {
    ("experiment", "sigma_factor"): "1.0",
    ("experiment", "basis"): "standard",
    ("experiment", "seed"): "0",
    ("geometry", "radius"): "1.0",
    ("geometry", "matrix_seed"): "0",
    ("theta", "style"): "standard",
    ("theta", "gap"): "0.0",
    ("alpha", "source"): "one",
    ("alpha", "value"): "1.0",
}

_REQUIRED = {
    ("experiment", "name"),
    ("experiment", "mode"),
    ("experiment", "trials"),
    ("experiment", "horizon"),
    ("experiment", "delta"),
    ("experiment", "sigma"),
    ("geometry", "kind"),
    ("geometry", "dim"),
    ("geometry", "sparsity"),
    ("theta", "source"),
}


def load_config(path, overrides: dict[str, str] | None = None) -> ExperimentConfig:
    """Parse and validate a config file; fails fast on anything unknown.

    ``overrides`` maps dotted ``section.key`` names to raw value strings and
    is applied before validation (the sweep command uses it).
    """
    parser = configparser.ConfigParser(interpolation=None, strict=True)
    parser.optionxform = str
    read = parser.read(path)
    if not read:
        raise ValueError(f"config file not found: {path}")

    values: dict[tuple[str, str], str] = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ValueError(f"unknown config section [{section}]")
        for key, raw in parser.items(section):
            if key not in _SCHEMA[section]:
                raise ValueError(f"unknown key '{key}' in section [{section}]")
            values[(section, key)] = raw
    for dotted, raw in (overrides or {}).items():
        section, _, key = dotted.partition(".")
        if section not in _SCHEMA or key not in _SCHEMA[section]:
            raise ValueError(f"unknown config key '{dotted}'")
        values[(section, key)] = raw

    for pair, default in _DEFAULTS.items():
        values.setdefault(pair, default)
    missing = sorted(f"{s}.{k}" for s, k in _REQUIRED - set(values))
    if missing:
        raise ValueError(f"missing required config keys: {', '.join(missing)}")

    def get(section, key, fallback=None):
        raw = values.get((section, key))
        if raw is None:
            return fallback
        try:
            return _SCHEMA[section][key](raw)
        except ValueError as exc:
            raise ValueError(f"bad value for {section}.{key}: {raw!r}") from exc

    cfg = ExperimentConfig(
        name=get("experiment", "name"),
        mode=get("experiment", "mode"),
        trials=get("experiment", "trials"),
        horizon=get("experiment", "horizon"),
        seed=get("experiment", "seed"),
        delta=get("experiment", "delta"),
        sigma=get("experiment", "sigma"),
        sigma_factor=get("experiment", "sigma_factor"),
        basis=get("experiment", "basis"),
        geometry_kind=get("geometry", "kind"),
        dim=get("geometry", "dim"),
        sparsity=get("geometry", "sparsity"),
        radius=get("geometry", "radius"),
        p=get("geometry", "p"),
        bounds_low=get("geometry", "bounds_low"),
        bounds_high=get("geometry", "bounds_high"),
        matrix_file=get("geometry", "matrix_file"),
        matrix_seed=get("geometry", "matrix_seed"),
        matrix_eig_low=get("geometry", "matrix_eig_low"),
        theta_source=get("theta", "source"),
        theta_file=get("theta", "file"),
        theta_values=get("theta", "values"),
        theta_style=get("theta", "style"),
        theta_gap=get("theta", "gap"),
        alpha_source=get("alpha", "source"),
        alpha_value=get("alpha", "value"),
    )
    _validate(cfg)
    return cfg


def _validate(cfg: ExperimentConfig) -> None:
    if cfg.mode not in MODES + (ORACLE_MODE,):
        raise ValueError(f"mode must be one of {MODES + (ORACLE_MODE,)}, got {cfg.mode!r}")
    if cfg.trials < 1:
        raise ValueError("trials must be >= 1")
    if cfg.horizon < 1:
        raise ValueError("horizon must be >= 1")
    if not 0.0 < cfg.delta < 1.0:
        raise ValueError("delta must be in (0, 1)")
    if cfg.sigma < 0 or cfg.sigma_factor <= 0:
        raise ValueError("need sigma >= 0 and sigma_factor > 0")
    if cfg.geometry_kind not in GEOMETRY_KINDS:
        raise ValueError(f"geometry kind must be one of {GEOMETRY_KINDS}")
    if not 1 <= cfg.sparsity <= cfg.dim:
        raise ValueError("need 1 <= sparsity <= dim")
    if cfg.mode == "sort_lock" and cfg.sparsity >= cfg.dim:
        raise ValueError("sort_lock needs sparsity < dim")
    if cfg.theta_source not in THETA_SOURCES:
        raise ValueError(f"theta source must be one of {THETA_SOURCES}")
    if cfg.theta_source == "explicit" and not (cfg.theta_file or cfg.theta_values):
        raise ValueError("explicit theta needs theta.file or theta.values")
    if cfg.theta_source == "gap_controlled":
        if cfg.theta_style not in ("standard", "adversarial"):
            raise ValueError("theta style must be standard or adversarial")
        if cfg.theta_gap <= 0:
            raise ValueError("gap_controlled theta needs gap > 0")
    if cfg.alpha_source not in ALPHA_SOURCES:
        raise ValueError(f"alpha source must be one of {ALPHA_SOURCES}")
    if cfg.alpha_source == "exhaustive" and cfg.dim > EXHAUSTIVE_ALPHA_MAX_DIM:
        raise ValueError(
            f"exhaustive alpha certification needs dim <= {EXHAUSTIVE_ALPHA_MAX_DIM}"
        )
    if cfg.alpha_source == "value" and not 0.0 < cfg.alpha_value <= 1.0:
        raise ValueError("alpha value must be in (0, 1]")


def random_spd_matrix(d: int, rng: np.random.Generator, eig_low: float | None = None):
    """Random symmetric positive definite matrix with max eigenvalue 1.

    Default: a normalized Wishart draw. With ``eig_low``, eigenvalues are
    uniform on [eig_low, 1] against a random orthogonal frame, which controls
    the conditioning directly.
    """
    if eig_low is not None:
        if not 0.0 < eig_low <= 1.0:
            raise ValueError("eig_low must be in (0, 1]")
        q, r = np.linalg.qr(rng.normal(size=(d, d)))
        q = q * np.sign(np.diag(r))
        eigs = rng.uniform(eig_low, 1.0, size=d)
        return (q * eigs) @ q.T
    m = rng.normal(size=(d, d))
    a = m @ m.T
    return a / np.linalg.eigvalsh(a)[-1]


def build_geometry(cfg: ExperimentConfig) -> ActionSetGeometry:
    kind, d = cfg.geometry_kind, cfg.dim
    if kind == "euclidean_ball":
        return euclidean_ball(d, radius=cfg.radius)
    if kind == "lp_ball":
        if cfg.p is None:
            raise ValueError("lp_ball geometry needs geometry.p")
        return lp_ball(d, cfg.p, radius=cfg.radius)
    if kind == "l1_ball":
        return l1_ball(d, radius=cfg.radius)
    if kind == "hypercube":
        if cfg.bounds_low is None or cfg.bounds_high is None:
            raise ValueError("hypercube geometry needs bounds_low and bounds_high")
        lo = np.asarray(cfg.bounds_low)
        hi = np.asarray(cfg.bounds_high)
        if lo.size == 1:
            lo = np.full(d, lo.item())
        if hi.size == 1:
            hi = np.full(d, hi.item())
        if lo.shape != (d,) or hi.shape != (d,):
            raise ValueError("bounds must be scalars or lists of length dim")
        return hypercube(np.column_stack([lo, hi]))
    # ellipsoid: explicit matrix file beats the seeded random one
    if cfg.matrix_file:
        a = np.loadtxt(cfg.matrix_file, delimiter=",")
        if a.shape != (d, d):
            raise ValueError(f"matrix file has shape {a.shape}, expected ({d}, {d})")
    else:
        a = random_spd_matrix(d, np.random.default_rng(cfg.matrix_seed), cfg.matrix_eig_low)
    return ellipsoid(a)


def make_gap_controlled_theta(
    d: int, h: int, gap_target: float, style: str, seed
) -> np.ndarray:
    """theta* with an exact magnitude gap at rank h, random signs and positions.

    ``standard`` spaces the top-h magnitudes 2*gap apart; ``adversarial``
    bunches them within 1e-6 of each other. Both put the (h+1)-th magnitude
    exactly ``gap_target`` below the h-th, which is what drives warm-up
    length — the styles differ only above the cut.
    """
    if gap_target <= 0:
        raise ValueError("gap target must be > 0")
    if not 1 <= h < d:
        raise ValueError(f"need 1 <= h < d, got h={h}, d={d}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    u = float(gap_target)

    mags = np.empty(d)
    if style == "standard":
        mags[:h] = 2.0 * u + 2.0 * u * np.arange(h - 1, -1, -1)
    elif style == "adversarial":
        mags[:h] = 2.0 * u + 1e-7 * np.arange(h - 1, -1, -1)
    else:
        raise ValueError(f"style must be standard or adversarial, got {style!r}")
    mags[h] = mags[h - 1] - u
    tail = d - h - 1
    if tail > 0:
        # strictly decreasing tail below the cut, bounded away from zero
        lo, hi = 0.1 * mags[h], 0.9 * mags[h]
        mags[h + 1 :] = np.linspace(hi, lo, tail)

    theta = np.empty(d)
    theta[rng.permutation(d)] = mags * rng.choice([-1.0, 1.0], size=d)
    realized, _ = empirical_sort_gap(theta, h)
    if abs(realized - gap_target) > GAP_VALIDATION_TOL:
        raise ValueError(f"construction realized gap {realized}, wanted {gap_target}")
    return theta


def generate_theta(cfg: ExperimentConfig, rng: np.random.Generator) -> np.ndarray:
    if cfg.theta_source == "uniform":
        return rng.uniform(-1.0, 1.0, size=cfg.dim)
    if cfg.theta_source == "gap_controlled":
        return make_gap_controlled_theta(
            cfg.dim, cfg.sparsity, cfg.theta_gap, cfg.theta_style, rng
        )
    if cfg.theta_values is not None:
        th = np.asarray(cfg.theta_values, dtype=float)
    else:
        th = np.loadtxt(cfg.theta_file, delimiter=",").reshape(-1)
    if th.shape != (cfg.dim,):
        raise ValueError(f"explicit theta has length {th.size}, expected {cfg.dim}")
    return th


@dataclass(eq=False)
class TrialRecord:
    """Everything one trial produced that the ledgers and CSVs need."""

    index: int
    theta_star: np.ndarray
    opt_value: float
    opt_support: tuple[int, ...]
    alpha: float
    error_const: float
    trace: RunTrace

    # -- per-step ledger -------------------------------------------------
    def inst_regret(self) -> np.ndarray:
        return self.opt_value - self.trace.step_mean

    def cum_regret(self) -> np.ndarray:
        return np.cumsum(self.inst_regret())

    def inst_alpha_regret(self) -> np.ndarray:
        return self.alpha * self.opt_value - self.trace.step_mean

    def cum_alpha_regret(self) -> np.ndarray:
        return np.cumsum(self.inst_alpha_regret())

    def recovery_fraction(self) -> np.ndarray:
        """|current estimate ∩ true support| / H per step; 0 pre-estimate."""
        tr = self.trace
        h = max(tr.sparsity, 1)
        s_true = set(self.opt_support)
        if tr.completed_cycles == 0:
            return np.zeros(tr.horizon)
        by_cycle = np.array(
            [len(s_true.intersection(s)) / h for s in tr.cycle_support]
        )
        have = tr.step_cycle - (tr.step_phase == EXPLORE)
        have = np.minimum(have, tr.completed_cycles)
        return np.where(have >= 1, by_cycle[np.maximum(have, 1) - 1], 0.0)

    def lock_cycle(self) -> int:
        return self.trace.lock_cycle

    def ols_errors(self) -> np.ndarray:
        if self.trace.completed_cycles == 0:
            return np.empty(0)
        return np.linalg.norm(self.trace.cycle_theta - self.theta_star, axis=1)


@dataclass(eq=False)
class ExperimentResult:
    config: ExperimentConfig
    geometry_kind: str
    trials: list[TrialRecord]

    def final_regrets(self) -> np.ndarray:
        return np.array([t.cum_regret()[-1] for t in self.trials])

    def final_alpha_regrets(self) -> np.ndarray:
        return np.array([t.cum_alpha_regret()[-1] for t in self.trials])

    def mean_cum_regret(self) -> np.ndarray:
        return np.mean([t.cum_regret() for t in self.trials], axis=0)

    def mean_cum_alpha_regret(self) -> np.ndarray:
        return np.mean([t.cum_alpha_regret() for t in self.trials], axis=0)

    def mean_recovery(self) -> np.ndarray:
        return np.mean([t.recovery_fraction() for t in self.trials], axis=0)

    def lock_cycles(self) -> np.ndarray:
        return np.array([t.lock_cycle() for t in self.trials])

    def alphas(self) -> np.ndarray:
        return np.array([t.alpha for t in self.trials])

    def theoretical_warmup(self) -> float:
        """Mean warm-up bound across trials, from each trial's true gap."""
        vals = []
        for t in self.trials:
            vals.append(
                _warmup_for(self.config, t.error_const, t.theta_star, self.geometry_kind)
            )
        return float(np.mean(vals))

    def summary_row(self) -> dict:
        cfg = self.config
        horizon = cfg.horizon
        r = self.final_regrets()
        ra = self.final_alpha_regrets()
        locks = self.lock_cycles()
        locked = locks[locks > 0]
        return {
            "experiment": cfg.name,
            "mode": cfg.mode,
            "trials": cfg.trials,
            "horizon": horizon,
            "alpha_mean": float(np.mean(self.alphas())),
            "final_regret_mean": float(np.mean(r)),
            "final_regret_std": float(np.std(r)),
            "final_alpha_regret_mean": float(np.mean(ra)),
            "final_alpha_regret_std": float(np.std(ra)),
            "regret_per_sqrt_t": float(np.mean(r) / math.sqrt(horizon)),
            "regret_per_t23": float(np.mean(r) / horizon ** (2.0 / 3.0)),
            "regret_per_t": float(np.mean(r) / horizon),
            "alpha_regret_per_sqrt_t": float(np.mean(ra) / math.sqrt(horizon)),
            "alpha_regret_per_t23": float(np.mean(ra) / horizon ** (2.0 / 3.0)),
            "alpha_regret_per_t": float(np.mean(ra) / horizon),
            "lock_fraction": float(np.mean(locks > 0)),
            "mean_lock_cycle": float(np.mean(locked)) if locked.size else math.nan,
            "mean_warmup_bound": self.theoretical_warmup(),
        }


def _warmup_for(cfg, error_const, theta_star, geometry_kind) -> float:
    """Warm-up bound with the gap notion matching the configured mode."""
    if cfg.mode == ORACLE_MODE:
        return 0.0
    if cfg.mode == "sort_lock":
        gap, _ = empirical_sort_gap(theta_star, cfg.sparsity)
    else:
        geom = build_geometry(cfg)
        trace = greedy_select(geom, theta_star, cfg.sparsity)
        # the greedy rule compares its gap against 2 L_X eps, so the
        # equivalent sort-style gap is min_gap / L_X
        gap = trace.min_gap / geom.radius
    if not math.isfinite(gap) or gap <= 0:
        return 0.0 if error_const == 0.0 else math.inf
    return warmup_bound_c0(error_const, gap, cfg.dim, cfg.delta)


def _trial_alpha(cfg: ExperimentConfig, geom, theta) -> float:
    if cfg.alpha_source == "one":
        return 1.0
    if cfg.alpha_source == "value":
        return cfg.alpha_value
    return submodularity_ratio(geom, theta, mode="exhaustive").alpha


def _oracle_trace(env: Environment, action, horizon: int) -> RunTrace:
    mean = float(env.theta_star @ action)
    d = action.shape[0]
    return RunTrace(
        mode=ORACLE_MODE,
        horizon=horizon,
        dim=d,
        sparsity=int(np.count_nonzero(action)),
        delta=1e-12,
        action_pool=action[None, :].copy(),
        step_action=np.zeros(horizon, dtype=np.int32),
        step_cycle=np.ones(horizon, dtype=np.int32),
        step_phase=np.full(horizon, EXPLOIT, dtype=np.uint8),
        step_mean=np.full(horizon, mean),
        step_reward=env.noisy(np.full(horizon, mean)),
        cycle_theta=np.empty((0, d)),
        cycle_eps=np.empty(0),
        cycle_gap=np.empty(0),
        cycle_locked=np.empty(0, dtype=bool),
        cycle_exploit_len=np.empty(0, dtype=np.int32),
        cycle_support=[],
        lock_cycle=-1,
        completed_cycles=0,
    )


def _run_trial(cfg: ExperimentConfig, index: int) -> TrialRecord:
    seq = np.random.SeedSequence(cfg.seed + index)
    theta_seed, basis_seed, noise_seed = seq.spawn(3)
    geom = build_geometry(cfg)
    theta = generate_theta(cfg, np.random.default_rng(theta_seed))
    support, action, opt = brute_force(geom, theta, cfg.sparsity)
    alpha = _trial_alpha(cfg, geom, theta)
    env = Environment(theta, cfg.sigma, geom, seed=np.random.default_rng(noise_seed))

    if cfg.mode == ORACLE_MODE:
        return TrialRecord(
            index=index,
            theta_star=theta,
            opt_value=opt,
            opt_support=support.indices,
            alpha=alpha,
            error_const=0.0,
            trace=_oracle_trace(env, action, cfg.horizon),
        )

    basis = make_basis(
        cfg.basis,
        geom,
        cfg.sparsity,
        cfg.sigma * cfg.sigma_factor,
        seed=np.random.default_rng(basis_seed),
    )
    state = make_state(cfg.mode, geom, basis, cfg.sparsity, cfg.delta)
    trace = run_horizon(env, state, cfg.horizon)
    return TrialRecord(
        index=index,
        theta_star=theta,
        opt_value=opt,
        opt_support=support.indices,
        alpha=alpha,
        error_const=basis.error_const,
        trace=trace,
    )


def _worker_count(trials: int) -> int:
    raw = os.environ.get("SPARSE_BANDIT_THREADS", "").strip()
    if raw:
        n = int(raw)
        if n < 1:
            raise ValueError("SPARSE_BANDIT_THREADS must be >= 1")
    else:
        n = os.cpu_count() or 1
    return max(1, min(n, trials))


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Run all trials (in parallel when allowed) and reduce in index order."""
    workers = _worker_count(cfg.trials)
    if workers == 1:
        records = [_run_trial(cfg, i) for i in range(cfg.trials)]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_trial, [cfg] * cfg.trials, range(cfg.trials)))
    return ExperimentResult(config=cfg, geometry_kind=cfg.geometry_kind, trials=records)


# ------------------------------------------------------------------ CSV


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    return repr(float(v))  # shortest round-trip decimal


def _write_rows(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def export_csv(result: ExperimentResult, out_dir) -> dict[str, Path]:
    """Write regret.csv, cycles.csv, recovery.csv and summary.csv.

    Rows are ordered trial-major then by time, floats are shortest
    round-trip decimals, so identical results export to identical bytes.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {name: out / f"{name}.csv" for name in ("regret", "cycles", "recovery", "summary")}

    def regret_rows():
        for rec in result.trials:
            tr = rec.trace
            inst, cum = rec.inst_regret(), rec.cum_regret()
            inst_a, cum_a = rec.inst_alpha_regret(), rec.cum_alpha_regret()
            phase_name = np.where(tr.step_phase == EXPLORE, "explore", "exploit")
            for t in range(tr.horizon):
                yield (
                    rec.index,
                    t + 1,
                    int(tr.step_cycle[t]),
                    phase_name[t],
                    inst[t],
                    cum[t],
                    inst_a[t],
                    cum_a[t],
                )

    _write_rows(
        paths["regret"],
        ["trial", "t", "cycle", "phase", "inst_regret", "cum_regret",
         "inst_alpha_regret", "cum_alpha_regret"],
        regret_rows(),
    )

    def cycle_rows():
        for rec in result.trials:
            tr = rec.trace
            errs = rec.ols_errors()
            for c in range(tr.completed_cycles):
                yield (
                    rec.index,
                    c + 1,
                    tr.cycle_eps[c],
                    tr.cycle_gap[c],
                    int(tr.cycle_locked[c]),
                    errs[c],
                )

    _write_rows(
        paths["cycles"],
        ["trial", "c", "eps_c", "gap", "locked", "ols_error"],
        cycle_rows(),
    )

    def recovery_rows():
        for rec in result.trials:
            frac = rec.recovery_fraction()
            for t in range(rec.trace.horizon):
                yield rec.index, t + 1, frac[t]

    _write_rows(paths["recovery"], ["trial", "t", "overlap_fraction"], recovery_rows())

    summary = result.summary_row()
    _write_rows(paths["summary"], list(summary), [list(summary.values())])
    return paths
