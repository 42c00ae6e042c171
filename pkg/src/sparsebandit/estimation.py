"""Exploration bases and fixed-design least squares.

During exploration the learner repeatedly plays a fixed set of d sparse
actions b_1..b_d. After c full sweeps the parameter estimate is

    theta_hat = (c B)^-1 sum_k b_k * (total reward seen on b_k),

where B = sum_k b_k b_k'. The anytime error radius eps_c and the warm-up
bound both depend on the basis only through the constant
``error_const`` = 2 sigma^2 tr(B) / lambda_min(B)^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import ActionSetGeometry, SupportSet, axis_reach, boundary_scale, membership
from .oracles import top_h_indices

__all__ = [
    "ExplorationBasis",
    "OlsState",
    "make_basis",
    "initial_ols_state",
    "ols_update",
    "error_radius",
    "empirical_sort_gap",
    "warmup_bound_c0",
]

BASIS_KINDS = ("standard", "gaussian_orthogonal", "uniform_orthogonal")
_MIN_EIG = 1e-10
_MAX_RESAMPLES = 100


@dataclass(frozen=True, eq=False)
class ExplorationBasis:
    """d sparse exploration actions with the design statistics derived from them.

    ``actions[k]`` is the k-th action (a row), each feasible and at most
    H-sparse. ``gram`` is B = sum of outer products, ``gram_min_eig`` its
    smallest eigenvalue (must be positive: the design spans R^d), and
    ``error_const`` the constant 2 sigma^2 tr(B) / lambda_min^2 entering the
    error radius. ``gram_inv`` is cached because the estimator needs it every
    cycle.
    """

    actions: np.ndarray
    gram: np.ndarray
    gram_inv: np.ndarray
    gram_min_eig: float
    gram_trace: float
    noise_scale: float
    error_const: float
    kind: str

    @property
    def dim(self) -> int:
        return self.actions.shape[0]


@dataclass(frozen=True, eq=False)
class OlsState:
    """Accumulated sweep count and per-action reward totals.

    ``theta_hat`` is None until the first complete sweep (cycle >= 1).
    """

    cycle: int
    reward_sums: np.ndarray
    theta_hat: np.ndarray | None


def _orthogonal_columns(d: int, kind: str, rng: np.random.Generator) -> np.ndarray:
    if kind == "gaussian_orthogonal":
        m = rng.normal(size=(d, d))
    else:
        m = rng.uniform(-1.0, 1.0, size=(d, d))
    q, r = np.linalg.qr(m)
    # fix signs so the decomposition (hence the basis) is unique
    return q * np.sign(np.diag(r))


def _finalize(actions: np.ndarray, sigma: float, kind: str) -> ExplorationBasis | None:
    gram = actions.T @ actions  # rows are b_k, so B = sum b_k b_k'
    eigs = np.linalg.eigvalsh(gram)
    if eigs[0] <= _MIN_EIG:
        return None
    trace = float(np.trace(gram))
    lam0 = float(eigs[0])
    actions = actions.copy()
    actions.setflags(write=False)
    gram.setflags(write=False)
    inv = np.linalg.inv(gram)
    inv.setflags(write=False)
    return ExplorationBasis(
        actions=actions,
        gram=gram,
        gram_inv=inv,
        gram_min_eig=lam0,
        gram_trace=trace,
        noise_scale=float(sigma),
        error_const=2.0 * sigma * sigma * trace / lam0**2,
        kind=kind,
    )


def make_basis(
    kind: str,
    geom: ActionSetGeometry,
    h: int,
    sigma: float,
    seed: int | np.random.Generator = 0,
) -> ExplorationBasis:
    """Build an invertible exploration design of d feasible H-sparse actions.

    ``standard`` stretches each coordinate vector to the edge of the action
    set. The two ``*_orthogonal`` kinds draw a random orthogonal matrix (QR of
    a Gaussian or uniform square matrix), keep each column's H largest
    coordinates when H < d, and rescale the result onto the boundary of the
    action set; if that projection collapses the design, it is resampled (up
    to 100 times) before giving up.
    """
    if kind not in BASIS_KINDS:
        raise ValueError(f"kind must be one of {BASIS_KINDS}, got {kind!r}")
    if not 1 <= h <= geom.dim:
        raise ValueError(f"need 1 <= h <= {geom.dim}, got {h}")
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    d = geom.dim

    if kind == "standard":
        reach = np.array([axis_reach(geom, k) for k in range(d)])
        basis = _finalize(np.diag(reach), sigma, kind)
        if basis is None:
            raise ValueError("standard basis is singular: some axis has zero reach")
        return _check_feasible(basis, geom, h)

    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    for _ in range(_MAX_RESAMPLES):
        cols = _orthogonal_columns(d, kind, rng)
        actions = np.zeros((d, d))
        for k in range(d):
            v = cols[:, k]
            if h < d:
                keep = top_h_indices(v, h)
                sparse = np.zeros(d)
                sparse[keep] = v[keep]
                v = sparse
            actions[k] = v * boundary_scale(geom, v)
        basis = _finalize(actions, sigma, kind)
        if basis is not None:
            return _check_feasible(basis, geom, h)
    raise ValueError(f"no invertible design found after {_MAX_RESAMPLES} resamples")


def _check_feasible(basis: ExplorationBasis, geom, h: int) -> ExplorationBasis:
    for b in basis.actions:
        if np.count_nonzero(b) > h or not membership(geom, b):
            raise ValueError("exploration action infeasible or too dense")
    return basis


def initial_ols_state(d: int) -> OlsState:
    return OlsState(cycle=0, reward_sums=np.zeros(d), theta_hat=None)


def ols_update(state: OlsState, basis: ExplorationBasis, rewards) -> OlsState:
    """Fold one full sweep of rewards (rewards[k] from playing actions[k]) in."""
    r = np.asarray(rewards, dtype=float)
    if r.shape != (basis.dim,):
        raise ValueError(f"rewards have shape {r.shape}, expected ({basis.dim},)")
    sums = state.reward_sums + r
    c = state.cycle + 1
    theta = basis.gram_inv @ (basis.actions.T @ sums) / c
    return OlsState(cycle=c, reward_sums=sums, theta_hat=theta)


def error_radius(basis: ExplorationBasis, c: int, d: int, delta: float) -> float:
    """Anytime estimation-error radius eps_c = sqrt(h1 ln(2 d c^2 / delta) / c).

    Zero when the noise constant is zero (the noiseless regime).
    """
    if c < 1:
        raise ValueError(f"need c >= 1, got {c}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    if basis.error_const == 0.0:
        return 0.0
    return math.sqrt(basis.error_const * math.log(2.0 * d * c * c / delta) / c)


def empirical_sort_gap(theta_hat, h: int) -> tuple[float, SupportSet]:
    """Gap between the H-th and (H+1)-th largest |theta_hat| plus the top-H set.

    The gap is what the sort-based support-locking rule compares against the
    error radius; it needs H < d to exist.
    """
    th = np.asarray(theta_hat, dtype=float)
    d = th.shape[0]
    if not 1 <= h < d:
        raise ValueError(f"need 1 <= h < d = {d}, got {h}")
    mags = np.abs(th)
    order = np.argsort(-mags, kind="stable")
    gap = float(mags[order[h - 1]] - mags[order[h]])
    return gap, SupportSet(np.sort(order[:h]), capacity=h)


def warmup_bound_c0(error_const: float, gap_min: float, d: int, delta: float) -> float:
    """Theoretical number of cycles before locking becomes possible.

    (32 h1 / gap^2) ln(2d/delta) + (128 h1 / gap^2) ln(64 h1 / gap^2),
    defined as 0 in the noiseless case h1 = 0.
    """
    if error_const == 0.0:
        return 0.0
    if error_const < 0 or gap_min <= 0:
        raise ValueError("need error_const >= 0 and gap_min > 0")
    ratio = error_const / gap_min**2
    return 32.0 * ratio * math.log(2.0 * d / delta) + 128.0 * ratio * math.log(64.0 * ratio)
