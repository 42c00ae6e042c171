"""Action-set geometries and fixed-support linear maximization.

An action set X is a compact subset of R^d. Given a support set S (the
coordinates allowed to be nonzero) and a parameter vector ``theta``, every
geometry here answers

    maximize  theta . x   over  x in X  with  supp(x) contained in S

in closed form, which is the primitive the sparse-action oracles and the
online algorithms call over and over. Five geometries are supported:
Euclidean balls, ellipsoids ``{x : x' A x <= 1}``, lp balls with
p in (1, 2], l1 balls (cross-polytopes) and axis-aligned boxes.

All geometry objects are immutable after construction and their operations
are pure functions, so they can be shared freely across worker processes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

__all__ = [
    "SupportSet",
    "ActionSetGeometry",
    "euclidean_ball",
    "ellipsoid",
    "lp_ball",
    "l1_ball",
    "hypercube",
    "value_on_support",
    "best_action_on_support",
    "membership",
    "axis_reach",
    "boundary_scale",
]

# Norms below this are treated as exactly zero: the maximizer formulas all
# divide by a norm of theta restricted to the support, and the zero action
# (value 0) is the correct degenerate answer.
ZERO_NORM_TOL = 1e-12

# Slack on the defining inequality when testing feasibility of a point.
MEMBERSHIP_TOL = 1e-9

# Tolerances for validating an ellipsoid matrix at construction time.
_SYM_TOL = 1e-10
_EIG_FLOOR = 1e-10


@dataclass(frozen=True)
class SupportSet:
    """A set of coordinate indices with a cardinality cap.

    Stored canonically (ascending, duplicate-free) so that equality and
    hashing are structural. ``capacity`` is the sparsity budget the set was
    built under; ``len(support) <= capacity`` always holds.
    """

    indices: tuple[int, ...]
    capacity: int

    def __post_init__(self):
        idx = tuple(sorted(int(i) for i in self.indices))
        if len(set(idx)) != len(idx):
            raise ValueError(f"duplicate indices in support: {self.indices}")
        if idx and idx[0] < 0:
            raise ValueError(f"negative index in support: {self.indices}")
        cap = int(self.capacity)
        if cap < 1:
            raise ValueError(f"capacity must be >= 1, got {self.capacity}")
        if len(idx) > cap:
            raise ValueError(f"{len(idx)} indices exceed capacity {cap}")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "capacity", cap)

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, i) -> bool:
        return int(i) in self.indices

    def as_array(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=np.intp)

    def overlap(self, other: "SupportSet") -> int:
        """Number of indices shared with ``other``."""
        return len(set(self.indices) & set(other.indices))


@dataclass(frozen=True, eq=False)  # identity equality: ndarray fields
class ActionSetGeometry:
    """Immutable description of a feasible action set.

    Built through the factory functions below (``euclidean_ball`` etc.),
    which validate parameters and derive ``radius`` — the largest Euclidean
    norm of any feasible point, so also the Lipschitz constant of the
    support-value function.
    """

    kind: str
    dim: int
    radius: float
    strongly_convex: bool
    matrix: np.ndarray | None = None  # ellipsoid only
    p: float | None = None  # lp ball only
    dual_exponent: float | None = None  # q = p/(p-1), lp ball only
    bounds: np.ndarray | None = None  # hypercube only, shape (d, 2)


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=float, copy=True)
    out.setflags(write=False)
    return out


def euclidean_ball(dim: int, radius: float = 1.0) -> ActionSetGeometry:
    """Ball ``{x : ||x||_2 <= radius}``."""
    if dim < 1 or radius <= 0:
        raise ValueError("need dim >= 1 and radius > 0")
    return ActionSetGeometry("euclidean_ball", int(dim), float(radius), True)


def ellipsoid(matrix) -> ActionSetGeometry:
    """Ellipsoid ``{x : x' A x <= 1}`` for symmetric positive definite A.

    A must be symmetric within 1e-10 and have smallest eigenvalue > 1e-10.
    The radius is 1/sqrt(min eigenvalue).
    """
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    if np.max(np.abs(a - a.T)) > _SYM_TOL:
        raise ValueError("matrix is not symmetric within 1e-10")
    a = (a + a.T) / 2.0
    eigs = np.linalg.eigvalsh(a)
    if eigs[0] <= _EIG_FLOOR:
        raise ValueError(f"matrix not positive definite: min eigenvalue {eigs[0]:.3e}")
    return ActionSetGeometry(
        "ellipsoid", a.shape[0], float(1.0 / np.sqrt(eigs[0])), True, matrix=_frozen(a)
    )


def lp_ball(dim: int, p: float, radius: float = 1.0) -> ActionSetGeometry:
    """Ball ``{x : ||x||_p <= radius}`` for p in (1, 2]."""
    if dim < 1 or radius <= 0:
        raise ValueError("need dim >= 1 and radius > 0")
    if not 1.0 < p <= 2.0:
        raise ValueError(f"p must lie in (1, 2], got {p}")
    q = p / (p - 1.0)
    return ActionSetGeometry(
        "lp_ball", int(dim), float(radius), True, p=float(p), dual_exponent=q
    )


def l1_ball(dim: int, radius: float = 1.0) -> ActionSetGeometry:
    """Cross-polytope ``{x : ||x||_1 <= radius}``. Compact but not strongly convex."""
    if dim < 1 or radius <= 0:
        raise ValueError("need dim >= 1 and radius > 0")
    return ActionSetGeometry("l1_ball", int(dim), float(radius), False)


def hypercube(bounds) -> ActionSetGeometry:
    """Axis-aligned box ``{x : lo_i <= x_i <= hi_i}``.

    Every coordinate interval must contain 0, otherwise no action with a
    restricted support would be feasible. The radius is the norm of the
    farthest corner.
    """
    b = np.asarray(bounds, dtype=float)
    if b.ndim != 2 or b.shape[1] != 2 or b.shape[0] < 1:
        raise ValueError(f"bounds must have shape (d, 2), got {b.shape}")
    lo, hi = b[:, 0], b[:, 1]
    if np.any(lo > hi):
        raise ValueError("lower bounds exceed upper bounds")
    if np.any(lo > 0) or np.any(hi < 0):
        raise ValueError("each coordinate interval must contain 0")
    radius = float(np.sqrt(np.sum(np.maximum(lo**2, hi**2))))
    if radius <= 0:
        raise ValueError("degenerate box {0}")
    return ActionSetGeometry("hypercube", b.shape[0], radius, False, bounds=_frozen(b))


def _as_indices(geom: ActionSetGeometry, support) -> np.ndarray:
    if isinstance(support, SupportSet):
        idx = support.as_array()
    else:
        idx = np.asarray(sorted(int(i) for i in support), dtype=np.intp)
        if idx.size != np.unique(idx).size:
            raise ValueError("duplicate indices in support")
    if idx.size and (idx[0] < 0 or idx[-1] >= geom.dim):
        raise ValueError(f"support indices out of range [0, {geom.dim})")
    return idx


def _as_theta(geom: ActionSetGeometry, theta) -> np.ndarray:
    th = np.asarray(theta, dtype=float)
    if th.shape != (geom.dim,):
        raise ValueError(f"theta has shape {th.shape}, expected ({geom.dim},)")
    return th


def value_on_support(geom: ActionSetGeometry, support, theta) -> float:
    """Best expected reward ``max theta.x`` over feasible x supported on S.

    Closed forms per geometry: ``radius * ||theta_S||_2`` for the ball,
    ``sqrt(theta_S' A_S^-1 theta_S)`` for the ellipsoid (A_S the principal
    submatrix on S), the scaled dual norm ``radius * ||theta_S||_q`` for the
    lp ball, ``radius * max_i |theta_i|`` for the l1 ball, and the sum of
    per-coordinate best contributions for the box. Empty support gives 0.
    """
    th = _as_theta(geom, theta)
    idx = _as_indices(geom, support)
    if idx.size == 0:
        return 0.0
    sub = th[idx]
    kind = geom.kind
    if kind == "euclidean_ball":
        return float(geom.radius * np.linalg.norm(sub))
    if kind == "ellipsoid":
        if np.linalg.norm(sub) < ZERO_NORM_TOL:
            return 0.0
        a_sub = geom.matrix[np.ix_(idx, idx)]
        return float(np.sqrt(sub @ np.linalg.solve(a_sub, sub)))
    if kind == "lp_ball":
        return float(geom.radius * np.linalg.norm(sub, ord=geom.dual_exponent))
    if kind == "l1_ball":
        return float(geom.radius * np.max(np.abs(sub)))
    if kind == "hypercube":
        b = geom.bounds[idx]
        return float(np.sum(np.maximum(b[:, 0] * sub, b[:, 1] * sub)))
    raise ValueError(f"unknown geometry kind {kind!r}")


def best_action_on_support(geom: ActionSetGeometry, support, theta) -> np.ndarray:
    """Maximizer of ``theta . x`` over feasible x supported on S.

    Returns a full length-d vector (zeros off the support). When theta
    vanishes on the support the zero action is returned.
    """
    th = _as_theta(geom, theta)
    idx = _as_indices(geom, support)
    x = np.zeros(geom.dim)
    if idx.size == 0:
        return x
    sub = th[idx]
    kind = geom.kind
    if kind == "euclidean_ball":
        nrm = np.linalg.norm(sub)
        if nrm >= ZERO_NORM_TOL:
            x[idx] = geom.radius * sub / nrm
    elif kind == "ellipsoid":
        if np.linalg.norm(sub) >= ZERO_NORM_TOL:
            a_sub = geom.matrix[np.ix_(idx, idx)]
            z = np.linalg.solve(a_sub, sub)
            x[idx] = z / np.sqrt(sub @ z)
    elif kind == "lp_ball":
        q = geom.dual_exponent
        nrm = np.linalg.norm(sub, ord=q)
        if nrm >= ZERO_NORM_TOL:
            x[idx] = geom.radius * np.sign(sub) * np.abs(sub) ** (q - 1.0) / nrm ** (q - 1.0)
    elif kind == "l1_ball":
        j = int(np.argmax(np.abs(sub)))  # argmax returns the lowest tied index
        if np.abs(sub[j]) >= ZERO_NORM_TOL:
            x[idx[j]] = geom.radius * np.sign(sub[j])
    elif kind == "hypercube":
        b = geom.bounds[idx]
        x[idx] = np.where(sub > 0, b[:, 1], np.where(sub < 0, b[:, 0], 0.0))
    else:
        raise ValueError(f"unknown geometry kind {kind!r}")
    return x


def membership(geom: ActionSetGeometry, x) -> bool:
    """Whether ``x`` lies in the action set, within 1e-9 on the defining inequality."""
    v = np.asarray(x, dtype=float)
    if v.shape != (geom.dim,):
        raise ValueError(f"point has shape {v.shape}, expected ({geom.dim},)")
    kind = geom.kind
    if kind == "euclidean_ball":
        return float(np.linalg.norm(v)) <= geom.radius + MEMBERSHIP_TOL
    if kind == "ellipsoid":
        return float(v @ geom.matrix @ v) <= 1.0 + MEMBERSHIP_TOL
    if kind == "lp_ball":
        return float(np.linalg.norm(v, ord=geom.p)) <= geom.radius + MEMBERSHIP_TOL
    if kind == "l1_ball":
        return float(np.sum(np.abs(v))) <= geom.radius + MEMBERSHIP_TOL
    if kind == "hypercube":
        lo, hi = geom.bounds[:, 0], geom.bounds[:, 1]
        return bool(np.all(v >= lo - MEMBERSHIP_TOL) and np.all(v <= hi + MEMBERSHIP_TOL))
    raise ValueError(f"unknown geometry kind {kind!r}")


def axis_reach(geom: ActionSetGeometry, k: int) -> float:
    """Signed coordinate r with the largest |r| such that r*e_k is feasible.

    Ties between the two directions resolve to the positive one. Used to
    build the standard exploration basis.
    """
    if not 0 <= k < geom.dim:
        raise ValueError(f"axis {k} out of range")
    kind = geom.kind
    if kind in ("euclidean_ball", "lp_ball", "l1_ball"):
        return geom.radius
    if kind == "ellipsoid":
        return float(1.0 / np.sqrt(geom.matrix[k, k]))
    if kind == "hypercube":
        lo, hi = geom.bounds[k]
        return float(hi if abs(hi) >= abs(lo) else lo)
    raise ValueError(f"unknown geometry kind {kind!r}")


def boundary_scale(geom: ActionSetGeometry, v) -> float:
    """Largest s >= 0 such that ``s * v`` is feasible (inf for v = 0)."""
    w = np.asarray(v, dtype=float)
    if w.shape != (geom.dim,):
        raise ValueError(f"vector has shape {w.shape}, expected ({geom.dim},)")
    kind = geom.kind
    if kind == "euclidean_ball":
        nrm = np.linalg.norm(w)
    elif kind == "ellipsoid":
        nrm = np.sqrt(max(w @ geom.matrix @ w, 0.0))
        return float(np.inf) if nrm < ZERO_NORM_TOL else float(1.0 / nrm)
    elif kind == "lp_ball":
        nrm = np.linalg.norm(w, ord=geom.p)
    elif kind == "l1_ball":
        nrm = np.sum(np.abs(w))
    elif kind == "hypercube":
        lo, hi = geom.bounds[:, 0], geom.bounds[:, 1]
        with np.errstate(divide="ignore"):
            caps = np.where(w > 0, hi / w, np.where(w < 0, lo / w, np.inf))
        return float(np.min(caps)) if caps.size else float(np.inf)
    else:
        raise ValueError(f"unknown geometry kind {kind!r}")
    return float(np.inf) if nrm < ZERO_NORM_TOL else float(geom.radius / nrm)
