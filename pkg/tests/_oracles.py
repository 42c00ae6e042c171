"""Independent reference implementations used to cross-check the package.

Everything here deliberately avoids the closed forms under test: maxima are
found by enumerating boundary grids, greedy and the ratio are recomputed
with naive loops that only call value_on_support.
"""

from itertools import chain, combinations

import numpy as np

from sparsebandit.geometry import value_on_support


def _refined_grid_max(f, lo, hi, n_grid, passes=3):
    """Coarse grid max of f over [lo, hi], refined around the argmax."""
    best = -np.inf
    for _ in range(passes):
        t = np.linspace(lo, hi, n_grid)
        vals = f(t)
        i = int(np.argmax(vals))
        best = max(best, float(vals[i]))
        lo, hi = t[max(i - 1, 0)], t[min(i + 1, n_grid - 1)]
    return best


def grid_max_on_ellipse(matrix2, theta2, n_grid=200_000):
    """max of theta'x over the 2-d ellipse boundary x'Ax = 1, by enumeration.

    The boundary is Q diag(1/sqrt(eig)) (cos t, sin t); the maximum of a
    linear function over the full set is attained there.
    """
    a = np.asarray(matrix2, dtype=float)
    th = np.asarray(theta2, dtype=float)
    eigs, q = np.linalg.eigh(a)
    w = (th @ q) / np.sqrt(eigs)

    def profile(t):
        return w[0] * np.cos(t) + w[1] * np.sin(t)

    return _refined_grid_max(profile, 0.0, 2.0 * np.pi, n_grid)


def grid_max_on_lp_ball(p, radius, theta2, n_grid=200_000):
    """max of theta'x over the 2-d lp ball, by boundary enumeration.

    Uses the positive-quadrant parametrization x = r(u^(1/p), (1-u)^(1/p))
    with signs matched to theta, which covers the maximizing quadrant.
    """
    th = np.asarray(theta2, dtype=float)
    a, b = abs(th[0]), abs(th[1])

    def profile(u):
        return radius * (a * u ** (1.0 / p) + b * (1.0 - u) ** (1.0 / p))

    return _refined_grid_max(profile, 0.0, 1.0, n_grid)


def random_feasible_point(geom, rng, support=None):
    """A uniform-ish feasible point: random direction scaled to within X."""
    from sparsebandit.geometry import boundary_scale

    v = rng.normal(size=geom.dim)
    if support is not None:
        mask = np.zeros(geom.dim, dtype=bool)
        mask[list(support)] = True
        v = np.where(mask, v, 0.0)
    scale = boundary_scale(geom, v)
    if not np.isfinite(scale):
        return np.zeros(geom.dim)
    return v * scale * rng.uniform(0.0, 1.0)


def naive_greedy(geom, theta, h):
    """Greedy selection written the slow obvious way (no incremental stats)."""
    chosen = []
    gains = []
    for _ in range(h):
        best_v, best_g = None, -np.inf
        for v in range(geom.dim):
            if v in chosen:
                continue
            g = value_on_support(geom, sorted(chosen + [v]), theta) - value_on_support(
                geom, sorted(chosen), theta
            )
            if g > best_g:  # strict: keeps the lower-index tie rule
                best_v, best_g = v, g
        chosen.append(best_v)
        gains.append(best_g)
    return chosen, gains


def _subsets(d):
    return chain.from_iterable(combinations(range(d), k) for k in range(d + 1))


def naive_ratio(geom, theta, tol=1e-12):
    """Submodularity ratio by a direct double loop over all subset pairs.

    Only sensible for small d; exists to cross-check the bitmask version.
    """
    d = geom.dim
    gamma = 1.0
    for s in _subsets(d):
        h_s = value_on_support(geom, list(s), theta)
        for omega in _subsets(d):
            union = sorted(set(s) | set(omega))
            den = value_on_support(geom, union, theta) - h_s
            if den <= tol:
                continue
            num = sum(
                value_on_support(geom, sorted(set(s) | {w}), theta) - h_s
                for w in omega
                if w not in s
            )
            gamma = min(gamma, max(num, 0.0) / den)
    return max(0.0, min(1.0, gamma))
