import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparsebandit.geometry import (
    SupportSet,
    axis_reach,
    best_action_on_support,
    boundary_scale,
    ellipsoid,
    euclidean_ball,
    hypercube,
    l1_ball,
    lp_ball,
    membership,
    value_on_support,
)

from _oracles import grid_max_on_ellipse, grid_max_on_lp_ball, random_feasible_point


def all_geometries(d, rng):
    """One instance of every geometry kind at dimension d."""
    m = rng.normal(size=(d, d))
    a = m @ m.T
    a = a / np.linalg.eigvalsh(a)[-1]  # normalize so lambda_max = 1
    lo = -rng.uniform(0.2, 1.5, size=d)
    hi = rng.uniform(0.2, 1.5, size=d)
    return [
        euclidean_ball(d, radius=rng.uniform(0.5, 3.0)),
        ellipsoid(a),
        lp_ball(d, p=rng.uniform(1.1, 2.0), radius=rng.uniform(0.5, 3.0)),
        l1_ball(d, radius=rng.uniform(0.5, 3.0)),
        hypercube(np.column_stack([lo, hi])),
    ]


# ---------------------------------------------------------------- SupportSet


def test_support_set_canonicalizes_order():
    assert SupportSet((3, 1, 2), capacity=3) == SupportSet((1, 2, 3), capacity=3)
    assert SupportSet((3, 1), capacity=2).indices == (1, 3)


def test_support_set_rejects_bad_input():
    with pytest.raises(ValueError):
        SupportSet((1, 1), capacity=3)
    with pytest.raises(ValueError):
        SupportSet((-1, 2), capacity=3)
    with pytest.raises(ValueError):
        SupportSet((0, 1, 2), capacity=2)
    with pytest.raises(ValueError):
        SupportSet((0,), capacity=0)


def test_support_set_overlap():
    a = SupportSet((0, 1, 4), capacity=3)
    b = SupportSet((1, 4, 5), capacity=3)
    assert a.overlap(b) == 2
    assert len(a) == 3 and 4 in a and 2 not in a


# ------------------------------------------------------------ construction


def test_ellipsoid_rejects_asymmetric_and_indefinite():
    with pytest.raises(ValueError):
        ellipsoid([[1.0, 0.5], [0.0, 1.0]])
    with pytest.raises(ValueError):
        ellipsoid([[1.0, 0.0], [0.0, -2.0]])
    with pytest.raises(ValueError):
        ellipsoid(np.ones((2, 3)))


def test_lp_ball_rejects_bad_exponent():
    for p in (1.0, 0.5, 2.5, -1.0):
        with pytest.raises(ValueError):
            lp_ball(3, p)
    g = lp_ball(3, 2.0)
    assert g.dual_exponent == pytest.approx(2.0)


def test_hypercube_rejects_interval_missing_origin():
    with pytest.raises(ValueError):
        hypercube([[0.5, 1.0], [0.0, 1.0]])
    with pytest.raises(ValueError):
        hypercube([[0.0, 1.0], [-1.0, -0.1]])
    with pytest.raises(ValueError):
        hypercube([[1.0, 0.0]])


def test_radius_is_max_feasible_norm():
    rng = np.random.default_rng(0)
    for geom in all_geometries(5, rng):
        for _ in range(200):
            x = random_feasible_point(geom, rng)
            assert np.linalg.norm(x) <= geom.radius + 1e-9


# ---------------------------------------------------------- frozen examples


def test_ball_value_and_action_345():
    g = euclidean_ball(3)
    th = np.array([3.0, 4.0, 0.0])
    assert value_on_support(g, [0, 1], th) == pytest.approx(5.0, abs=1e-12)
    np.testing.assert_allclose(
        best_action_on_support(g, [0, 1], th), [0.6, 0.8, 0.0], atol=1e-12
    )


def test_empty_support_value_is_zero():
    rng = np.random.default_rng(1)
    for geom in all_geometries(4, rng):
        assert value_on_support(geom, [], rng.normal(size=4)) == 0.0


def test_ellipsoid_value_matches_boundary_grid():
    g = ellipsoid(np.diag([1.0, 4.0]))
    th = np.array([2.0, 2.0])
    v = value_on_support(g, [0, 1], th)
    assert v == pytest.approx(np.sqrt(5.0), abs=1e-10)
    assert v == pytest.approx(grid_max_on_ellipse(g.matrix, th), abs=1e-9)


def test_ellipsoid_value_matches_grid_on_random_instances():
    rng = np.random.default_rng(2)
    for _ in range(5):
        m = rng.normal(size=(2, 2))
        a = m @ m.T + 0.3 * np.eye(2)
        a = a / np.linalg.eigvalsh(a)[-1]
        th = rng.normal(size=2)
        g = ellipsoid(a)
        assert value_on_support(g, [0, 1], th) == pytest.approx(
            grid_max_on_ellipse(a, th), rel=1e-9
        )


def test_hypercube_example():
    g = hypercube([[0, 1], [0, 1], [0, 1]])
    th = np.array([0.5, -0.2, 0.9])
    assert value_on_support(g, [0, 2], th) == pytest.approx(1.4, abs=1e-12)
    np.testing.assert_array_equal(
        best_action_on_support(g, [0, 1], th), [1.0, 0.0, 0.0]
    )


def test_lp_ball_example_and_grid():
    # p = 1.5 so q = 3; both coordinates end up at 2^(-2/3)
    g = lp_ball(2, 1.5)
    th = np.array([1.0, 1.0])
    v = value_on_support(g, [0, 1], th)
    x = best_action_on_support(g, [0, 1], th)
    assert v == pytest.approx(2.0 ** (1.0 / 3.0), abs=1e-12)
    np.testing.assert_allclose(x, [2.0 ** (-2.0 / 3.0)] * 2, atol=1e-12)
    assert v == pytest.approx(grid_max_on_lp_ball(1.5, 1.0, th), abs=1e-9)


def test_lp_ball_matches_grid_on_random_instances():
    rng = np.random.default_rng(3)
    for _ in range(5):
        p = rng.uniform(1.1, 2.0)
        r = rng.uniform(0.5, 2.0)
        th = rng.normal(size=2)
        g = lp_ball(2, p, radius=r)
        assert value_on_support(g, [0, 1], th) == pytest.approx(
            grid_max_on_lp_ball(p, r, th), rel=1e-9
        )


def test_zero_theta_gives_zero_action():
    rng = np.random.default_rng(4)
    th = np.zeros(4)
    for geom in all_geometries(4, rng):
        x = best_action_on_support(geom, [1, 3], th)
        np.testing.assert_array_equal(x, np.zeros(4))
        assert value_on_support(geom, [1, 3], th) == 0.0


def test_membership_examples():
    g = euclidean_ball(2)
    assert membership(g, [1.0, 0.0])
    assert not membership(g, [1.1, 0.0])
    assert membership(ellipsoid(np.diag([1.0, 4.0])), [0.0, 0.5])


def test_dimension_mismatch_raises():
    g = euclidean_ball(3)
    with pytest.raises(ValueError):
        value_on_support(g, [0], [1.0, 2.0])
    with pytest.raises(ValueError):
        value_on_support(g, [3], [1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        membership(g, [1.0, 2.0])


# -------------------------------------------------------------- invariants


def test_value_is_lipschitz_in_theta():
    # |h(S; t1) - h(S; t2)| <= radius * ||t1 - t2||, 1000 triples per kind
    rng = np.random.default_rng(5)
    d = 6
    for geom in all_geometries(d, rng):
        for _ in range(1000):
            k = rng.integers(1, d + 1)
            s = sorted(rng.choice(d, size=k, replace=False).tolist())
            t1 = rng.normal(size=d) * rng.uniform(0.1, 3.0)
            t2 = t1 + rng.normal(size=d) * rng.uniform(0.0, 2.0)
            lhs = abs(value_on_support(geom, s, t1) - value_on_support(geom, s, t2))
            assert lhs <= geom.radius * np.linalg.norm(t1 - t2) + 1e-9


def test_value_monotone_in_support():
    rng = np.random.default_rng(6)
    d = 6
    for geom in all_geometries(d, rng):
        for _ in range(300):
            k2 = rng.integers(1, d + 1)
            big = sorted(rng.choice(d, size=k2, replace=False).tolist())
            k1 = rng.integers(0, k2 + 1)
            small = sorted(rng.choice(big, size=k1, replace=False).tolist())
            th = rng.normal(size=d)
            assert (
                value_on_support(geom, small, th)
                <= value_on_support(geom, big, th) + 1e-12
            )


def test_best_action_certifies_value():
    # theta . x* equals the value, x* is feasible, supp(x*) inside S
    rng = np.random.default_rng(7)
    d = 6
    for geom in all_geometries(d, rng):
        for _ in range(300):
            k = rng.integers(1, d + 1)
            s = sorted(rng.choice(d, size=k, replace=False).tolist())
            th = rng.normal(size=d) * rng.uniform(0.1, 3.0)
            x = best_action_on_support(geom, s, th)
            v = value_on_support(geom, s, th)
            assert abs(float(th @ x) - v) <= 1e-10 * max(1.0, abs(v))
            assert membership(geom, x)
            off = np.setdiff1d(np.arange(d), s)
            np.testing.assert_array_equal(x[off], 0.0)


def test_best_action_never_beaten_by_feasible_points():
    rng = np.random.default_rng(8)
    d = 5
    for geom in all_geometries(d, rng):
        for _ in range(100):
            s = sorted(rng.choice(d, size=3, replace=False).tolist())
            th = rng.normal(size=d)
            v = value_on_support(geom, s, th)
            y = random_feasible_point(geom, rng, support=s)
            assert float(th @ y) <= v + 1e-9


def test_ball_action_is_stable_in_theta():
    # ||x*(t1) - x*(t2)|| <= 2 r ||t1 - t2|| / ||t2 on S||
    rng = np.random.default_rng(9)
    g = euclidean_ball(6, radius=1.7)
    for _ in range(500):
        s = sorted(rng.choice(6, size=3, replace=False).tolist())
        t2 = rng.normal(size=6)
        if np.linalg.norm(t2[s]) < 0.1:
            continue
        t1 = t2 + rng.normal(size=6) * rng.uniform(0.0, 1.0)
        x1 = best_action_on_support(g, s, t1)
        x2 = best_action_on_support(g, s, t2)
        bound = 2.0 * g.radius * np.linalg.norm(t1 - t2) / np.linalg.norm(t2[s])
        assert np.linalg.norm(x1 - x2) <= bound + 1e-9


def test_ellipsoid_with_scaled_identity_reduces_to_ball():
    rng = np.random.default_rng(10)
    d = 5
    for _ in range(50):
        radius = rng.uniform(0.5, 3.0)
        ge = ellipsoid(np.eye(d) / radius**2)
        gb = euclidean_ball(d, radius=radius)
        k = rng.integers(1, d + 1)
        s = sorted(rng.choice(d, size=k, replace=False).tolist())
        th = rng.normal(size=d)
        assert value_on_support(ge, s, th) == pytest.approx(
            value_on_support(gb, s, th), abs=1e-10
        )


@given(st.integers(2, 8), st.integers(0, 2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_scaling_a_feasible_point_down_stays_feasible(d, seed):
    rng = np.random.default_rng(seed)
    for geom in all_geometries(d, rng):
        x = random_feasible_point(geom, rng)
        assert membership(geom, x)
        assert membership(geom, 0.5 * x)


def test_axis_reach_points_are_feasible_and_extreme():
    rng = np.random.default_rng(11)
    for geom in all_geometries(5, rng):
        for k in range(5):
            r = axis_reach(geom, k)
            e = np.zeros(5)
            e[k] = r
            assert membership(geom, e)
            assert value_on_support(geom, [k], e) == pytest.approx(
                r * r, rel=1e-9, abs=1e-12
            )


def test_boundary_scale_lands_on_boundary():
    rng = np.random.default_rng(12)
    for geom in all_geometries(5, rng):
        for _ in range(50):
            v = rng.normal(size=5)
            s = boundary_scale(geom, v)
            assert np.isfinite(s) and s > 0
            assert membership(geom, s * v)
            assert not membership(geom, 1.01 * s * v)
    assert boundary_scale(euclidean_ball(3), np.zeros(3)) == np.inf
