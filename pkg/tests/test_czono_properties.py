"""Randomized invariants of the set algebra, via the built-in check suites."""

import numpy as np

from czest import czono, verify
from czest.czono import Box, ConstrainedZonotope


def test_geometry_suite_passes():
    results = verify.geometry_checks(rng_seed=99, cases_per_op=40)
    bad = [r for r in results if not r.passed]
    assert not bad, bad


def test_membership_biconditional_random_intersections():
    rng = np.random.default_rng(3)
    for _ in range(25):
        Z1, _ = verify._random_cz(rng, dim=2, allow_inf=False)
        Z2, _ = verify._random_cz(rng, dim=2, allow_inf=False)
        I = czono.intersect(Z1, Z2)
        for _ in range(20):
            x = rng.uniform(-4, 4, 2)
            assert czono.contains(I, x) == (
                czono.contains(Z1, x) and czono.contains(Z2, x)
            )


def test_minkowski_members_add():
    rng = np.random.default_rng(4)
    for _ in range(25):
        Z1, xi1 = verify._random_cz(rng, dim=2, allow_inf=False)
        Z2, xi2 = verify._random_cz(rng, dim=2, allow_inf=False)
        S = czono.minkowski_sum(Z1, Z2)
        a = Z1.G @ xi1 + Z1.c
        b = Z2.G @ xi2 + Z2.c
        assert czono.contains(S, a + b)


def test_hull_attained_by_members():
    # each hull bound of a bounded CZ is attained by a feasible point
    rng = np.random.default_rng(5)
    for _ in range(25):
        Z, _ = verify._random_cz(rng, allow_inf=False)
        hull = czono.interval_hull(Z)
        for j in range(Z.dim):
            for target in (hull.lo[j], hull.hi[j]):
                # a point of Z with coordinate j pinned at the bound exists
                pin = ConstrainedZonotope(
                    Z.G,
                    Z.c,
                    np.vstack([Z.A, Z.G[j : j + 1, :]]),
                    np.concatenate([Z.b, [target - Z.c[j]]]),
                    Z.h,
                )
                assert not czono.is_empty(_loosen(pin, 1e-7)), (j, target)


def _loosen(Z, eps):
    # widen the box a hair so boundary attainment is robust to LP tolerance
    return ConstrainedZonotope(Z.G, Z.c, Z.A, Z.b, Z.h * (1 + eps) + eps)


def test_diameter_dominates_sampled_pairs():
    rng = np.random.default_rng(6)
    Z, xi0 = verify._random_cz(rng, dim=3, allow_inf=False)
    d = czono.diameter_inf(Z)
    pts = [Z.G @ xi + Z.c for xi in verify._interior_xi(rng, Z, xi0, 100)]
    worst = max(
        float(np.abs(a - b).max()) for a in pts for b in pts
    )
    assert worst <= d + 1e-7


def test_projection_preimage_exists():
    rng = np.random.default_rng(7)
    for _ in range(10):
        Z, _ = verify._random_cz(rng, dim=3, allow_inf=False)
        P = czono.project(Z, [0, 2])
        hull = czono.interval_hull(P)
        for _ in range(20):
            x = rng.uniform(hull.lo, hull.hi)
            if czono.contains(P, x):
                # some full-dimensional point of Z projects onto x
                probe = ConstrainedZonotope(
                    Z.G,
                    Z.c,
                    np.vstack([Z.A, Z.G[[0, 2], :]]),
                    np.concatenate([Z.b, x - Z.c[[0, 2]]]),
                    Z.h,
                )
                assert not czono.is_empty(probe)


def test_unbounded_prior_update_is_bounded():
    # updating the whole space with a full-rank measurement gives a box
    V = czono.from_box(Box([-1.0, -1.0], [1.0, 1.0]))
    U = czono.intersect_under_map(
        czono.whole_space(2), np.eye(2), np.array([3.0, -2.0]), V
    )
    hull = czono.interval_hull(U)
    assert hull.lo.tolist() == [2.0, -3.0]
    assert hull.hi.tolist() == [4.0, -1.0]


def test_unbounded_prior_partial_update_stays_unbounded():
    V = czono.from_box(Box([-1.0], [1.0]))
    U = czono.intersect_under_map(
        czono.whole_space(2), np.array([[1.0, 0.0]]), np.array([3.0]), V
    )
    hull = czono.interval_hull(U)
    assert hull.lo[0] == 2.0 and hull.hi[0] == 4.0
    assert np.isinf(hull.lo[1]) and np.isinf(hull.hi[1])
