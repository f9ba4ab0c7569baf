"""Tour of the constrained-zonotope kernel.

Builds a few small sets, runs every exact operation on them, and prints
the resulting interval hulls so the effect of each step is visible.
Run as: python3 demos/geometry_tour.py
"""

import numpy as np

from czest import czono


def show(label, Z):
    hull = czono.interval_hull(Z)
    lo = np.array2string(hull.lo, precision=3)
    hi = np.array2string(hull.hi, precision=3)
    print(f"{label:<28} ng={Z.n_generators:<3} nc={Z.n_constraints:<3} "
          f"hull lo={lo} hi={hi}")


def main():
    # two boxes in the plane, one rotated into a genuine zonotope
    X = czono.from_box(czono.Box(np.array([-1.0, -1.0]), np.array([1.0, 1.0])))
    rot = np.array([[np.cos(0.5), -np.sin(0.5)], [np.sin(0.5), np.cos(0.5)]])
    Y = czono.linear_map(rot, X)
    show("unit box X", X)
    show("rotated box Y = R X", Y)

    # Minkowski sum fattens, intersection trims
    S = czono.minkowski_sum(X, Y)
    show("X + Y", S)
    I = czono.intersect(X, Y)
    show("X meet Y", I)

    # an affine slice: keep only points of X whose coordinates sum to 1
    sliced = czono.ConstrainedZonotope(
        X.G, X.c, np.array([[1.0, 1.0]]), np.array([1.0]), X.h
    )
    show("X with x1 + x2 = 1", sliced)

    # measurement update through a map: first coordinate of S observed
    # as 0.5 with +-0.1 sensor noise
    noise = czono.from_box(czono.Box(np.array([-0.1]), np.array([0.1])))
    updated = czono.intersect_under_map(
        S, np.array([[1.0, 0.0]]), np.array([0.5]), noise
    )
    show("S given x1 = 0.5 +- 0.1", updated)

    # projection and stacking
    show("project to x2", czono.project(updated, [1]))
    P = czono.cartesian_product([X, czono.project(updated, [1])])
    show("X x (slice of S)", P)

    # membership queries against the trimmed set
    for p in ([0.5, 0.0], [0.5, 1.9], [-2.0, 0.0]):
        inside = czono.contains(updated, np.array(p))
        print(f"  contains {p}: {inside}")

    # unbounded generators: a vertical strip, then pinned by a second set
    strip = czono.ConstrainedZonotope(
        np.eye(2), np.zeros(2),
        np.zeros((0, 2)), np.zeros(0),
        np.array([0.5, np.inf]),
    )
    hull = czono.interval_hull(strip)
    print(f"{'strip |x1|<=0.5':<28} hull lo={hull.lo} hi={hull.hi}")
    show("strip meet Y", czono.intersect(strip, Y))

    # emptiness is decided exactly
    far = czono.from_box(czono.Box(np.array([5.0, 5.0]), np.array([6.0, 6.0])))
    print(f"X meet far box empty: {czono.is_empty(czono.intersect(X, far))}")


if __name__ == "__main__":
    main()
