"""Closed forms for the three-dimensional Schwarzschild slice of mass m.

Radii are area radii r >= 2m.  The profile is parametrized by ``u =
sqrt(r - 2m)``, in which the distance from the horizon is explicit::

    s(u) = u * sqrt(2m + u^2) + 2m * asinh(u / sqrt(2m))

The profile is even in s (the slice doubles smoothly across its horizon), so
every function below accepts negative s.
"""

from __future__ import annotations

import numpy as np

from .errors import NoConvergence


def horizon_radius(m: float, n: int = 3) -> float:
    return (2.0 * m) ** (1.0 / (n - 2))


def graph_height(r, m: float):
    """Height of the embedded graph, zero on the horizon."""
    return np.sqrt(8.0 * m * np.maximum(np.asarray(r, dtype=float) - 2.0 * m, 0.0))


def graph_slope(r, m: float):
    r = np.asarray(r, dtype=float)
    gap = r - 2.0 * m
    with np.errstate(divide="ignore"):
        return np.sqrt(2.0 * m / gap)


def graph_slope2(r, m: float):
    r = np.asarray(r, dtype=float)
    gap = r - 2.0 * m
    with np.errstate(divide="ignore"):
        return -0.5 * np.sqrt(2.0 * m) * gap ** -1.5


def arclength(r, m: float):
    """Distance from the horizon to the sphere of area radius r."""
    u = np.sqrt(np.maximum(np.asarray(r, dtype=float) - 2.0 * m, 0.0))
    return _s_of_u(u, m)


def _s_of_u(u, m):
    return u * np.sqrt(2.0 * m + u * u) + 2.0 * m * np.arcsinh(u / np.sqrt(2.0 * m))


def _u_of_s(s, m):
    s = np.abs(np.asarray(s, dtype=float))
    # s(u) is convex and increasing with s >= 2 sqrt(2m) u and s >= u^2, so
    # Newton from the smaller of those two upper bounds decreases monotonically
    u = np.minimum(s / (2.0 * np.sqrt(2.0 * m)), np.sqrt(s))
    for _ in range(100):
        step = (_s_of_u(u, m) - s) / (2.0 * np.sqrt(2.0 * m + u * u))
        u_new = np.maximum(u - step, 0.0)
        if np.all(np.abs(u_new - u) <= 4e-16 * np.maximum(u_new, 1e-300)):
            return u_new
        u = u_new
    if np.all(np.abs(step) <= 1e-14 * np.maximum(u, 1.0)):
        return u
    raise NoConvergence("Schwarzschild arclength inversion did not converge")


def profile_radius(s, m: float):
    u = _u_of_s(s, m)
    return 2.0 * m + u * u


def profile_slope(s, m: float):
    s = np.asarray(s, dtype=float)
    u = _u_of_s(s, m)
    return np.sign(s) * u / np.sqrt(2.0 * m + u * u)


def profile_accel(s, m: float):
    h = profile_radius(s, m)
    return m / (h * h)
