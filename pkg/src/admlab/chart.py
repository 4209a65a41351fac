"""Cartesian chart of a three-dimensional radial graph.

Over the Euclidean coordinates x of the base the graph metric is
``g_ij = delta_ij + f'(r)^2 x_i x_j / r^2``.  Everything here works on that
chart with finite differences only, so it serves as an independent check on
the warped-product formulas in :mod:`admlab.geometry`.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DimensionUnsupported
from .geometry import RadialGraph


def chart_metric(g: RadialGraph, x) -> np.ndarray:
    """Metric components at points ``x`` of shape (..., 3); result (..., 3, 3)."""
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x, axis=-1)
    fp = np.asarray(g.slope(r), dtype=float)
    coef = (fp * fp / (r * r))[..., None, None]
    return np.eye(3) + coef * x[..., :, None] * x[..., None, :]


def _partials(fn, x, step):
    """4th-order centered differences of ``fn`` along each axis: result (..., 3, *fn shape)."""
    out = []
    for k in range(3):
        e = np.zeros(3)
        e[k] = step
        d = (fn(x - 2 * e) - 8 * fn(x - e) + 8 * fn(x + e) - fn(x + 2 * e)) / (12 * step)
        out.append(d)
    return np.stack(out, axis=x.ndim - 1)


def christoffel(g: RadialGraph, x, step: float) -> np.ndarray:
    """Gamma^k_ij at points x, shape (..., k, i, j), from differenced metric components."""
    metric = chart_metric(g, x)
    inv = np.linalg.inv(metric)
    dg = _partials(lambda y: chart_metric(g, y), x, step)  # (..., l, i, j) = d_l g_ij
    lowered = 0.5 * (
        np.einsum("...ijl->...ijl", dg)  # d_i g_jl
        + np.einsum("...jil->...ijl", dg)  # d_j g_il
        - np.einsum("...lij->...ijl", dg)  # d_l g_ij
    )
    return np.einsum("...kl,...ijl->...kij", inv, lowered)


def scalar_curvature_fd(g: RadialGraph, x, step: float | None = None) -> np.ndarray:
    """Scalar curvature of the chart metric by nested finite differences."""
    if g.n != 3:
        raise DimensionUnsupported("the Cartesian chart is implemented for n = 3 only")
    x = np.asarray(x, dtype=float)
    if step is None and x.ndim > 1:
        flat = x.reshape(-1, 3)
        vals = [float(scalar_curvature_fd(g, p)) for p in flat]
        return np.array(vals).reshape(x.shape[:-1])
    if step is None:
        r = float(np.linalg.norm(x))
        # stay clear of the inner boundary, where f' blows up
        step = 1e-3 * min(r, r - g.a)
    gam = christoffel(g, x, step)
    dgam = _partials(lambda y: christoffel(g, y, step), x, step)  # (..., l, k, i, j)
    inv = np.linalg.inv(chart_metric(g, x))
    ricci = (
        np.einsum("...kkij->...ij", dgam)
        - np.einsum("...jkik->...ij", dgam)
        + np.einsum("...kkl,...lij->...ij", gam, gam)
        - np.einsum("...kjl,...lik->...ij", gam, gam)
    )
    return np.einsum("...ij,...ij->...", inv, ricci)


def _sphere_rule(n_theta: int, n_phi: int):
    """Gauss-Legendre in cos(theta) times the trapezoid rule in phi, for unit-sphere integrals."""
    c, wc = np.polynomial.legendre.leggauss(n_theta)
    phi = 2 * math.pi * np.arange(n_phi) / n_phi
    sin_t = np.sqrt(1 - c * c)
    pts = np.stack([
        np.outer(sin_t, np.cos(phi)), np.outer(sin_t, np.sin(phi)), np.outer(c, np.ones(n_phi))
    ], axis=-1).reshape(-1, 3)
    w = np.outer(wc, np.full(n_phi, 2 * math.pi / n_phi)).ravel()
    return pts, w


def adm_flux(g: RadialGraph, r: float, n_theta: int = 12, n_phi: int = 16,
             step: float | None = None) -> float:
    """(1/16 pi) times the flux of d_j g_ij - d_i g_jj through the coordinate sphere of radius r."""
    if g.n != 3:
        raise DimensionUnsupported("the coordinate ADM flux is implemented for n = 3 only")
    nu, w = _sphere_rule(n_theta, n_phi)
    x = r * nu
    h = step if step is not None else 1e-2 * r
    dg = _partials(lambda y: chart_metric(g, y), x, h)  # (p, l, i, j)
    div = np.einsum("pjij->pi", dg)
    trace_grad = np.einsum("pijj->pi", dg)
    integrand = np.einsum("pi,pi->p", div - trace_grad, nu)
    return float(np.sum(w * integrand) * r * r / (16 * math.pi))


def adm_mass_chart(g: RadialGraph, radii) -> list[tuple[float, float]]:
    """Coordinate ADM flux integral at each radius; its large-r limit is the ADM mass."""
    if g.n != 3:
        raise DimensionUnsupported("adm_mass_chart needs n = 3")
    return [(float(r), adm_flux(g, float(r))) for r in np.atleast_1d(radii)]
