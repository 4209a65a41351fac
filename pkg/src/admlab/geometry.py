"""Rotationally symmetric manifolds and their masses.

Two pictures of the same object live here.  A :class:`Profile` is the warped
product ``ds^2 + h(s)^2 g_sphere`` on ``[0, s_max]``; a :class:`RadialGraph`
is the radial function f(r) whose graph in Euclidean (n+1)-space carries that
metric, with r = h(s) the area radius.  :func:`to_graph` and
:func:`to_profile` convert between them.

Graphs are most accurately described through their mass function
``mu(r) = m_H(Sigma_r)``: then ``f'^2 = 2 mu / (r^(n-2) - 2 mu)`` and the
scalar curvature is ``2 (n-1) mu' / r^(n-1)``.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import MassBoundViolation, NotMonotone, Singular
from .numerics import (
    Antiderivative,
    derivative,
    limit_extrapolate,
    panel_nodes,
    solve_increasing,
)

KINDS = ("minimal", "pole", "truncated")

#: below this multiple of the length scale, pole curvature comes from a series fit
POLE_SERIES_RADIUS = 1e-8


def omega(n: int) -> float:
    """Area of the unit (n-1)-sphere."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def sphere_area(n: int, radius):
    return omega(n) * np.asarray(radius, dtype=float) ** (n - 1)


def _arr(x):
    return np.asarray(x, dtype=float)


def _unwrap(x, out):
    return float(out) if np.ndim(x) == 0 else out


def _memo_last(fn):
    """Cache the most recent array argument; conversions evaluate h, h', h'' at the same points."""
    state = [None, None]

    def wrapped(x):
        x = _arr(x)
        key = (x.shape, x.tobytes())
        cached = state[0]
        if cached is not None and cached[0] == key:
            return cached[1]
        out = fn(x)
        state[0] = (key, out)
        return out

    return wrapped


# ---------------------------------------------------------------------------
# profiles


class Profile:
    """Warped-product radius function h on [0, s_max].

    ``dh`` and ``d2h`` must be given together or not at all; without them
    both derivatives come from centered differences of ``h`` (one evaluation
    path per profile, never mixed).  ``kind`` describes s = 0: ``"minimal"``
    (h(0) > 0, h'(0) = 0), ``"pole"`` (h(0) = 0, h'(0) = 1) or
    ``"truncated"`` (an artificial inner edge).  ``breakpoints`` lists the s
    values where h'' (or h') may jump.  ``inverse`` optionally maps area
    radius back to s and is only meaningful where h is increasing.
    """

    def __init__(self, n: int, h: Callable, dh: Callable | None = None, d2h: Callable | None = None, *,
                 s_max: float, kind: str = "minimal", breakpoints: Sequence[float] = (),
                 scale: float | None = None, label: str | None = None,
                 inverse: Callable | None = None):
        if int(n) != n or n < 3:
            raise ValueError("dimension n must be an integer >= 3")
        if (dh is None) != (d2h is None):
            raise ValueError("give both derivative callbacks or neither")
        if kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if not s_max > 0:
            raise ValueError("s_max must be positive")
        self.n = int(n)
        self._h, self._dh, self._d2h = h, dh, d2h
        self.analytic = dh is not None
        self.s_max = float(s_max)
        self.kind = kind
        self.breakpoints = tuple(sorted(float(b) for b in breakpoints if 0 < b < s_max))
        self.label = label
        self.inverse = inverse
        if scale is None:
            scale = max([1.0, abs(float(_arr(h(np.array(0.0)))))] + list(self.breakpoints))
        self.scale = float(scale)

    def __repr__(self):
        return f"Profile(n={self.n}, kind={self.kind!r}, s_max={self.s_max:g}, label={self.label!r})"

    # evaluation -------------------------------------------------------------

    def _fd_point(self, s):
        # keep difference stencils inside [0, s_max]
        step = 1e-4 * self.scale
        return np.clip(s, 2.5 * step, None), step

    def h(self, s):
        s = _arr(s)
        return _unwrap(s, _arr(self._h(s)) * np.ones_like(s))

    def dh(self, s):
        s = _arr(s)
        if self.analytic:
            out = _arr(self._dh(s)) * np.ones_like(s)
        else:
            x, step = self._fd_point(s)
            out = derivative(self._h, x, step=step)
        return _unwrap(s, out)

    def d2h(self, s):
        s = _arr(s)
        if self.analytic:
            out = _arr(self._d2h(s)) * np.ones_like(s)
        else:
            x, step = self._fd_point(s)
            out = derivative(self._h, x, order=2, step=10 * step)
        return _unwrap(s, out)

    # geometry ------------------------------------------------------------------

    def area(self, s):
        return sphere_area(self.n, self.h(s))

    def hawking_mass(self, s):
        h, dh = _arr(self.h(s)), _arr(self.dh(s))
        return _unwrap(s, 0.5 * h ** (self.n - 2) * (1.0 - dh * dh))

    def mean_curvature(self, s):
        h, dh = _arr(self.h(s)), _arr(self.dh(s))
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (self.n - 1) * dh / h
        return _unwrap(s, out)

    def pole_h3(self) -> float:
        """Cubic coefficient of h = s + h3 s^3 at a pole (Richardson on two radii)."""
        s1 = 1e-3 * self.scale
        q = (_arr(self.h(np.array([s1, 2 * s1]))) - np.array([s1, 2 * s1])) / np.array([s1, 2 * s1]) ** 3
        return float((4.0 * q[0] - q[1]) / 3.0)

    def scalar_curvature(self, s):
        s = _arr(s)
        n = self.n
        h, dh, d2h = _arr(self.h(s)), _arr(self.dh(s)), _arr(self.d2h(s))
        near_pole = (self.kind == "pole") & (s < POLE_SERIES_RADIUS * self.scale)
        bad = (h <= 0) & ~near_pole
        if np.any(bad):
            raise Singular(f"h vanishes at interior s={float(s[bad].flat[0])}")
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (n - 1) * (-2.0 * d2h / h + (n - 2) * (1.0 - dh * dh) / (h * h))
        if np.any(near_pole):
            out = np.where(near_pole, -6.0 * n * (n - 1) * self.pole_h3(), out)
        return _unwrap(s, out)

    def rescaled(self, c: float) -> "Profile":
        """The profile of the metric c^2 g: h~(s) = c h(s / c)."""
        if not c > 0:
            raise ValueError("scale factor must be positive")
        h, dh, d2h = self._h, self._dh, self._d2h
        new_dh = new_d2h = None
        if self.analytic:
            new_dh = lambda s: dh(_arr(s) / c)  # noqa: E731
            new_d2h = lambda s: d2h(_arr(s) / c) / c  # noqa: E731
        inv = None
        if self.inverse is not None:
            inv = lambda r, f=self.inverse: c * _arr(f(_arr(r) / c))  # noqa: E731
        return Profile(self.n, lambda s: c * _arr(h(_arr(s) / c)), new_dh, new_d2h,
                       s_max=c * self.s_max, kind=self.kind,
                       breakpoints=[c * b for b in self.breakpoints], scale=c * self.scale,
                       label=self.label and f"{self.label}*{c:g}", inverse=inv)

    # s values where h is increasing are invertible ---------------------------

    def s_of_r(self, r):
        """Sphere with area radius r on an increasing profile."""
        r = _arr(r)
        if self.inverse is not None:
            return _unwrap(r, _arr(self.inverse(r)) * np.ones_like(r))
        out = solve_increasing(self._h_only, self._dh_only, r, 0.0, self.s_max,
                               xtol=1e-15)
        return _unwrap(r, out)

    def _h_only(self, s):
        return _arr(self.h(s))

    def _dh_only(self, s):
        return _arr(self.dh(s))


def flat_profile(n: int = 3, s_max: float = 1e4) -> Profile:
    return Profile(n, lambda s: _arr(s) * 1.0, lambda s: np.ones_like(_arr(s)),
                   lambda s: np.zeros_like(_arr(s)), s_max=s_max, kind="pole",
                   label="flat", inverse=lambda r: _arr(r) * 1.0)


def cylinder_profile(n: int, radius: float, s_max: float = 1e4) -> Profile:
    return Profile(n, lambda s: np.full_like(_arr(s), radius), lambda s: np.zeros_like(_arr(s)),
                   lambda s: np.zeros_like(_arr(s)), s_max=s_max, kind="minimal",
                   label="cylinder", scale=radius)


# ---------------------------------------------------------------------------
# radial graphs


class RadialGraph:
    """Radial function f on [a, r_max] whose graph carries a rotationally symmetric metric.

    Give either the slope (``df``, optionally ``d2f``) or the mass function
    (``mass``, optionally ``dmass`` and ``gap = r^(n-2) - 2 mass`` computed
    without cancellation).  ``f`` is the height without the constant ``K``;
    when omitted it is the integral of the slope from ``a`` (singular at a
    minimal boundary).  a = 0 means the graph closes up smoothly at a pole.
    """

    def __init__(self, n: int, a: float, *, f: Callable | None = None, df: Callable | None = None,
                 d2f: Callable | None = None, mass: Callable | None = None,
                 dmass: Callable | None = None, gap: Callable | None = None, K: float = 0.0,
                 r_max: float | None = None, breakpoints: Sequence[float] = (),
                 scale: float | None = None, label: str | None = None, notes: Sequence[str] = ()):
        if int(n) != n or n < 3:
            raise ValueError("dimension n must be an integer >= 3")
        if (df is None) == (mass is None):
            raise ValueError("give exactly one of the slope df or the mass function")
        if a < 0:
            raise ValueError("inner radius must be nonnegative")
        self.n = int(n)
        self.a = float(a)
        self.form = "mass" if mass is not None else "slope"
        self._f, self._df, self._d2f = f, df, d2f
        self._mass, self._dmass, self._gap = mass, dmass, gap
        self.K = float(K)
        if scale is None:
            scale = max([1.0, self.a] + [float(b) for b in breakpoints])
        self.scale = float(scale)
        self.r_max = float(r_max) if r_max is not None else 1e5 * self.scale
        self.breakpoints = tuple(sorted(float(b) for b in breakpoints if self.a < b < self.r_max))
        self.label = label
        self.notes = tuple(notes)
        self._base = None

    def __repr__(self):
        return f"RadialGraph(n={self.n}, a={self.a:g}, form={self.form!r}, K={self.K:g}, label={self.label!r})"

    @property
    def kind(self) -> str:
        return "pole" if self.a == 0 else "minimal"

    # heights -------------------------------------------------------------------

    def _base_height(self, r):
        if self._f is not None:
            return _arr(self._f(r)) * np.ones_like(r)
        if self._base is None:
            nodes = panel_nodes(self.a, self.r_max, self.breakpoints)
            self._base = Antiderivative(self._slope_arr, nodes, singular_left=self.a > 0)
        return _arr(self._base(r))

    def height(self, r):
        r = _arr(r)
        return _unwrap(r, self.K + self._base_height(r))

    __call__ = height

    # slopes --------------------------------------------------------------------

    def _gap_arr(self, r):
        if self._gap is not None:
            return _arr(self._gap(r)) * np.ones_like(r)
        return r ** (self.n - 2) - 2.0 * self._mass_arr(r)

    def _mass_arr(self, r):
        if self.form == "mass":
            return _arr(self._mass(r)) * np.ones_like(r)
        fp = _arr(self._df(r)) * np.ones_like(r)
        with np.errstate(divide="ignore"):
            return 0.5 * r ** (self.n - 2) / (1.0 + 1.0 / (fp * fp))

    def _slope_arr(self, r):
        if self.form == "slope":
            return _arr(self._df(r)) * np.ones_like(r)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.sqrt(2.0 * self._mass_arr(r) / self._gap_arr(r))
        return out

    def slope(self, r):
        r = _arr(r)
        return _unwrap(r, self._slope_arr(r))

    def slope2(self, r):
        r = _arr(r)
        n = self.n
        if self.form == "slope":
            if self._d2f is not None:
                out = _arr(self._d2f(r)) * np.ones_like(r)
            else:
                out = derivative(self._slope_arr, r)
        else:
            mu, dmu, gap = self._mass_arr(r), self._dmass_arr(r), self._gap_arr(r)
            with np.errstate(divide="ignore", invalid="ignore"):
                dsq = 2.0 * (dmu * r ** (n - 2) - (n - 2) * mu * r ** (n - 3)) / (gap * gap)
                out = np.where(mu > 0, dsq / (2.0 * self._slope_arr(r)), 0.0)
        return _unwrap(r, out)

    # masses and curvature ------------------------------------------------------

    def mass(self, r):
        r = _arr(r)
        return _unwrap(r, self._mass_arr(r))

    hawking_mass = mass

    def _dmass_arr(self, r):
        n = self.n
        if self.form == "mass":
            if self._dmass is not None:
                return _arr(self._dmass(r)) * np.ones_like(r)
            return derivative(self._mass_arr, r)
        fp = self._slope_arr(r)
        fpp = _arr(self.slope2(r))
        q = 1.0 + fp * fp
        return r ** (n - 3) * (0.5 * (n - 2) * fp * fp / q + r * fp * fpp / (q * q))

    def dmass(self, r):
        r = _arr(r)
        return _unwrap(r, self._dmass_arr(r))

    def scalar_curvature(self, r):
        r = _arr(r)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = 2.0 * (self.n - 1) * self._dmass_arr(r) / r ** (self.n - 1)
        return _unwrap(r, out)

    def profile_slope(self, r):
        """h'(s) at the sphere of area radius r."""
        r = _arr(r)
        if self.form == "mass":
            with np.errstate(invalid="ignore"):
                out = np.sqrt(np.maximum(self._gap_arr(r), 0.0) / r ** (self.n - 2))
        else:
            fp = self._slope_arr(r)
            out = 1.0 / np.sqrt(1.0 + fp * fp)
        return _unwrap(r, out)

    def profile_accel(self, r):
        """h''(s) at the sphere of area radius r."""
        r = _arr(r)
        n = self.n
        with np.errstate(divide="ignore", invalid="ignore"):
            out = -self._dmass_arr(r) * r ** (2 - n) + (n - 2) * self._mass_arr(r) * r ** (1 - n)
        return _unwrap(r, out)

    # transformations -----------------------------------------------------------

    def shifted(self, dK: float) -> "RadialGraph":
        out = copy.copy(self)
        out.K = self.K + float(dK)
        return out

    def rescaled(self, c: float) -> "RadialGraph":
        """The graph of c*f(r/c), which carries the metric c^2 g."""
        if not c > 0:
            raise ValueError("scale factor must be positive")
        n = self.n
        kw = dict(K=c * self.K, r_max=c * self.r_max, breakpoints=[c * b for b in self.breakpoints],
                  scale=c * self.scale, label=self.label and f"{self.label}*{c:g}", notes=self.notes)
        f = lambda r: c * self._base_height(_arr(r) / c)  # noqa: E731
        if self.form == "mass":
            return RadialGraph(
                n, c * self.a, f=f,
                mass=lambda r: c ** (n - 2) * self._mass_arr(_arr(r) / c),
                dmass=lambda r: c ** (n - 3) * self._dmass_arr(_arr(r) / c),
                gap=lambda r: c ** (n - 2) * self._gap_arr(_arr(r) / c), **kw)
        return RadialGraph(
            n, c * self.a, f=f,
            df=lambda r: self._slope_arr(_arr(r) / c),
            d2f=lambda r: _arr(self.slope2(_arr(r) / c)) / c, **kw)


def flat_graph(n: int = 3, K: float = 0.0) -> RadialGraph:
    return RadialGraph(n, 0.0, f=lambda r: np.zeros_like(_arr(r)), mass=lambda r: np.zeros_like(_arr(r)),
                       dmass=lambda r: np.zeros_like(_arr(r)), K=K, label="flat")


# ---------------------------------------------------------------------------
# conversions


class _Arclength:
    """s(r) = integral of sqrt(1 + f'^2) from a, and its inverse.

    At a minimal boundary the inverse is solved in v = sqrt(r - a), where
    ds/dv stays finite; at a pole v = r.
    """

    def __init__(self, g: RadialGraph):
        self.g = g
        self.a = g.a
        self.boundary = g.a > 0
        nodes = panel_nodes(g.a, g.r_max, g.breakpoints)
        self.S = Antiderivative(self._dsdr, nodes, singular_left=self.boundary)
        self.v_nodes = self._v(nodes)
        self.s_max = float(self.S.table[-1])

    def _dsdr(self, r):
        with np.errstate(divide="ignore"):
            return 1.0 / _arr(self.g.profile_slope(r))

    def _v(self, r):
        return np.sqrt(np.maximum(r - self.a, 0.0)) if self.boundary else r

    def _r(self, v):
        return self.a + v * v if self.boundary else v

    def s_of_r(self, r):
        return self.S(r)

    def r_of_s(self, s):
        s = np.clip(_arr(s), 0.0, self.s_max)

        def G(v):
            return self.S(self._r(v))

        def dG(v):
            if not self.boundary:
                return self._dsdr(v)
            vv = np.maximum(v, 1e-9 * math.sqrt(self.g.scale))
            with np.errstate(divide="ignore"):
                return 2.0 * vv / _arr(self.g.profile_slope(self.a + vv * vv))

        guess = np.interp(s, self.S.table, self.v_nodes)
        v = solve_increasing(G, dG, s, 0.0, float(self.v_nodes[-1]), guess=guess, xtol=1e-15)
        return self._r(v)


class GraphProfile(Profile):
    """Profile of a radial graph; curvature and mass come from the graph formulas."""

    def __init__(self, g: RadialGraph):
        self.graph = g
        self._arc = _Arclength(g)
        self._radius = _memo_last(self._arc.r_of_s)
        super().__init__(
            g.n, self._radius, self._slope, self._accel, s_max=self._arc.s_max,
            kind=g.kind, breakpoints=[float(x) for x in self._arc.s_of_r(np.array(g.breakpoints))]
            if g.breakpoints else (), scale=g.scale, label=g.label, inverse=self._arc.s_of_r)

    def _slope(self, s):
        return self.graph.profile_slope(self._radius(s))

    def _accel(self, s):
        return self.graph.profile_accel(self._radius(s))

    def hawking_mass(self, s):
        return _unwrap(s, _arr(self.graph.mass(self._radius(_arr(s)))))

    def scalar_curvature(self, s):
        s = _arr(s)
        r = self._radius(s)
        out = _arr(self.graph.scalar_curvature(np.maximum(r, 1e-300)))
        if self.kind == "pole" and np.any(r <= POLE_SERIES_RADIUS * self.scale):
            out = np.where(r <= POLE_SERIES_RADIUS * self.scale, -6.0 * self.n * (self.n - 1) * self.pole_h3(), out)
        return _unwrap(s, out)


def to_profile(g: RadialGraph) -> Profile:
    """Profile with h(s(r)) = r, s(r) the arclength of the graph from its inner edge."""
    if isinstance(g, Profile):
        return g
    return GraphProfile(g)


def check_grid(p: Profile, per_segment: int = 120) -> np.ndarray:
    """s values for scanning a profile: geometric near 0 and s_max, dense at breakpoints."""
    edges = [0.0, *p.breakpoints, p.s_max]
    pieces = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        width = hi - lo
        u = np.linspace(0.0, 1.0, per_segment)[1:-1]
        pieces.append(lo + width * u)
        offsets = width * np.geomspace(1e-7, 0.5, 40)
        pieces.append(lo + offsets)
        pieces.append(hi - offsets)
    pieces.append(np.geomspace(1e-6 * p.scale, p.s_max, 200))
    grid = np.unique(np.concatenate(pieces))
    return grid[(grid > 0) & (grid <= p.s_max) & ~np.isin(grid, p.breakpoints)]


def to_graph(p: Profile, K: float = 0.0) -> RadialGraph:
    """Radial graph with f(a) = K whose induced metric is the profile's."""
    if isinstance(p, RadialGraph):
        return p.shifted(K - p.K)
    if p.kind == "truncated":
        raise NotMonotone("a truncated profile has no graph representation", location=0.0)
    grid = check_grid(p)
    slopes = _arr(p.dh(grid))
    worst = int(np.argmin(slopes))
    if slopes[worst] <= 0:
        raise NotMonotone(f"h' = {slopes[worst]:.3e} <= 0 at s = {grid[worst]:.6g}",
                          location=float(grid[worst]), amount=float(-slopes[worst]))
    steepest = int(np.argmax(np.abs(slopes)))
    if abs(slopes[steepest]) > 1.0 + 1e-9:
        raise MassBoundViolation(f"|h'| = {abs(slopes[steepest]):.6g} > 1 at s = {grid[steepest]:.6g}")
    n = p.n
    notes = []
    if slopes[worst] < 1e-6:
        notes.append(f"near-vertical graph: h' = {slopes[worst]:.3e} at s = {grid[worst]:.6g}")

    @_memo_last
    def at(r):
        return r, _arr(p.s_of_r(r))

    def mass(r):
        return _arr(p.hawking_mass(at(r)[1]))

    def gap(r):
        r, s = at(r)
        dh = _arr(p.dh(s))
        return r ** (n - 2) * dh * dh

    def dmass(r):
        r, s = at(r)
        return r ** (n - 1) * _arr(p.scalar_curvature(s)) / (2.0 * (n - 1))

    return RadialGraph(n, float(p.h(0.0)), mass=mass, dmass=dmass, gap=gap, K=K,
                       r_max=float(p.h(p.s_max)), breakpoints=[float(p.h(b)) for b in p.breakpoints],
                       scale=p.scale, label=p.label, notes=notes)


# ---------------------------------------------------------------------------
# masses


def scalar_curvature(p: Profile, s):
    return p.scalar_curvature(s)


def mean_curvature_sphere(p: Profile, s):
    return p.mean_curvature(s)


def hawking_mass_profile(p: Profile, s):
    return p.hawking_mass(s)


def hawking_mass_graph(g: RadialGraph, r):
    return g.mass(r)


def hawking_mass_general(n: int, area: float, mean_curv_integral: float) -> float:
    """Hawking mass from the area and the integral of |H|^(n-1) over the hypersurface."""
    if not area > 0:
        raise ValueError("area must be positive")
    if mean_curv_integral < 0:
        raise ValueError("the mean curvature integral is nonnegative")
    w = omega(n)
    return 0.5 * (area / w) ** ((n - 2) / (n - 1)) * (
        1.0 - (mean_curv_integral / w) ** (2.0 / (n - 1)) / (n - 1) ** 2)


@dataclass(frozen=True)
class MassCurve:
    abscissae: np.ndarray
    masses: np.ndarray
    frame: str  # "profile" (abscissa s) or "graph" (abscissa r)
    adm_estimate: float = math.nan
    adm_error: float = math.nan
    non_monotone_at: float | None = None

    def __len__(self):
        return len(self.abscissae)

    @property
    def is_monotone(self) -> bool:
        return self.non_monotone_at is None


def _worst_decrease(x, m, noise):
    steps = np.diff(m)
    k = int(np.argmin(steps))
    if steps[k] < -noise:
        return float(x[k + 1])
    return None


def mass_curve(source, abscissae, rel_tol: float = 1e-6) -> MassCurve:
    x = _arr(abscissae)
    m = _arr(source.hawking_mass(x))
    noise = rel_tol * max(1.0, float(np.max(np.abs(m))))
    frame = "graph" if isinstance(source, RadialGraph) else "profile"
    return MassCurve(x, m, frame, non_monotone_at=_worst_decrease(x, m, noise))


@dataclass(frozen=True)
class AdmResult:
    """ADM mass estimate; iterates as ``(value, error)``."""

    value: float
    error: float
    curve: MassCurve

    def __iter__(self):
        return iter((self.value, self.error))

    @property
    def diverges(self) -> bool:
        return math.isinf(self.value)


def _domain(source):
    if isinstance(source, RadialGraph):
        return source.a, source.r_max, source.breakpoints
    return 0.0, source.s_max, source.breakpoints


def adm_mass_limit(source, *, samples: int = 12, outer: float | None = None,
                   decay_exponent_hint: float = 1.0, rel_tol: float = 1e-6) -> AdmResult:
    """ADM mass as the limit of Hawking masses of large coordinate spheres.

    The tail is sampled geometrically from ten times the geometry's length
    scale (and past every breakpoint) out to ``outer``, 10^4 length scales by
    default.  Only a decreasing tail raises :class:`NotMonotone`; a dip
    further in is recorded on the returned curve as ``non_monotone_at``.
    """
    lo, hi, breaks = _domain(source)
    scale = max(source.scale, 1.0)
    start = max(10.0 * scale, 2.0 * max(breaks, default=0.0), lo + scale)
    stop = min(outer if outer is not None else 1e4 * scale, hi)
    if stop <= start:
        start = lo + 0.5 * (stop - lo)
    tail = np.geomspace(start, stop, samples)
    masses = _arr(source.hawking_mass(tail))
    est = limit_extrapolate(tail, masses, decay_exponent_hint, rel_tol=rel_tol)
    inner = np.unique(np.concatenate([
        lo + (start - lo) * np.geomspace(1e-6, 1.0, 30)[:-1],
        [b for b in breaks if b < start],
    ]))
    inner_masses = _arr(source.hawking_mass(inner))
    x = np.concatenate([inner, tail])
    m = np.concatenate([inner_masses, masses])
    noise = rel_tol * max(1.0, float(np.max(np.abs(m))))
    frame = "graph" if isinstance(source, RadialGraph) else "profile"
    curve = MassCurve(x, m, frame, est.value, est.error, _worst_decrease(x, m, noise))
    return AdmResult(est.value, est.error, curve)


# ---------------------------------------------------------------------------
# class membership


@dataclass(frozen=True)
class Violation:
    condition: str  # "boundary", "monotone", "growth" or "curvature"
    location: float
    value: float


@dataclass(frozen=True)
class ValidationReport:
    in_rotsym: bool
    violations: tuple[Violation, ...]
    min_scalar_curvature: float
    min_curvature_at: float
    minimal_sphere_locations: tuple[float, ...]

    def failed(self, condition: str) -> bool:
        return any(v.condition == condition for v in self.violations)


def _as_profile(source) -> Profile:
    if isinstance(source, Profile):
        return source
    if isinstance(source, RadialGraph):
        return to_profile(source)
    return source.profile  # GeneratedManifold


def validate_rotsym(source, curvature_tol: float = 1e-8, slope_tol: float = 1e-6) -> ValidationReport:
    """Check the class conditions: boundary, h' > 0, growth, and R >= -tol on a scan grid."""
    p = _as_profile(source)
    violations = []
    h0, dh0 = float(p.h(0.0)), float(p.dh(0.0))
    if p.kind == "pole":
        if abs(h0) > 1e-12 * p.scale or abs(dh0 - 1.0) > slope_tol:
            violations.append(Violation("boundary", 0.0, dh0))
    elif p.kind == "minimal":
        if h0 <= 0 or abs(dh0) > slope_tol:
            violations.append(Violation("boundary", 0.0, dh0))
    else:
        violations.append(Violation("boundary", 0.0, dh0))
    grid = check_grid(p)
    slopes = _arr(p.dh(grid))
    k = int(np.argmin(slopes))
    if slopes[k] <= 0:
        violations.append(Violation("monotone", float(grid[k]), float(slopes[k])))
    end_slope, end_h = float(p.dh(p.s_max)), float(p.h(p.s_max))
    if end_slope <= 0.5 or end_h < 0.5 * p.s_max:
        violations.append(Violation("growth", p.s_max, end_slope))
    R = _arr(p.scalar_curvature(grid))
    j = int(np.nanargmin(R))
    if R[j] < -curvature_tol:
        violations.append(Violation("curvature", float(grid[j]), float(R[j])))
    spheres = tuple(minimal_sphere_scan(p))
    return ValidationReport(not violations, tuple(violations), float(R[j]), float(grid[j]), spheres)


def minimal_sphere_scan(source, zero_tol: float = 1e-10) -> list[float]:
    """Interior s where h' vanishes: sign changes, tangential zeros, and flat runs.

    Jumps of h' at breakpoints are not zeros.  A run of s where h' is
    identically zero (a cylinder) is one component, reported at its midpoint.
    """
    p = _as_profile(source)
    edges = [0.0, *p.breakpoints, p.s_max]
    found = []
    inner = 1e-6 * p.scale
    for lo, hi in zip(edges[:-1], edges[1:]):
        width = hi - lo
        offs = width * np.geomspace(1e-9, 0.5, 60)
        u = np.unique(np.concatenate([lo + offs, hi - offs, np.linspace(lo, hi, 600)[1:-1]]))
        d = _arr(p.dh(u))
        flat = np.abs(d) <= zero_tol
        k = 0
        while k < u.size:
            if flat[k]:
                j = k
                while j + 1 < u.size and flat[j + 1]:
                    j += 1
                if u[k] > inner or u[j] - u[k] > inner:
                    found.append(0.5 * (u[k] + u[j]) if j > k else float(u[k]))
                k = j + 1
                continue
            if k + 1 < u.size and not flat[k + 1] and d[k] * d[k + 1] < 0:
                root = brentq(lambda x: float(p.dh(x)), u[k], u[k + 1], xtol=1e-14, rtol=1e-14)
                if root > inner:
                    found.append(float(root))
            k += 1
        # tangential zeros: interior local minima of |h'| that dip to zero
        a = np.abs(d)
        for i in range(1, u.size - 1):
            if a[i] < a[i - 1] and a[i] < a[i + 1] and not flat[i] and d[i - 1] * d[i + 1] > 0:
                if a[i] <= 1e-6 * max(a[i - 1], a[i + 1], 1e-300) and u[i] > inner:
                    found.append(float(u[i]))
    return sorted(found)
