"""Sequences of rotationally symmetric manifolds and what survives in their limits.

The probes here work in the Euclidean graph picture: heights of the
members over a common annulus, the flat-norm decomposition of the
difference of two graphs, blow-up of heights at a sphere, and finally the
comparison of the limit's ADM mass with the liminf of the members' masses.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import DomainMismatch, NoSuchSphere, NotCauchy, NotDifferentiable, NotMonotone
from .families import FamilySpec, GeneratedManifold, build
from .geometry import (
    Profile,
    RadialGraph,
    adm_mass_limit,
    check_grid,
    minimal_sphere_scan,
    omega,
    to_profile,
    validate_rotsym,
)
from .numerics import Sampled1D, integrate, limit_extrapolate

VIOLATION_CAUSES = ("none", "negative-scalar-curvature", "interior-minimal-surface", "limit-not-AF")

#: heights rising by more than this many window height spans count as blow-up
BLOWUP_FACTOR = 10.0


def _graph_of(member) -> RadialGraph | None:
    if isinstance(member, RadialGraph):
        return member
    if isinstance(member, GeneratedManifold):
        return member.graph
    return None


def _profile_of(member) -> Profile:
    if isinstance(member, Profile):
        return member
    if isinstance(member, RadialGraph):
        return to_profile(member)
    return member.profile


def _geometry_of(member):
    if isinstance(member, GeneratedManifold):
        return member.geometry
    return member


def _inner_radius(member) -> float:
    g = _graph_of(member)
    if g is not None:
        return g.a
    return float(_profile_of(member).h(0.0))


@dataclass(frozen=True)
class SequenceScenario:
    """Ordered members (built lazily from specs) and the annulus the probes look at."""

    members: tuple
    window: tuple[float, float]
    resolution: int = 200
    label: str = ""
    _built: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        object.__setattr__(self, "window", (float(self.window[0]), float(self.window[1])))
        if len(self.members) < 3:
            raise ValueError("a sequence needs at least three members")
        a, b = self.window
        if not a < b:
            raise ValueError("window must satisfy a < b")
        if self.resolution < 2:
            raise ValueError("resolution must be at least 2")

    def __len__(self):
        return len(self.members)

    def member(self, i: int):
        m = self.members[i]
        if not isinstance(m, FamilySpec):
            return m
        if i not in self._built:
            self._built[i] = build(m)
        return self._built[i]

    def resolved(self, parallel: bool = False) -> list:
        idx = range(len(self.members))
        if parallel:
            with ThreadPoolExecutor() as pool:
                out = list(pool.map(self.member, idx))
        else:
            out = [self.member(i) for i in idx]
        a = self.window[0]
        for i, m in enumerate(out):
            if a < _inner_radius(m) - 1e-12 * max(1.0, a):
                raise DomainMismatch(f"window starts at {a:g}, inside member {i} (inner radius {_inner_radius(m):g})")
        return out

    def graphs(self) -> list[RadialGraph]:
        out = []
        for i, m in enumerate(self.resolved()):
            g = _graph_of(m)
            if g is None:
                raise DomainMismatch(f"member {i} has no graph picture")
            if self.window[1] > g.r_max:
                raise DomainMismatch(f"window ends past member {i}'s domain")
            out.append(g)
        return out

    def grid(self) -> np.ndarray:
        return np.linspace(self.window[0], self.window[1], self.resolution)

    def heights(self) -> np.ndarray:
        r = self.grid()
        return np.array([np.asarray(g.height(r), dtype=float) for g in self.graphs()])


def _map(fn: Callable, items: Sequence, parallel: bool) -> list:
    if parallel:
        with ThreadPoolExecutor() as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


# ---------------------------------------------------------------------------
# flat norm


@dataclass(frozen=True)
class FlatNormEstimate:
    """Volumes of the decomposition graph(f) - graph(g) = boundary(A) + B over [a, b]."""

    between_volume: float
    boundary_cylinders: float
    upper_bound: float
    window: tuple[float, float]

    def as_dict(self) -> dict:
        return {"between_volume": self.between_volume, "boundary_cylinders": self.boundary_cylinders,
                "upper_bound": self.upper_bound, "window": list(self.window)}


def flat_norm_upper(f: RadialGraph, g: RadialGraph, a: float, b: float,
                    tol: float = 1e-10) -> FlatNormEstimate:
    """Upper bound on the flat distance between two radial graphs over the annulus a <= r <= b.

    A is the region between the graphs, B the two vertical cylinders over
    the edge spheres; both are measured in the Euclidean (n+1)-space.
    """
    if f.n != g.n:
        raise DomainMismatch("graphs live in different dimensions")
    if not a < b:
        raise DomainMismatch("need a < b")
    if a < max(f.a, g.a) or b > min(f.r_max, g.r_max):
        raise DomainMismatch(f"[{a:g}, {b:g}] is not inside both domains")
    n = f.n
    w = omega(n)

    def gap(r):
        return np.abs(np.asarray(f.height(r), dtype=float) - np.asarray(g.height(r), dtype=float))

    ends = gap(np.array([a, b]))
    edge = w * (a ** (n - 1) * ends[0] + b ** (n - 1) * ends[1])
    knots = sorted({a, b, *(x for x in (*f.breakpoints, *g.breakpoints) if a < x < b)})
    between = 0.0
    for lo, hi in zip(knots[:-1], knots[1:]):
        between += integrate(lambda r: w * r ** (n - 1) * gap(r), lo, hi, tol=tol)
    between = float(between)
    return FlatNormEstimate(between, float(edge), between + float(edge), (float(a), float(b)))


# ---------------------------------------------------------------------------
# blow-up, uniform and derivative convergence


class Blowup(tuple):
    """``(r_star, mass_bound)``; r_star is None and the bound infinite when nothing blows up."""

    def __new__(cls, r_star: float | None, mass_bound: float):
        return super().__new__(cls, (r_star, mass_bound))

    @property
    def r_star(self) -> float | None:
        return self[0]

    @property
    def mass_bound(self) -> float:
        return self[1]


def _divergent(F: np.ndarray, span: float) -> np.ndarray:
    rise = F[-1] - F[0] > BLOWUP_FACTOR * span
    tail = F[len(F) // 2:]
    growing = np.all(np.diff(tail, axis=0) >= 0, axis=0)
    return rise & growing


def detect_blowup(seq: SequenceScenario) -> Blowup:
    """Smallest probe radius where member heights grow past every bound.

    A radius counts as divergent when the last member is higher than the
    first by more than ``BLOWUP_FACTOR`` window height spans and the heights
    keep increasing over the second half of the sequence.  The limit mass is
    then bounded by half r_*^(n-2).
    """
    F = seq.heights()
    first = F[0]
    span = float(np.max(first) - np.min(first))
    if span == 0.0:
        span = seq.window[1] - seq.window[0]
    hits = np.flatnonzero(_divergent(F, span))
    if hits.size == 0:
        return Blowup(None, math.inf)
    r_star = float(seq.grid()[hits[0]])
    n = seq.graphs()[0].n
    return Blowup(r_star, 0.5 * r_star ** (n - 2))


@dataclass(frozen=True)
class UniformLimit:
    graph: RadialGraph | None
    diverges: bool
    tail_differences: tuple[float, ...]
    sup_error: float

    def __bool__(self):
        return not self.diverges


def uniform_limit(seq: SequenceScenario, rel_tol: float = 1e-9) -> UniformLimit:
    """Limit of the member heights on the window, interpolated monotonically between probes.

    The tail (second half) must be Cauchy in the sup norm: successive
    differences may not grow.  The limit is the last member's heights and
    ``sup_error`` the last difference.
    """
    if detect_blowup(seq).r_star is not None:
        return UniformLimit(None, True, (), math.inf)
    F = seq.heights()
    diffs = np.max(np.abs(np.diff(F, axis=0)), axis=1)
    tail = diffs[max(0, len(diffs) // 2 - 1):]
    slack = rel_tol * max(1.0, float(np.max(np.abs(F))))
    for k in range(1, len(tail)):
        if tail[k] > tail[k - 1] + slack:
            raise NotCauchy(f"sup difference grows from {tail[k - 1]:.3e} to {tail[k]:.3e} in the tail")
    r = seq.grid()
    interp = Sampled1D(r, F[-1], method="pchip")
    n = seq.graphs()[0].n
    a, b = seq.window
    graph = RadialGraph(n, a, f=interp, df=lambda x: interp.derivative(x),
                        d2f=lambda x: interp.derivative(x, 2), r_max=b,
                        label=f"uniform limit of {seq.label or 'sequence'}")
    return UniformLimit(graph, False, tuple(float(x) for x in diffs), float(diffs[-1]))


@dataclass(frozen=True)
class DerivativeReport:
    converges: bool
    gap: float
    limit_slope: float
    member_slopes: tuple[float, ...]


def derivative_convergence(seq: SequenceScenario, limit: RadialGraph, r0: float,
                           tol: float = 1e-3) -> DerivativeReport:
    """Whether member slopes at r0 approach the limit's slope.

    The limit must be differentiable at r0: one-sided difference quotients
    with step 1e-4 max(1, r0) have to agree to ``tol``.  Convergence means the
    slope gaps do not grow over the last third of the members and the last
    gap is within ``tol``.
    """
    d = 1e-4 * max(1.0, abs(r0))
    f0 = float(limit.height(r0))
    left = (f0 - float(limit.height(r0 - d))) / d
    right = (float(limit.height(r0 + d)) - f0) / d
    if not abs(left - right) <= tol * max(1.0, abs(left), abs(right)):
        raise NotDifferentiable(f"one-sided slopes {left:.6g} and {right:.6g} disagree at r0 = {r0:g}")
    target = float(limit.slope(r0))
    slopes = np.array([float(g.slope(r0)) for g in seq.graphs()])
    gaps = np.abs(slopes - target)
    scale = tol * max(1.0, abs(target))
    tail = gaps[-max(2, len(gaps) // 3):]
    settling = bool(np.all(np.diff(tail) <= scale))
    ok = settling and bool(tail[-1] <= scale)
    return DerivativeReport(ok, float(gaps[-1]), target, tuple(float(s) for s in slopes))


# ---------------------------------------------------------------------------
# regions bounded by a sphere of given area


@dataclass(frozen=True)
class RegionExtract:
    A: float
    empty: bool
    s_A: float | None = None
    radius: float | None = None
    boundary_hawking: float | None = None
    diameter_bound: float | None = None
    depth: float | None = None

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in
                ("A", "empty", "s_A", "radius", "boundary_hawking", "diameter_bound", "depth")}


def region_with_area(gm, A: float) -> RegionExtract:
    """The region between the boundary and the outermost symmetric sphere of area A."""
    if not A > 0:
        raise ValueError("area must be positive")
    p = _profile_of(gm)
    n = p.n
    w = omega(n)
    boundary_area = 0.0 if p.kind == "pole" else w * float(p.h(0.0)) ** (n - 1)
    if A <= boundary_area:
        return RegionExtract(float(A), True)
    rA = (A / w) ** (1.0 / (n - 1))
    spheres = minimal_sphere_scan(p)
    start = max(spheres, default=0.0)
    h_lo, h_hi = float(p.h(start)), float(p.h(p.s_max))
    if not h_lo <= rA <= h_hi:
        raise NoSuchSphere(f"no sphere of area radius {rA:g} on the outer end (h runs {h_lo:g}..{h_hi:g})")
    if rA == h_lo:
        s_A = start
    else:
        s_A = brentq(lambda s: float(p.h(s)) - rA, start, p.s_max, xtol=1e-13, rtol=1e-15)
    grid = check_grid(p)
    grid = np.append(grid[grid < s_A], s_A)
    h_max = float(np.max(np.asarray(p.h(grid), dtype=float)))
    return RegionExtract(float(A), False, float(s_A), rA, float(p.hawking_mass(s_A)),
                         float(s_A + math.pi * h_max), float(s_A))


# ---------------------------------------------------------------------------
# lower semicontinuity


@dataclass(frozen=True)
class LscReport:
    masses: tuple[float, ...]
    liminf_estimate: float
    limit_mass: float | None
    inequality_holds: bool
    violation_cause: str
    limit_is_bound: bool = False
    tolerance: float = 0.0
    negative_curvature_members: tuple[int, ...] = ()
    minimal_surface_members: tuple[int, ...] = ()

    def as_dict(self) -> dict[str, Any]:
        return {
            "masses": list(self.masses),
            "liminf_estimate": _json_real(self.liminf_estimate),
            "limit_mass": _json_real(self.limit_mass),
            "limit_is_bound": self.limit_is_bound,
            "inequality_holds": self.inequality_holds,
            "violation_cause": self.violation_cause,
            "tolerance": self.tolerance,
            "negative_curvature_members": list(self.negative_curvature_members),
            "minimal_surface_members": list(self.minimal_surface_members),
        }


def _json_real(x):
    if x is None:
        return None
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def liminf_estimate(masses: Sequence[float]) -> float:
    """+inf when the masses extrapolate to infinity, else the infimum of the last third."""
    m = np.asarray(masses, dtype=float)
    try:
        if limit_extrapolate(np.arange(1.0, m.size + 1), m).diverges:
            return math.inf
    except NotMonotone:
        pass  # fall back to the tail infimum
    return float(np.min(m[-max(1, math.ceil(m.size / 3)):]))


def _member_flags(member) -> tuple[bool, bool]:
    report = validate_rotsym(_profile_of(member))
    return report.failed("curvature"), bool(report.minimal_sphere_locations)


def lsc_check(seq: SequenceScenario, limit=None, tol: float = 1e-5, parallel: bool = False) -> LscReport:
    """Compare the limit's ADM mass with the liminf of the members' masses.

    ``limit`` may be a manifold, graph or profile.  Without one the blow-up
    bound on the limit mass is used when the heights blow up; otherwise the
    limit mass is undefined.  A limit that fails the growth condition is not
    asymptotically flat and the comparison fails with cause ``limit-not-AF``.
    """
    members = seq.resolved(parallel)
    masses = _map(lambda m: adm_mass_limit(_geometry_of(m)).value, members, parallel)
    liminf = liminf_estimate(masses)
    flags = _map(_member_flags, members, parallel)
    negative = tuple(i for i, (neg, _) in enumerate(flags) if neg)
    minimal = tuple(i for i, (_, mins) in enumerate(flags) if mins)
    bound = False
    if limit is not None:
        if validate_rotsym(_profile_of(limit)).failed("growth"):
            limit_mass = None
        else:
            limit_mass = adm_mass_limit(_geometry_of(limit)).value
    else:
        blow = detect_blowup(seq) if all(_graph_of(m) is not None for m in members) else Blowup(None, math.inf)
        limit_mass = blow.mass_bound if blow.r_star is not None else None
        bound = limit_mass is not None
    slack = tol * max(1.0, abs(liminf) if math.isfinite(liminf) else 1.0)
    if limit_mass is None:
        return LscReport(tuple(masses), liminf, None, False, "limit-not-AF", False, slack, negative, minimal)
    holds = limit_mass <= liminf + slack
    cause = "none"
    if not holds:
        if negative:
            cause = "negative-scalar-curvature"
        elif minimal:
            cause = "interior-minimal-surface"
    return LscReport(tuple(masses), liminf, limit_mass, bool(holds), cause, bound, slack, negative, minimal)


__all__ = [
    "BLOWUP_FACTOR",
    "Blowup",
    "DerivativeReport",
    "FlatNormEstimate",
    "LscReport",
    "RegionExtract",
    "SequenceScenario",
    "UniformLimit",
    "VIOLATION_CAUSES",
    "derivative_convergence",
    "detect_blowup",
    "flat_norm_upper",
    "liminf_estimate",
    "lsc_check",
    "region_with_area",
    "uniform_limit",
]
