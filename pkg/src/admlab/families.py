"""Generators for the explicit constructions and their expected properties.

Every generator returns a :class:`GeneratedManifold`: the geometry in both
pictures where they exist, plus the metadata the geometry-core checks are
expected to reproduce (ADM mass, curvature sign, interior minimal spheres).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np
from scipy.optimize import brentq

from . import schwarzschild as schw
from .errors import GlueInfeasible, SmoothingFailed
from .geometry import (
    Profile,
    RadialGraph,
    adm_mass_limit,
    check_grid,
    flat_graph,
    flat_profile,
    minimal_sphere_scan,
    to_profile,
    validate_rotsym,
)
from .numerics import Antiderivative, Branch, mollify_corner, smoothstep
from .numerics import _smoothstep_d1 as smoothstep_d1

FAMILIES = (
    "flat",
    "schwarzschild",
    "flatten_out",
    "flatten_in",
    "rescale",
    "doubled_schwarzschild",
    "hidden_region",
    "cylinder_append",
    "mass_profile",
)

CURVATURE_SIGNS = ("nonnegative", "somewhere-negative", "distributional-interface")
REGULARITIES = ("smooth", "C11", "Lipschitz")

#: numerical stand-in for "infinity" in units of the geometry's length scale
REACH = 1e5

_PARAMS = {
    "flat": {},
    "schwarzschild": {"m": None},
    "flatten_out": {"m": None, "height": None, "smooth_half_width": 0.0, "K": 0.0},
    "flatten_in": {"m": None, "height": None, "smooth_half_width": 0.0, "K": 0.0},
    "rescale": {"c": None},
    "doubled_schwarzschild": {"eps": None, "truncation_area_factor": 100.0},
    "hidden_region": {"m": None, "r_glue": None, "eps": None},
    "cylinder_append": {"m": None, "L": None, "smooth_half_width": 0.0, "K": 0.0},
    "mass_profile": {"a": None, "c1": 0.0, "c2": 0.0, "c3": 0.0, "c4": 0.0},
}


@dataclass(frozen=True)
class FamilySpec:
    """A named construction with its parameters; ``base`` is the input of ``rescale``."""

    family: str
    params: Mapping[str, float] = field(default_factory=dict)
    n: int = 3
    base: "FamilySpec | None" = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if int(self.n) != self.n or self.n < 3:
            raise ValueError("dimension n must be an integer >= 3")
        allowed = _PARAMS[self.family]
        unknown = set(self.params) - set(allowed)
        if unknown:
            raise ValueError(f"unknown parameters for {self.family}: {sorted(unknown)}")
        missing = [k for k, v in allowed.items() if v is None and k not in self.params]
        if missing:
            raise ValueError(f"missing parameters for {self.family}: {missing}")
        for k, v in self.params.items():
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
                raise ValueError(f"parameter {k} must be a finite real")
        p = self.get
        if "m" in allowed and not p("m") > 0:
            raise ValueError("mass m must be positive")
        if self.family == "hidden_region" and not 0 < p("eps") < p("m"):
            raise ValueError("eps must lie in (0, m)")
        if self.family == "doubled_schwarzschild" and not p("eps") > 0:
            raise ValueError("eps must be positive")
        if self.family == "cylinder_append" and p("L") < 0:
            raise ValueError("L must be nonnegative")
        if self.family == "rescale":
            if not p("c") > 0:
                raise ValueError("c must be positive")
            if self.base is None:
                raise ValueError("rescale needs a base spec")
        if self.family in ("flatten_out", "flatten_in") and not p("height") > 0:
            raise ValueError("height must be positive")
        if "smooth_half_width" in allowed and p("smooth_half_width") < 0:
            raise ValueError("smooth_half_width must be nonnegative")
        if self.family == "mass_profile" and not p("a") > 0:
            raise ValueError("inner radius a must be positive")

    def get(self, key: str) -> float:
        if key in self.params:
            return float(self.params[key])
        return float(_PARAMS[self.family][key])


@dataclass(frozen=True)
class GeneratedManifold:
    profile: Profile
    graph: RadialGraph | None
    expected_adm: float
    expected_curvature_sign: str
    expected_interior_minimal_spheres: int
    regularity: str
    primary: str = "profile"
    spec: FamilySpec | None = None
    metadata: Mapping[str, Any] = field(default_factory=dict)

    @property
    def geometry(self):
        return self.graph if self.primary == "graph" else self.profile

    @property
    def n(self) -> int:
        return self.profile.n


# ---------------------------------------------------------------------------
# Schwarzschild in any dimension


def _power_gap(r, a, n):
    """r^(n-2) - a^(n-2) without cancellation near r = a."""
    r = np.asarray(r, dtype=float)
    k = n - 2
    return (r - a) * sum(r ** j * a ** (k - 1 - j) for j in range(k))


def schwarzschild_graph(m: float, n: int = 3, K: float = 0.0) -> RadialGraph:
    a = schw.horizon_radius(m, n)
    const = lambda r: np.full_like(np.asarray(r, dtype=float), m)  # noqa: E731
    zero = lambda r: np.zeros_like(np.asarray(r, dtype=float))  # noqa: E731
    f = (lambda r: schw.graph_height(r, m)) if n == 3 else None
    return RadialGraph(n, a, f=f, mass=const, dmass=zero, gap=lambda r: _power_gap(r, a, n),
                       K=K, scale=a, label=f"schwarzschild(m={m:g})")


def schwarzschild_profile(m: float, n: int = 3) -> Profile:
    a = schw.horizon_radius(m, n)
    if n == 3:
        return Profile(3, lambda s: schw.profile_radius(s, m), lambda s: schw.profile_slope(s, m),
                       lambda s: schw.profile_accel(s, m), s_max=REACH * a, kind="minimal",
                       scale=a, label=f"schwarzschild(m={m:g})", inverse=lambda r: schw.arclength(r, m))
    return to_profile(schwarzschild_graph(m, n))


def _even_pieces(p: Profile):
    """h, h', h'' of the profile reflected evenly across s = 0."""
    def h(s):
        return p.h(np.abs(s))

    def dh(s):
        s = np.asarray(s, dtype=float)
        return np.sign(s) * p.dh(np.abs(s))

    def d2h(s):
        return p.d2h(np.abs(s))

    return h, dh, d2h


def flat(n: int = 3) -> GeneratedManifold:
    return GeneratedManifold(flat_profile(n, s_max=REACH), flat_graph(n), 0.0, "nonnegative", 0,
                             "smooth", "graph", FamilySpec("flat", {}, n))


def schwarzschild(m: float, n: int = 3, form: str = "profile") -> GeneratedManifold:
    """Spatial Schwarzschild of mass m; closed forms in dimension three."""
    if form not in ("graph", "profile"):
        raise ValueError("form must be 'graph' or 'profile'")
    spec = FamilySpec("schwarzschild", {"m": m}, n)
    g = schwarzschild_graph(m, n)
    return GeneratedManifold(schwarzschild_profile(m, n), g, m, "nonnegative", 0, "smooth", form, spec,
                             {"horizon_radius": g.a, "horizon_area": float(g.a ** (n - 1) * _omega(n))})


def _omega(n):
    from .geometry import omega

    return omega(n)


# ---------------------------------------------------------------------------
# Examples 1 and 2: cutting the graph off at a height


def _corner(m: float, n: int, height: float) -> float:
    """Area radius where the Schwarzschild graph reaches ``height``."""
    if n == 3:
        return 2.0 * m + height * height / (8.0 * m)
    g = schwarzschild_graph(m, n)
    hi = g.a + 1.0
    while g.height(hi) < height:
        hi *= 2.0
    return brentq(lambda r: g.height(r) - height, g.a, hi, xtol=1e-14, rtol=1e-14)


def _half_width(requested: float, corner: float, a: float) -> float:
    room = corner - a
    w = requested if requested > 0 else min(0.1, 0.25 * room)
    if w >= room:
        raise SmoothingFailed(f"half width {w:g} does not fit between the horizon and the corner at {corner:g}")
    return w


def flatten_out(m: float, height: float, smooth_half_width: float = 0.0, n: int = 3,
                K: float = 0.0) -> GeneratedManifold:
    """Schwarzschild graph cut off at ``height`` and smoothed on an annulus about the cut."""
    spec = FamilySpec("flatten_out", {"m": m, "height": height, "smooth_half_width": smooth_half_width, "K": K}, n)
    base = schwarzschild_graph(m, n)
    c = _corner(m, n, height)
    w = _half_width(smooth_half_width, c, base.a)
    left = Branch(base._base_height, base._slope_arr, lambda r: np.asarray(base.slope2(r)))
    right = Branch(lambda r: np.full_like(r, height), np.zeros_like, np.zeros_like)

    def raw(r):
        return np.minimum(height, base._base_height(np.asarray(r, dtype=float)))

    def raw_slope(r):
        r = np.asarray(r, dtype=float)
        return np.where(r < c, base._slope_arr(r), 0.0)

    def raw_slope2(r):
        r = np.asarray(r, dtype=float)
        return np.where(r < c, np.asarray(base.slope2(r)), 0.0)

    g = mollify_corner(raw, c, w, df=raw_slope, d2f=raw_slope2, left=left, right=right)
    graph = RadialGraph(n, base.a, f=g, df=g.derivative, d2f=g.second_derivative, K=K,
                        breakpoints=(c - w, c + w), scale=c + w, label=f"flatten_out(m={m:g}, height={height:g})")
    return GeneratedManifold(to_profile(graph), graph, 0.0, "somewhere-negative", 0, "smooth", "graph", spec,
                             {"corner": c, "half_width": w, "kappa": g.kappa})


def flatten_in(m: float, height: float, smooth_half_width: float = 0.0, n: int = 3,
               K: float = 0.0) -> GeneratedManifold:
    """Flat disk capped onto the Schwarzschild graph outside the radius where it reaches ``height``.

    The cap is blended through the mass function, mu = m * S(t) with S the
    quintic smoothstep across the annulus, which makes mu nondecreasing and
    therefore the scalar curvature nonnegative.
    """
    spec = FamilySpec("flatten_in", {"m": m, "height": height, "smooth_half_width": smooth_half_width, "K": K}, n)
    base = schwarzschild_graph(m, n)
    c = _corner(m, n, height)
    w = _half_width(smooth_half_width, c, base.a)
    lo, hi = c - w, c + w

    def mass(r):
        return m * smoothstep((np.asarray(r, dtype=float) - lo) / (2 * w))

    def dmass(r):
        return m * smoothstep_d1((np.asarray(r, dtype=float) - lo) / (2 * w)) / (2 * w)

    graph = RadialGraph(n, 0.0, mass=mass, dmass=dmass, breakpoints=(lo, hi), scale=hi, K=K,
                        label=f"flatten_in(m={m:g}, height={height:g})")
    blend = Antiderivative(graph._slope_arr, np.linspace(lo, hi, 9))
    rise = float(blend(hi))
    outer0 = float(base._base_height(np.array(hi)))

    def f(r):
        r = np.asarray(r, dtype=float)
        inside = blend(np.clip(r, lo, hi))
        outside = rise + base._base_height(np.maximum(r, hi)) - outer0
        return np.where(r <= lo, 0.0, np.where(r < hi, inside, outside))

    graph._f = f
    R = graph.scalar_curvature(np.linspace(lo, hi, 401))
    if np.min(R) < -1e-8:
        raise SmoothingFailed(f"blend has scalar curvature {np.min(R):.3e} < 0")
    return GeneratedManifold(to_profile(graph), graph, m, "nonnegative", 0, "smooth", "graph", spec,
                             {"corner": c, "half_width": w, "flat_radius": lo})


# ---------------------------------------------------------------------------
# Example 3: scaling


def rescale(gm: GeneratedManifold, c: float) -> GeneratedManifold:
    """The metric c^2 g: masses scale by c^(n-2), curvature by c^-2."""
    if not c > 0:
        raise ValueError("c must be positive")
    n = gm.n
    graph = gm.graph.rescaled(c) if gm.graph is not None else None
    if gm.primary == "graph" and graph is not None:
        profile = to_profile(graph)
    else:
        profile = gm.profile.rescaled(c)
    spec = FamilySpec("rescale", {"c": c}, n, gm.spec) if gm.spec is not None else None
    meta = dict(gm.metadata)
    meta["scale_factor"] = c * meta.get("scale_factor", 1.0)
    return GeneratedManifold(profile, graph, c ** (n - 2) * gm.expected_adm, gm.expected_curvature_sign,
                             gm.expected_interior_minimal_spheres, gm.regularity, gm.primary, spec, meta)


# ---------------------------------------------------------------------------
# Example 4: doubling and hiding a region behind a horizon


def doubled_schwarzschild(eps: float, n: int = 3, truncation_area_factor: float = 100.0) -> GeneratedManifold:
    """Schwarzschild of mass eps reflected across its horizon, cut at a far sphere.

    s = 0 is the cut sphere (area ``truncation_area_factor`` times the
    horizon's); h decreases to the horizon, then increases to infinity.
    """
    spec = FamilySpec("doubled_schwarzschild", {"eps": eps, "truncation_area_factor": truncation_area_factor}, n)
    base = schwarzschild_profile(eps, n)
    a = schw.horizon_radius(eps, n)
    r_cut = a * truncation_area_factor ** (1.0 / (n - 1))
    d = float(base.s_of_r(r_cut))
    h, dh, d2h = _even_pieces(base)
    prof = Profile(n, lambda s: h(np.asarray(s) - d), lambda s: dh(np.asarray(s) - d),
                   lambda s: d2h(np.asarray(s) - d), s_max=d + REACH * a, kind="truncated",
                   scale=max(a, d), label=f"doubled_schwarzschild(eps={eps:g})")
    return GeneratedManifold(prof, None, eps, "nonnegative", 1, "smooth", "profile", spec,
                             {"horizon_s": d, "cut_radius": r_cut})


def hidden_region(m: float, r_glue: float, eps: float, n: int = 3) -> GeneratedManifold:
    """Mass-m Schwarzschild out to area radius r_glue, then the doubled mass-eps end.

    The doubled end is entered at its sphere of the same area, runs inward
    through its horizon, and opens out to an asymptotically flat end of mass
    eps.  The metric is Lipschitz at the interface, where h' jumps.
    """
    spec = FamilySpec("hidden_region", {"m": m, "r_glue": r_glue, "eps": eps}, n)
    a_m = schw.horizon_radius(m, n)
    a_eps = schw.horizon_radius(eps, n)
    if r_glue <= a_m:
        raise GlueInfeasible(f"r_glue = {r_glue:g} is inside the mass-{m:g} horizon")
    if r_glue < a_eps:
        raise GlueInfeasible(f"the doubled end has no sphere of area radius {r_glue:g}")
    inner = schwarzschild_profile(m, n)
    outer = schwarzschild_profile(eps, n)
    s1 = float(inner.s_of_r(r_glue))
    d = float(outer.s_of_r(r_glue))
    oh, odh, od2h = _even_pieces(outer)
    centre = s1 + d

    def h(s):
        s = np.asarray(s, dtype=float)
        return np.where(s <= s1, inner.h(np.minimum(s, s1)), oh(s - centre))

    def dh(s):
        s = np.asarray(s, dtype=float)
        return np.where(s <= s1, inner.dh(np.minimum(s, s1)), odh(s - centre))

    def d2h(s):
        s = np.asarray(s, dtype=float)
        return np.where(s <= s1, inner.d2h(np.minimum(s, s1)), od2h(s - centre))

    prof = Profile(n, h, dh, d2h, s_max=centre + REACH * a_eps, kind="minimal", breakpoints=(s1,),
                   scale=max(r_glue, centre), label=f"hidden_region(m={m:g}, r_glue={r_glue:g}, eps={eps:g})")
    H_inner = (n - 1) * float(inner.dh(s1)) / r_glue
    H_outer = (n - 1) * float(odh(-d)) / r_glue
    area_in = _omega(n) * float(inner.h(s1)) ** (n - 1)
    area_out = _omega(n) * float(oh(-d)) ** (n - 1)
    meta = {
        "interface_s": s1,
        "horizon_s": centre,
        "H_inner": H_inner,
        "H_outer": H_outer,
        "mean_curvature_jump": H_inner - H_outer,
        "area_mismatch": abs(area_in - area_out),
    }
    return GeneratedManifold(prof, None, eps, "distributional-interface", 1, "Lipschitz", "profile", spec, meta)


# ---------------------------------------------------------------------------
# Example 6: a cylinder between the horizon and the Schwarzschild end


def cylinder_append(m: float, L: float, smooth_half_width: float = 0.0, n: int = 3,
                    K: float = 0.0) -> GeneratedManifold:
    """Round cylinder of length L attached to the Schwarzschild horizon.

    The graph picture has a vertical wall of height L over the horizon
    sphere, so its heights are K + L + f_schwarzschild(r).  With
    ``smooth_half_width`` > 0 the seam is blended to C^2.
    """
    spec = FamilySpec("cylinder_append", {"m": m, "L": L, "smooth_half_width": smooth_half_width, "K": K}, n)
    base = schwarzschild_profile(m, n)
    a = schw.horizon_radius(m, n)
    bh, bdh, bd2h = _even_pieces(base)

    def h(s):
        s = np.asarray(s, dtype=float)
        return np.where(s <= L, a, bh(np.maximum(s - L, 0.0)))

    def dh(s):
        s = np.asarray(s, dtype=float)
        return np.where(s <= L, 0.0, bdh(np.maximum(s - L, 0.0)))

    def d2h(s):
        s = np.asarray(s, dtype=float)
        return np.where(s <= L, 0.0, bd2h(np.maximum(s - L, 0.0)))

    breaks = (L,) if L > 0 else ()
    regularity = "C11" if L > 0 else "smooth"
    meta = {"wall_height": L}
    if smooth_half_width > 0 and L > 0:
        w = smooth_half_width
        if w >= L:
            raise SmoothingFailed("the smoothing annulus must fit inside the cylinder")
        left = Branch(lambda s: np.full_like(s, a), np.zeros_like, np.zeros_like)
        right = Branch(lambda s: bh(s - L), lambda s: bdh(s - L), lambda s: bd2h(s - L))
        g = mollify_corner(h, L, w, df=dh, d2f=d2h, left=left, right=right)
        h, dh, d2h = g, g.derivative, g.second_derivative
        breaks = (L - w, L + w)
        regularity = "smooth"
        grid = np.linspace(L - w, L + w, 401)
        if np.min(dh(grid)) < 0:
            raise SmoothingFailed("blended seam is not monotone; use a smaller half width")
        meta["kappa"] = g.kappa
    prof = Profile(n, h, dh, d2h, s_max=L + REACH * a, kind="minimal", breakpoints=breaks,
                   scale=max(a, L), label=f"cylinder_append(m={m:g}, L={L:g})")
    if L > 0:
        graph = RadialGraph(n, a, f=lambda r: L + schwarzschild_graph(m, n)._base_height(np.asarray(r, dtype=float)),
                            mass=lambda r: np.full_like(np.asarray(r, dtype=float), m),
                            dmass=lambda r: np.zeros_like(np.asarray(r, dtype=float)),
                            gap=lambda r: _power_gap(r, a, n), K=K, scale=a,
                            label=prof.label, notes=(f"vertical wall of height {L:g} over r = {a:g}",))
    else:
        graph = schwarzschild_graph(m, n, K)
    spheres = 1 if L > 0 else 0
    return GeneratedManifold(prof, graph, m, "nonnegative", spheres, regularity, "profile", spec, meta)


# ---------------------------------------------------------------------------
# positive-mass graphs with a prescribed mass function


def mass_profile(a: float, coeffs, n: int = 3) -> GeneratedManifold:
    """Minimal-boundary graph with mu(r) = m_inf - sum_k c_k (a/r)^k, c_k >= 0.

    m_inf is fixed by the horizon condition a^(n-2) = 2 mu(a).  The scalar
    curvature 2(n-1) mu'/r^(n-1) is nonnegative and the decay is of order
    one.  Requires mu'(a) < (n-2)/2 a^(n-3) so that h' > 0 off the boundary.
    """
    c = np.asarray(coeffs, dtype=float)
    if c.ndim != 1 or c.size == 0 or c.size > 4 or np.any(c < 0):
        raise ValueError("coeffs must be 1 to 4 nonnegative reals")
    k = np.arange(1, c.size + 1)
    if np.sum(k * c) / a >= 0.5 * (n - 2) * a ** (n - 3):
        raise ValueError("mass function rises too fast at the boundary; h' would vanish")
    m_inf = 0.5 * a ** (n - 2) + float(np.sum(c))
    spec = FamilySpec("mass_profile", {"a": a, **{f"c{j}": float(v) for j, v in zip(k, c)}}, n)

    def mass(r):
        q = a / np.asarray(r, dtype=float)
        return m_inf - sum(cj * q ** j for j, cj in zip(k, c))

    def dmass(r):
        r = np.asarray(r, dtype=float)
        q = a / r
        return sum(j * cj * q ** j for j, cj in zip(k, c)) / r

    def gap(r):
        r = np.asarray(r, dtype=float)
        lq = np.log1p((r - a) / a)
        return _power_gap(r, a, n) + 2.0 * sum(cj * np.expm1(-j * lq) for j, cj in zip(k, c))

    graph = RadialGraph(n, a, mass=mass, dmass=dmass, gap=gap, scale=a, label=f"mass_profile(a={a:g})")
    return GeneratedManifold(to_profile(graph), graph, m_inf, "nonnegative", 0, "smooth", "graph", spec,
                             {"coefficients": tuple(float(v) for v in c)})


# ---------------------------------------------------------------------------
# dispatch and consistency


def build(spec: FamilySpec) -> GeneratedManifold:
    p, n = spec.get, spec.n
    fam = spec.family
    if fam == "flat":
        return flat(n)
    if fam == "schwarzschild":
        return schwarzschild(p("m"), n)
    if fam == "flatten_out":
        return flatten_out(p("m"), p("height"), p("smooth_half_width"), n, p("K"))
    if fam == "flatten_in":
        return flatten_in(p("m"), p("height"), p("smooth_half_width"), n, p("K"))
    if fam == "rescale":
        return rescale(build(spec.base), p("c"))
    if fam == "doubled_schwarzschild":
        return doubled_schwarzschild(p("eps"), n, p("truncation_area_factor"))
    if fam == "hidden_region":
        return hidden_region(p("m"), p("r_glue"), p("eps"), n)
    if fam == "cylinder_append":
        return cylinder_append(p("m"), p("L"), p("smooth_half_width"), n, p("K"))
    if fam == "mass_profile":
        coeffs = [p(f"c{j}") for j in range(1, 5)]
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        return mass_profile(p("a"), coeffs, n)
    raise ValueError(f"unknown family {fam!r}")  # unreachable: FamilySpec validates


def check_consistency(gm: GeneratedManifold, adm_tol: float = 1e-5,
                      curvature_tol: float = 1e-8) -> list[str]:
    """Mismatches between a manifold's metadata and what the geometry checks measure."""
    problems = []
    adm = adm_mass_limit(gm.geometry)
    if math.isinf(gm.expected_adm) != math.isinf(adm.value) or (
            not math.isinf(adm.value) and abs(adm.value - gm.expected_adm) > adm_tol * max(1.0, abs(gm.expected_adm))):
        problems.append(f"ADM mass {adm.value:.9g} != expected {gm.expected_adm:.9g}")
    report = validate_rotsym(gm.profile, curvature_tol=curvature_tol)
    negative = report.min_scalar_curvature < -curvature_tol
    if negative != (gm.expected_curvature_sign == "somewhere-negative"):
        problems.append(f"min scalar curvature {report.min_scalar_curvature:.3e} contradicts "
                        f"{gm.expected_curvature_sign}")
    count = len(minimal_sphere_scan(gm.profile))
    if count != gm.expected_interior_minimal_spheres:
        problems.append(f"{count} interior minimal spheres, expected {gm.expected_interior_minimal_spheres}")
    return problems


__all__ = [
    "FAMILIES",
    "FamilySpec",
    "GeneratedManifold",
    "build",
    "check_consistency",
    "check_grid",
    "cylinder_append",
    "doubled_schwarzschild",
    "flat",
    "flatten_in",
    "flatten_out",
    "hidden_region",
    "mass_profile",
    "rescale",
    "schwarzschild",
    "schwarzschild_graph",
    "schwarzschild_profile",
]
