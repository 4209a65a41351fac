"""Acceptance criteria A1-A11, each with its tolerance and wall-time budget."""

import math
import time

import numpy as np

from admlab import families as F
from admlab import schwarzschild as S
from admlab.chart import adm_mass_chart, scalar_curvature_fd
from admlab.convergence import SequenceScenario, detect_blowup, flat_norm_upper, lsc_check
from admlab.families import FamilySpec
from admlab.geometry import (
    Profile,
    RadialGraph,
    adm_mass_limit,
    hawking_mass_graph,
    minimal_sphere_scan,
    to_graph,
    to_profile,
    validate_rotsym,
)
from admlab.numerics import limit_extrapolate


class Budget:
    def __init__(self, seconds):
        self.seconds = seconds

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        if exc[0] is None:
            assert self.elapsed < self.seconds, f"took {self.elapsed:.2f} s, budget {self.seconds} s"


def closed_form_graph(m):
    """Slope-form Schwarzschild graph from the printed height sqrt(8m(r - 2m))."""
    return RadialGraph(3, 2 * m, f=lambda r: S.graph_height(r, m), df=lambda r: S.graph_slope(r, m),
                       d2f=lambda r: S.graph_slope2(r, m), scale=2 * m)


def test_A1_schwarzschild_invariance():
    with Budget(1.0):
        for m in (0.5, 1.0, 2.0):
            r = np.geomspace(2 * m + 0.1, 1e4, 20)
            mh = hawking_mass_graph(closed_form_graph(m), r)
            assert np.max(np.abs(mh - m)) < 1e-8
            value, _ = adm_mass_limit(F.schwarzschild(m).geometry)
            assert abs(value - m) < 1e-6
    print("A1 PASS: Hawking mass of Schwarzschild graphs equals m; ADM limit within 1e-6")


def test_A2_curvature_oracle():
    with Budget(10.0):
        p = F.schwarzschild(1.0).profile
        s = np.linspace(0.05, 60.0, 50)
        R = p.scalar_curvature(s)
        assert np.max(np.abs(R)) < 1e-6
        g = closed_form_graph(1.0)
        radii = np.array([2.5, 3.0, 5.0, 10.0, 40.0])
        s5 = S.arclength(radii, 1.0)
        warped = p.scalar_curvature(s5)
        dirs = np.array([[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1], [1, -2, 0.5]], dtype=float)
        pts = radii[:, None] * dirs / np.linalg.norm(dirs, axis=1)[:, None]
        fd = scalar_curvature_fd(g, pts)
        assert np.max(np.abs(fd - warped)) < 1e-4
    print("A2 PASS: |R| < 1e-6 on Schwarzschild; Christoffel differences agree within 1e-4")


def _random_profile(rng, n):
    """h = r0 + s + A sin(w s) + B s^2/(1 + s), analytic derivatives; h' > 0 on the sampled range."""
    r0 = rng.uniform(0.5, 3.0)
    w = rng.uniform(0.2, 2.0)
    A = rng.uniform(-0.8, 0.8) / w
    B = rng.uniform(0.0, 0.5)

    def h(s):
        return r0 + s + A * np.sin(w * s) + B * s * s / (1 + s)

    def dh(s):
        return 1 + A * w * np.cos(w * s) + B * (1 - 1 / (1 + s) ** 2)

    def d2h(s):
        return -A * w * w * np.sin(w * s) + 2 * B / (1 + s) ** 3

    return Profile(n, h, dh, d2h, s_max=100.0, kind="minimal")


def test_A3_monotonicity_identity():
    rng = np.random.default_rng(20240603)
    with Budget(30.0):
        for k in range(100):
            n = (3, 4, 5)[k % 3]
            p = _random_profile(rng, n)
            s = rng.uniform(0.5, 8.0, 16)
            step = 1e-3
            mh = p.hawking_mass
            lhs = (mh(s - 2 * step) - 8 * mh(s - step) + 8 * mh(s + step) - mh(s + 2 * step)) / (12 * step)
            h, dh, R = p.h(s), p.dh(s), p.scalar_curvature(s)
            rhs = h ** (n - 1) * dh * R / (2 * (n - 1))
            scale = np.maximum(np.abs(rhs), 1e-3 * h ** (n - 2))
            assert np.max(np.abs(lhs - rhs) / scale) < 1e-6, (k, n)
    print("A3 PASS: d m_H/ds = h^(n-1) h' R / 2(n-1) on 100 random profiles, n = 3, 4, 5")


def test_A4_flatten_out():
    with Budget(30.0):
        for w in (1e-1, 1e-2, 1e-3):
            gm = F.flatten_out(1.0, 4.0, smooth_half_width=w)
            value, _ = adm_mass_limit(gm.geometry)
            assert abs(value) < 1e-6
            assert validate_rotsym(gm.profile).min_scalar_curvature < 0
        seq = SequenceScenario([FamilySpec("flatten_out", {"m": 1, "height": h}) for h in (4, 8, 16, 32)], (2, 10))
        rep = lsc_check(seq, F.schwarzschild(1.0))
        assert not rep.inequality_holds
        assert rep.violation_cause == "negative-scalar-curvature"
    print("A4 PASS: flattened-out masses 0, R < 0 for every width; lsc violated by negative curvature")


def test_A5_flatten_in():
    heights = (5, 10, 20, 40, 80)
    with Budget(60.0):
        flat = F.flat()
        bounds = []
        for h in heights:
            gm = F.flatten_in(1.0, h)
            value, _ = adm_mass_limit(gm.geometry)
            assert abs(value - 1.0) < 1e-5
            assert validate_rotsym(gm.profile).min_scalar_curvature >= -1e-8
            bounds.append(flat_norm_upper(gm.graph, flat.graph, 3.0, 10.0).upper_bound)
        seq = SequenceScenario([FamilySpec("flatten_in", {"m": 1, "height": h}) for h in heights], (3, 10))
        rep = lsc_check(seq, flat)
        assert rep.inequality_holds and rep.limit_mass == 0.0 and abs(rep.liminf_estimate - 1.0) < 1e-5
        # exact zeros once the disk covers the window, so "decreasing" is checked as nonincreasing
        assert all(b <= a for a, b in zip(bounds, bounds[1:]))
        assert bounds[0] > bounds[-1] and bounds[-1] < 1e-3
    print(f"A5 PASS: flattened-in masses 1, R >= -1e-8, lsc holds; flat-norm bounds {bounds}")


def test_A6_rescale():
    cs = (1, 2, 4, 8)
    with Budget(10.0):
        members = [F.rescale(F.schwarzschild(1.0), c) for c in cs]
        masses = [adm_mass_limit(gm.geometry).value for gm in members]
        assert np.max(np.abs(np.array(masses) - np.array(cs))) < 1e-5
        assert limit_extrapolate(np.arange(1.0, 5.0), masses).diverges
        rep = lsc_check(SequenceScenario(members, (16, 40)), F.flat())
        assert rep.liminf_estimate == math.inf
        assert rep.limit_mass == 0.0 and rep.inequality_holds
    print("A6 PASS: rescaled masses c within 1e-5; masses diverge; lsc holds as 0 <= inf")


def test_A7_hidden_region():
    with Budget(30.0):
        members = [F.hidden_region(1.0, r, 0.5) for r in (3, 5, 9, 17)]
        for gm in members:
            assert abs(adm_mass_limit(gm.geometry).value - 0.5) < 1e-5
            assert len(minimal_sphere_scan(gm.profile)) >= 1
        rep = lsc_check(SequenceScenario(members, (2, 40)), F.schwarzschild(1.0))
        assert not rep.inequality_holds
        assert rep.violation_cause == "interior-minimal-surface"
    print("A7 PASS: hidden-region masses 0.5, minimal spheres found; lsc violated by minimal surface")


def test_A8_cylinder_blowup():
    with Budget(30.0):
        seq = SequenceScenario([FamilySpec("cylinder_append", {"m": 1, "L": L}) for L in (1, 10, 100, 1000)], (2, 10))
        r_star, bound = detect_blowup(seq)
        assert r_star is not None and abs(r_star - 2.0) < 0.05
        assert abs(bound - 1.0) < 0.05
    print(f"A8 PASS: blow-up at r* = {r_star}, mass bound {bound}")


def test_A9_chart_vs_limit():
    rng = np.random.default_rng(7)
    with Budget(60.0):
        sources = [F.schwarzschild(1.0)]
        while len(sources) < 11:
            a = rng.uniform(1.0, 2.0)
            k = rng.integers(1, 4)
            w = rng.dirichlet(np.ones(k))
            room = 0.5 * a / np.sum(np.arange(1, k + 1) * w)  # keeps h' > 0 at the boundary
            total = min(rng.uniform(0.05, 0.95) * room, 1.5 - 0.5 * a)
            sources.append(F.mass_profile(a, list(total * w)))
        for gm in sources:
            (_, chart_value), = adm_mass_chart(gm.graph, [1e4])
            limit_value = adm_mass_limit(gm.geometry).value
            assert abs(chart_value - limit_value) < 1e-3, gm.spec
    print("A9 PASS: coordinate flux at r = 1e4 within 1e-3 of the Hawking limit on 11 geometries")


def _monotone_builtins():
    return [
        F.flat(),
        F.schwarzschild(1.0),
        F.schwarzschild(0.7, 4),
        F.flatten_out(1.0, 4.0),
        F.flatten_in(1.0, 4.0),
        F.rescale(F.schwarzschild(1.0), 3.0),
        F.mass_profile(2.0, [0.2, 0.1]),
        F.cylinder_append(1.0, 0.0),
    ]


def test_A10_round_trip():
    s = np.linspace(0.0, 100.0, 401)
    with Budget(10.0):
        for gm in _monotone_builtins():
            p = gm.profile
            q = to_profile(to_graph(p))
            err = np.max(np.abs(np.asarray(q.h(s)) - np.asarray(p.h(s))))
            assert err < 1e-7, (gm.spec, err)
    print("A10 PASS: profile -> graph -> profile within 1e-7 on [0, 100] for monotone built-ins")


def _perturbed_sequence(rng):
    n = int(rng.choice([3, 3, 4]))
    m = rng.uniform(0.5, 2.0)
    a = (2 * m) ** (1.0 / (n - 2))
    k = int(rng.integers(1, 4))
    w = rng.dirichlet(np.ones(k))
    room = 0.5 * (n - 2) * a ** (n - 2) / np.sum(np.arange(1, k + 1) * w)
    delta0 = rng.uniform(0.05, 0.9) * room
    members = [F.mass_profile(a, list(delta0 * 2.0 ** -i * w), n) for i in range(4)]
    return members, F.schwarzschild(m, n), m


def test_A11_lower_semicontinuity_property():
    rng = np.random.default_rng(11)
    checked = 0
    with Budget(120.0):
        for _ in range(50):
            members, limit, m = _perturbed_sequence(rng)
            a = members[0].graph.a
            r = np.linspace(a, 10 * a, 40)
            sup = [np.max(np.abs(g.graph.height(r) - limit.graph.height(r))) for g in members]
            assert all(y < x for x, y in zip(sup, sup[1:])), sup  # converging in sup norm
            rep = lsc_check(SequenceScenario(members, (a, 10 * a)), limit)
            assert not rep.negative_curvature_members and not rep.minimal_surface_members
            assert rep.inequality_holds, rep
            checked += 1
    print(f"A11 PASS: lsc holds on {checked} random nonnegative-curvature sequences")
