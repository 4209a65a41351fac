import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from admlab import families as F
from admlab import schwarzschild as S
from admlab.chart import adm_mass_chart, chart_metric, scalar_curvature_fd
from admlab.geometry import (
    Profile,
    RadialGraph,
    adm_mass_limit,
    cylinder_profile,
    flat_graph,
    flat_profile,
    hawking_mass_general,
    hawking_mass_graph,
    hawking_mass_profile,
    mean_curvature_sphere,
    minimal_sphere_scan,
    omega,
    scalar_curvature,
    to_graph,
    to_profile,
    validate_rotsym,
)


def test_flat_profile_quantities():
    p = flat_profile()
    s = np.linspace(0.5, 50, 20)
    assert np.all(scalar_curvature(p, s) == 0)
    assert np.all(hawking_mass_profile(p, s) == 0)
    assert mean_curvature_sphere(p, 2.0) == 1.0


def test_cylinder_curvature_and_mean_curvature():
    for a in (0.5, 2.0, 3.0):
        p = cylinder_profile(3, a)
        assert abs(scalar_curvature(p, 1.0) - 2 / a ** 2) < 1e-14
        assert mean_curvature_sphere(p, 1.0) == 0


def test_minimal_boundary_hawking_mass():
    p = cylinder_profile(3, 2.0)
    assert hawking_mass_profile(p, 0.0) == 1.0


def test_schwarzschild_profile_against_closed_form_height():
    p = F.schwarzschild(1.0).profile
    s = np.linspace(0.0, 80.0, 41)
    assert np.max(np.abs(hawking_mass_profile(p, s) - 1.0)) < 1e-9
    assert abs(scalar_curvature(p, 5.0)) < 1e-8
    # the closed-form graph sqrt(8(r - 2)) is recovered from the profile
    g = to_graph(p, K=0.25)
    r = np.array([2.5, 3.0, 10.0, 100.0])
    assert np.max(np.abs(g.height(r) - (np.sqrt(8 * (r - 2)) + 0.25))) < 1e-7


def test_graph_hawking_mass_examples():
    assert hawking_mass_graph(flat_graph(), 7.0) == 0
    g = F.schwarzschild(1.0).graph
    assert abs(hawking_mass_graph(g, 3.0) - 1.0) < 1e-14
    # a wall: slope to infinity at fixed r gives r/2
    wall = RadialGraph(3, 1.0, df=lambda r: np.full_like(np.asarray(r, float), 1e12))
    assert abs(hawking_mass_graph(wall, 5.0) - 2.5) < 1e-9


def test_general_hawking_mass():
    rho = 1.7
    assert abs(hawking_mass_general(3, 4 * math.pi * rho ** 2, 16 * math.pi)) < 1e-14
    assert abs(hawking_mass_general(3, 16 * math.pi, 0.0) - 1.0) < 1e-14


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 6), st.floats(0.2, 5.0), st.floats(0.0, 0.99))
def test_general_formula_matches_profile_mass(n, h, slope):
    # a sphere of area radius h with mean curvature (n-1) h'/h
    area = omega(n) * h ** (n - 1)
    integral = area * ((n - 1) * slope / h) ** (n - 1)
    expected = 0.5 * h ** (n - 2) * (1 - slope ** 2)
    assert abs(hawking_mass_general(n, area, integral) - expected) < 1e-9 * max(1.0, h ** (n - 2))


def test_flat_round_trip():
    p = to_profile(flat_graph())
    s = np.linspace(0.0, 100.0, 101)
    assert np.max(np.abs(p.h(s) - s)) < 1e-10
    g = to_graph(flat_profile(), K=3.0)
    assert np.all(g.height(np.linspace(0.0, 50.0, 11)) == 3.0)


def test_cone_graph_has_constant_profile_slope():
    cone = RadialGraph(3, 0.0, f=lambda r: np.asarray(r, float), df=lambda r: np.ones_like(np.asarray(r, float)),
                       d2f=lambda r: np.zeros_like(np.asarray(r, float)))
    p = to_profile(cone)
    s = np.linspace(0.5, 20.0, 15)
    assert np.max(np.abs(p.dh(s) - 1 / math.sqrt(2))) < 1e-9


def test_validation_examples():
    ok = validate_rotsym(F.schwarzschild(1.0).profile)
    assert ok.in_rotsym and abs(ok.min_scalar_curvature) < 1e-8
    bad = validate_rotsym(F.flatten_out(1.0, 4.0, smooth_half_width=0.1).profile)
    assert not bad.in_rotsym and bad.min_scalar_curvature < 0
    hidden = validate_rotsym(F.hidden_region(1.0, 3.0, 0.5).profile)
    assert hidden.minimal_sphere_locations


def test_minimal_sphere_scan_examples():
    assert minimal_sphere_scan(flat_profile()) == []
    assert minimal_sphere_scan(F.schwarzschild(1.0).profile) == []
    gm = F.doubled_schwarzschild(0.5)
    (s0,) = minimal_sphere_scan(gm.profile)
    assert abs(gm.profile.h(s0) - 1.0) < 1e-8  # area 4 pi (2 eps)^2


def test_adm_limit_examples():
    assert adm_mass_limit(F.flat().geometry).value == 0
    assert abs(adm_mass_limit(F.schwarzschild(1.0).geometry).value - 1.0) < 1e-6
    assert abs(adm_mass_limit(F.flatten_out(1.0, 4.0).geometry).value) < 1e-6


def test_chart_flat_and_schwarzschild():
    assert all(abs(v) < 1e-12 for _, v in adm_mass_chart(flat_graph(), [10.0, 100.0]))
    (_, v), = adm_mass_chart(F.schwarzschild(1.0).graph, [1e4])
    assert abs(v - 1.0) < 1e-3
    g = chart_metric(F.schwarzschild(1.0).graph, np.array([[3.0, 0.0, 0.0]]))
    # radial entry 1 + f'^2 = 1 + 2/(r - 2) = 3 at r = 3
    assert abs(g[0][0, 0] - 3.0) < 1e-12 and abs(g[0][1, 1] - 1.0) < 1e-12


def test_chart_curvature_of_mass_profile_graph():
    # mass-profile graph: the Christoffel route matches 2(n-1) mu'/r^(n-1)
    gm = F.mass_profile(2.0, [0.3])
    r = np.array([3.0, 6.0])
    pts = np.column_stack([r, np.zeros(2), np.zeros(2)])
    assert np.max(np.abs(scalar_curvature_fd(gm.graph, pts) - gm.graph.scalar_curvature(r))) < 1e-4


def test_schwarzschild_arclength_inverse():
    r = np.array([2.0, 2.5, 10.0, 1e3])
    s = S.arclength(r, 1.0)
    assert np.max(np.abs(S.profile_radius(s, 1.0) - r) / r) < 1e-12


def test_profile_rescaling_scales_curvature():
    p = F.mass_profile(2.0, [0.2]).profile
    q = p.rescaled(3.0)
    s = np.linspace(0.3, 20.0, 9)
    assert np.max(np.abs(q.scalar_curvature(3.0 * s) - p.scalar_curvature(s) / 9.0)) < 1e-9
    assert isinstance(q, Profile)
