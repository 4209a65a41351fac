import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from admlab import families as F
from admlab.errors import GlueInfeasible
from admlab.families import FamilySpec, build, check_consistency
from admlab.geometry import adm_mass_limit, minimal_sphere_scan


def test_schwarzschild_closed_form():
    gm = F.schwarzschild(1.0)
    r = np.array([2.0, 3.0, 10.0, 100.0])
    assert np.max(np.abs(gm.graph.height(r) - np.sqrt(8 * (r - 2)))) < 1e-12
    assert gm.graph.a == 2.0
    assert abs(4 * math.pi * gm.profile.h(0.0) ** 2 - 16 * math.pi) < 1e-12
    assert np.max(np.abs(gm.graph.mass(np.array([3.0, 10.0, 100.0])) - 1)) < 1e-14


def test_schwarzschild_higher_dimension_keeps_mass():
    gm = F.schwarzschild(0.8, 5)
    s = np.linspace(0.0, 30.0, 31)
    assert np.max(np.abs(gm.profile.hawking_mass(s) - 0.8)) < 1e-8
    assert np.max(np.abs(gm.profile.scalar_curvature(s[1:]))) < 1e-7


def test_small_mass_tends_to_flat():
    gm = F.schwarzschild(1e-8)
    s = np.linspace(1.0, 50.0, 11)
    assert np.max(np.abs(gm.profile.h(s) - s)) < 1e-6


def test_flatten_out_is_local():
    gm = F.flatten_out(1.0, 4.0, smooth_half_width=0.1)
    c, w = gm.metadata["corner"], gm.metadata["half_width"]
    assert c == 4.0
    inner = np.linspace(2.0, c - w, 50)
    outer = np.linspace(c + w, 100.0, 50)
    assert np.array_equal(gm.graph.height(inner), F.schwarzschild(1.0).graph.height(inner))
    assert np.all(gm.graph.height(outer) == 4.0)
    assert adm_mass_limit(gm.geometry).value == 0.0


def test_flatten_out_tends_to_schwarzschild_on_compacts():
    r = np.linspace(2.0, 10.0, 33)
    ref = F.schwarzschild(1.0).graph.height(r)
    gaps = [np.max(np.abs(F.flatten_out(1.0, h).graph.height(r) - ref)) for h in (4, 8, 16)]
    assert gaps[0] > gaps[1] > gaps[2] == 0


def test_flatten_in_has_flat_core_and_full_mass():
    gm = F.flatten_in(1.0, 10.0)
    rho = gm.metadata["flat_radius"]
    r = np.linspace(0.0, rho, 40)
    assert np.all(gm.graph.height(r) == 0.0)
    assert np.all(gm.profile.scalar_curvature(np.linspace(0.1, rho - 0.1, 10)) == 0)
    assert abs(adm_mass_limit(gm.geometry).value - 1.0) < 1e-6
    assert gm.profile.scalar_curvature(np.linspace(0.0, 40.0, 801)).min() >= -1e-8


def test_rescale_identity_and_scaling():
    base = F.schwarzschild(1.0)
    same = F.rescale(base, 1.0)
    s = np.linspace(0.0, 20.0, 21)
    assert np.max(np.abs(same.profile.h(s) - base.profile.h(s))) < 1e-12
    assert abs(adm_mass_limit(F.rescale(base, 3.0).geometry).value - 3.0) < 1e-6


@settings(max_examples=15, deadline=None)
@given(st.floats(0.3, 6.0), st.floats(0.05, 0.45))
def test_rescale_curvature_law(c, coeff):
    gm = F.mass_profile(2.0, [coeff])
    big = F.rescale(gm, c)
    s = np.linspace(0.5, 15.0, 7)
    R = gm.profile.scalar_curvature(s)
    R_big = big.profile.scalar_curvature(c * s)
    assert np.max(np.abs(R_big - R / c ** 2)) < 1e-9


def test_doubled_schwarzschild_symmetry():
    gm = F.doubled_schwarzschild(0.5)
    (s0,) = minimal_sphere_scan(gm.profile)
    t = np.linspace(0.0, 3.0, 13)
    assert np.max(np.abs(gm.profile.h(s0 + t) - gm.profile.h(s0 - t))) < 1e-9
    assert abs(gm.profile.hawking_mass(s0) - 0.5) < 1e-9
    assert gm.profile.kind == "truncated"


def test_hidden_region_interface():
    gm = F.hidden_region(1.0, 3.0, 0.5)
    md = gm.metadata
    assert md["area_mismatch"] < 1e-10
    assert abs(md["mean_curvature_jump"] - (md["H_inner"] - md["H_outer"])) < 1e-14
    assert md["mean_curvature_jump"] > 0
    assert abs(adm_mass_limit(gm.geometry).value - 0.5) < 1e-6
    assert len(minimal_sphere_scan(gm.profile)) == 1


def test_hidden_region_rejects_impossible_glue():
    with pytest.raises(GlueInfeasible):
        F.hidden_region(1.0, 1.5, 0.5)  # inside the mass-1 horizon


def test_cylinder_append_examples():
    gm = F.cylinder_append(1.0, 10.0)
    s_cyl = np.linspace(0.5, 9.5, 10)
    assert np.max(np.abs(gm.profile.scalar_curvature(s_cyl) - 0.5)) < 1e-8
    assert np.max(np.abs(gm.profile.hawking_mass(s_cyl) - 1.0)) < 1e-12
    assert np.max(np.abs(gm.profile.scalar_curvature(np.linspace(10.5, 60.0, 10)))) < 1e-8
    plain = F.cylinder_append(1.0, 0.0)
    s = np.linspace(0.0, 30.0, 31)
    assert np.max(np.abs(plain.profile.h(s) - F.schwarzschild(1.0).profile.h(s))) < 1e-10


def test_mass_profile_limit_and_curvature():
    gm = F.mass_profile(2.0, [0.2, 0.1])
    assert abs(adm_mass_limit(gm.geometry).value - 1.3) < 1e-6
    assert gm.profile.scalar_curvature(np.linspace(0.0, 50.0, 201)).min() >= 0


@pytest.mark.parametrize("family,params", [
    ("schwarzschild", {"m": -1}),
    ("hidden_region", {"m": 1, "r_glue": 3, "eps": 1.5}),
    ("cylinder_append", {"m": 1, "L": -2}),
    ("flatten_out", {"m": 1}),
    ("flatten_out", {"m": 1, "height": 4, "colour": 2}),
])
def test_spec_rejects_bad_parameters(family, params):
    with pytest.raises(ValueError):
        FamilySpec(family, params)


@pytest.mark.parametrize("spec", [
    FamilySpec("flat", {}),
    FamilySpec("schwarzschild", {"m": 2}),
    FamilySpec("flatten_out", {"m": 1, "height": 8}),
    FamilySpec("flatten_in", {"m": 1, "height": 20}),
    FamilySpec("doubled_schwarzschild", {"eps": 0.5}),
    FamilySpec("hidden_region", {"m": 1, "r_glue": 5, "eps": 0.5}),
    FamilySpec("cylinder_append", {"m": 1, "L": 3}),
    FamilySpec("mass_profile", {"a": 2, "c1": 0.1}),
    FamilySpec("rescale", {"c": 2}, base=FamilySpec("schwarzschild", {"m": 1})),
])
def test_declared_metadata_is_consistent(spec):
    assert check_consistency(build(spec)) == []
