import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from admlab import families as F
from admlab.convergence import (
    SequenceScenario,
    derivative_convergence,
    detect_blowup,
    flat_norm_upper,
    liminf_estimate,
    lsc_check,
    region_with_area,
    uniform_limit,
)
from admlab.errors import DomainMismatch
from admlab.families import FamilySpec
from admlab.geometry import RadialGraph, flat_graph


def _family(name, key, values, **fixed):
    return [FamilySpec(name, {**fixed, key: v}) for v in values]


def test_flat_norm_of_identical_graphs_is_zero():
    g = F.schwarzschild(1.0).graph
    est = flat_norm_upper(g, g, 3.0, 10.0)
    assert est.between_volume == est.boundary_cylinders == est.upper_bound == 0


@settings(max_examples=25, deadline=None)
@given(st.floats(0.01, 5.0), st.floats(2.0, 6.0), st.floats(0.5, 20.0))
def test_flat_norm_of_vertical_shift(c, a, width):
    b = a + width
    g = F.schwarzschild(1.0).graph
    est = flat_norm_upper(g, g.shifted(c), a, b)
    volume = c * 4 * math.pi / 3 * (b ** 3 - a ** 3)
    cylinders = 4 * math.pi * c * (a * a + b * b)
    assert abs(est.between_volume - volume) < 1e-8 * volume
    assert abs(est.boundary_cylinders - cylinders) < 1e-8 * cylinders
    assert est.upper_bound == est.between_volume + est.boundary_cylinders


@settings(max_examples=20, deadline=None)
@given(st.floats(0.1, 1.0), st.floats(0.1, 1.0), st.floats(-3.0, 3.0))
def test_flat_norm_triangle_inequality(m1, m2, shift):
    f = F.schwarzschild(m1).graph
    g = F.schwarzschild(m2).graph.shifted(shift)
    h = flat_graph(K=0.5)
    fh = flat_norm_upper(f, h, 2.5, 8.0).upper_bound
    fg = flat_norm_upper(f, g, 2.5, 8.0).upper_bound
    gh = flat_norm_upper(g, h, 2.5, 8.0).upper_bound
    assert fh <= fg + gh + 1e-9 * (fg + gh + 1)


def test_flat_norm_needs_a_common_window():
    with pytest.raises(DomainMismatch):
        flat_norm_upper(F.schwarzschild(2.0).graph, flat_graph(), 1.0, 5.0)


def test_sequence_needs_three_members():
    with pytest.raises(ValueError):
        SequenceScenario([F.flat(), F.flat()], (1, 2))


def test_flatten_in_sequence_converges_to_flat():
    seq = SequenceScenario(_family("flatten_in", "height", (5, 10, 20, 40, 80), m=1), (3, 10))
    assert detect_blowup(seq).r_star is None
    lim = uniform_limit(seq)
    assert not lim.diverges and lim.sup_error < 1e-3
    assert derivative_convergence(seq, flat_graph(), 5.0).converges
    rep = lsc_check(seq, F.flat())
    assert rep.inequality_holds and rep.limit_mass == 0 and abs(rep.liminf_estimate - 1) < 1e-6


def test_constant_sequence():
    g = F.schwarzschild(1.0)
    seq = SequenceScenario([g, g, g], (3, 10))
    lim = uniform_limit(seq)
    nodes = seq.grid()
    assert np.array_equal(lim.graph.height(nodes), g.graph.height(nodes))
    r = np.linspace(3, 10, 15)  # pchip between nodes
    assert np.max(np.abs(lim.graph.height(r) - g.graph.height(r))) < 1e-6
    rep = derivative_convergence(seq, g.graph, 5.0)
    assert rep.converges and rep.gap == 0


def test_wiggle_family_slopes_do_not_converge():
    base = F.schwarzschild(1.0).graph

    def wiggle(i):
        return RadialGraph(3, 2.0, f=lambda r: base.height(r) + np.sin(i * i * r) / i,
                           df=lambda r: base.slope(r) + i * np.cos(i * i * r),
                           d2f=lambda r: base.slope2(r) - i ** 3 * np.sin(i * i * r))

    seq = SequenceScenario([wiggle(i) for i in range(1, 9)], (3, 10))
    assert not derivative_convergence(seq, base, 5.0).converges


def test_cylinder_walls_blow_up_at_the_horizon():
    seq = SequenceScenario(_family("cylinder_append", "L", (1, 10, 100, 1000), m=1), (2, 10))
    r_star, bound = detect_blowup(seq)
    assert abs(r_star - 2) < 0.05 and abs(bound - 1) < 0.05
    shifted = SequenceScenario([FamilySpec("cylinder_append", {"m": 1, "L": L, "K": -L}) for L in (1, 10, 100, 1000)],
                               (2.5, 10))
    assert detect_blowup(shifted).r_star is None


def test_region_examples():
    sch = F.schwarzschild(1.0)
    assert region_with_area(sch, 16 * math.pi).empty
    reg = region_with_area(sch, 64 * math.pi)
    assert abs(reg.radius - 4.0) < 1e-9 and abs(reg.boundary_hawking - 1.0) < 1e-9
    flat = region_with_area(F.flat(), 4 * math.pi)
    assert abs(flat.s_A - 1.0) < 1e-9 and abs(flat.boundary_hawking) < 1e-12


def test_liminf_of_growing_and_settling_masses():
    assert liminf_estimate([1.0, 2.0, 4.0, 8.0, 16.0]) == math.inf
    assert liminf_estimate([3.0, 1.0, 1.0, 1.0]) == 1.0


def test_violations_and_their_causes():
    out = SequenceScenario(_family("flatten_out", "height", (4, 8, 16, 32), m=1), (2, 10))
    rep = lsc_check(out, F.schwarzschild(1.0))
    assert not rep.inequality_holds and rep.violation_cause == "negative-scalar-curvature"
    hidden = SequenceScenario(_family("hidden_region", "r_glue", (3, 5, 9, 17), m=1, eps=0.5), (2, 40))
    rep = lsc_check(hidden, F.schwarzschild(1.0))
    assert not rep.inequality_holds and rep.violation_cause == "interior-minimal-surface"
    assert rep.as_dict()["inequality_holds"] is False


def test_unbounded_limit_uses_the_blowup_bound():
    seq = SequenceScenario(_family("cylinder_append", "L", (1, 10, 100, 1000), m=1), (2, 10))
    rep = lsc_check(seq)
    assert rep.limit_is_bound and abs(rep.limit_mass - 1) < 0.05 and rep.inequality_holds
