import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadlink import quad as q
from quadlink.geom import angles, config_cross_ratio, signed_area, uniformizer, wrap_angle
from quadlink.quad import ModuliTopology as T
from quadlink.quad import QuadLinkage

from conftest import linkages, random_linkages
from oracles import arg_r_extremes

# min |arg R| over all configurations, from the mpmath oracle (circle intersection + golden search)
ORACLE_TAU_STAR = {
    (3, 2, 2, 1.5): 0.366481962841491,
    (1, 2, 3, 4.5): 0.757490609058183,
    (2, 3, 4, 2): 0.417606003307979,
    (5, 4, 2, 2.5): 0.339122687731365,
}


# construction and parsing ----------------------------------------------------


def test_parse_and_exact_arithmetic():
    l = QuadLinkage.parse("3, 2, 2, 1.5")
    assert l.exact == (3, 2, 2, Fraction(3, 2))
    assert q.exact(0.1) == Fraction(1, 10)
    assert q.exact(np.float64(1.05)) == Fraction(105, 100)


@pytest.mark.parametrize("text", ["1,1,1,5", "1,2,3", "1,2,x,4", "0,1,1,1", "-1,2,2,2"])
def test_invalid_lengths_rejected(text):
    with pytest.raises(q.LinkageError):
        QuadLinkage.parse(text)


def test_existence_message():
    with pytest.raises(q.LinkageError, match="no planar realization"):
        QuadLinkage(1, 1, 1, 5)


# sign data and criteria ------------------------------------------------------


def test_nondegeneracy_examples():
    assert q.is_nondegenerate(QuadLinkage(3, 2, 2, 1.5))
    assert not q.is_nondegenerate(QuadLinkage(1, 2, 3, 4))
    assert not q.is_nondegenerate(QuadLinkage(1, 1, 1, 1))


def test_nondegeneracy_is_exact_on_decimal_inputs():
    # 0.1 + 0.2 - 0.3 - 0 is not exactly zero in binary floating point
    assert not q.is_nondegenerate(QuadLinkage(0.1, 0.2, 0.3, 0.6))


@pytest.mark.parametrize(
    "lengths,signs",
    [((4, 1, 4, 2), (-1, 5, 1)), ((3, 2, 2, 1.5), (1.5, 1.5, 0.5)), ((1, 1, 1, 1), (0, 0, 0))],
)
def test_grashof_signs(lengths, signs):
    s = q.grashof_signs(QuadLinkage(*lengths))
    assert (s.p1, s.p2, s.p3) == pytest.approx(signs)


@pytest.mark.parametrize(
    "lengths,surjective,connected",
    [((4, 1, 4, 2), True, False), ((3, 2, 2, 1.5), False, True), ((2, 3, 4, 2), False, True)],
)
def test_surjective_and_connected(lengths, surjective, connected):
    l = QuadLinkage(*lengths)
    assert q.is_surjective(l) is surjective
    assert q.is_connected(l) is connected


def test_connected_on_boundary_case():
    assert q.is_connected(QuadLinkage(1, 1, 1, 1))
    with pytest.raises(q.DegenerateLinkageError):
        q.is_surjective(QuadLinkage(1, 1, 1, 1))


@pytest.mark.parametrize(
    "lengths,topology",
    [
        ((3, 2, 2, 1.5), T.CIRCLE),
        ((4, 1, 4, 2), T.TWO_CIRCLES),
        ((1, 1, 1, 1), T.THREE_CIRCLES_CHAIN),
        ((2, 2, 1, 1), T.TWO_CIRCLES_TWO_POINTS),
        ((1, 2, 2, 1), T.TWO_CIRCLES_TWO_POINTS),
        ((3, 1, 3, 1), T.TWO_CIRCLES_TWO_POINTS),
        ((1, 4, 2, 3), T.BOUQUET_TWO_CIRCLES),
        ((1, 2, 3, 6), T.SINGLE_POINT),
    ],
)
def test_classify_topology(lengths, topology):
    assert q.classify_topology(QuadLinkage(*lengths)) is topology


@settings(max_examples=100)
@given(linkages, st.integers(0, 3))
def test_criteria_invariant_under_cyclic_relabeling(l, shift):
    m = l.relabel(shift)
    assert q.classify_topology(m) is q.classify_topology(l)
    assert q.is_connected(m) == q.is_connected(l)


@settings(max_examples=100)
@given(linkages)
def test_connected_and_surjective_are_complementary(l):
    assert q.is_connected(l) != q.is_surjective(l)
    expected = T.CIRCLE if q.is_connected(l) else T.TWO_CIRCLES
    assert q.classify_topology(l) is expected


# constraint, branches, embedding ---------------------------------------------


def test_gamma_branches_examples():
    assert sorted(q.gamma_branches(QuadLinkage(1, 1, 1, 1), math.pi / 2)) == pytest.approx([math.pi / 2, 3 * math.pi / 2])
    g = q.gamma_branches(QuadLinkage(3, 2, 2, 1.5), 0.0)
    assert sorted(g) == pytest.approx(sorted([math.acos(0.875), 2 * math.pi - math.acos(0.875)]))
    # diagonal |v1 v3| = a + b = 5 exceeds c + d = 3.5
    assert q.gamma_branches(QuadLinkage(3, 2, 2, 1.5), math.pi) == []


def test_embed_unit_square():
    V = q.embed_config(QuadLinkage(1, 1, 1, 1), math.pi / 2, math.pi / 2)
    assert V.side_lengths() == pytest.approx((1, 1, 1, 1))
    assert abs(signed_area(V)) == pytest.approx(1)
    assert abs(V.v3 - V.v1) == pytest.approx(math.sqrt(2))


def test_embed_rejects_off_curve_points():
    with pytest.raises(ValueError):
        q.embed_config(QuadLinkage(3, 2, 2, 1.5), 0.0, 0.0)


@settings(max_examples=150)
@given(linkages, st.floats(0, 2 * math.pi), st.booleans())
def test_embedding_round_trip(l, alpha, upper):
    gs = q.gamma_branches(l, alpha)
    if not gs:
        return
    gamma = gs[0] if upper else gs[-1]
    V = q.embed_config(l, alpha, gamma)
    assert V.side_lengths() == pytest.approx(l.lengths, rel=1e-9, abs=1e-9)
    ang = angles(V)
    for x, y in ((ang.alpha, alpha), (ang.gamma, gamma)):
        dx = wrap_angle(x - y)
        assert min(dx, 2 * math.pi - dx) < 1e-7
    # conjugate branch is the mirror image
    W = q.embed_config(l, wrap_angle(-alpha), wrap_angle(-gamma))
    assert signed_area(W) == pytest.approx(-signed_area(V), abs=1e-9)


@settings(max_examples=100)
@given(linkages, st.floats(0, 2 * math.pi))
def test_signed_area_formula(l, alpha):
    a, b, c, d = l.lengths
    for gamma in q.gamma_branches(l, alpha):
        V = q.embed_config(l, alpha, gamma)
        expected = -(a * b * math.sin(alpha) + c * d * math.sin(gamma)) / 2
        assert signed_area(V) == pytest.approx(expected, abs=1e-9 * (a + b + c + d) ** 2)


# tracing ---------------------------------------------------------------------


@pytest.mark.parametrize("lengths,count", [((3, 2, 2, 1.5), 1), ((4, 1, 4, 2), 2), ((1, 2, 3, 4.5), 1)])
def test_trace_component_count(lengths, count):
    assert len(q.trace_moduli(QuadLinkage(*lengths), 256)) == count


def test_trace_rejects_degenerate_and_small_n():
    with pytest.raises(q.DegenerateLinkageError):
        q.trace_moduli(QuadLinkage(1, 1, 1, 1))
    with pytest.raises(ValueError):
        q.trace_moduli(QuadLinkage(3, 2, 2, 1.5), 8)


def test_two_components_are_complex_conjugate():
    l = QuadLinkage(4, 1, 4, 2)
    c0, c1 = q.trace_moduli(l, 256)
    # mirror (alpha, gamma) -> (-alpha, -gamma) carries one component onto the other
    mirrored = np.column_stack([np.mod(-c0.alpha, 2 * math.pi), np.mod(-c0.gamma, 2 * math.pi)])
    other = np.column_stack([c1.alpha, c1.gamma])
    d = np.abs((mirrored[:, None, :] - other[None, :, :] + math.pi) % (2 * math.pi) - math.pi).sum(-1)
    assert d.min(axis=1).max() < 0.05


@settings(max_examples=30, deadline=None)
@given(linkages)
def test_traced_points_satisfy_constraint_and_circle_law(l):
    a, b, c, d = l.lengths
    for comp in q.trace_moduli(l, 128):
        res = q.g_residual(l, comp.alpha, comp.gamma)
        assert np.max(np.abs(res)) < 1e-9 * max(l.lengths) ** 2
        V = q.embed_config(l, float(comp.alpha[5]), float(comp.gamma[5]))
        assert abs(complex(uniformizer(V))) == pytest.approx(a * c / (b * d), rel=1e-10)


def test_component_of_labels_points():
    l = QuadLinkage(4, 1, 4, 2)
    for comp in q.trace_moduli(l, 128):
        for k in (0, 40, 90):
            assert q.component_of(l, float(comp.alpha[k]), float(comp.gamma[k])) == comp.index


# F_tau and the image arc -----------------------------------------------------


def test_f_tau_examples():
    taus = np.linspace(0, 2 * math.pi, 9)
    np.testing.assert_allclose(q.f_tau(QuadLinkage(4, 1, 4, 2), taus), 311 - 256 * np.cos(taus))
    # rhomboid value 8 (1 - cos tau) computed directly from the polynomial
    a = b = c = d = 1.0
    k = 4 * a * a * b * b + 4 * c * c * d * d - (a * a + b * b - c * c - d * d) ** 2
    assert k - 8 * a * b * c * d * math.cos(0.7) == pytest.approx(8 * (1 - math.cos(0.7)))


@settings(max_examples=300)
@given(st.tuples(*[st.floats(0.1, 10)] * 4))
def test_f_zero_factorizes(t):
    a, b, c, d = t
    l = q.QuadLinkage.__new__(QuadLinkage)
    object.__setattr__(l, "a", a)
    object.__setattr__(l, "b", b)
    object.__setattr__(l, "c", c)
    object.__setattr__(l, "d", d)
    prod = (a + b - c - d) * (a - b + c - d) * (a - b - c + d) * (a + b + c + d)
    assert float(q.f_tau(l, 0.0)) == pytest.approx(-prod, rel=1e-9, abs=1e-9 * (a + b + c + d) ** 4)
    # the tau = pi value is a product of four non-negative factors on realizable lengths
    prod_pi = (b + c + d - a) * (a + b + c - d) * (a - b + c + d) * (a + b - c + d)
    assert float(q.f_tau(l, math.pi)) == pytest.approx(prod_pi, rel=1e-9, abs=1e-9 * (a + b + c + d) ** 4)


@pytest.mark.parametrize("lengths", sorted(ORACLE_TAU_STAR))
def test_tau_star_matches_oracle(lengths):
    assert q.tau_star(QuadLinkage(*lengths)) == pytest.approx(ORACLE_TAU_STAR[lengths], abs=1e-12)


def test_tau_star_closed_form_for_reference_linkage():
    # cos(tau*) = 134.4375 / 144
    assert math.cos(q.tau_star(QuadLinkage(3, 2, 2, 1.5))) == pytest.approx(0.93359375, abs=1e-14)


def test_oracle_extremes_live():
    lo, hi = arg_r_extremes((2, 3, 4, 2), samples=400)
    assert float(lo) == pytest.approx(ORACLE_TAU_STAR[(2, 3, 4, 2)], abs=1e-9)
    assert float(hi) == pytest.approx(math.pi, abs=1e-9)


def test_r_image_examples():
    full = q.r_image(QuadLinkage(4, 1, 4, 2))
    assert full.is_full and full.radius == pytest.approx(8) and full.center == 0
    arc = q.r_image(QuadLinkage(3, 2, 2, 1.5))
    assert arc.radius == pytest.approx(2)
    assert (arc.arg_lo, arc.arg_hi) == pytest.approx((ORACLE_TAU_STAR[(3, 2, 2, 1.5)], 2 * math.pi - ORACLE_TAU_STAR[(3, 2, 2, 1.5)]))
    assert not q.r_image(QuadLinkage(1, 2, 3, 4.5)).is_full


def test_cr_image_is_pointwise_one_minus():
    cr = q.cr_image(QuadLinkage(4, 1, 4, 2))
    assert cr.is_full and cr.center == pytest.approx(1) and cr.radius == pytest.approx(8)
    l = QuadLinkage(3, 2, 2, 1.5)
    arc, crarc = q.r_image(l), q.cr_image(l)
    for t in np.linspace(arc.arg_lo, arc.arg_hi, 7):
        w = 1 - arc.point(t)
        assert crarc.contains_arg(math.atan2(w.imag, w.real - 1), tol=1e-12)
        assert abs(w - 1) == pytest.approx(crarc.radius)


@settings(max_examples=30, deadline=None)
@given(linkages)
def test_traced_image_lies_on_arc(l):
    arc = q.r_image(l)
    for comp in q.trace_moduli(l, 128):
        for t in -(comp.alpha + comp.gamma):
            assert arc.contains_arg(float(t), tol=1e-9)


# fibers and cyclic configurations --------------------------------------------


def test_fiber_coefficients_and_solutions():
    l = QuadLinkage(4, 1, 4, 2)
    A, B, C = q.fiber_coefficients(l, 0.0)
    assert (A, B, C) == pytest.approx((0, 8, 3))
    pts = q.solve_tau_fiber(l, 0.0)
    assert len(pts) == 2
    for p in pts:
        assert math.cos(p.gamma) == pytest.approx(3 / 8)
    assert [math.cos(p.gamma) for p in q.solve_tau_fiber(l, math.pi)] == pytest.approx([1 / 8, 1 / 8])


def test_fiber_empty_outside_arc_and_single_at_tangency():
    l = QuadLinkage(3, 2, 2, 1.5)
    assert q.solve_tau_fiber(l, math.acos(0.95)) == []
    assert len(q.solve_tau_fiber(l, q.tau_star(l))) == 1


@settings(max_examples=60, deadline=None)
@given(linkages, st.floats(0, 2 * math.pi))
def test_fiber_points_have_requested_argument(l, tau):
    for p in q.solve_tau_fiber(l, tau):
        V = q.embed_config(l, p.alpha, p.gamma)
        r = complex(uniformizer(V))
        d = wrap_angle(math.atan2(r.imag, r.real) - tau)
        assert min(d, 2 * math.pi - d) < 1e-8


def test_cyclic_configurations():
    l = QuadLinkage(4, 1, 4, 2)
    confs = q.cyclic_configurations(l)
    assert len(confs) == 4
    for V in confs:
        assert abs(complex(config_cross_ratio(V)).imag) < 1e-9
    assert len(q.cyclic_configurations(QuadLinkage(3, 2, 2, 1.5))) == 2


@settings(max_examples=60, deadline=None)
@given(linkages)
def test_cyclic_configurations_closed_under_conjugation(l):
    confs = q.cyclic_configurations(l)
    assert len(confs) <= 4
    vals = sorted(complex(uniformizer(V)).real for V in confs)
    mirrored = sorted(complex(uniformizer(V.conjugate())).real for V in confs)
    assert vals == pytest.approx(mirrored)
    # a self-intersecting cyclic configuration exists exactly for surjective linkages
    has_zero = any(complex(uniformizer(V)).real > 0 for V in confs)
    assert has_zero == q.is_surjective(l)


# critical points and degree --------------------------------------------------


def test_critical_points_reference():
    l = QuadLinkage(3, 2, 2, 1.5)
    certs = q.critical_points(l)
    assert len(certs) == 2
    for c in certs:
        assert math.cos(c.point.alpha) == pytest.approx(153.5625 / 162)
        assert abs(c.second_deriv) > 1
    a, b = certs
    assert a.point.alpha == pytest.approx(2 * math.pi - b.point.alpha)
    assert sorted(c.critical_value for c in certs) == pytest.approx(
        [ORACLE_TAU_STAR[(3, 2, 2, 1.5)], 2 * math.pi - ORACLE_TAU_STAR[(3, 2, 2, 1.5)]]
    )
    assert q.critical_points(QuadLinkage(4, 1, 4, 2)) == []


@settings(max_examples=80, deadline=None)
@given(linkages)
def test_fold_points_have_zero_area_and_match_arc_ends(l):
    certs = q.critical_points(l)
    if q.is_connected(l):
        assert len(certs) == 2
        ts = q.tau_star(l)
        assert sorted(c.critical_value for c in certs) == pytest.approx([ts, 2 * math.pi - ts], abs=1e-9)
    else:
        assert certs == []
    for c in certs:
        V = q.embed_config(l, c.point.alpha, c.point.gamma)
        assert abs(signed_area(V)) < 1e-9 * max(l.lengths) ** 2
        assert c.second_deriv != 0


def test_mapping_degree_examples():
    assert q.mapping_degree(QuadLinkage(3, 2, 2, 1.5), 256) == ([0], 0)
    per, total = q.mapping_degree(QuadLinkage(4, 1, 4, 2), 256)
    assert sorted(per) == [-1, 1] and total == 0


def test_winding_number():
    t = np.linspace(0, 4 * math.pi, 200, endpoint=False)
    assert q.winding_number(t) == pytest.approx(2)


@pytest.mark.parametrize("l", random_linkages(20, seed=7))
def test_degree_zero_on_random_linkages(l):
    per, total = q.mapping_degree(l, 256)
    assert total == 0
    assert sorted(per) == ([0] if q.is_connected(l) else [-1, 1])


# degenerate catalog ----------------------------------------------------------


def _behaviour(rep):
    return {c.name: c for c in rep.circles}


def test_kite_report():
    rep = q.degenerate_image_report(QuadLinkage(2, 2, 1, 1), 256)
    assert rep.case == "kite" and rep.topology is T.TWO_CIRCLES_TWO_POINTS
    beh = _behaviour(rep)
    assert beh["kites"].kind == "cover" and beh["kites"].sheets == 2
    assert beh["folded_13"].kind == "collapse" and beh["folded_13"].point == pytest.approx(rep.radius)


def test_kite_relabeled_report():
    rep = q.degenerate_image_report(QuadLinkage(1, 2, 2, 1), 256)
    assert rep.case == "kite"
    kinds = sorted(c.kind for c in rep.circles)
    assert kinds == ["collapse", "cover"]


def test_parallelogram_report():
    rep = q.degenerate_image_report(QuadLinkage(3, 1, 3, 1), 256)
    assert rep.case == "parallelogram"
    beh = _behaviour(rep)
    assert beh["parallelograms"].sheets == 2
    assert beh["counter_parallelograms"].point == pytest.approx(9)


def test_rhomboid_report():
    rep = q.degenerate_image_report(QuadLinkage(1, 1, 1, 1), 256)
    assert rep.case == "rhomboid" and rep.topology is T.THREE_CIRCLES_CHAIN
    beh = _behaviour(rep)
    assert beh["rhombi"].sheets == 2
    assert beh["folded_13"].point == pytest.approx(1)
    assert beh["folded_24"].point == pytest.approx(1)


def test_short_and_long_aligned_reports():
    rep = q.degenerate_image_report(QuadLinkage(1, 4, 2, 3), 256)
    assert rep.topology is T.BOUQUET_TWO_CIRCLES
    assert [c.sheets for c in rep.circles] == [1, 1]
    assert rep.wedge_value.real > 0 and abs(rep.wedge_value.imag) < 1e-12
    point = q.degenerate_image_report(QuadLinkage(1, 2, 3, 6), 64)
    assert point.image == "point"


def test_degenerate_components_are_valid_configurations():
    l = QuadLinkage(2, 2, 1, 1)
    for name, configs in q.degenerate_components(l, 64).items():
        for V in configs:
            assert V.side_lengths() == pytest.approx(l.lengths, abs=1e-9), name


def test_degenerate_report_rejects_nondegenerate():
    with pytest.raises(ValueError):
        q.degenerate_image_report(QuadLinkage(3, 2, 2, 1.5))
