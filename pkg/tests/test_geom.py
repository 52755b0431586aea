import cmath
import math

import mpmath as mp
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from quadlink.geom import (
    INFINITY,
    ExtendedComplex,
    GeometryError,
    PlanarConfig,
    angles,
    config_cross_ratio,
    cross_ratio,
    signed_area,
    uniformizer,
    wrap_angle,
)

from oracles import moebius_cross_ratio

SQUARE = PlanarConfig(0j, 1 + 0j, 1 + 1j, 1j)

coord = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
point = st.builds(complex, coord, coord)


def _separated(*pts, gap=1e-2):
    return all(abs(p - q) > gap for i, p in enumerate(pts) for q in pts[i + 1 :])


# cross_ratio -----------------------------------------------------------------


def test_cross_ratio_direct_substitution():
    assert complex(cross_ratio(0, 2, 1, 3)) == pytest.approx(-1 / 3)


@pytest.mark.parametrize("w", [2.0, -1.5, 3j, 0.5 + 0.5j])
def test_cross_ratio_zero_when_z_equals_p(w):
    assert complex(cross_ratio(0, 1, 0, w)) == 0


def test_cross_ratio_special_values_one_and_infinity():
    assert complex(cross_ratio(0, 1, 5j, 5j)) == pytest.approx(1)
    assert cross_ratio(0, 1, 1, 3 + 1j).is_infinite


def test_cross_ratio_unit_square_matches_rational_oracle():
    # exact rational evaluation: (1+i)(i-1)/(i * i) = 2
    expected = complex(moebius_cross_ratio(0, 1, 1 + 1j, 1j))
    assert expected == pytest.approx(2)
    assert complex(cross_ratio(0, 1, 1 + 1j, 1j)) == pytest.approx(2)


def test_cross_ratio_rejects_three_coincident_points():
    with pytest.raises(GeometryError):
        cross_ratio(1, 1, 1, 2)


@settings(max_examples=200)
@given(point, point, point, point)
def test_cross_ratio_matches_moebius_oracle(p, q, z, w):
    assume(_separated(p, q, z, w, gap=0.05))
    got = complex(cross_ratio(p, q, z, w))
    ref = complex(moebius_cross_ratio(p, q, z, w))
    assert abs(got - ref) <= 1e-9 * max(1.0, abs(ref))


@settings(max_examples=200)
@given(point, point, point, point, point, point)
def test_cross_ratio_is_moebius_invariant(p, q, z, w, alpha, beta):
    assume(_separated(p, q, z, w, gap=0.05))
    assume(abs(alpha) > 0.1)
    # z -> alpha z + beta, then inversion about a point off the four
    c = 37.0 + 11.0j
    assume(min(abs(alpha * x + beta - c) for x in (p, q, z, w)) > 0.5)
    f = lambda x: 1 / (alpha * x + beta - c)  # noqa: E731
    before = complex(cross_ratio(p, q, z, w))
    after = complex(cross_ratio(f(p), f(q), f(z), f(w)))
    assert abs(before - after) <= 1e-6 * max(1.0, abs(before))


@settings(max_examples=200)
@given(point, point, point, point)
def test_uniformizer_is_one_minus_cross_ratio(v1, v2, v3, v4):
    assume(_separated(v1, v2, v3, v4, gap=0.05))
    V = PlanarConfig(v1, v2, v3, v4)
    cr = complex(config_cross_ratio(V))
    r = complex(uniformizer(V))
    assert abs(cr - (1 - r)) <= 1e-9 * max(1.0, abs(r))


@settings(max_examples=100)
@given(point, st.floats(0.1, 10), st.lists(st.floats(0, 2 * math.pi), min_size=4, max_size=4, unique=True))
def test_concyclic_points_give_real_cross_ratio(center, radius, ts):
    pts = [center + radius * cmath.exp(1j * t) for t in ts]
    assume(_separated(*pts, gap=0.05))
    cr = complex(config_cross_ratio(PlanarConfig(*pts)))
    assert abs(cr.imag) <= 1e-7 * max(1.0, abs(cr))


def test_perturbing_off_the_circle_breaks_reality():
    pts = [cmath.exp(1j * t) for t in (0.1, 1.7, 3.0, 4.4)]
    pts[3] *= 1.1
    assert abs(complex(config_cross_ratio(PlanarConfig(*pts))).imag) > 1e-3


@settings(max_examples=100)
@given(point, point, point, point)
def test_conjugate_configuration_conjugates_cross_ratio(v1, v2, v3, v4):
    assume(_separated(v1, v2, v3, v4, gap=0.05))
    V = PlanarConfig(v1, v2, v3, v4)
    a = complex(config_cross_ratio(V))
    b = complex(config_cross_ratio(V.conjugate()))
    assert abs(a.conjugate() - b) <= 1e-9 * max(1.0, abs(a))


# extended complex ------------------------------------------------------------


def test_extended_complex_arithmetic():
    assert INFINITY.is_infinite
    assert INFINITY.one_minus().is_infinite
    assert complex(INFINITY.reciprocal()) == 0
    assert ExtendedComplex(0j).reciprocal().is_infinite
    with pytest.raises(OverflowError):
        complex(INFINITY)


# uniformizer, angles, area ---------------------------------------------------


def test_unit_square_values():
    assert complex(config_cross_ratio(SQUARE)) == pytest.approx(2)
    assert complex(uniformizer(SQUARE)) == pytest.approx(-1)
    assert signed_area(SQUARE) == pytest.approx(1)
    assert signed_area(SQUARE.conjugate()) == pytest.approx(-1)


def test_square_angles_depend_on_orientation():
    # clockwise square: right angles measured as pi/2
    cw = angles(SQUARE.conjugate())
    assert (cw.alpha, cw.gamma) == pytest.approx((math.pi / 2, math.pi / 2))
    ccw = angles(SQUARE)
    assert (ccw.alpha, ccw.gamma) == pytest.approx((3 * math.pi / 2, 3 * math.pi / 2))


def test_collinear_configuration_angles_are_zero_or_pi():
    V = PlanarConfig(0j, 4 + 0j, 2 + 0j, 1 + 0j)
    ang = angles(V)
    for x in (ang.alpha, ang.gamma):
        assert min(abs(x), abs(x - math.pi)) < 1e-12


def test_arm_configuration_with_zero_area():
    assert signed_area(PlanarConfig(0j, 1 + 0j, 1 + 1j, 2 + 1j, kind="open")) == pytest.approx(0)


@settings(max_examples=200)
@given(point, point, point, point)
def test_arg_uniformizer_is_minus_angle_sum(v1, v2, v3, v4):
    assume(_separated(v1, v2, v3, v4, gap=0.05))
    V = PlanarConfig(v1, v2, v3, v4)
    r = complex(uniformizer(V))
    assume(abs(r) > 1e-6)
    ang = angles(V)
    d = wrap_angle(cmath.phase(r) + ang.alpha + ang.gamma)
    assert min(d, 2 * math.pi - d) < 1e-8


@settings(max_examples=200)
@given(point, point, point, point, st.floats(0, 2 * math.pi), point)
def test_signed_area_is_rigid_motion_invariant(v1, v2, v3, v4, theta, shift):
    V = PlanarConfig(v1, v2, v3, v4)
    rot = cmath.exp(1j * theta)
    W = PlanarConfig(*(rot * v + shift for v in V.vertices))
    assert signed_area(W) == pytest.approx(signed_area(V), abs=1e-8)


def test_canonical_places_first_side_on_positive_axis():
    V = PlanarConfig(1 + 1j, 1 + 3j, -1 + 3j, -1 + 1j).canonical()
    assert V.v1 == 0 and V.v2 == pytest.approx(2)
    assert V.side_lengths() == pytest.approx((2, 2, 2, 2))


def test_wrap_angle_range():
    for x in (-7.0, -1e-18, 0.0, 2 * math.pi, 13.0):
        y = wrap_angle(x)
        assert 0 <= y < 2 * math.pi


def test_oracle_precision_is_independent():
    # sanity check that the oracle runs at high precision
    assert mp.mp.dps >= 30
