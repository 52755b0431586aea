"""Planar robot 3-arm (a 4-bar whose last side is telescopic).

The moduli space is the torus of angles ``(phi, eta)`` with vertices
``0, a, a + b e^{i phi}, a + b e^{i phi} + c e^{i eta}``. Images are taken in
the chart at infinity, i.e. we work with ``1 / R``, which is an entire
function of the angles and equals ``-(b/ac) S e^{i(phi - eta)}`` where ``S``
is the end-to-end vector.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .geom import TWO_PI, PlanarConfig, wrap_angle
from .quad import (
    CircleArc,
    DegenerateReport,
    LinkageError,
    QuadLinkage,
    degenerate_image_report,
    exact,
    is_connected,
    is_nondegenerate,
    parse_lengths,
    r_image,
)
from .torus import index_to_angle, torus_grid, zero_contours


class NonGenericArmError(ValueError):
    """The arm has coinciding or vanishing aligned sums."""


class IndeterminateValue(ValueError):
    """Target value lies on (or numerically too close to) the fold image."""


class CaseTag(str, enum.Enum):
    NO_CLOSED = "NoClosed"
    CONTAINS_TRIANGLE = "ContainsTriangle"


@dataclass(frozen=True)
class ArmLinkage:
    a: float
    b: float
    c: float

    def __post_init__(self):
        if min(self.exact) <= 0:
            raise LinkageError(f"arm lengths must be positive, got {self.lengths}")

    @classmethod
    def parse(cls, text: str) -> ArmLinkage:
        return cls(*parse_lengths(text, 3))

    @property
    def exact(self) -> tuple[Fraction, Fraction, Fraction]:
        return tuple(exact(x) for x in (self.a, self.b, self.c))  # type: ignore[return-value]

    @property
    def lengths(self) -> tuple[float, float, float]:
        return (float(self.a), float(self.b), float(self.c))

    @property
    def case_tag(self) -> CaseTag:
        ex = self.exact
        if 2 * max(ex) < sum(ex):
            return CaseTag.CONTAINS_TRIANGLE
        return CaseTag.NO_CLOSED

    @property
    def t_min(self) -> float:
        ex = self.exact
        return float(max(Fraction(0), 2 * max(ex) - sum(ex)))

    @property
    def t_max(self) -> float:
        return float(sum(self.exact))

    @property
    def image_bound(self) -> float:
        """Largest modulus of ``1/R``: ``b (a+b+c) / (ac)``."""
        a, b, c = self.lengths
        return b * (a + b + c) / (a * c)

    def quad(self, t) -> QuadLinkage:
        return QuadLinkage(self.a, self.b, self.c, t)


_ALIGNED_LABELS = ("a+b+c", "a+b-c", "a-b+c", "-a+b+c")


def aligned_sums(l: ArmLinkage) -> tuple[Fraction, ...]:
    """End-to-end lengths of the four aligned configurations."""
    a, b, c = l.exact
    return (a + b + c, abs(a + b - c), abs(a - b + c), abs(-a + b + c))


def check_generic(l: ArmLinkage) -> None:
    sums = aligned_sums(l)
    for k, s in enumerate(sums):
        if s == 0:
            raise NonGenericArmError(f"non-generic arm {l.lengths}: {_ALIGNED_LABELS[k]} = 0")
    for i in range(4):
        for j in range(i + 1, 4):
            if sums[i] == sums[j]:
                raise NonGenericArmError(
                    f"non-generic arm {l.lengths}: |{_ALIGNED_LABELS[i]}| = |{_ALIGNED_LABELS[j]}|"
                )


@dataclass(frozen=True)
class TorusPoint:
    phi: float
    eta: float

    def conjugate(self) -> TorusPoint:
        return TorusPoint(wrap_angle(-self.phi), wrap_angle(-self.eta))


def arm_config(l: ArmLinkage, p: TorusPoint) -> PlanarConfig:
    a, b, c = l.lengths
    v3 = a + b * cmath.exp(1j * p.phi)
    return PlanarConfig(0j, complex(a), v3, v3 + c * cmath.exp(1j * p.eta), kind="open")


def end_vector(l: ArmLinkage, phi, eta):
    a, b, c = l.lengths
    return a + b * np.exp(1j * np.asarray(phi)) + c * np.exp(1j * np.asarray(eta))


def end_distance(l: ArmLinkage, phi, eta):
    return np.abs(end_vector(l, phi, eta))


def r_inverse_values(l: ArmLinkage, phi, eta):
    """Vectorized ``1/R`` over arrays of angles."""
    a, b, c = l.lengths
    phi = np.asarray(phi)
    eta = np.asarray(eta)
    return -(b / (a * c)) * end_vector(l, phi, eta) * np.exp(1j * (phi - eta))


def r_inverse(l: ArmLinkage, p: TorusPoint) -> complex:
    return complex(r_inverse_values(l, p.phi, p.eta))


def r_inverse_partials(l: ArmLinkage, phi, eta):
    """``(d/dphi, d/deta)`` of ``1/R`` as complex arrays."""
    a, b, c = l.lengths
    phi = np.asarray(phi)
    eta = np.asarray(eta)
    k = -b / (a * c)
    s = end_vector(l, phi, eta)
    e = np.exp(1j * (phi - eta))
    d_phi = k * 1j * (b * np.exp(1j * phi) + s) * e
    d_eta = k * 1j * (c * np.exp(1j * eta) - s) * e
    return d_phi, d_eta


def jacobian_values(l: ArmLinkage, phi, eta):
    a, b, c = l.lengths
    phi = np.asarray(phi)
    eta = np.asarray(eta)
    return a * b * np.sin(phi) + a * c * np.sin(eta) + b * c * np.sin(eta - phi)


def jacobian(l: ArmLinkage, p: TorusPoint) -> float:
    """``ab sin(phi) + ac sin(eta) + bc sin(eta - phi)``: twice the signed area of the arm.

    The real Jacobian determinant of ``1/R`` equals this times ``(b/ac)^2``.
    """
    return float(jacobian_values(l, p.phi, p.eta))


def jacobian_gradient(l: ArmLinkage, phi, eta):
    a, b, c = l.lengths
    cr = np.cos(np.asarray(eta) - np.asarray(phi))
    return a * b * np.cos(phi) - b * c * cr, a * c * np.cos(eta) + b * c * cr


def determinant_scale(l: ArmLinkage) -> float:
    a, b, c = l.lengths
    return (b / (a * c)) ** 2


# --------------------------------------------------------------------------
# critical set


@dataclass(frozen=True)
class TorusCurve:
    """Closed polyline on the torus; angles in ``[0, 2pi)``."""

    phi: np.ndarray = field(repr=False)
    eta: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.phi)

    @property
    def points(self) -> list[TorusPoint]:
        return [TorusPoint(float(x), float(y)) for x, y in zip(self.phi, self.eta)]

    @property
    def xy(self) -> np.ndarray:
        return np.column_stack([self.phi, self.eta])


def _project_to_fold(l: ArmLinkage, phi: np.ndarray, eta: np.ndarray, steps: int = 4):
    for _ in range(steps):
        j = jacobian_values(l, phi, eta)
        gp, ge = jacobian_gradient(l, phi, eta)
        g2 = gp * gp + ge * ge
        phi = phi - j * gp / g2
        eta = eta - j * ge / g2
    return np.mod(phi, TWO_PI), np.mod(eta, TWO_PI)


_ALIGNED = tuple(TorusPoint(x, y) for x in (0.0, math.pi) for y in (0.0, math.pi))


def critical_set(l: ArmLinkage, n: int = 512) -> list[TorusCurve]:
    """Zero set of the Jacobian (the fold curves) as closed torus polylines.

    Marching squares on an ``n x n`` cell-centred grid, then each vertex is
    pushed onto the exact zero set by a few Newton steps along the gradient.
    The nearest vertex to each aligned corner (where J vanishes exactly) is
    snapped onto that corner.
    """
    check_generic(l)
    g = torus_grid(n)
    P, E = np.meshgrid(g, g, indexing="ij")
    curves = []
    for idx in zero_contours(jacobian_values(l, P, E)):
        phi = index_to_angle(idx[:, 0], n)
        eta = index_to_angle(idx[:, 1], n)
        phi, eta = _project_to_fold(l, phi, eta)
        curves.append(TorusCurve(phi, eta))
    step = TWO_PI / n
    for p in _ALIGNED:
        best = None
        for c in curves:
            d = np.hypot(*((c.xy - [p.phi, p.eta] + math.pi) % TWO_PI - math.pi).T)
            k = int(np.argmin(d))
            if d[k] < 2 * step and (best is None or d[k] < best[0]):
                best = (d[k], c, k)
        if best is not None:
            best[1].phi[best[2]], best[1].eta[best[2]] = p.phi, p.eta
    return curves


def fold_image(l: ArmLinkage, n: int = 512) -> list[np.ndarray]:
    """``1/R`` along each fold curve."""
    return [r_inverse_values(l, c.phi, c.eta) for c in critical_set(l, n)]


def fold_transversality(l: ArmLinkage, phi, eta) -> np.ndarray:
    """``|grad J . k| / |grad J|`` with ``k`` the unit kernel of d(1/R).

    Positive everywhere on the critical set exactly when every critical point
    is a fold; a zero would be a cusp (kernel tangent to the critical curve).
    """
    d_phi, d_eta = r_inverse_partials(l, phi, eta)
    m = np.stack(
        [np.stack([d_phi.real, d_eta.real], -1), np.stack([d_phi.imag, d_eta.imag], -1)], -2
    )
    _, _, vt = np.linalg.svd(m)
    kern = vt[..., -1, :]
    gp, ge = jacobian_gradient(l, phi, eta)
    return np.abs(gp * kern[..., 0] + ge * kern[..., 1]) / np.hypot(gp, ge)


# --------------------------------------------------------------------------
# 2-jets at the aligned configurations


@dataclass(frozen=True)
class Jet2:
    """2-jet of ``f = S e^{i(phi - eta)}`` (``1/R`` up to the factor ``-b/ac``).

    ``f(p0 + x) ~ value + linear . x + x^T quadratic x / 2`` with complex
    coefficients, ``x = (phi - phi0, eta - eta0)``.
    """

    point: TorusPoint
    value: complex
    linear: tuple[complex, complex]
    quadratic: tuple[tuple[complex, complex], tuple[complex, complex]]
    kernel: tuple[float, float]
    transverse_second: float
    verdict: str


def _corner_signs(p: TorusPoint) -> tuple[int, int, int]:
    def sgn(x):
        return 1 if round(math.cos(x)) > 0 else -1

    # e^{i(phi-eta)}, e^{i(2phi-eta)}, e^{i phi} at a corner are all +-1
    return sgn(p.phi - p.eta), sgn(2 * p.phi - p.eta), sgn(p.phi)


def jet2_at_aligned(l: ArmLinkage, p: TorusPoint, tol: float = 1e-12) -> Jet2:
    """Fold test from the 2-jet at an aligned configuration (angles in {0, pi}).

    ``f = a e^{i(phi-eta)} + b e^{i(2phi-eta)} + c e^{i phi}`` has a purely
    imaginary linear part there, so the fold condition is that the real
    quadratic part is nonzero on the kernel of the linear part.
    """
    for x in (p.phi, p.eta):
        if min(abs(wrap_angle(x)), abs(wrap_angle(x) - math.pi), abs(wrap_angle(x) - TWO_PI)) > 1e-12:
            raise ValueError(f"{p} is not an aligned configuration")
    a, b, c = l.lengths
    s1, s2, s3 = _corner_signs(p)
    value = complex(a * s1 + b * s2 + c * s3)
    lin_phi = 1j * (a * s1 + 2 * b * s2 + c * s3)
    lin_eta = -1j * (a * s1 + b * s2)
    # second derivatives of the exponentials: -(coefficient of the exponent)^2
    h_pp = -(a * s1 + 4 * b * s2 + c * s3)
    h_pe = a * s1 + 2 * b * s2
    h_ee = -(a * s1 + b * s2)
    quad = ((complex(h_pp), complex(h_pe)), (complex(h_pe), complex(h_ee)))
    lp, le = lin_phi.imag, lin_eta.imag
    if lp == 0 and le == 0:
        return Jet2(p, value, (lin_phi, lin_eta), quad, (0.0, 0.0), 0.0, "rank0")
    kern = np.array([-le, lp]) / math.hypot(lp, le)
    second = float(h_pp * kern[0] ** 2 + 2 * h_pe * kern[0] * kern[1] + h_ee * kern[1] ** 2)
    scale = a + b + c
    verdict = "fold" if abs(second) > tol * scale else "degenerate"
    return Jet2(p, value, (lin_phi, lin_eta), quad, (float(kern[0]), float(kern[1])), second, verdict)


ALIGNED_POINTS = _ALIGNED


# --------------------------------------------------------------------------
# t-slices and Morse data


@dataclass(frozen=True)
class TSlice:
    """Image of the configurations with end-to-end distance ``t`` (chart at infinity)."""

    t: float
    kind: str  # "arc", "circle" or "point"
    arc: CircleArc | None
    points: tuple[complex, ...] = ()
    report: DegenerateReport | None = None
    components: int = 1


def _triangle_points(l: ArmLinkage) -> tuple[TorusPoint, TorusPoint]:
    a, b, c = l.lengths
    # triangle with sides a, b, c closing at v1: angle of the b-side from the law of cosines
    cos_ext = (c * c - a * a - b * b) / (2 * a * b)
    phi = math.acos(max(-1.0, min(1.0, cos_ext)))
    v3 = a + b * cmath.exp(1j * phi)
    eta = wrap_angle(cmath.phase(-v3))
    p = TorusPoint(phi, eta)
    return p, p.conjugate()


def t_slice(l: ArmLinkage, t) -> TSlice:
    a, b, c = l.lengths
    tf = float(t)
    if tf < l.t_min - 1e-15 or tf > l.t_max + 1e-15:
        raise ValueError(f"t = {tf} outside [{l.t_min}, {l.t_max}]")
    if tf == 0.0:
        tri = _triangle_points(l)
        return TSlice(0.0, "point", None, tuple(r_inverse(l, p) for p in tri), None, 2)
    q = l.quad(t)
    scale = b * tf / (a * c)
    if not is_nondegenerate(q):
        report = degenerate_image_report(q, 128)
        if report.image == "point":
            val = report.circles[0].point
            return TSlice(tf, "point", None, (1.0 / val,), report, 1)
        return TSlice(tf, "circle", CircleArc(0j, scale, 0.0, TWO_PI), (), report, 1)
    arc = r_image(q)
    comps = 1 if is_connected(q) else 2
    # w -> 1/w reflects arguments; the arc is conjugation-symmetric so the interval is unchanged
    inv = CircleArc(0j, scale, TWO_PI - arc.arg_hi, TWO_PI - arc.arg_lo)
    return TSlice(tf, "circle" if inv.is_full else "arc", inv, (), None, comps)


def morse_t_values(l: ArmLinkage) -> list[float]:
    check_generic(l)
    vals = {float(s) for s in aligned_sums(l)}
    if l.case_tag is CaseTag.CONTAINS_TRIANGLE:
        vals.add(0.0)
    return sorted(vals)


@dataclass(frozen=True)
class MorsePoint:
    t: float
    point: TorusPoint
    index: int

    @property
    def kind(self) -> str:
        return ("minimum", "saddle", "maximum")[self.index]


def morse_points(l: ArmLinkage) -> list[MorsePoint]:
    """Critical points of the end-to-end distance with their Morse indices (via ``t^2``)."""
    check_generic(l)
    a, b, c = l.lengths
    out = []
    for p in ALIGNED_POINTS:
        cr = math.cos(p.eta - p.phi)
        hpp = -2 * a * b * math.cos(p.phi) - 2 * b * c * cr
        hee = -2 * a * c * math.cos(p.eta) - 2 * b * c * cr
        hpe = 2 * b * c * cr
        eig = np.linalg.eigvalsh(np.array([[hpp, hpe], [hpe, hee]]))
        out.append(MorsePoint(float(end_distance(l, p.phi, p.eta)), p, int(np.sum(eig < 0))))
    if l.case_tag is CaseTag.CONTAINS_TRIANGLE:
        out.extend(MorsePoint(0.0, p, 0) for p in _triangle_points(l))
    return sorted(out, key=lambda m: (m.t, m.point.phi, m.point.eta))


def level_set_components(l: ArmLinkage, t: float, n: int = 256) -> int:
    """Number of closed curves in ``{end_distance = t}`` found by grid contouring."""
    g = torus_grid(n)
    P, E = np.meshgrid(g, g, indexing="ij")
    vals = end_distance(l, P, E) ** 2 - t * t
    return len(zero_contours(vals))


# --------------------------------------------------------------------------
# annulus


@dataclass(frozen=True)
class AnnulusImage:
    outer_boundary: np.ndarray = field(repr=False)
    inner_boundary: np.ndarray = field(repr=False)
    fold_curves: list[TorusCurve] = field(repr=False)
    morse_t_values: list[float]
    morse_points: list[MorsePoint]
    frames: list[TSlice] = field(repr=False)
    interval_components: list[tuple[float, float, int]]
    inner_encloses_origin: bool = True


def frame_t_values(l: ArmLinkage, frames: int) -> list[float]:
    """Morse values and the midpoints between them, then the widest gaps are bisected up to ``frames``."""
    morse = morse_t_values(l)
    knots = sorted(set(morse) | {l.t_min, l.t_max})
    ts = sorted(set(knots) | {0.5 * (x + y) for x, y in zip(knots, knots[1:])})
    while len(ts) < frames:
        k = max(range(len(ts) - 1), key=lambda i: (ts[i + 1] - ts[i], -i))
        ts.insert(k + 1, 0.5 * (ts[k] + ts[k + 1]))
    return ts


def annulus_image(l: ArmLinkage, frames: int = 24, n: int = 512) -> AnnulusImage:
    check_generic(l)
    curves = critical_set(l, n)
    images = [r_inverse_values(l, c.phi, c.eta) for c in curves]
    # boundary pieces: the image curve reaching furthest out bounds the annulus outside
    order = sorted(range(len(images)), key=lambda k: float(np.max(np.abs(images[k]))), reverse=True)
    outer = images[order[0]]
    inner = images[order[1]] if len(order) > 1 else np.array([], dtype=complex)
    morse = morse_t_values(l)
    knots = sorted(set(morse) | {l.t_min, l.t_max})
    intervals = []
    for x, y in zip(knots, knots[1:]):
        q = l.quad(0.5 * (x + y))
        intervals.append((x, y, 1 if is_connected(q) else 2))
    slices = [t_slice(l, t) for t in frame_t_values(l, frames)]
    encloses = bool(len(inner)) and abs(_winding(inner)) > 0.5
    return AnnulusImage(outer, inner, curves, morse, morse_points(l), slices, intervals, encloses)


def _winding(curve: np.ndarray) -> float:
    ang = np.angle(curve)
    d = np.roll(ang, -1) - ang
    return float(np.sum((d + np.pi) % TWO_PI - np.pi) / TWO_PI)


# --------------------------------------------------------------------------
# preimages


def _newton(l: ArmLinkage, w: complex, phi: np.ndarray, eta: np.ndarray, iters: int = 40):
    for _ in range(iters):
        f = r_inverse_values(l, phi, eta) - w
        d_phi, d_eta = r_inverse_partials(l, phi, eta)
        det = d_phi.real * d_eta.imag - d_eta.real * d_phi.imag
        det = np.where(np.abs(det) < 1e-300, 1e-300, det)
        step_phi = (d_eta.imag * f.real - d_eta.real * f.imag) / det
        step_eta = (-d_phi.imag * f.real + d_phi.real * f.imag) / det
        # damp wild steps from seeds near the critical set
        size = np.hypot(step_phi, step_eta)
        damp = np.minimum(1.0, 0.5 / np.maximum(size, 1e-300))
        phi = phi - damp * step_phi
        eta = eta - damp * step_eta
    return np.mod(phi, TWO_PI), np.mod(eta, TWO_PI)


def preimages(l: ArmLinkage, w: complex, n: int = 48, tol: float = 1e-10) -> list[TorusPoint]:
    """All torus points with ``1/R = w``, by damped Newton from an ``n x n`` seed grid."""
    if abs(w) > l.image_bound * (1 + 1e-9):
        return []
    g = torus_grid(n)
    P, E = np.meshgrid(g, g, indexing="ij")
    phi, eta = _newton(l, complex(w), P.ravel(), E.ravel())
    res = np.abs(r_inverse_values(l, phi, eta) - w)
    ok = res < tol * max(1.0, l.image_bound)
    found: list[TorusPoint] = []
    for x, y in zip(phi[ok], eta[ok]):
        if all(_torus_dist((x, y), (p.phi, p.eta)) > 1e-6 for p in found):
            found.append(TorusPoint(float(x), float(y)))
    return sorted(found, key=lambda p: (p.phi, p.eta))


def _torus_dist(p, q) -> float:
    d = (np.asarray(p) - np.asarray(q) + np.pi) % TWO_PI - np.pi
    return float(np.hypot(*d))


def preimage_count(l: ArmLinkage, w: complex, n: int = 48, fold_tol: float = 1e-6) -> int:
    """Number of preimages of a regular value ``w``.

    Raises :class:`IndeterminateValue` when a preimage sits on the critical
    set, i.e. ``w`` is (numerically) a fold value.
    """
    check_generic(l)
    pts = preimages(l, w, n)
    a, b, c = l.lengths
    for p in pts:
        if abs(jacobian(l, p)) < fold_tol * (a * b + a * c + b * c):
            raise IndeterminateValue(f"w = {w} is within tolerance of the fold image")
    return len(pts)


def signed_preimage_count(l: ArmLinkage, w: complex, n: int = 48) -> int:
    """Local degree sum over the preimages of ``w``."""
    check_generic(l)
    return int(sum(np.sign(jacobian(l, p)) for p in preimages(l, w, n)))
