"""Closed quadrilateral linkages: moduli space, cross-ratio image, folds, degree.

A configuration of ``Q(a, b, c, d)`` is described by the angles ``alpha`` at
``v2`` and ``gamma`` at ``v4``, tied together by the diagonal constraint::

    g(alpha, gamma) = a^2 + b^2 - 2ab cos(alpha) - c^2 - d^2 + 2cd cos(gamma) = 0

On the moduli space the uniformizer has modulus ``ac/bd`` and argument
``-(alpha + gamma)``, so the whole image question is about the function
``alpha + gamma`` restricted to this curve.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .geom import (
    TWO_PI,
    PlanarConfig,
    config_cross_ratio,
    uniformizer,
    wrap_angle,
)

# |C / sqrt(A^2 + B^2)| this close to 1 counts as a tangent (single) fiber solution
TANGENCY_TOL = 1e-10
# constraint residual accepted when completing a fiber solution or embedding
RESIDUAL_TOL = 1e-9


class LinkageError(ValueError):
    """Side lengths do not define a linkage (non-positive or no planar realization)."""


class DegenerateLinkageError(ValueError):
    """Operation requires a non-degenerate linkage (all sums a±b±c±d nonzero)."""


def exact(x) -> Fraction:
    """Exact rational value of a length as written (floats via their shortest repr)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("boolean is not a length")
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, (float, np.floating)):
        if not math.isfinite(x):
            raise LinkageError(f"non-finite length {x!r}")
        return Fraction(repr(float(x)))
    return Fraction(str(x).strip())


def parse_lengths(text: str, count: int) -> tuple[Fraction, ...]:
    parts = [p for p in text.replace(" ", "").split(",") if p]
    if len(parts) != count:
        raise LinkageError(f"expected {count} comma-separated lengths, got {len(parts)}")
    try:
        return tuple(exact(p) for p in parts)
    except (ValueError, ZeroDivisionError) as exc:
        raise LinkageError(f"cannot parse lengths {text!r}: {exc}") from None


@dataclass(frozen=True)
class QuadLinkage:
    """Closed 4-bar linkage with sides ``|v2-v1|=a, |v3-v2|=b, |v4-v3|=c, |v1-v4|=d``."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        ex = self.exact
        if min(ex) <= 0:
            raise LinkageError(f"side lengths must be positive, got {self.lengths}")
        total = sum(ex)
        if 2 * max(ex) > total:
            raise LinkageError(
                f"no planar realization: longest side {float(max(ex))} exceeds the sum of the others"
            )

    @classmethod
    def parse(cls, text: str) -> QuadLinkage:
        return cls(*parse_lengths(text, 4))

    @property
    def exact(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return tuple(exact(x) for x in (self.a, self.b, self.c, self.d))  # type: ignore[return-value]

    @property
    def lengths(self) -> tuple[float, float, float, float]:
        return (float(self.a), float(self.b), float(self.c), float(self.d))

    @property
    def radius(self) -> float:
        """Modulus of the uniformizer on every configuration."""
        a, b, c, d = self.lengths
        return a * c / (b * d)

    def relabel(self, shift: int) -> QuadLinkage:
        """Cyclically relabel so that side ``shift`` becomes ``a``."""
        s = (self.a, self.b, self.c, self.d)
        return QuadLinkage(*(s[(k + shift) % 4] for k in range(4)))


@dataclass(frozen=True)
class GrashofSigns:
    p1: float
    p2: float
    p3: float
    s: float
    long_aligned: float

    @property
    def product(self) -> float:
        return self.p1 * self.p2 * self.p3


def _exact_signs(l: QuadLinkage) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    a, b, c, d = l.exact
    return (a + b - c - d, a - b + c - d, a - b - c + d, a + b + c + d)


def grashof_signs(l: QuadLinkage) -> GrashofSigns:
    p1, p2, p3, s = _exact_signs(l)
    long_aligned = min(abs(2 * x - s) for x in l.exact)
    return GrashofSigns(float(p1), float(p2), float(p3), float(s), float(long_aligned))


def is_nondegenerate(l: QuadLinkage) -> bool:
    a, b, c, d = l.exact
    return all(
        a + sb * b + sc * c + sd * d != 0
        for sb in (1, -1)
        for sc in (1, -1)
        for sd in (1, -1)
    )


def _require_nondegenerate(l: QuadLinkage) -> None:
    if not is_nondegenerate(l):
        raise DegenerateLinkageError(f"linkage {l.lengths} is degenerate (some a±b±c±d = 0)")


def _exact_product(l: QuadLinkage) -> Fraction:
    p1, p2, p3, _ = _exact_signs(l)
    return p1 * p2 * p3


def is_surjective(l: QuadLinkage) -> bool:
    """Uniformizer (equivalently cross-ratio) covers its whole circle."""
    _require_nondegenerate(l)
    return _exact_product(l) < 0


def is_connected(l: QuadLinkage) -> bool:
    return _exact_product(l) >= 0


class ModuliTopology(str, enum.Enum):
    CIRCLE = "Circle"
    TWO_CIRCLES = "TwoCircles"
    BOUQUET_TWO_CIRCLES = "BouquetTwoCircles"
    TWO_CIRCLES_TWO_POINTS = "TwoCirclesTwoPoints"
    THREE_CIRCLES_CHAIN = "ThreeCirclesChain"
    SINGLE_POINT = "SinglePoint"


def is_long_aligned(l: QuadLinkage) -> bool:
    ex = l.exact
    return 2 * max(ex) == sum(ex)


def is_rhomboid(l: QuadLinkage) -> bool:
    a, b, c, d = l.exact
    return a == b == c == d


def kite_shift(l: QuadLinkage) -> int | None:
    """0 for ``a=b, c=d``, 1 for ``b=c, d=a``, None if not a kite (rhomboid excluded)."""
    if is_rhomboid(l):
        return None
    a, b, c, d = l.exact
    if a == b and c == d:
        return 0
    if b == c and d == a:
        return 1
    return None


def is_parallelogram(l: QuadLinkage) -> bool:
    a, b, c, d = l.exact
    return a == c and b == d and not is_rhomboid(l)


def classify_topology(l: QuadLinkage) -> ModuliTopology:
    if is_long_aligned(l):
        return ModuliTopology.SINGLE_POINT
    if is_rhomboid(l):
        return ModuliTopology.THREE_CIRCLES_CHAIN
    if kite_shift(l) is not None or is_parallelogram(l):
        return ModuliTopology.TWO_CIRCLES_TWO_POINTS
    prod = _exact_product(l)
    if prod == 0:
        return ModuliTopology.BOUQUET_TWO_CIRCLES
    return ModuliTopology.TWO_CIRCLES if prod < 0 else ModuliTopology.CIRCLE


# --------------------------------------------------------------------------
# the constraint curve g(alpha, gamma) = 0


def g_residual(l: QuadLinkage, alpha, gamma):
    a, b, c, d = l.lengths
    return a * a + b * b - 2 * a * b * np.cos(alpha) - c * c - d * d + 2 * c * d * np.cos(gamma)


def _cos_gamma(l: QuadLinkage, alpha):
    a, b, c, d = l.lengths
    return (c * c + d * d - a * a - b * b + 2 * a * b * np.cos(alpha)) / (2 * c * d)


def gamma_branches(l: QuadLinkage, alpha: float) -> list[float]:
    """All ``gamma`` in ``[0, 2pi)`` completing ``alpha`` to a configuration."""
    h = float(_cos_gamma(l, alpha))
    if abs(h) > 1.0 + 1e-12:
        return []
    h = min(1.0, max(-1.0, h))
    g = math.acos(h)
    if g == 0.0 or g == math.pi or abs(abs(h) - 1.0) <= 1e-15:
        return [wrap_angle(g)]
    return [g, TWO_PI - g]


def embed_config(l: QuadLinkage, alpha: float, gamma: float, tol: float = RESIDUAL_TOL) -> PlanarConfig:
    """Canonical realization (``v1 = 0``, ``v2 = a``) with the given vertex angles."""
    a, b, c, d = l.lengths
    scale = max(a, b, c, d)
    res = float(g_residual(l, alpha, gamma))
    if abs(res) > tol * scale * scale:
        raise ValueError(f"(alpha, gamma) = ({alpha}, {gamma}) is not on the moduli space (g = {res:.3e})")
    v1 = 0j
    v2 = complex(a, 0.0)
    v3 = v2 + b * cmath.exp(1j * (math.pi + alpha))
    # (v1 - v4) = rho (v3 - v4) encodes |v1-v4|/|v3-v4| = d/c and the angle gamma at v4
    rho = (d / c) * cmath.exp(1j * gamma)
    if abs(1 - rho) < 1e-14:
        raise ValueError("v1 and v3 coincide; the angle gamma does not determine v4")
    v4 = (v1 - rho * v3) / (1 - rho)
    return PlanarConfig(v1, v2, v3, v4, kind="closed")


@dataclass(frozen=True)
class ModuliPoint:
    alpha: float
    gamma: float
    branch: int
    component: int = 0


@dataclass(frozen=True)
class _Arc:
    lo: float
    hi: float
    branch: int
    start: int | None  # node ids, None for a closed loop without nodes
    end: int | None


@dataclass(frozen=True)
class _ArcGraph:
    arcs: tuple[_Arc, ...]
    nodes: tuple[tuple[float, float], ...]


def _branch_gamma(l: QuadLinkage, alpha, branch: int):
    h = np.clip(_cos_gamma(l, alpha), -1.0, 1.0)
    g = np.arccos(h)
    return g if branch > 0 else np.mod(TWO_PI - g, TWO_PI)


@lru_cache(maxsize=256)
def _arc_graph(l: QuadLinkage) -> _ArcGraph:
    """Split the curve g = 0 into branch arcs over alpha-intervals joined at nodes.

    Nodes sit where cos(gamma) = +-1, i.e. where the two gamma branches meet.
    """
    a, b, c, d = l.exact
    u0 = (a * a + b * b - (c + d) ** 2) / (2 * a * b)  # cos(gamma) = -1
    u1 = (a * a + b * b - (c - d) ** 2) / (2 * a * b)  # cos(gamma) = +1
    breaks: list[tuple[float, float]] = []
    for u, gam in ((u1, 0.0), (u0, math.pi)):
        if u == 1:
            breaks.append((0.0, gam))
        elif u == -1:
            breaks.append((math.pi, gam))
        elif -1 < u < 1:
            t = math.acos(float(u))
            breaks.append((t, gam))
            breaks.append((TWO_PI - t, gam))
    breaks.sort()
    if not breaks:
        # gamma never reaches 0 or pi: each branch closes up around the alpha circle
        arcs = (_Arc(0.0, TWO_PI, 1, None, None), _Arc(0.0, TWO_PI, -1, None, None))
        return _ArcGraph(arcs, ())
    k = len(breaks)
    lo_u, hi_u = float(u0), float(u1)
    arcs = []
    for i in range(k):
        lo = breaks[i][0]
        hi = breaks[(i + 1) % k][0] + (TWO_PI if i + 1 >= k else 0.0)
        mid = math.cos(0.5 * (lo + hi))
        if lo_u < mid < hi_u:
            for br in (1, -1):
                arcs.append(_Arc(lo, hi, br, i, (i + 1) % k))
    return _ArcGraph(tuple(arcs), tuple(breaks))


def _node_degree(graph: _ArcGraph) -> dict[int, int]:
    deg: dict[int, int] = {}
    for arc in graph.arcs:
        for n in (arc.start, arc.end):
            if n is not None:
                deg[n] = deg.get(n, 0) + 1
    return deg


def _arc_groups(graph: _ArcGraph, cut_singular: bool = False) -> list[list[int]]:
    """Arc indices grouped by connectivity; nodes of degree > 2 are cut when asked."""
    deg = _node_degree(graph)
    parent = list(range(len(graph.arcs)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    by_node: dict[int, list[int]] = {}
    for idx, arc in enumerate(graph.arcs):
        for n in (arc.start, arc.end):
            if n is not None:
                by_node.setdefault(n, []).append(idx)
    for n, members in by_node.items():
        if cut_singular and deg[n] > 2:
            continue
        for m in members[1:]:
            parent[find(m)] = find(members[0])
    groups: dict[int, list[int]] = {}
    for idx in range(len(graph.arcs)):
        groups.setdefault(find(idx), []).append(idx)
    return sorted(groups.values(), key=lambda g: min(g))


def _arc_samples(l: QuadLinkage, arc: _Arc, m: int, forward: bool) -> tuple[np.ndarray, np.ndarray]:
    if arc.start is None:
        alpha = np.arange(m) * (TWO_PI / m)
    else:
        # cosine spacing: gamma behaves like a square root near the nodes
        s = np.linspace(0.0, 1.0, m)
        alpha = arc.lo + (arc.hi - arc.lo) * 0.5 * (1.0 - np.cos(np.pi * s))
    if not forward:
        alpha = alpha[::-1]
    gamma = _branch_gamma(l, alpha, arc.branch)
    return np.mod(alpha, TWO_PI), gamma


def _walk(graph: _ArcGraph, group: list[int]) -> list[tuple[int, bool]]:
    """Order the arcs of a group into a closed walk (arc index, traversed forward)."""
    first = graph.arcs[group[0]]
    if first.start is None:
        return [(group[0], True)]
    members = set(group)
    walk = [(group[0], True)]
    node = first.end
    current = group[0]
    start_node = first.start
    while True:
        nxt = None
        for idx in members:
            if idx == current:
                continue
            arc = graph.arcs[idx]
            if arc.start == node and (idx, True) not in walk:
                nxt = (idx, True)
                node = arc.end
                break
            if arc.end == node and (idx, False) not in walk:
                nxt = (idx, False)
                node = arc.start
                break
        if nxt is None:
            break
        walk.append(nxt)
        current = nxt[0]
        if node == start_node and len(walk) == len(members):
            break
    return walk


def _orient(l: QuadLinkage, alpha: np.ndarray, gamma: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Orient a closed loop along (-dg/dgamma, dg/dalpha), the boundary orientation of {g < 0}."""
    a, b, c, d = l.lengths
    da = _wrapped_diff(alpha)
    dg = _wrapped_diff(gamma)
    am = alpha + 0.5 * da
    gm = gamma + 0.5 * dg
    flux = np.sum(da * 2 * c * d * np.sin(gm) + dg * 2 * a * b * np.sin(am))
    if flux < 0:
        return alpha[::-1].copy(), gamma[::-1].copy()
    return alpha, gamma


def _wrapped_diff(x: np.ndarray) -> np.ndarray:
    """Successive differences around a closed loop, each reduced to (-pi, pi]."""
    d = np.roll(x, -1) - x
    return (d + np.pi) % TWO_PI - np.pi


@dataclass(frozen=True)
class ModuliComponent:
    """One connected component sampled as a closed, oriented loop in (alpha, gamma)."""

    index: int
    alpha: np.ndarray = field(repr=False)
    gamma: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.alpha)

    def __iter__(self) -> Iterator[ModuliPoint]:
        return iter(self.points)

    @property
    def branch(self) -> np.ndarray:
        return np.where(self.gamma <= math.pi, 1, -1)

    @property
    def points(self) -> list[ModuliPoint]:
        return [
            ModuliPoint(float(al), float(ga), int(br), self.index)
            for al, ga, br in zip(self.alpha, self.gamma, self.branch)
        ]

    def r_values(self, l: QuadLinkage) -> np.ndarray:
        return l.radius * np.exp(-1j * (self.alpha + self.gamma))


def _loop_from_group(l: QuadLinkage, graph: _ArcGraph, group: list[int], n: int) -> tuple[np.ndarray, np.ndarray]:
    alphas, gammas = [], []
    for idx, forward in _walk(graph, group):
        arc = graph.arcs[idx]
        al, ga = _arc_samples(l, arc, n, forward)
        if arc.start is not None:
            al, ga = al[:-1], ga[:-1]
        alphas.append(al)
        gammas.append(ga)
    return _orient(l, np.concatenate(alphas), np.concatenate(gammas))


def trace_moduli(l: QuadLinkage, n: int = 1024) -> list[ModuliComponent]:
    """Sample every component of the moduli space as a closed loop.

    ``n`` is the number of samples per branch arc.
    """
    _require_nondegenerate(l)
    if n < 16:
        raise ValueError("need at least 16 samples")
    graph = _arc_graph(l)
    comps = []
    for k, group in enumerate(_arc_groups(graph)):
        al, ga = _loop_from_group(l, graph, group, n)
        comps.append(ModuliComponent(k, al, ga))
    return comps


def component_of(l: QuadLinkage, alpha: float, gamma: float) -> int:
    """Label of the traced component containing the configuration (alpha, gamma)."""
    graph = _arc_graph(l)
    groups = _arc_groups(graph)
    label = {idx: k for k, grp in enumerate(groups) for idx in grp}
    branch = 1 if wrap_angle(gamma) <= math.pi else -1
    alpha = wrap_angle(alpha)
    best, best_dist = 0, math.inf
    for idx, arc in enumerate(graph.arcs):
        if arc.start is None:
            if arc.branch == branch:
                return label[idx]
            continue
        for shift in (0.0, TWO_PI):
            x = alpha + shift
            dist = max(arc.lo - x, x - arc.hi, 0.0)
            if arc.branch == branch and dist < best_dist:
                best, best_dist = label[idx], dist
    return best


# --------------------------------------------------------------------------
# image of the uniformizer


@dataclass(frozen=True)
class CircleArc:
    """Arc ``{center + radius * exp(i t) : arg_lo <= t <= arg_hi}``.

    ``arg_hi - arg_lo`` lies in ``[0, 2pi]``; a full circle is ``(0, 2pi)``.
    Arcs straddling the angle 0 use a negative ``arg_lo``.
    """

    center: complex
    radius: float
    arg_lo: float
    arg_hi: float
    conj_symmetric: bool = True

    @property
    def is_full(self) -> bool:
        return self.arg_hi - self.arg_lo >= TWO_PI - 1e-15

    @property
    def is_point(self) -> bool:
        return self.radius == 0.0 or self.arg_hi == self.arg_lo

    def contains_arg(self, t: float, tol: float = 0.0) -> bool:
        if self.is_full:
            return True
        x = (t - self.arg_lo) % TWO_PI
        span = self.arg_hi - self.arg_lo
        return x <= span + tol or x >= TWO_PI - tol

    def point(self, t: float) -> complex:
        return self.center + self.radius * cmath.exp(1j * t)

    def sample(self, m: int = 256) -> np.ndarray:
        t = np.linspace(self.arg_lo, self.arg_hi, m)
        return self.center + self.radius * np.exp(1j * t)

    def endpoints(self) -> tuple[complex, complex]:
        return self.point(self.arg_lo), self.point(self.arg_hi)


def f_tau(l: QuadLinkage, tau):
    """Discriminant of the fiber equation over ``arg R = tau``; its sign gives the fiber size."""
    a, b, c, d = l.lengths
    k = 4 * a * a * b * b + 4 * c * c * d * d - (a * a + b * b - c * c - d * d) ** 2
    return k - 8 * a * b * c * d * np.cos(tau)


def tau_star(l: QuadLinkage) -> float | None:
    """Lower end of the argument interval of the image, or None for a full circle."""
    a, b, c, d = l.lengths
    k = 4 * a * a * b * b + 4 * c * c * d * d - (a * a + b * b - c * c - d * d) ** 2
    ratio = k / (8 * a * b * c * d)
    if ratio >= 1.0:
        return None
    return math.acos(max(-1.0, ratio))


def r_image(l: QuadLinkage) -> CircleArc:
    _require_nondegenerate(l)
    if is_surjective(l):
        return CircleArc(0j, l.radius, 0.0, TWO_PI)
    ts = tau_star(l)
    assert ts is not None
    return CircleArc(0j, l.radius, ts, TWO_PI - ts)


def cr_image(l: QuadLinkage) -> CircleArc:
    """Image of ``w -> 1 - w`` applied to :func:`r_image`."""
    arc = r_image(l)
    if arc.is_full:
        return CircleArc(1 + 0j, arc.radius, 0.0, TWO_PI)
    return CircleArc(1 + 0j, arc.radius, arc.arg_lo - math.pi, arc.arg_hi - math.pi)


def fiber_coefficients(l: QuadLinkage, tau: float) -> tuple[float, float, float]:
    """(A, B, C) with ``A sin(gamma) + B cos(gamma) = C`` on the fiber ``arg R = tau``."""
    a, b, c, d = l.lengths
    A = 2 * a * b * math.sin(tau)
    B = -2 * a * b * math.cos(tau) + 2 * c * d
    C = c * c + d * d - a * a - b * b
    return A, B, C


def solve_tau_fiber(l: QuadLinkage, tau: float) -> list[ModuliPoint]:
    """All configurations with ``arg R = tau``, solved in closed form."""
    _require_nondegenerate(l)
    A, B, C = fiber_coefficients(l, tau)
    amp = math.hypot(A, B)
    if amp == 0.0:
        return []
    ratio = C / amp
    if abs(ratio) > 1.0 + TANGENCY_TOL:
        return []
    phase = math.atan2(A, B)
    if abs(ratio) >= 1.0 - TANGENCY_TOL:
        gammas = [phase + (0.0 if ratio > 0 else math.pi)]
    else:
        off = math.acos(ratio)
        gammas = [phase + off, phase - off]
    a, b, c, d = l.lengths
    scale2 = max(a, b, c, d) ** 2
    out = []
    for gam in gammas:
        gam = wrap_angle(gam)
        alpha = wrap_angle(-tau - gam)
        if abs(float(g_residual(l, alpha, gam))) > 1e-7 * scale2:
            continue
        branch = 1 if gam <= math.pi else -1
        out.append(ModuliPoint(alpha, gam, branch, component_of(l, alpha, gam)))
    return out


def cyclic_configurations(l: QuadLinkage) -> list[PlanarConfig]:
    """Configurations with concyclic vertices: the fibers over ``arg R`` in {0, pi}."""
    out = []
    for tau in (0.0, math.pi):
        for p in solve_tau_fiber(l, tau):
            V = embed_config(l, p.alpha, p.gamma)
            cr = complex(config_cross_ratio(V))
            if abs(cr.imag) > 1e-9 * max(1.0, abs(cr)):
                raise AssertionError(f"fiber point at tau={tau} is not cyclic (Im Cr = {cr.imag:.3e})")
            out.append(V)
    return out


# --------------------------------------------------------------------------
# critical points of arg R


@dataclass(frozen=True)
class FoldCertificate:
    point: ModuliPoint
    lambda_inv: float
    second_deriv: float

    @property
    def critical_value(self) -> float:
        """``arg R`` at the fold, in ``[0, 2pi)``."""
        return wrap_angle(-(self.point.alpha + self.point.gamma))


def critical_points(l: QuadLinkage) -> list[FoldCertificate]:
    """Critical points of ``arg R`` on the moduli space, each certified as a fold.

    Eliminating gamma from ``ab sin(alpha) + cd sin(gamma) = 0`` and the
    constraint leaves an equation linear in ``cos(alpha)``.
    """
    _require_nondegenerate(l)
    a, b, c, d = l.lengths
    p, q = a * b, c * d
    k0 = c * c + d * d - a * a - b * b
    if k0 == 0.0:
        return []
    x = (4 * q * q - 4 * p * p - k0 * k0) / (4 * p * k0)
    if not -1.0 < x < 1.0:
        return []
    base = math.acos(x)
    certs = []
    for alpha in (base, TWO_PI - base):
        sin_g = -(p / q) * math.sin(alpha)
        cos_g = float(_cos_gamma(l, alpha))
        gamma = wrap_angle(math.atan2(sin_g, cos_g))
        lam_inv = 2 * p * math.sin(alpha)
        second = -2 * p * math.sin(alpha) * (2 * p * math.cos(alpha) - 2 * q * math.cos(gamma))
        branch = 1 if gamma <= math.pi else -1
        pt = ModuliPoint(alpha, gamma, branch, component_of(l, alpha, gamma))
        certs.append(FoldCertificate(pt, lam_inv, second))
    return certs


def winding_number(args: np.ndarray) -> float:
    """Total turning of a closed loop of angles, in units of full turns."""
    return float(np.sum(_wrapped_diff(np.asarray(args, dtype=float))) / TWO_PI)


def mapping_degree(l: QuadLinkage, n: int = 1024) -> tuple[list[int], int]:
    """Degree of R on each oriented component, and in total."""
    per = []
    for comp in trace_moduli(l, n):
        w = winding_number(-(comp.alpha + comp.gamma))
        deg = round(w)
        if abs(w - deg) > 0.1:
            raise ArithmeticError(f"winding {w} is not close to an integer; increase n")
        per.append(int(deg))
    return per, sum(per)


# --------------------------------------------------------------------------
# degenerate linkages


def _aligned_config(l: QuadLinkage) -> PlanarConfig:
    """The unique configuration of a long-aligned linkage (all vertices collinear)."""
    sides = l.lengths
    longest = max(range(4), key=lambda k: sides[k])
    steps = [s if k == longest else -s for k, s in enumerate(sides)]
    if steps[0] < 0:
        steps = [-s for s in steps]
    pts = [0j]
    for s in steps[:3]:
        pts.append(pts[-1] + s)
    return PlanarConfig(*pts, kind="closed")


def _kite_loops(a: float, c: float, m: int) -> dict[str, list[PlanarConfig]]:
    """Components of the kite ``(a, a, c, c)`` with ``a != c``."""
    theta = np.arange(m) * (TWO_PI / m)
    folded = [PlanarConfig(0j, complex(a), 0j, c * cmath.exp(1j * t)) for t in theta]
    small = min(a, c)
    kites = []
    for t in theta:
        # symmetry axis on the real line, v1 and v3 mirrored across it
        y = small * math.sin(t)
        if a <= c:
            v2 = complex(a * math.cos(t))
            v4 = complex(math.sqrt(c * c - y * y))
        else:
            v2 = complex(math.sqrt(a * a - y * y))
            v4 = complex(c * math.cos(t))
        V = PlanarConfig(complex(0, y), v2, complex(0, -y), v4)
        kites.append(V.canonical())
    return {"kites": kites, "folded_13": folded}


def degenerate_components(l: QuadLinkage, m: int = 256) -> dict[str, list[PlanarConfig]]:
    """Sampled circles of a degenerate moduli space, each as an ordered closed loop."""
    if is_nondegenerate(l):
        raise ValueError("linkage is non-degenerate")
    a, b, c, d = l.lengths
    theta = np.arange(m) * (TWO_PI / m)
    if is_long_aligned(l):
        return {"point": [_aligned_config(l)]}
    if is_rhomboid(l):
        s = a
        return {
            "rhombi": [PlanarConfig(0j, complex(s), s + s * cmath.exp(1j * t), s * cmath.exp(1j * t)) for t in theta],
            "folded_13": [PlanarConfig(0j, complex(s), 0j, s * cmath.exp(1j * t)) for t in theta],
            "folded_24": [PlanarConfig(0j, complex(s), s + s * cmath.exp(1j * t), complex(s)) for t in theta],
        }
    shift = kite_shift(l)
    if shift == 0:
        return _kite_loops(a, c, m)
    if shift == 1:
        # build for the relabeled kite (b, c, d, a) = (b, b, a, a), then rotate labels back
        loops = _kite_loops(b, d, m)
        out = {}
        for name, configs in loops.items():
            name = "folded_24" if name == "folded_13" else name
            out[name] = [PlanarConfig(W.v4, W.v1, W.v2, W.v3).canonical() for W in configs]
        return out
    if is_parallelogram(l):
        return {
            "parallelograms": [
                PlanarConfig(0j, complex(a), a + b * cmath.exp(1j * t), b * cmath.exp(1j * t)) for t in theta
            ],
            "counter_parallelograms": [embed_config(l, float(t), wrap_angle(-t)) for t in theta],
        }
    # short aligned: cut the curve g = 0 at its singular node
    graph = _arc_graph(l)
    out = {}
    for k, group in enumerate(_arc_groups(graph, cut_singular=True)):
        al, ga = _loop_from_group(l, graph, group, m)
        out[f"circle_{k + 1}"] = [embed_config(l, float(x), float(y)) for x, y in zip(al, ga)]
    return out


@dataclass(frozen=True)
class CircleBehaviour:
    """How R acts on one circle of a degenerate moduli space."""

    name: str
    kind: str  # "cover" or "collapse"
    sheets: int  # preimages of a generic image point; 0 for a collapse
    degree: int
    point: complex | None = None  # image point of a collapsed circle


@dataclass(frozen=True)
class DegenerateReport:
    case: str
    topology: ModuliTopology
    radius: float
    image: str  # "point" or "circle"
    circles: tuple[CircleBehaviour, ...]
    wedge_value: complex | None = None
    classifier_decided: bool = False


def _sheet_count(args: np.ndarray, probes: Sequence[float]) -> int:
    """Minimum over probe angles of the number of times a closed loop of angles crosses them."""
    counts = []
    for p in probes:
        rel = (np.asarray(args) - p + math.pi) % TWO_PI - math.pi
        nxt = np.roll(rel, -1)
        crossings = np.sum((np.sign(rel) != np.sign(nxt)) & (np.abs(nxt - rel) < math.pi))
        counts.append(int(crossings))
    return min(counts)


def _circle_behaviour(name: str, configs: list[PlanarConfig], radius: float) -> CircleBehaviour:
    r = np.array([complex(uniformizer(V)) for V in configs])
    spread = float(np.max(np.abs(r - r[0])))
    if spread <= 1e-9 * max(radius, 1.0):
        return CircleBehaviour(name, "collapse", 0, 0, complex(r[0]))
    args = np.angle(r)
    probes = [0.37 + k * TWO_PI / 7 for k in range(7)]
    deg = round(winding_number(args))
    return CircleBehaviour(name, "cover", _sheet_count(args, probes), int(deg), None)


def degenerate_image_report(l: QuadLinkage, m: int = 512) -> DegenerateReport:
    """What R does on each circle of a degenerate moduli space, measured on samples."""
    if is_nondegenerate(l):
        raise ValueError("degenerate_image_report expects a degenerate linkage")
    topo = classify_topology(l)
    radius = l.radius
    comps = degenerate_components(l, m)
    if topo is ModuliTopology.SINGLE_POINT:
        V = comps["point"][0]
        val = complex(uniformizer(V))
        circ = (CircleBehaviour("point", "collapse", 0, 0, val),)
        return DegenerateReport("long_aligned", topo, radius, "point", circ)
    circles = tuple(_circle_behaviour(name, cfgs, radius) for name, cfgs in comps.items())
    if topo is ModuliTopology.THREE_CIRCLES_CHAIN:
        case = "rhomboid"
    elif kite_shift(l) is not None:
        case = "kite"
    elif is_parallelogram(l):
        case = "parallelogram"
    else:
        case = "short_aligned"
    wedge = None
    if case == "short_aligned":
        graph = _arc_graph(l)
        deg = _node_degree(graph)
        node = next(n for n, k in deg.items() if k > 2)
        wedge = complex(uniformizer(embed_config(l, *graph.nodes[node])))
    return DegenerateReport(case, topo, radius, "circle", circles, wedge, classifier_decided=case == "short_aligned")
