"""Extended-plane geometry for 4-vertex configurations.

Cross-ratio, the uniformizer ``R = [v1, v3; v2, v4]``, vertex angles and
signed area. Everything here is a pure function of its inputs.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Literal, Sequence

TWO_PI = 2.0 * math.pi

# |denominator| below DENOM_EPS * scale**2 is treated as a vanishing denominator
DENOM_EPS = 1e-12


class GeometryError(ValueError):
    """Input points do not define the requested quantity."""


@dataclass(frozen=True)
class ExtendedComplex:
    """A point of the Riemann sphere: finite complex value or infinity (``value is None``)."""

    value: complex | None = None

    @classmethod
    def infinity(cls) -> ExtendedComplex:
        return cls(None)

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    def __complex__(self) -> complex:
        if self.value is None:
            raise OverflowError("point at infinity has no finite value")
        return self.value

    def one_minus(self) -> ExtendedComplex:
        if self.value is None:
            return self
        return ExtendedComplex(1.0 - self.value)

    def reciprocal(self) -> ExtendedComplex:
        if self.value is None:
            return ExtendedComplex(0j)
        if self.value == 0:
            return ExtendedComplex.infinity()
        return ExtendedComplex(1.0 / self.value)

    def __repr__(self) -> str:
        return "ExtendedComplex(inf)" if self.value is None else f"ExtendedComplex({self.value!r})"


INFINITY = ExtendedComplex.infinity()


@dataclass(frozen=True)
class PlanarConfig:
    """Four ordered vertices in the plane (as complex numbers)."""

    v1: complex
    v2: complex
    v3: complex
    v4: complex
    kind: Literal["closed", "open"] = "closed"

    @property
    def vertices(self) -> tuple[complex, complex, complex, complex]:
        return (self.v1, self.v2, self.v3, self.v4)

    @property
    def scale(self) -> float:
        vs = self.vertices
        return max(abs(p - q) for p, q in combinations(vs, 2))

    def side_lengths(self) -> tuple[float, float, float, float]:
        v1, v2, v3, v4 = self.vertices
        return (abs(v2 - v1), abs(v3 - v2), abs(v4 - v3), abs(v1 - v4))

    def conjugate(self) -> PlanarConfig:
        return PlanarConfig(*(v.conjugate() for v in self.vertices), kind=self.kind)

    def canonical(self) -> PlanarConfig:
        """Representative with ``v1 = 0`` and ``v2`` on the positive real axis."""
        v1, v2 = self.v1, self.v2
        if v2 == v1:
            raise GeometryError("v1 and v2 coincide; no canonical rotation")
        rot = abs(v2 - v1) / (v2 - v1)
        return PlanarConfig(*((v - v1) * rot for v in self.vertices), kind=self.kind)

    def validate(self, eps: float = DENOM_EPS) -> None:
        _check_no_triple(self.vertices, eps)


def _check_no_triple(points: Sequence[complex], eps: float) -> None:
    scale = max((abs(p - q) for p, q in combinations(points, 2)), default=0.0)
    tol = eps * max(scale, 1.0)
    for trio in combinations(points, 3):
        if all(abs(p - q) <= tol for p, q in combinations(trio, 2)):
            raise GeometryError("three of the four points coincide")


def cross_ratio(p: complex, q: complex, z: complex, w: complex, eps: float = DENOM_EPS) -> ExtendedComplex:
    """``[p, q; z, w] = ((z - p)/(z - q)) / ((w - p)/(w - q))``.

    Coinciding pairs give 0, 1 or infinity. Three coinciding points raise
    :class:`GeometryError`.
    """
    pts = (complex(p), complex(q), complex(z), complex(w))
    _check_no_triple(pts, eps)
    p, q, z, w = pts
    scale = max(abs(s - t) for s, t in combinations(pts, 2))
    num = (z - p) * (w - q)
    den = (z - q) * (w - p)
    if abs(den) <= eps * scale * scale:
        return INFINITY
    return ExtendedComplex(num / den)


def config_cross_ratio(V: PlanarConfig) -> ExtendedComplex:
    return cross_ratio(V.v1, V.v2, V.v3, V.v4)


def uniformizer(V: PlanarConfig) -> ExtendedComplex:
    """``R(V) = [v1, v3; v2, v4]``; satisfies ``Cr(V) = 1 - R(V)``."""
    return cross_ratio(V.v1, V.v3, V.v2, V.v4)


@dataclass(frozen=True)
class AnglePair:
    alpha: float
    gamma: float


def wrap_angle(x: float) -> float:
    """Reduce to ``[0, 2*pi)``."""
    r = math.fmod(x, TWO_PI)
    if r < 0:
        r += TWO_PI
    return 0.0 if r >= TWO_PI else r


def angles(V: PlanarConfig) -> AnglePair:
    """Angles at ``v2`` and ``v4``: ``arg((v3-v2)/(v1-v2))`` and ``arg((v1-v4)/(v3-v4))``.

    Note the orientation: a counterclockwise convex quadrilateral has both
    angles in ``(pi, 2*pi)``.
    """
    v1, v2, v3, v4 = V.vertices
    if v1 == v2 or v2 == v3 or v3 == v4 or v4 == v1:
        raise GeometryError("adjacent vertices coincide")
    alpha = wrap_angle(cmath.phase((v3 - v2) / (v1 - v2)))
    gamma = wrap_angle(cmath.phase((v1 - v4) / (v3 - v4)))
    return AnglePair(alpha, gamma)


def signed_area(V: PlanarConfig) -> float:
    """Shoelace area of the closed vertex cycle v1 -> v2 -> v3 -> v4 -> v1."""
    vs = V.vertices
    total = 0.0
    for k in range(4):
        p, q = vs[k], vs[(k + 1) % 4]
        total += p.real * q.imag - q.real * p.imag
    return 0.5 * total
