"""Geometry of the Teichmüller space of the torus.

A marked flat torus is a point ``tau`` of the upper half-plane (lattice
``Z + tau Z``).  Measured foliations are points ``[x, y]`` of ``R^2 / {±1}``
and the boundary circle is parametrized by ``t = -x / y`` with ``t = inf``
for horizontal foliations.

Moduli are plain Python ``complex`` numbers; boundary points are floats with
``math.inf`` as the single point at infinity (``-inf`` is normalized to it).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

INF = math.inf
CANONICAL_TOL = 1e-12


def check_modulus(tau) -> complex:
    """Return ``tau`` as a complex number, raising if it is not in the upper half-plane."""
    tau = complex(tau)
    if not tau.imag > 0 or not math.isfinite(tau.real) or not math.isfinite(tau.imag):
        raise ValueError(f"modulus must lie in the upper half-plane, got {tau!r}")
    return tau


def boundary_point(t) -> float:
    """Normalize a boundary coordinate; both infinities collapse to ``INF``."""
    t = float(t)
    if math.isnan(t):
        raise ValueError("boundary point cannot be NaN")
    return INF if math.isinf(t) else t


@dataclass(frozen=True)
class Slope:
    """Reduced ``p/q`` labelling the simple closed curve ``-pA + qB``."""

    p: int
    q: int

    def __post_init__(self):
        p, q = int(self.p), int(self.q)
        if q < 0:
            raise ValueError(f"slope denominator must be >= 0, got {p}/{q}")
        if q == 0 and p != 1:
            raise ValueError(f"the curve at infinity is written 1/0, got {p}/{q}")
        if math.gcd(p, q) != 1:
            raise ValueError(f"slope {p}/{q} is not reduced")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @classmethod
    def from_value(cls, value) -> "Slope":
        """Build a slope from a rational number or infinity."""
        if isinstance(value, float) and math.isinf(value):
            return cls(1, 0)
        fr = Fraction(value)
        return cls(fr.numerator, fr.denominator)

    @classmethod
    def from_pair(cls, p: int, q: int) -> "Slope":
        """Reduce an arbitrary nonzero integer pair (sign and gcd)."""
        if p == 0 and q == 0:
            raise ValueError("0/0 is not a slope")
        if q == 0:
            return cls(1, 0)
        g = math.gcd(p, q)
        if q < 0:
            g = -g
        return cls(p // g, q // g)

    @classmethod
    def parse(cls, text: str) -> "Slope":
        s = text.strip().lower()
        if s in ("inf", "infinity", "1/0", "∞"):
            return cls(1, 0)
        if "/" in s:
            num, den = s.split("/", 1)
            return cls.from_pair(int(num), int(den))
        return cls(int(s), 1)

    @property
    def is_infinite(self) -> bool:
        return self.q == 0

    @property
    def value(self) -> float:
        return INF if self.q == 0 else self.p / self.q

    def __str__(self) -> str:
        return "inf" if self.q == 0 else f"{self.p}/{self.q}"


def _clean_zero(v: float) -> float:
    return 0.0 if v == 0 else v


@dataclass(frozen=True)
class Foliation:
    """A measured foliation ``[x, y]`` stored in canonical form.

    Canonical means ``y > 0``, or ``y == 0`` and ``x >= 0``.  Construction
    always canonicalizes, so two instances compare equal iff they are the
    same point of ``R^2 / {±1}`` (exactly; use :meth:`isclose` for floats).
    """

    x: float
    y: float

    def __post_init__(self):
        x, y = float(self.x), float(self.y)
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ValueError(f"foliation coordinates must be finite, got ({x}, {y})")
        if y < 0 or (y == 0 and x < 0):
            x, y = -x, -y
        object.__setattr__(self, "x", _clean_zero(x))
        object.__setattr__(self, "y", _clean_zero(y))

    @property
    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    @property
    def boundary(self) -> float:
        """Boundary coordinate ``t = -x / y``."""
        if self.is_zero:
            raise ValueError("the zero foliation has no boundary point")
        return INF if self.y == 0 else boundary_point(-self.x / self.y)

    def __mul__(self, c) -> "Foliation":
        return Foliation(c * self.x, c * self.y)

    __rmul__ = __mul__

    def isclose(self, other: "Foliation", tol: float = CANONICAL_TOL) -> bool:
        return abs(self.x - other.x) <= tol and abs(self.y - other.y) <= tol

    def __iter__(self):
        yield self.x
        yield self.y


def canonicalize_foliation(x: float, y: float) -> Foliation:
    return Foliation(x, y)


def foliation_from_boundary(t) -> Foliation:
    """The foliation over boundary point ``t`` with unit extremal length at ``tau = i``."""
    t = boundary_point(t)
    if t == INF:
        return Foliation(1.0, 0.0)
    r = math.hypot(t, 1.0)
    return Foliation(-t / r, 1.0 / r)


def slope_to_foliation(s: Slope) -> Foliation:
    return Foliation(-s.p, s.q)


def intersection_curves(a: Slope, b: Slope) -> int:
    return abs(a.p * b.q - b.p * a.q)


def pairing(f: Foliation, s: Slope) -> float:
    """Transverse measure of the ``p/q``-curve, ``|p y + x q|``."""
    return abs(s.p * f.y + f.x * s.q)


def intersection_foliations(f: Foliation, g: Foliation) -> float:
    # determinant extension of |ps - rq| from weighted curves to all of MF
    return abs(f.x * g.y - g.x * f.y)


def extremal_length(tau, f: Foliation) -> float:
    tau = check_modulus(tau)
    return abs(f.x + f.y * tau) ** 2 / tau.imag


def ext_array(tau: complex, x, y):
    """Vectorized ``|x + y tau|^2 / Im tau`` (no validation)."""
    re = x + y * tau.real
    im = y * tau.imag
    return (re * re + im * im) / tau.imag


def hm_differential(tau, f: Foliation) -> complex:
    """Coefficient ``c`` of the Hubbard–Masur differential ``c dz^2`` for ``f`` on ``tau``.

    The L1 norm of ``c dz^2`` over the torus is ``|c| Im(tau)``, which equals the
    extremal length of ``f``.
    """
    tau = check_modulus(tau)
    if f.is_zero:
        raise ValueError("the zero foliation has no Hubbard–Masur differential")
    w = (f.x + f.y * tau.conjugate()) / tau.imag
    return -(w * w)


def teich_distance(a, b) -> float:
    """Teichmüller distance: the curvature -4 Poincaré distance on the half-plane."""
    a = check_modulus(a)
    b = check_modulus(b)
    num = abs(a - b) ** 2
    den = 4.0 * a.imag * b.imag
    # 1 + |a-b|^2 / (2 Im a Im b) == 1 + 2 * sinh^2(D/2), D the curvature -1 distance
    return math.asinh(math.sqrt(num / den))


def ray_frame(start, t) -> tuple[float, float, float, float]:
    """Real unimodular ``(a, b, c, d)`` with ``g(i) = start`` and ``g(inf) = t``.

    The ray from ``start`` toward ``t`` is then ``s -> g(i * exp(2 s))``.
    """
    start = check_modulus(start)
    t = boundary_point(t)
    u, v = start.real, start.imag
    rv = math.sqrt(v)
    if t == INF:
        return (rv, u / rv, 0.0, 1.0 / rv)
    phi = 0.5 * math.pi + math.atan((t - u) / v)
    cs, sn = math.cos(phi), math.sin(phi)
    # h = [[rv, u/rv], [0, 1/rv]], k = [[cs, sn], [-sn, cs]]
    return (rv * cs - u / rv * sn, rv * sn + u / rv * cs, -sn / rv, cs / rv)


def _apply_real(m, z: complex) -> complex:
    a, b, c, d = m
    if math.isinf(z.imag):
        return complex(a / c) if c != 0 else complex(INF, INF)
    return (a * z + b) / (c * z + d)


def geodesic_ray(start, direction, s: float) -> complex:
    """Point at Teichmüller distance ``s`` along the ray from ``start`` toward ``direction``."""
    if s < 0:
        raise ValueError(f"ray parameter must be >= 0, got {s}")
    frame = ray_frame(start, direction)
    return _apply_real(frame, 1j * math.exp(2.0 * s))


def ext_gradient(tau, f: Foliation) -> complex:
    """Holomorphic derivative of ``tau -> Ext_tau(f)``.

    Writing ``w = (x + y conj(tau)) / Im tau`` this is ``(i/2) w^2``, i.e.
    ``-(i/2)`` times the Hubbard–Masur coefficient.
    """
    tau = check_modulus(tau)
    if f.is_zero:
        raise ValueError("the zero foliation has constant extremal length")
    w = (f.x + f.y * tau.conjugate()) / tau.imag
    return 0.5j * w * w


def theta_to_t(theta):
    """Chart ``theta -> t = -cot(theta)`` on ``[0, pi)``; ``theta = 0`` maps to infinity."""
    theta = np.asarray(theta, dtype=float)
    with np.errstate(divide="ignore"):
        t = -np.cos(theta) / np.sin(theta)
    t = np.where(theta == 0.0, INF, t)
    return t if t.ndim else float(t)


def t_to_theta(t):
    t = np.asarray(t, dtype=float)
    theta = np.where(np.isinf(t), 0.0, 0.5 * np.pi + np.arctan(np.where(np.isinf(t), 0.0, t)))
    return theta if theta.ndim else float(theta)
