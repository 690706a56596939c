"""Thurston measure on the torus MF and the extremal-length Poisson kernel.

Boundary sets are finite unions of half-open angle intervals in ``[0, pi)``,
where the angle ``theta`` stands for the foliation ``[cos theta, sin theta]``
and so for the boundary point ``t = -cot theta`` (``theta = 0`` is ``t = inf``).
The Thurston measure is half of Lebesgue measure on the canonical
half-plane representatives ``y >= 0``; with that normalization the unit
extremal-length ball has mass ``pi / 4`` at every modulus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import quadrature
from .mapping import MappingClass, act_on_modulus
from .teich import INF, boundary_point, check_modulus, ext_array, theta_to_t

PI = math.pi


def _mod_pi(theta: float) -> float:
    theta = math.fmod(theta, PI)
    if theta < 0:
        theta += PI
    if theta >= PI:
        theta -= PI
    return theta + 0.0


def t_of_theta(theta: float) -> float:
    return INF if theta == 0 else -math.cos(theta) / math.sin(theta)


def theta_of_t(t) -> float:
    t = boundary_point(t)
    return 0.0 if t == INF else 0.5 * PI + math.atan(t)


@dataclass(frozen=True)
class ArcSet:
    """Sorted, disjoint, half-open intervals ``[a, b)`` inside ``[0, pi)``.

    Touching intervals are merged, so equal sets have equal representations.
    """

    intervals: tuple = ()

    def __post_init__(self):
        ivs = []
        for a, b in self.intervals:
            a, b = float(a), float(b)
            if not (0.0 <= a <= b <= PI):
                raise ValueError(f"interval [{a}, {b}) is not inside [0, pi)")
            if a < b:
                ivs.append((a, b))
        ivs.sort()
        merged = []
        for a, b in ivs:
            if merged and a <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(merged[-1][1], b))
            else:
                merged.append((a, b))
        object.__setattr__(self, "intervals", tuple(merged))

    @classmethod
    def full(cls) -> "ArcSet":
        return cls(((0.0, PI),))

    @classmethod
    def empty(cls) -> "ArcSet":
        return cls(())

    @classmethod
    def from_t(cls, t1, t2) -> "ArcSet":
        """Boundary arc from ``t1`` to ``t2`` in increasing ``t``, passing through ``inf`` if ``t1 > t2``."""
        a, b = theta_of_t(t1), theta_of_t(t2)
        if boundary_point(t2) == INF:
            b = PI
        if a < b:
            return cls(((a, b),))
        return cls(((a, PI), (0.0, b)))

    @classmethod
    def parse(cls, text: str) -> "ArcSet":
        """``full``, ``empty``, ``theta:a,b;c,d`` or ``t:a,b;...`` (``inf``/``-inf`` allowed in t)."""
        s = text.strip().lower().replace(" ", "")
        if s == "full":
            return cls.full()
        if s == "empty":
            return cls.empty()
        kind, sep, body = s.partition(":")
        if not sep or kind not in ("theta", "t"):
            raise ValueError(f"arc set must be 'full', 'empty', 'theta:a,b;...' or 't:a,b;...', got {text!r}")
        out = cls.empty()
        for piece in filter(None, body.split(";")):
            ends = piece.split(",")
            if len(ends) != 2:
                raise ValueError(f"interval {piece!r} needs two endpoints")
            try:
                lo, hi = (_parse_angle(e) if kind == "theta" else float(e) for e in ends)
            except ValueError:
                raise ValueError(f"bad endpoint in interval {piece!r} of {text!r}") from None
            if kind == "theta":
                out = out | cls(((lo, hi),))
            else:
                if lo == hi:
                    raise ValueError(f"degenerate t-interval {piece!r}")
                out = out | cls.from_t(lo, hi)
        return out

    @property
    def measure(self) -> float:
        return math.fsum(b - a for a, b in self.intervals)

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    @property
    def is_full(self) -> bool:
        return self.intervals == ((0.0, PI),)

    def contains(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros(theta.shape, dtype=bool)
        for a, b in self.intervals:
            out |= (theta >= a) & (theta < b)
        return out

    def complement(self) -> "ArcSet":
        out, prev = [], 0.0
        for a, b in self.intervals:
            out.append((prev, a))
            prev = b
        out.append((prev, PI))
        return ArcSet(out)

    def __or__(self, other: "ArcSet") -> "ArcSet":
        return ArcSet(self.intervals + other.intervals)

    def __and__(self, other: "ArcSet") -> "ArcSet":
        out = []
        for a, b in self.intervals:
            for c, d in other.intervals:
                lo, hi = max(a, c), min(b, d)
                if lo < hi:
                    out.append((lo, hi))
        return ArcSet(out)

    def __sub__(self, other: "ArcSet") -> "ArcSet":
        return self & other.complement()

    def endpoints(self) -> list[float]:
        return [p for iv in self.intervals for p in iv]

    def __str__(self) -> str:
        if self.is_empty:
            return "empty"
        if self.is_full:
            return "full"
        return "theta:" + ";".join(f"{a!r},{b!r}" for a, b in self.intervals)


def _parse_angle(text: str) -> float:
    # plain floats or multiples of pi such as pi/2, 3pi/4, 0.5*pi
    s = text.strip()
    if "pi" not in s:
        return float(s)
    num, _, den = s.partition("/")
    num = num.replace("pi", "").replace("*", "")
    value = (float(num) if num else 1.0) * PI
    return value / float(den) if den else value


def theta_action(g: MappingClass, theta: float) -> float:
    """Boundary action in angle coordinates, exact at ``theta = 0``."""
    c, s = math.cos(theta), math.sin(theta)
    x, y = g.a * c - g.b * s, -g.c * c + g.d * s
    return _mod_pi(math.atan2(y, x))


def image_arcset(g: MappingClass, arcs: ArcSet) -> ArcSet:
    """Image of an arc set under the boundary Möbius action; wrapping arcs are split at 0."""
    if arcs.is_full or arcs.is_empty:
        return arcs
    out = []
    for a, b in arcs.intervals:
        a2, b2 = theta_action(g, a), theta_action(g, b)
        if b2 == 0.0:
            b2 = PI
        if a2 < b2:
            out.append((a2, b2))
        else:
            out.append((a2, PI))
            out.append((0.0, b2))
    return ArcSet(out)


@dataclass(frozen=True)
class MeasureReport:
    value: float
    abs_error_estimate: float
    method: str
    evaluations: int
    degraded: bool = False
    seed: int | None = None


def poisson_kernel(m, t) -> float:
    """``Im(tau) (1 + t^2) / |tau - t|^2``, equal to ``Im(tau)`` at ``t = inf``."""
    tau = check_modulus(m)
    return float(kernel_array(tau, np.asarray(boundary_point(t))))


def kernel_array(tau: complex, t):
    """Vectorized Poisson kernel in the ``t`` coordinate; accepts ``inf``."""
    t = np.asarray(t, dtype=float)
    u, v = tau.real, tau.imag
    big = np.abs(t) > 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(big, 1.0 / np.where(big, t, 1.0), 0.0)
        far = v * (r * r + 1.0) / ((u * r - 1.0) ** 2 + (v * r) ** 2)
    tn = np.where(big, 0.0, t)
    near = v * (1.0 + tn * tn) / ((u - tn) ** 2 + v * v)
    return np.where(big, far, near)


def ext_ratio_kernel(m, t) -> float:
    """The same kernel written as ``Ext_i(lambda_t) / Ext_tau(lambda_t)``."""
    tau = check_modulus(m)
    t = boundary_point(t)
    x, y = (1.0, 0.0) if t == INF else (-t, 1.0)
    return float(ext_array(1j, x, y) / ext_array(tau, x, y))


def peak_points(m, lo: float, hi: float) -> list[float]:
    """Graded breakpoints around the angle where the kernel of ``m`` peaks."""
    tau = check_modulus(m)
    u, v = tau.real, tau.imag
    center = 0.5 * PI + math.atan(u)
    width = v / (1.0 + u * u)
    pts = []
    for c in (center - PI, center, center + PI):
        if c - PI < hi and c + PI > lo:
            pts += quadrature.graded_points(c, width, lo, hi)
    return pts


def _integrate_arcs(integrand, m, arcs: ArcSet, tol: float, max_evals: int):
    value = err = 0.0
    evals = 0
    degraded = False
    for a, b in arcs.intervals:
        res = quadrature.integrate(integrand, [a, b] + peak_points(m, a, b), tol=tol, max_evals=max_evals)
        value += res.value
        err += res.error
        evals += res.evaluations
        degraded |= res.degraded
    return value, err, evals, degraded


def cone_area(m, arcs: ArcSet, tol: float = quadrature.DEFAULT_TOL, max_evals: int = quadrature.DEFAULT_MAX_EVALS) -> MeasureReport:
    """Thurston mass of the unit-extremal-length cone over ``arcs``.

    In polar coordinates the cone over an angle interval has area
    ``(1/2) int r(theta)^2 dtheta`` with ``r^2 = 1 / Ext([cos, sin])``, and
    the measure is half of the area.
    """
    tau = check_modulus(m)

    def integrand(theta):
        return 0.25 / ext_array(tau, np.cos(theta), np.sin(theta))

    value, err, evals, degraded = _integrate_arcs(integrand, tau, arcs, tol, max_evals)
    return MeasureReport(value, err, "quadrature", evals, degraded)


def cone_area_montecarlo(m, arcs: ArcSet, samples: int = 1_000_000, seed: int = 0, batch: int = 1 << 16) -> MeasureReport:
    """Hit-or-miss estimate of :func:`cone_area` over a bounding box of the half ellipse."""
    tau = check_modulus(m)
    u, v = tau.real, tau.imag
    ymax = 1.0 / math.sqrt(v)
    xmax = abs(u) / math.sqrt(v) + math.sqrt(v)
    box = 2.0 * xmax * ymax
    rng = np.random.default_rng(seed)
    hits = 0
    done = 0
    while done < samples:
        n = min(batch, samples - done)
        x = rng.uniform(-xmax, xmax, n)
        y = rng.uniform(0.0, ymax, n)
        inside = ext_array(tau, x, y) <= 1.0
        inside &= arcs.contains(np.arctan2(y, x) % PI)
        hits += int(np.count_nonzero(inside))
        done += n
    p = hits / samples
    value = 0.5 * box * p
    stderr = 0.5 * box * math.sqrt(p * (1.0 - p) / samples)
    return MeasureReport(value, stderr, "montecarlo", samples, False, seed)


def thurston_prob(m, arcs: ArcSet, tol: float = quadrature.DEFAULT_TOL) -> MeasureReport:
    """Normalized Thurston measure of ``arcs`` seen from ``m``."""
    part = cone_area(m, arcs, tol)
    whole = cone_area(m, ArcSet.full(), tol)
    value = part.value / whole.value
    err = part.abs_error_estimate / whole.value + part.value * whole.abs_error_estimate / whole.value**2
    return MeasureReport(value, err, "quadrature", part.evaluations + whole.evaluations, part.degraded or whole.degraded)


def kernel_mass(m, arcs: ArcSet, tol: float = quadrature.DEFAULT_TOL) -> MeasureReport:
    """``int_A P(m, t(theta)) dtheta / pi`` by quadrature of the kernel in ``t``."""
    tau = check_modulus(m)

    def integrand(theta):
        return kernel_array(tau, theta_to_t(theta)) / PI

    value, err, evals, degraded = _integrate_arcs(integrand, tau, arcs, tol, quadrature.DEFAULT_MAX_EVALS)
    return MeasureReport(value, err, "quadrature", evals, degraded)


def _harmonic_primitive(tau: complex, theta: float) -> float:
    # arctan((t - u) / v) in angle coordinates, continuous on [0, pi]
    s, c = math.sin(theta), math.cos(theta)
    return math.atan2(-c - tau.real * s, tau.imag * s)


def harmonic_measure(m, arcs: ArcSet) -> float:
    """Closed-form harmonic measure of ``arcs`` from ``m``."""
    tau = check_modulus(m)
    total = math.fsum(_harmonic_primitive(tau, b) - _harmonic_primitive(tau, a) for a, b in arcs.intervals)
    return total / PI


def measure_identity_residual(m, arcs: ArcSet) -> float:
    """Gap between the normalized cone measure and the kernel integral of ``arcs``."""
    return abs(thurston_prob(m, arcs).value - kernel_mass(m, arcs).value)


def equivariance_residual(g: MappingClass, m, arcs: ArcSet) -> float:
    tau = check_modulus(m)
    moved = thurston_prob(act_on_modulus(g, tau), image_arcset(g, arcs)).value
    return abs(moved - thurston_prob(tau, arcs).value)


def radon_nikodym_residual(x, y, arcs: ArcSet, tol: float = quadrature.DEFAULT_TOL) -> float:
    """Compare the measure seen from ``y`` with the Ext-ratio reweighting of the one seen from ``x``."""
    tx, ty = check_modulus(x), check_modulus(y)

    def integrand(theta):
        c, s = np.cos(theta), np.sin(theta)
        ratio = ext_array(tx, c, s) / ext_array(ty, c, s)
        return ratio * kernel_array(tx, theta_to_t(theta)) / PI

    value = 0.0
    for a, b in arcs.intervals:
        pts = [a, b] + peak_points(tx, a, b) + peak_points(ty, a, b)
        value += quadrature.integrate(integrand, pts, tol=tol).value
    return abs(thurston_prob(ty, arcs).value - value)
