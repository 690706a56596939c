"""Poisson integrals of boundary data on the torus Teichmüller space.

The Poisson integral of ``f`` at ``tau`` integrates ``f(t(theta))`` against
``P(tau, t(theta)) dtheta / pi`` over ``[0, pi)``.  Functions that have a limit
at ``t = inf`` are integrated in ``theta``.  Functions that keep oscillating
there (``exp(i t)`` and friends, flagged ``oscillatory``) cannot be resolved
near ``theta = 0``, so they are integrated in ``t`` over ``[-T, T]`` with
``T = 16384``; for unit-frequency oscillation the neglected tail is of the
size of the weight at the cutoff, ``O(1 / T^2)``.

Piecewise-constant data are integrated exactly through the arctan form of
the harmonic measure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import quadrature
from .mapping import MappingClass
from .measures import PI, ArcSet, harmonic_measure, image_arcset, kernel_array, peak_points, theta_action
from .teich import INF, boundary_point, check_modulus, ext_array, geodesic_ray, theta_to_t

T_CUTOFF = 16384.0
T_PANEL = 0.5 * PI


@dataclass(frozen=True)
class Estimate:
    value: complex | float
    error: float
    evaluations: int = 0
    degraded: bool = False
    method: str = "quadrature"


def mobius_t(g: MappingClass, t):
    """Vectorized boundary action on ``t`` arrays, with ``inf`` handled."""
    t = np.asarray(t, dtype=float)
    at_inf = np.isinf(t)
    tt = np.where(at_inf, 0.0, t)
    num = g.a * tt + g.b
    den = g.c * tt + g.d
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(den == 0, INF, num / np.where(den == 0, 1.0, den))
    return np.where(at_inf, g.a / g.c if g.c else INF, out)


@dataclass(frozen=True)
class BoundaryFunction:
    """Bounded boundary data, either piecewise constant on arcs or a callable of ``t``.

    Callables take numpy arrays of ``t`` (possibly containing ``inf``) and
    return real or complex arrays.  ``bound`` is a declared sup bound,
    ``lipschitz`` an optional declared Lipschitz constant in ``t``, and
    ``breakpoints`` are angles where the data may have kinks or jumps.
    """

    kind: str
    func: Callable | None = None
    pieces: tuple = ()
    bound: float = 1.0
    lipschitz: float | None = None
    oscillatory: bool = False
    breakpoints: tuple = ()
    name: str = ""

    def __post_init__(self):
        if self.kind == "piecewise":
            arcs = [a for a, _ in self.pieces]
            covered = ArcSet.empty()
            for a in arcs:
                if not (covered & a).is_empty:
                    raise ValueError("pieces of a piecewise-constant function must be disjoint")
                covered = covered | a
            if not covered.is_full:
                raise ValueError("pieces of a piecewise-constant function must cover [0, pi)")
            bound = max(abs(v) for _, v in self.pieces)
            object.__setattr__(self, "bound", float(bound))
            pts = sorted({p for a in arcs for p in a.endpoints() if 0 < p < PI})
            object.__setattr__(self, "breakpoints", tuple(pts))
        elif self.kind == "callable":
            if self.func is None:
                raise ValueError("callable boundary function needs func")
            if not self.bound >= 0:
                raise ValueError("bound must be nonnegative")
        else:
            raise ValueError(f"unknown boundary function kind {self.kind!r}")

    @classmethod
    def constant(cls, c) -> "BoundaryFunction":
        return cls("piecewise", pieces=((ArcSet.full(), c),), name=f"const({c})")

    @classmethod
    def indicator(cls, arcs: ArcSet) -> "BoundaryFunction":
        rest = arcs.complement()
        pieces = tuple(p for p in ((arcs, 1.0), (rest, 0.0)) if not p[0].is_empty)
        return cls("piecewise", pieces=pieces, name=f"1[{arcs}]")

    @classmethod
    def piecewise(cls, pairs) -> "BoundaryFunction":
        return cls("piecewise", pieces=tuple((a, v) for a, v in pairs if not a.is_empty))

    @classmethod
    def from_callable(cls, func, bound, lipschitz=None, oscillatory=False, breakpoints=(), name="") -> "BoundaryFunction":
        return cls("callable", func, (), float(bound), lipschitz, oscillatory, tuple(breakpoints), name)

    @property
    def is_piecewise(self) -> bool:
        return self.kind == "piecewise"

    def __call__(self, t):
        if self.kind == "callable":
            return self.func(t)
        theta = np.where(np.isinf(np.asarray(t, dtype=float)), 0.0, 0.5 * PI + np.arctan(np.asarray(t, dtype=float)))
        out = np.zeros(np.shape(theta), dtype=np.result_type(*[type(v) for _, v in self.pieces], float))
        for arcs, v in self.pieces:
            out = np.where(arcs.contains(theta), v, out)
        return out if np.ndim(out) else out.item()

    def compose(self, g: MappingClass) -> "BoundaryFunction":
        """The function ``t -> f(g t)``."""
        gi = MappingClass(g.d, -g.b, -g.c, g.a)
        if self.is_piecewise:
            return BoundaryFunction.piecewise((image_arcset(gi, a), v) for a, v in self.pieces)
        if self.oscillatory:
            raise ValueError("composition would move the oscillation away from infinity")
        bps = [theta_action(gi, p) for p in self.breakpoints]
        f = self.func
        return BoundaryFunction.from_callable(
            lambda t: f(mobius_t(g, t)), self.bound, None, False, bps, f"{self.name}∘{g}"
        )


def lincomb(alpha, f: BoundaryFunction, beta, g: BoundaryFunction) -> BoundaryFunction:
    """``alpha f + beta g``; stays piecewise when both inputs are."""
    if f.is_piecewise and g.is_piecewise:
        pairs = [(a & b, alpha * u + beta * v) for a, u in f.pieces for b, v in g.pieces]
        return BoundaryFunction.piecewise(pairs)
    bps = sorted(set(f.breakpoints) | set(g.breakpoints))
    return BoundaryFunction.from_callable(
        lambda t: alpha * f(t) + beta * g(t),
        abs(alpha) * f.bound + abs(beta) * g.bound,
        None,
        f.oscillatory or g.oscillatory,
        bps,
        f"{alpha}*{f.name}+{beta}*{g.name}",
    )


def _fsum(parts):
    if any(isinstance(p, complex) for p in parts):
        return complex(math.fsum(p.real for p in parts), math.fsum(p.imag for p in parts))
    return math.fsum(parts)


def _t_points(centers) -> list[float]:
    pts = list(np.arange(-T_CUTOFF, T_CUTOFF + 0.5 * T_PANEL, T_PANEL))
    for c, w in centers:
        pts += quadrature.graded_points(c, w, -T_CUTOFF, T_CUTOFF)
    return pts


def _theta_points(f: BoundaryFunction, moduli) -> list[float]:
    pts = [0.0, PI, *f.breakpoints]
    for tau in moduli:
        pts += peak_points(tau, 0.0, PI)
    return pts


def _boundary_integral(f, w_theta, w_t, moduli, tol, panels=None):
    """``int f(t(theta)) w_theta dtheta`` (equivalently ``int f(t) w_t dt``) in the right domain."""
    if f.oscillatory:
        def integrand(t):
            return f(t) * w_t(t)

        pts = _t_points([(tau.real, tau.imag) for tau in moduli] or [(0.0, 1.0)])
    else:
        def integrand(theta):
            return f(theta_to_t(theta)) * w_theta(theta)

        pts = _theta_points(f, moduli)
    if panels is not None:
        return quadrature.fixed_rule(integrand, panels)
    return quadrature.integrate(integrand, pts, tol=tol)


def _kernel_weights(tau: complex):
    u, v = tau.real, tau.imag

    def w_theta(theta):
        return kernel_array(tau, theta_to_t(theta)) / PI

    def w_t(t):
        return v / (PI * ((t - u) ** 2 + v * v))

    return w_theta, w_t


def _tail(f: BoundaryFunction, tau: complex) -> float:
    if not f.oscillatory:
        return 0.0
    # unit-frequency oscillation: the tail is bounded by the weight at the cutoff
    return 2.0 * f.bound * tau.imag / (PI * (T_CUTOFF - abs(tau.real)) ** 2)


def poisson_integral(f: BoundaryFunction, m, tol: float = quadrature.DEFAULT_TOL) -> Estimate:
    tau = check_modulus(m)
    if f.is_piecewise:
        value = _fsum([v * harmonic_measure(tau, a) for a, v in f.pieces])
        return Estimate(value, 4 * quadrature.EPS * f.bound, 0, False, "closed-form")
    res = _boundary_integral(f, *_kernel_weights(tau), [tau], tol)
    return Estimate(res.value, res.error + _tail(f, tau), res.evaluations, res.degraded)


@dataclass(frozen=True)
class HarmonicField:
    """A function on the upper half-plane given by a closure, plus where it came from."""

    func: Callable
    source: str
    settings: dict = field(default_factory=dict)

    def __call__(self, m):
        return self.func(check_modulus(m))


def poisson_field(f: BoundaryFunction, tol: float = quadrature.DEFAULT_TOL) -> HarmonicField:
    return HarmonicField(lambda tau: poisson_integral(f, tau, tol).value, f.name or "boundary function", {"tol": tol})


@dataclass(frozen=True)
class RadialReport:
    """Values of the Poisson integral along a ray; the tail is a finite-ray value, not a limit."""

    t0: float
    s: tuple
    values: tuple
    tail: complex | float
    tail_change: float


def radial_limit(f: BoundaryFunction, t0, s_max: float, steps: int = 8, start=1j) -> RadialReport:
    if not s_max > 0:
        raise ValueError("s_max must be positive")
    t0 = boundary_point(t0)
    s = tuple(s_max * 2.0 ** (k - steps + 1) for k in range(steps))
    vals = tuple(poisson_integral(f, geodesic_ray(start, t0, si)).value for si in s)
    change = abs(vals[-1] - vals[-2]) if len(vals) > 1 else 0.0
    return RadialReport(t0, s, vals, vals[-1], change)


def _stencil(tau: complex, h: float):
    return [tau, tau + h, tau - h, tau + 1j * h, tau - 1j * h]


def _values_on(f: BoundaryFunction, points, tol: float):
    """Poisson integrals at nearby points with one shared quadrature partition."""
    if f.is_piecewise:
        return [poisson_integral(f, p).value for p in points]
    res = _boundary_integral(f, *_kernel_weights(points[0]), [points[0]], tol)
    return [_boundary_integral(f, *_kernel_weights(p), [p], tol, panels=res.panels) for p in points]


def laplacian_residual(f: BoundaryFunction, m, h: float, tol: float = 1e-13) -> float:
    """``|5-point Laplacian|`` of the Poisson integral at ``m``; should be ``O(h^2)``."""
    tau = check_modulus(m)
    if not h > 0:
        raise ValueError("step must be positive")
    if tau.imag <= 2 * h:
        raise ValueError("stencil leaves the upper half-plane")
    c, e, w, n, s = _values_on(f, _stencil(tau, h), tol)
    return abs((e + w + n + s - 4 * c) / (h * h))


def fourier_coefficients(f: BoundaryFunction, N: int, tol: float = 1e-12) -> list:
    """Coefficients ``a_{-1} .. a_{-N}`` of ``f`` pulled back to the unit circle.

    The identification is ``z = (t - i) / (t + i)``: ``t = i`` goes to the
    center and ``t = inf`` to ``z = 1``.  In the angle coordinate this is
    ``z = exp(2 i theta)``, so ``a_{-n} = (1/pi) int f exp(2 i n theta) dtheta``.
    """
    if N < 1:
        raise ValueError("N must be positive")
    out = []
    for n in range(1, N + 1):
        def w_theta(theta, n=n):
            return np.exp(2j * n * theta) / PI

        def w_t(t, n=n):
            return ((t - 1j) / (t + 1j)) ** n / (PI * (1.0 + t * t))

        out.append(_boundary_integral(f, w_theta, w_t, [1j], tol).value)
    return out


def negative_fourier_residual(f: BoundaryFunction, N: int) -> float:
    """Largest ``|a_{-n}|`` for ``n = 1..N``; near zero for analytic boundary data."""
    if f.is_piecewise and len(f.pieces) == 1:
        return 0.0
    return max(abs(a) for a in fourier_coefficients(f, N))


def _cr_weights(tau: complex):
    u, v = tau.real, tau.imag

    def phase(x, y):
        # conj(c) / (|c| Im tau) for c the Hubbard–Masur coefficient of [x, y]
        w = (x + y * np.conj(tau)) / v
        c = -(w * w)
        return np.conj(c) / (np.abs(c) * v)

    def w_theta(theta):
        x, y = np.cos(theta), np.sin(theta)
        return ext_array(1j, x, y) / ext_array(tau, x, y) * phase(x, y) / PI

    def w_t(t):
        ratio = v / ((t - u) ** 2 + v * v)
        return ratio * phase(-t, 1.0) / PI

    return w_theta, w_t


def cr_integral(f: BoundaryFunction, m, tol: float = 1e-12) -> Estimate:
    tau = check_modulus(m)
    if f.is_piecewise:
        g = BoundaryFunction.from_callable(f, f.bound, breakpoints=f.breakpoints, name=f.name)
    else:
        g = f
    res = _boundary_integral(g, *_cr_weights(tau), [tau], tol)
    return Estimate(res.value, res.error + _tail(f, tau), res.evaluations, res.degraded)


def cr_residual(f: BoundaryFunction, m) -> float:
    """Size of the holomorphy defect of the Poisson integral of ``f`` at ``m``."""
    return abs(cr_integral(f, m).value)


def dbar_fd(f: BoundaryFunction, m, h: float = 1e-4, tol: float = 1e-12) -> complex:
    """``2 i`` times a central-difference ``d/d(conj tau)`` of the Poisson integral.

    This is what the CR integral computes, by an independent route.
    """
    tau = check_modulus(m)
    if tau.imag <= 2 * h:
        raise ValueError("stencil leaves the upper half-plane")
    _, e, w, n, s = _values_on(f, _stencil(tau, h), tol)
    return 2j * 0.5 * ((e - w) / (2 * h) + 1j * (n - s) / (2 * h))


# Seidel's periodic construction


def _merge_pattern(period: float, pattern):
    ivs = sorted((float(a), float(b)) for a, b in pattern)
    if not ivs:
        raise ValueError("pattern is empty")
    for a, b in ivs:
        if not a < b:
            raise ValueError(f"degenerate pattern interval ({a}, {b})")
    merged = []
    for a, b in ivs:
        if merged and a <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], b))
        else:
            merged.append((a, b))
    total = math.fsum(b - a for a, b in merged)
    span = merged[-1][1] - merged[0][0]
    if total > period * (1 + 1e-15) or span > period * (1 + 1e-15):
        raise ValueError("pattern must fit inside one period")
    return merged, total


def _periodic_primitive(s: float, y: float, p: float) -> float:
    # sum over k of arctan((s + k p) / y) / pi, normalized so it increases by 1 per period
    k = round(s / p)
    r = s - k * p
    return k + math.atan(math.tan(PI * r / p) / math.tanh(PI * y / p)) / PI


def seidel_function(period: float, pattern) -> HarmonicField:
    """Poisson integral of the indicator of ``pattern + period * Z``.

    The sum over translates is evaluated in closed form, so the field is
    exactly invariant under ``tau -> tau + period``.  A pattern filling the
    whole period gives the constant 1.
    """
    if not period > 0:
        raise ValueError("period must be positive")
    merged, total = _merge_pattern(period, pattern)

    def u(tau: complex) -> float:
        x, y = tau.real, tau.imag
        return math.fsum(
            _periodic_primitive(b - x, y, period) - _periodic_primitive(a - x, y, period) for a, b in merged
        )

    return HarmonicField(u, f"seidel(period={period}, pattern={merged})", {"period": period, "measure": total / period})


# named boundary functions for the command line and the tests


def _safe(fn):
    def wrapped(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(over="ignore", invalid="ignore"):
            return fn(t)

    return wrapped


NAMED = {
    "one": lambda: BoundaryFunction.constant(1.0),
    "exp_it": lambda: BoundaryFunction.from_callable(_safe(lambda t: np.exp(1j * t)), 1.0, 1.0, True, name="exp_it"),
    "exp_minus_it": lambda: BoundaryFunction.from_callable(
        _safe(lambda t: np.exp(-1j * t)), 1.0, 1.0, True, name="exp_minus_it"
    ),
    "bump": lambda: BoundaryFunction.from_callable(_safe(lambda t: 1.0 / (1.0 + t * t)), 1.0, 0.65, name="bump"),
    "odd": lambda: BoundaryFunction.from_callable(
        _safe(lambda t: np.where(np.isinf(t), 0.0, t / (1.0 + t * t))), 0.5, 1.0, name="odd"
    ),
    "gauss": lambda: BoundaryFunction.from_callable(_safe(lambda t: np.exp(-t * t)), 1.0, 0.86, name="gauss"),
    "cos2theta": lambda: BoundaryFunction.from_callable(
        _safe(lambda t: np.where(np.isinf(t), 1.0, (t * t - 1.0) / (t * t + 1.0))), 1.0, 1.3, name="cos2theta"
    ),
    "atan": lambda: BoundaryFunction.from_callable(
        _safe(lambda t: np.arctan(t) / PI), 0.5, 1.0 / PI, name="atan"
    ),
}


def named_function(name: str) -> BoundaryFunction:
    try:
        return NAMED[name]()
    except KeyError:
        raise ValueError(f"unknown boundary function {name!r}; choose from {sorted(NAMED)}") from None
