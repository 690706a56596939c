"""The mapping class group of the torus, ``SL2(Z)`` modulo ``±I``.

Elements act on moduli by Möbius maps, on measured foliations linearly by
``[[a, -b], [-c, d]]`` and on the boundary circle ``t = -x/y`` by the same
Möbius map as on moduli.  That linear action is the one (up to sign) that
preserves extremal length, ``Ext_{g tau}(g f) = Ext_tau(f)``, and induces
``t -> (a t + b) / (c t + d)`` on the boundary.
"""

from __future__ import annotations

import math
import os
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from . import _kernels
from ._pykernels import normalize
from .errors import BudgetExceeded
from .teich import INF, Foliation, Slope, boundary_point, check_modulus, foliation_from_boundary
from .verdict import Verdict

DEFAULT_BUDGET = 2_000_000


def default_budget() -> int:
    return int(os.environ.get("TORUSTEICH_BUDGET", DEFAULT_BUDGET))


@dataclass(frozen=True)
class MappingClass:
    """Sign-normalized unimodular integer matrix ``[[a, b], [c, d]]``.

    ``word`` is optional provenance (letters of a :class:`SubgroupSpec`
    alphabet) and does not take part in equality.
    """

    a: int
    b: int
    c: int
    d: int
    word: tuple | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        a, b, c, d = (int(v) for v in (self.a, self.b, self.c, self.d))
        if a * d - b * c != 1:
            raise ValueError(f"[[{a}, {b}], [{c}, {d}]] does not have determinant 1")
        a, b, c, d = normalize(a, b, c, d)
        for name, v in zip("abcd", (a, b, c, d)):
            object.__setattr__(self, name, v)

    @classmethod
    def parse(cls, text: str) -> "MappingClass":
        parts = [p for p in text.replace(" ", "").split(",")]
        if len(parts) != 4:
            raise ValueError(f"expected 'a,b,c,d', got {text!r}")
        return cls(*(int(p) for p in parts))

    @classmethod
    def identity(cls) -> "MappingClass":
        return cls(1, 0, 0, 1)

    @property
    def entries(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    @property
    def trace(self) -> int:
        return self.a + self.d

    @property
    def is_identity(self) -> bool:
        return self.entries == (1, 0, 0, 1)

    def inverse(self) -> "MappingClass":
        return MappingClass(self.d, -self.b, -self.c, self.a)

    def __matmul__(self, other: "MappingClass") -> "MappingClass":
        a, b, c, d = self.entries
        e, f, g, h = other.entries
        return MappingClass(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def __pow__(self, n: int) -> "MappingClass":
        base = self if n >= 0 else self.inverse()
        result = MappingClass.identity()
        for _ in range(abs(n)):
            result = result @ base
        return result

    def __str__(self) -> str:
        return f"[[{self.a},{self.b}],[{self.c},{self.d}]]"


S = MappingClass(0, -1, 1, 0)
T = MappingClass(1, 1, 0, 1)


def act_on_modulus(g: MappingClass, tau) -> complex:
    tau = check_modulus(tau)
    return (g.a * tau + g.b) / (g.c * tau + g.d)


def act_on_foliation(g: MappingClass, f: Foliation) -> Foliation:
    return Foliation(g.a * f.x - g.b * f.y, -g.c * f.x + g.d * f.y)


def act_on_boundary(g: MappingClass, t) -> float:
    t = boundary_point(t)
    if t == INF:
        return INF if g.c == 0 else g.a / g.c
    den = g.c * t + g.d
    if den == 0:
        return INF
    return boundary_point((g.a * t + g.b) / den)


def act_on_slope(g: MappingClass, s: Slope) -> Slope:
    """Exact boundary action on rational points."""
    return Slope.from_pair(g.a * s.p + g.b * s.q, g.c * s.p + g.d * s.q)


def act_on_fraction(g: MappingClass, r):
    """Exact boundary action on ``Fraction`` values, with ``None`` for infinity."""
    if r is None:
        return None if g.c == 0 else Fraction(g.a, g.c)
    den = g.c * r + g.d
    if den == 0:
        return None
    return (g.a * r + g.b) / den


@dataclass(frozen=True)
class FiniteOrder:
    order: int
    kind: str = field(default="finite-order", init=False)


@dataclass(frozen=True)
class Reducible:
    slope: Slope
    kind: str = field(default="reducible", init=False)


@dataclass(frozen=True)
class PseudoAnosov:
    """Hyperbolic class with dilatation ``K``.

    ``unstable``/``stable`` are eigen-foliations with unit extremal length at
    ``tau = i``; ``attracting``/``repelling`` are their boundary points.
    """

    dilatation: float
    unstable: Foliation
    stable: Foliation
    attracting: float
    repelling: float
    kind: str = field(default="pseudo-anosov", init=False)


def quadratic_form(g: MappingClass) -> tuple[int, int, int]:
    """Coefficients ``(A, B, C)`` of ``A t^2 + B t + C`` whose roots are the fixed points."""
    return (g.c, g.d - g.a, -g.b)


def fixed_points(g: MappingClass) -> tuple[float, float]:
    """Attracting and repelling boundary fixed points of a hyperbolic element."""
    tr = g.trace
    disc = tr * tr - 4
    if disc <= 0:
        raise ValueError(f"{g} is not hyperbolic")
    sq = math.sqrt(disc)
    sgn = 1 if tr > 0 else -1
    A, B, C = quadratic_form(g)
    # root with no cancellation first, the other from the product C/A
    if -B * sgn >= 0:
        att = (-B + sgn * sq) / (2 * A)
        rep = (C / A) / att
    else:
        rep = (-B - sgn * sq) / (2 * A)
        att = (C / A) / rep
    return att, rep


def classify(g: MappingClass):
    tr = abs(g.trace)
    if g.is_identity:
        return FiniteOrder(1)
    if tr < 2:
        return FiniteOrder(2 if tr == 0 else 3)
    if tr == 2:
        if g.c == 0:
            return Reducible(Slope(1, 0))
        return Reducible(Slope.from_value(Fraction(g.a - g.d, 2 * g.c)))
    K = (tr + math.sqrt(tr * tr - 4)) / 2
    att, rep = fixed_points(g)
    return PseudoAnosov(K, foliation_from_boundary(att), foliation_from_boundary(rep), att, rep)


@dataclass(frozen=True)
class SubgroupSpec:
    """Finitely generated subgroup given by generators (and optional labels)."""

    generators: tuple
    labels: tuple = ()

    def __post_init__(self):
        gens = tuple(g if isinstance(g, MappingClass) else MappingClass(*g) for g in self.generators)
        if any(g.is_identity for g in gens):
            raise ValueError("identity generators are not allowed")
        labels = tuple(self.labels) or tuple(f"g{i + 1}" for i in range(len(gens)))
        if len(labels) != len(gens):
            raise ValueError("one label per generator")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "labels", labels)

    @property
    def alphabet(self) -> list[MappingClass]:
        """Letters in search order: all generators, then all inverses."""
        return list(self.generators) + [g.inverse() for g in self.generators]

    @property
    def letter_names(self) -> list[str]:
        return list(self.labels) + [f"{lab}^-1" for lab in self.labels]

    def evaluate(self, word) -> MappingClass:
        letters = self.alphabet
        m = MappingClass.identity()
        for j in word:
            m = m @ letters[j]
        return MappingClass(*m.entries, word=tuple(word))

    def format_word(self, word) -> str:
        names = self.letter_names
        return " ".join(names[j] for j in word) or "id"

    def conjugate(self, g: MappingClass) -> "SubgroupSpec":
        """The subgroup ``g H g^-1`` with letters in matching order."""
        gi = g.inverse()
        return SubgroupSpec(tuple(g @ x @ gi for x in self.generators), self.labels)


@dataclass
class Ball:
    """Word ball in breadth-first order; element ``k`` has shortest word ``word(k)``."""

    spec: SubgroupSpec
    radius: int
    mats: Sequence  # 4-tuples
    parent: Sequence
    letter: Sequence
    level: Sequence
    closed: bool

    def __len__(self):
        return len(self.mats)

    def word(self, k: int) -> tuple:
        out = []
        while self.parent[k] >= 0:
            out.append(int(self.letter[k]))
            k = int(self.parent[k])
        return tuple(reversed(out))

    def element(self, k: int) -> MappingClass:
        return MappingClass(*self.mats[k], word=self.word(k))

    def elements(self):
        return [self.element(k) for k in range(len(self.mats))]

    def indices_up_to(self, depth: int) -> list[int]:
        return [k for k, lev in enumerate(self.level) if lev <= depth]


def word_ball(h: SubgroupSpec, L: int, budget: int | None = None, backend=None) -> Ball:
    if L < 0:
        raise ValueError("ball radius must be >= 0")
    cap = default_budget() if budget is None else budget
    alphabet = [g.entries for g in h.alphabet]
    mats, parent, letter, level, closed = _kernels.ball_bfs(alphabet, L, cap, backend=backend)
    return Ball(h, L, mats, parent, letter, level, closed)


def enumerate_ball(h: SubgroupSpec, L: int, budget: int | None = None) -> frozenset:
    """All sign-normalized products of at most ``L`` letters."""
    ball = word_ball(h, L, budget)
    return frozenset(ball.elements())


def _primitive(form):
    g = math.gcd(*form)
    A, B, C = (v // g for v in form)
    lead = A or B or C
    return (A, B, C) if lead > 0 else (-A, -B, -C)


def fixed_set_key(g: MappingClass) -> tuple[int, int, int]:
    """Exact key of the unordered fixed-point pair of a hyperbolic element."""
    return _primitive(quadratic_form(g))


def _hyperbolics(ball: Ball):
    for k, m in enumerate(ball.mats):
        if abs(m[0] + m[3]) > 2:
            yield k


def is_sufficiently_large(h: SubgroupSpec, L: int, budget: int | None = None) -> Verdict:
    """Look for two hyperbolic elements with disjoint boundary fixed sets."""
    if L < 1:
        raise ValueError("search depth must be >= 1")
    ball = word_ball(h, L, budget)
    return _independent_pair(ball)


def _independent_pair(ball: Ball) -> Verdict:
    seen: dict = {}
    for k in _hyperbolics(ball):
        key = fixed_set_key(MappingClass(*ball.mats[k]))
        if seen and key not in seen:
            first = next(iter(seen.values()))
            g1, g2 = ball.element(first), ball.element(k)
            return Verdict.witness(
                ball.radius,
                pair=(g1, g2),
                words=(g1.word, g2.word),
                fixed_points=(fixed_points(g1), fixed_points(g2)),
            )
        seen.setdefault(key, k)
    return Verdict.inconclusive(ball.radius)


def _conj_unnormalized(g, h):
    # g h g^-1 with the signs of g and h kept as given
    a, b, c, d = g
    e, f, gg, hh = h
    m = (a * e + b * gg, a * f + b * hh, c * e + d * gg, c * f + d * hh)
    return (m[0] * d - m[1] * c, -m[0] * b + m[1] * a, m[2] * d - m[3] * c, -m[2] * b + m[3] * a)


def pair_action(g, h) -> str | None:
    """How ``g`` acts on the fixed pair of hyperbolic ``h``: ``"fix"``, ``"swap"`` or ``None``."""
    conj = _conj_unnormalized(tuple(g), tuple(h))
    f_h = quadratic_form(MappingClass(*h))
    f_c = (conj[2], conj[3] - conj[0], -conj[1])
    # proportional forms <=> same unordered pair; sign of the ratio tells orientation
    cross = [f_h[i] * f_c[j] - f_h[j] * f_c[i] for i in range(3) for j in range(i + 1, 3)]
    if any(cross):
        return None
    dot = sum(x * y for x, y in zip(f_h, f_c))
    # conjugation keeps the trace, so equal forms mean equal attracting points
    return "fix" if dot > 0 else "swap"


@dataclass
class MCPReport:
    """Bounded-depth McCarthy–Papadopoulos type of a subgroup."""

    verdict: str
    depth: int
    witnesses: dict
    notes: list = field(default_factory=list)


def _invariant_rational_set(h: SubgroupSpec, start, limit: int = 64):
    """Orbit closure of a rational boundary point under the generators, or ``None``."""
    letters = h.alphabet
    orbit = {start}
    queue = [start]
    while queue:
        r = queue.pop()
        for g in letters:
            img = act_on_fraction(g, r)
            if img not in orbit:
                if len(orbit) >= limit:
                    return None
                orbit.add(img)
                queue.append(img)
    return orbit


def _fraction_to_slope(r) -> Slope:
    return Slope(1, 0) if r is None else Slope.from_value(r)


def mcp_classify(h: SubgroupSpec, L: int, budget: int | None = None) -> MCPReport:
    """Best determination reachable at depth ``L``; negatives stay ``inconclusive``."""
    if L < 1:
        raise ValueError("search depth must be >= 1")
    ball = word_ball(h, L, budget)
    if ball.closed:
        return MCPReport("finite", L, {"order": len(ball), "elements": ball.elements()})
    pair = _independent_pair(ball)
    if pair.found:
        return MCPReport("sufficiently-large", L, dict(pair.evidence))
    for k, m in enumerate(ball.mats):
        if abs(m[0] + m[3]) == 2 and m != (1, 0, 0, 1):
            g = MappingClass(*m)
            start = None if g.c == 0 else Fraction(g.a - g.d, 2 * g.c)
            orbit = _invariant_rational_set(h, start)
            if orbit is not None:
                slopes = sorted((_fraction_to_slope(r) for r in orbit), key=lambda s: (s.q == 0, s.value))
                return MCPReport(
                    "reducible",
                    L,
                    {"invariant_slopes": slopes, "parabolic": ball.element(k)},
                    ["infinite reducible torus subgroups are dynamically irreducible (type 3)"],
                )
    hyp = list(_hyperbolics(ball))
    if hyp:
        ref = ball.mats[hyp[0]]
        swapper = None
        for k, m in enumerate(ball.mats):
            act = pair_action(m, ref)
            if act is None:
                return MCPReport("inconclusive", L, {})
            if act == "swap" and swapper is None:
                swapper = k
        elem = ball.element(hyp[0])
        wit = {"hyperbolic": elem, "fixed_points": fixed_points(elem)}
        if swapper is not None:
            wit["swap"] = ball.element(swapper)
            return MCPReport("pseudo-anosov-stabilizing-symmetric", L, wit)
        return MCPReport("pseudo-anosov-stabilizing-asymmetric", L, wit)
    return MCPReport("inconclusive", L, {})


__all__ = [
    "BudgetExceeded",
    "MappingClass",
    "SubgroupSpec",
    "S",
    "T",
    "act_on_modulus",
    "act_on_foliation",
    "act_on_boundary",
    "act_on_slope",
    "classify",
    "enumerate_ball",
    "word_ball",
    "is_sufficiently_large",
    "mcp_classify",
]
