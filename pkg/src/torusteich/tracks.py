"""Combinatorial train tracks with exact rational weights.

A track is a list of branch names plus switches.  Each switch lists the
branch ends meeting it, tagged ``in`` or ``out``, and trivalent switches
carry an ordered pair of the two ends on their two-ended side.  That order
is drawing data: it decides the sign of the switch's contribution to the
Thurston form and cannot be recovered from the graph alone.

Text format (``#`` starts a comment)::

    branches e1 e2 e3
    switch v: e1:in e2:in e3:out
    switch w: e3:in e1:out e2:out
    order v: e1 e2
    order w: e1 e2
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from . import exact
from .teich import Foliation

IN, OUT = "in", "out"


class TrackError(ValueError):
    """A structurally invalid track or an operation it does not support."""


class TrackParseError(TrackError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Switch:
    name: str
    ends: tuple  # (branch, IN | OUT) pairs
    ordered: tuple | None = None

    @property
    def valence(self) -> int:
        return len(self.ends)


@dataclass(frozen=True)
class TrainTrack:
    branches: tuple
    switches: tuple

    def __post_init__(self):
        branches = tuple(self.branches)
        switches = tuple(self.switches)
        object.__setattr__(self, "branches", branches)
        object.__setattr__(self, "switches", switches)
        if not branches:
            raise TrackError("a track needs at least one branch")
        if len(set(branches)) != len(branches):
            raise TrackError("duplicate branch names")
        if len({s.name for s in switches}) != len(switches):
            raise TrackError("duplicate switch names")
        count = Counter(b for s in switches for b, _ in s.ends)
        for b in branches:
            if count[b] != 2:
                raise TrackError(f"branch {b} has {count[b]} ends, expected 2")
        extra = set(count) - set(branches)
        if extra:
            raise TrackError(f"unknown branches at switches: {sorted(extra)}")
        for s in switches:
            _check_switch(s)

    @property
    def dim(self) -> int:
        return len(self.branches)

    def index(self, branch: str) -> int:
        return self.branches.index(branch)


def _check_switch(s: Switch):
    tags = Counter(tag for _, tag in s.ends)
    if set(tags) - {IN, OUT}:
        raise TrackError(f"switch {s.name}: ends must be tagged in or out")
    if s.valence > 3:
        raise TrackError(f"switch {s.name} has valence {s.valence} > 3")
    if s.valence == 3:
        if sorted(tags.values()) != [1, 2]:
            raise TrackError(f"trivalent switch {s.name} needs one end on one side and two on the other")
        if s.ordered is None:
            raise TrackError(f"trivalent switch {s.name} has no ordered pair")
        side = IN if tags[IN] == 2 else OUT
        pair = sorted(b for b, tag in s.ends if tag == side)
        if sorted(s.ordered) != pair:
            raise TrackError(f"ordered pair at {s.name} must be the two {side}-ends {pair}")
    else:
        if s.ordered is not None:
            raise TrackError(f"switch {s.name} is not trivalent but has an ordered pair")
        if s.valence == 2 and sorted(tags.values()) != [1, 1]:
            raise TrackError(f"bivalent switch {s.name} needs one in-end and one out-end")
        if s.valence < 2:
            raise TrackError(f"switch {s.name} has valence {s.valence}")


@dataclass(frozen=True)
class WeightVector:
    """Exact weights indexed by the branches of a track."""

    branches: tuple
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "branches", tuple(self.branches))
        object.__setattr__(self, "values", tuple(Fraction(v) for v in self.values))
        if len(self.branches) != len(self.values):
            raise ValueError("one weight per branch")

    def __getitem__(self, branch):
        return self.values[self.branches.index(branch)]

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)

    def __add__(self, other):
        return WeightVector(self.branches, [a + b for a, b in zip(self, other)])

    def scale(self, c) -> "WeightVector":
        return WeightVector(self.branches, [Fraction(c) * v for v in self])


def _as_weights(t: TrainTrack, w) -> WeightVector:
    if isinstance(w, WeightVector):
        if w.branches != t.branches:
            raise ValueError("weight vector belongs to a different track")
        return w
    return WeightVector(t.branches, w)


def switch_matrix(t: TrainTrack) -> list[list[int]]:
    """Rows per switch: (# incoming ends) - (# outgoing ends) of each branch."""
    rows = []
    for s in t.switches:
        row = [0] * t.dim
        for b, tag in s.ends:
            row[t.index(b)] += 1 if tag == IN else -1
        rows.append(row)
    return rows


def satisfies_switch_conditions(t: TrainTrack, w) -> bool:
    w = _as_weights(t, w)
    return all(sum(c * v for c, v in zip(row, w)) == 0 for row in switch_matrix(t))


def weight_space_basis(t: TrainTrack) -> list[WeightVector]:
    return [WeightVector(t.branches, v) for v in exact.nullspace(switch_matrix(t), t.dim)]


@dataclass(frozen=True)
class Recurrence:
    recurrent: bool
    certificate: WeightVector | None
    # branch that vanishes on every nonnegative solution
    witness: str | None
    rays: tuple


def _extreme_rays(t: TrainTrack, max_branches: int = 20):
    """Minimal-support nonnegative kernel vectors, found support by support."""
    if t.dim > max_branches:
        raise TrackError(f"recurrence check is limited to {max_branches} branches")
    mat = switch_matrix(t)
    rays = []
    supports = []
    for size in range(1, t.dim + 1):
        for supp in combinations(range(t.dim), size):
            if any(set(s) <= set(supp) for s in supports):
                continue
            sub = [[row[j] for j in supp] for row in mat]
            ker = exact.nullspace(sub, size)
            if len(ker) != 1:
                continue
            v = ker[0]
            if all(x > 0 for x in v) or all(x < 0 for x in v):
                sign = 1 if v[0] > 0 else -1
                full = [Fraction(0)] * t.dim
                for j, x in zip(supp, v):
                    full[j] = sign * x
                rays.append(WeightVector(t.branches, _primitive(full)))
                supports.append(supp)
    return rays


def _primitive(vec):
    # clear denominators, divide by the content
    den = math.lcm(*(v.denominator for v in vec))
    ints = [int(v * den) for v in vec]
    g = math.gcd(*ints) or 1
    return [Fraction(v // g) for v in ints]


def is_recurrent(t: TrainTrack) -> Recurrence:
    """Does the switch-condition kernel contain a strictly positive vector?

    The nonnegative part of the kernel is a polyhedral cone generated by its
    minimal-support vectors.  Their sum is positive exactly on the union of
    supports, so it is either a certificate or a branch outside every support
    shows that branch vanishes on all nonnegative weights.
    """
    rays = _extreme_rays(t)
    covered = set()
    for r in rays:
        covered.update(j for j, v in enumerate(r) if v > 0)
    missing = [b for j, b in enumerate(t.branches) if j not in covered]
    if missing:
        return Recurrence(False, None, missing[0], tuple(rays))
    total = rays[0]
    for r in rays[1:]:
        total = total + r
    return Recurrence(True, total, None, tuple(rays))


def thurston_form(t: TrainTrack, u, v) -> Fraction:
    """Half the sum over trivalent switches of ``u(e1) v(e2) - u(e2) v(e1)``."""
    u = _as_weights(t, u)
    v = _as_weights(t, v)
    for w in (u, v):
        if not satisfies_switch_conditions(t, w):
            raise TrackError(f"weights {list(map(str, w))} violate a switch condition")
    total = Fraction(0)
    for s in t.switches:
        if s.valence != 3:
            continue
        if s.ordered is None:
            raise TrackError(f"trivalent switch {s.name} has no ordered pair")
        e1, e2 = s.ordered
        total += u[e1] * v[e2] - u[e2] * v[e1]
    return total / 2


@dataclass(frozen=True)
class FormMatrix:
    matrix: tuple
    nondegenerate: bool
    basis: tuple

    @property
    def dim(self) -> int:
        return len(self.matrix)


def form_matrix(t: TrainTrack, basis=None) -> FormMatrix:
    """Gram matrix of the Thurston form on a basis of the weight space."""
    if basis is None:
        basis = weight_space_basis(t)
    basis = [_as_weights(t, b) for b in basis]
    gram = [[thurston_form(t, u, v) for v in basis] for u in basis]
    flag = exact.rank(gram) == len(basis) if basis else True
    return FormMatrix(tuple(tuple(r) for r in gram), flag, tuple(basis))


def volume_density(t: TrainTrack, basis=None) -> Fraction:
    """Density of ``omega^n / n!`` in the given (default: kernel) basis."""
    fm = form_matrix(t, basis)
    if fm.dim % 2:
        raise TrackError(f"weight space has odd dimension {fm.dim}")
    if not fm.nondegenerate:
        raise TrackError("Thurston form is degenerate on this track")
    return abs(exact.pfaffian(fm.matrix)) / math.factorial(fm.dim // 2)


def direct_sum(a: TrainTrack, b: TrainTrack, suffixes=("a", "b")) -> TrainTrack:
    """Disjoint union, renaming branches and switches with the given suffixes."""

    def rename(t, sfx):
        def nm(x):
            return f"{x}_{sfx}"

        sw = tuple(
            Switch(nm(s.name), tuple((nm(br), tag) for br, tag in s.ends), s.ordered and tuple(nm(e) for e in s.ordered))
            for s in t.switches
        )
        return tuple(nm(br) for br in t.branches), sw

    ba, sa = rename(a, suffixes[0])
    bb, sb = rename(b, suffixes[1])
    return TrainTrack(ba + bb, sa + sb)


# fixtures


def loop_track() -> TrainTrack:
    return TrainTrack(("e1",), (Switch("v", (("e1", IN), ("e1", OUT))),))


def theta_track() -> TrainTrack:
    ends = (("e1", IN), ("e2", OUT), ("e3", OUT))
    return TrainTrack(
        ("e1", "e2", "e3"),
        (Switch("v", ends, ("e2", "e3")), Switch("w", ends, ("e2", "e3"))),
    )


def nonrecurrent_theta_track() -> TrainTrack:
    """Theta graph with the second switch turned so that ``e2`` is forced to zero."""
    return TrainTrack(
        ("e1", "e2", "e3"),
        (
            Switch("v", (("e1", IN), ("e2", OUT), ("e3", OUT)), ("e2", "e3")),
            Switch("w", (("e1", IN), ("e2", IN), ("e3", OUT)), ("e1", "e2")),
        ),
    )


def torus_chart_track() -> TrainTrack:
    """The two-weight torus track.

    ``e1`` and ``e2`` carry the chart weights; ``e3`` is the connector whose
    weight the switch conditions force to be ``e1 + e2``.  Both switches
    present the pair in the order ``(e1, e2)``.
    """
    return TrainTrack(
        ("e1", "e2", "e3"),
        (
            Switch("v", (("e1", IN), ("e2", IN), ("e3", OUT)), ("e1", "e2")),
            Switch("w", (("e3", IN), ("e1", OUT), ("e2", OUT)), ("e1", "e2")),
        ),
    )


# the four affine charts of the torus MF, as integer matrices (mu1, mu2) -> (x, y)
_CHARTS = {
    1: ((-1, -1), (1, 0)),
    2: ((0, -1), (1, 1)),
    3: ((1, 0), (1, 1)),
    4: ((1, 1), (0, 1)),
}


def chart_matrix(k: int):
    if k not in _CHARTS:
        raise ValueError(f"chart index must be 1..4, got {k}")
    return _CHARTS[k]


def torus_chart(k: int, mu1, mu2) -> Foliation:
    if mu1 < 0 or mu2 < 0:
        raise ValueError("chart weights must be nonnegative")
    (a, b), (c, d) = chart_matrix(k)
    return Foliation(a * mu1 + b * mu2, c * mu1 + d * mu2)


def torus_chart_inverse(k: int, f: Foliation, tol: float = 1e-12) -> tuple[float, float]:
    """Chart weights of ``f``; raises if ``f`` is outside the chart's cone."""
    (a, b), (c, d) = chart_matrix(k)
    # integer inverse of a determinant-one matrix
    for x, y in ((f.x, f.y), (-f.x, -f.y)):
        mu1 = d * x - b * y
        mu2 = -c * x + a * y
        if mu1 >= -tol and mu2 >= -tol:
            return max(mu1, 0.0), max(mu2, 0.0)
    raise ValueError(f"foliation ({f.x}, {f.y}) is outside chart {k}")


def chart_constant(k: int) -> Fraction:
    """Ratio of the pullback of ``dx ^ dy`` to the chart-basis Thurston form.

    The pullback of ``dx ^ dy`` under a linear chart is ``det`` of the chart
    matrix times ``dmu1 ^ dmu2``; the track form on the standard weight basis
    is the off-diagonal entry of the torus form matrix.
    """
    jac = exact.det(chart_matrix(k))
    omega = form_matrix(torus_chart_track()).matrix[0][1]
    return Fraction(jac) / omega


# parsing


def _tokens(line: str):
    col = 0
    out = []
    for piece in line.split():
        col = line.index(piece, col)
        out.append((piece, col + 1))
        col += len(piece)
    return out


def parse_track(text: str) -> TrainTrack:
    branches = None
    switches: dict = {}
    orders: dict = {}
    positions: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        toks = _tokens(line)
        if not toks:
            continue
        head, hcol = toks[0]
        if head == "branches":
            if branches is not None:
                raise TrackParseError("branches declared twice", lineno, hcol)
            branches = [tok for tok, _ in toks[1:]]
            if not branches:
                raise TrackParseError("no branches listed", lineno, hcol + len(head))
            continue
        if head not in ("switch", "order"):
            raise TrackParseError(f"unknown directive {head!r}", lineno, hcol)
        if len(toks) < 2 or not toks[1][0].endswith(":"):
            col = toks[1][1] if len(toks) > 1 else hcol + len(head)
            raise TrackParseError(f"expected '<name>:' after {head}", lineno, col)
        name = toks[1][0][:-1]
        if not name:
            raise TrackParseError("empty switch name", lineno, toks[1][1])
        rest = toks[2:]
        if head == "switch":
            if name in switches:
                raise TrackParseError(f"switch {name} declared twice", lineno, toks[1][1])
            ends = []
            for tok, col in rest:
                br, sep, tag = tok.partition(":")
                if not sep or tag not in (IN, OUT) or not br:
                    raise TrackParseError(f"expected <branch>:in or <branch>:out, got {tok!r}", lineno, col)
                if branches is not None and br not in branches:
                    raise TrackParseError(f"unknown branch {br!r}", lineno, col)
                ends.append((br, tag))
            switches[name] = tuple(ends)
            positions[name] = (lineno, toks[1][1])
        else:
            if len(rest) != 2:
                col = rest[0][1] if rest else toks[1][1] + len(toks[1][0])
                raise TrackParseError("order needs exactly two branches", lineno, col)
            orders[name] = (tuple(tok for tok, _ in rest), lineno, toks[1][1])
    if branches is None:
        raise TrackParseError("missing 'branches' line", 1, 1)
    for name, (_, lineno, col) in orders.items():
        if name not in switches:
            raise TrackParseError(f"order given for unknown switch {name!r}", lineno, col)
    sw = []
    for name, ends in switches.items():
        pair = orders.get(name, (None,))[0]
        sw.append(Switch(name, ends, pair))
    try:
        return TrainTrack(tuple(branches), tuple(sw))
    except TrackError as exc:
        line, col = (1, 1)
        for name in positions:
            if f" {name} " in f" {exc} " or f" {name}:" in str(exc):
                line, col = positions[name]
                break
        raise TrackParseError(str(exc), line, col) from None


def format_track(t: TrainTrack) -> str:
    lines = ["branches " + " ".join(t.branches)]
    for s in t.switches:
        lines.append(f"switch {s.name}: " + " ".join(f"{b}:{tag}" for b, tag in s.ends))
    for s in t.switches:
        if s.ordered:
            lines.append(f"order {s.name}: {s.ordered[0]} {s.ordered[1]}")
    return "\n".join(lines) + "\n"
