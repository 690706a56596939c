import math

import numpy as np
import pytest

from torusteich.dynamics import (
    big_from_small,
    ext_ratio,
    is_big_horospherical,
    is_conical,
    is_small_horospherical,
    limit_set_approx,
    orbit_points,
    poincare_sum,
    replay_conical,
    replay_horospherical,
    wandering_overlap,
)
from torusteich import _kernels
from torusteich.errors import BudgetExceeded
from torusteich.mapping import S, T, MappingClass, SubgroupSpec, act_on_foliation, act_on_modulus, classify, word_ball
from torusteich.measures import ArcSet, image_arcset, thurston_prob
from torusteich.teich import Foliation, extremal_length, teich_distance

A = MappingClass(2, 1, 1, 1)
TP = MappingClass(1, 0, 1, 1)
K = (3 + 5**0.5) / 2
PA = classify(A)
HA = SubgroupSpec((A,))
TRIVIAL = SubgroupSpec(())


# orbits and limit sets


def test_orbit_points_for_translations():
    pts = orbit_points(SubgroupSpec((T,)), 1j, 2)
    ds = [p.distance for p in pts]
    assert ds[0] == 0
    d1, d2 = teich_distance(1j, 1 + 1j), teich_distance(1j, 2 + 1j)
    assert ds[1:] == pytest.approx([d1, d1, d2, d2], abs=1e-14)
    assert sorted(p.modulus.real for p in pts) == pytest.approx([-2, -1, 0, 1, 2], abs=1e-14)
    for p in pts:
        assert p.modulus == pytest.approx(act_on_modulus(p.element, 1j), abs=1e-14)


def test_orbit_of_trivial_group():
    pts = orbit_points(TRIVIAL, 0.3 + 2j, 5)
    assert len(pts) == 1 and pts[0].distance == 0


def test_orbit_distances_grow_along_powers():
    # letter 0 is A and letter 1 its inverse, so a word's power is its signed length
    power = {}
    for p in orbit_points(HA, 1j, 3):
        n = len(p.word) if not p.word or p.word[0] == 0 else -len(p.word)
        power[n] = p.distance
    for sign in (1, -1):
        ds = [power[sign * n] for n in range(4)]
        assert all(a < b for a, b in zip(ds, ds[1:]))
    # i lies on the axis of A (the circle through its fixed points centred at 1/2),
    # so the orbit moves by exactly the translation length log K in curvature -4 units
    assert abs(1j - 0.5) == pytest.approx(5**0.5 / 2, abs=1e-15)
    for n in range(1, 4):
        assert power[n] == pytest.approx(n * math.log(K), abs=1e-12)
        assert power[-n] == pytest.approx(n * math.log(K), abs=1e-12)


def test_limit_set_of_cyclic_hyperbolic():
    for L in (1, 3, 5):
        assert limit_set_approx(HA, L) == pytest.approx(sorted([(1 - 5**0.5) / 2, (1 + 5**0.5) / 2]), abs=1e-12)


def test_limit_set_of_finite_group_is_empty():
    assert limit_set_approx(SubgroupSpec((S,)), 4) == []
    with pytest.raises(ValueError):
        limit_set_approx(HA, 0)


def test_limit_set_grows_with_depth():
    h = SubgroupSpec((T, TP))
    prev = []
    for L in range(1, 7):
        cur = limit_set_approx(h, L)
        assert set(prev) <= set(cur)
        prev = cur
    assert len(prev) >= 50
    assert all(x < y for x, y in zip(prev, prev[1:]))


# conical limit points


def test_conical_witness_along_the_axis():
    v = is_conical(PA.unstable, HA, 1j, L=6, R=2.0)
    assert v.found
    assert all(all(letter == 0 for letter in w) for w in v.evidence["words"])
    # i and the whole orbit lie on the axis, which ends at the unstable point
    assert all(d < 1e-9 for d in v.evidence["distances"])
    assert v.evidence["feet"] == pytest.approx([n * math.log(K) for n in (2, 3, 4)], abs=1e-9)
    assert replay_conical(v, PA.unstable, HA, 1j)


def test_conical_inconclusive_cases():
    v = is_conical(Foliation(1, 0), SubgroupSpec((T,)), 1j, L=6, R=1.0)
    assert not v.found and v.depth == 6
    assert not is_conical(PA.unstable, TRIVIAL, 1j, L=4, R=5.0).found
    with pytest.raises(ValueError):
        is_conical(Foliation(0, 0), HA, 1j, L=2)
    with pytest.raises(ValueError):
        is_conical(PA.unstable, HA, 1j, L=2, R=0)


def test_conical_replay_rejects_tampering():
    v = is_conical(PA.unstable, HA, 1j, L=6, R=2.0)
    bad = type(v)(v.status, v.depth, {**v.evidence, "s_min": 100.0})
    assert not replay_conical(bad, PA.unstable, HA, 1j)


# horospherical limit points


def test_small_witness_by_power_word():
    eps = K**-8
    v, rep = is_small_horospherical(PA.unstable, HA, 1j, L=8, eps=eps * (1 + 1e-9))
    assert v.found
    assert rep.witness_word == (0,) * 8
    assert rep.best_ratio == pytest.approx(K**-16, rel=1e-9)
    assert replay_horospherical(v, PA.unstable, HA, 1j)


def test_small_scaling_law():
    for n in range(1, 9):
        r = ext_ratio(A**n, PA.unstable, 1j)
        assert r == pytest.approx(K ** (-2 * n), rel=1e-9)


def test_small_for_stable_uses_inverse_powers():
    v, rep = is_small_horospherical(PA.stable, HA, 1j, L=4, eps=K**-6)
    assert v.found
    assert len(rep.witness_word) == 4 and len(set(rep.witness_word)) == 1 and rep.witness_word[0] != 0
    assert replay_horospherical(v, PA.stable, HA, 1j)


def test_small_inconclusive_for_finite_group():
    v, _ = is_small_horospherical(Foliation(0.3, 1), SubgroupSpec((S,)), 1j, L=5, eps=0.5)
    assert not v.found
    with pytest.raises(ValueError):
        is_small_horospherical(Foliation(0, 0), HA, 1j, L=2)
    with pytest.raises(ValueError):
        is_small_horospherical(PA.unstable, HA, 1j, L=2, eps=0)


def test_big_examples():
    v, rep = is_big_horospherical(PA.unstable, HA, 1j, L=8, M=1.0, D=2.0)
    assert v.found and rep.best_ratio <= 1 and rep.best_distance >= 2
    assert replay_horospherical(v, PA.unstable, HA, 1j)
    v, _ = is_big_horospherical(Foliation(0, 1), SubgroupSpec((T,)), 1j, L=12, M=10.0, D=3.0)
    assert not v.found
    with pytest.raises(ValueError):
        is_big_horospherical(PA.unstable, HA, 1j, L=2, M=0)


def test_small_implies_big_on_every_witness():
    cases = [
        (PA.unstable, HA, 8, K**-8),
        (PA.stable, HA, 6, K**-4),
        (classify(A @ TP).unstable, SubgroupSpec((A, TP)), 4, 0.05),
        (Foliation(-1, 2), SubgroupSpec((T, TP)), 5, 0.25),
    ]
    for lam, h, L, eps in cases:
        v, _ = is_small_horospherical(lam, h, 1j, L=L, eps=eps)
        assert v.found
        big, _ = big_from_small(v, lam, h, 1j)
        assert big.found
        assert replay_horospherical(big, lam, h, 1j)
    with pytest.raises(ValueError):
        big_from_small(is_small_horospherical(PA.unstable, HA, 1j, L=1, eps=1e-9)[0], PA.unstable, HA)


def test_replay_rejects_wrong_ratio():
    v, _ = is_small_horospherical(PA.unstable, HA, 1j, L=3, eps=0.1)
    bad = type(v)(v.status, v.depth, {**v.evidence, "ratio": v.evidence["ratio"] / 2})
    assert not replay_horospherical(bad, PA.unstable, HA, 1j)


def test_horospherical_status_is_conjugation_invariant():
    rng = np.random.default_rng(3)
    letters = [S, T, TP, A]
    for _ in range(6):
        g = MappingClass.identity()
        for _ in range(3):
            g = g @ letters[rng.integers(4)]
        conj = SubgroupSpec(tuple(g @ x @ g.inverse() for x in HA.generators))
        lam_g = act_on_foliation(g, PA.unstable)
        m_g = act_on_modulus(g, 1j)
        v, rep = is_small_horospherical(PA.unstable, HA, 1j, L=5, eps=K**-8)
        assert v.found
        # the conjugated word evaluated at the moved base point has the same ratio
        r = ext_ratio(conj.evaluate(rep.witness_word), lam_g, m_g)
        assert r == pytest.approx(rep.best_ratio, rel=1e-9)
        w, _ = is_small_horospherical(lam_g, conj, m_g, L=5, eps=K**-8)
        assert w.found and replay_horospherical(w, lam_g, conj, m_g)


def test_base_point_independence():
    m1 = 0.7 + 2.5j
    d = teich_distance(1j, m1)
    for lam in (PA.unstable, PA.stable):
        v, _ = is_small_horospherical(lam, HA, 1j, L=8, eps=1e-4)
        assert v.found
        # moving the base point changes every ratio by at most exp(4 d)
        w, rep = is_small_horospherical(lam, HA, m1, L=8, eps=1e-4 * math.exp(4 * d))
        assert w.found
        g = HA.evaluate(v.evidence["word"])
        r1 = ext_ratio(g, lam, m1)
        assert math.exp(-4 * d) * v.evidence["ratio"] <= r1 * (1 + 1e-12)
        assert r1 <= math.exp(4 * d) * v.evidence["ratio"] * (1 + 1e-12)


def test_budget_is_enforced():
    h = SubgroupSpec((MappingClass(1, 2, 0, 1), MappingClass(1, 0, 2, 1)))
    with pytest.raises(BudgetExceeded):
        is_small_horospherical(Foliation(0, 1), h, 1j, L=9, eps=0.1, budget=1000)
    with pytest.raises(BudgetExceeded):
        poincare_sum(Foliation(0, 1), h, 1j, L=9, budget=1000)


# Poincare sums and wandering sets


def test_poincare_trivial_group():
    tab = poincare_sum(Foliation(0.2, 1), TRIVIAL, 1j, L=4)
    assert tab.partial_sums == (1.0, 1.0, 1.0, 1.0)
    assert tab.depths == (1, 2, 3, 4)


def test_poincare_converges_for_generic_lambda():
    tab = poincare_sum(Foliation(0.3, 1), HA, 1j, L=12)
    s = tab.partial_sums
    assert all(a <= b for a, b in zip(s, s[1:]))
    incs = np.diff(s)
    # increments decay at least like K^-2 per step once the eigen-expansion dominates
    assert all(b <= a * K**-2 * 1.01 for a, b in zip(incs[3:], incs[4:]))
    assert tab.counts == tuple(2 * L + 1 for L in range(1, 13))


def test_poincare_diverges_for_unstable_lambda():
    tab = poincare_sum(PA.unstable, HA, 1j, L=8)
    incs = np.diff(tab.partial_sums)
    assert all(b >= a * K**2 * 0.99 for a, b in zip(incs, incs[1:]))
    assert tab.partial_sums[-1] > K**15
    with pytest.raises(ValueError):
        poincare_sum(Foliation(0, 0), HA)


def test_wandering_arc_for_cyclic_group():
    # a short arc around t = 0 that is far from the fixed points of A
    W = ArcSet.from_t(-0.05, 0.05)
    rep = wandering_overlap(HA, W, 1j, L=6)
    assert rep.max_overlap == 0 and rep.argmax is None and rep.table == ()


def test_wandering_overlap_for_full_group():
    W = ArcSet.from_t(-1, 1)
    assert thurston_prob(1j, W).value >= 0.3
    rep = wandering_overlap(SubgroupSpec((S, T)), W, 1j, L=4)
    assert rep.max_overlap > 0
    g = rep.argmax
    assert not g.is_identity
    assert rep.max_overlap == pytest.approx(thurston_prob(1j, W & image_arcset(g, W)).value, abs=1e-12)


def test_wandering_full_circle():
    rep = wandering_overlap(SubgroupSpec((T,)), ArcSet.full(), 1j, L=2)
    assert rep.max_overlap == pytest.approx(1, abs=1e-12)
    with pytest.raises(ValueError):
        wandering_overlap(HA, ArcSet.empty())


def test_extremal_length_ratio_agrees_with_kernel_scan():
    # the compiled scan and the scalar formula agree on every ball element
    ball = word_ball(SubgroupSpec((T, TP)), 4)
    lam = Foliation(-0.4, 1.1)
    _, _, ratio, dist = _kernels.orbit_scan(ball.mats, 1j, lam.x, lam.y)
    for k in range(len(ball)):
        g = ball.element(k)
        z = act_on_modulus(g, 1j)
        assert ratio[k] == pytest.approx(extremal_length(z, lam) / extremal_length(1j, lam), rel=1e-12)
        assert dist[k] == pytest.approx(teich_distance(1j, z), abs=1e-12)
