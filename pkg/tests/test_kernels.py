import os
import subprocess
import sys

import numpy as np
import pytest

from torusteich import _kernels
from torusteich.errors import BudgetExceeded
from torusteich.mapping import S, T, MappingClass, SubgroupSpec, act_on_modulus, word_ball
from torusteich.teich import Foliation, extremal_length, teich_distance

compiled = pytest.mark.skipif(_kernels.BACKEND != "cython", reason="compiled kernels not built")

SANOV = SubgroupSpec((MappingClass(1, 2, 0, 1), MappingClass(1, 0, 2, 1)))
GROUPS = [SANOV, SubgroupSpec((S, T)), SubgroupSpec((MappingClass(2, 1, 1, 1), MappingClass(1, 0, 1, 1)))]


def _alphabet(h):
    return [g.entries for g in h.alphabet]


@compiled
@pytest.mark.parametrize("h", GROUPS)
def test_ball_backends_agree(h):
    py = _kernels.ball_bfs(_alphabet(h), 6, 10**6, backend="python")
    cy = _kernels.ball_bfs(_alphabet(h), 6, 10**6, backend="cython")
    assert py[0] == cy[0]
    for a, b in zip(py[1:4], cy[1:4]):
        assert list(map(int, a)) == list(map(int, b))
    assert py[4] == cy[4]


@compiled
def test_orbit_scan_backends_agree():
    ball = word_ball(SANOV, 6)
    for tau0, (x, y) in ((1j, (1.0, 0.0)), (0.3 + 2j, (-0.7, 1.2))):
        py = _kernels.orbit_scan(ball.mats, tau0, x, y, backend="python")
        cy = _kernels.orbit_scan(ball.mats, tau0, x, y, backend="cython")
        for a, b in zip(py, cy):
            np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-13)


@pytest.mark.parametrize("backend", ["python", pytest.param("cython", marks=compiled)])
def test_orbit_scan_against_scalar_formulas(backend):
    ball = word_ball(SubgroupSpec((S, T)), 4)
    lam = Foliation(0.4, -1.3)
    tau0 = -0.2 + 0.9j
    re, im, ratio, dist = _kernels.orbit_scan(ball.mats, tau0, lam.x, lam.y, backend=backend)
    for k in range(len(ball)):
        z = act_on_modulus(ball.element(k), tau0)
        assert complex(re[k], im[k]) == pytest.approx(z, abs=1e-13)
        assert ratio[k] == pytest.approx(extremal_length(z, lam) / extremal_length(tau0, lam), rel=1e-12)
        assert dist[k] == pytest.approx(teich_distance(tau0, z), abs=1e-12)


@pytest.mark.parametrize("backend", ["python", pytest.param("cython", marks=compiled)])
def test_ball_budget_per_backend(backend):
    with pytest.raises(BudgetExceeded):
        word_ball(SANOV, 9, budget=500, backend=backend)
    assert len(word_ball(SANOV, 3, budget=53, backend=backend)) == 53


def test_overflow_falls_back_to_exact_integers():
    big = 2**21
    h = SubgroupSpec((MappingClass(big + 1, big, 1, 1),))
    ball = word_ball(h, 5)
    top = max(abs(v) for m in ball.mats for v in m)
    assert top > 2**63
    for k in range(len(ball)):
        assert h.evaluate(ball.word(k)).entries == ball.mats[k]


def test_matrix_table_views():
    arr = np.array([[1, 0, 0, 1], [1, 1, 0, 1]], dtype=np.int64)
    a = _kernels.MatrixTable(arr)
    b = _kernels.MatrixTable([(1, 0, 0, 1), (1, 1, 0, 1)])
    assert a == b and len(a) == 2
    assert a[1] == (1, 1, 0, 1) and isinstance(a[1][0], int)
    assert a[0:1] == [(1, 0, 0, 1)]
    assert a.floats().dtype == np.float64 and a.floats().shape == (2, 4)
    assert b.floats() is b.floats()


def test_unknown_backend_rejected():
    with pytest.raises(ValueError):
        _kernels.orbit_scan([[1, 0, 0, 1]], 1j, 1.0, 0.0, backend="fortran")


def test_pure_python_switch():
    env = dict(os.environ, TORUSTEICH_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "import torusteich; print(torusteich.BACKEND)"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "python"
