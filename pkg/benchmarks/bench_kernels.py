"""Compare the compiled and pure-Python kernels.

    python3 benchmarks/bench_kernels.py [--depth 9] [--repeat 3]

Times word-ball enumeration for the Sanov subgroup and the orbit scan over
that ball, checks that both backends agree, and prints one line per kernel.
"""

import argparse
import time

import numpy as np

from torusteich import _kernels

SANOV = [(1, 2, 0, 1), (1, 0, 2, 1), (1, -2, 0, 1), (1, 0, -2, 1)]


def best_time(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--depth", type=int, default=9)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    if _kernels.BACKEND != "cython":
        print("compiled kernels are not built; only the Python backend can run")
        return 1

    rows = []
    tp, ball_py = best_time(lambda: _kernels.ball_bfs(SANOV, args.depth, 10**8, backend="python"), args.repeat)
    tc, ball_c = best_time(lambda: _kernels.ball_bfs(SANOV, args.depth, 10**8, backend="cython"), args.repeat)
    assert list(ball_py[0]) == list(ball_c[0]), "ball enumeration differs between backends"
    assert list(ball_py[1]) == list(ball_c[1]) and list(ball_py[2]) == list(ball_c[2]), "ball words differ"
    rows.append((f"ball_bfs (|B|={len(ball_c[0])})", tp, tc))

    mats = ball_c[0].floats()
    tau0, x, y = 0.3 + 1.1j, -0.85, 0.53
    tp, scan_py = best_time(lambda: _kernels.orbit_scan(mats, tau0, x, y, backend="python"), args.repeat)
    tc, scan_c = best_time(lambda: _kernels.orbit_scan(mats, tau0, x, y, backend="cython"), args.repeat)
    for a, b in zip(scan_py, scan_c):
        assert np.allclose(a, b, rtol=1e-12, atol=0), "orbit scan differs between backends"
    rows.append((f"orbit_scan (n={len(mats)})", tp, tc))

    print(f"{'kernel':<28}{'python [s]':>12}{'cython [s]':>12}{'speedup':>10}")
    for name, p, c in rows:
        print(f"{name:<28}{p:>12.4f}{c:>12.4f}{p / c:>10.1f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
