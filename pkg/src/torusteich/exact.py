"""Small dense linear algebra over ``Fraction``.

Everything here is exact and meant for tiny matrices (tens of rows), so
plain lists of lists are used throughout.
"""

from __future__ import annotations

from fractions import Fraction


def to_fractions(rows) -> list[list[Fraction]]:
    return [[Fraction(v) for v in row] for row in rows]


def rref(rows, column_order=None):
    """Reduced row echelon form.

    Columns are searched for pivots in ``column_order`` (default left to
    right).  Returns ``(matrix, pivots)`` with ``pivots`` the pivot columns
    in the order they were found.
    """
    m = to_fractions(rows)
    if not m:
        return m, []
    ncols = len(m[0])
    order = list(range(ncols)) if column_order is None else list(column_order)
    pivots = []
    r = 0
    for col in order:
        if r == len(m):
            break
        p = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        piv = m[r][col]
        m[r] = [v / piv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
    return m, pivots


def rank(rows) -> int:
    return len(rref(rows)[1])


def nullspace(rows, ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of the right kernel.

    Pivots are taken from the rightmost column first, so the free variables
    are the leading coordinates and each basis vector is a unit vector on
    them.  This puts "independent" branches first, which matches how tracks
    are usually written down.
    """
    if ncols is None:
        if not rows:
            raise ValueError("ncols is required for an empty matrix")
        ncols = len(rows[0])
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    m, pivots = rref(rows, column_order=range(ncols - 1, -1, -1))
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * ncols
        vec[f] = Fraction(1)
        for row, p in zip(m, pivots):
            vec[p] = -row[f]
        basis.append(vec)
    return basis


def matmul(a, b):
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in zip(*b)] for row in a]


def det(rows) -> Fraction:
    m = to_fractions(rows)
    n = len(m)
    out = Fraction(1)
    for k in range(n):
        p = next((i for i in range(k, n) if m[i][k] != 0), None)
        if p is None:
            return Fraction(0)
        if p != k:
            m[k], m[p] = m[p], m[k]
            out = -out
        out *= m[k][k]
        for i in range(k + 1, n):
            f = m[i][k] / m[k][k]
            if f:
                m[i] = [a - f * b for a, b in zip(m[i], m[k])]
    return out


def is_skew(rows) -> bool:
    n = len(rows)
    return all(rows[i][j] == -rows[j][i] for i in range(n) for j in range(n))


def pfaffian(rows) -> Fraction:
    """Pfaffian of a skew-symmetric matrix by congruence elimination."""
    m = to_fractions(rows)
    n = len(m)
    if not is_skew(m):
        raise ValueError("Pfaffian needs a skew-symmetric matrix")
    if n % 2:
        return Fraction(0)
    out = Fraction(1)

    def swap(i, j):
        m[i], m[j] = m[j], m[i]
        for row in m:
            row[i], row[j] = row[j], row[i]

    def add(dst, src, f):
        # congruence: col_dst += f col_src, row_dst += f row_src
        for row in m:
            row[dst] += f * row[src]
        m[dst] = [a + f * b for a, b in zip(m[dst], m[src])]

    for k in range(0, n, 2):
        p = next((j for j in range(k + 1, n) if m[k][j] != 0), None)
        if p is None:
            return Fraction(0)
        if p != k + 1:
            swap(k + 1, p)
            out = -out
        a = m[k][k + 1]
        out *= a
        for i in range(k + 2, n):
            if m[k][i]:
                add(i, k + 1, -m[k][i] / a)
            if m[k + 1][i]:
                add(i, k, m[k + 1][i] / a)
    return out
