"""Pure-Python reference implementation of the hot kernels.

Exact for arbitrarily large integers.  ``_ckernels`` must agree with this
module element for element, including the order of enumeration.
"""

import numpy as np

from .errors import BudgetExceeded

IDENTITY = (1, 0, 0, 1)


def normalize(a, b, c, d):
    """Representative of ``±M`` whose first nonzero entry is positive."""
    lead = a or b or c or d
    if lead < 0:
        return (-a, -b, -c, -d)
    return (a, b, c, d)


def ball_bfs(alphabet, depth, cap):
    """Breadth-first enumeration of the word ball of radius ``depth``.

    ``alphabet`` lists normalized letters as 4-tuples; words are extended on
    the right, letters tried in alphabet order.  Returns
    ``(mats, parent, letter, level, closed)`` where ``closed`` tells whether
    multiplying the outermost level by every letter stays inside the ball,
    i.e. the generated group is finite and fully enumerated.
    """
    index = {IDENTITY: 0}
    mats = [IDENTITY]
    parent = [-1]
    letter = [-1]
    level = [0]
    frontier = [0]
    for k in range(1, depth + 1):
        new = []
        for i in frontier:
            a, b, c, d = mats[i]
            for j, (e, f, g, h) in enumerate(alphabet):
                m = normalize(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)
                if m in index:
                    continue
                if len(mats) >= cap:
                    raise BudgetExceeded("word ball", cap)
                index[m] = len(mats)
                mats.append(m)
                parent.append(i)
                letter.append(j)
                level.append(k)
                new.append(index[m])
        frontier = new
        if not new:
            break
    closed = True
    for i in frontier:
        a, b, c, d = mats[i]
        for e, f, g, h in alphabet:
            m = normalize(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)
            if m not in index:
                closed = False
                break
        if not closed:
            break
    return mats, parent, letter, level, closed


def orbit_scan(mats, tau0, x, y):
    """Images ``w(tau0)``, Ext ratios ``Ext_{w tau0}([x,y]) / Ext_{tau0}([x,y])``
    and Teichmüller distances ``d(tau0, w tau0)`` for a list of matrices."""
    m = np.asarray(mats, dtype=float).reshape(-1, 4)
    a, b, c, d = m[:, 0], m[:, 1], m[:, 2], m[:, 3]
    u, v = tau0.real, tau0.imag
    den_re = c * u + d
    den_im = c * v
    den2 = den_re * den_re + den_im * den_im
    num_re = a * u + b
    num_im = a * v
    re = (num_re * den_re + num_im * den_im) / den2
    im = v / den2
    e0 = ((x + y * u) ** 2 + (y * v) ** 2) / v
    ratio = ((x + y * re) ** 2 + (y * im) ** 2) / im / e0
    dist = np.arcsinh(np.sqrt(((re - u) ** 2 + (im - v) ** 2) / (4.0 * v * im)))
    return re, im, ratio, dist
