"""Independent string-level reference computations for the tests.

Everything here re-derives quantities from first principles with exact
Fractions: explicit bit strings, explicit mutation masks, explicit fitness
definitions.  Deliberately redundant with the package so the tests check the
package against something it does not share code with.
"""

from fractions import Fraction
from functools import lru_cache


def fitness(function, n, w):
    if function == "onemax":
        return w
    if function == "fullydeceptive":
        return n + 1 if w == 0 else w
    if function == "twomax1":
        if w in (0, n):
            return n
        return w if w >= n // 2 else n // 2 - w
    if function == "deceptive":
        return n - 2 * w if w <= n // 2 else w - n - 1
    raise ValueError(function)


def ranked_levels(function, n):
    """Weight classes grouped by fitness, best first."""
    values = sorted({fitness(function, n, w) for w in range(n + 1)}, reverse=True)
    return [tuple(w for w in range(n + 1) if fitness(function, n, w) == v)
            for v in values]


def popcount(x):
    return bin(x).count("1")


def string_row(function, n, x):
    """Exact transition row of state x over levels, by mask enumeration."""
    levels = ranked_levels(function, n)
    level_of = {w: k for k, ws in enumerate(levels) for w in ws}
    fx = fitness(function, n, popcount(x))
    row = [Fraction(0)] * len(levels)
    q = Fraction(1, n)
    for mask in range(1 << n):
        flips = popcount(mask)
        prob = q ** flips * (1 - q) ** (n - flips)
        y = x ^ mask
        wy = popcount(y)
        if y != x and fitness(function, n, wy) >= fx:
            row[level_of[wy]] += prob
        else:
            row[level_of[popcount(x)]] += prob
    return row


def representative(n, w, variant=0):
    """A weight-w string; variant shifts which positions carry the ones."""
    bits = [(i + variant) % n for i in range(w)]
    x = 0
    for b in bits:
        x |= 1 << b
    return x


@lru_cache(maxsize=None)
def enumerate_kernel(function, n):
    """Level kernel rows derived purely from string enumeration."""
    levels = ranked_levels(function, n)
    rows = [[Fraction(0)] * len(levels) for _ in levels]
    rows[0][0] = Fraction(1)
    for k, ws in enumerate(levels):
        if k == 0:
            continue
        assert len(ws) == 1
        rows[k] = string_row(function, n, representative(n, ws[0]))
    return rows


def hitting_times(function, n):
    """Per-level mean hitting times from the enumerated kernel."""
    rows = enumerate_kernel(function, n)
    K = len(rows) - 1
    m = [Fraction(0)] * (K + 1)
    for k in range(1, K + 1):
        up = sum(rows[k][:k])
        m[k] = (1 + sum(rows[k][l] * m[l] for l in range(1, k))) / up
    return m
