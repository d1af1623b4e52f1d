"""Independent reference computations used to check the library.

Nothing here imports from ``multibrot``; the implementations deliberately
take different routes (greedy chord drawing, Moebius inversion, counting
preimages) from the code under test.
"""

from fractions import Fraction

import numpy as np


def mobius(n):
    result, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            result = -result
        p += 1
    if m > 1:
        result = -result
    return result


def exact_period_count(d, n):
    """Number of angles in [0, 1) of exact period n under multiplication by d."""
    return sum(mobius(n // k) * (d**k - 1) for k in range(1, n + 1) if n % k == 0)


def exact_period_angles(d, n):
    full = d**n - 1
    out = []
    for p in range(full):
        x, k = p, 0
        while True:
            x = (x * d) % full
            k += 1
            if x == p:
                break
        if k == n:
            out.append(Fraction(p, full))
    return out


def lavaurs_leaves(max_period):
    """Quadratic minor leaves by greedy chord drawing.

    For each period in turn, the smallest unused angle is joined to the
    smallest larger unused angle of the same period whose chord crosses no
    chord drawn so far.
    """
    lo = np.empty(0)
    hi = np.empty(0)
    leaves = set()
    for n in range(2, max_period + 1):
        free = exact_period_angles(2, n)
        while free:
            a = free.pop(0)
            fa = float(a)
            for i, b in enumerate(free):
                fb = float(b)
                crossing = ((lo < fa) & (fa < hi) & (hi < fb)) | ((fa < lo) & (lo < fb) & (fb < hi))
                if not crossing.any():
                    break
            else:
                raise AssertionError(f"no partner for {a}")
            del free[i]
            leaves.add((a, b))
            lo = np.append(lo, fa)
            hi = np.append(hi, fb)
    return leaves


def symbol(x, theta, d):
    """Symbol of x: the number of preimages of theta below x, mod d (-1 on a preimage)."""
    below = 0
    for j in range(d):
        p = (theta + j) / d
        if p == x:
            return -1
        if p < x:
            below += 1
    return below % d


def kneading_word(x, theta, d, length):
    out = []
    for _ in range(length):
        out.append(symbol(x, theta, d))
        x = (x * d) % 1
    return tuple(out)


def preperiod_period(x, d):
    seen = []
    while x not in seen:
        seen.append(x)
        x = (x * d) % 1
    first = seen.index(x)
    return first, len(seen) - first


def misiurewicz_group(theta, candidates, d):
    """Angles among ``candidates`` whose rays land with the preperiodic ray at ``theta``."""
    l, n = preperiod_period(theta, d)
    own = kneading_word(theta, theta, d, l + n)
    return {
        x for x in candidates
        if preperiod_period(x, d) == (l, n) and kneading_word(x, theta, d, l + n) == own
    }


def chords_cross(a, b, c, e):
    """Whether chords (a, b) and (c, e), each with lower end first, cross inside the disk."""
    return a < c < b < e or c < a < e < b


def linked_pairs(groups):
    """Pairs of groups (sorted angle tuples) whose convex hulls cross."""
    edges = []
    for gi, g in enumerate(groups):
        ring = list(g)
        for x, y in zip(ring, ring[1:] + ring[:1]):
            if x != y:
                edges.append((float(min(x, y)), float(max(x, y)), gi))
    arr = np.array([(a, b) for a, b, _ in edges])
    owner = np.array([g for _, _, g in edges])
    bad = set()
    for (a, b, gi) in edges:
        lo, hi = arr[:, 0], arr[:, 1]
        hit = ((a < lo) & (lo < b) & (b < hi)) | ((lo < a) & (a < hi) & (hi < b))
        for gj in set(owner[hit].tolist()):
            if gj != gi:
                bad.add(tuple(sorted((gi, gj))))
    return bad


def denominators_upto(q_max):
    return sorted({Fraction(p, q) for q in range(2, q_max + 1) for p in range(1, q)})
