"""Exact arithmetic on rational angles of the circle and the d-tupling map.

Angles are :class:`fractions.Fraction` values in ``[0, 1]``.  The value ``1``
is kept distinct from ``0``: it is the upper end of the main component's
degenerate root pair and is fixed by every ``map_d``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple

Angle = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


class AngleClass(NamedTuple):
    preperiod: int
    period: int

    @property
    def periodic(self) -> bool:
        return self.preperiod == 0


def angle(p: int, q: int = 1) -> Angle:
    """Build a reduced angle ``p/q`` with ``0 <= p/q <= 1``."""
    if q <= 0:
        raise ValueError(f"denominator must be positive, got {q}")
    a = Fraction(p, q)
    if not 0 <= a <= 1:
        raise ValueError(f"angle {a} outside [0, 1]")
    return a


def parse_angle(text: str) -> Angle:
    """Parse ``p/q`` (or a bare integer ``0``/``1``)."""
    text = text.strip()
    if "/" in text:
        num, _, den = text.partition("/")
        try:
            return angle(int(num), int(den))
        except ValueError as exc:
            raise ValueError(f"bad angle {text!r}: {exc}") from None
    try:
        return angle(int(text))
    except ValueError:
        raise ValueError(f"bad angle {text!r}") from None


def format_angle(a: Angle) -> str:
    return f"{a.numerator}/{a.denominator}"


def map_d(theta: Angle, d: int) -> Angle:
    """Multiplication by ``d`` modulo 1; the angle 1 is fixed."""
    if d < 2:
        raise ValueError("degree must be at least 2")
    if theta == ONE:
        return ONE
    x = theta * d
    return x - (x.numerator // x.denominator)


def orbit(theta: Angle, d: int, steps: int) -> list[Angle]:
    out = [theta]
    for _ in range(steps):
        out.append(map_d(out[-1], d))
    return out


def classify(theta: Angle, d: int) -> AngleClass:
    """Exact (preperiod, period) of ``theta`` under ``map_d``.

    Works on numerators modulo the denominator, so the orbit is a sequence of
    integers and the first repeat is found with a dict.
    """
    if theta == ONE or theta == ZERO:
        return AngleClass(0, 1)
    p, q = theta.numerator, theta.denominator
    seen: dict[int, int] = {}
    k = 0
    while p not in seen:
        seen[p] = k
        p = (p * d) % q
        k += 1
    first = seen[p]
    return AngleClass(first, k - first)


def orientation(a: Angle, b: Angle, c: Angle) -> int:
    """Circular orientation of three angles.

    Returns ``1`` if ``a -> b -> c`` runs counterclockwise, ``-1`` if
    clockwise and ``0`` if two of them coincide (0 and 1 count as one point).
    """
    a, b, c = (x % 1 for x in (a, b, c))
    if a == b or b == c or a == c:
        return 0
    # counterclockwise iff the rotation of (a, b, c) is sorted
    if (a < b < c) or (b < c < a) or (c < a < b):
        return 1
    return -1


def in_open_arc(x: Angle, lo: Angle, hi: Angle) -> bool:
    """Whether ``x`` lies on the open counterclockwise arc from ``lo`` to ``hi``."""
    return orientation(lo, x, hi) == 1


def _divisors(n: int) -> list[int]:
    return [m for m in range(1, n + 1) if n % m == 0]


def _has_exact_period(p: int, d: int, n: int) -> bool:
    """Whether ``p/(d^n-1)`` has exact period ``n`` (``0 < p < d^n-1``)."""
    full = d**n - 1
    for m in _divisors(n)[:-1]:
        # period divides m iff (d^n-1)/(d^m-1) divides p
        if p % (full // (d**m - 1)) == 0:
            return False
    return True


def periodic_angles(d: int, n: int) -> list[Angle]:
    """All angles of exact period ``n``, ascending.

    For ``n == 1`` the list holds the fixed angles ``j/(d-1)`` and the
    distinguished angle 1.
    """
    if n < 1:
        raise ValueError("period must be positive")
    if n == 1:
        return [Fraction(j, d - 1) for j in range(d - 1)] + [ONE]
    full = d**n - 1
    return [Fraction(p, full) for p in range(1, full) if _has_exact_period(p, d, n)]


def count_periodic(d: int, n: int) -> int:
    return len(periodic_angles(d, n))


def preperiodic_angles(d: int, l: int, n: int) -> list[Angle]:
    """All angles with exact preperiod ``l >= 1`` and period ``n``, ascending.

    Built by pulling back the period-``n`` cycle: the first level consists of
    the non-periodic preimages, each further level of all preimages.
    """
    if l < 1:
        raise ValueError("preperiod must be at least 1")
    full = d**n - 1
    if n == 1:
        cycle = [Fraction(j, d - 1) for j in range(d - 1)]
    else:
        cycle = periodic_angles(d, n)
    # numerators over the common denominator d^j * full at level j
    level = {(x * full).numerator for x in cycle}
    den = full
    periodic = level
    for j in range(l):
        den_next = den * d
        nxt = set()
        for p in level:
            for k in range(d):
                nxt.add(p + k * den)
        if j == 0:
            # drop the periodic preimages; rescale members of the cycle
            nxt -= {p * d for p in periodic}
        level = nxt
        den = den_next
    return sorted(Fraction(p, den) for p in level)
