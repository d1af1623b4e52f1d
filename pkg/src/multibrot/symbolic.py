"""Kneading sequences, the rho-function and (angled) internal addresses.

Symbol convention: the partition points of ``theta`` are ``(theta + j)/d``.
The open arc ending (counterclockwise) at ``(theta + j)/d`` carries symbol
``j``; for ``d = 2`` this puts symbol 1 on the arc containing ``theta``.  An
orbit point landing on a partition point gets the symbol ``STAR``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Optional, Sequence

from .circle import ONE, ZERO, Angle, classify, format_angle
from .errors import BoundExceeded

if TYPE_CHECKING:
    from .lamination import ComponentNode, Lamination

STAR = -1


def symbol(x: Angle, theta: Angle, d: int) -> int:
    """Symbol of the point ``x`` with respect to the partition of ``theta``."""
    t = d * x - theta
    if t.denominator == 1:
        return STAR
    return (t.numerator // t.denominator + 1) % d


def itinerary(x: Angle, theta: Angle, d: int, length: int) -> tuple[int, ...]:
    """First ``length`` symbols of the orbit of ``x`` w.r.t. ``theta``'s partition.

    Integer arithmetic on a common denominator keeps this fast for long orbits.
    """
    q = x.denominator * theta.denominator // _gcd(x.denominator, theta.denominator)
    p = x.numerator * (q // x.denominator)
    tp = theta.numerator * (q // theta.denominator)
    out = []
    for _ in range(length):
        t = d * p - tp
        if t % q == 0:
            out.append(STAR)
        else:
            out.append((t // q + 1) % d)
        p = (d * p) % q
    return tuple(out)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def _primitive_root(word: tuple[int, ...]) -> tuple[int, ...]:
    n = len(word)
    for m in range(1, n + 1):
        if n % m == 0 and word == word[:m] * (n // m):
            return word[:m]
    return word


@dataclass(frozen=True)
class KneadingSequence:
    """Eventually periodic word, stored in normalized (shortest) form."""

    preperiodic: tuple[int, ...]
    periodic: tuple[int, ...]
    degree: int = 2

    @classmethod
    def normalized(cls, pre: Sequence[int], per: Sequence[int], degree: int = 2) -> "KneadingSequence":
        pre, per = tuple(pre), _primitive_root(tuple(per))
        while pre and pre[-1] == per[-1]:
            pre = pre[:-1]
            per = per[-1:] + per[:-1]
        return cls(pre, per, degree)

    def symbol(self, r: int) -> int:
        """The ``r``-th symbol, 1-indexed."""
        if r < 1:
            raise IndexError(r)
        k = r - 1
        if k < len(self.preperiodic):
            return self.preperiodic[k]
        return self.periodic[(k - len(self.preperiodic)) % len(self.periodic)]

    def prefix(self, length: int) -> tuple[int, ...]:
        return tuple(self.symbol(r) for r in range(1, length + 1))

    @property
    def has_star(self) -> bool:
        return STAR in self.periodic or STAR in self.preperiodic

    def __str__(self) -> str:
        sep = "" if self.degree <= 10 else ","

        def fmt(word):
            return sep.join("★" if s == STAR else str(s) for s in word)

        return f"{fmt(self.preperiodic)}|{fmt(self.periodic)}"


def kneading_sequence(theta: Angle, d: int) -> KneadingSequence:
    """Itinerary of the orbit of ``theta`` under its own partition."""
    if theta in (ZERO, ONE):
        raise ValueError("kneading sequence undefined for angles 0 and 1")
    cls = classify(theta, d)
    word = itinerary(theta, theta, d, cls.preperiod + cls.period)
    return KneadingSequence.normalized(word[: cls.preperiod], word[cls.preperiod :], d)


def rho_address(nu: KneadingSequence, bound: int) -> tuple[int, ...]:
    """Internal address from a kneading sequence via the rho-function.

    ``S_{k+1} = min{ r > S_k : nu_r != nu_{r - S_k} }``; entries above ``bound``
    are not reported.
    """
    entries = [1]
    while True:
        s = entries[-1]
        nxt = None
        for r in range(s + 1, bound + 1):
            if nu.symbol(r) != nu.symbol(r - s):
                nxt = r
                break
        if nxt is None:
            return tuple(entries)
        entries.append(nxt)


@dataclass(frozen=True)
class InternalAddress:
    entries: tuple[int, ...]
    complete: bool = True

    def __str__(self) -> str:
        text = "->".join(str(e) for e in self.entries)
        return text if self.complete else text + "->..."


@dataclass(frozen=True)
class AngledInternalAddress:
    """Periods with the internal angle of the subwake taken at each step.

    The final entry of a complete address carries no angle.  A truncated
    address (``complete=False``) keeps the angle on every entry.
    """

    entries: tuple[tuple[int, Optional[Fraction]], ...]
    complete: bool = True

    @property
    def periods(self) -> tuple[int, ...]:
        return tuple(n for n, _ in self.entries)

    def conjugate(self) -> "AngledInternalAddress":
        return AngledInternalAddress(
            tuple((n, None if u is None else 1 - u) for n, u in self.entries), self.complete
        )

    def __str__(self) -> str:
        parts = [str(n) if u is None else f"{n}({format_angle(u)})" for n, u in self.entries]
        text = "->".join(parts)
        return text if self.complete else text + "->..."


def _address_path(theta: Angle, lam: "Lamination", truncate: bool) -> tuple[list["ComponentNode"], bool]:
    """Component nodes of the internal address of ``theta`` in ``lam``."""
    cls = classify(theta, lam.degree)
    own = lam.node_of(theta)
    if cls.periodic:
        if cls.period > lam.max_period:
            raise BoundExceeded(
                f"{format_angle(theta)} has period {cls.period} > max-period {lam.max_period}",
                lam.max_period,
            )
        complete = True
    else:
        if not truncate:
            raise BoundExceeded(
                f"{format_angle(theta)} is preperiodic: its internal address is infinite",
                lam.max_period,
            )
        complete = False
    chain = [n for n in lam.containers(theta) if n.is_component]
    if cls.periodic and own is not None and own.is_component:
        chain.append(own)
    path = [lam.main]
    rest = [n for n in chain if n is not lam.main]
    while rest:
        best = min(rest, key=lambda n: n.period)
        path.append(best)
        rest = rest[rest.index(best) + 1 :]
    return path, complete


def internal_address(theta: Angle, lam: "Lamination", truncate: bool = False) -> InternalAddress:
    """Internal address of ``theta`` read off the wake tree of ``lam``.

    Periodic angles within the period bound get their full address.
    Preperiodic angles have infinite addresses; with ``truncate=True`` the
    certified prefix (all entries up to the period bound) is returned,
    otherwise :class:`BoundExceeded` is raised.
    """
    path, complete = _address_path(theta, lam, truncate)
    return InternalAddress(tuple(n.period for n in path), complete)


def angled_internal_address(theta: Angle, lam: "Lamination", truncate: bool = False) -> AngledInternalAddress:
    path, complete = _address_path(theta, lam, truncate)
    entries = []
    for k, node in enumerate(path):
        last = k == len(path) - 1
        if last and complete:
            entries.append((node.period, None))
        else:
            entries.append((node.period, lam.subwake_angle(node, theta)))
    return AngledInternalAddress(tuple(entries), complete)
