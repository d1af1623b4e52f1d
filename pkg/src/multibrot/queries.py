"""Wake, branch-point, separation and fiber queries on a finite lamination.

Every query is answered from the landing groups present in the lamination.
When the bound is too coarse to decide, an :class:`Undecided` value comes
back instead of a guess.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Union

from .circle import ONE, ZERO, Angle, classify, format_angle
from .errors import BoundExceeded
from .lamination import (
    ComponentNode,
    Lamination,
    Leaf,
    MisiurewiczNode,
    Node,
    bifurcation_angles,
    boundary_interval,
    subwake_position,
)
from .symbolic import itinerary


@dataclass(frozen=True)
class Undecided:
    bound: int
    reason: str = ""

    def __str__(self) -> str:
        return "undecided"


@dataclass(frozen=True)
class SameClass:
    group: Optional[str] = None

    def __str__(self) -> str:
        return "same-class"


@dataclass(frozen=True)
class SeparationWitness:
    """Two rays forming a separation line.

    ``kind`` is ``"pair"`` (a landing pair of rays, periodic unless it comes
    from a Misiurewicz group) or ``"comp"`` (two boundary rays of ``node``
    joined through the component).  ``sides[i]`` is 1 when the ``i``-th input
    lies on the open arc ``(rays[0], rays[1])``.
    """

    kind: str
    rays: tuple[Angle, Angle]
    sides: tuple[int, int]
    node: Optional[Node] = field(default=None, compare=False)
    period: int = 0

    @property
    def periodic(self) -> bool:
        return self.kind == "comp" or (self.node is not None and self.node.is_component)

    def separates(self, a: Angle, b: Angle) -> bool:
        lo, hi = self.rays
        if a in self.rays or b in self.rays:
            return False
        return (lo < a < hi) != (lo < b < hi)

    def __str__(self) -> str:
        a, b = (format_angle(x) for x in self.rays)
        if self.kind == "comp":
            return f"comp {self.node.id} via {a} {b}"
        return f"pair {a} {b}"


SeparationResult = Union[SeparationWitness, SameClass, Undecided]


@dataclass(frozen=True)
class BranchResult:
    case: str  # "in-wake" | "component-branch" | "misiurewicz-branch" | "undecided"
    node: Optional[Node] = None
    parts: tuple = ()
    contains: Optional[Angle] = None

    @property
    def decided(self) -> bool:
        return self.case != "undecided"

    def __str__(self) -> str:
        if self.case == "in-wake":
            return f"inwake {self.node.id}"
        if self.case == "component-branch":
            return f"branch comp {self.node.id} {format_angle(self.parts[0])} {format_angle(self.parts[1])}"
        if self.case == "misiurewicz-branch":
            return f"branch misiu {self.node.id} {self.parts[0]} {self.parts[1]}"
        return "undecided"


def _check(theta: Angle) -> None:
    if theta in (ZERO, ONE):
        raise ValueError("angles 0 and 1 are not valid query inputs")


def in_wake(node: Node, theta: Angle) -> bool:
    return node.in_wake(theta)


def _position(lam: Lamination, node: ComponentNode, theta: Angle) -> Optional[Fraction]:
    try:
        return subwake_position(node, theta, lam.degree)
    except BoundExceeded:
        return None


def _part(lam: Lamination, node: Node, theta: Angle):
    """Which piece of ``node``'s wake holds ``theta``: the boundary position
    for components, the gap index for Misiurewicz groups."""
    if node.is_component:
        return _position(lam, node, theta)
    return node.gap_of(theta)


def _deepest_common(lam: Lamination, a: Angle, b: Angle) -> Optional[Node]:
    ca, cb = lam.containers(a), lam.containers(b)
    common = None
    for x, y in zip(ca, cb):
        if x is not y:
            break
        common = x
    return common


def branch_point(lam: Lamination, theta1: Angle, theta2: Angle) -> BranchResult:
    """Locate where the paths to two landing points part ways.

    Either one input's landing group has the other in its wake, or the two
    lie in different subwakes of one component or one Misiurewicz group.
    """
    _check(theta1)
    _check(theta2)
    if theta1 == theta2:
        raise ValueError("branch_point needs two distinct angles")
    g1, g2 = lam.node_of(theta1), lam.node_of(theta2)
    if g1 is not None and g1 is g2:
        if g1.is_component:
            return BranchResult("in-wake", g1, contains=theta2)
        return BranchResult("misiurewicz-branch", g1, (g1.gap_of(theta1), g1.gap_of(theta2)))
    if g1 is not None and g1.in_wake(theta2):
        return BranchResult("in-wake", g1, contains=theta2)
    if g2 is not None and g2.in_wake(theta1):
        return BranchResult("in-wake", g2, contains=theta1)
    node = _deepest_common(lam, theta1, theta2)
    if node is None:
        return BranchResult("undecided")
    p1, p2 = _part(lam, node, theta1), _part(lam, node, theta2)
    if p1 is None or p2 is None or p1 == p2:
        return BranchResult("undecided", node)
    if node.is_component:
        return BranchResult("component-branch", node, (p1, p2))
    return BranchResult("misiurewicz-branch", node, (p1, p2))


# -- separation --------------------------------------------------------------

def _simplest_between(a: Fraction, b: Fraction) -> Fraction:
    """Fraction with least denominator strictly between ``a < b`` in [0, 1]."""
    lo, hi = (0, 1), (1, 1)
    while True:
        m = Fraction(lo[0] + hi[0], lo[1] + hi[1])
        if m <= a:
            lo = (m.numerator, m.denominator)
        elif m >= b:
            hi = (m.numerator, m.denominator)
        else:
            return m


def _sides(lo: Angle, hi: Angle, a: Angle, b: Angle) -> tuple[int, int]:
    return (int(lo < a < hi), int(lo < b < hi))


def _pair_witness(lam: Lamination, a: Angle, b: Angle, periodic: bool, preperiodic: bool) -> Optional[SeparationWitness]:
    ca, cb = set(lam.containers(a)), set(lam.containers(b))
    # a component wake holding both angles cannot separate them
    candidates = ca ^ cb
    if preperiodic:
        candidates.update(n for n in ca & cb if not n.is_component)
    for own in (lam.node_of(a), lam.node_of(b)):
        if own is not None and own.is_component:
            candidates.add(own)
    rank = lam.witness_rank()
    for node in sorted(candidates, key=lambda n: rank[n.id]):
        if node.is_component:
            if not periodic:
                continue
            lo, hi = node.lo, node.hi
            if node is lam.main or a in (lo, hi) or b in (lo, hi):
                continue
            if (lo < a < hi) == (lo < b < hi):
                continue
            rays = (lo, hi)
        else:
            if not preperiodic or a in node.angles or b in node.angles:
                continue
            ga, gb = node.gap_of(a), node.gap_of(b)
            if ga == gb:
                continue
            gap = ga if ga != node.zero_gap else gb
            rays = (node.angles[gap], node.angles[gap + 1])
        return SeparationWitness("pair", rays, _sides(*rays, a, b), node, node.period)
    return None


def _crossing_witness(lam: Lamination, a: Angle, b: Angle) -> Optional[SeparationWitness]:
    """Separation through the deepest component whose closed wake holds both
    angles at different boundary positions."""
    chain = [n for n in lam.containers(a) if n.is_component]
    own = lam.node_of(a)
    if own is not None and own.is_component:
        chain.append(own)
    node = None
    for c in reversed(chain):
        if c.lo <= b <= c.hi:
            node = c
            break
    if node is None:
        return None
    ua, ub = _position(lam, node, a), _position(lam, node, b)
    if ua is None or ub is None or ua == ub:
        return None
    d = lam.degree
    lo_u, hi_u = min(ua, ub), max(ua, ub)
    if lo_u > 0 and hi_u < 1:
        mid = _simplest_between(lo_u, hi_u)
        rays = (node.lo, boundary_interval(node, mid, d)[0])
    else:
        m = hi_u if lo_u == 0 else lo_u
        left = boundary_interval(node, _simplest_between(Fraction(0), m), d)[1]
        right = boundary_interval(node, _simplest_between(m, Fraction(1)), d)[0]
        rays = (left, right)
    w = SeparationWitness("comp", rays, _sides(*rays, a, b), node, node.period)
    if not w.separates(a, b):
        return None
    return w


WITNESS_KINDS = ("periodic", "any", "preperiodic")


def separate(lam: Lamination, theta1: Angle, theta2: Angle, witnesses: str = "periodic") -> SeparationResult:
    """Find a separation line between the landing points of two rays.

    Ray-pair witnesses are preferred (minimal period, then minimal lower
    angle); otherwise a line through a component is tried.  ``witnesses``
    selects the admissible lines: ``"periodic"`` (root pairs and component
    crossings), ``"any"`` (also pairs of rays from one Misiurewicz group) or
    ``"preperiodic"`` (Misiurewicz pairs only).
    """
    if witnesses not in WITNESS_KINDS:
        raise ValueError(f"witnesses must be one of {WITNESS_KINDS}")
    _check(theta1)
    _check(theta2)
    g1 = lam.node_of(theta1)
    if theta1 == theta2 or (g1 is not None and g1 is lam.node_of(theta2)):
        return SameClass(g1.id if g1 is not None else None)
    w = _pair_witness(lam, theta1, theta2, witnesses != "preperiodic", witnesses != "periodic")
    if w is None and witnesses != "preperiodic":
        w = _crossing_witness(lam, theta1, theta2)
    if w is None:
        return Undecided(lam.max_period, f"no witness up to period {lam.max_period}")
    return w


def same_comb_class(lam: Lamination, theta1: Angle, theta2: Angle) -> Union[bool, Undecided]:
    _check(theta1)
    _check(theta2)
    g1, g2 = lam.node_of(theta1), lam.node_of(theta2)
    if theta1 == theta2 or (g1 is not None and g1 is g2):
        return True
    if g1 is not None and g2 is not None:
        return False
    res = separate(lam, theta1, theta2)
    if isinstance(res, SeparationWitness):
        return False
    return res


def characteristic_ray_pairs(lam: Lamination, theta: Angle) -> list[Leaf]:
    """Ray pairs whose wake strictly contains ``theta``, outermost first.

    Root leaves of enclosing components, and for an enclosing Misiurewicz
    group the two rays bounding the arc that holds ``theta``.  These rays also
    land together in the dynamic plane of every parameter on the ``theta`` ray.
    """
    _check(theta)
    out = []
    for n in lam.containers(theta):
        if n is lam.main:
            continue
        if n.is_component:
            out.append(n.root)
        else:
            g = n.gap_of(theta)
            out.append(Leaf(n.angles[g], n.angles[g + 1], n.period))
    return out


# -- fibers ------------------------------------------------------------------

@dataclass
class FiberPartition:
    """Classes of rational angles whose landing points cannot be told apart.

    ``classes`` holds the decided classes: landing groups of the lamination,
    and singletons for angles outside it.  ``clusters`` lists sets of angles
    (each containing one angle outside the lamination or more) for which
    some pairs may still be undecided.
    """

    classes: list[tuple[Angle, ...]]
    clusters: list[tuple[Angle, ...]]
    lamination: Lamination = field(repr=False)

    def class_of(self, theta: Angle) -> tuple[Angle, ...]:
        for c in self.classes:
            if theta in c:
                return c
        raise KeyError(theta)

    def undecided_pairs(self) -> Iterator[tuple[Angle, Angle]]:
        for cluster in self.clusters:
            for i, a in enumerate(cluster):
                for b in cluster[i + 1:]:
                    if isinstance(separate(self.lamination, a, b), Undecided):
                        yield a, b


def fiber_partition(lam: Lamination, angles: Iterable[Angle]) -> FiberPartition:
    groups: dict[str, list[Angle]] = defaultdict(list)
    loose: list[Angle] = []
    for a in sorted(set(angles)):
        node = lam.node_of(a)
        if node is None:
            loose.append(a)
        else:
            groups[node.id].append(a)
    classes = [tuple(g) for g in groups.values()] + [(a,) for a in loose]
    classes.sort()
    buckets: dict[tuple, list[Angle]] = defaultdict(list)
    for a in loose:
        node = lam.innermost(a)
        key = (node.id, _region_index(node, a)) if node is not None else (None, 0)
        buckets[key].append(a)
    for group in groups.values():
        # landing-group members sit on the boundary of the cluster around them
        for a in group:
            node = lam.innermost(a)
            key = (node.id, _region_index(node, a)) if node is not None else (None, 0)
            if key in buckets:
                buckets[key].append(a)
    clusters = sorted(tuple(sorted(b)) for b in buckets.values() if len(b) > 1)
    return FiberPartition(classes, clusters, lam)


def _region_index(node: Node, theta: Angle) -> int:
    import bisect

    return bisect.bisect_right(node.angles, theta)


# -- approximating pairs and Misiurewicz subwakes ---------------------------

def lands_together(lam: Lamination, a: Angle, b: Angle) -> bool:
    """Whether the parameter rays at ``a`` and ``b`` land at one point.

    Periodic angles are looked up in the lamination; preperiodic ones use the
    itinerary criterion at the critical value.
    """
    d = lam.degree
    ca, cb = classify(a, d), classify(b, d)
    if ca != cb:
        return False
    if ca.periodic:
        if ca.period > lam.max_period:
            raise BoundExceeded(f"period {ca.period} beyond max-period {lam.max_period}", lam.max_period)
        return lam.node_of(a) is lam.node_of(b)
    length = ca.preperiod + ca.period
    return itinerary(b, a, d, length) == itinerary(a, a, d, length)


def unlinked(lam: Lamination, a: Angle, b: Angle) -> bool:
    """Whether the chord ``(a, b)`` crosses no landing group of ``lam``."""
    nodes = set(lam.containers(a)) | set(lam.containers(b))
    for own in (lam.node_of(a), lam.node_of(b)):
        if own is not None:
            nodes.add(own)
    for node in nodes:
        inside = any(a < x < b for x in node.angles)
        outside = any(x < a or x > b for x in node.angles)
        if inside and outside and node is not lam.main:
            return False
    return True


def _seed(lam: Lamination, root: ComponentNode) -> Optional[tuple[Angle, Angle]]:
    d, k = lam.degree, root.period
    th, thp = root.lo, root.hi
    orbit = set()
    x, y = th, thp
    for _ in range(k):
        x = x * d % 1
        y = y * d % 1
        orbit.update((x, y))
    for node in reversed(lam.containers(th)):
        if node.is_component:
            if node is lam.main:
                continue
            lo, hi = node.lo, node.hi
        else:
            gap = node.gap_of(th)
            if gap == node.zero_gap:
                continue
            lo, hi = node.angles[gap], node.angles[gap + 1]
        if not (lo < th and thp < hi):
            continue
        if any(lo < z < th or thp < z < hi for z in orbit):
            continue
        return lo, hi
    return None


def approximating_pairs(lam: Lamination, root: Union[ComponentNode, Leaf], count: int) -> list[Leaf]:
    """Ray pairs accumulating on the root of a primitive component.

    A seed pair around the root is pulled back by the inverse branches of
    ``z -> d^k z`` fixing the two root angles, which contracts the gaps by
    ``d^-k`` at every step.  Each pair is checked to land together and to be
    unlinked with ``lam``.
    """
    node = root if isinstance(root, ComponentNode) else lam.node_of(root.lower)
    if node is None or not node.is_component or node.root != (root.root if isinstance(root, ComponentNode) else root):
        raise ValueError("root must be the root leaf of a component in the lamination")
    if node is lam.main or not lam.is_primitive(node):
        raise ValueError(f"{node.id} is not primitive")
    seed = _seed(lam, node)
    if seed is None:
        raise BoundExceeded(f"no seed pair around {node.id} up to period {lam.max_period}", lam.max_period)
    d, k = lam.degree, node.period
    th, thp = node.lo, node.hi
    out = []
    for m in range(1, count + 1):
        scale = Fraction(1, d ** (m * k))
        a = th - scale * (th - seed[0])
        b = thp + scale * (seed[1] - thp)
        if not lands_together(lam, a, b) or not unlinked(lam, a, b):
            raise BoundExceeded(f"pull-back {m} of the seed around {node.id} failed verification", lam.max_period)
        out.append(Leaf(a, b, classify(a, d).period))
    return out


@dataclass(frozen=True)
class SubwakeGap:
    index: int
    lower: Angle
    upper: Angle
    zero: bool
    witness: Optional[ComponentNode]

    def __str__(self) -> str:
        w = "none" if self.witness is None else f"{self.witness.id} {self.witness.root}"
        tag = " zero" if self.zero else ""
        return f"gap {self.index} {format_angle(self.lower)} {format_angle(self.upper)}{tag} witness {w}"


def misiurewicz_subwakes(lam: Lamination, node: MisiurewiczNode, strict: bool = True) -> list[SubwakeGap]:
    """Complementary arcs of a Misiurewicz group with a periodic witness each.

    The witness for a non-zero arc is the lowest-period root leaf inside it;
    for the zero arc it is the closest enclosing root leaf (absent if only the
    main component encloses the group).
    """
    out = []
    enclosing = None
    for c in reversed(lam.containers(node.lo)):
        if c.is_component and c is not lam.main:
            enclosing = c
            break
    for i, (lo, hi) in enumerate(node.gaps()):
        if i == node.zero_gap:
            out.append(SubwakeGap(i, lo, hi, True, enclosing))
            continue
        inside = lam.components_between(lo, hi)
        witness = min(inside, key=lambda c: (c.period, c.lo), default=None)
        if witness is None and strict:
            raise BoundExceeded(
                f"no periodic witness in gap {i} of {node.id} up to period {lam.max_period}", lam.max_period
            )
        out.append(SubwakeGap(i, lo, hi, False, witness))
    return out
