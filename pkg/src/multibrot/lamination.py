"""Landing-group lamination of rational parameter rays.

Component nodes carry the ``d`` periodic rays landing at the root (two) and
co-roots (``d - 2``) of a hyperbolic component.  Misiurewicz nodes carry the
preperiodic rays landing at one critically preperiodic parameter.  Nodes are
arranged in the wake forest: the parent of a node is the innermost node whose
wake contains it.
"""

from __future__ import annotations

import bisect
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Union

from .circle import (
    ONE,
    ZERO,
    Angle,
    classify,
    format_angle,
    parse_angle,
    periodic_angles,
    preperiodic_angles,
)
from .errors import BoundExceeded, LaminationError
from .symbolic import itinerary, kneading_sequence

FORMAT_VERSION = "MBLAM v1"

# Stern-Brocot descent for subwake positions gives up past this denominator
MAX_INTERNAL_DENOMINATOR = 4096


@dataclass(frozen=True, order=True)
class Leaf:
    lower: Angle
    upper: Angle
    period: int

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError(f"leaf needs lower < upper, got {self.lower}, {self.upper}")

    def contains(self, theta: Angle) -> bool:
        return self.lower < theta < self.upper

    def __str__(self) -> str:
        return f"{format_angle(self.lower)} {format_angle(self.upper)}"


@dataclass(eq=False)
class ComponentNode:
    id: str
    period: int
    root: Leaf
    coroots: tuple[Angle, ...] = ()
    parent: Optional["Node"] = field(default=None, repr=False)
    _bif_cache: dict = field(default_factory=dict, repr=False)

    is_component = True

    @property
    def angles(self) -> tuple[Angle, ...]:
        return (self.root.lower, *self.coroots, self.root.upper)

    @property
    def lo(self) -> Angle:
        return self.root.lower

    @property
    def hi(self) -> Angle:
        return self.root.upper

    def in_wake(self, theta: Angle) -> bool:
        return self.root.lower < theta < self.root.upper

    def depth(self) -> int:
        k, n = 0, self.parent
        while n is not None:
            k, n = k + 1, n.parent
        return k


@dataclass(eq=False)
class MisiurewiczNode:
    id: str
    preperiod: int
    period: int
    angles: tuple[Angle, ...]
    parent: Optional["Node"] = field(default=None, repr=False)

    is_component = False

    @property
    def zero_gap(self) -> int:
        """Index of the complementary arc containing angle 0.

        Arc ``i`` runs from ``angles[i]`` to ``angles[i+1]``; the last arc wraps
        through 0, so it is always the zero wake.
        """
        return len(self.angles) - 1

    @property
    def lo(self) -> Angle:
        return self.angles[0]

    @property
    def hi(self) -> Angle:
        return self.angles[-1]

    def in_wake(self, theta: Angle) -> bool:
        return self.angles[0] < theta < self.angles[-1] and theta not in self.angles

    def gap_of(self, theta: Angle) -> int:
        """Arc index containing ``theta``; a member angle is assigned its own
        counterclockwise arc."""
        i = bisect.bisect_right(self.angles, theta) - 1
        return self.zero_gap if i < 0 else i

    def gaps(self) -> list[tuple[Angle, Angle]]:
        a = self.angles
        return [(a[i], a[(i + 1) % len(a)]) for i in range(len(a))]

    def depth(self) -> int:
        k, n = 0, self.parent
        while n is not None:
            k, n = k + 1, n.parent
        return k


Node = Union[ComponentNode, MisiurewiczNode]


# -- bifurcation angles ------------------------------------------------------

def _rotation_digits(p: int, q: int) -> tuple[list[int], list[int]]:
    """Binary digits of the two angles of rotation number ``p/q`` for doubling.

    Digit ``j`` (``j = 1..q``) is 1 when the rotated point ``j*p/q`` lies in the
    top arc of length ``p/q``; the arc is closed at 1 for the lower angle and
    closed at ``1 - p/q`` for the upper one.
    """
    lower, upper = [], []
    for j in range(1, q + 1):
        x = (j * p) % q  # position j*p/q scaled by q
        lower.append(1 if x == 0 or x > q - p else 0)
        upper.append(1 if x != 0 and x >= q - p else 0)
    return lower, upper


def bifurcation_angles(node: ComponentNode, u: Fraction, degree: int) -> Leaf:
    """Root leaf of the satellite of ``node`` at internal angle ``u``.

    ``u`` measures position along the component boundary once around, with the
    root at 0 and the co-roots at ``j/(d-1)``; the multiplier there has
    rotation number ``(d-1)u mod 1``.  The main component's angles are read
    off the rotation orbit (digits ``j``/``j+1`` in sector ``j``); for other
    components the digits are replaced by the period-``n`` blocks of the
    component's ``d`` ray angles (tuning).
    """
    u = Fraction(u)
    if not 0 < u < 1:
        raise ValueError(f"internal angle must lie in (0, 1), got {u}")
    cached = node._bif_cache.get(u)
    if cached is not None:
        return cached
    d = degree
    s = (d - 1) * u
    sector = s.numerator // s.denominator
    r = s - sector
    if r == 0:
        raise ValueError(f"internal angle {u} is a co-root position, not a bifurcation")
    lo_bits, hi_bits = _rotation_digits(r.numerator, r.denominator)
    q = r.denominator
    n = node.period
    block = d**n
    blocks = [(a * (block - 1)).numerator if a != ONE else block - 1 for a in node.angles]
    if any((a * (block - 1)).denominator != 1 for a in node.angles):
        raise LaminationError(f"angles of {node.id} are not of period {n}")

    def tuned(bits):
        x = 0
        for b in bits:
            x = x * block + blocks[sector + b]
        return Fraction(x, block**q - 1)

    leaf = Leaf(tuned(lo_bits), tuned(hi_bits), n * q)
    node._bif_cache[u] = leaf
    return leaf


def boundary_interval(node: ComponentNode, u: Fraction, degree: int) -> tuple[Angle, Angle]:
    """Closed angle interval attached to boundary position ``u`` in ``[0, 1]``.

    Degenerate for the root (0 and 1) and co-roots; the satellite root leaf
    otherwise.
    """
    if u == 0:
        return node.lo, node.lo
    if u == 1:
        return node.hi, node.hi
    s = (degree - 1) * u
    if s.denominator == 1:
        c = node.coroots[s.numerator - 1]
        return c, c
    leaf = bifurcation_angles(node, u, degree)
    return leaf.lower, leaf.upper


def subwake_position(node: ComponentNode, theta: Angle, degree: int, max_den: int = MAX_INTERNAL_DENOMINATOR) -> Fraction:
    """Boundary position ``u`` whose closed interval contains ``theta``.

    ``theta`` must lie in the closed root interval of ``node``.  Positions are
    searched by Stern-Brocot descent, using that the intervals are ordered
    like their positions.
    """
    if not node.lo <= theta <= node.hi:
        raise ValueError(f"{format_angle(theta)} outside the wake of {node.id}")
    lo_u, hi_u = Fraction(0), Fraction(1)
    for u in (lo_u, hi_u):
        a, b = boundary_interval(node, u, degree)
        if a <= theta <= b:
            return u
    while True:
        m = Fraction(lo_u.numerator + hi_u.numerator, lo_u.denominator + hi_u.denominator)
        if m.denominator > max_den:
            raise BoundExceeded(
                f"no subwake of {node.id} with denominator <= {max_den} contains {format_angle(theta)}",
                max_den,
            )
        a, b = boundary_interval(node, m, degree)
        if theta < a:
            hi_u = m
        elif theta > b:
            lo_u = m
        else:
            return m


# -- the lamination ----------------------------------------------------------

class Lamination:
    """Immutable-after-build family of landing groups with its wake forest."""

    def __init__(self, degree: int, max_period: int, max_preperiod: int = 0,
                 preperiodic_max_period: Optional[int] = None):
        if degree < 2:
            raise ValueError("degree must be at least 2")
        self.degree = degree
        self.max_period = max_period
        self.max_preperiod = max_preperiod
        self.preperiodic_max_period = preperiodic_max_period
        self.components: list[ComponentNode] = []
        self.misiurewicz: list[MisiurewiczNode] = []
        self.discrepancies: list[str] = []
        self._by_angle: dict[Angle, Node] = {}
        self._by_id: dict[str, Node] = {}
        self._breaks: list[Angle] = []
        self._inner: list[Optional[Node]] = []
        self._children: dict[int, list[Node]] = {}
        self._containers: dict[Angle, tuple[Node, ...]] = {}
        self._rank: Optional[dict[str, int]] = None
        self._by_lower: list[ComponentNode] = []
        self._lower_keys: list[Angle] = []

    # construction helpers
    def _add(self, node: Node) -> None:
        for a in node.angles:
            if a in self._by_angle:
                raise LaminationError(f"angle {format_angle(a)} in two landing groups")
            self._by_angle[a] = node
        if node.id in self._by_id:
            raise LaminationError(f"duplicate node id {node.id}")
        self._by_id[node.id] = node
        (self.components if node.is_component else self.misiurewicz).append(node)

    def _index(self) -> None:
        """Sweep all angles once: parents, planarity, innermost-node table."""
        breaks = sorted(self._by_angle)
        inner: list[Optional[Node]] = []
        stack: list[Node] = []
        children: dict[int, list[Node]] = defaultdict(list)
        for v in breaks:
            node = self._by_angle[v]
            single = len(node.angles) == 1
            if v == node.lo:
                node.parent = stack[-1] if stack else None
                if node.parent is not None:
                    children[id(node.parent)].append(node)
                if not single:
                    stack.append(node)
            elif v == node.hi:
                if not stack or stack[-1] is not node:
                    raise LaminationError(f"landing group {node.id} is linked with {stack[-1].id if stack else 'nothing'}")
                stack.pop()
            elif not stack or stack[-1] is not node:
                raise LaminationError(f"landing group {node.id} is linked with {stack[-1].id if stack else 'nothing'}")
            inner.append(stack[-1] if stack else None)
        if stack:
            raise LaminationError("unclosed landing groups after sweep")
        self._breaks, self._inner, self._children = breaks, inner, dict(children)
        self._containers = {}
        self._rank = None
        self._by_lower = sorted(self.components, key=lambda c: c.lo)
        self._lower_keys = [c.lo for c in self._by_lower]

    # queries
    @property
    def main(self) -> ComponentNode:
        return self.components[0]

    def nodes(self) -> Iterator[Node]:
        yield from self.components
        yield from self.misiurewicz

    def node(self, node_id: str) -> Node:
        return self._by_id[node_id]

    def node_of(self, theta: Angle) -> Optional[Node]:
        """Landing group containing ``theta`` (``None`` if beyond the bounds)."""
        return self._by_angle.get(theta)

    def children(self, node: Node) -> list[Node]:
        return self._children.get(id(node), [])

    def innermost(self, theta: Angle) -> Optional[Node]:
        """Innermost node whose wake strictly contains ``theta``, excluding
        ``theta``'s own landing group."""
        own = self._by_angle.get(theta)
        if own is not None:
            return own.parent
        i = bisect.bisect_right(self._breaks, theta) - 1
        return self._inner[i] if i >= 0 else None

    def containers(self, theta: Angle) -> tuple[Node, ...]:
        """All nodes whose wake strictly contains ``theta`` (own group
        excluded), outermost first."""
        hit = self._containers.get(theta)
        if hit is not None:
            return hit
        out = []
        n = self.innermost(theta)
        while n is not None:
            out.append(n)
            n = n.parent
        out.reverse()
        hit = self._containers[theta] = tuple(out)
        return hit

    def witness_rank(self) -> dict[str, int]:
        """Position of every node id in the separation-witness order:
        components before Misiurewicz groups, then period, preperiod and
        lower angle."""
        if self._rank is None:
            order = sorted(
                self.nodes(),
                key=lambda n: (0 if n.is_component else 1, n.period,
                               0 if n.is_component else n.preperiod, n.lo),
            )
            self._rank = {n.id: i for i, n in enumerate(order)}
        return self._rank

    def components_between(self, lo: Angle, hi: Angle) -> list[ComponentNode]:
        """Component nodes whose root leaf lies in the open interval ``(lo, hi)``."""
        i = bisect.bisect_right(self._lower_keys, lo)
        out = []
        for c in self._by_lower[i:]:
            if c.lo >= hi:
                break
            if c.hi < hi:
                out.append(c)
        return out

    def leaves(self) -> list[Leaf]:
        return [c.root for c in self.components]

    def subwake_angle(self, node: ComponentNode, theta: Angle) -> Fraction:
        return subwake_position(node, theta, self.degree)

    def bifurcation_angles(self, node: ComponentNode, u: Fraction) -> Leaf:
        return bifurcation_angles(node, u, self.degree)

    def is_primitive(self, node: ComponentNode) -> bool:
        """False iff ``node`` is a satellite of its nearest component ancestor."""
        parent = node.parent
        while parent is not None and not parent.is_component:
            parent = parent.parent
        if parent is None:
            return True
        if node.period % parent.period:
            return True
        u = subwake_position(parent, node.lo, self.degree)
        if u in (0, 1) or ((self.degree - 1) * u).denominator == 1:
            return True
        return bifurcation_angles(parent, u, self.degree) != node.root

    # serialization
    def header(self) -> str:
        text = f"{FORMAT_VERSION} d={self.degree} maxper={self.max_period} maxpre={self.max_preperiod}"
        if self.preperiodic_max_period is not None and self.preperiodic_max_period != self.max_period:
            text += f" preper={self.preperiodic_max_period}"
        return text

    def dumps(self) -> str:
        lines = [self.header()]
        for c in sorted(self.components, key=lambda c: (c.period, c.lo)):
            coroots = ",".join(format_angle(a) for a in c.coroots)
            lines.append(f"comp {c.id} n={c.period} root={format_angle(c.lo)},{format_angle(c.hi)} coroots={coroots}")
        for m in sorted(self.misiurewicz, key=lambda m: (m.preperiod, m.period, m.lo)):
            angles = ",".join(format_angle(a) for a in m.angles)
            lines.append(f"misiu {m.id} l={m.preperiod} n={m.period} angles={angles} zerogap={m.zero_gap}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "Lamination":
        lines = text.splitlines()
        if not lines or not lines[0].startswith(FORMAT_VERSION):
            raise ValueError("not a lamination file")
        params = dict(tok.split("=") for tok in lines[0][len(FORMAT_VERSION):].split())
        lam = cls(int(params["d"]), int(params["maxper"]), int(params["maxpre"]),
                  int(params["preper"]) if "preper" in params else
                  (int(params["maxper"]) if int(params["maxpre"]) > 0 else None))
        for line in lines[1:]:
            if not line.strip():
                continue
            kind, node_id, *fields = line.split(" ")
            kv = dict(f.split("=", 1) for f in fields)
            if kind == "comp":
                lo, hi = (parse_angle(a) for a in kv["root"].split(","))
                coroots = tuple(parse_angle(a) for a in kv["coroots"].split(",") if a)
                lam._add(ComponentNode(node_id, int(kv["n"]), Leaf(lo, hi, int(kv["n"])), coroots))
            elif kind == "misiu":
                angles = tuple(parse_angle(a) for a in kv["angles"].split(","))
                lam._add(MisiurewiczNode(node_id, int(kv["l"]), int(kv["n"]), angles))
            else:
                raise ValueError(f"unknown record {kind!r}")
        lam.components.sort(key=lambda c: (c.period, c.lo))
        lam._index()
        return lam

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())

    @classmethod
    def load(cls, path) -> "Lamination":
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())


def _main_node(d: int) -> ComponentNode:
    coroots = tuple(Fraction(j, d - 1) for j in range(1, d - 1))
    return ComponentNode("main", 1, Leaf(ZERO, ONE, 1), coroots)


def _region(lam: Lamination, theta: Angle) -> tuple[int, int]:
    """Gap of the current lamination containing ``theta``: innermost node and
    arc index inside it."""
    node = lam.innermost(theta)
    if node is None:
        return (0, 0)
    return (id(node), bisect.bisect_right(node.angles, theta) - 1)


def build_periodic(d: int, max_period: int) -> Lamination:
    """Periodic landing groups up to ``max_period``.

    Periods are processed in increasing order.  Within each gap of the
    lamination built so far, the period-``n`` angles are grouped ``d`` at a
    time in increasing order (the smallest free angle joins the next free
    angles of the same gap); the outer two angles of a group form the root
    leaf, the inner ones the co-roots.
    """
    if max_period < 1:
        raise ValueError("max_period must be at least 1")
    lam = Lamination(d, max_period)
    lam._add(_main_node(d))
    lam._index()
    for n in range(2, max_period + 1):
        buckets: dict[tuple[int, int], list[Angle]] = defaultdict(list)
        for a in periodic_angles(d, n):
            buckets[_region(lam, a)].append(a)
        groups = []
        for key, angles in buckets.items():
            if len(angles) % d:
                raise LaminationError(f"period {n}: {len(angles)} angles in one gap, not a multiple of {d}")
            for i in range(0, len(angles), d):
                groups.append(angles[i:i + d])
        groups.sort()
        for k, g in enumerate(groups, 1):
            lam._add(ComponentNode(f"c{n}.{k}", n, Leaf(g[0], g[-1], n), tuple(g[1:-1])))
        lam._index()
    return lam


def add_preperiodic(lam: Lamination, max_preperiod: int, max_period: Optional[int] = None) -> Lamination:
    """Add Misiurewicz landing groups with preperiod <= ``max_preperiod`` and
    period <= ``max_period`` (default: the periodic bound).

    Candidates share (preperiod, period) and kneading sequence.  ``theta'``
    joins the group of ``theta`` when its itinerary under ``theta``'s
    partition equals ``theta``'s kneading sequence.  Groups are then split so
    that every group lies in a single gap of the existing lamination; splits
    are recorded in ``lam.discrepancies``.

    Returns a new lamination; ``lam`` is left untouched.
    """
    if max_period is None:
        max_period = lam.max_period
    if max_period > lam.max_period:
        raise BoundExceeded(
            f"preperiodic period bound {max_period} exceeds periodic bound {lam.max_period}", lam.max_period
        )
    d = lam.degree
    out = Lamination.loads(lam.dumps())
    out.max_preperiod = max_preperiod
    out.preperiodic_max_period = max_period
    out.misiurewicz = []
    for m in list(out._by_id.values()):
        if not m.is_component:
            del out._by_id[m.id]
            for a in m.angles:
                del out._by_angle[a]
    out._index()
    for l in range(1, max_preperiod + 1):
        for n in range(1, max_period + 1):
            by_kneading: dict[tuple, list[Angle]] = defaultdict(list)
            for a in preperiodic_angles(d, l, n):
                by_kneading[itinerary(a, a, d, l + n)].append(a)
            groups = []
            for word, angles in by_kneading.items():
                free = list(angles)
                while free:
                    theta = free[0]
                    group = [x for x in free if itinerary(x, theta, d, l + n) == word]
                    free = [x for x in free if x not in group]
                    regions = defaultdict(list)
                    for x in group:
                        regions[_region(out, x)].append(x)
                    if len(regions) > 1:
                        out.discrepancies.append(
                            f"split l={l} n={n} group {','.join(format_angle(x) for x in group)} "
                            f"across {len(regions)} gaps"
                        )
                    groups.extend(sorted(r) for r in regions.values())
            groups.sort()
            for k, g in enumerate(groups, 1):
                out._add(MisiurewiczNode(f"m{l}.{n}.{k}", l, n, tuple(g)))
            out._index()
    return out


def build(d: int, max_period: int, max_preperiod: int = 0, preperiodic_max_period: Optional[int] = None) -> Lamination:
    """Periodic lamination plus, if ``max_preperiod > 0``, Misiurewicz groups."""
    lam = build_periodic(d, max_period)
    if max_preperiod > 0:
        lam = add_preperiodic(lam, max_preperiod, preperiodic_max_period)
    return lam
