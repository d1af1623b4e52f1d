"""Ray pairs accumulating at a primitive root, and Misiurewicz subwakes.

Run with ``python demos/approximation.py``.
"""
from fractions import Fraction as F

from multibrot import approximating_pairs, build, build_periodic, misiurewicz_subwakes

lam = build_periodic(2, 12)
airplane = lam.node_of(F(3, 7))
print("airplane root", airplane.root, "primitive:", lam.is_primitive(airplane))

pairs = approximating_pairs(lam, airplane, 4)
gaps = [airplane.lo - p.lower for p in pairs]
for p, g in zip(pairs, gaps):
    print(f"  {str(p):<28} gap {float(g):.3e}")
print("gap ratios:", [str(b / a) for a, b in zip(gaps, gaps[1:])])  # exactly 2^-3

# The rabbit's bifurcation from the main cardioid is not primitive.
try:
    approximating_pairs(lam, lam.node_of(F(1, 7)), 2)
except ValueError as exc:
    print("rabbit:", exc)

# Each arc cut out by a Misiurewicz group holds a periodic root leaf, except the
# one facing the main cardioid.
lam = build(2, 10, 3, 3)
for theta in [F(9, 56), F(1, 4), F(5, 12)]:
    node = lam.node_of(theta)
    print(node.id, [str(a) for a in node.angles])
    for gap in misiurewicz_subwakes(lam, node):
        print("   ", gap)
