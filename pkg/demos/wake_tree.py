"""Walk through the wake tree of the Mandelbrot set.

Run with ``python demos/wake_tree.py``.  Writes ``wake_tree.svg`` next to
the working directory.
"""
from fractions import Fraction as F

from multibrot import (
    angled_internal_address,
    branch_point,
    build,
    kneading_sequence,
    rho_address,
    separate,
)
from multibrot.render import lamination_svg

# Periodic leaves up to period 8 and Misiurewicz groups up to preperiod 3.
lam = build(2, 8, 3)
print(lam.header())
print(len(lam.components), "components,", len(lam.misiurewicz), "Misiurewicz groups")

# The airplane, the rabbit and a few of their neighbours.
for theta in [F(1, 3), F(1, 7), F(3, 7), F(13, 31), F(1, 15)]:
    node = lam.node_of(theta)
    print(f"{str(theta):>6}  {node.id:<7} {str(angled_internal_address(theta, lam)):<24} "
          f"kneading {kneading_sequence(theta, 2)}")

# The internal address can also be read off the kneading sequence alone.
nu = kneading_sequence(F(13, 31), 2)
print("rho-address of 13/31:", rho_address(nu, 8))

# Where do the paths to two landing points part ways?
pairs = [(F(1, 7), F(3, 7)), (F(1, 3), F(3, 7)), (F(9, 56), F(11, 56)), (F(1, 15), F(2, 15))]
for a, b in pairs:
    print(f"branch({a}, {b}) = {branch_point(lam, a, b)}")

# Separation lines between landing points.
for a, b in [(F(9, 56), F(3, 7)), (F(1, 7), F(5, 7)), (F(1, 4), F(3, 4))]:
    print(f"separate({a}, {b}) = {separate(lam, a, b)}")

with open("wake_tree.svg", "w") as fh:
    fh.write(lamination_svg(build(2, 6, 2)))
print("wrote wake_tree.svg")
