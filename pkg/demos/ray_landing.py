"""Trace parameter rays and watch pairs of them land together.

Run with ``python demos/ray_landing.py``.  The first call compiles the
tracing kernel, which takes a few seconds.
"""
import cmath
import math
from fractions import Fraction as F

from multibrot.numerics import escape_iterations, trace_parameter_ray, validate_leaf
from multibrot.render import RenderOptions, set_image

print("c = 0 escapes?", escape_iterations(0) is not None)
print("c = 1 escapes after", escape_iterations(1), "steps")

# Parabolic roots: the landing point follows from z^2 + c = z with multiplier e^{2 pi i p/q}.
def root(u):
    lam = cmath.exp(2j * math.pi * u)
    return lam / 2 - lam * lam / 4

for theta, u in [(F(0), 0), (F(1, 3), F(1, 2)), (F(1, 7), F(1, 3))]:
    ray = trace_parameter_ray(2, theta)
    print(f"ray {theta}: {len(ray.points)} points, lands at {ray.landing:.6f}, "
          f"expected {root(u):.6f}")

# Convergence near parabolic points is slow (like 1/log(1/t)); the landing
# estimate extrapolates the tail, the raw end point does not.
ray = trace_parameter_ray(2, F(1, 3))
print("raw end point error :", abs(ray.points[-1] + 0.75))
print("extrapolated error  :", abs(ray.landing + 0.75))

# Misiurewicz points are reached directly.
for group in [(F(1, 2),), (F(9, 56), F(11, 56), F(15, 56)), (F(1, 4), F(3, 4))]:
    print(validate_leaf(group, 2, 1e-3))

img = set_image(2, RenderOptions(size=400, overlay_rays=[F(1, 3), F(2, 3), F(1, 7), F(2, 7), F(9, 56), F(11, 56), F(15, 56)]))
img.save("rays.png")
print("wrote rays.png", img.metadata)
