"""Escape-time membership and Newton continuation of parameter rays.

A parameter ray of angle ``theta`` at potential ``t`` is the point ``c`` with
``z_{k+1}(c) = exp(d^k (t + 2 pi i theta))``, where ``z_1 = c`` and
``z_{j+1} = z_j^d + c``.  The integer ``k`` is chosen per point so the right
hand side has modulus around ``exp(L)``; the phase ``d^k theta mod 1`` is
computed exactly from the rational angle.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np
from numba import njit

from .circle import Angle, format_angle
from .errors import TraceStalled

NEWTON_TOL = 1e-12
MAX_HALVINGS = 40
LOG_RADIUS = math.log(1e4)
TAIL_POINTS = 8
DEFAULT_DEPTH = 4
DEFAULT_T_MIN = 1e-150


def default_escape_radius(c: complex, d: int) -> float:
    return max(2.0 ** (1.0 / (d - 1)), abs(c)) + 1.0


def escape_iterations(c: complex, d: int = 2, max_iter: int = 1000, escape_radius: Optional[float] = None) -> Optional[int]:
    """Index of the first critical-orbit iterate beyond the escape radius.

    ``None`` means the orbit stayed bounded for ``max_iter`` steps.  The
    critical orbit is ``z_0 = 0, z_1 = c, ...``.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be positive")
    r = default_escape_radius(c, d) if escape_radius is None else escape_radius
    n = _escape(complex(c), d, max_iter, r * r)
    return None if n < 0 else n


@njit(cache=True)
def _escape(c, d, max_iter, r2):
    z = 0j
    for n in range(1, max_iter + 1):
        z = z**d + c
        if z.real * z.real + z.imag * z.imag > r2:
            return n
    return -1


@njit(cache=True)
def escape_grid(re, im, d, max_iter, r2):
    """Escape counts on the grid ``re x im`` (-1 for bounded points)."""
    out = np.empty((im.shape[0], re.shape[0]), dtype=np.int32)
    for i in range(im.shape[0]):
        for j in range(re.shape[0]):
            out[i, j] = _escape(complex(re[j], im[i]), d, max_iter, r2)
    return out


@njit(cache=True, nogil=True)
def _newton(c, d, k, w, tol, max_steps):
    """Solve ``z_{k+1}(c) = w``; returns (c, ok)."""
    for _ in range(max_steps):
        z = c
        dz = 1.0 + 0j
        for _j in range(k):
            dz = d * z ** (d - 1) * dz + 1.0
            z = z**d + c
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            return c, False
        if dz == 0:
            return c, False
        step = (z - w) / dz
        c = c - step
        if not (math.isfinite(c.real) and math.isfinite(c.imag)):
            return c, False
        if abs(step) <= tol * max(1.0, abs(c)):
            return c, True
    return c, False


@njit(cache=True, nogil=True)
def _trace_kernel(d, phases, log_t0, log_tmin, h0, log_r, tol, max_halvings, max_newton, out_logt, out_c):
    """Continue the ray from potential ``exp(log_t0)`` down to ``exp(log_tmin)``.

    Writes accepted points into ``out_logt``/``out_c`` and returns
    ``(count, status, halvings)`` with status 0 = reached t_min, 1 = stalled,
    2 = out of buffer, 3 = stopped at the precision floor (the trace had
    stopped moving before Newton broke down).
    """
    ln_d = math.log(d)
    two_pi = 2.0 * math.pi
    log_t = log_t0
    c = math.exp(log_r) * complex(math.cos(two_pi * phases[0]), math.sin(two_pi * phases[0]))
    out_logt[0] = log_t
    out_c[0] = c
    count = 1
    h = h0
    halvings = 0
    last_jump = -1.0
    still = 0
    cap = out_logt.shape[0]
    while log_t > log_tmin:
        if count >= cap:
            return count, 2, halvings
        nxt = max(log_t - h, log_tmin)
        # k with d^k t in [L, dL)
        k = int(math.ceil((math.log(log_r) - nxt) / ln_d))
        if k < 0:
            k = 0
        if k >= phases.shape[0]:
            return count, 1, halvings
        mod = math.exp(math.exp(k * ln_d + nxt))
        ph = two_pi * phases[k]
        w = mod * complex(math.cos(ph), math.sin(ph))
        c_new, ok = _newton(c, d, k, w, tol, max_newton)
        noise = 1e3 * tol * max(1.0, abs(c))
        if ok:
            jump = abs(c_new - c)
            # reject jumps onto a neighbouring ray; tiny moves are rounding noise
            if last_jump > 0.0 and jump > 16.0 * last_jump + noise:
                ok = False
        if ok:
            still = still + 1 if jump <= noise else 0
            last_jump = jump
            c = c_new
            log_t = nxt
            out_logt[count] = log_t
            out_c[count] = c
            count += 1
        elif still >= 8:
            return count, 3, halvings
        else:
            h *= 0.5
            halvings += 1
            if halvings > max_halvings:
                return count, 1, halvings
    return count, 0, halvings


@dataclass
class TracedRay:
    """Accepted points of one ray trace with a landing estimate.

    ``residual`` is the diameter of the last ``tail`` points.  The landing
    estimate is either the last point or, when the tail still drifts (as it
    does near parabolic parameters, at rate ``1/log(1/t)``), a polynomial
    extrapolation in ``s = 1/log(1/t)`` to ``s = 0``; whichever has the smaller
    error indicator wins.  ``landing_error`` is that indicator.
    """

    angle: Angle
    degree: int
    potentials: np.ndarray
    points: np.ndarray
    halvings: int = 0
    complete: bool = True
    at_floor: bool = False
    tail: int = TAIL_POINTS
    landing: complex = field(init=False)
    landing_error: float = field(init=False)
    residual: float = field(init=False)

    def __post_init__(self):
        pts = self.points[-self.tail:]
        self.residual = float(np.abs(pts[:, None] - pts[None, :]).max()) if len(pts) > 1 else math.inf
        self.landing, self.landing_error = complex(self.points[-1]), self.residual
        if self.at_floor:
            return
        lo, hi = self._extrapolate(2), self._extrapolate(3)
        if lo is not None and hi is not None:
            # the tail diameter understates a slow drift; the distance to the
            # extrapolated limit does not
            raw_error = max(self.residual, abs(self.landing - hi))
            if abs(hi - lo) < raw_error:
                self.landing, self.landing_error = complex(hi), float(abs(hi - lo))
            else:
                self.landing_error = raw_error

    def _extrapolate(self, degree: int) -> Optional[complex]:
        t = self.potentials
        m = t < 1e-3
        if m.sum() < 8 * (degree + 1):
            return None
        s = 1.0 / np.log(1.0 / t[m])
        smin = s.min()
        w = s <= 5 * smin
        if w.sum() < 8 * (degree + 1):
            return None
        coef, *_ = np.linalg.lstsq(np.vander(s[w] / smin, degree + 1), self.points[m][w], rcond=None)
        return complex(coef[-1])

    def dump(self) -> str:
        lines = [f"t={t:.9g} c={z.real:.9g} {z.imag:.9g}" for t, z in zip(self.potentials, self.points)]
        z = self.landing
        lines.append(f"land={z.real:.9g} {z.imag:.9g} resid={self.residual:.3g}")
        return "\n".join(lines) + "\n"


def _phases(theta: Fraction, d: int, count: int) -> np.ndarray:
    p, q = theta.numerator, theta.denominator
    out = np.empty(count)
    for k in range(count):
        out[k] = (p % q) / q
        p = (p * d) % q
    return out


def trace_parameter_ray(
    d: int,
    theta: Angle,
    depth: int = DEFAULT_DEPTH,
    t_min: float = DEFAULT_T_MIN,
    newton_tol: float = NEWTON_TOL,
    max_halvings: int = MAX_HALVINGS,
    log_radius: float = LOG_RADIUS,
    max_points: int = 1_000_000,
) -> TracedRay:
    """Trace the parameter ray of angle ``theta`` from far out down to ``t_min``.

    ``depth`` is the number of points per ``d``-fold decrease of the
    potential.  The potential step is halved whenever Newton fails or the
    new point jumps away from the previous ones, and is never enlarged again.
    Raises :class:`TraceStalled` (carrying the partial ray) if the step has
    to be halved more than ``max_halvings`` times or more than ``max_points``
    points would be needed.
    """
    if d < 2:
        raise ValueError("degree must be at least 2")
    if depth < 1 or not t_min > 0:
        raise ValueError("depth must be >= 1 and t_min > 0")
    theta = Fraction(theta) % 1
    log_t0 = math.log(log_radius)
    log_tmin = math.log(t_min)
    h0 = math.log(d) / depth
    kmax = int(math.ceil((math.log(log_radius) - log_tmin) / math.log(d))) + 2
    phases = _phases(theta, d, kmax + 1)
    cap = min(int((log_t0 - log_tmin) / h0 * 1.1) + 64, max_points)
    out_logt = np.empty(cap)
    out_c = np.empty(cap, dtype=np.complex128)
    while True:
        count, status, halvings = _trace_kernel(
            d, phases, log_t0, log_tmin, h0, log_radius, newton_tol, max_halvings, 64, out_logt, out_c
        )
        if status != 2 or cap >= max_points:
            break
        cap = min(cap * 4, max_points)
        out_logt = np.empty(cap)
        out_c = np.empty(cap, dtype=np.complex128)
    ray = TracedRay(theta, d, np.exp(out_logt[:count]), out_c[:count].copy(), halvings, status in (0, 3), status == 3)
    if status not in (0, 3):
        raise TraceStalled(
            f"ray {format_angle(theta)} stalled at t={ray.potentials[-1]:.3g} after {halvings} halvings", ray
        )
    return ray


@dataclass
class ValidationReport:
    angles: tuple[Angle, ...]
    status: str  # "pass" | "fail" | "inconclusive"
    landings: list[complex] = field(default_factory=list)
    residuals: list[float] = field(default_factory=list)
    spread: float = math.nan
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "pass"

    @property
    def point(self) -> complex:
        return complex(np.mean(self.landings)) if self.landings else complex(math.nan, math.nan)

    def __str__(self) -> str:
        angles = ",".join(format_angle(a) for a in self.angles)
        p = self.point
        resid = max(self.residuals) if self.residuals else math.nan
        return f"{self.status} {angles} land={p.real:.9g} {p.imag:.9g} spread={self.spread:.3g} resid={resid:.3g}"


def trace_many(d: int, angles: Iterable[Angle], depth: int = DEFAULT_DEPTH, t_min: float = DEFAULT_T_MIN,
               workers: Optional[int] = None) -> list:
    """Trace several rays on a thread pool (the kernel releases the GIL).

    Results come back in input order; a stalled ray yields its
    :class:`TraceStalled` exception in place of a :class:`TracedRay`.
    """

    def one(a):
        try:
            return trace_parameter_ray(d, a, depth, t_min)
        except TraceStalled as exc:
            return exc

    angles = list(angles)
    if workers == 1 or len(angles) < 2:
        return [one(a) for a in angles]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, angles))


def validate_leaf(angles: Sequence[Angle], d: int, tol: float, depth: int = DEFAULT_DEPTH,
                  t_min: float = DEFAULT_T_MIN, workers: Optional[int] = None) -> ValidationReport:
    """Trace every ray of a landing group and check they meet.

    Passes iff all landing estimates are pairwise within ``tol`` and every
    residual is below ``tol``.
    """
    if hasattr(angles, "lower"):
        angles = (angles.lower, angles.upper)
    elif hasattr(angles, "angles"):
        angles = angles.angles
    angles = tuple(Fraction(a) for a in angles)
    rep = ValidationReport(angles, "fail")
    rays = trace_many(d, angles, depth, t_min, workers)
    for ray in rays:
        if isinstance(ray, TraceStalled):
            rep.status = "inconclusive"
            rep.message = str(ray)
            return rep
        rep.landings.append(ray.landing)
        rep.residuals.append(ray.residual)
    pts = np.array(rep.landings)
    rep.spread = float(np.abs(pts[:, None] - pts[None, :]).max()) if len(pts) > 1 else 0.0
    if rep.spread < tol and max(rep.residuals) < tol:
        rep.status = "pass"
    else:
        rep.message = "landing estimates disagree" if rep.spread >= tol else "residual above tolerance"
    return rep
