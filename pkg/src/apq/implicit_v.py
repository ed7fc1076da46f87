"""Chord / tangent parameter v(x) in regions III and IV, with sign diagnostics.

Region III: v != 1 solves the chord equation

    v**p2 * (1 - x1) - v**p1 * (1 - x2) = x2 - x1,

equivalent (for x2 != 1) to h(v) = (v**p1 - 1)/(v**p2 - 1) = (x1-1)/(x2-1).
h is monotone on (0, 1) (derivative sign sig(p1*p2) there), so the v < 1
branch is a clean bisection; cancellation near v = 1 is avoided by writing
v**p - 1 = expm1(p*log v).

Region IV: v solves the tangent-line equation

    x2 = (p2/p1) * A * v**(p2-p1) * (x1 - v**p1) + v**p2,

where A = Q**(-p2)*gamma_plus**(p2-p1).  Among the roots, the admissible one
has x strictly between the unit-curve base point and the touch point, i.e.
v in [r/gamma_plus, r] with r = x1**(1/p1).  At those endpoints the residual
equals the (signed) distance of x2 from the extreme curve and the unit curve
respectively, so the bracket always carries a sign change; the second root of
the equation lies below r/gamma_plus and never enters the bracket.

Both solvers finish with a couple of Newton polish steps on the raw residual.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, SolveError
from .geometry import Point, Region, classify, in_domain
from .params import DerivedConstants, Params, derive_constants

_MAX_BISECT = 200


@dataclass(frozen=True)
class GradientDiagnostics:
    """Scalar diagnostics of the implicit parameter at a point.

    upsilon = p2*v**p2*(1-x1) - p1*v**p1*(1-x2)   (chord-equation derivative scale)
    pi      = A*x1/v**(p1+1) - x2/v**(p2+1)       (negative throughout region IV)
    fv      = v**p2 / (v**p2 - 1)
    """

    upsilon: float
    pi: float
    fv: float


def chord_residual(v: float, x: Point, p: Params) -> float:
    x1, x2 = x
    return v**p.p2 * (1.0 - x1) - v**p.p1 * (1.0 - x2) - (x2 - x1)


def tangent_residual(v: float, x: Point, c: DerivedConstants, p: Params) -> float:
    x1, x2 = x
    c0 = (p.p2 / p.p1) * c.A
    return c0 * x1 * v ** (p.p2 - p.p1) + (1.0 - c0) * v**p.p2 - x2


def _chord_scale(v: float, x: Point, p: Params) -> float:
    x1, x2 = x
    return max(abs(x2 - x1), abs(v**p.p2 * (1.0 - x1)), abs(v**p.p1 * (1.0 - x2)), 1e-300)


def _tangent_scale(v: float, x: Point, c: DerivedConstants, p: Params) -> float:
    x1, x2 = x
    c0 = (p.p2 / p.p1) * c.A
    return max(abs(x2), abs(c0 * x1 * v ** (p.p2 - p.p1)), abs((1.0 - c0) * v**p.p2), 1e-300)


def _newton_warm(x: Point, residual, derivative, v0: float,
                 lo: float, hi: float, scale) -> float | None:
    """Guarded Newton from a nearby solution; None when it fails to settle."""
    v = v0
    for _ in range(15):
        g = residual(v)
        if abs(g) <= 1e-13 * scale(v):
            return v
        dg = derivative(v)
        if dg == 0.0 or not math.isfinite(dg):
            return None
        v_new = v - g / dg
        if not (lo < v_new < hi) or not math.isfinite(v_new):
            return None
        if v_new == v:
            return v if abs(g) <= 1e-11 * scale(v) else None
        v = v_new
    return v if abs(residual(v)) <= 1e-11 * scale(v) else None


def solve_v_III(x: Point, p: Params, v0: float | None = None) -> float:
    """Chord parameter v < 1 for a region-III point (or its closure).

    v0, when given, warm-starts a guarded Newton iteration (used by stencil
    evaluations); on any trouble the bracketed solve below takes over.
    Raises SolveError for the degenerate chord at (1, 1) or when the ratio
    (x1-1)/(x2-1) falls outside the range of h on (0, 1).
    """
    x1, x2 = x
    if v0 is not None and 0.0 < v0 < 1.0:
        got = _newton_warm(
            x,
            lambda v: chord_residual(v, x, p),
            lambda v: p.p2 * v ** (p.p2 - 1.0) * (1.0 - x1)
            - p.p1 * v ** (p.p1 - 1.0) * (1.0 - x2),
            v0, 0.0, 1.0, lambda v: _chord_scale(v, x, p))
        if got is not None:
            return got
    if abs(x1 - 1.0) < 1e-14 and abs(x2 - 1.0) < 1e-14:
        raise SolveError("degenerate chord: x = (1, 1) determines no parameter")
    if abs(x2 - 1.0) < 1e-300:
        raise SolveError("degenerate chord: x2 = 1 with x1 != 1 meets the unit curve only at 1")
    ratio = (x1 - 1.0) / (x2 - 1.0)

    def h_of_u(u: float) -> float:
        # h(exp(u)) - ratio, with u = log v < 0; expm1 keeps v near 1 exact.
        return math.expm1(p.p1 * u) / math.expm1(p.p2 * u) - ratio

    f_at_one = p.p1 / p.p2 - ratio  # limit of h as v -> 1
    if f_at_one == 0.0:
        raise SolveError("chord through (1,1) is tangent to the unit curve; no second crossing")
    u_lo, n = -0.5, 0
    f_lo = h_of_u(u_lo)
    while (f_lo > 0.0) == (f_at_one > 0.0):
        u_lo *= 4.0
        n += 1
        if n > 60:
            raise SolveError(f"no unit-curve crossing with v < 1 for x={x}")
        f_lo = h_of_u(u_lo)
    lo, hi, flo, fhi = u_lo, 0.0, f_lo, f_at_one
    for _ in range(_MAX_BISECT):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = h_of_u(mid)
        if fm == 0.0:
            lo = hi = mid
            break
        if (fm > 0.0) == (flo > 0.0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    v = math.exp(0.5 * (lo + hi))

    # Newton polish on the raw chord residual.
    for _ in range(3):
        g = chord_residual(v, x, p)
        dg = p.p2 * v ** (p.p2 - 1.0) * (1.0 - x1) - p.p1 * v ** (p.p1 - 1.0) * (1.0 - x2)
        if dg == 0.0:
            break
        step = g / dg
        v_new = v - step
        if not (0.0 < v_new < 1.0):
            break
        if abs(chord_residual(v_new, x, p)) < abs(g):
            v = v_new

    res = abs(chord_residual(v, x, p)) / _chord_scale(v, x, p)
    if res > 1e-11:
        raise SolveError(f"chord solve residual {res:.3e} too large at x={x}")
    gap = x1 - v**p.p1
    if abs(gap) > 1e-12 * max(1.0, abs(x1)) \
            and math.copysign(1.0, gap) != math.copysign(1.0, p.p1):
        raise SolveError(f"chord solve landed on the wrong side at x={x}")
    return v


def solve_v_IV(x: Point, c: DerivedConstants, p: Params,
               v0: float | None = None) -> float:
    """Tangent parameter v for a region-IV point (or the IV-side boundary)."""
    x1, x2 = x
    r = math.exp(math.log(x1) / p.p1)
    v_lo = r / c.gamma_plus
    v_hi = r

    def f(v: float) -> float:
        return tangent_residual(v, x, c, p)

    if v0 is not None and v_lo < v0 < v_hi:
        c0 = (p.p2 / p.p1) * c.A
        got = _newton_warm(
            x, f,
            lambda v: c0 * (p.p2 - p.p1) * x1 * v ** (p.p2 - p.p1 - 1.0)
            + (1.0 - c0) * p.p2 * v ** (p.p2 - 1.0),
            v0, v_lo, v_hi, lambda v: _tangent_scale(v, x, c, p))
        if got is not None:
            return got

    f_lo, f_hi = f(v_lo), f(v_hi)
    scale_lo = _tangent_scale(v_lo, x, c, p)
    scale_hi = _tangent_scale(v_hi, x, c, p)
    if abs(f_lo) <= 1e-13 * scale_lo:
        return v_lo  # x on the extreme curve
    if abs(f_hi) <= 1e-13 * scale_hi:
        return v_hi  # x on the unit curve

    if (f_lo > 0.0) == (f_hi > 0.0):
        # Scan a geometric grid for the sign change; the bracket endpoints are
        # exact curve distances, so this only triggers on roundoff edge cases.
        grid = [v_lo * (v_hi / v_lo) ** (k / 63.0) for k in range(64)]
        vals = [f(v) for v in grid]
        changes = [i for i in range(63) if (vals[i] > 0.0) != (vals[i + 1] > 0.0)]
        if len(changes) > 1:
            raise SolveError(f"multiple tangent-parameter roots in bracket at x={x}")
        if not changes:
            raise SolveError(f"no tangent-parameter root in bracket at x={x}")
        i = changes[0]
        v_lo, v_hi, f_lo, f_hi = grid[i], grid[i + 1], vals[i], vals[i + 1]

    lo, hi, flo, fhi = v_lo, v_hi, f_lo, f_hi
    for _ in range(_MAX_BISECT):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = f(mid)
        if fm == 0.0:
            lo = hi = mid
            break
        if (fm > 0.0) == (flo > 0.0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    v = 0.5 * (lo + hi)

    c0 = (p.p2 / p.p1) * c.A
    for _ in range(3):
        g = f(v)
        dg = c0 * (p.p2 - p.p1) * x1 * v ** (p.p2 - p.p1 - 1.0) + (1.0 - c0) * p.p2 * v ** (p.p2 - 1.0)
        if dg == 0.0:
            break
        v_new = v - g / dg
        if not (0.0 < v_new):
            break
        if abs(f(v_new)) < abs(g):
            v = v_new

    res = abs(f(v)) / _tangent_scale(v, x, c, p)
    if res > 1e-11:
        raise SolveError(f"tangent solve residual {res:.3e} too large at x={x}")
    return v


def solve_v(x: Point, region: Region, p: Params, c: DerivedConstants | None = None) -> float:
    if region == Region.III:
        return solve_v_III(x, p)
    if region == Region.IV:
        if c is None:
            c = derive_constants(p)
        return solve_v_IV(x, c, p)
    raise DomainError(f"no implicit parameter in region {region}")


def diagnostics(x: Point, region: Region, p: Params,
                c: DerivedConstants | None = None) -> GradientDiagnostics:
    if c is None:
        c = derive_constants(p)
    v = solve_v(x, region, p, c)
    x1, x2 = x
    upsilon = p.p2 * v**p.p2 * (1.0 - x1) - p.p1 * v**p.p1 * (1.0 - x2)
    pi = c.A * x1 / v ** (p.p1 + 1.0) - x2 / v ** (p.p2 + 1.0)
    vp2 = v**p.p2
    fv = vp2 / (vp2 - 1.0) if vp2 != 1.0 else math.inf
    return GradientDiagnostics(upsilon=upsilon, pi=pi, fv=fv)


def dv_sign_check(x: Point, region: Region, p: Params,
                  c: DerivedConstants | None = None) -> bool:
    """Finite-difference check of the signs of dv/dx1 (and dv/dx2 in IV).

    Expected: sig(dv/dx1) = -sig(p1) in both regions, sig(dv/dx2) = sig(p2)
    in region IV.  The step shrinks once if it crosses a region boundary.
    """
    if c is None:
        c = derive_constants(p)
    if region not in (Region.III, Region.IV):
        raise DomainError(f"sign check applies to regions III and IV, not {region}")
    if classify(x, c, p) != region:
        raise DomainError(f"x={x} does not lie in region {region}")
    x1, x2 = x
    s1 = math.copysign(1.0, p.p1)
    s2 = math.copysign(1.0, p.p2)

    def central(coord: int) -> float:
        h = 1e-5 * max(1.0, abs(x[coord]))
        for _ in range(2):
            xp = (x1 + h, x2) if coord == 0 else (x1, x2 + h)
            xm = (x1 - h, x2) if coord == 0 else (x1, x2 - h)
            if (in_domain(xp, p) and in_domain(xm, p)
                    and classify(xp, c, p) == region and classify(xm, c, p) == region):
                return (solve_v(xp, region, p, c) - solve_v(xm, region, p, c)) / (2.0 * h)
            h *= 1e-2
        raise SolveError(f"finite-difference step keeps crossing a boundary at x={x}")

    if math.copysign(1.0, central(0)) != -s1:
        return False
    if region == Region.IV and math.copysign(1.0, central(1)) != s2:
        return False
    return True
