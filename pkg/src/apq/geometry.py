"""Domain geometry: the moment domain, its boundary curves, and the region split.

Coordinates are x = (x1, x2) = (<w**p1>, <w**p2>).  The admissible domain is

    x2**(1/p2) <= x1**(1/p1) <= Q * x2**(1/p2),

tested in log space so a single additive slack on log(x1)/p1 - log(x2)/p2
means a uniform relative slack on the power ratio.  The lower equality curve
(unit curve) carries the boundary data; the upper one is the extreme-class
curve touched by the two tangent lines from (1, 1).

The region split is written once with sign-normalized comparisons so all
three exponent sign cases (p1 > p2 > 0, p1 > 0 > p2, 0 > p1 > p2) share one
code path; the per-case inequality tables serve as test vectors.  Boundary
tie-breaks: points on the upper tangent line classify as II, points on the
lower tangent line as III (both its II-facing and IV-facing segments).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DomainError
from .params import DerivedConstants, Params

Point = tuple[float, float]


class Region(enum.Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"
    GAMMA1 = "Gamma1"
    GAMMAQ = "GammaQ"
    OUTSIDE = "Outside"


@dataclass(frozen=True)
class Line:
    """x2 = slope * x1 + intercept."""

    slope: float
    intercept: float

    def at(self, x1: float) -> float:
        return self.slope * x1 + self.intercept


def log_ratio(x: Point, p: Params) -> float:
    """log of x1**(1/p1) / x2**(1/p2); lies in [0, log Q] on the domain."""
    x1, x2 = x
    if not (math.isfinite(x1) and math.isfinite(x2)):
        raise DomainError(f"non-finite point {x}")
    if x1 <= 0.0 or x2 <= 0.0:
        raise DomainError(f"point must have positive coordinates, got {x}")
    return math.log(x1) / p.p1 - math.log(x2) / p.p2


def in_domain(x: Point, p: Params, slack: float = 1e-12) -> bool:
    """Membership in the moment domain with relative slack at both boundaries."""
    x1, x2 = x
    if not (math.isfinite(x1) and math.isfinite(x2)):
        raise DomainError(f"non-finite point {x}")
    if x1 <= 0.0 or x2 <= 0.0:
        return False
    r = log_ratio(x, p)
    lq = math.log(p.q)
    s = slack * max(1.0, lq)
    return -s <= r <= lq + s


def on_gamma1(x: Point, p: Params, tol: float = 1e-12) -> bool:
    return abs(log_ratio(x, p)) <= tol * max(1.0, math.log(p.q))


def on_gammaq(x: Point, p: Params, tol: float = 1e-12) -> bool:
    lq = math.log(p.q)
    return abs(log_ratio(x, p) - lq) <= tol * max(1.0, lq)


def gamma1_point(v: float, p: Params) -> Point:
    """The unit-curve point with parameter v > 0."""
    return (v**p.p1, v**p.p2)


def gammaq_point(a: float, p: Params) -> Point:
    """The extreme-curve point with parameter a > 0.

    The tangent from unit-curve parameter v touches the extreme curve at the
    point with parameter a = gamma_sign * v.
    """
    return (a**p.p1, p.q ** (-p.p2) * a**p.p2)


def tangent_slope(v: float, sign: str, c: DerivedConstants, p: Params) -> float:
    gamma = c.gamma_plus if sign == "+" else c.gamma_minus
    return (p.p2 / p.p1) * p.q ** (-p.p2) * (gamma * v) ** (p.p2 - p.p1)


def tangent_line(v: float, sign: str, c: DerivedConstants, p: Params) -> Line:
    """Tangent from the unit-curve point with parameter v to the extreme curve.

    The line passes through (v**p1, v**p2) and touches the extreme curve at
    the point with parameter gamma_sign * v.
    """
    if not (math.isfinite(v) and v > 0.0):
        raise DomainError(f"tangent base parameter must be positive, got {v}")
    if sign not in ("+", "-"):
        raise DomainError(f"sign must be '+' or '-', got {sign!r}")
    slope = tangent_slope(v, sign, c, p)
    x1, x2 = gamma1_point(v, p)
    return Line(slope=slope, intercept=x2 - slope * x1)


def _split_quantities(x: Point, c: DerivedConstants, p: Params):
    """Sign-normalized coordinates of x against the two tangents from (1,1)."""
    x1, x2 = x
    s1 = math.copysign(1.0, p.p1)
    s2 = math.copysign(1.0, p.p2)
    slope_plus = (p.p2 / p.p1) * c.A  # A = Q**(-p2) * gamma_plus**(p2-p1)
    slope_minus = (p.p2 / p.p1) * p.q ** (-p.p2) * c.gamma_minus ** (p.p2 - p.p1)
    d_plus = s2 * (x2 - (slope_plus * (x1 - 1.0) + 1.0))
    d_minus = s2 * (x2 - (slope_minus * (x1 - 1.0) + 1.0))
    e_plus = s1 * (x1 - c.gamma_plus**p.p1)
    e_minus = s1 * (x1 - c.gamma_minus**p.p1)
    return d_plus, d_minus, e_plus, e_minus


def classify(x: Point, c: DerivedConstants, p: Params) -> Region:
    """Open-region tag of x (I..IV); Outside when not in the domain.

    Curve tags (Gamma1/GammaQ) are only produced by the explicit membership
    queries on_gamma1/on_gammaq, never by classify.
    """
    if not in_domain(x, p):
        return Region.OUTSIDE
    d_plus, d_minus, e_plus, e_minus = _split_quantities(x, c, p)
    if d_plus > 0.0 or e_plus > 0.0:
        return Region.I
    if d_minus >= 0.0:
        return Region.III
    if e_minus > 0.0:
        return Region.II
    return Region.IV
