"""The sharp bound B(x1, x2; lambda) on |{w >= lambda}| and its gradient.

Per-region closed forms (lambda reduced to 1 by homogeneity):

    I   : 1
    II  : a2*x1 + b2*x2 + c2
    III : (x1 - v**p1) / (1 - v**p1)                    v = chord parameter
    IV  : (1/(1-A)) * v_minus**(-(p1-p2)*A/(1-A)) / (1 - v_minus**p1)
          * v**((p1-p2)/(1-A))
          * ((p1-p2)/p2 * v**p2 + x1 * v**(p2-p1) - (p1/p2) * x2)

with exact values on the unit curve: 1 when the curve parameter is >= 1,
else 0.  Region IV powers are combined in log space; exponents like
(p1-p2)/(1-A) blow up as Q -> 1.

The surface is affine along the chord through (1,1) in III and along the
upper tangent lines in IV, so the gradient has closed forms as well; it is
continuous across the III/IV interface and jumps across the two tangent
lines from (1,1) (which is why gradient() refuses points within 1e-9 of an
internal boundary).

Specializations: evaluate_a2 covers p = (1, -1) with purely algebraic region
formulas (the implicit equations turn quadratic), and evaluate_ainf covers
the limiting class p1 = 1, p2 = 0 in the variables (<w>, <log w>).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import DomainError, SolveError
from .geometry import Point, Region, classify, in_domain, on_gamma1
from .implicit_v import solve_v_III, solve_v_IV
from .params import AinfConstants, DerivedConstants, Params, ainf_constants


@dataclass(frozen=True)
class BellmanValue:
    value: float
    region: Region
    v: float | None = None

    def as_dict(self) -> dict:
        return {"value": self.value, "region": self.region.value, "v": self.v}


@dataclass(frozen=True)
class Gradient:
    t1: float
    t2: float


def _value_II(x: Point, c: DerivedConstants) -> float:
    return c.a2 * x[0] + c.b2 * x[1] + c.c2


def _value_III(x: Point, v: float, p: Params) -> float:
    # 1 - v**p1 via expm1 to stay exact for v near 1.
    return (x[0] - v**p.p1) / (-math.expm1(p.p1 * math.log(v)))


def _value_IV(x: Point, v: float, c: DerivedConstants, p: Params) -> float:
    e = (p.p1 - p.p2) / (1.0 - c.A)
    prefactor = math.exp(e * (math.log(v) - c.A * math.log(c.v_minus)))
    inner = ((p.p1 - p.p2) / p.p2 * v**p.p2
             + x[0] * v ** (p.p2 - p.p1)
             - (p.p1 / p.p2) * x[1])
    return prefactor * inner / ((1.0 - c.A) * (1.0 - c.v_minus**p.p1))


def evaluate_region_formula(x: Point, region: Region, c: DerivedConstants, p: Params,
                            v: float | None = None) -> float:
    """One region's closed form, regardless of where x actually classifies.

    Used by continuity checks that compare adjacent formulas on a shared
    boundary point; v may be supplied to bypass the implicit solve.
    """
    if region == Region.I:
        return 1.0
    if region == Region.II:
        return _value_II(x, c)
    if region == Region.III:
        return _value_III(x, solve_v_III(x, p) if v is None else v, p)
    if region == Region.IV:
        return _value_IV(x, solve_v_IV(x, c, p) if v is None else v, c, p)
    raise DomainError(f"no surface formula for region {region}")


def evaluate(x: Point, c: DerivedConstants, p: Params) -> BellmanValue:
    """The sharp bound at x with threshold 1."""
    if not in_domain(x, p):
        raise DomainError(f"point {x} outside the moment domain")
    if on_gamma1(x, p):
        v = math.exp(math.log(x[0]) / p.p1)
        return BellmanValue(value=1.0 if v >= 1.0 else 0.0, region=classify(x, c, p), v=v)
    region = classify(x, c, p)
    if region == Region.I:
        return BellmanValue(value=1.0, region=region)
    if region == Region.II:
        return BellmanValue(value=_value_II(x, c), region=region)
    if region == Region.III:
        v = solve_v_III(x, p)
        return BellmanValue(value=_value_III(x, v, p), region=region, v=v)
    v = solve_v_IV(x, c, p)
    return BellmanValue(value=_value_IV(x, v, c, p), region=region, v=v)


def evaluate_lambda(x: Point, lam: float, c: DerivedConstants, p: Params) -> BellmanValue:
    """The sharp bound at general threshold lambda via the scaling identity."""
    if not math.isfinite(lam):
        raise DomainError(f"threshold must be finite, got {lam}")
    if not in_domain(x, p):
        raise DomainError(f"point {x} outside the moment domain")
    if lam <= 0.0:
        return BellmanValue(value=1.0, region=classify(x, c, p))
    scaled = (x[0] * lam ** (-p.p1), x[1] * lam ** (-p.p2))
    return evaluate(scaled, c, p)


_BOUNDARY_REFUSAL = 1e-9


def gradient(x: Point, c: DerivedConstants, p: Params) -> Gradient:
    """Closed-form gradient; refuses points within 1e-9 of an internal boundary."""
    if not in_domain(x, p):
        raise DomainError(f"point {x} outside the moment domain")
    region = classify(x, c, p)
    x1, x2 = x
    for sign, gamma in (("+", c.gamma_plus), ("-", c.gamma_minus)):
        slope = (p.p2 / p.p1) * p.q ** (-p.p2) * gamma ** (p.p2 - p.p1)
        if abs(x2 - (slope * (x1 - 1.0) + 1.0)) <= _BOUNDARY_REFUSAL * max(1.0, abs(x2)):
            raise DomainError(f"x={x} is within {_BOUNDARY_REFUSAL} of the {sign} tangent line")
    if region == Region.I:
        return Gradient(0.0, 0.0)
    if region == Region.II:
        return Gradient(c.a2, c.b2)
    if region == Region.III:
        v = solve_v_III(x, p)
        upsilon = p.p2 * v**p.p2 * (1.0 - x1) - p.p1 * v**p.p1 * (1.0 - x2)
        vp1, vp2 = v**p.p1, v**p.p2
        t1 = p.p2 * (x2 - 1.0) * (vp2 / (vp2 - 1.0)) / upsilon
        t2 = p.p1 * (x1 - 1.0) * (vp1 / (1.0 - vp1)) / upsilon
        return Gradient(t1, t2)
    v = solve_v_IV(x, c, p)
    return gradient_IV(v, c, p)


def gradient_IV(v: float, c: DerivedConstants, p: Params) -> Gradient:
    """Region-IV gradient as a function of the tangent parameter alone."""
    e = (p.p1 - p.p2) / (1.0 - c.A)
    d = 1.0 / ((1.0 - c.A) * (1.0 - c.v_minus**p.p1))
    lr = math.log(v) - math.log(c.v_minus)
    t1 = d * math.exp(e * c.A * lr)
    t2 = -(p.p1 / p.p2) * d * math.exp(e * (math.log(v) - c.A * math.log(c.v_minus)))
    return Gradient(t1, t2)


# ---------------------------------------------------------------------------
# p = (1, -1): fully algebraic evaluation
# ---------------------------------------------------------------------------

@lru_cache(maxsize=64)
def _a2_setup(q: float) -> tuple[Params, DerivedConstants]:
    p = Params(1.0, -1.0, q)
    d = math.sqrt(q * q - q)
    gm, gp = q - d, q + d
    from .params import derive_constants_from_gammas
    return p, derive_constants_from_gammas(p, gm, gp)


def evaluate_a2(x: Point, q: float) -> BellmanValue:
    """Closed-form evaluation for exponents (1, -1); no iterative solving.

    The domain is 1 <= x1*x2 <= Q; the region-III surface is
    (x1*x2 - 1)/(x1 + x2 - 2) and the region-IV parameter is the larger root
    of x2*v**2 - (1 + v_minus)*v + v_minus*x1 = 0.
    """
    if not (math.isfinite(q) and q > 1.0):
        raise DomainError(f"need Q > 1, got {q}")
    p, c = _a2_setup(q)
    if not in_domain(x, p):
        raise DomainError(f"point {x} outside the A2 domain 1 <= x1*x2 <= {q}")
    x1, x2 = x
    if on_gamma1(x, p):
        return BellmanValue(value=1.0 if x1 >= 1.0 else 0.0, region=classify(x, c, p), v=x1)
    region = classify(x, c, p)
    if region == Region.I:
        return BellmanValue(value=1.0, region=region)
    if region == Region.II:
        return BellmanValue(value=_value_II(x, c), region=region)
    if region == Region.III:
        v = (1.0 - x1) / (x2 - 1.0)
        return BellmanValue(value=(x1 * x2 - 1.0) / (x1 + x2 - 2.0), region=region, v=v)
    vm = c.v_minus
    disc = (1.0 + vm) ** 2 - 4.0 * vm * x1 * x2
    disc = max(disc, 0.0)  # zero on the extreme curve; clip roundoff
    v = (1.0 + vm + math.sqrt(disc)) / (2.0 * x2)
    m = 2.0 * vm / (1.0 - vm)
    value = math.exp(m * (math.log(v) - math.log(vm))) * (x1 - v) / (1.0 - vm)
    return BellmanValue(value=value, region=region, v=v)


# ---------------------------------------------------------------------------
# Limiting class p1 = 1, p2 = 0: variables x1 = <w>, x2 = <log w>
# ---------------------------------------------------------------------------

def _classify_ainf(x1: float, x2: float, a: AinfConstants) -> Region:
    # Same decision tree as the general classifier with sig(p2) -> +1.
    d_plus = x2 - (x1 - 1.0) / a.gamma_plus
    d_minus = x2 - (x1 - 1.0) / a.gamma_minus
    if d_plus > 0.0 or x1 > a.gamma_plus:
        return Region.I
    if d_minus >= 0.0:
        return Region.III
    if x1 > a.gamma_minus:
        return Region.II
    return Region.IV


def evaluate_ainf(x1: float, x2: float, q: float) -> BellmanValue:
    """The sharp bound for the limiting class; domain x1*exp(-x2) in [1, Q]."""
    a = ainf_constants(q)
    if not (math.isfinite(x1) and math.isfinite(x2)) or x1 <= 0.0:
        raise DomainError(f"invalid limiting-class point ({x1}, {x2})")
    t = math.log(x1) - x2
    lq = math.log(q)
    s = 1e-12 * max(1.0, lq)
    if not (-s <= t <= lq + s):
        raise DomainError(f"point ({x1}, {x2}) outside the limiting-class domain")
    if abs(t) <= s:
        return BellmanValue(value=1.0 if x1 >= 1.0 else 0.0,
                            region=_classify_ainf(x1, x2, a), v=x1)
    region = _classify_ainf(x1, x2, a)
    if region == Region.I:
        return BellmanValue(value=1.0, region=region)
    if region == Region.II:
        return BellmanValue(value=a.a2 * x1 + a.b2 * x2 + a.c2, region=region)
    if region == Region.III:
        # Collinearity of (x1,x2), (1,0), (v, log v):  (v-1)/log v = (x1-1)/x2.
        ratio = (x1 - 1.0) / x2
        f = lambda u: math.expm1(u) / u - ratio  # u = log v < 0
        lo, n = -0.5, 0
        f_hi = 1.0 - ratio  # limit at u -> 0
        f_lo = f(lo)
        while (f_lo > 0.0) == (f_hi > 0.0):
            lo *= 4.0
            n += 1
            if n > 60:
                raise SolveError(f"no chord parameter for limiting-class point ({x1}, {x2})")
            f_lo = f(lo)
        hi = 0.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            fm = f(mid)
            if fm == 0.0:
                lo = hi = mid
                break
            if (fm > 0.0) == (f_lo > 0.0):
                lo, f_lo = mid, fm
            else:
                hi = mid
        v = math.exp(0.5 * (lo + hi))
        return BellmanValue(value=(x1 - v) / (1.0 - v), region=region, v=v)
    # Region IV: v solves v*x2 = (x1 - v)/gamma_plus + v*log v on [x1/gp, x1].
    gp = a.gamma_plus
    f = lambda v: (x1 - v) / gp + v * math.log(v) - v * x2
    lo, hi = x1 / gp, x1
    f_lo, f_hi = f(lo), f(hi)
    if abs(f_lo) <= 1e-13 * max(1.0, abs(x1)):
        v = lo
    elif abs(f_hi) <= 1e-13 * max(1.0, abs(x1)):
        v = hi
    else:
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            fm = f(mid)
            if fm == 0.0:
                lo = hi = mid
                break
            if (fm > 0.0) == (f_lo > 0.0):
                lo, f_lo = mid, fm
            else:
                hi, f_hi = mid, fm
        v = 0.5 * (lo + hi)
    value = (gp / (gp - 1.0)) / (1.0 - a.v_minus) * (x1 - x2 * v - v * (1.0 - math.log(v)))
    return BellmanValue(value=value, region=region, v=v)
