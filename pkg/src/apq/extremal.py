"""Construction of a class weight attaining the sharp bound at a given point.

Per region (threshold 1):

* I   : two-step weight on unit-curve values u, v >= 1 from a feasible chord
        through x; the chord through (1, 1) is tried first, then u is scanned
        over a geometric grid with the second unit-curve crossing solved per
        candidate and the feasibility boundary pinned by bisection.
* II  : three-step weight on values (v_minus, 1, v_plus) from a segment
        through x with endpoints on the two tangent lines from (1, 1).  The
        default segment direction is the chord between the v_minus and v_plus
        unit-curve points; if the segment leaves the domain (it can near the
        extreme curve) the direction rotates toward either tangent direction,
        and the local extreme-curve tangent direction is also tried.
* III : two-step weight on values (1, v) split at mu = (x1 - v**p1)/(1 - v**p1).
* IV  : on the extreme curve, the three-piece profile
        {1, then v_minus, then v_minus*(a/t)**nu} with a = (v/v_minus)**(1/nu)
        and plateau fraction rho = (gm**p1 - vm**p1)/(1 - vm**p1); strictly
        inside, the extreme-curve profile is dilated into [0, lam] and
        extended by the constant v, which equals the level-v floor (pointwise
        max) of the dilated profile with its power tail continued to 1.

Every construction verifies its own moments before returning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, SolveError
from .geometry import (Point, Region, classify, gamma1_point, in_domain,
                       log_ratio, on_gamma1, on_gammaq)
from .implicit_v import solve_v_III, solve_v_IV
from .params import DerivedConstants, Params
from .weights import ConstPiece, Piece, PowerPiece, Weight, moment

_CHORD_SAMPLES = 65
_DIRECTION_STEPS = 32
_U_GRID = 200


@dataclass(frozen=True)
class ExtremalPlan:
    region: Region
    data: dict

    def as_dict(self) -> dict:
        return {"region": self.region.value, **self.data}


@dataclass(frozen=True)
class Region2Segment:
    """Tangent-to-tangent segment through a region-II point with its exact
    three-step decomposition; lengths are (v_minus piece, unit piece, v_plus
    piece) and are computed from cancellation-free complements."""

    x_minus: Point
    x_plus: Point
    lam: float
    mu_minus: float
    mu_plus: float
    lengths: tuple[float, float, float]


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_extremum(f, lo: float, hi: float, maximize: bool, iters: int = 50) -> float:
    sgn = 1.0 if maximize else -1.0
    a, b = lo, hi
    c1 = b - _GOLDEN * (b - a)
    c2 = a + _GOLDEN * (b - a)
    f1, f2 = sgn * f(c1), sgn * f(c2)
    for _ in range(iters):
        if f1 < f2:
            a, c1, f1 = c1, c2, f2
            c2 = a + _GOLDEN * (b - a)
            f2 = sgn * f(c2)
        else:
            b, c2, f2 = c2, c1, f1
            c1 = b - _GOLDEN * (b - a)
            f1 = sgn * f(c1)
    return sgn * max(f1, f2)


def _chord_inside(a: Point, b: Point, p: Params, samples: int = _CHORD_SAMPLES,
                  slack: float = 1e-10) -> bool:
    """Whole segment [a, b] inside the domain.

    The log-ratio along the segment is sampled and its worst cells refined by
    golden section, so grazing excursions between samples are caught; without
    this the feasibility-boundary bisection lands on chords that poke past
    the extreme curve by a few 1e-4.
    """
    def at(t: float) -> Point:
        return (a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))

    lq = math.log(p.q)
    tol = slack * max(1.0, lq)
    gross = 1e-5 * max(1.0, lq)
    vals = []
    for k in range(samples):
        pt = at(k / (samples - 1.0))
        if pt[0] <= 0.0 or pt[1] <= 0.0:
            return False
        r = log_ratio(pt, p)
        if r > lq + gross or r < -gross:
            return False
        vals.append(r)
    f = lambda t: log_ratio(at(t), p)
    i_max = max(range(samples), key=lambda i: vals[i])
    lo = (i_max - 1) / (samples - 1.0) if i_max > 0 else 0.0
    hi = (i_max + 1) / (samples - 1.0) if i_max < samples - 1 else 1.0
    if _golden_extremum(f, lo, hi, maximize=True) > lq + tol:
        return False
    i_min = min(range(samples), key=lambda i: vals[i])
    lo = (i_min - 1) / (samples - 1.0) if i_min > 0 else 0.0
    hi = (i_min + 1) / (samples - 1.0) if i_min < samples - 1 else 1.0
    return _golden_extremum(f, lo, hi, maximize=False) >= -tol


def _second_crossing(u: float, x: Point, p: Params) -> float | None:
    """Unit-curve parameter v of the second crossing of the line through
    the u-point and x, on the v < u side; None if there is none."""
    xs = (x[0] * u ** (-p.p1), x[1] * u ** (-p.p2))  # rescale so the u-point becomes (1,1)
    if abs(xs[1] - 1.0) < 1e-13:
        return None
    ratio = (xs[0] - 1.0) / (xs[1] - 1.0)
    h0 = 1.0 if p.p2 > 0.0 else 0.0  # limit of (v**p1-1)/(v**p2-1) as v -> 0
    h1 = p.p1 / p.p2
    low, high = min(h0, h1), max(h0, h1)
    if not (low < ratio < high):
        return None
    try:
        vs = solve_v_III(xs, p)
    except SolveError:
        return None
    return u * vs


def _crossing_above_one(ratio: float, p: Params) -> float | None:
    """Unit-curve parameter u > 1 with (u**p1 - 1)/(u**p2 - 1) = ratio."""
    f = lambda s: math.expm1(p.p1 * s) / math.expm1(p.p2 * s) - ratio  # s = log u > 0
    f_at_one = p.p1 / p.p2 - ratio
    if f_at_one == 0.0:
        return None
    s_hi, n = 0.5, 0
    f_hi = f(s_hi)
    while (f_hi > 0.0) == (f_at_one > 0.0):
        s_hi *= 4.0
        n += 1
        if n > 60 or not math.isfinite(s_hi):
            return None
        f_hi = f(s_hi)
        if math.isnan(f_hi):
            return None
    lo, hi, flo = 0.0, s_hi, f_at_one
    for _ in range(200):
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
            hi = mid
    return math.exp(0.5 * (lo + hi))


def region1_chord(x: Point, c: DerivedConstants, p: Params,
                  refine: bool = True) -> tuple[float, float, float]:
    """Feasible unit-curve chord (u, v, mu) with u, v >= 1 through x.

    The chord through (1, 1) works everywhere except the sliver between the
    upper tangent line and the extreme curve, so it is tried first; the
    geometric u-scan covers the sliver, with a bisection onto the
    feasibility boundary (skippable via refine=False for bulk callers that
    only need some feasible chord).
    """
    r = math.exp(math.log(x[0]) / p.p1)

    def candidate(u: float):
        v = _second_crossing(u, x, p)
        if v is None or v < 1.0 - 1e-9:
            return None
        if v < 1.0 + 1e-9:
            v = 1.0  # the feasibility boundary is the chord through (1,1)
        up, vp = gamma1_point(u, p), gamma1_point(v, p)
        mu = (x[0] - vp[0]) / (up[0] - vp[0])
        if not -1e-9 <= mu <= 1.0 + 1e-9:
            return None
        mu = min(max(mu, 0.0), 1.0)
        for pk, xk in ((p.p1, x[0]), (p.p2, x[1])):
            if abs(mu * u**pk + (1.0 - mu) * v**pk - xk) > 1e-9 * abs(xk):
                return None
        if not _chord_inside(up, vp, p):
            return None
        return (u, v, mu)

    if abs(x[1] - 1.0) > 1e-13:
        partner = _crossing_above_one((x[0] - 1.0) / (x[1] - 1.0), p)
        if partner is not None and partner > 1.0:
            got = candidate(partner)
            if got is not None:
                return got

    u_lo = r * (1.0 + 1e-7)
    u_hi = 2.0 * max(r / c.gamma_minus, c.v_plus)
    grid = [u_lo * (u_hi / u_lo) ** (k / (_U_GRID - 1.0)) for k in range(_U_GRID)]
    # The tangent chord through x's extreme-curve projection is the limiting
    # feasible chord; having it on the grid keeps near-boundary points solvable.
    grid.append(r / c.gamma_minus)
    grid.sort()
    prev_u = None
    for u in grid:
        got = candidate(u)
        if got is not None:
            if prev_u is None or not refine:
                return got
            lo, hi = prev_u, u
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                if candidate(mid) is not None:
                    hi = mid
                else:
                    lo = mid
            refined = candidate(hi)
            return refined if refined is not None else got
        prev_u = u
    raise SolveError(f"no feasible unit-curve chord found through {x} in region I")


def _line_intersect(x: Point, d: tuple[float, float], slope: float, intercept: float):
    denom = slope * d[0] - d[1]
    if abs(denom) < 1e-14 * max(1.0, abs(slope * d[0]), abs(d[1])):
        return None
    t = (x[1] - slope * x[0] - intercept) / denom
    return (x[0] + t * d[0], x[1] + t * d[1])


def region2_segment(x: Point, c: DerivedConstants, p: Params) -> Region2Segment:
    """Segment through x with endpoints on the two tangent lines from (1,1).

    x = lam*x_plus + (1-lam)*x_minus with the endpoints' unit-curve mixing
    weights mu_minus/mu_plus; the returned lengths are the exact three-step
    decomposition.  Raises SolveError when no rotation produces a segment
    inside the domain.
    """
    slope_p = (p.p2 / p.p1) * c.A
    slope_m = (p.p2 / p.p1) * p.q ** (-p.p2) * c.gamma_minus ** (p.p2 - p.p1)
    int_p = 1.0 - slope_p
    int_m = 1.0 - slope_m
    vm_pt = gamma1_point(c.v_minus, p)
    vp_pt = gamma1_point(c.v_plus, p)
    vm1, vp1 = vm_pt[0], vp_pt[0]

    def norm(d):
        n = math.hypot(d[0], d[1])
        return (d[0] / n, d[1] / n)

    d0 = norm((vp_pt[0] - vm_pt[0], vp_pt[1] - vm_pt[1]))
    d_tangent = norm((1.0, (p.p2 / p.p1) * x[1] / x[0]))  # extreme-curve tangent at x
    d_lm = norm((1.0, slope_m))
    d_lp = norm((1.0, slope_p))

    candidates = [d0, d_tangent]
    for target in (d_lm, d_lp):
        for k in range(1, _DIRECTION_STEPS):
            th = k / _DIRECTION_STEPS
            mix = ((1.0 - th) * d0[0] + th * target[0], (1.0 - th) * d0[1] + th * target[1])
            if math.hypot(*mix) < 1e-12:
                continue
            candidates.append(norm(mix))

    for d in candidates:
        xm = _line_intersect(x, d, slope_m, int_m)
        xp = _line_intersect(x, d, slope_p, int_p)
        if xm is None or xp is None:
            continue
        span1, span2 = xp[0] - xm[0], xp[1] - xm[1]
        if abs(span1) >= abs(span2):
            lam = (x[0] - xm[0]) / span1 if span1 != 0.0 else 0.0
        else:
            lam = (x[1] - xm[1]) / span2 if span2 != 0.0 else 0.0
        # Complements computed directly: (1 - mu) = (x1 - 1)/(v**p1 - 1) is
        # cancellation-free even when the v_plus anchor is astronomically far,
        # where mu itself rounds to 1 and loses the far piece's whole length.
        omm = (xm[0] - 1.0) / (vm1 - 1.0)
        omp = (xp[0] - 1.0) / (vp1 - 1.0)
        tol = 1e-9
        if not (-tol <= lam <= 1.0 + tol and -tol <= omm <= 1.0 + tol
                and -tol <= omp <= 1.0 + tol):
            continue
        if xm[0] <= 0.0 or xm[1] <= 0.0 or xp[0] <= 0.0 or xp[1] <= 0.0:
            continue
        clamp = lambda t: min(max(t, 0.0), 1.0)
        lam = clamp(lam)
        lens = ((1.0 - lam) * clamp(omm),        # value v_minus
                0.0,                             # value 1, filled below
                lam * clamp(omp))                # value v_plus
        lens = (lens[0], 1.0 - lens[0] - lens[2], lens[2])
        # Near-parallel intersections can pass the range checks while the
        # implied three-step weight misses the moments; exactness is part of
        # feasibility so the direction search skips ill-conditioned segments.
        ok = lens[1] >= -1e-12
        for pk, xk in ((p.p1, x[0]), (p.p2, x[1])):
            if not ok:
                break
            got = lens[0] * c.v_minus**pk + lens[1] + lens[2] * c.v_plus**pk
            if abs(got - xk) > 1e-9 * abs(xk):
                ok = False
        if not ok:
            continue
        if not (_chord_inside(xm, x, p) and _chord_inside(x, xp, p)):
            continue
        return Region2Segment(x_minus=xm, x_plus=xp, lam=lam,
                              mu_minus=1.0 - clamp(omm), mu_plus=1.0 - clamp(omp),
                              lengths=lens)
    raise SolveError(f"no admissible tangent-to-tangent segment through {x}")


def _boundary_iv_pieces(v: float, c: DerivedConstants, p: Params,
                        lam: float = 1.0) -> list[Piece]:
    """Extreme-curve profile for tangent parameter v, dilated into [0, lam]."""
    a = math.exp(math.log(v / c.v_minus) / c.nu)
    rho = (c.gamma_minus**p.p1 - c.v_minus**p.p1) / (1.0 - c.v_minus**p.p1)
    b1 = rho * a * lam
    b2 = a * lam
    pieces: list[Piece] = []
    if b1 > 0.0:
        pieces.append(ConstPiece(0.0, b1, 1.0))
    if b2 > b1:
        pieces.append(ConstPiece(b1, b2, c.v_minus))
    if lam > b2:
        coef = c.v_minus * b2**c.nu
        if not (coef > 0.0 and math.isfinite(coef)):
            raise SolveError(
                f"power-tail coefficient {coef} not representable in double "
                f"precision (nu={c.nu}); parameters too extreme")
        pieces.append(PowerPiece(b2, lam, coef, c.nu))
    return pieces


def build(x: Point, c: DerivedConstants, p: Params) -> tuple[Weight, ExtremalPlan]:
    """A class weight with moments x whose super-level set at 1 has measure B(x)."""
    if not in_domain(x, p):
        raise DomainError(f"point {x} outside the moment domain")

    if on_gamma1(x, p):
        v = math.exp(math.log(x[0]) / p.p1)
        w = Weight((ConstPiece(0.0, 1.0, v),))
        plan = ExtremalPlan(Region.GAMMA1, {"v": v})
        return _verified(w, plan, x, p)

    region = classify(x, c, p)

    if region == Region.I:
        u, v, mu = region1_chord(x, c, p)
        pieces: list[Piece] = []
        if mu > 0.0:
            pieces.append(ConstPiece(0.0, mu, u))
        if mu < 1.0:
            pieces.append(ConstPiece(mu, 1.0, v))
        plan = ExtremalPlan(Region.I, {"u": u, "v": v, "mu": mu})
        return _verified(Weight(tuple(pieces)), plan, x, p)

    if region == Region.II:
        seg = region2_segment(x, c, p)
        l1, l2, l3 = seg.lengths
        b1, b2 = l1, l1 + l2
        pieces = []
        if b1 > 0.0:
            pieces.append(ConstPiece(0.0, b1, c.v_minus))
        if b2 > b1:
            pieces.append(ConstPiece(b1, b2, 1.0))
        if 1.0 > b2:
            pieces.append(ConstPiece(b2, 1.0, c.v_plus))
        plan = ExtremalPlan(Region.II, {"lam": seg.lam, "mu_minus": seg.mu_minus,
                                        "mu_plus": seg.mu_plus})
        return _verified(Weight(tuple(pieces)), plan, x, p)

    if region == Region.III:
        v = solve_v_III(x, p)
        mu = (x[0] - v**p.p1) / (-math.expm1(p.p1 * math.log(v)))
        mu = min(max(mu, 0.0), 1.0)
        pieces = []
        if mu > 0.0:
            pieces.append(ConstPiece(0.0, mu, 1.0))
        if mu < 1.0:
            pieces.append(ConstPiece(mu, 1.0, v))
        plan = ExtremalPlan(Region.III, {"v": v, "mu": mu})
        return _verified(Weight(tuple(pieces)), plan, x, p)

    # Region IV
    v = solve_v_IV(x, c, p)
    y1 = (c.gamma_plus * v) ** p.p1
    vp1 = v**p.p1
    lam = 1.0 if on_gammaq(x, p) else (x[0] - vp1) / (y1 - vp1)
    lam = min(max(lam, 0.0), 1.0)
    if lam <= 0.0:
        raise SolveError(f"degenerate tangent mixing weight at {x}")
    pieces = _boundary_iv_pieces(v, c, p, lam)
    if lam < 1.0:
        pieces.append(ConstPiece(lam, 1.0, v))
    a = math.exp(math.log(v / c.v_minus) / c.nu)
    plan = ExtremalPlan(Region.IV, {"v": v, "nu": c.nu, "a": a, "lambda_glue": lam})
    return _verified(Weight(tuple(pieces)), plan, x, p)


def extended_iv_weight(x: Point, c: DerivedConstants, p: Params) -> tuple[Weight, float]:
    """The dilated extreme-curve profile with its power tail run out to 1.

    Returns (weight, v); its level-v floor (cutoff_above) must agree with
    build(x) pointwise, which the test suite checks.
    """
    v = solve_v_IV(x, c, p)
    y1 = (c.gamma_plus * v) ** p.p1
    vp1 = v**p.p1
    lam = 1.0 if on_gammaq(x, p) else (x[0] - vp1) / (y1 - vp1)
    lam = min(max(lam, 0.0), 1.0)
    a = math.exp(math.log(v / c.v_minus) / c.nu)
    rho = (c.gamma_minus**p.p1 - c.v_minus**p.p1) / (1.0 - c.v_minus**p.p1)
    b1, b2 = rho * a * lam, a * lam
    pieces: list[Piece] = []
    if b1 > 0.0:
        pieces.append(ConstPiece(0.0, b1, 1.0))
    if b2 > b1:
        pieces.append(ConstPiece(b1, b2, c.v_minus))
    if 1.0 > b2:
        pieces.append(PowerPiece(b2, 1.0, c.v_minus * b2**c.nu, c.nu))
    return Weight(tuple(pieces)), v


def _verified(w: Weight, plan: ExtremalPlan, x: Point, p: Params) -> tuple[Weight, ExtremalPlan]:
    for pexp, target in ((p.p1, x[0]), (p.p2, x[1])):
        got = moment(w, pexp)
        if abs(got - target) > 1e-8 * max(abs(target), 1e-300):
            raise SolveError(
                f"constructed weight misses moment p={pexp}: {got} vs {target} "
                f"(plan {plan.as_dict()})")
    return w, plan
