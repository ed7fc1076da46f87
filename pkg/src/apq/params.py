"""Class parameters and the constants every other module is built from.

A weight class is pinned down by exponents ``p1 > p2`` (both nonzero) and a
constant ``Q > 1`` bounding the two-sided average ratio.  All downstream
geometry hangs off the two positive roots ``gamma_minus < 1 < gamma_plus`` of
the scalar tangency equation

    (1 - p2/p1) * t**p2 + (p2/p1) * t**(p2 - p1) = Q**p2,

whose left-hand side is monotone on each side of t = 1 (the sign of its
derivative is sig(p2 * (t - 1))), so both roots are found by bracketed
bisection with a guaranteed sign change.

Derived constants:

* ``v_minus = gamma_minus / gamma_plus`` and ``v_plus = 1 / v_minus`` are the
  secondary unit-curve intersections of the two tangent lines from (1, 1).
* ``A = Q**(-p2) * gamma_plus**(p2 - p1)`` lies in (0, 1).
* ``nu`` is the power-tail exponent fixed by 1/(1 - nu*p1) = gamma_plus**p1;
  the companion relation 1/(1 - nu*p2) = Q**(-p2) * gamma_plus**p2 is a
  consequence and is asserted, not solved for.
* ``(a2, b2, c2)`` is the affine sheet through the three anchor values
  B(1,1) = 1, B at v_minus = 0, B at v_plus = 1.

The limiting class with p1 = 1, p2 = 0 (averages of log w) has its own
constants: the tangency equation degenerates to log(t) + 1/t = 1 + log(Q).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, SolveError

_BRACKET_EXPANSIONS = 200
_BISECT_ITERATIONS = 200


@dataclass(frozen=True)
class Params:
    """The class triple (p1, p2, Q)."""

    p1: float
    p2: float
    q: float

    def __post_init__(self) -> None:
        for name in ("p1", "p2", "q"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if self.p1 == 0.0 or self.p2 == 0.0:
            raise DomainError("exponents must be nonzero (p2 = 0 has a dedicated entry point)")
        if not self.p1 > self.p2:
            raise DomainError(f"need p1 > p2, got p1={self.p1}, p2={self.p2}")
        if not self.q > 1.0:
            raise DomainError(f"need Q > 1, got Q={self.q}")


@dataclass(frozen=True)
class DerivedConstants:
    gamma_minus: float
    gamma_plus: float
    v_minus: float
    v_plus: float
    A: float
    nu: float
    a2: float
    b2: float
    c2: float

    def as_dict(self) -> dict:
        return {
            "gamma_minus": self.gamma_minus,
            "gamma_plus": self.gamma_plus,
            "v_minus": self.v_minus,
            "v_plus": self.v_plus,
            "A": self.A,
            "nu": self.nu,
            "a2": self.a2,
            "b2": self.b2,
            "c2": self.c2,
        }


@dataclass(frozen=True)
class AinfConstants:
    """Constants of the limiting class p1 = 1, p2 = 0 (variables <w>, <log w>)."""

    gamma_minus: float
    gamma_plus: float
    v_minus: float
    v_plus: float
    nu: float
    a2: float
    b2: float
    c2: float

    def as_dict(self) -> dict:
        return {
            "gamma_minus": self.gamma_minus,
            "gamma_plus": self.gamma_plus,
            "v_minus": self.v_minus,
            "v_plus": self.v_plus,
            "nu": self.nu,
            "a2": self.a2,
            "b2": self.b2,
            "c2": self.c2,
        }


def gamma_equation(t: float, p: Params) -> float:
    """Left-hand side of the tangency equation at t > 0."""
    r = p.p2 / p.p1
    return (1.0 - r) * t**p.p2 + r * t ** (p.p2 - p.p1)


def gamma_residual_scale(t: float, p: Params) -> float:
    """Natural scale of the tangency equation at t: its terms can cancel to a
    target orders of magnitude smaller, which floors any achievable residual."""
    r = p.p2 / p.p1
    return max(abs(p.q**p.p2), abs((1.0 - r) * t**p.p2), abs(r * t ** (p.p2 - p.p1)))


def _bisect(f, lo: float, hi: float, flo: float, fhi: float) -> float:
    """Plain bisection on a bracketing interval, run to float exhaustion."""
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0.0) == (fhi > 0.0):
        raise SolveError("bisection called without a sign change")
    for _ in range(_BISECT_ITERATIONS):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0.0) == (flo > 0.0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    return 0.5 * (lo + hi)


def solve_gammas(p: Params) -> tuple[float, float]:
    """Both roots of the tangency equation, gamma_minus < 1 < gamma_plus.

    Raises SolveError if bracket expansion exhausts its budget (pathological
    parameters, e.g. Q - 1 at machine-noise scale) or the residual is poor.
    """
    target = p.q**p.p2
    # Work in s = log(t): roots can sit hundreds of orders of magnitude from 1
    # when p1 - p2 is small, and linear bisection loses all relative accuracy
    # there.
    g = lambda s: gamma_equation(math.exp(s), p) - target
    g1 = g(0.0)  # equals 1 - Q**p2, nonzero since Q > 1

    # Lower root in (0, 1): expand toward 0 until the sign flips.
    lo = -0.7
    flo = g(lo)
    n = 0
    while (flo > 0.0) == (g1 > 0.0):
        lo *= 4.0
        n += 1
        if n > _BRACKET_EXPANSIONS or not math.isfinite(flo):
            raise SolveError("could not bracket the lower tangency root")
        flo = g(lo)
    gamma_minus = math.exp(_bisect(g, lo, 0.0, flo, g1))

    # Upper root in (1, inf): expand toward infinity.
    hi = 0.7
    fhi = g(hi)
    n = 0
    while (fhi > 0.0) == (g1 > 0.0):
        hi *= 4.0
        n += 1
        if n > _BRACKET_EXPANSIONS or not math.isfinite(fhi):
            raise SolveError("could not bracket the upper tangency root")
        fhi = g(hi)
    gamma_plus = math.exp(_bisect(g, 0.0, hi, g1, fhi))

    for root in (gamma_minus, gamma_plus):
        residual = gamma_equation(root, p) - target
        if abs(residual) > 1e-12 * gamma_residual_scale(root, p):
            raise SolveError(f"tangency-equation residual too large at root {root}")
    if not (0.0 < gamma_minus < 1.0 < gamma_plus):
        raise SolveError("tangency roots out of order")
    return gamma_minus, gamma_plus


def derive_constants_from_gammas(p: Params, gamma_minus: float, gamma_plus: float,
                                 check: bool = True) -> DerivedConstants:
    """Assemble the derived constants from given roots.

    Split out from derive_constants so verification campaigns can inject
    deliberately corrupted roots and watch concavity fail.
    """
    v_minus = gamma_minus / gamma_plus
    v_plus = 1.0 / v_minus
    A = p.q ** (-p.p2) * gamma_plus ** (p.p2 - p.p1)
    nu = (1.0 - gamma_plus ** (-p.p1)) / p.p1

    vm1 = v_minus**p.p1
    vm2 = v_minus**p.p2
    a2 = vm1 / ((1.0 - vm1) * (vm1 - vm2))
    b2 = vm2 / ((vm2 - 1.0) * (vm1 - vm2))
    c2 = 1.0 - 1.0 / ((vm1 - 1.0) * (vm2 - 1.0))

    c = DerivedConstants(gamma_minus, gamma_plus, v_minus, v_plus, A, nu, a2, b2, c2)
    if check:
        _check_constants(c, p)
    return c


def derive_constants(p: Params) -> DerivedConstants:
    gm, gp = solve_gammas(p)
    return derive_constants_from_gammas(p, gm, gp)


def _check_constants(c: DerivedConstants, p: Params) -> None:
    if not 0.0 < c.v_minus < 1.0:
        raise SolveError("v_minus out of (0, 1)")
    if not 0.0 < c.A < 1.0:
        raise SolveError("factor A out of (0, 1)")
    # nu relations; the p2 one is a consequence of the p1 one.
    r1 = 1.0 / (1.0 - c.nu * p.p1)
    t1 = c.gamma_plus**p.p1
    if abs(r1 - t1) > 1e-10 * abs(t1):
        raise SolveError("nu does not satisfy its p1 relation")
    r2 = 1.0 / (1.0 - c.nu * p.p2)
    t2 = p.q ** (-p.p2) * c.gamma_plus**p.p2
    if abs(r2 - t2) > 1e-10 * abs(t2):
        raise SolveError("nu does not satisfy its p2 relation")
    # The affine sheet must run through its three anchors.
    for v, want in ((1.0, 1.0), (c.v_minus, 0.0), (c.v_plus, 1.0)):
        x1, x2 = v**p.p1, v**p.p2
        got = c.a2 * x1 + c.b2 * x2 + c.c2
        scale = max(1.0, abs(c.a2 * x1), abs(c.b2 * x2), abs(c.c2))
        if abs(got - want) > 1e-10 * scale:
            raise SolveError("affine sheet misses an anchor value")


def solve_gammas_ainf(q: float) -> tuple[float, float]:
    """Roots of log(t) + 1/t = 1 + log(Q), the p2 -> 0 limit with p1 = 1."""
    if not (math.isfinite(q) and q > 1.0):
        raise DomainError(f"need Q > 1, got Q={q}")
    target = 1.0 + math.log(q)
    g = lambda t: math.log(t) + 1.0 / t - target
    g1 = g(1.0)  # = -log(Q) < 0

    lo, flo, n = 0.5, g(0.5), 0
    while flo <= 0.0:
        lo *= 0.25
        n += 1
        if n > _BRACKET_EXPANSIONS:
            raise SolveError("could not bracket the lower limiting root")
        flo = g(lo)
    gamma_minus = _bisect(g, lo, 1.0, flo, g1)

    hi, fhi, n = 2.0, g(2.0), 0
    while fhi <= 0.0:
        hi *= 4.0
        n += 1
        if n > _BRACKET_EXPANSIONS:
            raise SolveError("could not bracket the upper limiting root")
        fhi = g(hi)
    gamma_plus = _bisect(g, 1.0, hi, g1, fhi)
    return gamma_minus, gamma_plus


def ainf_constants(q: float) -> AinfConstants:
    gm, gp = solve_gammas_ainf(q)
    v_minus = gm / gp
    lv = math.log(v_minus)
    d = v_minus - 1.0
    return AinfConstants(
        gamma_minus=gm,
        gamma_plus=gp,
        v_minus=v_minus,
        v_plus=1.0 / v_minus,
        nu=1.0 - 1.0 / gp,
        a2=-v_minus / (d * d),
        b2=1.0 / (lv * d),
        c2=1.0 + v_minus / (d * d),
    )
