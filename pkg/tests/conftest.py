"""Shared helpers for the test suite."""

import pytest

from apq import Params, derive_constants
from apq.verify import sample_point, sample_region_point

# The three exponent sign cases exercised throughout.
CASES = [(1.0, -1.0), (2.0, 1.0), (-1.0, -2.0)]


def setup(p1, p2, q=2.0):
    p = Params(p1, p2, q)
    return p, derive_constants(p)


def gamma1(v, p):
    return (v**p.p1, v**p.p2)


def random_in_domain(rng, c, p, n):
    return [sample_point(rng, c, p) for _ in range(n)]


def random_in_region(rng, c, p, region, n, stencil=None):
    return [sample_region_point(rng, c, p, region, stencil=stencil) for _ in range(n)]


def boundary_samples(c, p, which, n):
    """Points on one of the three internal boundaries, endpoints excluded.

    which: 'plus' (tangent segment from (1,1) to its upper touch point),
    'minus' (to the lower touch point), 'iii_iv' (touch point to the
    secondary crossing of the lower tangent).
    """
    touch_p = (c.gamma_plus**p.p1, p.q ** (-p.p2) * c.gamma_plus**p.p2)
    touch_m = (c.gamma_minus**p.p1, p.q ** (-p.p2) * c.gamma_minus**p.p2)
    vm_pt = gamma1(c.v_minus, p)
    if which == "plus":
        a, b = (1.0, 1.0), touch_p
    elif which == "minus":
        a, b = (1.0, 1.0), touch_m
    else:
        a, b = touch_m, vm_pt
    out = []
    for k in range(n):
        s = (k + 0.5) / n * 0.9 + 0.05
        out.append((a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])))
    return out


@pytest.fixture(scope="session")
def a2_setup():
    return setup(1.0, -1.0, 2.0)
