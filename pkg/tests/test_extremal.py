import numpy as np
import pytest

from apq import (Region, apq_norm, build, cutoff_above, distribution, evaluate,
                 moment)
from apq.extremal import extended_iv_weight
from apq.weights import PowerPiece

from conftest import CASES, gamma1, random_in_region, setup


def test_region_iii_example(a2_setup):
    p, c = a2_setup
    w, plan = build((0.75, 1.5), c, p)
    assert plan.region == Region.III
    assert [(q.lo, q.hi, q.value) for q in w.pieces] == [(0.0, 0.5, 1.0), (0.5, 1.0, 0.5)]
    assert distribution(w, 1.0) == 0.5


def test_lower_touch_point_example(a2_setup):
    # The touch point of the lower tangent: a = 1 degenerate power tail.
    p, c = a2_setup
    w, plan = build((c.gamma_minus, c.gamma_plus), c, p)
    vals = [(round(q.lo, 12), round(q.hi, 12)) for q in w.pieces]
    assert vals == [(0.0, 0.5), (0.5, 1.0)]
    assert w.pieces[0].value == 1.0
    assert abs(w.pieces[1].value - c.v_minus) <= 1e-12
    assert abs(distribution(w, 1.0) - 0.5) <= 1e-12


def test_extreme_curve_example(a2_setup):
    p, c = a2_setup
    v = 0.08
    x = (c.gamma_plus * v, 2.0 / (c.gamma_plus * v))
    w, plan = build(x, c, p)
    a = (v / c.v_minus) ** (1.0 / c.nu)
    rho = (c.gamma_minus - c.v_minus) / (1.0 - c.v_minus)
    assert abs(a - 0.3399289196455485) <= 1e-12
    assert abs(rho - 0.5) <= 1e-15
    assert abs(plan.data["a"] - a) <= 1e-9
    assert abs(plan.data["lambda_glue"] - 1.0) <= 1e-12
    assert isinstance(w.pieces[-1], PowerPiece)
    assert abs(distribution(w, 1.0) - rho * a) <= 1e-9
    assert abs(distribution(w, 1.0) - evaluate(x, c, p).value) <= 1e-7


def test_region_ii_example(a2_setup):
    p, c = a2_setup
    x = (1.5, 1.0)
    w, plan = build(x, c, p)
    vals = sorted({q.value for q in w.pieces})
    assert vals == sorted({c.v_minus, 1.0, c.v_plus} & set(vals))
    want = evaluate(x, c, p).value
    assert abs(want - 0.9816941738241592) <= 1e-9
    assert abs(distribution(w, 1.0) - want) <= 1e-9
    # Plan identity: lam + (1 - lam)*mu_minus equals the bound.
    lam, mu_m = plan.data["lam"], plan.data["mu_minus"]
    assert abs(lam + (1.0 - lam) * mu_m - want) <= 1e-9


def test_degenerate_inputs(a2_setup):
    p, c = a2_setup
    w, plan = build((1.0, 1.0), c, p)
    assert len(w.pieces) == 1 and w.pieces[0].value == 1.0
    w, plan = build(gamma1(0.6, p), c, p)
    assert len(w.pieces) == 1 and abs(w.pieces[0].value - 0.6) <= 1e-12
    assert plan.region == Region.GAMMA1


def test_iv_moment_identities():
    # On the extreme curve x_k = v**p_k / (1 - nu*p_k).
    for p1, p2 in CASES:
        p, c = setup(p1, p2)
        for v in (0.3 * c.v_minus, 0.7 * c.v_minus, 0.95 * c.v_minus):
            x = ((c.gamma_plus * v) ** p.p1,
                 p.q ** (-p.p2) * (c.gamma_plus * v) ** p.p2)
            for pk in (p.p1, p.p2):
                want = v**pk / (1.0 - c.nu * pk)
                assert abs((x[0] if pk == p.p1 else x[1]) - want) <= 1e-10 * abs(want)
            w, _ = build(x, c, p)
            for pk, xk in ((p.p1, x[0]), (p.p2, x[1])):
                assert abs(moment(w, pk) - xk) <= 1e-10 * abs(xk)


def test_glue_equals_cutoff_of_extended_profile():
    # The glued region-IV weight is the level-v floor (pointwise max) of the
    # dilated extreme-curve profile with its power tail continued to 1: the
    # tail crosses level v exactly at the glue point.
    rng = np.random.default_rng(0)
    for p1, p2 in CASES:
        p, c = setup(p1, p2)
        for x in random_in_region(rng, c, p, Region.IV, 10):
            w, plan = build(x, c, p)
            ext, v = extended_iv_weight(x, c, p)
            cut = cutoff_above(ext, v)
            assert [q.lo for q in cut.pieces] == pytest.approx(
                [q.lo for q in w.pieces], abs=1e-12)
            for t in np.linspace(1e-3, 1.0, 101):
                t = float(t)
                assert abs(cut.value_at(t) - w.value_at(t)) <= 1e-12 * max(
                    1.0, w.value_at(t))


def test_attainment_sample():
    # Smaller version of the acceptance campaign: moments, class norm, and
    # distribution all reproduced.
    rng = np.random.default_rng(1)
    for p1, p2 in CASES:
        for q in (1.5, 2.0):
            p, c = setup(p1, p2, q)
            for region in (Region.I, Region.II, Region.III, Region.IV):
                for x in random_in_region(rng, c, p, region, 8):
                    w, plan = build(x, c, p)
                    assert abs(moment(w, p.p1) - x[0]) <= 1e-8 * abs(x[0])
                    assert abs(moment(w, p.p2) - x[1]) <= 1e-8 * abs(x[1])
                    assert apq_norm(w, p, 16) <= q * (1.0 + 1e-6)
                    b = evaluate(x, c, p).value
                    assert abs(distribution(w, 1.0) - b) <= 1e-7
