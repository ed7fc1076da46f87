import json
import math

import numpy as np
import pytest
from scipy.integrate import quad

from apq import (DomainError, NonIntegrableError, PowerPiece, Weight,
                 apq_norm, constant_weight, cutoff_above, cutoff_below,
                 distribution, moment, scale_weight, step_weight,
                 weight_from_json, weight_to_json)
from apq.weights import ConstPiece

from conftest import setup


def _random_weight(rng, allow_power=True):
    """Random piecewise weight on [0,1] with 2-5 pieces."""
    n = int(rng.integers(2, 6))
    cuts = np.sort(rng.uniform(0.05, 0.95, size=n - 1))
    ts = [0.0, *cuts, 1.0]
    pieces = []
    for i in range(n):
        lo, hi = ts[i], ts[i + 1]
        if allow_power and lo > 0.0 and rng.uniform() < 0.4:
            pieces.append(PowerPiece(lo, hi, float(rng.uniform(0.3, 2.0)),
                                     float(rng.uniform(-1.5, 1.5))))
        else:
            pieces.append(ConstPiece(lo, hi, float(rng.uniform(0.2, 3.0))))
    return Weight(tuple(pieces))


def _random_class_step_weight(rng, p, max_tries=200):
    """Rejection-sampled step weight with class norm <= Q."""
    for _ in range(max_tries):
        n = int(rng.integers(2, 5))
        cuts = np.sort(rng.uniform(0.1, 0.9, size=n - 1))
        vals = np.exp(rng.normal(0.0, 0.25, size=n))
        w = step_weight(list(cuts), list(vals))
        if apq_norm(w, p, 8) <= p.q:
            return w
    raise RuntimeError("could not sample a class weight")


def test_moment_examples(a2_setup):
    p, c = a2_setup
    w = step_weight([0.5], [1.0, 0.5])
    assert moment(w, -1.0, (0.5, 1.0)) == 2.0
    assert moment(w, 1.0) == 0.75
    assert moment(w, -1.0) == 1.5
    # The extreme-curve profile has exact moments v**pk/(1 - nu*pk).
    v = 0.08
    a = (v / c.v_minus) ** (1.0 / c.nu)
    rho = (c.gamma_minus - c.v_minus) / (1.0 - c.v_minus)
    w = Weight((
        ConstPiece(0.0, rho * a, 1.0),
        ConstPiece(rho * a, a, c.v_minus),
        PowerPiece(a, 1.0, c.v_minus * a**c.nu, c.nu),
    ))
    for pk in (1.0, -1.0):
        want = v**pk / (1.0 - c.nu * pk)
        assert abs(moment(w, pk) - want) <= 1e-12 * abs(want)


def test_moment_against_quadrature():
    rng = np.random.default_rng(0)
    for _ in range(100):
        w = _random_weight(rng)
        pexp = float(rng.uniform(-2.0, 2.0))
        lo = float(rng.uniform(0.0, 0.4))
        hi = float(rng.uniform(lo + 0.2, 1.0))
        got = moment(w, pexp, (lo, hi))
        breaks = sorted({lo, hi, *(t for t in w.breakpoints() if lo < t < hi)})
        total = 0.0
        for a, b in zip(breaks, breaks[1:]):
            val, _ = quad(lambda t: w.value_at(t) ** pexp, a, b,
                          epsabs=1e-13, epsrel=1e-13)
            total += val
        want = total / (hi - lo)
        assert abs(got - want) <= 1e-10 * max(1.0, abs(want))


def test_moment_integrability_guard():
    w = Weight((PowerPiece(0.0, 1.0, 1.0, 0.8),))
    assert abs(moment(w, 1.0) - 1.0 / 0.2) <= 1e-12 * 5.0
    with pytest.raises(NonIntegrableError):
        moment(w, 1.5)  # exponent*p = 1.2 >= 1 at the origin


def test_distribution_examples():
    w = step_weight([0.5], [1.0, 0.5])
    assert distribution(w, 1.0) == 0.5
    assert distribution(w, -1.0) == 1.0
    assert distribution(w, 0.0) == 1.0
    assert distribution(w, 0.4) == 1.0
    assert distribution(w, 2.0) == 0.0
    # Decreasing power profile: threshold algebra.
    vm, nu, a = 0.2, 0.7, 0.3
    w = Weight((ConstPiece(0.0, a, vm), PowerPiece(a, 1.0, vm * a**nu, nu)))
    # w(t) = vm*(a/t)**nu <= vm on [a,1]; at level vm the whole tail is below.
    assert abs(distribution(w, vm) - a) <= 1e-15
    lvl = vm * (a / 0.6) ** nu  # w(0.6) == lvl
    assert abs(distribution(w, lvl) - 0.6) <= 1e-12


def test_scaling():
    rng = np.random.default_rng(1)
    for _ in range(50):
        w = _random_weight(rng)
        s = float(rng.uniform(0.3, 3.0))
        ws = scale_weight(w, s)
        for pexp in (1.0, -1.0, 2.0):
            a = moment(ws, pexp)
            b = s**pexp * moment(w, pexp)
            assert abs(a - b) <= 5e-15 * abs(b)
        lvl = float(rng.uniform(0.2, 2.5))
        assert abs(distribution(ws, s * lvl) - distribution(w, lvl)) <= 1e-12


def test_apq_norm_examples(a2_setup):
    p, c = a2_setup
    assert abs(apq_norm(constant_weight(3.7), p) - 1.0) <= 1e-12
    w = step_weight([0.5], [1.0, 0.5])
    assert abs(apq_norm(w, p) - 1.125) <= 1e-9
    # Pure power profile t**(-nu): norm exactly Q, attained on [0, 1].
    u = Weight((PowerPiece(0.0, 1.0, 1.0, c.nu),))
    got = apq_norm(u, p)
    assert got <= 2.0 * (1.0 + 1e-9)
    assert got >= 2.0 * (1.0 - 1e-9)


def test_apq_norm_resolution_stability(a2_setup):
    p, c = a2_setup
    rng = np.random.default_rng(2)
    for _ in range(20):
        w = _random_class_step_weight(rng, p)
        a = apq_norm(w, p, 16)
        b = apq_norm(w, p, 32)
        assert b >= a - 1e-12      # finer grids only improve the lower bound
        assert abs(b - a) <= 1e-6


def test_cutoff_examples():
    w = step_weight([0.5], [1.0, 0.5])
    lo = cutoff_below(w, 0.7)
    assert [(_p.lo, _p.hi, _p.value) for _p in lo.pieces] == [(0.0, 0.5, 0.7), (0.5, 1.0, 0.5)]
    hi = cutoff_above(w, 0.7)
    assert [(_p.lo, _p.hi, _p.value) for _p in hi.pieces] == [(0.0, 0.5, 1.0), (0.5, 1.0, 0.7)]


def test_cutoff_pointwise():
    rng = np.random.default_rng(3)
    ts = np.linspace(1e-3, 1.0, 211)
    for _ in range(50):
        w = _random_weight(rng)
        lvl = float(rng.uniform(0.3, 2.0))
        lo = cutoff_below(w, lvl)
        hi = cutoff_above(w, lvl)
        for t in ts:
            t = float(t)
            assert abs(lo.value_at(t) - min(w.value_at(t), lvl)) <= 1e-12
            assert abs(hi.value_at(t) - max(w.value_at(t), lvl)) <= 1e-12


def test_cutoff_splits_power_at_crossing(a2_setup):
    p, c = a2_setup
    vm, nu = c.v_minus, c.nu
    a = 0.3
    w = Weight((ConstPiece(0.0, a, 0.05), PowerPiece(a, 1.0, vm * a**nu, nu)))
    # The tail starts at value vm at t = a and decreases; a cutoff at a level
    # inside the tail's range splits the power piece at the crossing.
    lvl = vm * (a / 0.7) ** nu
    cut = cutoff_below(w, lvl)
    kinds = [type(q).__name__ for q in cut.pieces]
    assert kinds == ["ConstPiece", "ConstPiece", "PowerPiece"]
    assert abs(cut.pieces[1].hi - 0.7) <= 1e-12
    assert cut.pieces[1].value == lvl


def test_cutoff_keeps_class_membership(a2_setup):
    # Every tested subinterval ratio of the lower cutoff stays at or below the
    # original's, so the class norm cannot grow.
    p, c = a2_setup
    rng = np.random.default_rng(4)
    for _ in range(50):
        w = _random_class_step_weight(rng, p)
        lvl = float(rng.uniform(0.5, 1.8))
        cut = cutoff_below(w, lvl)
        assert apq_norm(cut, p, 8) <= p.q * (1.0 + 1e-6)
        ts = sorted(set(w.breakpoints()) | set(np.linspace(0, 1, 9)))
        for i in range(len(ts)):
            for j in range(i + 1, len(ts)):
                a, b = ts[i], ts[j]
                if b - a < 1e-9:
                    continue
                r_w = moment(w, p.p1, (a, b)) ** (1 / p.p1) \
                    * moment(w, p.p2, (a, b)) ** (-1 / p.p2)
                r_c = moment(cut, p.p1, (a, b)) ** (1 / p.p1) \
                    * moment(cut, p.p2, (a, b)) ** (-1 / p.p2)
                assert r_c <= r_w + 1e-10


def test_two_step_membership():
    # Weights from unit-curve chords staying in the domain are in the class.
    rng = np.random.default_rng(5)
    for p1, p2 in [(1.0, -1.0), (2.0, 1.0)]:
        p, c = setup(p1, p2)
        from apq.extremal import _chord_inside
        count = 0
        while count < 100:
            u = math.exp(rng.uniform(math.log(0.3), math.log(3.0)))
            v = math.exp(rng.uniform(math.log(0.3), math.log(3.0)))
            up = (u**p1, u**p2)
            vp = (v**p1, v**p2)
            if not _chord_inside(up, vp, p):
                continue
            w = step_weight([float(rng.uniform(0.2, 0.8))], [u, v])
            assert apq_norm(w, p, 8) <= p.q * (1.0 + 1e-9)
            count += 1


def test_json_round_trip():
    rng = np.random.default_rng(6)
    for _ in range(20):
        w = _random_weight(rng)
        doc = json.loads(json.dumps(weight_to_json(w)))
        w2 = weight_from_json(doc)
        assert len(w2.pieces) == len(w.pieces)
        for a, b in zip(w.pieces, w2.pieces):
            assert type(a) is type(b)
            assert a == b  # repr round-trip through json is exact for floats


def test_weight_validation():
    with pytest.raises(DomainError):
        Weight((ConstPiece(0.0, 0.5, 1.0),))  # does not reach 1
    with pytest.raises(DomainError):
        Weight((ConstPiece(0.0, 0.5, 1.0), ConstPiece(0.6, 1.0, 1.0)))  # gap
    with pytest.raises(DomainError):
        Weight((ConstPiece(0.0, 1.0, -1.0),))  # nonpositive
    with pytest.raises(DomainError):
        step_weight([0.5], [1.0])  # value count mismatch
