"""Exact calculus for piecewise weights on [0, 1].

A Weight is an ordered list of pieces tiling [0, 1]; each piece is either a
positive constant or a power profile w(t) = coef * t**(-exponent).  Moments,
the distribution function |{w >= level}|, and level cutoffs are all exact
closed forms; the class-norm estimator is a grid-plus-refinement lower bound
of   sup over subintervals of  <w**p1>**(1/p1) * <w**p2>**(-1/p2).

Weights are immutable; cutoffs and dilations build new values, so sharing
across verification threads is safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NonIntegrableError
from .params import Params

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ConstPiece:
    lo: float
    hi: float
    value: float

    def to_json(self) -> dict:
        return {"kind": "const", "value": self.value, "lo": self.lo, "hi": self.hi}


@dataclass(frozen=True)
class PowerPiece:
    """w(t) = coef * t**(-exponent) on [lo, hi)."""

    lo: float
    hi: float
    coef: float
    exponent: float

    def to_json(self) -> dict:
        return {"kind": "power", "coef": self.coef, "exponent": self.exponent,
                "lo": self.lo, "hi": self.hi}


Piece = ConstPiece | PowerPiece


@dataclass(frozen=True)
class Weight:
    pieces: tuple[Piece, ...]

    def __post_init__(self) -> None:
        if not self.pieces:
            raise DomainError("weight needs at least one piece")
        if abs(self.pieces[0].lo) > 1e-15 or abs(self.pieces[-1].hi - 1.0) > 1e-15:
            raise DomainError("pieces must tile [0, 1]")
        prev_hi = self.pieces[0].lo
        for pc in self.pieces:
            if not pc.hi > pc.lo:
                raise DomainError(f"piece [{pc.lo}, {pc.hi}) is empty or reversed")
            if abs(pc.lo - prev_hi) > 1e-15:
                raise DomainError("pieces must be contiguous")
            prev_hi = pc.hi
            if isinstance(pc, ConstPiece):
                if not pc.value > 0.0:
                    raise DomainError("constant pieces must be positive")
            else:
                if not pc.coef > 0.0:
                    raise DomainError("power pieces need a positive coefficient")

    def value_at(self, t: float) -> float:
        for pc in self.pieces:
            if pc.lo <= t <= pc.hi:
                if isinstance(pc, ConstPiece):
                    return pc.value
                return pc.coef * t ** (-pc.exponent)
        raise DomainError(f"t={t} outside [0, 1]")

    def breakpoints(self) -> list[float]:
        return [self.pieces[0].lo] + [pc.hi for pc in self.pieces]


def constant_weight(value: float) -> Weight:
    return Weight((ConstPiece(0.0, 1.0, value),))


def step_weight(breaks: list[float], values: list[float]) -> Weight:
    """Step weight with the given interior breakpoints (0 and 1 implied)."""
    ts = [0.0] + list(breaks) + [1.0]
    if len(values) != len(ts) - 1:
        raise DomainError("need one value per step")
    pieces = [ConstPiece(ts[i], ts[i + 1], values[i]) for i in range(len(values))
              if ts[i + 1] > ts[i]]
    return Weight(tuple(pieces))


def _piece_integral(pc: Piece, p: float, lo: float, hi: float) -> float:
    """Integral of w**p over [lo, hi] inside the piece (no averaging)."""
    if hi <= lo:
        return 0.0
    try:
        if isinstance(pc, ConstPiece):
            return pc.value**p * (hi - lo)
        return _power_piece_integral(pc, p, lo, hi)
    except OverflowError:
        raise NonIntegrableError(
            f"moment p={p} overflows double precision on piece {pc}")


def _power_piece_integral(pc: "PowerPiece", p: float, lo: float, hi: float) -> float:
    e = pc.exponent * p
    cp = pc.coef**p
    if lo <= 0.0:
        if e >= 1.0:
            raise NonIntegrableError(
                f"moment p={p} diverges: power piece at 0 with exponent*p={e}")
        return cp * hi ** (1.0 - e) / (1.0 - e)
    if abs(1.0 - e) < 1e-13:
        return cp * math.log(hi / lo)
    return cp * (hi ** (1.0 - e) - lo ** (1.0 - e)) / (1.0 - e)


def moment(w: Weight, p: float, interval: tuple[float, float] = (0.0, 1.0)) -> float:
    """Average of w**p over the interval, from the per-piece closed forms."""
    alpha, beta = interval
    if not 0.0 <= alpha < beta <= 1.0 + 1e-15:
        raise DomainError(f"bad interval [{alpha}, {beta}]")
    total = 0.0
    for pc in w.pieces:
        lo = max(alpha, pc.lo)
        hi = min(beta, pc.hi)
        if hi > lo:
            total += _piece_integral(pc, p, lo, hi)
    return total / (beta - alpha)


def distribution(w: Weight, level: float) -> float:
    """Exact measure of {t in [0,1] : w(t) >= level}."""
    if level <= 0.0:
        return 1.0
    total = 0.0
    for pc in w.pieces:
        if isinstance(pc, ConstPiece):
            if pc.value >= level:
                total += pc.hi - pc.lo
            continue
        e = pc.exponent
        if e == 0.0:
            if pc.coef >= level:
                total += pc.hi - pc.lo
            continue
        t_star = (pc.coef / level) ** (1.0 / e)
        if e > 0.0:  # decreasing: w >= level iff t <= t_star
            total += max(0.0, min(pc.hi, t_star) - pc.lo)
        else:  # increasing: w >= level iff t >= t_star
            total += max(0.0, pc.hi - max(pc.lo, t_star))
    return total


def scale_weight(w: Weight, s: float) -> Weight:
    """Pointwise s*w for s > 0."""
    if not s > 0.0:
        raise DomainError("scale factor must be positive")
    out: list[Piece] = []
    for pc in w.pieces:
        if isinstance(pc, ConstPiece):
            out.append(ConstPiece(pc.lo, pc.hi, pc.value * s))
        else:
            out.append(PowerPiece(pc.lo, pc.hi, pc.coef * s, pc.exponent))
    return Weight(tuple(out))


def dilate_into(w: Weight, lo: float, hi: float) -> list[tuple[float, float, float]]:
    """Constant-piece image of w rescaled onto [lo, hi]; steps only.

    Helper for assembling step weights from sub-weights; power pieces are not
    representable after an affine shift and are rejected.
    """
    out = []
    length = hi - lo
    for pc in w.pieces:
        if not isinstance(pc, ConstPiece):
            raise DomainError("only step weights can be dilated into a subinterval")
        out.append((lo + pc.lo * length, lo + pc.hi * length, pc.value))
    return out


def _merge_consts(pieces: list[Piece]) -> tuple[Piece, ...]:
    out: list[Piece] = []
    for pc in pieces:
        if pc.hi <= pc.lo:
            continue
        if (out and isinstance(pc, ConstPiece) and isinstance(out[-1], ConstPiece)
                and out[-1].value == pc.value):
            out[-1] = ConstPiece(out[-1].lo, pc.hi, pc.value)
        else:
            out.append(pc)
    return tuple(out)


def _cut_piece(pc: Piece, level: float, keep_below: bool) -> list[Piece]:
    """min(w, level) on the piece when keep_below, else max(w, level)."""
    if isinstance(pc, ConstPiece):
        v = min(pc.value, level) if keep_below else max(pc.value, level)
        return [ConstPiece(pc.lo, pc.hi, v)]
    e = pc.exponent
    if e == 0.0:
        v = min(pc.coef, level) if keep_below else max(pc.coef, level)
        return [ConstPiece(pc.lo, pc.hi, v)]
    t_star = (pc.coef / level) ** (1.0 / e)
    # For e > 0 the profile decreases, so w > level exactly on t < t_star.
    if t_star <= pc.lo:
        above_first = False
        split = None
    elif t_star >= pc.hi:
        above_first = True
        split = None
    else:
        above_first = True
        split = t_star
    if e < 0.0:  # increasing profile: w > level on t > t_star
        above_first = not above_first

    def seg(lo: float, hi: float, above: bool) -> Piece:
        clamp = (above and keep_below) or (not above and not keep_below)
        return ConstPiece(lo, hi, level) if clamp else PowerPiece(lo, hi, pc.coef, e)

    if split is None:
        return [seg(pc.lo, pc.hi, above_first)]
    return [seg(pc.lo, split, above_first), seg(split, pc.hi, not above_first)]


def cutoff_below(w: Weight, level: float) -> Weight:
    """Pointwise min(w, level) as a valid piece list."""
    if not level > 0.0:
        raise DomainError("cutoff level must be positive")
    pieces: list[Piece] = []
    for pc in w.pieces:
        pieces.extend(_cut_piece(pc, level, keep_below=True))
    return Weight(_merge_consts(pieces))


def cutoff_above(w: Weight, level: float) -> Weight:
    """Pointwise max(w, level) as a valid piece list."""
    if not level > 0.0:
        raise DomainError("cutoff level must be positive")
    pieces: list[Piece] = []
    for pc in w.pieces:
        pieces.extend(_cut_piece(pc, level, keep_below=False))
    return Weight(_merge_consts(pieces))


# ---------------------------------------------------------------------------
# Class-norm estimation
# ---------------------------------------------------------------------------

def _candidate_points(w: Weight, resolution: int) -> np.ndarray:
    pts = set(w.breakpoints())
    for pc in w.pieces:
        lo = pc.lo if pc.lo > 0.0 else pc.hi * 1e-6
        if lo >= pc.hi:
            continue
        ratio = pc.hi / lo
        for k in range(1, resolution + 1):
            pts.add(lo * ratio ** (k / (resolution + 1.0)))
        if pc.lo == 0.0:
            pts.add(0.0)
    return np.array(sorted(pts))


def _ratio(w: Weight, p: Params, alpha: float, beta: float) -> float:
    m1 = moment(w, p.p1, (alpha, beta))
    m2 = moment(w, p.p2, (alpha, beta))
    return math.exp(math.log(m1) / p.p1 - math.log(m2) / p.p2)


def _golden_max(f, lo: float, hi: float, iters: int = 60) -> tuple[float, float]:
    a, b = lo, hi
    c1 = b - _GOLDEN * (b - a)
    c2 = a + _GOLDEN * (b - a)
    f1, f2 = f(c1), f(c2)
    for _ in range(iters):
        if f1 < f2:
            a, c1, f1 = c1, c2, f2
            c2 = a + _GOLDEN * (b - a)
            f2 = f(c2)
        else:
            b, c2, f2 = c2, c1, f1
            c1 = b - _GOLDEN * (b - a)
            f1 = f(c1)
    return (c1, f1) if f1 >= f2 else (c2, f2)


def apq_norm(w: Weight, p: Params, resolution: int = 16) -> float:
    """Certified lower bound of the class norm sup over subintervals.

    Candidate endpoints are all breakpoints plus `resolution` geometric
    subdivisions per piece; the best grid cell gets one coordinate-wise
    golden-section refinement.
    """
    if resolution < 2:
        raise DomainError("resolution must be at least 2")
    ts = _candidate_points(w, resolution)
    n = len(ts)

    # Cumulative integrals of w**p at the candidate points -> O(1) averages.
    def cumulative(pexp: float) -> np.ndarray:
        cum = np.empty(n)
        piece_iter = iter(w.pieces)
        pc = next(piece_iter)
        prev_t = ts[0]
        total = 0.0
        for i, t in enumerate(ts):
            while t > pc.hi + 1e-18:
                total += _piece_integral(pc, pexp, max(prev_t, pc.lo), pc.hi)
                prev_t = pc.hi
                pc = next(piece_iter)
            total += _piece_integral(pc, pexp, max(prev_t, pc.lo), min(t, pc.hi))
            prev_t = t
            cum[i] = total
        return cum

    cum1 = cumulative(p.p1)
    cum2 = cumulative(p.p2)
    lengths = ts[None, :] - ts[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        m1 = (cum1[None, :] - cum1[:, None]) / lengths
        m2 = (cum2[None, :] - cum2[:, None]) / lengths
        logr = np.log(m1) / p.p1 - np.log(m2) / p.p2
    logr[~np.triu(np.ones((n, n), dtype=bool), k=1)] = -np.inf
    logr[~np.isfinite(logr)] = -np.inf
    i, j = np.unravel_index(int(np.argmax(logr)), logr.shape)
    best = math.exp(logr[i, j])

    # One local refinement of each endpoint inside its neighbor cells.
    alpha, beta = float(ts[i]), float(ts[j])
    a_lo = float(ts[i - 1]) if i > 0 else alpha
    a_hi = min(float(ts[i + 1]), beta * (1.0 - 1e-12)) if i + 1 < n else alpha
    if a_hi > a_lo:
        a_new, val = _golden_max(lambda a: _ratio(w, p, a, beta), a_lo, a_hi)
        if val > best:
            best, alpha = val, a_new
    b_lo = max(float(ts[j - 1]), alpha + 1e-15) if j > 0 else beta
    b_hi = float(ts[j + 1]) if j + 1 < n else beta
    if b_hi > b_lo:
        _, val = _golden_max(lambda b: _ratio(w, p, alpha, b), b_lo, b_hi)
        if val > best:
            best = val
    return best


# ---------------------------------------------------------------------------
# JSON wire format
# ---------------------------------------------------------------------------

def weight_to_json(w: Weight) -> dict:
    return {"pieces": [pc.to_json() for pc in w.pieces]}


def weight_from_json(doc: dict) -> Weight:
    try:
        raw = doc["pieces"]
    except (KeyError, TypeError):
        raise DomainError("weight document needs a 'pieces' array")
    pieces: list[Piece] = []
    for item in raw:
        kind = item.get("kind")
        if kind == "const":
            pieces.append(ConstPiece(float(item["lo"]), float(item["hi"]),
                                     float(item["value"])))
        elif kind == "power":
            pieces.append(PowerPiece(float(item["lo"]), float(item["hi"]),
                                     float(item["coef"]), float(item["exponent"])))
        else:
            raise DomainError(f"unknown piece kind {kind!r}")
    return Weight(tuple(pieces))
