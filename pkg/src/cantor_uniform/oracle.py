"""Brute-force bounds on the best uniformity constant for a single pair.

The lower bound needs no curve at all: any admissible curve from the upper to
the lower half-plane meets the real axis at some z off the set, and then both
the length ratio and the half-curve ratio at z are bounded below by quantities
that only depend on z.  Covering the real line by finitely many pieces gives a
rigorous bound.  The upper bound measures explicit template curves.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import OutOfRange
from .geometry import PathCurve, Segment, geodesic, opposite_sides, verify_conditions
from .sequence import SequenceSpec, select_delta
from .tree import CantorTree, distance_oracle
from .witness import _normalize_cross, build_witness

GAP_PIECES = 8
FAR_DOUBLINGS = 20
NEAR_HALVINGS = 10


def _levels(spec: SequenceSpec, depth: int):
    lengths, offsets = CantorTree(spec, depth, max_depth=max(depth, 64)).float_levels()
    los = [np.zeros(1)]
    for k in range(1, depth + 1):
        prev = los[-1]
        los.append(np.concatenate((prev, prev + offsets[k])))
    return lengths, los


def _regions(spec: SequenceSpec, depth: int, origin: float, reach: float):
    """(u, v, tmax) arrays covering the real line minus nothing but points of E.

    ``tmax`` bounds dist(z, E) from above on [u, v]: exact for gap pieces,
    half the length for leaves, the far end for the outer components.
    """
    lengths, los = _levels(spec, depth)
    us, vs, ts = [], [], []
    frac = np.arange(GAP_PIECES + 1) / GAP_PIECES
    for k in range(1, depth + 1):
        parent = los[k - 1]
        g0 = parent + lengths[k]
        g1 = parent + lengths[k - 1] - lengths[k]
        pts = g0[:, None] + (g1 - g0)[:, None] * frac[None, :]
        u, v = pts[:, :-1], pts[:, 1:]
        tent = lambda x: np.minimum(x - g0[:, None], g1[:, None] - x)
        us.append(u.ravel())
        vs.append(v.ravel())
        ts.append(np.maximum(tent(u), tent(v)).ravel())
    leaf = los[depth]
    us.append(leaf)
    vs.append(leaf + lengths[depth])
    ts.append(np.full(leaf.shape, lengths[depth] / 2))

    steps = [0.0] + [reach * 2.0**j for j in range(-NEAR_HALVINGS, FAR_DOUBLINGS + 1)]
    t0, t1 = np.array(steps[:-1]), np.array(steps[1:])
    for end, sign in ((0.0, -1.0), (1.0, 1.0)):
        a_, b_ = end + sign * t0, end + sign * t1
        us.append(np.minimum(a_, b_))
        vs.append(np.maximum(a_, b_))
        ts.append(t1)
    # tails: no useful dist bound, the length ratio alone does the work
    us.append(np.array([-math.inf, 1.0 + steps[-1]]))
    vs.append(np.array([-steps[-1], math.inf]))
    ts.append(np.array([math.inf, math.inf]))
    u, v, t = (np.concatenate(x) for x in (us, vs, ts))
    return u + origin, v + origin, t


def crossing_lower_bound(spec: SequenceSpec, a, b, depth: int, origin: float = 0.0) -> float:
    """Lower bound on any constant achievable for the pair (a, b).

    The hull of the set is [origin, origin + 1].  Pairs not in opposite open
    half-planes get the trivial bound 1.
    """
    a, b = complex(a), complex(b)
    if not opposite_sides(a, b):
        return 1.0
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    ab = abs(a - b)
    u, v, tmax = _regions(spec, depth, float(origin), ab)
    # the length ratio is convex in z with its minimum where [a, b] meets the axis
    zstar = a.real + (b.real - a.real) * a.imag / (a.imag - b.imag)
    zc = np.clip(zstar, u, v)
    ellipse = (np.hypot(zc - a.real, a.imag) + np.hypot(zc - b.real, b.imag)) / ab

    def reach(p):
        zp = np.clip(p.real, u, v)
        return np.hypot(zp - p.real, p.imag)

    near = np.minimum(reach(a), reach(b))
    with np.errstate(divide="ignore"):
        split = np.where(np.isinf(tmax), 0.0, near / tmax)
    return float(np.min(np.maximum(ellipse, split)))


def _template(top: complex, bottom: complex, x: float) -> PathCurve:
    d = -bottom.imag
    up, down = complex(x, d), complex(x, -d)
    pieces = [geodesic(top, up)] if top != up else []
    pieces.append(Segment(up, down))
    if down != bottom:
        pieces.append(Segment(down, bottom))
    return PathCurve(tuple(pieces), top, bottom)


def _crossing_split(curve: PathCurve) -> float:
    s = curve.real_crossings()[0]
    return min(s, curve.length - s)


def template_upper_bound(spec: SequenceSpec, delta, a, b, depth: int,
                         samples_per_unit: int = 64, tol: float = 1e-9) -> float:
    """Smallest measured max(u1, u2) over a family of explicit curves."""
    if delta is None:
        choice = select_delta(spec)
        delta = choice.delta if choice is not None else None
    a, b = complex(a), complex(b)
    oracle = distance_oracle(spec)
    witness = build_witness(spec, delta, a, b, samples_per_unit=samples_per_unit, tol=tol,
                            verify=False)

    def measure(curve: PathCurve) -> float:
        r = verify_conditions(curve, a, b, 1.0, spec, samples_per_unit=samples_per_unit,
                              tol=tol, oracle=oracle)
        return max(r.u1_ratio, r.u2_worst)

    best = measure(witness.curve)
    if not opposite_sides(a, b):
        return best

    top, bottom, swapped, reflected = _normalize_cross(a, b)
    ab = abs(a - b)
    d = -bottom.imag
    tree = CantorTree(spec, depth, max_depth=max(depth, 64))
    # (abscissa, dist of the crossing to E)
    crossings = [(-d, d), (1 + d, d)]
    crossings += [(float(g.midpoint), float(g.length) / 2) for g in tree.gaps(depth)]
    for x, dist in crossings:
        curve = _template(top, bottom, x)
        if curve.length / ab >= best or _crossing_split(curve) / dist >= best:
            continue
        if reflected:
            curve = curve.conjugate()
        if swapped:
            curve = curve.reversed()
        curve = PathCurve(curve.pieces, a, b)
        best = min(best, measure(curve))
    return best


@dataclass(frozen=True)
class InE:
    depth: int


@dataclass(frozen=True)
class InGapAtStep:
    step: int


def base3_membership(x, depth: int):
    """Ternary-set membership of ``x`` read off its first ``depth`` base-3 digits.

    Endpoints take the expansion avoiding the digit 1, so 1/3 = 0.0222...
    """
    x = Fraction(x)
    if not 0 <= x <= 1:
        raise OutOfRange("x", f"{x} is outside [0, 1]")
    for step in range(1, depth + 1):
        t = 3 * x
        if 1 < t < 2:
            return InGapAtStep(step)
        x = t if t <= 1 else t - 2
    return InE(depth)


def pair_bounds(spec: SequenceSpec, a, b, depth: int, delta=None) -> dict:
    """Both bounds for one pair, as reported by the command line."""
    lower = crossing_lower_bound(spec, a, b, depth)
    upper = template_upper_bound(spec, delta, a, b, depth)
    return {"lower": lower, "upper": upper}
