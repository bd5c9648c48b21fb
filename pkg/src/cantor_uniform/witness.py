"""Explicit curves certifying that D(omega) is uniform.

Given two points of the complement, build a curve of segments and geodesic
arcs joining them, following the case analysis: same half-plane, one or both
endpoints on the real axis, or opposite half-planes, where the crossing of the
real axis is routed around the hull or through a well-chosen gap.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import CoincidentPoints, NotUniform, PointNotInDomain, VerificationFailed
from .geometry import PathCurve, Segment, UniformityReport, geodesic, verify_conditions
from .sequence import INFINITE, SequenceSpec, big_N, omega_delta_i, select_delta
from .sequence import theorem_constant as _theorem_constant
from .tree import CantorTree, OutsideHull, distance_oracle, format_gap, locate

CASE_TAGS = ("Case1", "Case2", "Case3", "Case4i", "Case4ii", "Case4iiiA", "Case4iiiB")


def theorem_constant(n0: int, delta) -> Fraction:
    return _theorem_constant(n0, delta)


def case_constant(case_tag: str, n0: int | None = None, delta=None) -> float:
    """Constant guaranteed by the construction used for ``case_tag``."""
    if case_tag in ("Case1", "Case2", "Case3"):
        return math.pi / 2
    if case_tag == "Case4i":
        return 3 * math.pi / 2 + 2
    if case_tag == "Case4iiiA":
        return 12.0
    if n0 is None or delta is None:
        raise ValueError(f"{case_tag} needs n0 and delta")
    delta = Fraction(delta)
    base = (2 / (1 - delta)) ** (n0 + 1) / delta
    if case_tag == "Case4ii":
        return float(8 * base)
    if case_tag == "Case4iiiB":
        return float(9 * base)
    raise ValueError(f"unknown case tag {case_tag!r}")


@dataclass
class WitnessResult:
    curve: PathCurve
    case_tag: str
    case_constant: float
    global_constant: Fraction
    delta: Fraction
    n0: int
    normalization: dict
    report: UniformityReport | None
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        from .sequence import format_rational
        out = {
            "case": self.case_tag,
            "constants": {"case": self.case_constant,
                          "global": format_rational(self.global_constant),
                          "global_float": float(self.global_constant)},
            "delta": format_rational(self.delta),
            "N": self.n0,
            "normalization": self.normalization,
            "details": self.details,
            "curve": self.curve.to_json(),
        }
        if self.report is not None:
            r = self.report
            out["report"] = {"u1_ratio": r.u1_ratio, "u2_worst": r.u2_worst,
                             "samples": r.samples, "pass": r.passed}
        return out


def _pieces(*pieces):
    return [p for p in pieces if p.length > 0]


def _detour(top: complex, bottom: complex, x: float, d: float) -> list:
    """Geodesic from ``top`` down to x + d i, vertical to x - d i, across to ``bottom``."""
    up, down = complex(x, d), complex(x, -d)
    first = [geodesic(top, up)] if top != up else []
    return first + _pieces(Segment(up, down), Segment(down, bottom))


class _Case4:
    """Opposite half-planes, normalised so that Im a >= |Im b| and a is upper."""

    def __init__(self, spec: SequenceSpec, delta: Fraction, n0: int):
        self.spec = spec
        self.delta = delta
        self.n0 = n0
        self.i1 = float((1 - spec.q(1)) / 2)

    def build(self, a: complex, b: complex) -> tuple[str, list, dict]:
        d = -b.imag
        binf = b.real
        dq = Fraction(d)
        # K: first level no longer than d (at least 1)
        k, length = 1, (1 - self.spec.q(1)) / 2
        while length > dq:
            k += 1
            length *= (1 - self.spec.q(k)) / 2
        n_prime = omega_delta_i(self.spec, self.delta, k)
        tree = CantorTree(self.spec, k + n_prime, max_depth=k + n_prime)
        where = locate(tree, Fraction(binf))
        if isinstance(where, list):
            return self._in_set(tree, where, a, b, k, n_prime)
        gap = where.gap if isinstance(where, OutsideHull) else where
        details = {"J_b": format_gap(gap), "d": d}
        if gap.length >= dq:
            return "Case4iiiA", self._pivot(gap, a, b, d, details), details
        # small gap: land on its nearer endpoint, then proceed as for a point of E
        lo_end, hi_end = gap.lo, gap.hi
        end = lo_end if Fraction(binf) - lo_end <= hi_end - Fraction(binf) else hi_end
        b_prime = complex(float(end), -d)
        sub_where = locate(tree, end)
        sub_tag, sub_pieces, sub_details = self._in_set(tree, sub_where, a, b_prime, k, n_prime)
        details.update(sub_details)
        details["b_prime"] = [b_prime.real, b_prime.imag]
        details["inner_case"] = sub_tag
        return "Case4iiiB", sub_pieces + _pieces(Segment(b_prime, b)), details

    def _in_set(self, tree, chain, a, b, k, n_prime):
        d = -b.imag
        binf = b.real
        if d > self.i1:
            x = -d if binf <= 1 - binf else 1 + d
            return "Case4i", _detour(a, b, x, d), {"pivot_x": x, "d": d}
        parent = chain[k + n_prime - 2] if k + n_prime >= 2 else tree.node(())
        gap = tree.gap_below(parent)
        mid = float(gap.midpoint)
        details = {"K": k, "N_prime": n_prime, "gap_step": gap.step, "gap": format_gap(gap),
                   "b_mid": mid, "d": d}
        return "Case4ii", _detour(a, b, mid, d), details

    def _pivot(self, gap, a, b, d, details):
        binf = b.real
        g0, g1 = float(gap.lo), float(gap.hi)

        def margin(x):
            return min(x - g0, g1 - x)

        right, left = binf + d / 4, binf - d / 4
        mr, ml = margin(right), margin(left)
        if mr != ml:
            b0 = right if mr > ml else left
        elif math.isfinite(g0) and math.isfinite(g1):
            mid = 0.5 * (g0 + g1)
            b0 = right if abs(right - mid) <= abs(left - mid) else left
        else:
            b0 = right
        details["b0"] = b0
        return _detour(a, b, b0, d)


def _normalize_cross(a: complex, b: complex) -> tuple[complex, complex, bool, bool]:
    """Order and reflect so the first point is upper with the larger |Im|.

    Ties in |Im| go to the smaller real part, which reflection leaves alone.
    """
    ka = (-abs(a.imag), a.real)
    kb = (-abs(b.imag), b.real)
    swapped = kb < ka
    top, bottom = (b, a) if swapped else (a, b)
    reflected = top.imag < 0
    if reflected:
        top, bottom = top.conjugate(), bottom.conjugate()
    return top, bottom, swapped, reflected


def build_witness(spec: SequenceSpec, delta, a, b, samples_per_unit: int = 64,
                  tol: float = 1e-9, verify: bool = True) -> WitnessResult:
    """Curve from ``a`` to ``b`` in D(omega) meeting both uniformity conditions with c(N0, delta)."""
    if delta is None:
        choice = select_delta(spec)
        if choice is None:
            raise NotUniform("N(omega, delta) is infinite for every delta")
        delta = choice.delta
    delta = Fraction(delta)
    n0 = big_N(spec, delta)
    if n0 == INFINITE:
        raise NotUniform(f"N(omega, {delta}) is infinite")
    a, b = complex(a), complex(b)
    if a == b:
        raise CoincidentPoints("a and b coincide")
    oracle = distance_oracle(spec)
    lo, _, _, _ = oracle.brackets([a, b], tol)
    for name, value, p in (("a", lo[0], a), ("b", lo[1], b)):
        if not value > 0:
            raise PointNotInDomain(f"{name}={p!r} is not certified to lie off the set")

    global_c = _theorem_constant(n0, delta)
    norm = {"swapped": False, "reflected": False}
    details: dict = {}
    if (a.imag > 0 and b.imag > 0) or (a.imag < 0 and b.imag < 0):
        tag, pieces = "Case1", [geodesic(a, b)]
    elif a.imag == 0 and b.imag == 0:
        tag, pieces = "Case3", [geodesic(a, b, half="upper")]
    elif a.imag == 0 or b.imag == 0:
        tag, pieces = "Case2", [geodesic(a, b)]
    else:
        top, bottom, swapped, reflected = _normalize_cross(a, b)
        norm = {"swapped": swapped, "reflected": reflected}
        tag, pieces, details = _Case4(spec, delta, n0).build(top, bottom)
        curve = PathCurve.from_pieces(pieces)
        if reflected:
            curve = curve.conjugate()
        if swapped:
            curve = curve.reversed()
        pieces = list(curve.pieces)
    curve = PathCurve(tuple(pieces), a, b)

    report = None
    if verify:
        report = verify_conditions(curve, a, b, float(global_c), spec,
                                   samples_per_unit=samples_per_unit, tol=tol, oracle=oracle)
        if not report.passed:
            raise VerificationFailed(
                f"{tag} witness failed at c={float(global_c):.6g}: "
                f"u1={report.u1_ratio:.6g}, u2={report.u2_worst:.6g}", report)
    return WitnessResult(curve, tag, case_constant(tag, n0, delta), global_c, delta, n0,
                         norm, report, details)
