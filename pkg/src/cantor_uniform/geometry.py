"""Curves built from segments and half-plane geodesic arcs, and the two uniformity checks.

Points are Python complex numbers throughout.  An arc is stored by center on
the real axis, radius and start/end angle; upper arcs use angles in [0, pi]
and lower arcs angles in [-pi, 0].
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import (
    CoincidentPoints,
    GeometryError,
    ParameterOutOfRange,
    PointOnSet,
    SameHalfPlaneViolation,
)

JOIN_TOL = 1e-12
U_SLACK = 1e-6
MIN_SAMPLES = 512


@dataclass(frozen=True)
class Segment:
    p: complex
    q: complex

    @property
    def start(self) -> complex:
        return self.p

    @property
    def end(self) -> complex:
        return self.q

    @property
    def length(self) -> float:
        return abs(self.q - self.p)

    def points(self, s: np.ndarray) -> np.ndarray:
        n = self.length
        t = s / n if n > 0 else np.zeros_like(s)
        return self.p + (self.q - self.p) * t

    def real_crossings(self) -> list[float]:
        """Arclength positions where the segment meets the real axis."""
        y0, y1 = self.p.imag, self.q.imag
        if y0 == y1:
            return []
        t = y0 / (y0 - y1)
        return [t * self.length] if 0 <= t <= 1 else []

    def reversed(self) -> "Segment":
        return Segment(self.q, self.p)

    def conjugate(self) -> "Segment":
        return Segment(self.p.conjugate(), self.q.conjugate())

    def to_json(self) -> dict:
        return {"type": "segment", "p": [self.p.real, self.p.imag], "q": [self.q.real, self.q.imag]}


@dataclass(frozen=True)
class Arc:
    half: str
    center: float
    radius: float
    a0: float
    a1: float
    # exact endpoints when known; large radii make center + r e^{i theta} lossy
    p0: complex | None = field(default=None, compare=False)
    p1: complex | None = field(default=None, compare=False)

    def __post_init__(self):
        if not self.radius > 0:
            raise GeometryError("arc radius must be positive")
        lo, hi = (0.0, math.pi) if self.half == "upper" else (-math.pi, 0.0)
        if not (lo <= self.a0 <= hi and lo <= self.a1 <= hi):
            raise GeometryError(f"arc angles outside the {self.half} half-plane")

    def _at(self, theta) -> complex:
        return self.center + self.radius * complex(math.cos(theta), math.sin(theta))

    @property
    def start(self) -> complex:
        return self.p0 if self.p0 is not None else self._at(self.a0)

    @property
    def end(self) -> complex:
        return self.p1 if self.p1 is not None else self._at(self.a1)

    @property
    def length(self) -> float:
        sweep = abs(self.a1 - self.a0)
        if sweep < 1.0:
            # chord = 2 r sin(sweep / 2) is well conditioned for short arcs
            chord = abs(self.end - self.start)
            sweep = 2.0 * math.asin(min(1.0, chord / (2.0 * self.radius)))
        return self.radius * sweep

    def points(self, s: np.ndarray) -> np.ndarray:
        n = self.length
        t = s / n if n > 0 else np.zeros_like(s)
        out = self.center + self.radius * np.exp(1j * (self.a0 + (self.a1 - self.a0) * t))
        out = np.where(t <= 0, self.start, out)
        return np.where(t >= 1, self.end, out)

    def real_crossings(self) -> list[float]:
        return []

    def reversed(self) -> "Arc":
        return Arc(self.half, self.center, self.radius, self.a1, self.a0, self.p1, self.p0)

    def conjugate(self) -> "Arc":
        half = "lower" if self.half == "upper" else "upper"
        conj = lambda p: None if p is None else p.conjugate()
        return Arc(half, self.center, self.radius, -self.a0, -self.a1, conj(self.p0), conj(self.p1))

    def to_json(self) -> dict:
        return {"type": "arc", "half": self.half, "center": self.center,
                "radius": self.radius, "a0": self.a0, "a1": self.a1}


CurvePiece = Union[Segment, Arc]


@dataclass(frozen=True)
class PathCurve:
    pieces: tuple[CurvePiece, ...]
    start: complex
    end: complex
    lengths: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "lengths", tuple(p.length for p in self.pieces))
        if self.pieces:
            _check_join(self.start, self.pieces[0].start)
            _check_join(self.pieces[-1].end, self.end)
            for u, v in zip(self.pieces, self.pieces[1:]):
                _check_join(u.end, v.start)

    @classmethod
    def from_pieces(cls, pieces: Sequence[CurvePiece]) -> "PathCurve":
        pieces = tuple(pieces)
        if not pieces:
            raise GeometryError("need at least one piece")
        return cls(pieces, pieces[0].start, pieces[-1].end)

    @property
    def length(self) -> float:
        return math.fsum(self.lengths)

    def joints(self) -> list[float]:
        out, acc = [0.0], 0.0
        for n in self.lengths:
            acc += n
            out.append(acc)
        return out

    def points(self, s) -> np.ndarray:
        """Points at arclength parameters ``s`` (sorted or not)."""
        s = np.asarray(s, dtype=np.float64)
        out = np.empty(s.shape, dtype=np.complex128)
        bounds = self.joints()
        idx = np.clip(np.searchsorted(bounds, s, side="right") - 1, 0, len(self.pieces) - 1)
        for k, piece in enumerate(self.pieces):
            m = idx == k
            if m.any():
                out[m] = piece.points(np.clip(s[m] - bounds[k], 0.0, piece.length))
        return out

    def real_crossings(self) -> list[float]:
        out = []
        for base, piece in zip(self.joints(), self.pieces):
            out.extend(base + t for t in piece.real_crossings())
        return out

    def reversed(self) -> "PathCurve":
        return PathCurve(tuple(p.reversed() for p in reversed(self.pieces)), self.end, self.start)

    def conjugate(self) -> "PathCurve":
        return PathCurve(tuple(p.conjugate() for p in self.pieces),
                         self.start.conjugate(), self.end.conjugate())

    def to_json(self) -> dict:
        return {"pieces": [p.to_json() for p in self.pieces]}


def _check_join(u: complex, v: complex) -> None:
    if abs(u - v) > JOIN_TOL * max(1.0, abs(u)):
        raise GeometryError(f"pieces do not join: {u!r} vs {v!r}")


def curve_from_json(doc: dict) -> PathCurve:
    pieces: list[CurvePiece] = []
    for item in doc["pieces"]:
        if item["type"] == "segment":
            pieces.append(Segment(complex(*item["p"]), complex(*item["q"])))
        elif item["type"] == "arc":
            pieces.append(Arc(item["half"], float(item["center"]), float(item["radius"]),
                              float(item["a0"]), float(item["a1"])))
        else:
            raise GeometryError(f"unknown piece type {item['type']!r}")
    return PathCurve.from_pieces(pieces)


def opposite_sides(a: complex, b: complex) -> bool:
    """True when a and b lie in opposite open half-planes.

    Compares signs rather than the product of heights, which underflows.
    """
    return (a.imag > 0 and b.imag < 0) or (a.imag < 0 and b.imag > 0)


def geodesic(a: complex, b: complex, half: str | None = None) -> CurvePiece:
    """Hyperbolic geodesic from ``a`` to ``b`` in the half-plane containing them.

    ``b`` may lie on the real axis, in which case the arc lands on it
    perpendicularly.  When both points are real, ``half`` picks the side.
    """
    a, b = complex(a), complex(b)
    if a == b:
        raise CoincidentPoints("geodesic endpoints coincide")
    if opposite_sides(a, b):
        raise SameHalfPlaneViolation("points lie in opposite half-planes")
    if half is None:
        if a.imag == 0 and b.imag == 0:
            raise SameHalfPlaneViolation("both points are real; pass half=")
        half = "upper" if (a.imag or b.imag) > 0 else "lower"
    dx = b.real - a.real
    # near-vertical pairs: the arc radius would blow up, and the chord is the geodesic to 1e-7
    if abs(dx) <= 1e-7 * abs(b - a):
        if a.imag == 0 and b.imag == 0:
            raise CoincidentPoints("geodesic endpoints coincide")
        return Segment(a, b)
    center = 0.5 * (a.real + b.real) + (b.imag - a.imag) * (b.imag + a.imag) / (2 * dx)
    radius = abs(a - center)
    zero = 0.0 if half == "upper" else -0.0

    def angle(p: complex) -> float:
        # signed zero puts a lower-side landing point at -pi rather than +pi
        return math.atan2(p.imag if p.imag != 0 else zero, p.real - center)

    return Arc(half, center, radius, angle(a), angle(b), a, b)


def path_length(curve: PathCurve) -> float:
    return curve.length


def split_lengths_at(curve: PathCurve, s: float) -> tuple[float, float, complex]:
    total = curve.length
    if not -1e-12 <= s <= total + 1e-12:
        raise ParameterOutOfRange(f"s={s} outside [0, {total}]")
    s = min(max(s, 0.0), total)
    z = complex(curve.points(np.array([s]))[0])
    return s, total - s, z


# ---------------------------------------------------------------------------
# uniformity checks: length ratio and distance-to-boundary ratio


@dataclass(frozen=True)
class UniformityReport:
    c_used: float
    u1_ratio: float
    u2_worst: float
    u2_argmax: complex
    u2_argmax_s: float
    samples: int
    passed: bool

    def to_json(self) -> dict:
        return {"c": self.c_used, "u1_ratio": self.u1_ratio, "u2_worst": self.u2_worst,
                "u2_argmax": [self.u2_argmax.real, self.u2_argmax.imag],
                "samples": self.samples, "pass": self.passed}


def sample_parameters(curve: PathCurve, a: complex, b: complex,
                      samples_per_unit: int = 64) -> np.ndarray:
    total = curve.length
    ratio = total / abs(a - b)
    count = max(MIN_SAMPLES, math.ceil(samples_per_unit * ratio))
    s = np.linspace(0.0, total, count)
    extra = curve.joints() + curve.real_crossings()
    return np.unique(np.concatenate((s, np.clip(extra, 0.0, total))))


def verify_conditions(curve: PathCurve, a: complex, b: complex, c: float, spec=None,
                      samples_per_unit: int = 64, tol: float = 1e-9,
                      oracle=None) -> UniformityReport:
    """Measure the length ratio exactly and the boundary ratio on a deterministic sample.

    dist(z, E) is replaced by the lower end of its bracket, so a pass can be
    trusted up to sampling.  ``oracle`` overrides the distance oracle built
    from ``spec`` (used for shifted frames).
    """
    from .tree import distance_oracle

    a, b = complex(a), complex(b)
    scale = max(1.0, abs(a), abs(b))
    if abs(curve.start - a) > 1e-9 * scale or abs(curve.end - b) > 1e-9 * scale:
        raise GeometryError("curve endpoints do not match a, b")
    if c < 1:
        raise ValueError("c must be at least 1")
    if oracle is None:
        oracle = distance_oracle(spec)

    total = curve.length
    u1 = total / abs(a - b)
    s = sample_parameters(curve, a, b, samples_per_unit)
    z = curve.points(s)
    lo, hi, _, _ = oracle.brackets(z, tol)
    bad = np.flatnonzero(hi <= tol)
    if bad.size:
        from .tree import DistanceBracket
        i = int(bad[0])
        raise PointOnSet(complex(z[i]), DistanceBracket(float(lo[i]), float(hi[i]), 0))
    split = np.minimum(s, total - s)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(split > 0, split / lo, 0.0)
    worst = float(ratio.max())
    # ties resolved toward the larger arclength
    i = int(np.flatnonzero(ratio == worst)[-1])
    passed = u1 <= c + U_SLACK and worst <= c + U_SLACK
    return UniformityReport(float(c), u1, worst, complex(z[i]), float(s[i]), int(s.size), passed)


# ---------------------------------------------------------------------------
# SVG


def svg_path_data(curve: PathCurve, fmt=lambda v: f"{v:.6f}") -> str:
    """Path data in user coordinates with y flipped (SVG y grows downward)."""
    p = curve.start
    parts = [f"M {fmt(p.real)} {fmt(-p.imag)}"]
    for piece in curve.pieces:
        q = piece.end
        if isinstance(piece, Segment):
            parts.append(f"L {fmt(q.real)} {fmt(-q.imag)}")
        else:
            large = 1 if abs(piece.a1 - piece.a0) > math.pi else 0
            # counterclockwise in math coordinates is clockwise once y is flipped
            sweep = 0 if piece.a1 > piece.a0 else 1
            r = fmt(piece.radius)
            parts.append(f"A {r} {r} 0 {large} {sweep} {fmt(q.real)} {fmt(-q.imag)}")
    return " ".join(parts)
