"""Exact construction of the stages E_k, point location and distance brackets.

Nodes are never stored: every depth-k interval is determined by its path
bits and the level lengths, so a tree of depth 64 costs 65 fractions.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Union

import numpy as np

from . import _kernels
from .errors import DepthTooLarge, InvalidSampling, ToleranceUnreachable
from .sequence import SequenceSpec

MAX_DEPTH = 64


@dataclass(frozen=True)
class IntervalNode:
    depth: int
    path: tuple[int, ...]
    lo: Fraction
    hi: Fraction

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo


@dataclass(frozen=True)
class GapRecord:
    """Open complementary interval; step 0 marks the two unbounded components."""

    step: int
    lo: Union[Fraction, float]
    hi: Union[Fraction, float]
    parent_path: tuple[int, ...]

    @property
    def unbounded(self) -> bool:
        return self.step == 0

    @property
    def length(self):
        return math.inf if self.unbounded else self.hi - self.lo

    @property
    def midpoint(self):
        if self.unbounded:
            raise ValueError("unbounded component has no midpoint")
        return (self.lo + self.hi) / 2

    def contains(self, x) -> bool:
        return self.lo < x < self.hi


LEFT_COMPONENT = GapRecord(0, -math.inf, Fraction(0), ())
RIGHT_COMPONENT = GapRecord(0, Fraction(1), math.inf, ())


@dataclass(frozen=True)
class OutsideHull:
    side: str  # "left" | "right"

    @property
    def gap(self) -> GapRecord:
        return LEFT_COMPONENT if self.side == "left" else RIGHT_COMPONENT


def format_gap(gap: GapRecord) -> list[str]:
    """Endpoints as strings, "-inf"/"inf" for the unbounded components."""
    def f(x):
        if isinstance(x, float) and math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return str(Fraction(x))
    return [f(gap.lo), f(gap.hi)]


def level_length(spec: SequenceSpec, k: int) -> Fraction:
    """prod_{j<=k} (1 - q_j) / 2."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    out = Fraction(1)
    for j in range(1, k + 1):
        out *= (1 - spec.q(j)) / 2
    return out


class CantorTree:
    """Stages E_0 .. E_depth of the construction, with exact endpoints."""

    def __init__(self, spec: SequenceSpec, depth: int, max_depth: int = MAX_DEPTH):
        if depth < 0:
            raise ValueError("depth must be nonnegative")
        if depth > max_depth:
            raise DepthTooLarge(f"depth {depth} exceeds the configured maximum {max_depth}")
        self.spec = spec
        self.depth = depth
        self.lengths = [Fraction(1)]
        for j in range(1, depth + 1):
            self.lengths.append(self.lengths[-1] * (1 - spec.q(j)) / 2)

    # offset of the right child relative to its parent, at step k
    def _offset(self, k: int) -> Fraction:
        return self.lengths[k - 1] - self.lengths[k]

    def node(self, path) -> IntervalNode:
        path = tuple(path)
        k = len(path)
        if k > self.depth:
            raise ValueError("path deeper than the tree")
        lo = Fraction(0)
        for j, bit in enumerate(path, start=1):
            if bit:
                lo += self._offset(j)
        return IntervalNode(k, path, lo, lo + self.lengths[k])

    def gap_below(self, node: IntervalNode) -> GapRecord:
        """The gap removed from ``node`` at the next step."""
        k = node.depth + 1
        if k > self.depth:
            raise ValueError("gap lies below the built depth")
        return GapRecord(k, node.lo + self.lengths[k], node.hi - self.lengths[k], node.path)

    def nodes(self, k: int) -> Iterator[IntervalNode]:
        """All depth-k intervals, left to right."""
        if k > self.depth:
            raise ValueError("level deeper than the tree")
        yield from self._walk(IntervalNode(0, (), Fraction(0), Fraction(1)), k)

    def _walk(self, node: IntervalNode, k: int) -> Iterator[IntervalNode]:
        if node.depth == k:
            yield node
            return
        j = node.depth + 1
        lc = self.lengths[j]
        left = IntervalNode(j, node.path + (0,), node.lo, node.lo + lc)
        right = IntervalNode(j, node.path + (1,), node.hi - lc, node.hi)
        yield from self._walk(left, k)
        yield from self._walk(right, k)

    def leaves(self) -> Iterator[IntervalNode]:
        return self.nodes(self.depth)

    def gaps(self, max_step: int | None = None) -> Iterator[GapRecord]:
        """Every bounded gap with creation step <= max_step, sorted by position."""
        max_step = self.depth if max_step is None else max_step
        yield from gaps_in(self, (Fraction(0), Fraction(1)), max_step)

    def endpoints(self, k: int | None = None) -> list[Fraction]:
        k = self.depth if k is None else k
        out = []
        for node in self.nodes(k):
            out.append(node.lo)
            out.append(node.hi)
        return out

    def float_levels(self) -> tuple[np.ndarray, np.ndarray]:
        lengths = np.array([float(x) for x in self.lengths])
        offsets = np.zeros_like(lengths)
        offsets[1:] = [float(self._offset(k)) for k in range(1, self.depth + 1)]
        return lengths, offsets


def build_tree(spec: SequenceSpec, depth: int, max_depth: int = MAX_DEPTH) -> CantorTree:
    return CantorTree(spec, depth, max_depth)


def locate(tree: CantorTree, x) -> Union[list[IntervalNode], GapRecord, OutsideHull]:
    """Chain I_1 > I_2 > ... containing x, or the gap/unbounded component holding it."""
    x = Fraction(x)
    if x < 0:
        return OutsideHull("left")
    if x > 1:
        return OutsideHull("right")
    chain = []
    node = IntervalNode(0, (), Fraction(0), Fraction(1))
    for k in range(1, tree.depth + 1):
        lc = tree.lengths[k]
        if x <= node.lo + lc:
            node = IntervalNode(k, node.path + (0,), node.lo, node.lo + lc)
        elif x >= node.hi - lc:
            node = IntervalNode(k, node.path + (1,), node.hi - lc, node.hi)
        else:
            return GapRecord(k, node.lo + lc, node.hi - lc, node.path)
        chain.append(node)
    return chain


def gaps_in(tree: CantorTree, window, max_step: int, include_unbounded: bool = False) -> list[GapRecord]:
    """Gaps created at steps <= max_step meeting the closed window [w0, w1]."""
    w0, w1 = window
    if max_step > tree.depth:
        raise ValueError("max_step exceeds the built depth")
    if w0 > w1:
        return []
    out: list[GapRecord] = []
    if include_unbounded and w0 < 0:
        out.append(LEFT_COMPONENT)

    def visit(lo, path, k):
        hi = lo + tree.lengths[k]
        if k >= max_step or hi < w0 or lo > w1:
            return
        lc = tree.lengths[k + 1]
        visit(lo, path + (0,), k + 1)
        g = GapRecord(k + 1, lo + lc, hi - lc, path)
        if g.lo < w1 and g.hi > w0:
            out.append(g)
        visit(hi - lc, path + (1,), k + 1)

    visit(Fraction(0), (), 0)
    if include_unbounded and w1 > 1:
        out.append(RIGHT_COMPONENT)
    return out


# ---------------------------------------------------------------------------
# distance to E(omega)


@dataclass(frozen=True)
class DistanceBracket:
    lo: float
    hi: float
    depth: int
    converged: bool = True


def level_arrays(spec: SequenceSpec, depth: int = MAX_DEPTH) -> tuple[np.ndarray, np.ndarray]:
    """Float level lengths and right-child offsets, computed from exact values."""
    return CantorTree(spec, depth).float_levels()


class DistanceOracle:
    """Batched distance brackets against E(spec), optionally in a shifted frame.

    ``origin`` is the left end of the hull [origin, origin + 1].
    """

    def __init__(self, spec: SequenceSpec, depth: int = MAX_DEPTH, origin: float = 0.0,
                 backend: str | None = None):
        self.spec = spec
        self.origin = float(origin)
        self.lengths, self.offsets = level_arrays(spec, depth)
        self.backend = backend

    def brackets(self, zs, tol: float):
        zs = np.asarray(zs, dtype=np.complex128).ravel()
        return _kernels.dist_brackets(zs.real, zs.imag, self.lengths, self.offsets,
                                      self.origin, tol, backend=self.backend)

    def bracket(self, z, tol: float) -> DistanceBracket:
        lo, hi, depth, conv = self.brackets([complex(z)], tol)
        return DistanceBracket(float(lo[0]), float(hi[0]), int(depth[0]), bool(conv[0]))


_ORACLES: dict[str, DistanceOracle] = {}


def distance_oracle(spec: SequenceSpec) -> DistanceOracle:
    key = spec.key()
    oracle = _ORACLES.get(key)
    if oracle is None:
        if len(_ORACLES) > 64:
            _ORACLES.clear()
        oracle = _ORACLES[key] = DistanceOracle(spec)
    return oracle


def dist_to_E(spec: SequenceSpec, z, tol: float = 1e-9, strict: bool = False) -> DistanceBracket:
    """Bracket dist(z, E(spec)) to within ``tol``.

    The lower end is the distance to E_k (a superset); the upper end is the
    distance to the nearest interval endpoint seen (those persist into E).
    When the depth cap stops the descent the bracket is returned with
    ``converged=False``, or :class:`ToleranceUnreachable` is raised if strict.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    bracket = distance_oracle(spec).bracket(z, tol)
    if strict and not bracket.converged:
        raise ToleranceUnreachable(bracket)
    return bracket


# ---------------------------------------------------------------------------
# uniform perfectness


@dataclass(frozen=True)
class PerfectnessEstimate:
    c_emp: float
    worst_center: Fraction
    worst_radius: float
    truncation: float  # leaf length relative to the smallest sampled radius
    centers: int
    radii: int


def perfectness_estimate(spec: SequenceSpec, depth: int, sample_centers: int = 64,
                         radius_grid: int = 64) -> PerfectnessEstimate:
    """min over sampled (a, r) of rho(a, r) / r, rho = farthest endpoint closer than r.

    Centers come from the shallowest level with enough endpoints and the radius grid spans
    (|I_4|, diam E], so the sample set does not move with ``depth``; deeper
    trees only add points, which can only raise each ratio.
    """
    if sample_centers <= 0 or radius_grid <= 0:
        raise InvalidSampling("sample_centers and radius_grid must be positive")
    if depth < 4:
        raise ValueError("depth must be at least 4")
    tree = CantorTree(spec, depth)
    pts = np.array(sorted(float(p) for p in set(tree.endpoints())))

    center_level = 0
    while 2 ** (center_level + 1) < sample_centers and center_level < depth:
        center_level += 1
    pool = sorted(set(tree.endpoints(center_level)))
    if len(pool) > sample_centers:
        idx = np.linspace(0, len(pool) - 1, sample_centers).round().astype(int)
        pool = [pool[i] for i in sorted(set(idx))]

    r_max = 1.0
    r_min = float(tree.lengths[4])
    radii = r_max * (r_min / r_max) ** (np.arange(radius_grid) / radius_grid)

    best = (math.inf, None, None)
    for a in pool:
        af = float(a)
        for r in radii:
            left = np.searchsorted(pts, af - r, side="right")
            right = np.searchsorted(pts, af + r, side="left") - 1
            rho = max(af - pts[left], pts[right] - af)
            ratio = rho / r
            if ratio < best[0]:
                best = (ratio, a, float(r))
    truncation = float(tree.lengths[depth]) / float(radii[-1])
    return PerfectnessEstimate(float(best[0]), best[1], best[2], truncation, len(pool), radius_grid)


# ---------------------------------------------------------------------------
# export

CSV_COLUMNS = ("depth", "path", "lo_num", "lo_den", "hi_num", "hi_den")


def _row(depth, path, lo, hi):
    return {
        "depth": depth,
        "path": "".join(str(b) for b in path),
        "lo_num": lo.numerator, "lo_den": lo.denominator,
        "hi_num": hi.numerator, "hi_den": hi.denominator,
    }


def export_rows(tree: CantorTree) -> tuple[list[dict], list[dict]]:
    """Leaves at the built depth and all gaps up to it.

    A row is a gap exactly when ``len(path) == depth - 1``.
    """
    leaves = [_row(n.depth, n.path, n.lo, n.hi) for n in tree.leaves()]
    gaps = [_row(g.step, g.parent_path, g.lo, g.hi) for g in tree.gaps()]
    return leaves, gaps


def export_json(tree: CantorTree) -> dict:
    leaves, gaps = export_rows(tree)
    return {"spec": tree.spec.to_document(), "depth": tree.depth, "leaves": leaves, "gaps": gaps}


def export_csv(tree: CantorTree) -> str:
    leaves, gaps = export_rows(tree)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(leaves)
    writer.writerows(gaps)
    return buf.getvalue()
