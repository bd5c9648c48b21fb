import csv
import functools
import io
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cantor_uniform.errors import DepthTooLarge, InvalidSampling, ToleranceUnreachable
from cantor_uniform.oracle import InE, InGapAtStep, base3_membership
from cantor_uniform.sequence import OMEGA0
from cantor_uniform.tree import (
    LEFT_COMPONENT,
    CantorTree,
    GapRecord,
    OutsideHull,
    build_tree,
    dist_to_E,
    export_csv,
    export_json,
    format_gap,
    gaps_in,
    level_length,
    locate,
    perfectness_estimate,
)

from .conftest import specs

F = Fraction


def leaves(tree):
    return [(n.lo, n.hi) for n in tree.leaves()]


def test_build_small_trees(omega0, half):
    assert leaves(build_tree(omega0, 1)) == [(0, F(1, 3)), (F(2, 3), 1)]
    assert leaves(build_tree(omega0, 2)) == [(0, F(1, 9)), (F(2, 9), F(1, 3)),
                                             (F(2, 3), F(7, 9)), (F(8, 9), 1)]
    t = build_tree(half, 1)
    assert leaves(t) == [(0, F(1, 4)), (F(3, 4), 1)]
    (gap,) = t.gaps()
    assert gap.length == F(1, 2)


def test_depth_cap(omega0):
    build_tree(omega0, 64)
    with pytest.raises(DepthTooLarge):
        build_tree(omega0, 65)
    with pytest.raises(DepthTooLarge):
        build_tree(omega0, 9, max_depth=8)


def test_level_length(omega0, half, interleave):
    assert level_length(omega0, 3) == F(1, 27)
    assert level_length(half, 2) == F(1, 16)
    assert level_length(interleave, 2) == F(1, 12)
    assert level_length(omega0, 0) == 1


@given(specs(), st.integers(0, 7))
@settings(max_examples=40, deadline=None)
def test_tiling_and_lengths(spec, k):
    t = build_tree(spec, k)
    ls = list(t.leaves())
    gs = list(t.gaps())
    assert len(ls) == 2**k and len(gs) == 2**k - 1
    assert all(n.length == level_length(spec, k) for n in ls)
    assert sum(n.length for n in ls) + sum(g.length for g in gs) == 1
    # pieces alternate leaf, gap, leaf, ... and abut exactly
    pieces = sorted([(n.lo, n.hi) for n in ls] + [(g.lo, g.hi) for g in gs])
    assert pieces[0][0] == 0 and pieces[-1][1] == 1
    assert all(u[1] == v[0] for u, v in zip(pieces, pieces[1:]))
    for g in gs:
        parent = t.node(g.parent_path)
        assert g.length == spec.q(g.step) * parent.length


@given(specs(), st.integers(0, 7))
@settings(max_examples=30, deadline=None)
def test_endpoint_persistence(spec, k):
    t = build_tree(spec, k + 1)
    assert set(t.endpoints(k)) <= set(t.endpoints(k + 1))


def test_locate_examples(omega0):
    t = build_tree(omega0, 3)
    g = locate(t, 0.5)
    assert isinstance(g, GapRecord) and (g.step, g.lo, g.hi) == (1, F(1, 3), F(2, 3))
    chain = locate(t, F(1, 4))
    assert [n.path for n in chain] == [(0,), (0, 1), (0, 1, 0)]
    assert locate(t, -0.1) == OutsideHull("left")
    assert locate(t, 1.5).gap.hi == math.inf
    assert OutsideHull("left").gap is LEFT_COMPONENT


def test_locate_agrees_with_base3_exhaustive(omega0):
    t = build_tree(omega0, 8)
    for p in range(3**8 + 1):
        x = F(p, 3**8)
        where, ref = locate(t, x), base3_membership(x, 8)
        if isinstance(ref, InE):
            assert isinstance(where, list) and len(where) == 8
        else:
            assert isinstance(where, GapRecord) and where.step == ref.step


def test_gaps_in_examples(omega0):
    t = build_tree(omega0, 3)
    got = [(g.lo, g.hi) for g in gaps_in(t, (0, 1), 2)]
    assert got == [(F(1, 9), F(2, 9)), (F(1, 3), F(2, 3)), (F(7, 9), F(8, 9))]
    got = [(g.lo, g.hi) for g in gaps_in(t, (0, F(1, 5)), 3)]
    assert got == [(F(1, 27), F(2, 27)), (F(1, 9), F(2, 9))]
    assert gaps_in(t, (F(1, 2), F(1, 4)), 3) == []
    for s in range(4):
        assert len(gaps_in(t, (0, 1), s)) == 2**s - 1


def test_format_gap():
    assert format_gap(GapRecord(1, F(1, 3), F(2, 3), ())) == ["1/3", "2/3"]
    assert format_gap(LEFT_COMPONENT) == ["-inf", "0"]


# ---------------------------------------------------------------------------
# distance


@functools.lru_cache(maxsize=None)
def _leaf_arrays(spec, depth):
    t = CantorTree(spec, depth)
    lengths, offsets = t.float_levels()
    lo = np.zeros(1)
    for k in range(1, depth + 1):
        lo = np.concatenate((lo, lo + offsets[k]))
    return lo, lo + lengths[depth]


def brute_dist(spec, z, depth=16):
    """Distance to the depth-`depth` endpoints, and to E_depth; E lies in between."""
    lo, hi_ = _leaf_arrays(spec, depth)
    z = complex(z)
    ends = np.concatenate((lo, hi_))
    upper = np.min(np.hypot(ends - z.real, z.imag))
    dx = np.maximum(np.maximum(lo - z.real, z.real - hi_), 0)
    lower = np.min(np.hypot(dx, z.imag))
    return lower, upper


@pytest.mark.parametrize("z, expected", [
    (0.5, 1 / 6),
    (0.5 + 0.5j, math.sqrt(10) / 6),
    (2.0, 1.0),
])
def test_dist_examples(omega0, z, expected):
    b = dist_to_E(omega0, z, tol=1e-9)
    assert b.lo <= expected <= b.hi
    assert b.hi - b.lo <= 1e-9


@given(st.floats(-0.5, 1.5), st.floats(-0.3, 0.3))
@settings(max_examples=150, deadline=None)
def test_dist_bracket_against_brute_force(x, y):
    lower, upper = brute_dist(OMEGA0, complex(x, y))
    b = dist_to_E(OMEGA0, complex(x, y), tol=1e-9)
    assert b.lo <= b.hi
    # both enclose dist(z, E), which itself lies in [lower, upper]
    assert b.lo <= upper + 1e-15 and lower <= b.hi + 1e-15


def test_dist_on_the_set_needs_strict_flag(omega0):
    b = dist_to_E(omega0, 0.25, tol=1e-9)
    assert b.lo == 0.0 and b.hi < 1e-9
    with pytest.raises(ToleranceUnreachable):
        dist_to_E(omega0, 0.25, tol=1e-40, strict=True)


def test_dist_refines_with_tolerance(omega0):
    z = 0.3 + 1e-4j
    prev = None
    for tol in (1e-2, 1e-4, 1e-6, 1e-8):
        b = dist_to_E(omega0, z, tol=tol)
        if prev is not None:
            assert b.hi <= prev.hi and b.lo >= prev.lo
        prev = b


# ---------------------------------------------------------------------------
# export


def test_export_csv_and_json_agree(omega0):
    t = build_tree(omega0, 3)
    doc = export_json(t)
    rows = list(csv.DictReader(io.StringIO(export_csv(t))))
    as_json = doc["leaves"] + doc["gaps"]
    assert len(rows) == len(as_json) == 8 + 7
    for r, j in zip(rows, as_json):
        assert {k: str(v) for k, v in j.items()} == r
    gap_rows = [r for r in rows if len(r["path"]) == int(r["depth"]) - 1]
    assert len(gap_rows) == 7


# ---------------------------------------------------------------------------
# perfectness


def test_perfectness_examples(omega0, half):
    e10 = perfectness_estimate(omega0, 10, 64, 64)
    e12 = perfectness_estimate(omega0, 12, 64, 64)
    assert e10.c_emp > 0 and abs(e10.c_emp - e12.c_emp) < 1e-3
    assert perfectness_estimate(half, 12, 64, 64).c_emp > 0
    with pytest.raises(InvalidSampling):
        perfectness_estimate(omega0, 12, 64, 0)


def test_perfectness_regression_lock(omega0):
    # first computed value; the worst annulus sits at the endpoint 73/243
    e = perfectness_estimate(omega0, 12, 64, 64)
    assert e.c_emp == pytest.approx(0.4122571456497019, abs=1e-12)
    assert e.worst_center == F(73, 243)
