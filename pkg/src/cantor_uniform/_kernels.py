"""Numeric kernels for distance queries against a Cantor set.

The tree is described level-wise: ``lengths[k]`` is the common length of the
depth-k intervals and ``offsets[k] = lengths[k-1] - lengths[k]`` is the shift
of a right child relative to its parent.  A query descends only the nodes that
can still hold the nearest point, so the work per query is roughly the number
of levels needed to reach the tolerance.

Set ``CANTOR_UNIFORM_NUMBA=0`` to force the pure-numpy path.
"""
from __future__ import annotations

import math
import os

import numpy as np

_EPS = np.finfo(np.float64).eps
# nodes are pruned only when clearly farther than the best endpoint; endpoint
# positions are accumulated along different paths, so allow a few ulps
_PRUNE = 1.0 + 16 * _EPS

_flag = os.environ.get("CANTOR_UNIFORM_NUMBA", "1").strip().lower()
_WANT_NUMBA = _flag not in ("0", "false", "no", "off")

try:
    if not _WANT_NUMBA:
        raise ImportError
    import numba
except ImportError:  # pragma: no cover - depends on environment
    numba = None

HAVE_NUMBA = numba is not None
BACKEND = "numba" if HAVE_NUMBA else "numpy"


def _interval_dist_np(x, ay, lo, length):
    dx = np.maximum(np.maximum(lo - x, x - lo - length), 0.0)
    return np.hypot(dx, ay)


def dist_brackets_numpy(xs, ys, lengths, offsets, origin, tol):
    """Vectorised over queries: one frontier array shared by all of them."""
    xs = np.asarray(xs, dtype=np.float64)
    ay = np.abs(np.asarray(ys, dtype=np.float64))
    n = xs.shape[0]
    depth_cap = lengths.shape[0] - 1
    target = 0.5 * tol

    hi = np.minimum(np.hypot(xs - origin, ay), np.hypot(xs - origin - lengths[0], ay))
    lo = _interval_dist_np(xs, ay, np.float64(origin), lengths[0])
    depth = np.zeros(n, dtype=np.int64)
    converged = np.zeros(n, dtype=np.bool_)
    active = np.ones(n, dtype=np.bool_)

    fq = np.arange(n, dtype=np.int64)
    fl = np.full(n, origin, dtype=np.float64)
    for k in range(depth_cap + 1):
        done = active & (hi - lo <= target)
        converged |= done
        depth[done] = k
        active &= ~done
        if k == depth_cap or not active.any():
            depth[active] = k
            break
        keep = active[fq]
        fq, fl = fq[keep], fl[keep]

        lc, off = lengths[k + 1], offsets[k + 1]
        cq = np.concatenate((fq, fq))
        cl = np.concatenate((fl, fl + off))
        cx, cy = xs[cq], ay[cq]
        ends = np.minimum(np.hypot(cx - cl, cy), np.hypot(cx - cl - lc, cy))
        np.minimum.at(hi, cq, ends)
        dc = _interval_dist_np(cx, cy, cl, lc)
        keep = dc <= hi[cq] * _PRUNE
        fq, fl, dc = cq[keep], cl[keep], dc[keep]
        newlo = np.full(n, np.inf)
        np.minimum.at(newlo, fq, dc)
        lo = np.where(active & np.isfinite(newlo), np.maximum(lo, newlo), lo)
    return lo, hi, depth, converged


if HAVE_NUMBA:

    @numba.njit(cache=True, nogil=True)
    def _bracket_one(x, ay, lengths, offsets, origin, target, cur, nxt, prune):
        depth_cap = lengths.shape[0] - 1
        hi = min(math.hypot(x - origin, ay), math.hypot(x - origin - lengths[0], ay))
        dx = max(origin - x, x - origin - lengths[0], 0.0)
        lo = math.hypot(dx, ay)
        cur[0] = origin
        ncur = 1
        k = 0
        while True:
            if hi - lo <= target:
                return lo, hi, k, True, cur, nxt
            if k == depth_cap:
                return lo, hi, k, False, cur, nxt
            lc = lengths[k + 1]
            off = offsets[k + 1]
            for j in range(ncur):
                for c in (cur[j], cur[j] + off):
                    hi = min(hi, math.hypot(x - c, ay), math.hypot(x - c - lc, ay))
            if 2 * ncur > nxt.shape[0]:
                nxt = np.empty(4 * ncur, dtype=np.float64)
            nnext = 0
            newlo = np.inf
            for j in range(ncur):
                for c in (cur[j], cur[j] + off):
                    dx = max(c - x, x - c - lc, 0.0)
                    d = math.hypot(dx, ay)
                    if d <= hi * prune:
                        nxt[nnext] = c
                        nnext += 1
                        if d < newlo:
                            newlo = d
            if newlo > lo and newlo < np.inf:
                lo = newlo
            cur, nxt = nxt, cur
            ncur = nnext
            k += 1

    @numba.njit(cache=True, nogil=True)
    def _dist_brackets_jit(xs, ys, lengths, offsets, origin, target):
        n = xs.shape[0]
        lo = np.empty(n)
        hi = np.empty(n)
        depth = np.empty(n, dtype=np.int64)
        conv = np.empty(n, dtype=np.bool_)
        cur = np.empty(1024)
        nxt = np.empty(1024)
        for i in range(n):
            a, b, d, c, cur, nxt = _bracket_one(xs[i], abs(ys[i]), lengths, offsets,
                                                origin, target, cur, nxt, _PRUNE)
            if cur.shape[0] < nxt.shape[0]:
                cur = np.empty(nxt.shape[0])
            elif nxt.shape[0] < cur.shape[0]:
                nxt = np.empty(cur.shape[0])
            lo[i] = a
            hi[i] = b
            depth[i] = d
            conv[i] = c
        return lo, hi, depth, conv

    def dist_brackets_numba(xs, ys, lengths, offsets, origin, tol):
        xs = np.ascontiguousarray(xs, dtype=np.float64)
        ys = np.ascontiguousarray(ys, dtype=np.float64)
        return _dist_brackets_jit(xs, ys, np.ascontiguousarray(lengths, dtype=np.float64),
                                  np.ascontiguousarray(offsets, dtype=np.float64),
                                  float(origin), 0.5 * tol)
else:  # pragma: no cover
    dist_brackets_numba = None


def dist_brackets(xs, ys, lengths, offsets, origin=0.0, tol=1e-9, backend=None):
    """Certified brackets ``lo <= dist((x, y), E) <= hi`` for many points.

    Returns ``(lo, hi, depth, converged)``.  The raw float results are padded
    outward by a few ulps per level of the depth cap, so the bracket survives
    rounding in the accumulated node positions.  The pad does not depend on
    where a query stopped, so a tighter ``tol`` never loosens a bracket.
    """
    backend = backend or BACKEND
    if backend == "numba":
        if dist_brackets_numba is None:
            raise RuntimeError("numba backend requested but numba is unavailable")
        lo, hi, depth, conv = dist_brackets_numba(xs, ys, lengths, offsets, origin, tol)
    elif backend == "numpy":
        lo, hi, depth, conv = dist_brackets_numpy(xs, ys, lengths, offsets, origin, tol)
    else:
        raise ValueError(f"unknown backend {backend!r}")
    scale = np.abs(np.asarray(xs, dtype=np.float64)) + abs(origin) + 1.0
    pad = 4.0 * _EPS * (len(lengths) + 1) * scale
    lo = np.maximum(lo * (1 - 4 * _EPS) - pad, 0.0)
    hi = hi * (1 + 4 * _EPS) + pad
    # a tolerance below the rounding pad cannot be certified
    conv = conv & (hi - lo <= tol)
    return lo, hi, depth, conv
