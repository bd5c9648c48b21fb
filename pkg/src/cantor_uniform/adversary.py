"""Certificates that D(omega) is not uniform.

For a target constant c we pick integers N, L, K and an index M such that the
run q_M, ..., q_{M+K} stays below N^-L.  Around the middle x0 of the gap J_M
the two points a = x0 + h i and b = x0 - h i, with h = N^(-L+2) |I_{M-1}|,
cannot be joined by any curve meeting both conditions with constant c.

Everything is expressed in units of |I_{M-1}| with x0 at the origin, so no
tree is ever built down to depth M.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import NoSuchM, SpecIsUniform
from .sequence import Decay, Fixed, SequenceSpec, is_uniform, select_delta, shift_spec
from .tree import CantorTree, gaps_in

DEFAULT_SEARCH_BOUND = 10**7


@dataclass(frozen=True)
class AdversaryParams:
    n_cap: int
    l_exp: int
    k_steps: int
    m_index: int

    @property
    def threshold(self) -> Fraction:
        return Fraction(1, self.n_cap**self.l_exp)

    @property
    def height(self) -> Fraction:
        """h = N^(-L+2), in units of |I_{M-1}|."""
        return Fraction(self.n_cap**2, self.n_cap**self.l_exp)

    def to_json(self) -> dict:
        return {"N": self.n_cap, "L": self.l_exp, "K": self.k_steps, "M": self.m_index}


def _as_c(c) -> Fraction:
    c = Fraction(c)
    if c < 1:
        raise ValueError(f"c must be >= 1, got {c}")
    return c


def k_interval_ok(n: int, l: int, k: int) -> bool:
    """Strict two-sided bound on K, checked exactly.

    Left:  K > (L-1) log2 N - 3   <=>  2^(K+3) > N^(L-1).
    Right: K < (L-1) ln N / |ln(1 - N^-L)| - 1  <=>  (1 - N^-L)^(K+1) > N^(-L+1).
    """
    if k < 1 or l < 1:
        return False
    left = 2 ** (k + 3) > n ** (l - 1)
    right = (1 - Fraction(1, n**l)) ** (k + 1) > Fraction(1, n ** (l - 1))
    return left and right


def choose_params(c) -> tuple[int, int, int]:
    """Smallest admissible (N, L, K) for the target constant ``c``."""
    c = _as_c(c)
    n = math.floor(2 * c) + 1
    l = 1
    while True:
        if l >= 3 and n ** (l - 3) >= 2:
            k = 1
            while 2 ** (k + 3) <= n ** (l - 1):
                k += 1
            if k_interval_ok(n, l, k):
                return n, l, k
        l += 1


def find_M(spec: SequenceSpec, n: int, l: int, k: int,
           search_bound: int = DEFAULT_SEARCH_BOUND) -> int:
    """Least M with q_{M+i} < N^-L for i = 0..K."""
    thr = Fraction(1, n**l)
    P, per = len(spec.prefix), spec.period
    # past `settled`, only fixed slots can reach the threshold
    settled = P
    for r, slot in enumerate(spec.pattern):
        if isinstance(slot, Decay):
            settled = max(settled, slot.last_index_at_least(thr))
    fixed_hits = [r for r, s in enumerate(spec.pattern) if isinstance(s, Fixed) and s.q >= thr]
    limit = search_bound
    if fixed_hits:
        limit = min(limit, settled + 2 * per + k + 2)
    run = 0
    for idx in range(1, limit + k + 1):
        if spec.q(idx) >= thr:
            run = 0
            continue
        run += 1
        if run == k + 1:
            m = idx - k
            if m <= search_bound:
                return m
            break
    if fixed_hits:
        raise NoSuchM(f"terms >= 1/{n}^{l} recur too often for a run of {k + 1}")
    raise NoSuchM(f"no run of {k + 1} terms below 1/{n}^{l} with M <= {search_bound}")


@dataclass(frozen=True)
class Inequality:
    """lhs < rhs (or <= when ``strict`` is false), in units of |I_{M-1}|."""

    lhs: Fraction
    rhs: Fraction
    strict: bool = True

    @property
    def margin(self) -> Fraction:
        return self.rhs - self.lhs

    @property
    def holds(self) -> bool:
        return self.margin > 0 if self.strict else self.margin >= 0

    def to_json(self) -> dict:
        return {"lhs": float(self.lhs), "rhs": float(self.rhs),
                "margin": float(self.margin), "holds": self.holds}


@dataclass
class EnumerationResult:
    verdict: str  # "NoCurve" | "Inconclusive"
    depth_cutoff: int
    gaps_checked: int
    min_margin: float
    cutoff_margin: float
    reason: str = ""

    def to_json(self) -> dict:
        out = {"depth_cutoff": self.depth_cutoff, "gaps_checked": self.gaps_checked,
               "min_margin": self.min_margin, "cutoff_margin": self.cutoff_margin,
               "verdict": self.verdict}
        if self.reason:
            out["reason"] = self.reason
        return out


@dataclass
class AdversaryCertificate:
    params: AdversaryParams
    c_target: Fraction
    scale: Fraction
    q_m: Fraction
    families: dict[str, Inequality]
    f3_per_m: list[Inequality]
    enumeration: EnumerationResult | None = field(default=None)

    @property
    def x0(self) -> Fraction:
        return Fraction(0)

    @property
    def a(self) -> tuple[Fraction, Fraction]:
        return (self.x0, self.params.height * self.scale)

    @property
    def b(self) -> tuple[Fraction, Fraction]:
        return (self.x0, -self.params.height * self.scale)

    @property
    def holds(self) -> bool:
        return all(f.holds for f in self.families.values()) and all(f.holds for f in self.f3_per_m)

    def margins(self) -> dict[str, Fraction]:
        return {name: f.margin for name, f in self.families.items()}

    def to_json(self) -> dict:
        fams = {name: f.to_json() for name, f in self.families.items()}
        fams["F3"]["per_m_min_margin"] = float(min((f.margin for f in self.f3_per_m),
                                                   default=Fraction(0)))
        return {
            "params": self.params.to_json(),
            "c": float(self.c_target),
            "local_coords": True,
            "scale": str(self.scale),
            "a": [float(self.a[0]), float(self.a[1])],
            "b": [float(self.b[0]), float(self.b[1])],
            "families": fams,
            "enumeration": None if self.enumeration is None else self.enumeration.to_json(),
        }


def _families(params: AdversaryParams, c: Fraction, q_m: Fraction, scale: Fraction):
    n, l, k = params.n_cap, params.l_exp, params.k_steps
    x = params.threshold
    h = params.height * scale
    fams = {
        # any crossing outside I_{M-1} makes the curve longer than |I_{M-1}| > c|a-b|
        "F1": Inequality(2 * c * h / scale, Fraction(1)),
        # crossing inside J_M: the half curve is at least h, dist at most |J_M|/2
        "F2": Inequality(Fraction(n, 2) * q_m, h / scale),
        "F3": Inequality(Fraction(1, n ** (l - 1)), (1 - x) ** (k + 1), strict=False),
        "F4": Inequality(n * Fraction(1, 2 ** (k + 2)), 2 * params.height),
    }
    per_m = [Inequality(Fraction(n, 2) * Fraction(1, 2**m) * x, ((1 - x) / 2) ** (m + 1))
             for m in range(1, k + 1)]
    return fams, per_m


def certificate(spec: SequenceSpec, c, scale=1, search_bound: int = DEFAULT_SEARCH_BOUND
                ) -> AdversaryCertificate:
    """Parameters and the four inequality families for target constant ``c``."""
    if is_uniform(spec):
        choice = select_delta(spec)
        raise SpecIsUniform(f"spec is uniform (N(ω,{choice.delta})={choice.n0})")
    c = _as_c(c)
    scale = Fraction(scale)
    if scale <= 0:
        raise ValueError("scale must be positive")
    n, l, k = choose_params(c)
    m = find_M(spec, n, l, k, search_bound)
    params = AdversaryParams(n, l, k, m)
    q_m = spec.q(m)
    fams, per_m = _families(params, c, q_m, scale)
    return AdversaryCertificate(params, c, scale, q_m, fams, per_m)


def verify_no_curve(cert: AdversaryCertificate, spec: SequenceSpec, depth_cutoff: int,
                    c=None) -> EnumerationResult:
    """Finite check that every admissible real crossing violates the ratio bound.

    A curve with constant c crosses the real axis at some z with
    |a - z| + |z - b| <= c |a - b|, i.e. |z - x0| <= h sqrt(c^2 - 1).  Every such
    z lies in a gap J; there the shorter half of the curve is at least
    sqrt(h^2 + |z - x0|^2) while c dist(z, E) <= c |J| / 2.  Gaps created at
    local steps <= depth_cutoff + 1 are checked one by one; deeper gaps sit in
    leaves of length l and fail as soon as c l / 2 < h.
    """
    c = cert.c_target if c is None else _as_c(c)
    if depth_cutoff < 0:
        raise ValueError("depth_cutoff must be nonnegative")
    params = cert.params
    h = params.height
    local = shift_spec(spec, params.m_index - 1)
    max_step = depth_cutoff + 1
    tree = CantorTree(local, max_step, max_depth=max(max_step, 64))
    x0 = Fraction(1, 2)  # tree coordinates put I_{M-1} at [0, 1]
    reach2 = h * h * (c * c - 1)
    # rational window slightly wider than the exact one; filtered exactly below
    w = Fraction(math.sqrt(float(reach2)) * (1 + 1e-9) + 1e-300) if reach2 > 0 else Fraction(0)
    candidates = gaps_in(tree, (x0 - w, x0 + w), max_step)

    checked, worst = 0, None
    for gap in candidates:
        if gap.lo < x0 < gap.hi:
            near = Fraction(0)
        else:
            near = min(abs(gap.lo - x0), abs(gap.hi - x0))
        if near * near > reach2:
            continue
        checked += 1
        margin = h * h + near * near - (c * gap.length / 2) ** 2
        worst = margin if worst is None else min(worst, margin)

    leaf = tree.lengths[max_step]
    cutoff_margin = h - c * leaf / 2
    min_margin = cutoff_margin if worst is None else min(worst, cutoff_margin)
    if cutoff_margin <= 0:
        result = EnumerationResult("Inconclusive", depth_cutoff, checked, float(min_margin),
                                   float(cutoff_margin), "cutoff too shallow")
    elif min_margin <= 0:
        result = EnumerationResult("Inconclusive", depth_cutoff, checked, float(min_margin),
                                   float(cutoff_margin), "a gap check failed")
    else:
        result = EnumerationResult("NoCurve", depth_cutoff, checked, float(min_margin),
                                   float(cutoff_margin))
    return result
