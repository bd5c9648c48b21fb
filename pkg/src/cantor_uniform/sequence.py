"""Decidable ratio sequences and the quantities derived from them.

A sequence is stored as a finite exact-rational prefix followed by a periodic
pattern of slots.  A slot is either a fixed ratio or a decaying ratio
``num / (den_slope * n + den_offset)`` evaluated at the *global* index ``n``.
That family is rich enough for the constant, interleaved and vanishing
examples while keeping every supremum and every gap count computable in
closed form.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence, Union

from .errors import (
    DecayDenominatorNonpositive,
    EmptyTailPattern,
    NonRationalEntry,
    OutOfRange,
    SpecValidationError,
)

INFINITE = math.inf


def parse_rational(value, field: str) -> Fraction:
    """Parse ``"p/q"``, a decimal string, or an int into a Fraction.

    JSON floats are rejected: they are not bit-exact rationals in general.
    """
    if isinstance(value, bool) or isinstance(value, float):
        raise NonRationalEntry(field, f"expected a rational string, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if not isinstance(value, str):
        raise NonRationalEntry(field, f"expected a rational string, got {value!r}")
    try:
        return Fraction(value.strip())
    except (ValueError, ZeroDivisionError):
        raise NonRationalEntry(field, f"not a rational: {value!r}") from None


def format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Fixed:
    q: Fraction

    def value(self, n: int) -> Fraction:
        return self.q

    def limit(self) -> Fraction:
        return self.q


@dataclass(frozen=True)
class Decay:
    num: int
    den_slope: int
    den_offset: int

    def value(self, n: int) -> Fraction:
        return Fraction(self.num, self.den_slope * n + self.den_offset)

    def limit(self) -> Fraction:
        return Fraction(0)

    def last_index_at_least(self, delta: Fraction) -> int:
        """Largest n with value(n) >= delta (may be below any governed index)."""
        return math.floor((Fraction(self.num) / delta - self.den_offset) / self.den_slope)


Slot = Union[Fixed, Decay]


@dataclass(frozen=True)
class SequenceSpec:
    prefix: tuple[Fraction, ...]
    pattern: tuple[Slot, ...]

    def __post_init__(self):
        _check_spec(self)

    @property
    def period(self) -> int:
        return len(self.pattern)

    def slot_at(self, n: int) -> Slot:
        """Slot governing global index ``n`` (``n`` past the prefix)."""
        return self.pattern[(n - len(self.prefix) - 1) % len(self.pattern)]

    def q(self, n: int) -> Fraction:
        if n < 1:
            raise ValueError(f"index must be >= 1, got {n}")
        if n <= len(self.prefix):
            return self.prefix[n - 1]
        return self.slot_at(n).value(n)

    def values(self, start: int = 1) -> Iterator[Fraction]:
        n = start
        while True:
            yield self.q(n)
            n += 1

    def to_document(self) -> dict:
        pattern = []
        for slot in self.pattern:
            if isinstance(slot, Fixed):
                pattern.append({"kind": "fixed", "q": format_rational(slot.q)})
            else:
                pattern.append({"kind": "decay", "num": slot.num,
                                "den_slope": slot.den_slope, "den_offset": slot.den_offset})
        return {"prefix": [format_rational(q) for q in self.prefix], "tail": {"pattern": pattern}}

    def key(self) -> str:
        return json.dumps(self.to_document(), sort_keys=True)


def _check_spec(spec: SequenceSpec) -> None:
    if not spec.pattern:
        raise EmptyTailPattern("tail.pattern", "pattern must be nonempty")
    for i, q in enumerate(spec.prefix):
        if not 0 < q < 1:
            raise OutOfRange(f"prefix[{i}]", f"{q} is not in (0, 1)")
    P = len(spec.prefix)
    for r, slot in enumerate(spec.pattern):
        field = f"tail.pattern[{r}]"
        if isinstance(slot, Fixed):
            if not 0 < slot.q < 1:
                raise OutOfRange(field + ".q", f"{slot.q} is not in (0, 1)")
            continue
        if slot.den_slope <= 0:
            raise SpecValidationError(field + ".den_slope", "must be a positive integer")
        if slot.num <= 0:
            raise OutOfRange(field + ".num", "must be a positive integer")
        # denominators increase with n, so the first governed index decides
        first = P + r + 1
        den = slot.den_slope * first + slot.den_offset
        if den <= 0:
            raise DecayDenominatorNonpositive(
                field + ".den_offset", f"denominator {den} at n={first} is not positive")
        if slot.num >= den:
            raise OutOfRange(field, f"q_{first} = {slot.num}/{den} is not below 1")


def _parse_int(value, field: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise NonRationalEntry(field, f"expected an integer, got {value!r}")
    return value


def validate_spec(doc) -> SequenceSpec:
    """Validate a raw JSON document and build a :class:`SequenceSpec`."""
    if isinstance(doc, (str, bytes)):
        doc = json.loads(doc)
    if not isinstance(doc, dict):
        raise SpecValidationError("$", "document must be an object")
    prefix_raw = doc.get("prefix", [])
    if not isinstance(prefix_raw, list):
        raise SpecValidationError("prefix", "must be a list")
    prefix = tuple(parse_rational(v, f"prefix[{i}]") for i, v in enumerate(prefix_raw))
    tail = doc.get("tail")
    if not isinstance(tail, dict) or "pattern" not in tail:
        raise EmptyTailPattern("tail.pattern", "missing")
    pattern_raw = tail["pattern"]
    if not isinstance(pattern_raw, list) or not pattern_raw:
        raise EmptyTailPattern("tail.pattern", "pattern must be a nonempty list")
    pattern: list[Slot] = []
    for r, item in enumerate(pattern_raw):
        field = f"tail.pattern[{r}]"
        if not isinstance(item, dict):
            raise SpecValidationError(field, "slot must be an object")
        kind = item.get("kind")
        if kind == "fixed":
            pattern.append(Fixed(parse_rational(item.get("q"), field + ".q")))
        elif kind == "decay":
            pattern.append(Decay(
                _parse_int(item.get("num"), field + ".num"),
                _parse_int(item.get("den_slope"), field + ".den_slope"),
                _parse_int(item.get("den_offset", 0), field + ".den_offset"),
            ))
        else:
            raise SpecValidationError(field + ".kind", f"unknown slot kind {kind!r}")
    return SequenceSpec(prefix, tuple(pattern))


def constant_spec(q) -> SequenceSpec:
    return SequenceSpec((), (Fixed(Fraction(q)),))


OMEGA0 = constant_spec(Fraction(1, 3))


def q_at(spec: SequenceSpec, n: int) -> Fraction:
    return spec.q(n)


def shift_spec(spec: SequenceSpec, s: int) -> SequenceSpec:
    """Spec of the shifted sequence ``j -> q_{s+j}``."""
    if s < 0:
        raise ValueError("shift must be nonnegative")
    P, L = len(spec.prefix), len(spec.pattern)
    new_prefix = spec.prefix[s:]
    rot = (len(new_prefix) + s - P) % L
    pattern = []
    for r in range(L):
        slot = spec.pattern[(r + rot) % L]
        if isinstance(slot, Decay):
            slot = Decay(slot.num, slot.den_slope, slot.den_offset + slot.den_slope * s)
        pattern.append(slot)
    return SequenceSpec(tuple(new_prefix), tuple(pattern))


# ---------------------------------------------------------------------------
# sup / inf


@dataclass(frozen=True)
class SpecStats:
    sup_q: Fraction
    sup_attained: bool
    inf_q: Fraction
    inf_attained: bool
    in_omega_b: bool


def spec_stats(spec: SequenceSpec) -> SpecStats:
    P = len(spec.prefix)
    # decay slots are decreasing, so each slot contributes its first value to the sup
    firsts = [slot.value(P + r + 1) for r, slot in enumerate(spec.pattern)]
    sup_q = max(list(spec.prefix) + firsts)
    attained = list(spec.prefix) + [s.q for s in spec.pattern if isinstance(s, Fixed)]
    has_decay = any(isinstance(s, Decay) for s in spec.pattern)
    if has_decay:
        inf_q, inf_attained = Fraction(0), False
    else:
        inf_q, inf_attained = min(attained), True
    return SpecStats(sup_q, True, inf_q, inf_attained, sup_q < 1)


# ---------------------------------------------------------------------------
# omega(delta; i) and N(omega, delta)


def _check_delta(delta) -> Fraction:
    delta = Fraction(delta)
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    return delta


def omega_delta_i(spec: SequenceSpec, delta, i: int):
    """Least k >= 1 with q_{i+k} >= delta, or INFINITE."""
    delta = _check_delta(delta)
    if i < 0:
        raise ValueError("i must be nonnegative")
    P, L = len(spec.prefix), spec.period
    n = i + 1
    misses = 0
    while True:
        if spec.q(n) >= delta:
            return n - i
        if n > P:
            # a tail slot that misses once misses for good (fixed: never, decay: decreasing)
            misses += 1
            if misses >= L:
                return INFINITE
        n += 1


def _cyclic_max_gap(residues: Sequence[int], period: int) -> int:
    if len(residues) == 1:
        return period
    gaps = [b - a for a, b in zip(residues, residues[1:])]
    gaps.append(residues[0] + period - residues[-1])
    return max(gaps)


def big_N(spec: SequenceSpec, delta):
    """sup over i >= 1 of omega(delta; i).

    The hit set {n : q_n >= delta} is explicit up to P + 2L; beyond that it
    contains every position of the fixed slots that reach delta, and equals
    exactly that periodic set once all decay slots have dropped below delta.
    """
    delta = _check_delta(delta)
    P, L = len(spec.prefix), spec.period
    fixed_hits = [r for r, s in enumerate(spec.pattern) if isinstance(s, Fixed) and s.q >= delta]
    if not fixed_hits:
        return INFINITE
    window = [n for n in range(1, P + 2 * L + 1) if spec.q(n) >= delta]
    pts = sorted({1, *window})
    explicit = max(b - a for a, b in zip(pts, pts[1:]))
    return max(explicit, _cyclic_max_gap(fixed_hits, L))


def is_uniform(spec: SequenceSpec) -> bool:
    """N(omega, delta) < inf for some delta iff the tail pattern has a fixed slot."""
    return any(isinstance(s, Fixed) for s in spec.pattern)


def theorem_constant(n0: int, delta) -> Fraction:
    """c(N0, delta) = 9 (2 / (1 - delta))^(N0 + 1) / delta, exactly."""
    delta = _check_delta(delta)
    if n0 < 1:
        raise ValueError("N0 must be a positive integer")
    return 9 * (2 / (1 - delta)) ** (n0 + 1) / delta


@dataclass(frozen=True)
class DeltaChoice:
    delta: Fraction
    n0: int
    c: Fraction


def select_delta(spec: SequenceSpec) -> DeltaChoice | None:
    """Pick the admissible delta with the smallest theorem constant.

    Candidates are the distinct fixed ratios, plus 1/(N0+2) for each of them
    (the unconstrained minimiser of c(N0, .)).  Ties go to the larger delta.
    """
    if not is_uniform(spec):
        return None
    values = set(spec.prefix) | {s.q for s in spec.pattern if isinstance(s, Fixed)}
    candidates: dict[Fraction, int] = {}
    for v in sorted(values):
        n = big_N(spec, v)
        if n == INFINITE:
            continue
        candidates[v] = n
        t = Fraction(1, n + 2)
        nt = big_N(spec, t)
        if nt != INFINITE:
            candidates[t] = nt
    best = None
    for delta, n0 in candidates.items():
        c = theorem_constant(n0, delta)
        key = (c, -delta)
        if best is None or key < best[0]:
            best = (key, DeltaChoice(delta, n0, c))
    return best[1]


# ---------------------------------------------------------------------------
# the metric d and asymptotic conformality


def _log_ratio_abs(qa: Fraction, qb: Fraction) -> float:
    r = (1 - qb) / (1 - qa)
    if r < 1:
        r = 1 / r
    return math.log(r)


def _term(qa: Fraction, qb: Fraction) -> float:
    return max(_log_ratio_abs(qa, qb), float(abs(qb - qa)))


def _real_roots(c2: float, c1: float, c0: float) -> list[float]:
    if c2 == 0:
        return [] if c1 == 0 else [-c0 / c1]
    disc = c1 * c1 - 4 * c2 * c0
    if disc < 0:
        return []
    s = math.sqrt(disc)
    return [(-c1 - s) / (2 * c2), (-c1 + s) / (2 * c2)]


def _critical_indices(sa: Decay, sb: Decay) -> list[float]:
    """Stationary points (in continuous n) of both terms for a decay/decay pair."""
    al, s, o = sa.num, sa.den_slope, sa.den_offset
    be, t, p = sb.num, sb.den_slope, sb.den_offset
    # log term: t*be*A(A-al) = s*al*B(B-be), with A = s n + o, B = t n + p
    c2 = t * be * s * s - s * al * t * t
    c1 = t * be * s * (2 * o - al) - s * al * t * (2 * p - be)
    c0 = t * be * o * (o - al) - s * al * p * (p - be)
    roots = _real_roots(float(c2), float(c1), float(c0))
    # difference term: B sqrt(s al) = A sqrt(t be)
    ra, rb = math.sqrt(s * al), math.sqrt(t * be)
    den = t * ra - s * rb
    if den != 0:
        roots.append((o * rb - p * ra) / den)
    return roots


def metric_d(spec_a: SequenceSpec, spec_b: SequenceSpec) -> float:
    """sup_n max(|log((1-q~_n)/(1-q_n))|, |q~_n - q_n|), in closed form.

    Never infinite inside this family: every ratio is bounded away from 1.
    """
    if spec_a.key() > spec_b.key():
        spec_a, spec_b = spec_b, spec_a
    P = max(len(spec_a.prefix), len(spec_b.prefix))
    best = 0.0
    for n in range(1, P + 1):
        best = max(best, _term(spec_a.q(n), spec_b.q(n)))
    lam = math.lcm(spec_a.period, spec_b.period)
    for r in range(lam):
        n0 = P + 1 + r
        sa, sb = spec_a.slot_at(n0), spec_b.slot_at(n0)
        best = max(best, _term(sa.value(n0), sb.value(n0)), _term(sa.limit(), sb.limit()))
        if isinstance(sa, Decay) and isinstance(sb, Decay):
            for x in _critical_indices(sa, sb):
                if not math.isfinite(x) or x <= n0:
                    continue
                t = (x - n0) / lam
                if t > 1e15:
                    continue
                for k in {math.floor(t), math.ceil(t)}:
                    n = n0 + lam * k
                    best = max(best, _term(sa.value(n), sb.value(n)))
    return best


def asymptotically_conformal(spec_a: SequenceSpec, spec_b: SequenceSpec) -> bool:
    """Whether log((1-q~_n)/(1-q_n)) -> 0 along every tail residue class."""
    P = max(len(spec_a.prefix), len(spec_b.prefix))
    lam = math.lcm(spec_a.period, spec_b.period)
    for r in range(lam):
        n0 = P + 1 + r
        if spec_a.slot_at(n0).limit() != spec_b.slot_at(n0).limit():
            return False
    return True


def omega_b_measure_bound(k: int, n: int) -> Fraction:
    """(1 - 1/k)^n: product measure of {first n coordinates <= 1 - 1/k}."""
    if k < 2 or n < 0:
        raise ValueError("need k >= 2 and n >= 0")
    return Fraction(k - 1, k) ** n


# ---------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class ClassificationVerdict:
    in_omega_b: bool
    delta_star: Fraction | None
    n_of_delta: float | int | None
    uniform: bool
    theorem_constant: Fraction | None
    in_moduli_standard: bool

    def to_json(self) -> dict:
        n = self.n_of_delta
        return {
            "in_omega_b": self.in_omega_b,
            "delta_star": None if self.delta_star is None else format_rational(self.delta_star),
            "N": "inf" if n == INFINITE else n,
            "uniform": self.uniform,
            "c": None if self.theorem_constant is None else format_rational(self.theorem_constant),
            "in_moduli_standard": self.in_moduli_standard,
        }


def classify_moduli_standard(spec: SequenceSpec, delta=None) -> ClassificationVerdict:
    """Uniformity of the complement and membership in the moduli space of omega_0.

    With an explicit ``delta`` the reported N and constant refer to that delta;
    ``uniform`` is always the intrinsic verdict (finite N for *some* delta).
    """
    stats = spec_stats(spec)
    uniform = is_uniform(spec)
    if delta is not None:
        delta = _check_delta(delta)
        n = big_N(spec, delta)
        c = theorem_constant(n, delta) if n != INFINITE else None
        return ClassificationVerdict(stats.in_omega_b, delta, n, uniform, c,
                                     stats.in_omega_b and uniform)
    choice = select_delta(spec)
    if choice is None:
        return ClassificationVerdict(stats.in_omega_b, None, INFINITE, False, None, False)
    return ClassificationVerdict(stats.in_omega_b, choice.delta, choice.n0, True, choice.c,
                                 stats.in_omega_b)
