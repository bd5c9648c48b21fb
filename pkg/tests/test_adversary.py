import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cantor_uniform.adversary import (
    certificate,
    choose_params,
    find_M,
    k_interval_ok,
    verify_no_curve,
)
from cantor_uniform.errors import NoSuchM, SpecIsUniform
from cantor_uniform.oracle import crossing_lower_bound
from cantor_uniform.sequence import OMEGA0, shift_spec, validate_spec

from .conftest import decay_doc

F = Fraction


def float_bounds(n, l):
    """Both sides of the K interval in floating point, written from scratch."""
    left = (l - 1) * math.log2(n) - 3  # log2 is exact on powers of two, where ties live
    right = (l - 1) * math.log(n) / abs(math.log1p(-float(n) ** -l)) - 1
    return left, right


@pytest.mark.parametrize("c, expected", [(1, (3, 4, 2)), (2, (5, 4, 4)), (F(6, 5), (3, 4, 2))])
def test_choose_params_examples(c, expected):
    assert choose_params(c) == expected


@given(st.fractions(min_value=1, max_value=12))
@settings(max_examples=80, deadline=None)
def test_params_satisfy_all_three_inequalities(c):
    n, l, k = choose_params(c)
    assert c < F(n, 2) and F(n - 1, 2) <= c  # least N with c < N/2
    assert n ** (l - 3) >= 2
    left, right = float_bounds(n, l)
    assert left < k < right
    assert k == max(1, math.floor(left) + 1)
    # L is minimal: nothing smaller has both the power condition and an integer K
    for l2 in range(1, l):
        lo, hi = float_bounds(n, l2)
        kk = max(1, math.floor(lo) + 1)
        assert n ** (l2 - 3) < 2 or not (lo < kk < hi)


def test_k_interval_exact_edges():
    # 2^(K+3) > N^(L-1) fails at K=1 for (3,4): 16 <= 27
    assert not k_interval_ok(3, 4, 1)
    assert k_interval_ok(3, 4, 2)
    assert not k_interval_ok(3, 4, 0)


def brute_M(q, n, l, k, limit):
    thr = F(1, n**l)
    for m in range(1, limit):
        if all(q(m + i) < thr for i in range(k + 1)):
            return m
    return None


@pytest.mark.parametrize("params, expected", [((3, 4, 2), 81), ((5, 4, 4), 625)])
def test_find_M_against_scan(all_decay, params, expected):
    m = find_M(all_decay, *params)
    assert m == expected == brute_M(lambda i: F(1, i + 1), *params, limit=2000)


def test_find_M_with_fixed_slots():
    # decay slot interleaved with a small fixed slot below the threshold
    spec = validate_spec({"prefix": ["1/2"], "tail": {"pattern": [
        {"kind": "fixed", "q": "1/100"},
        {"kind": "decay", "num": 1, "den_slope": 1, "den_offset": 0}]}})
    assert find_M(spec, 3, 4, 2) == brute_M(spec.q, 3, 4, 2, limit=2000)


def test_find_M_errors(all_decay):
    with pytest.raises(NoSuchM):
        find_M(OMEGA0, 3, 4, 2)
    with pytest.raises(NoSuchM):
        find_M(all_decay, 3, 4, 2, search_bound=80)


def test_certificate_replay(all_decay):
    cert = certificate(all_decay, 1)
    assert cert.params.to_json() == {"N": 3, "L": 4, "K": 2, "M": 81}
    assert cert.a == (0, F(1, 9)) and cert.b == (0, F(-1, 9))
    assert cert.q_m == F(1, 82)
    fam = cert.families
    # each family recomputed by hand
    assert (fam["F1"].lhs, fam["F1"].rhs) == (F(2, 9), 1)
    assert (fam["F2"].lhs, fam["F2"].rhs) == (F(3, 164), F(1, 9))
    assert (fam["F3"].lhs, fam["F3"].rhs) == (F(1, 27), F(80, 81) ** 3)
    assert (fam["F4"].lhs, fam["F4"].rhs) == (F(3, 16), F(2, 9))
    assert cert.holds and all(m > 0 for m in cert.margins().values())
    for m, ineq in enumerate(cert.f3_per_m, start=1):
        assert ineq.rhs == (F(80, 81) / 2) ** (m + 1)
        assert ineq.holds


def test_certificate_c2(all_decay):
    cert = certificate(all_decay, 2)
    assert cert.params.to_json() == {"N": 5, "L": 4, "K": 4, "M": 625}
    assert cert.holds


@pytest.mark.parametrize("scale", [F(1, 3), F(7, 2), F(1, 3**40)])
def test_scale_free(all_decay, scale):
    assert certificate(all_decay, 1, scale=scale).margins() == certificate(all_decay, 1).margins()


def test_uniform_spec_rejected():
    with pytest.raises(SpecIsUniform, match=r"spec is uniform \(N\(ω,1/3\)=1\)"):
        certificate(OMEGA0, 1)


def test_bad_c(all_decay):
    with pytest.raises(ValueError):
        certificate(all_decay, F(1, 2))


def test_no_curve_at_cutoff_12(all_decay):
    cert = certificate(all_decay, 1)
    res = verify_no_curve(cert, all_decay, 12)
    assert res.verdict == "NoCurve"
    # c = 1: the only crossing is x0 inside J_M, |J_M| = 1/82 in local units
    assert res.gaps_checked == 1
    assert res.min_margin == pytest.approx(float(F(1, 81) - F(1, 2 * 82) ** 2), rel=1e-12)


def test_shallow_cutoff_is_inconclusive(all_decay):
    res = verify_no_curve(certificate(all_decay, 1), all_decay, 1)
    assert res.verdict == "Inconclusive" and res.cutoff_margin < 0


@pytest.mark.parametrize("c", [F(6, 5), 2])
def test_monotone_in_c(all_decay, c):
    cert = certificate(all_decay, c)
    assert verify_no_curve(cert, all_decay, 10).verdict == "NoCurve"
    for smaller in (1, (1 + F(c)) / 2):
        assert verify_no_curve(cert, all_decay, 10, c=smaller).verdict == "NoCurve"


def test_oracle_agrees_on_the_adversary_pair(all_decay):
    cert = certificate(all_decay, 1)
    local = shift_spec(all_decay, cert.params.m_index - 1)
    h = float(cert.params.height)
    # I_{M-1} = [-1/2, 1/2] so x0 = 0
    bound = crossing_lower_bound(local, complex(0, h), complex(0, -h), 12, origin=-0.5)
    assert bound > float(cert.c_target)


def test_json_shape(all_decay):
    cert = certificate(all_decay, 1)
    cert.enumeration = verify_no_curve(cert, all_decay, 12)
    doc = cert.to_json()
    assert doc["params"] == {"N": 3, "L": 4, "K": 2, "M": 81}
    assert doc["local_coords"] is True
    assert set(doc["families"]) == {"F1", "F2", "F3", "F4"}
    assert doc["enumeration"]["verdict"] == "NoCurve"


def test_shifted_decay_gives_later_M():
    spec = validate_spec(decay_doc(offset=11))  # q_n = 1/(n+11)
    assert certificate(spec, 1).params.m_index == 71
