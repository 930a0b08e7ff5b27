"""Slope multisets, local constancy predicate, certificates."""

import json
from fractions import Fraction

import pytest

from upslopes import cache
from upslopes.ntheory import EngineInfeasibleError, dim_cusp_forms
from upslopes.slopes import (
    INF,
    _theorem1_dichotomy,
    d_value,
    gm_predicts_equal,
    newton_slopes,
    slope_str,
    theorem1_certificate,
    theorem2_certificate,
    up_slope_multiset,
    verify_certificate,
)

F = Fraction


def test_newton_slopes_units():
    assert newton_slopes([0, 1, 3]) == [(F(1), 1), (F(2), 1)]
    assert newton_slopes([0, None, 2]) == [(F(1), 2)]
    assert newton_slopes([0, 2, None]) == [(F(2), 1), (INF, 1)]
    assert newton_slopes([0, 0, 0]) == [(F(0), 2)]
    assert newton_slopes([0]) == []
    assert newton_slopes([0, None, None]) == [(INF, 2)]
    # lower hull must ignore points above it
    assert newton_slopes([0, 5, 1, 9]) == [(F(1, 2), 2), (F(8), 1)]
    with pytest.raises(ValueError):
        newton_slopes([1, 2])


def test_slope_str_round_trip():
    assert slope_str(F(7)) == "7"
    assert slope_str(F(13, 2)) == "13/2"
    assert slope_str(INF) == "inf"


def test_up_multiset_totals():
    for p, N, k in ((2, 3, 8), (3, 4, 6), (5, 2, 10), (7, 1, 12), (2, 9, 4)):
        ms = up_slope_multiset(p, N, k)
        assert sum(m for _, m in ms) == dim_cusp_forms(N * p, k)
        assert all(m > 0 for _, m in ms)
        assert [s for s, _ in ms] == sorted(s for s, _ in ms)


def test_frozen_multisets():
    def as_str(ms):
        return [(slope_str(s), m) for s, m in ms]

    assert as_str(up_slope_multiset(59, 1, 16)) == [
        ("1", 1), ("7", 72), ("14", 1)]
    assert as_str(up_slope_multiset(5, 1, 6)) == [("2", 1)]
    assert as_str(up_slope_multiset(5, 14, 6)) == [
        ("0", 7), ("1", 1), ("2", 40), ("4", 1), ("5", 7)]
    assert as_str(up_slope_multiset(2, 7, 4)) == [
        ("0", 1), ("1", 2), ("3", 1)]
    assert as_str(up_slope_multiset(3, 10, 6)) == [
        ("0", 3), ("1", 2), ("2", 16), ("4", 2), ("5", 3)]
    assert as_str(up_slope_multiset(5, 4, 8)) == [
        ("1", 2), ("3", 14), ("6", 2)]


def test_frozen_multiset_weight_26():
    assert [(slope_str(s), m) for s, m in up_slope_multiset(5, 14, 26)] == [
        ("0", 7), ("1", 2), ("2", 38), ("3", 1), ("12", 200),
        ("22", 1), ("23", 38), ("24", 2), ("25", 7)]


def test_d_value():
    assert d_value(59, 1, 16, 1) == 1
    assert d_value(59, 1, 16, "7") == 72
    assert d_value(59, 1, 16, F(1, 2)) == 0
    assert d_value(5, 14, 6, 1) == 1
    assert d_value(5, 14, 26, 1) == 2


def test_up_multiset_validation():
    with pytest.raises(ValueError):
        up_slope_multiset(4, 1, 16)  # p not prime
    with pytest.raises(ValueError):
        up_slope_multiset(5, 10, 6)  # p divides the level
    with pytest.raises(ValueError):
        up_slope_multiset(5, 1, 7)  # odd weight


def test_up_multiset_infeasible():
    with pytest.raises(EngineInfeasibleError):
        up_slope_multiset(59, 1, 4000)


def test_gm_predicts_equal():
    assert gm_predicts_equal(59, 16, 3438, 0)
    assert gm_predicts_equal(59, 16, 3438, 1)
    assert gm_predicts_equal(59, 16, 74, 0)
    assert not gm_predicts_equal(59, 16, 74, 1)
    assert gm_predicts_equal(5, 6, 26, 1)
    assert not gm_predicts_equal(5, 6, 26, 2)
    assert gm_predicts_equal(5, 6, 26, F(1, 2))  # ceil(1/2) = 1
    assert gm_predicts_equal(5, 6, 6, 1)
    assert not gm_predicts_equal(5, 6, 6, 10)  # weight floor fails
    assert not gm_predicts_equal(5, 2, 22, 1)


def test_gm_predicate_monotone_in_alpha():
    # if the prediction applies at alpha it applies at every smaller
    # alpha whose weight floor still holds
    import random

    rng = random.Random(31)
    grid = [F(0), F(1, 2), F(1), F(3, 2), F(2), F(3), F(5)]
    for _ in range(300):
        p = rng.choice((2, 3, 5, 59))
        k1 = rng.randrange(2, 60, 2)
        k2 = k1 + (p - 1) * p ** rng.randrange(0, 3) * rng.randrange(0, 4)
        flags = [gm_predicts_equal(p, k1, k2, a) for a in grid]
        for lo in range(len(grid)):
            for hi in range(lo + 1, len(grid)):
                if flags[hi] and min(k1, k2) >= 2 * grid[lo] + 2:
                    assert flags[lo], (p, k1, k2, grid[lo], grid[hi])


def test_theorem1_dichotomy_cases():
    # all v_i >= i with equality at 2: case A, two slopes pinned at one
    violated, d = _theorem1_dichotomy([1, 2], d1_at_1=1, d1_below_1=0)
    assert violated and d["case"] == "A" and d["j_max"] == 2
    # strict inequalities everywhere: case A but no pin, no violation
    violated, d = _theorem1_dichotomy([2, 3], d1_at_1=1, d1_below_1=0)
    assert not violated and d["case"] == "A" and d["j_max"] == 0
    # v_1 = 0 < 1: case B, slope below one at k2 but none at k1
    violated, d = _theorem1_dichotomy([0, 1], d1_at_1=1, d1_below_1=0)
    assert violated and d["case"] == "B"
    # case B with matching mass below one on the k1 side: no violation
    violated, d = _theorem1_dichotomy([0, 1], d1_at_1=1, d1_below_1=3)
    assert not violated
    # None means the valuation exceeds the window, compatible with case A
    violated, d = _theorem1_dichotomy([1, None], d1_at_1=0, d1_below_1=0)
    assert violated and d["j_max"] == 1


def test_theorem1_certificate():
    cert = theorem1_certificate()
    assert cert["violated"] is True
    assert cert["dichotomy"]["case"] == "A"
    assert cert["dichotomy"]["j_max"] == 2
    assert cert["k1_d_at_alpha_1"] == 1
    assert cert["k1_d_below_alpha_1"] == 0
    assert cert["premise"]["predicts_equal_at_alpha_1"] is True
    assert cert["k2_charpoly_prefix_mod"]["coeffs"] == ["1", "24131", "177531"]
    ok, reason = verify_certificate(cert)
    assert ok, reason


def test_theorem1_determinism():
    a = theorem1_certificate()
    b = theorem1_certificate()
    assert cache.stable_json(a) == cache.stable_json(b)
    json.loads(cache.stable_json(a))  # stays valid JSON


def test_tampered_certificates_fail():
    cert = theorem1_certificate()
    bad = dict(cert)
    bad["violated"] = False
    ok, reason = verify_certificate(bad)
    assert not ok

    bad = dict(cert)
    bad["sha256"] = "0" * 64
    ok, reason = verify_certificate(bad)
    assert not ok and "digest" in reason

    bad = dict(cert)
    bad["k1_slopes"] = [["1", 1], ["7", 71], ["14", 2]]
    ok, _ = verify_certificate(bad)
    assert not ok

    bad = dict(cert)
    bad["schema"] = "gm-theorem3-certificate-v1"
    ok, reason = verify_certificate(bad)
    assert not ok and "schema" in reason

    bad = dict(cert)
    del bad["params"]
    ok, reason = verify_certificate(bad)
    assert not ok and "params" in reason

    bad = dict(cert)
    bad["params"] = dict(cert["params"], nonsense=3)
    ok, reason = verify_certificate(bad)
    assert not ok and "params" in reason

    ok, _ = verify_certificate("not a dict")
    assert not ok


def test_theorem2_small_window():
    cert = theorem2_certificate(nmax=14)
    assert cert["members"] == [14]
    assert cert["levels_scanned"] == 12  # 1..14 minus multiples of 5
    assert cert["rows"] == [{"N": 14, "d_k1": 1, "d_k2": 2, "equal": False}]
    assert cert["violated"] is True
    assert cert["factor_two_on_members"] is True
    assert cert["premise"]["predicts_equal_at_alpha_1"] is True
    ok, reason = verify_certificate(cert)
    assert ok, reason
    again = theorem2_certificate(nmax=14)
    assert cache.stable_json(again) == cache.stable_json(cert)
