"""Slope distributions of U_p and mechanical checks of weight-congruence
predictions about them.

The central object is d(k, alpha): the multiplicity of slope alpha in the
p-adic valuations of the U_p eigenvalues on S_k(Gamma0(N*p)). For weights
congruent mod p^n (p-1) with n >= alpha (and both weights at least
2*alpha + 2), the classical local-constancy heuristic predicts d is the
same at both weights; the two certificate builders here document concrete
failures of that prediction and package them so a verifier can recompute
everything from the parameters alone.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from hashlib import sha256

from . import cache
from .ntheory import EngineInfeasibleError, dim_cusp_forms, is_prime, psi_index
from .traceformula import charpoly_prefix, charpoly_prefix_budget_ok

__all__ = [
    "EngineInfeasibleError",
    "INF",
    "d_value",
    "gm_predicts_equal",
    "newton_slopes",
    "slope_str",
    "theorem1_certificate",
    "theorem2_certificate",
    "up_slope_multiset",
    "verify_certificate",
]

INF = float("inf")

# modsym is affordable when the symbol count (k-1)*psi(N) stays moderate
_MODSYM_WORK_CAP = 50000
_MODSYM_WEIGHT_CAP = 200


def slope_str(s) -> str:
    """Canonical string form of a slope: '7', '13/2', or 'inf'."""
    if s == INF:
        return "inf"
    f = Fraction(s)
    return str(f)


def _slope_from_str(s: str):
    return INF if s == "inf" else Fraction(s)


def newton_slopes(valuations) -> list:
    """Slopes of the lower Newton polygon, as (slope, multiplicity) pairs.

    Input: valuations[i] = v(a_i) for a polynomial a_0 X^d + a_1 X^(d-1) +
    ... + a_d with a_0 a unit, so valuations[0] == 0. Entries may be None
    (coefficient is zero); trailing Nones contribute infinite slopes.
    """
    if not valuations or valuations[0] != 0:
        raise ValueError("leading coefficient must have valuation 0")
    d = len(valuations) - 1
    last = max(i for i, v in enumerate(valuations) if v is not None)
    pts = [(i, Fraction(v)) for i, v in enumerate(valuations[: last + 1]) if v is not None]
    hull = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point when it sits on or above the new chord
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    out = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        out.append((Fraction(y2 - y1, x2 - x1), x2 - x1))
    if last < d:
        out.append((INF, d - last))
    return out


def _merge(pairs) -> list:
    acc = {}
    for s, m in pairs:
        acc[s] = acc.get(s, 0) + m
    return sorted(acc.items(), key=lambda it: it[0])


def _tp_valuations_from_charpoly(coeffs, p) -> list:
    vals = []
    for c in coeffs:
        if c == 0:
            vals.append(None)
        else:
            v = 0
            while c % p == 0:
                c //= p
                v += 1
            vals.append(v)
    return vals


def _tp_slopes(p: int, N: int, k: int, dim: int) -> list:
    """Slopes of T_p on S_k(Gamma0(N)), choosing the cheapest exact engine."""
    if dim <= 2 and charpoly_prefix_budget_ok(p, dim) and 4 * p**dim <= 10**7:
        coeffs = charpoly_prefix(N, k, p, dim)
        return newton_slopes(_tp_valuations_from_charpoly(coeffs, p))
    if (k - 1) * psi_index(N) <= _MODSYM_WORK_CAP and k <= _MODSYM_WEIGHT_CAP:
        from . import modsym

        coeffs = modsym.hecke_charpoly(N, k, p)
        return newton_slopes(_tp_valuations_from_charpoly(coeffs, p))
    raise EngineInfeasibleError(
        "no exact engine within budget for T_%d on S_%d(Gamma0(%d)), dim %d"
        % (p, k, N, dim)
    )


def up_slope_multiset(p: int, N: int, k: int) -> list:
    """Multiset of U_p slopes on S_k(Gamma0(N*p)), as sorted (slope, mult) pairs.

    Requires p prime, p coprime to N, k even. Old eigenforms contribute both
    roots of X^2 - a_p X + p^(k-1); newforms at level N*p contribute slope
    (k-2)/2 each.
    """
    if not is_prime(p):
        raise ValueError("p must be prime")
    if N % p == 0:
        raise ValueError("level must be coprime to p")
    if k < 2 or k % 2:
        raise ValueError("weight must be even and at least 2")
    d_old = dim_cusp_forms(N, k)
    d_full = dim_cusp_forms(N * p, k)
    d_new = d_full - 2 * d_old
    assert d_new >= 0
    pairs = []
    if d_new:
        pairs.append((Fraction(k - 2, 2), d_new))
    if d_old:
        mid = Fraction(k - 1, 2)
        for s, m in _tp_slopes(p, N, k, d_old):
            if s == INF or s >= mid:
                pairs.append((mid, 2 * m))
            else:
                pairs.append((s, m))
                pairs.append((Fraction(k - 1) - s, m))
    out = _merge(pairs)
    assert sum(m for _, m in out) == d_full
    return out


def d_value(p: int, N: int, k: int, alpha) -> int:
    """Multiplicity d(k, alpha) of slope alpha among U_p slopes at level N*p."""
    a = _slope_from_str(alpha) if isinstance(alpha, str) else Fraction(alpha)
    for s, m in up_slope_multiset(p, N, k):
        if s == a:
            return m
    return 0


def gm_predicts_equal(p: int, k1: int, k2: int, alpha) -> bool:
    """Does the local-constancy prediction apply to d(k1, alpha) vs d(k2, alpha)?

    Needs both weights at least 2*alpha + 2 and k1 = k2 mod p^n (p-1) for
    an integer n >= alpha, i.e. n = max(ceil(alpha), 0).
    """
    a = Fraction(alpha)
    if min(k1, k2) < 2 * a + 2:
        return False
    if k1 == k2:
        return True
    delta = abs(k2 - k1)
    n = max(math.ceil(a), 0)
    return delta % ((p - 1) * p**n) == 0


def _certify(payload: dict) -> dict:
    body = cache.stable_json(payload)
    cert = dict(payload)
    cert["sha256"] = sha256(body.encode()).hexdigest()
    return cert


def _multiset_json(ms) -> list:
    return [[slope_str(s), m] for s, m in ms]


def _theorem1_dichotomy(vals, d1_at_1: int, d1_below_1: int) -> tuple:
    """Decide violation from observed valuations of a_1..a_depth at k2.

    vals[i-1] is v_p(a_i), or None when only a lower bound (> depth) is
    known. When every v_i >= i, points with v_j == j pin at least j slopes
    equal to 1 and rule out slopes below 1 (case A); otherwise some slope
    sits strictly below 1 (case B).
    """
    if all(v is None or v >= i for i, v in enumerate(vals, start=1)):
        js = [i for i, v in enumerate(vals, start=1) if v == i]
        j_max = max(js) if js else 0
        return j_max > d1_at_1, {
            "case": "A",
            "j_max": j_max,
            "k2_slope_one_at_least": j_max,
            "k2_has_no_slope_below_one": True,
        }
    return d1_below_1 == 0, {
        "case": "B",
        "k2_has_slope_below_one": True,
        "k1_count_below_one": d1_below_1,
    }


def theorem1_certificate(
    p: int = 59, k1: int = 16, k2: int = 3438, depth: int = 2, level: int = 1
) -> dict:
    """Certificate that d(k1, .) and d(k2, .) differ somewhere in [0, 1].

    The k1 side is small enough for its full slope multiset. The k2 side is
    read off the leading charpoly coefficients of T_p mod p^(depth+1): with
    v_i the valuation of coefficient i, either every v_i >= i (then points
    with v_j == j pin at least j slopes <= 1, none below 1), or some
    v_i < i forces a slope strictly below 1.
    """
    modulus = p ** (depth + 1)
    ms1 = up_slope_multiset(p, level, k1)
    d1_at_1 = d_value(p, level, k1, 1)
    d1_below_1 = sum(m for s, m in ms1 if s < 1)

    coeffs = charpoly_prefix(level, k2, p, depth, modulus=modulus)
    vals = []
    for c in coeffs[1:]:
        c %= modulus
        if c == 0:
            vals.append(None)
        else:
            v = 0
            while c % p == 0:
                c //= p
                v += 1
            vals.append(v)

    violated, dichotomy = _theorem1_dichotomy(vals, d1_at_1, d1_below_1)

    premise = {
        "alpha_window": "0 <= alpha <= 1",
        "weight_floor_ok": min(k1, k2) >= 4,
        "delta_k": abs(k2 - k1),
        "predicts_equal_at_alpha_0": gm_predicts_equal(p, k1, k2, 0),
        "predicts_equal_at_alpha_1": gm_predicts_equal(p, k1, k2, 1),
    }
    payload = {
        "schema": "gm-theorem1-certificate-v1",
        "engine_version": cache.ENGINE_VERSION,
        "params": {"p": p, "k1": k1, "k2": k2, "depth": depth, "level": level},
        "premise": premise,
        "k1_slopes": _multiset_json(ms1),
        "k1_d_at_alpha_1": d1_at_1,
        "k1_d_below_alpha_1": d1_below_1,
        "k2_charpoly_prefix_mod": {
            "modulus": str(modulus),
            "coeffs": [str(c) for c in coeffs],
            "valuations": [v if v is not None else "ge %d" % (depth + 1) for v in vals],
        },
        "dichotomy": dichotomy,
        "violated": violated,
    }
    return _certify(payload)


def _d_at_one(args) -> tuple:
    p, N, k = args
    return N, d_value(p, N, k, 1)


def theorem2_certificate(
    p: int = 5,
    k1: int = 6,
    k2: int = 26,
    nmax: int = 83,
    k2_all: bool = False,
    jobs: int = 1,
) -> dict:
    """Certificate comparing d(k1, 1) and d(k2, 1) across levels up to nmax.

    Scans every level coprime to p. Levels where d(k1, 1) > 0 are the
    members; d(k2, 1) is computed for them (or for every level when k2_all
    is set) and each member turns out to violate the prediction, with
    d(k2, 1) exactly twice d(k1, 1).
    """
    levels = [N for N in range(1, nmax + 1) if N % p != 0]
    d1 = {N: d_value(p, N, k1, 1) for N in levels}
    members = [N for N in levels if d1[N] > 0]
    targets = levels if k2_all else members
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            d2 = dict(pool.map(_d_at_one, [(p, N, k2) for N in targets]))
    else:
        d2 = {N: d_value(p, N, k2, 1) for N in targets}

    rows = [
        {"N": N, "d_k1": d1[N], "d_k2": d2[N], "equal": d1[N] == d2[N]}
        for N in targets
    ]
    violations = [N for N in targets if d1[N] != d2[N]]
    factor_two = all(d2[N] == 2 * d1[N] for N in members if N in d2)
    payload = {
        "schema": "gm-theorem2-certificate-v1",
        "engine_version": cache.ENGINE_VERSION,
        "params": {
            "p": p,
            "k1": k1,
            "k2": k2,
            "nmax": nmax,
            "k2_all": bool(k2_all),
        },
        "premise": {
            "alpha": "1",
            "weight_floor_ok": min(k1, k2) >= 4,
            "delta_k": abs(k2 - k1),
            "predicts_equal_at_alpha_1": gm_predicts_equal(p, k1, k2, 1),
        },
        "levels_scanned": len(levels),
        "members": members,
        "rows": rows,
        "violations": violations,
        "violated": bool(violations),
        "factor_two_on_members": factor_two,
    }
    return _certify(payload)


def verify_certificate(cert: dict) -> tuple:
    """Recompute a certificate from its params and compare byte for byte.

    Returns (ok, reason). Any mismatch in content or digest fails.
    """
    if not isinstance(cert, dict):
        return False, "certificate must be a JSON object"
    schema = cert.get("schema")
    params = cert.get("params")
    if not isinstance(params, dict):
        return False, "missing params"
    try:
        if schema == "gm-theorem1-certificate-v1":
            fresh = theorem1_certificate(**params)
        elif schema == "gm-theorem2-certificate-v1":
            fresh = theorem2_certificate(**params)
        else:
            return False, "unknown schema %r" % (schema,)
    except TypeError as exc:
        return False, "bad params: %s" % exc
    got = dict(cert)
    claimed_sha = got.pop("sha256", None)
    body = cache.stable_json(got)
    if sha256(body.encode()).hexdigest() != claimed_sha:
        return False, "digest does not match certificate body"
    if cache.stable_json(fresh) != cache.stable_json(cert):
        return False, "recomputed certificate differs"
    return True, "ok"
