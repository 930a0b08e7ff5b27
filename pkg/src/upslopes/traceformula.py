"""Exact traces of Hecke operators T_n on S_k(Gamma0(N)).

The trace is assembled from four exact contributions: an identity term, an
elliptic term weighted by class numbers of imaginary quadratic orders, a
hyperbolic term over divisor pairs of n, and a correction that is nonzero
only in weight 2. All intermediate denominators divide 144, so both the
exact path and the residue path work with 144 times each term.

Also provides leading coefficients of the characteristic polynomial of T_p
from power sum traces via Newton's identities.
"""

from __future__ import annotations

import math

import numpy as np

from . import ntheory

__all__ = [
    "trace_weight_poly",
    "trace_tn",
    "trace_tn_mod",
    "hecke_power_traces",
    "charpoly_prefix",
    "charpoly_prefix_budget_ok",
]


def trace_weight_poly(k: int, t: int, n: int) -> int:
    """Degree k-2 kernel polynomial P_k(t, n).

    Defined by U_0 = 1, U_1 = t, U_j = t*U_{j-1} - n*U_{j-2}; returns U_{k-2}.
    Requires t^2 < 4n so the companion roots are complex conjugates.
    """
    if t * t >= 4 * n:
        raise ValueError("need t^2 < 4n")
    if k < 2:
        raise ValueError("need k >= 2")
    u0, u1 = 1, t
    if k == 2:
        return u0
    for _ in range(k - 3):
        u0, u1 = u1, t * u1 - n * u0
    return u1


def _trace_weight_poly_mod_vec(k: int, ts: np.ndarray, n: int, m: int) -> np.ndarray:
    """P_k(t, n) mod m for an int64 vector of t values. Caller checks bounds."""
    ts = ts % m
    u0 = np.ones(len(ts), dtype=np.int64)
    u1 = ts.copy()
    if k == 2:
        return u0
    nm = n % m
    for _ in range(k - 3):
        u0, u1 = u1, (ts * u1 - nm * u0) % m
    return u1 % m


def _mu_weight(t: int, n: int, f: int, N: int) -> int:
    """Local weight for the elliptic term at level N: counts residues mod N
    that lift to roots of x^2 - t x + n mod N*gcd(f, N), scaled by an index
    ratio. Counting plain roots mod N*g instead overcounts whenever a root
    mod N lifts to more than one root upstairs."""
    if N == 1:
        return 1
    g = math.gcd(f, N)
    M = N * g
    cnt = ntheory.count_quadratic_root_images(t % M, n % M, N, g)
    if cnt == 0:
        return 0
    return ntheory._psi_ratio(N, g) * cnt


def _elliptic_weight12(t: int, n: int, N: int) -> int:
    """12 * sum over f of h_w((4n - t^2)/f^2) * mu(t, f, N)."""
    D = 4 * n - t * t
    if N == 1:
        # mu == 1, and the f-sum of primitive class numbers telescopes
        return ntheory.hurwitz12(D)
    total = 0
    f = 1
    while f * f <= D:
        if D % (f * f) == 0:
            d0 = D // (f * f)
            if d0 % 4 in (0, 3):
                hw = ntheory.hurwitz12_primitive(d0)
                if hw:
                    w = _mu_weight(t, n, f, N)
                    if w:
                        total += hw * w
        f += 1
    return total


def _hyperbolic_c(N: int, delta: int) -> int:
    """sum over c | N with gcd(c, N/c) | delta of phi(gcd(c, N/c))."""
    s = 0
    for c in ntheory.divisors(N):
        g = math.gcd(c, N // c)
        if delta % g == 0:
            s += ntheory.euler_phi(g)
    return s


def _trace_144(N: int, k: int, n: int, modulus: int | None) -> int:
    """144 * Tr T_n on S_k(Gamma0(N)), exact or mod 144*modulus."""
    if k < 2 or k % 2 == 1:
        raise ValueError("even weight k >= 2 required")
    if n < 1:
        raise ValueError("n >= 1 required")
    if math.gcd(n, N) != 1:
        raise ValueError("gcd(n, N) == 1 required")
    mm = None if modulus is None else 144 * modulus

    ntheory.ensure_class_tables(4 * n)

    # identity contribution
    r = math.isqrt(n)
    if r * r == n:
        if mm is None:
            a1 = 12 * (k - 1) * ntheory.psi_index(N) * n ** (k // 2 - 1)
        else:
            a1 = 12 * (k - 1) * ntheory.psi_index(N) * pow(n, k // 2 - 1, mm) % mm
    else:
        a1 = 0

    # elliptic contribution: 6 * sum over t^2 < 4n of P_k(t, n) * weight(t)
    tmax = math.isqrt(4 * n - 1)
    weights = [_elliptic_weight12(t, n, N) for t in range(tmax + 1)]
    if mm is None:
        a2 = 0
        for t in range(tmax + 1):
            w = weights[t]
            if w == 0:
                continue
            term = trace_weight_poly(k, t, n) * w
            a2 += term if t == 0 else 2 * term
        a2 *= 6
    else:
        ts = np.arange(tmax + 1, dtype=np.int64)
        if mm <= 2**31 and mm * (mm + n % mm + 1) < 2**62:
            pk = _trace_weight_poly_mod_vec(k, ts, n, mm)
            pk = [int(x) for x in pk]
        else:
            pk = [trace_weight_poly(k, t, n) % mm for t in range(tmax + 1)]
        a2 = 0
        for t in range(tmax + 1):
            w = weights[t]
            if w == 0:
                continue
            term = pk[t] * w
            a2 += term if t == 0 else 2 * term
        a2 = 6 * a2 % mm

    # hyperbolic contribution: 72 * (sum with the d = sqrt(n) term not doubled)
    a3twice = 0
    for d in ntheory.divisors(n):
        if d * d > n:
            break
        c = _hyperbolic_c(N, n // d - d)
        if c == 0:
            continue
        if mm is None:
            term = d ** (k - 1) * c
        else:
            term = pow(d, k - 1, mm) * c
        a3twice += term if d * d == n else 2 * term
    a3 = 72 * a3twice

    # weight 2 correction
    a4 = 144 * ntheory.sigma_coprime(n, N) if k == 2 else 0

    s = a1 - a2 - a3 + a4
    return s % mm if mm is not None else s


def trace_tn(N: int, k: int, n: int) -> int:
    """Exact trace of T_n on S_k(Gamma0(N)), gcd(n, N) = 1, even k >= 2."""
    s = _trace_144(N, k, n, None)
    q, rem = divmod(s, 144)
    assert rem == 0
    return q


def trace_tn_mod(N: int, k: int, n: int, modulus: int) -> int:
    """trace_tn(N, k, n) reduced mod modulus, without big intermediates."""
    if modulus < 1:
        raise ValueError("modulus >= 1 required")
    s = _trace_144(N, k, n, modulus)
    q, rem = divmod(s, 144)
    assert rem == 0
    return q % modulus


def charpoly_prefix_budget_ok(p: int, depth: int) -> bool:
    """Cheap feasibility guard for the power trace computation."""
    return 2 * p ** (depth / 2) <= 1e7


def hecke_power_traces(
    N: int, k: int, p: int, depth: int, modulus: int | None = None
) -> list[int]:
    """Traces of the operator powers T_p^i on S_k(Gamma0(N)), i = 1..depth.

    T_p^i is expanded in the basis T_{p^j} via the Hecke recursion
    T_p T_{p^j} = T_{p^(j+1)} + p^(k-1) T_{p^(j-1)}, then each basis trace is
    evaluated by the trace formula.
    """
    if math.gcd(p, N) != 1:
        raise ValueError("p must not divide N")
    pk1 = p ** (k - 1) if modulus is None else pow(p, k - 1, modulus)
    base_traces: dict[int, int] = {}

    def tr_ppow(j: int) -> int:
        if j not in base_traces:
            if modulus is None:
                base_traces[j] = trace_tn(N, k, p**j)
            else:
                base_traces[j] = trace_tn_mod(N, k, p**j, modulus)
        return base_traces[j]

    out = []
    cur = {0: 1}  # coefficients of T_p^i over the T_{p^j}
    for _ in range(depth):
        nxt: dict[int, int] = {}
        for j, c in cur.items():
            nxt[j + 1] = nxt.get(j + 1, 0) + c
            if j >= 1:
                nxt[j - 1] = nxt.get(j - 1, 0) + c * pk1
        if modulus is not None:
            nxt = {j: c % modulus for j, c in nxt.items()}
        cur = nxt
        s = sum(c * tr_ppow(j) for j, c in cur.items() if c)
        out.append(s % modulus if modulus is not None else s)
    return out


def charpoly_prefix(
    N: int, k: int, p: int, depth: int, modulus: int | None = None
) -> list[int]:
    """First coefficients [a_0 .. a_depth] of charpoly(T_p on S_k(Gamma0(N))).

    Convention: charpoly = X^d + a_1 X^(d-1) + a_2 X^(d-2) + ...; a_0 = 1.
    Newton's identities convert power sum traces to coefficients; with a
    modulus, each division by i requires gcd(i, modulus) == 1.
    """
    if not charpoly_prefix_budget_ok(p, depth):
        raise ValueError(
            "power trace budget exceeded: 2*p^(depth/2) > 1e7 for p=%d depth=%d"
            % (p, depth)
        )
    q = hecke_power_traces(N, k, p, depth, modulus)
    a = [1]
    for i in range(1, depth + 1):
        s = -sum(q[j - 1] * a[i - j] for j in range(1, i + 1))
        if modulus is None:
            ai, rem = divmod(s, i)
            assert rem == 0
        else:
            if math.gcd(i, modulus) != 1:
                raise ValueError("depth index %d not invertible mod modulus" % i)
            ai = s * pow(i, -1, modulus) % modulus
        a.append(ai)
    return a
