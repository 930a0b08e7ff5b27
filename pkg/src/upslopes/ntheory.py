"""Exact number-theoretic kernels.

Factorization, multiplicative invariants of Gamma0(N), Hurwitz class number
tables, and root counts of quadratics over Z/M. Everything returns exact
integers; numpy is used only to build class number tables in bulk.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

__all__ = [
    "EngineInfeasibleError",
    "is_prime",
    "prev_prime",
    "factorize",
    "divisors",
    "euler_phi",
    "moebius_sieve",
    "psi_index",
    "nu2",
    "nu3",
    "nu_infinity",
    "genus_gamma0",
    "dim_cusp_forms",
    "is_squarefree",
    "valuation",
    "sigma_coprime",
    "character_pair_data",
    "count_quadratic_root_images",
    "count_quadratic_roots",
    "hurwitz12",
    "hurwitz12_primitive",
    "ensure_class_tables",
]

class EngineInfeasibleError(RuntimeError):
    """Raised when a request exceeds what the exact engines can do in budget."""


# deterministic Miller-Rabin witness set, valid far beyond 64 bits
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic primality test for machine-scale integers."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = ((d & -d).bit_length()) - 1
    d >>= r
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def prev_prime(n: int) -> int:
    """Largest prime strictly below n."""
    m = n - 1
    if m >= 3 and m % 2 == 0:
        m -= 1
    while m >= 2:
        if is_prime(m):
            return m
        m -= 2 if m > 3 else 1
    raise ValueError("no prime below %d" % n)


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization by trial division, ascending primes."""
    if n <= 0:
        raise ValueError("factorize needs a positive integer")
    out: list[tuple[int, int]] = []
    for p in (2, 3):
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
    p = 5
    step = 2  # 5, 7, 11, 13, ... (wheel mod 6)
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += step
        step = 6 - step
    if n > 1:
        out.append((n, 1))
    return out


def divisors(n: int) -> list[int]:
    """Sorted list of positive divisors."""
    ds = [1]
    for p, e in factorize(n):
        ds = [d * p**j for d in ds for j in range(e + 1)]
    return sorted(ds)


def euler_phi(n: int) -> int:
    r = n
    for p, _ in factorize(n):
        r = r // p * (p - 1)
    return r


def moebius_sieve(n: int) -> np.ndarray:
    """Array mu[0..n] of Moebius values (mu[0] unused, set to 0)."""
    mu = np.ones(n + 1, dtype=np.int64)
    mu[0] = 0
    prime = np.ones(n + 1, dtype=bool)
    prime[:2] = False
    for p in range(2, n + 1):
        if prime[p]:
            prime[2 * p :: p] = False
            mu[p::p] *= -1
            mu[p * p :: p * p] = 0
    return mu


def psi_index(N: int) -> int:
    """Index of Gamma0(N) in SL2(Z): N * prod(1 + 1/p)."""
    r = N
    for p, _ in factorize(N):
        r = r // p * (p + 1)
    return r


def nu2(N: int) -> int:
    """Number of elliptic points of order 2 on X0(N)."""
    if N % 4 == 0:
        return 0
    r = 1
    for p, _ in factorize(N):
        if p == 2:
            continue
        if p % 4 == 1:
            r *= 2
        else:
            return 0
    return r


def nu3(N: int) -> int:
    """Number of elliptic points of order 3 on X0(N)."""
    if N % 9 == 0:
        return 0
    r = 1
    for p, _ in factorize(N):
        if p == 3:
            continue
        if p % 3 == 1:
            r *= 2
        else:
            return 0
    return r


def nu_infinity(N: int) -> int:
    """Number of cusps of X0(N)."""
    return sum(euler_phi(math.gcd(d, N // d)) for d in divisors(N))


def genus_gamma0(N: int) -> int:
    """Genus of the modular curve X0(N)."""
    num = 12 + psi_index(N) - 3 * nu2(N) - 4 * nu3(N) - 6 * nu_infinity(N)
    assert num % 12 == 0
    return num // 12


def dim_cusp_forms(N: int, k: int) -> int:
    """dim S_k(Gamma0(N)), trivial character. Zero for odd or nonpositive k."""
    if k <= 0 or k % 2 == 1:
        return 0
    g = genus_gamma0(N)
    if k == 2:
        return g
    return (
        (k - 1) * (g - 1)
        + (k // 2 - 1) * nu_infinity(N)
        + (k // 4) * nu2(N)
        + (k // 3) * nu3(N)
    )


def valuation(n: int, p: int) -> int:
    """Exact p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of zero is infinite")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def sigma_coprime(n: int, N: int) -> int:
    """Sum of divisors of n that are coprime to N."""
    return sum(d for d in divisors(n) if math.gcd(d, N) == 1)


def _quadratic_roots_pk(t: int, n: int, p: int, e: int) -> list:
    """All x mod p^e with x^2 - t*x + n == 0, by brute force mod p followed
    by stepwise lifting, which needs no nondegeneracy assumptions."""
    sols = [x for x in range(p) if (x * x - t * x + n) % p == 0]
    q = p
    for _ in range(e - 1):
        qn = q * p
        sols = [
            y
            for x in sols
            for m in range(p)
            if ((y := x + m * q) * y - t * y + n) % qn == 0
        ]
        q = qn
    return sols


def count_quadratic_roots(t: int, n: int, M: int) -> int:
    """Number of x mod M with x^2 - t*x + n == 0 (mod M).

    Multiplicative over prime powers.
    """
    if M == 1:
        return 1
    total = 1
    for p, e in factorize(M):
        total *= len(_quadratic_roots_pk(t, n, p, e))
        if total == 0:
            return 0
    return total


def count_quadratic_root_images(t: int, n: int, N: int, g: int) -> int:
    """Number of x mod N that lift to a root of x^2 - t*x + n mod N*g.

    Requires g | N. Multiplicative over the primes of N*g: for each one the
    roots mod p^(e+s) are reduced mod p^e and counted without multiplicity.
    """
    if N == 1:
        return 1
    total = 1
    for p, e in factorize(N * g):
        a = valuation(N, p)
        roots = _quadratic_roots_pk(t, n, p, e)
        pa = p**a
        total *= len({r % pa for r in roots})
        if total == 0:
            return 0
    return total


def is_squarefree(n: int) -> bool:
    return all(e == 1 for _, e in factorize(n))


def _component_dlog(p: int, a: int) -> list[tuple[dict, int]]:
    """Discrete log tables for the cyclic factors of (Z/p^a)*.

    Each entry is ({residue: exponent}, order); the unit group is the
    direct product of the cyclic subgroups behind the tables.
    """
    q = p**a
    if p == 2:
        if a == 1:
            return []
        if a == 2:
            return [({1: 0, 3: 1}, 2)]
        # every unit is (-1)^s * 5^t; record both coordinates for each unit
        sign, half = {}, {}
        n = 1 << (a - 2)
        x = 1
        for t in range(n):
            sign[x] = 0
            half[x] = t
            sign[q - x] = 1
            half[q - x] = t
            x = 5 * x % q
        return [(sign, 2), (half, n)]
    n = (p - 1) * p ** (a - 1)
    for g in range(2, q):
        if g % p == 0:
            continue
        seen = {}
        x, e = 1, 0
        while x not in seen:
            seen[x] = e
            x = g * x % q
            e += 1
        if e == n:
            return [(seen, n)]
    raise ArithmeticError("no generator found")  # unreachable for odd p


def character_pair_data(f: int, ell: int) -> list[tuple]:
    """Primitive Dirichlet characters mod f evaluated at ell, conjugates merged.

    One entry per conjugate pair: ("real", v) with v = chi(ell) for real
    chi, or ("pair", c1, c2) with c1 = chi(ell) + conj(chi)(ell) and
    c2 = chi(ell)^2 + conj(chi)(ell)^2. Only character orders whose values
    are quadratic integers are supported; anything else raises.
    """
    if f == 1:
        return [("real", 1)]
    if math.gcd(ell, f) != 1:
        raise ValueError("ell must be a unit mod f")
    if euler_phi(f) > 2000:
        raise EngineInfeasibleError("character group too large at conductor %d" % f)
    comps = []  # (modulus, table, order) per cyclic factor
    for p, a in factorize(f):
        for table, order in _component_dlog(p, a):
            comps.append((p**a, table, order))
    # witnesses for primitivity: units congruent to 1 mod f/p for each p | f
    witness = []
    for p, _ in factorize(f):
        step = f // p
        witness.append(
            [x for x in range(1 + step, f, step) if math.gcd(x, f) == 1]
        )

    def angle(exps, x):
        total = Fraction(0)
        for (j, (q, table, order)) in zip(exps, comps):
            total += Fraction(j * table[x % q], order)
        return total % 1

    # 2*cos of an angle given in turns, for the quadratic-integer angles
    cos2 = {
        Fraction(0): 2,
        Fraction(1, 2): -2,
        Fraction(1, 3): -1,
        Fraction(2, 3): -1,
        Fraction(1, 4): 0,
        Fraction(3, 4): 0,
        Fraction(1, 6): 1,
        Fraction(5, 6): 1,
    }

    out = []
    seen = set()
    orders = [order for (_, _, order) in comps]
    for exps in itertools.product(*[range(n) for n in orders]):
        conj = tuple((-j) % n for j, n in zip(exps, orders))
        if conj in seen:
            continue
        seen.add(exps)
        if not all(any(angle(exps, x) != 0 for x in xs) for xs in witness):
            continue
        a_ell = angle(exps, ell)
        if exps == conj:
            if a_ell == 0:
                out.append(("real", 1))
            elif a_ell == Fraction(1, 2):
                out.append(("real", -1))
            else:
                raise ArithmeticError("real character with complex value")
        else:
            c1 = cos2.get(a_ell)
            c2 = cos2.get((2 * a_ell) % 1)
            if c1 is None or c2 is None:
                raise EngineInfeasibleError(
                    "character values at conductor %d are not quadratic integers" % f
                )
            out.append(("pair", c1, c2))
    return out


class _ClassTables:
    """Tables of 12*H(D) and its primitive-form refinement 12*h_w(D).

    H(D) is the Hurwitz class number: weighted count of all positive definite
    binary quadratic forms of discriminant -D up to SL2(Z), with weights 1/2
    for multiples of x^2+y^2 and 1/3 for multiples of x^2+xy+y^2, and
    H(0) = -1/12. The primitive variant h_w counts primitive forms only, so
    H(D) = sum over f^2 | D of h_w(D/f^2).
    """

    def __init__(self) -> None:
        self.dmax = -1
        self.h12 = np.zeros(0, dtype=np.int64)
        self.hw12 = np.zeros(0, dtype=np.int64)

    def ensure(self, dmax: int) -> None:
        if dmax <= self.dmax:
            return
        dmax = max(dmax, 2 * self.dmax + 1, 14000)
        h = np.zeros(dmax + 1, dtype=np.int64)
        h[0] = -1
        amax = math.isqrt(dmax // 3)
        for a in range(1, amax + 1):
            fa = 4 * a
            for b in range(a + 1):
                cmax = (dmax + b * b) // fa
                if cmax < a:
                    continue
                c = np.arange(a, cmax + 1, dtype=np.int64)
                dd = fa * c - b * b
                if b == 0:
                    w = np.full(c.shape, 12, dtype=np.int64)
                    w[0] = 6  # c == a: form (a, 0, a)
                elif b == a:
                    w = np.full(c.shape, 12, dtype=np.int64)
                    w[0] = 4  # c == a == b: form (a, a, a)
                else:
                    w = np.full(c.shape, 24, dtype=np.int64)
                    w[0] = 12  # c == a: only b >= 0 is reduced
                # dd is strictly increasing in c, so plain fancy add is safe
                h[dd] += w
        hw = h.copy()
        fmax = math.isqrt(dmax)
        mu = moebius_sieve(fmax)
        for f in range(2, fmax + 1):
            if mu[f] == 0:
                continue
            m = np.arange(0, dmax // (f * f) + 1, dtype=np.int64)
            hw[m * (f * f)] += mu[f] * h[m]
        self.dmax = dmax
        self.h12 = h
        self.hw12 = hw


_TABLES = _ClassTables()


def ensure_class_tables(dmax: int) -> None:
    """Precompute class number tables up to discriminant -dmax."""
    _TABLES.ensure(dmax)


def hurwitz12(D: int) -> int:
    """12 * H(D) as an exact integer. Zero unless D ≡ 0, 3 (mod 4) or D == 0."""
    if D < 0:
        raise ValueError("need D >= 0")
    _TABLES.ensure(D)
    return int(_TABLES.h12[D])


def hurwitz12_primitive(D: int) -> int:
    """12 * h_w(D): primitive forms only, same weighting as hurwitz12."""
    if D < 0:
        raise ValueError("need D >= 0")
    _TABLES.ensure(D)
    return int(_TABLES.hw12[D])


@lru_cache(maxsize=None)
def _psi_ratio(N: int, g: int) -> int:
    """psi(N) / psi(N // g) for g | N; always an integer."""
    r = psi_index(N)
    q, rem = divmod(r, psi_index(N // g))
    assert rem == 0
    return q
