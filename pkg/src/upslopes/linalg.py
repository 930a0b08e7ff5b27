"""Exact linear algebra kernels.

Three layers live here: sparse integer elimination used to present
quotient spaces, characteristic polynomials (exact via Berkowitz for
small matrices, multimodular Hessenberg + CRT for big ones), and a
digit-plane codec that routes big-integer matrix products through
float64 BLAS without losing exactness.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt, log2

import numpy as np

from .ntheory import prev_prime

__all__ = [
    "SparseElimination",
    "berkowitz_charpoly",
    "crt_balanced",
    "divide_linear",
    "divide_monic",
    "fold_planes_mod",
    "frac_kernel",
    "frac_rank",
    "frac_rref",
    "frac_solve",
    "hessenberg_charpoly_mod",
    "multimodular_charpoly",
    "planes16",
    "planes_matmul_T",
    "planes_to_object",
    "planes_trace",
    "prime_cap",
]


# ---------------------------------------------------------------------------
# digit planes: a big-integer matrix A is stored as int64 arrays P_s with
# A = sum_s 2**(16 s) * P_s.  Input planes are balanced digits in
# [-2**15, 2**15); product planes merely satisfy |entry| < 2**53.

def planes16(mat):
    """Split an integer matrix into balanced base 2**16 digit planes."""
    a = np.array(mat, dtype=object)
    if a.ndim != 2:
        raise ValueError("need a 2d matrix")
    planes = []
    while True:
        digit = ((a + 32768) & 65535) - 32768
        planes.append(digit.astype(np.int64))
        a = (a - digit) >> 16
        if not a.any():
            break
    return planes


def planes_to_object(planes):
    """Recombine digit planes into a matrix of Python ints."""
    acc = np.zeros(planes[0].shape, dtype=object)
    for p in reversed(planes):
        acc = acc * 65536 + p.astype(object)
    return acc


def planes_matmul_T(aplanes, bplanes):
    """Exact A.T @ B for matrices given as digit planes.

    Each pairwise plane product runs as one float64 GEMM; the inner
    dimension times the shorter plane count must stay below 2**23 so
    every accumulated entry fits exactly in a float64.
    """
    n, ra = aplanes[0].shape
    nb, rb = bplanes[0].shape
    if nb != n:
        raise ValueError("inner dimensions differ")
    la, lb = len(aplanes), len(bplanes)
    if n * min(la, lb) > (1 << 23):
        raise ValueError("plane product too large for exact float64")
    af = [p.astype(np.float64) for p in aplanes]
    bf = [p.astype(np.float64) for p in bplanes]
    acc = [np.zeros((ra, rb)) for _ in range(la + lb - 1)]
    for i, ai in enumerate(af):
        for j, bj in enumerate(bf):
            acc[i + j] += ai.T @ bj
    out = []
    for p in acc:
        if p.size and np.abs(p).max() >= 2.0 ** 53:
            raise ArithmeticError("float64 plane accumulation overflowed")
        out.append(p.astype(np.int64))
    return out


def fold_planes_mod(planes, q):
    """Reduce a plane-coded matrix modulo q (q prime, 2**16 < q < 2**46)."""
    assert (1 << 16) < q < (1 << 46)
    acc = np.zeros(planes[0].shape, dtype=np.int64)
    for p in reversed(planes):
        acc = (acc * 65536 + p) % q
    return acc


def planes_trace(planes):
    """Exact trace of a plane-coded square matrix."""
    n = planes[0].shape[0]
    assert planes[0].shape[1] == n and n <= 512
    tot = 0
    for p in reversed(planes):
        tot = tot * 65536 + int(np.trace(p))
    return tot


# ---------------------------------------------------------------------------
# characteristic polynomials

def berkowitz_charpoly(mat):
    """Characteristic polynomial by the Samuelson-Berkowitz recursion.

    Division free, so it works verbatim over ints and Fractions.
    Returns descending coefficients [1, c1, ..., cn].
    """
    rows = [list(r) for r in mat]
    n = len(rows)
    if n == 0:
        return [1]
    v = [1, -rows[0][0]]
    for r in range(2, n + 1):
        arr = rows[r - 1][r - 1]
        rvec = rows[r - 1][: r - 1]
        w = [rows[i][r - 1] for i in range(r - 1)]
        col = [1, -arr]
        for j in range(r - 1):
            col.append(-sum(rvec[i] * w[i] for i in range(r - 1)))
            if j < r - 2:
                w = [
                    sum(rows[i][t] * w[t] for t in range(r - 1))
                    for i in range(r - 1)
                ]
        vnew = []
        for i in range(r + 1):
            s = 0
            for j in range(max(0, i - r), min(i, r - 1) + 1):
                s += col[i - j] * v[j]
            vnew.append(s)
        v = vnew
    return v


def prime_cap(dim):
    """Largest modulus size keeping d*q*q inside int64 for Hessenberg work."""
    return isqrt((1 << 62) // max(dim, 1))


def hessenberg_charpoly_mod(mat, q):
    """Characteristic polynomial of an integer matrix modulo a prime q.

    Entries must already be reduced into [0, q) and q must not exceed
    prime_cap(dim).  Returns descending coefficients [1, c1, ..., cd]
    as Python ints in [0, q).
    """
    a = np.array(mat, dtype=np.int64) % q
    d = a.shape[0]
    if d == 0:
        return [1]
    assert q <= prime_cap(d)
    for m in range(1, d):
        col = a[m:, m - 1]
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        i = m + int(nz[0])
        if i != m:
            a[[m, i], :] = a[[i, m], :]
            a[:, [m, i]] = a[:, [i, m]]
        if m + 1 < d:
            inv = pow(int(a[m, m - 1]), q - 2, q)
            t = (a[m + 1 :, m - 1] * inv) % q
            a[m + 1 :, :] = (a[m + 1 :, :] - t[:, None] * a[m, :]) % q
            a[:, m] = (a[:, m] + a[:, m + 1 :] @ t) % q
    # expand principal minors of the Hessenberg form
    one = np.ones(1, dtype=np.int64)
    polys = [one.copy()]
    sp = np.zeros(0, dtype=np.int64)
    sub = a.diagonal(-1).copy() if d > 1 else np.zeros(0, dtype=np.int64)
    for j in range(d):
        pj = polys[j]
        newp = np.zeros(j + 2, dtype=np.int64)
        newp[: j + 1] = pj
        newp[1:] = (newp[1:] - a[j, j] * pj) % q
        if j:
            sp = (sub[j - 1] * np.concatenate((one, sp))) % q
            w = (a[j - 1 :: -1, j] * sp) % q
            for t in range(1, j + 1):
                if sp[t - 1] == 0:
                    break
                wt = int(w[t - 1])
                if wt:
                    newp[t + 1 :] = (newp[t + 1 :] - wt * polys[j - t]) % q
        polys.append(newp)
    return [int(c) for c in polys[d]]


def crt_balanced(residues, moduli):
    """Combine residues into the representative in (-M/2, M/2]."""
    x, m = 0, 1
    for r, q in zip(residues, moduli):
        r = int(r) % q
        inv = pow(m % q, -1, q)
        x = x + m * (((r - x) * inv) % q)
        m *= q
    x %= m
    if 2 * x > m:
        x -= m
    return x


def _crt_vec(polys, primes):
    ncoef = len(polys[0])
    return [crt_balanced([p[i] for p in polys], primes) for i in range(ncoef)]


def multimodular_charpoly(fold_mod, dim, log2_bound):
    """Exact charpoly of a matrix only available modulo primes.

    fold_mod(q) must return the matrix reduced mod q as int64, or None
    when q is unusable.  Primes are accumulated until their product
    clears 2**(log2_bound + 2), then two extra primes double-check that
    the balanced CRT lift has stabilized.
    """
    if dim == 0:
        return [1]
    cap = prime_cap(dim)
    if cap <= (1 << 16):
        raise ValueError("dimension too large for int64 modular kernels")
    need = log2_bound + 2.0
    primes, polys = [], []
    got = 0.0
    extra = 0
    misses = 0
    q = cap + 2
    while got < need or extra < 2:
        q = prev_prime(q - 1)
        if q <= (1 << 16):
            raise RuntimeError("ran out of usable word-size primes")
        m = fold_mod(q)
        if m is None:
            misses += 1
            if misses > 200:
                raise RuntimeError("modulus rejected too many primes")
            continue
        polys.append(hessenberg_charpoly_mod(m, q))
        primes.append(q)
        if got < need:
            got += log2(q)
        else:
            extra += 1
    full = _crt_vec(polys, primes)
    check = _crt_vec(polys[:-2], primes[:-2])
    if full != check:
        raise ArithmeticError("charpoly residues failed to stabilize")
    for c in full:
        if c and abs(c).bit_length() - 1 > log2_bound:
            raise ArithmeticError("charpoly coefficient exceeded its bound")
    assert full[0] == 1
    return full


def divide_linear(coeffs, root):
    """Divide a monic polynomial (descending coefficients) by (x - root).

    Raises ArithmeticError unless the division is exact.
    """
    if len(coeffs) < 2:
        raise ValueError("polynomial has no linear factor to remove")
    out = [coeffs[0]]
    for c in coeffs[1:-1]:
        out.append(c + root * out[-1])
    if coeffs[-1] + root * out[-1] != 0:
        raise ArithmeticError("linear factor does not divide")
    return out


def divide_monic(coeffs, divisor):
    """Exact quotient of two monic polynomials in descending coefficients.

    Returns None when the division leaves a remainder.
    """
    if not divisor or divisor[0] != 1:
        raise ValueError("divisor must be monic")
    dd = len(divisor) - 1
    if dd == 0:
        return list(coeffs)
    if len(coeffs) - 1 < dd:
        return None
    rem = list(coeffs)
    cut = len(coeffs) - dd
    for i in range(cut):
        c = rem[i]
        if c:
            for j in range(1, dd + 1):
                rem[i + j] -= c * divisor[j]
    if any(rem[cut:]):
        return None
    return rem[:cut]


# ---------------------------------------------------------------------------
# sparse integer elimination

def _strip_content(row):
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            break
    if g > 1:
        for c in row:
            row[c] //= g
    if row[min(row)] < 0:
        for c in row:
            row[c] = -row[c]
    return row


class SparseElimination:
    """Incremental exact row reduction of sparse integer relations.

    Arriving rows are reduced against stored pivots before insertion.
    A stored row may still mention pivot columns claimed later, but
    never earlier ones, so reduction always makes progress and back
    substitution can walk the stored rows newest first.
    """

    def __init__(self, ncols):
        self.ncols = ncols
        self._rows = []          # (pivot_col, row_dict) in insertion order
        self._pivot_time = {}    # pivot_col -> insertion index

    @property
    def rank(self):
        return len(self._rows)

    def add_relation(self, rel):
        """Reduce one relation; returns True if it added a new pivot."""
        items = rel.items() if isinstance(rel, dict) else rel
        row = {}
        for c, v in items:
            if v:
                row[c] = row.get(c, 0) + int(v)
        row = {c: v for c, v in row.items() if v}
        row = self._reduce(row)
        if not row:
            return False
        pc = min(row, key=lambda c: (abs(row[c]) != 1, abs(row[c]), c))
        self._pivot_time[pc] = len(self._rows)
        self._rows.append((pc, row))
        return True

    def _reduce(self, row):
        pt = self._pivot_time
        while row:
            best_t = None
            best_c = -1
            for c in row:
                t = pt.get(c)
                if t is not None and (best_t is None or t < best_t):
                    best_t, best_c = t, c
            if best_t is None:
                break
            prow = self._rows[best_t][1]
            a, b = row[best_c], prow[best_c]
            g = gcd(a, b)
            ma, mp = b // g, a // g
            if ma != 1:
                for c in row:
                    row[c] *= ma
            for c, v in prow.items():
                nv = row.get(c, 0) - mp * v
                if nv:
                    row[c] = nv
                else:
                    row.pop(c, None)
            if row:
                row = _strip_content(row)
        return row

    def free_cols(self):
        return [c for c in range(self.ncols) if c not in self._pivot_time]

    def back_substitute(self):
        """Express every column over the free columns.

        Returns (nums, dens) where column c equals nums[c] / dens[c]
        as an integer vector over free_cols(), dens[c] > 0.
        """
        free = self.free_cols()
        fidx = {c: i for i, c in enumerate(free)}
        nf = len(free)
        nums = [None] * self.ncols
        dens = [1] * self.ncols
        for c in free:
            vec = [0] * nf
            vec[fidx[c]] = 1
            nums[c] = vec
        for pc, row in reversed(self._rows):
            others = [(c, v) for c, v in row.items() if c != pc]
            lcm_d = 1
            for c, _ in others:
                dc = dens[c]
                lcm_d = lcm_d // gcd(lcm_d, dc) * dc
            acc = [0] * nf
            for c, coef in others:
                if nums[c] is None:
                    raise AssertionError("pivot order violated")
                m = -coef * (lcm_d // dens[c])
                vec = nums[c]
                for i in range(nf):
                    x = vec[i]
                    if x:
                        acc[i] += m * x
            den = row[pc] * lcm_d
            g = abs(den)
            for x in acc:
                g = gcd(g, x)
                if g == 1:
                    break
            if den < 0:
                g = -g
            if g != 1:
                acc = [x // g for x in acc]
                den //= g
            nums[pc] = acc
            dens[pc] = den
        return nums, dens


# ---------------------------------------------------------------------------
# small dense solvers over Fractions

def frac_rref(mat):
    """Reduced row echelon form over Fractions: (rows, pivot_cols)."""
    rows = [[Fraction(x) for x in r] for r in mat]
    if not rows:
        return [], []
    ncols = len(rows[0])
    piv = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        piv.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], piv


def frac_rank(mat):
    return len(frac_rref(mat)[0])


def frac_kernel(mat, ncols):
    """Basis of the right kernel of mat, as Fraction vectors."""
    rows, piv = frac_rref(mat)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        vec = [Fraction(0)] * ncols
        vec[f] = Fraction(1)
        for r, p in enumerate(piv):
            vec[p] = -rows[r][f]
        basis.append(vec)
    return basis


def frac_solve(amat, bmat):
    """Solve A X = B for square nonsingular A over Fractions."""
    n = len(amat)
    m = len(bmat[0]) if n else 0
    aug = [
        [Fraction(amat[i][j]) for j in range(n)]
        + [Fraction(bmat[i][j]) for j in range(m)]
        for i in range(n)
    ]
    for c in range(n):
        p = next((i for i in range(c, n) if aug[i][c]), None)
        if p is None:
            raise ValueError("singular system")
        aug[c], aug[p] = aug[p], aug[c]
        inv = 1 / aug[c][c]
        aug[c] = [x * inv for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c]:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    return [row[n:] for row in aug]
