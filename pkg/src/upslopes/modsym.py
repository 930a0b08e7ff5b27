"""Modular symbols of even weight for Gamma0(N), star-plus quotient.

The space is presented on Manin symbols (i, (c:d)) with i the exponent
of X in a degree k-2 monomial and (c:d) a point of P^1(Z/N). Two-term
relations (the sigma involution and the star involution at sign +1)
are folded with a signed union-find; the three-term tau relations then
go through exact sparse elimination, leaving a basis of the plus
quotient and an integer matrix expressing every symbol over it.

The cuspidal part is never materialized for big spaces. Hecke traces
come from the diagonal of the quotient action, and characteristic
polynomials come out multimodular on the full plus quotient, after
which the boundary contribution is peeled off one exact linear factor
at a time.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, gcd, lcm, log2

import numpy as np

from . import cache
from .linalg import (
    SparseElimination,
    berkowitz_charpoly,
    divide_linear,
    divide_monic,
    fold_planes_mod,
    frac_kernel,
    frac_rank,
    frac_solve,
    multimodular_charpoly,
    planes16,
    planes_matmul_T,
    planes_to_object,
    planes_trace,
)
from .ntheory import (
    EngineInfeasibleError,
    character_pair_data,
    dim_cusp_forms,
    divisors,
    is_prime,
    is_squarefree,
)

__all__ = [
    "ModularSymbolSpace",
    "cusp_class_count",
    "cusp_equiv",
    "get_space",
    "hecke_charpoly",
    "hecke_matrix",
    "hecke_trace",
    "heilbronn_merel",
    "p1_list",
    "p1_normalize",
    "sl2_lift",
]


# ---------------------------------------------------------------------------
# P^1(Z/N)

def p1_normalize(N, u, v):
    """Canonical representative of (u:v) in P^1(Z/N).

    Returns (0, 0) when gcd(u, v, N) > 1, which is not a point.
    """
    if N == 1:
        return 0, 1
    u %= N
    v %= N
    if u == 0:
        return (0, 1) if gcd(v, N) == 1 else (0, 0)
    g = gcd(u, N)
    if gcd(g, v) > 1:
        return 0, 0
    ng = N // g
    s = pow((u // g) % ng, -1, ng)
    while gcd(s, N) != 1:
        # lift s to a unit mod N; adding N/g keeps s*(u/g) = 1 mod N/g
        s += ng
    v = (s * v) % N
    if g > 1:
        # remaining scaling freedom: units congruent to 1 mod N/g
        vmin = v
        for j in range(1, g):
            t = 1 + j * ng
            if gcd(t, N) == 1:
                w = (v * t) % N
                if w < vmin:
                    vmin = w
        v = vmin
    return g, v


@lru_cache(maxsize=64)
def p1_list(N):
    """All points of P^1(Z/N) in canonical form, sorted."""
    if N == 1:
        return ((0, 1),)
    pts = set()
    for g in divisors(N):
        for v in range(N):
            p = p1_normalize(N, g, v)
            if p != (0, 0):
                pts.add(p)
    return tuple(sorted(pts))


def _xgcd(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def sl2_lift(N, u, v):
    """A matrix (a, b, c, d) in SL_2(Z) whose bottom row is (u, v) mod N."""
    if N == 1:
        return 1, 0, 0, 1
    c, d = u % N, v % N
    for t in range(max(c, 1) + 1):
        if gcd(c, d + t * N) == 1:
            d += t * N
            break
    else:
        raise ValueError(f"({u}:{v}) is not a point of P^1(Z/{N})")
    g, x, y = _xgcd(d, c)
    assert g == 1
    return x, -y, c, d


# ---------------------------------------------------------------------------
# cusps of Gamma0(N)

def _cusp_s(p, q):
    if q == 0:
        return 1
    if q == 1:
        return 0
    return pow(p % q, -1, q)


def cusp_equiv(N, cusp1, cusp2):
    """Whether two cusps p/q (gcd(p, q) = 1, q >= 0) are Gamma0(N)-equivalent."""
    p1, q1 = cusp1
    p2, q2 = cusp2
    s1, s2 = _cusp_s(p1, q1), _cusp_s(p2, q2)
    g = gcd(q1 * q2, N)
    return (s1 * q2 - s2 * q1) % g == 0


class _CuspClasses:
    """Incremental cusp classifier, optionally folding r with -r."""

    def __init__(self, N, star):
        self.N = N
        self.star = star
        self.reps = []

    def index(self, p, q):
        if q < 0:
            p, q = -p, -q
        if q == 0:
            p = 1
        cands = [(p, q)]
        if self.star and q > 0:
            cands.append((-p, q))
        for idx, rep in enumerate(self.reps):
            for cand in cands:
                if cusp_equiv(self.N, rep, cand):
                    return idx
        self.reps.append((p, q))
        return len(self.reps) - 1


def cusp_class_count(N):
    """Number of cusps of Gamma0(N)."""
    ci = _CuspClasses(N, star=False)
    for u, v in p1_list(N):
        a, b, c, d = sl2_lift(N, u, v)
        ci.index(a, c)
        ci.index(b, d)
    return len(ci.reps)


# ---------------------------------------------------------------------------
# Heilbronn matrices

@lru_cache(maxsize=32)
def heilbronn_merel(ell):
    """Matrix family computing T_ell on Manin symbols, ell prime."""
    assert is_prime(ell)
    mats = []
    for a in range(1, ell + 1):
        for d in range(1, ell + 1):
            m = a * d - ell
            if m < 0:
                continue
            if m == 0:
                for c in range(d):
                    mats.append((a, 0, c, d))
                for b in range(1, a):
                    mats.append((a, b, 0, d))
            else:
                for b in divisors(m):
                    if b >= a:
                        continue
                    c = m // b
                    if c < d:
                        mats.append((a, b, c, d))
    return tuple(mats)


def _action_table(mat, kk):
    """Row i: coefficients of (aX+bY)^i (cX+dY)^(kk-i) on X^j Y^(kk-j)."""
    a, b, c, d = mat
    pa = [[1]]
    for i in range(kk):
        prev = pa[-1]
        cur = [0] * (i + 2)
        for j, t in enumerate(prev):
            if t:
                cur[j] += t * b
                cur[j + 1] += t * a
        pa.append(cur)
    pc = [[1]]
    for i in range(kk):
        prev = pc[-1]
        cur = [0] * (i + 2)
        for j, t in enumerate(prev):
            if t:
                cur[j] += t * d
                cur[j + 1] += t * c
        pc.append(cur)
    table = []
    for i in range(kk + 1):
        out = [0] * (kk + 1)
        for j1, t1 in enumerate(pa[i]):
            if t1:
                for j2, t2 in enumerate(pc[kk - i]):
                    if t2:
                        out[j1 + j2] += t1 * t2
        table.append(out)
    return table


_SIGMA = (0, -1, 1, 0)
_TAU = (0, -1, 1, -1)
_TAU2 = (-1, 1, -1, 0)


# ---------------------------------------------------------------------------
# the space

class ModularSymbolSpace:
    """Star-plus quotient of weight k modular symbols for Gamma0(N)."""

    def __init__(self, N, k):
        if k < 2 or k % 2:
            raise ValueError("weight must be even and at least 2")
        self.N = int(N)
        self.k = int(k)
        self.kk = self.k - 2
        self.pts = p1_list(self.N)
        self.npts = len(self.pts)
        self.pt_index = {p: i for i, p in enumerate(self.pts)}
        self.nsym = (self.kk + 1) * self.npts
        self._fold_involutions()
        self._eliminate_tau()
        self._boundary()
        self._products = {}

    # -- signed union-find over symbols --------------------------------

    def _find(self, x):
        parent, sign = self._parent, self._sign
        path = []
        r = x
        while parent[r] != r:
            path.append(r)
            r = parent[r]
        s = 1
        for y in reversed(path):
            s *= sign[y]
            parent[y] = r
            sign[y] = s
        if path:
            return r, sign[x]
        return r, 1

    def _union(self, x, y, s):
        # impose val(x) = s * val(y)
        rx, sx = self._find(x)
        ry, sy = self._find(y)
        if rx == ry:
            if sx != s * sy:
                self._dead[rx] = True
            return
        t = sx * s * sy
        if self._rank[rx] < self._rank[ry]:
            self._parent[rx] = ry
            self._sign[rx] = t
            self._dead[ry] = self._dead[ry] or self._dead[rx]
        else:
            self._parent[ry] = rx
            self._sign[ry] = t
            self._dead[rx] = self._dead[rx] or self._dead[ry]
            if self._rank[rx] == self._rank[ry]:
                self._rank[rx] += 1

    def _fold_involutions(self):
        n = self.nsym
        self._parent = list(range(n))
        self._sign = [1] * n
        self._rank = [0] * n
        self._dead = [False] * n
        npts, kk = self.npts, self.kk
        for p, (u, v) in enumerate(self.pts):
            ps = self.pt_index[p1_normalize(self.N, v, -u)]
            pe = self.pt_index[p1_normalize(self.N, -u, v)]
            for i in range(kk + 1):
                x = i * npts + p
                si = 1 if i % 2 == 0 else -1
                # x + x.sigma = 0 and x = x.star
                self._union(x, (kk - i) * npts + ps, -si)
                self._union(x, i * npts + pe, si)
        gens = []
        for x in range(self.nsym):
            r, _ = self._find(x)
            if r == x and not self._dead[x]:
                gens.append(x)
        self.gens = gens
        self.ngens = len(gens)
        self._gen_of = {x: g for g, x in enumerate(gens)}

    def _project(self, row, i, pt, coef):
        q = p1_normalize(self.N, *pt)
        r, s = self._find(i * self.npts + self.pt_index[q])
        if self._dead[r]:
            return
        g = self._gen_of[r]
        c = row.get(g, 0) + (coef if s > 0 else -coef)
        if c:
            row[g] = c
        else:
            row.pop(g, None)

    def _tau_row(self, x):
        i, p = divmod(x, self.npts)
        u, v = self.pts[p]
        row = {}
        self._project(row, i, (u, v), 1)
        for j, c in enumerate(self._tau_tab[i]):
            if c:
                self._project(row, j, (v, -u - v), c)
        for j, c in enumerate(self._tau2_tab[i]):
            if c:
                self._project(row, j, (-u - v, u), c)
        return row

    def _eliminate_tau(self):
        self._tau_tab = _action_table(_TAU, self.kk)
        self._tau2_tab = _action_table(_TAU2, self.kk)
        seen = set()
        rows = []
        for x in range(self.nsym):
            row = self._tau_row(x)
            if not row:
                continue
            key = tuple(sorted(row.items()))
            if key[0][1] < 0:
                key = tuple((c, -v) for c, v in key)
            if key in seen:
                continue
            seen.add(key)
            rows.append(key)
        rows.sort(key=lambda r: (len(r), r))
        elim = SparseElimination(self.ngens)
        for key in rows:
            elim.add_relation(key)
        self.free = elim.free_cols()
        self.dim_plus = len(self.free)
        nums, dens = elim.back_substitute()
        self._r_nums = nums
        self._r_dens = dens
        self.den_lcm = lcm(*dens) if dens else 1
        self._r_planes = planes16(nums) if self.ngens else [np.zeros((0, 0), np.int64)]

    def _boundary(self):
        # the symbol (i, g) is the g-translate of X^i Y^(kk-i) {0, oo},
        # so its boundary evaluates the monomial at (1,0) and (0,1):
        # only the extreme exponents reach the cusps
        kk = self.kk
        ci = _CuspClasses(self.N, star=True)
        rows = []
        for f in self.free:
            x = self.gens[f]
            i, p = divmod(x, self.npts)
            u, v = self.pts[p]
            a, b, c, d = sl2_lift(self.N, u, v)
            row = {}
            if i == kk:
                ia = ci.index(a, c)
                row[ia] = row.get(ia, 0) + 1
            if i == 0:
                ib = ci.index(b, d)
                row[ib] = row.get(ib, 0) - 1
            rows.append(row)
        ncls = len(ci.reps)
        self.boundary_rows = [[r.get(c, 0) for c in range(ncls)] for r in rows]
        self.e_plus = frac_rank(self.boundary_rows) if self.free else 0
        self.dim_cusp = self.dim_plus - self.e_plus
        want = dim_cusp_forms(self.N, self.k)
        if self.dim_cusp != want:
            raise ArithmeticError(
                f"plus-quotient rank check failed at N={self.N} k={self.k}: "
                f"{self.dim_plus} - {self.e_plus} != {want}"
            )

    # -- Hecke ----------------------------------------------------------

    def eisenstein_eigenvalue(self, ell):
        return 1 + ell ** (self.k - 1)

    def _hecke_columns(self, ell):
        """T_ell of every basis generator, as integer columns over all gens."""
        mats = heilbronn_merel(ell)
        tables = [_action_table(h, self.kk) for h in mats]
        npts = self.npts
        cols = [[0] * self.dim_plus for _ in range(self.ngens)]
        for bi, f in enumerate(self.free):
            x = self.gens[f]
            i, p = divmod(x, npts)
            u, v = self.pts[p]
            for (a, b, c, d), tab in zip(mats, tables):
                q = p1_normalize(self.N, u * a + v * c, u * b + v * d)
                pq = self.pt_index[q]
                row = tab[i]
                for j in range(self.kk + 1):
                    coef = row[j]
                    if coef:
                        r, s = self._find(j * npts + pq)
                        if self._dead[r]:
                            continue
                        g = self._gen_of[r]
                        cols[g][bi] += coef if s > 0 else -coef
        return cols

    def hecke_product(self, ell):
        """Plane-coded numerator of T_ell on the plus quotient basis.

        The true matrix is the recombined product divided by den_lcm.
        """
        if ell in self._products:
            return self._products[ell]
        if self.N % ell == 0:
            raise EngineInfeasibleError("only T_ell with ell coprime to N")
        cols = self._hecke_columns(ell)
        D = self.den_lcm
        scaled = [
            [v * (D // self._r_dens[g]) for v in cols[g]] for g in range(self.ngens)
        ]
        prod = planes_matmul_T(self._r_planes, planes16(scaled))
        self._products[ell] = prod
        return prod

    def hecke_trace_plus(self, ell):
        if self.dim_plus == 0:
            return 0
        num = planes_trace(self.hecke_product(ell))
        q, r = divmod(num, self.den_lcm)
        assert r == 0, "trace on the plus quotient must be integral"
        return q

    def hecke_trace_cusp(self, ell):
        return self.hecke_trace_plus(ell) - self.e_plus * self.eisenstein_eigenvalue(ell)

    def _charpoly_log2_bound(self, ell):
        lg = log2(ell)
        lg_cusp = 1.0 + 0.5 * (self.k - 1) * lg
        lg_eis = (self.k - 1) * lg + 1.0
        d = self.dim_plus
        best = 1.0
        for i in range(d + 1):
            m = min(i, self.e_plus)
            val = comb(d, i).bit_length() + (i - m) * lg_cusp + m * lg_eis
            if val > best:
                best = val
        return best

    def hecke_charpoly_plus(self, ell):
        if self.dim_plus == 0:
            return [1]
        prod = self.hecke_product(ell)
        D = self.den_lcm

        def fold(q):
            if D % q == 0:
                return None
            m = fold_planes_mod(prod, q)
            return (m * pow(D % q, q - 2, q)) % q

        return multimodular_charpoly(fold, self.dim_plus, self._charpoly_log2_bound(ell))

    def _eisenstein_blocks(self, ell):
        """Integer factors that can appear in the Eisenstein part at ell.

        One linear or quadratic block per conjugate pair of primitive
        characters with square conductor dividing N; eigenvalues are
        chi(ell) + conj(chi)(ell) * ell^(k-1).
        """
        L = ell ** (self.k - 1)
        blocks = set()
        f = 1
        while f * f <= self.N:
            if self.N % (f * f) == 0:
                for data in character_pair_data(f, ell):
                    if data[0] == "real":
                        blocks.add((1, -data[1] * (1 + L)))
                    else:
                        _, c1, c2 = data
                        blocks.add((1, -c1 * (1 + L), 1 + L * L + c2 * L))
            f += 1
        return sorted(blocks, key=lambda b: (len(b), b))

    def hecke_charpoly_cusp(self, ell):
        """Exact charpoly of T_ell on the cuspidal part, descending coeffs.

        Strips the Eisenstein factors off the plus-quotient charpoly by
        trial division. At weight 2 on a non-squarefree level, and whenever
        the blocks cannot account for the whole boundary rank, the dense
        matrix route decides instead; a wrong strip cannot pass silently
        since cusp eigenvalues are strictly smaller than Eisenstein ones
        for weights 4 and up.
        """
        poly = self.hecke_charpoly_plus(ell)
        if self.e_plus:
            if self.k == 2 and not is_squarefree(self.N):
                return self._charpoly_cusp_via_matrix(ell)
            try:
                blocks = self._eisenstein_blocks(ell)
            except EngineInfeasibleError:
                return self._charpoly_cusp_via_matrix(ell)
            remaining = self.e_plus
            for block in blocks:
                deg = len(block) - 1
                while remaining >= deg:
                    quo = divide_monic(poly, block)
                    if quo is None:
                        break
                    poly = quo
                    remaining -= deg
            if remaining:
                return self._charpoly_cusp_via_matrix(ell)
        assert len(poly) == self.dim_cusp + 1
        return poly

    def _charpoly_cusp_via_matrix(self, ell):
        amat = self.hecke_matrix_cusp(ell)
        coeffs = berkowitz_charpoly(amat)
        out = []
        for c in coeffs:
            c = Fraction(c)
            assert c.denominator == 1, "cusp charpoly must be integral"
            out.append(int(c))
        return out

    def hecke_matrix_cusp(self, ell):
        """T_ell on an explicit basis of the cuspidal part, as Fractions.

        Exact dense work, so this path is fenced to small spaces; the
        charpoly and trace routes have no such limit.
        """
        if self.dim_plus > 160:
            raise EngineInfeasibleError(
                "dense cuspidal matrix only materialized for small spaces"
            )
        nf = self.dim_plus
        if nf == 0:
            return []
        ncls = len(self.boundary_rows[0]) if self.boundary_rows else 0
        bt = [[self.boundary_rows[f][c] for f in range(nf)] for c in range(ncls)]
        kern = frac_kernel(bt, nf)
        assert len(kern) == self.dim_cusp
        if not kern:
            return []
        tnum = planes_to_object(self.hecke_product(ell))
        D = self.den_lcm
        tc = [
            [
                sum(Fraction(int(tnum[f, g]), D) * kern[j][g] for g in range(nf))
                for j in range(self.dim_cusp)
            ]
            for f in range(nf)
        ]
        cmat = [[kern[j][f] for j in range(self.dim_cusp)] for f in range(nf)]
        gram = [
            [sum(cmat[f][i] * cmat[f][j] for f in range(nf)) for j in range(self.dim_cusp)]
            for i in range(self.dim_cusp)
        ]
        rhs = [
            [sum(cmat[f][i] * tc[f][j] for f in range(nf)) for j in range(self.dim_cusp)]
            for i in range(self.dim_cusp)
        ]
        amat = frac_solve(gram, rhs)
        for f in range(nf):
            for j in range(self.dim_cusp):
                lhs = sum(cmat[f][i] * amat[i][j] for i in range(self.dim_cusp))
                if lhs != tc[f][j]:
                    raise ArithmeticError("cusp space is not T_ell stable")
        return amat


@lru_cache(maxsize=4)
def get_space(N, k):
    return ModularSymbolSpace(N, k)


# ---------------------------------------------------------------------------
# module level API

def hecke_trace(N, k, ell):
    """Trace of T_ell on the cusp forms S_k(Gamma0(N)) via symbols."""
    return get_space(N, k).hecke_trace_cusp(ell)


def hecke_charpoly(N, k, ell):
    """Exact charpoly of T_ell on S_k(Gamma0(N)), cached on disk."""
    params = {"N": int(N), "k": int(k), "ell": int(ell)}
    hit = cache.get("cusp-charpoly", params)
    if hit is not None:
        return [int(s) for s in hit]
    poly = get_space(N, k).hecke_charpoly_cusp(ell)
    cache.put("cusp-charpoly", params, [str(c) for c in poly])
    return poly


def hecke_matrix(N, k, ell):
    """Matrix of T_ell on S_k(Gamma0(N)) over an exact cuspidal basis."""
    return get_space(N, k).hecke_matrix_cusp(ell)
