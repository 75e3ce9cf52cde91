"""Linear algebra and polynomial kernels over F_p.

Matrices are numpy arrays carrying residues in [0, p).  Two backends share
one interface: int64 arrays for p below _SMALL_P (products stay inside
int64), object arrays of Python ints for larger p, since candidate primes
coming out of determinant sieves can have hundreds of digits.
"""

from __future__ import annotations

import random

import numpy as np

__all__ = [
    "SMALL_P",
    "fp_array",
    "fp_identity",
    "mat_mul_mod",
    "mat_pow_mod",
    "mat_inv_mod",
    "rref_mod",
    "rank_mod",
    "det_mod",
    "right_nullspace_mod",
    "charpoly_mod",
    "poly_roots_mod",
    "FpEchelon",
]

# With p < 2**20, dot products of length up to ~2**22 fit in int64.
SMALL_P = 1 << 20


def _dtype_for(p: int):
    return np.int64 if p < SMALL_P else object


def fp_array(rows, p: int) -> np.ndarray:
    """Build a reduced residue matrix from any int-like nested sequence."""
    if p < SMALL_P:
        a = np.array([[int(x) % p for x in r] for r in rows], dtype=np.int64)
    else:
        a = np.empty((len(rows), len(rows[0])), dtype=object)
        for i, r in enumerate(rows):
            for j, x in enumerate(r):
                a[i, j] = int(x) % p
    return a


def fp_identity(n: int, p: int) -> np.ndarray:
    a = np.zeros((n, n), dtype=_dtype_for(p))
    if _dtype_for(p) is object:
        a[:] = 0
    for i in range(n):
        a[i, i] = 1 % p
    return a


def mat_mul_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    return (a @ b) % p


def mat_pow_mod(a: np.ndarray, e: int, p: int) -> np.ndarray:
    n = a.shape[0]
    result = fp_identity(n, p)
    base = a % p
    while e:
        if e & 1:
            result = (result @ base) % p
        e >>= 1
        if e:
            base = (base @ base) % p
    return result


def _inv_scalar(x: int, p: int) -> int:
    return pow(int(x), -1, p)


def rref_mod(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form; returns (rref rows truncated to rank, pivot cols)."""
    a = (np.array(a, dtype=_dtype_for(p)) % p).copy()
    nr, nc = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(nc):
        if r == nr:
            break
        col = a[r:, c]
        nz = np.nonzero(col)[0]
        if len(nz) == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        a[r] = a[r] * _inv_scalar(a[r, c], p) % p
        rest = a[:, c].copy()
        rest[r] = 0
        if np.any(rest):
            a = (a - np.outer(rest, a[r])) % p
        pivots.append(c)
        r += 1
    return a[:r], pivots


def rank_mod(a: np.ndarray, p: int) -> int:
    return len(rref_mod(a, p)[1])


def det_mod(a: np.ndarray, p: int) -> int:
    a = (np.array(a, dtype=_dtype_for(p)) % p).copy()
    n = a.shape[0]
    det = 1 % p
    for c in range(n):
        nz = np.nonzero(a[c:, c])[0]
        if len(nz) == 0:
            return 0
        i = c + int(nz[0])
        if i != c:
            a[[c, i]] = a[[i, c]]
            det = (-det) % p
        piv = int(a[c, c])
        det = det * piv % p
        inv = _inv_scalar(piv, p)
        sub = a[c + 1 :, c]
        nzr = np.nonzero(sub)[0]
        if len(nzr):
            factors = sub[nzr] * inv % p
            a[c + 1 + nzr, c:] = (a[c + 1 + nzr, c:] - np.outer(factors, a[c, c:])) % p
    return int(det)


def mat_inv_mod(a: np.ndarray, p: int) -> np.ndarray:
    n = a.shape[0]
    aug = np.concatenate([a % p, fp_identity(n, p)], axis=1)
    r, pivots = rref_mod(aug, p)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix mod p")
    return r[:, n:]


def right_nullspace_mod(a: np.ndarray, p: int) -> np.ndarray:
    """Rows span {v : a v^T = 0 mod p}."""
    r, pivots = rref_mod(a, p)
    nc = a.shape[1]
    free = [c for c in range(nc) if c not in pivots]
    basis = np.zeros((len(free), nc), dtype=_dtype_for(p))
    if basis.dtype == object:
        basis[:] = 0
    for k, f in enumerate(free):
        basis[k, f] = 1
        for i, c in enumerate(pivots):
            basis[k, c] = (-int(r[i, f])) % p
    return basis


def charpoly_mod(a: np.ndarray, p: int) -> list[int]:
    """Characteristic polynomial mod p, ascending coefficients, monic.

    Hessenberg reduction followed by the leading-minor recurrence.
    """
    n = a.shape[0]
    h = [[int(x) % p for x in row] for row in a]
    # reduce to upper Hessenberg by similarity transformations
    for c in range(n - 2):
        piv = next((r for r in range(c + 1, n) if h[r][c] != 0), None)
        if piv is None:
            continue
        if piv != c + 1:
            h[c + 1], h[piv] = h[piv], h[c + 1]
            for r in range(n):
                h[r][c + 1], h[r][piv] = h[r][piv], h[r][c + 1]
        inv = _inv_scalar(h[c + 1][c], p)
        for r in range(c + 2, n):
            if h[r][c]:
                f = h[r][c] * inv % p
                row_r = h[r]
                row_s = h[c + 1]
                for j in range(n):
                    row_r[j] = (row_r[j] - f * row_s[j]) % p
                for i in range(n):
                    h[i][c + 1] = (h[i][c + 1] + f * h[i][r]) % p
    # charpoly recurrence on the Hessenberg form
    polys: list[list[int]] = [[1]]
    for m in range(1, n + 1):
        prev = polys[m - 1]
        cur = [0] + prev  # x * prev
        d = h[m - 1][m - 1]
        for i, coef in enumerate(prev):
            cur[i] = (cur[i] - d * coef) % p
        beta = 1
        for i in range(m - 1, 0, -1):
            beta = beta * h[i][i - 1] % p
            if beta == 0:
                break
            t = h[i - 1][m - 1] * beta % p
            if t:
                pi = polys[i - 1]
                for j, coef in enumerate(pi):
                    cur[j] = (cur[j] - t * coef) % p
        cur = [c % p for c in cur]
        polys.append(cur)
    return polys[n]


# -- polynomial arithmetic mod p (ascending coefficient lists) -----------------


def _ptrim(f: list[int]) -> list[int]:
    while f and f[-1] == 0:
        f.pop()
    return f


def _pmulmod(f: list[int], g: list[int], h: list[int], p: int) -> list[int]:
    """f*g mod (h, p); h monic."""
    out = [0] * (len(f) + len(g) - 1) if f and g else []
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                if b:
                    out[i + j] = (out[i + j] + a * b) % p
    return _prem(out, h, p)


def _prem(f: list[int], h: list[int], p: int) -> list[int]:
    f = list(f)
    dh = len(h) - 1
    while len(f) - 1 >= dh and f:
        lead = f[-1]
        if lead:
            shift = len(f) - 1 - dh
            for i in range(dh):
                f[shift + i] = (f[shift + i] - lead * h[i]) % p
        f.pop()
    return _ptrim(f)


def _pgcd(f: list[int], g: list[int], p: int) -> list[int]:
    f, g = _ptrim(list(f)), _ptrim(list(g))
    while g:
        if len(g) == 1:
            return [1]
        inv = _inv_scalar(g[-1], p)
        gm = [c * inv % p for c in g]
        f, g = gm, _prem(f, gm, p)
    if not f:
        return []
    inv = _inv_scalar(f[-1], p)
    return [c * inv % p for c in f]


def _xpow_mod(e: int, h: list[int], p: int) -> list[int]:
    """x^e mod (h, p)."""
    result = [1]
    base = _prem([0, 1], h, p)
    while e:
        if e & 1:
            result = _pmulmod(result, base, h, p)
        e >>= 1
        if e:
            base = _pmulmod(base, base, h, p)
    return result


def _peval(f: list[int], x: int, p: int) -> int:
    acc = 0
    for c in reversed(f):
        acc = (acc * x + c) % p
    return acc


def poly_roots_mod(f: list[int], p: int, seed: int = 0, max_roots: int | None = None) -> list[int]:
    """Roots in F_p of the polynomial f (ascending coefficients).

    Small p by direct evaluation; otherwise the distinct linear part
    gcd(x^p - x, f) is split by Cantor-Zassenhaus.
    """
    f = _ptrim([c % p for c in f])
    if len(f) <= 1:
        return []
    if p <= 1024:
        roots = [x for x in range(p) if _peval(f, x, p) == 0]
        return roots[:max_roots] if max_roots else roots
    inv = _inv_scalar(f[-1], p)
    f = [c * inv % p for c in f]
    xp = _xpow_mod(p, f, p)
    # x^p - x mod f
    g = list(xp)
    while len(g) < 2:
        g.append(0)
    g[1] = (g[1] - 1) % p
    g = _pgcd(_ptrim(g), f, p)
    if len(g) <= 1:
        return []
    rng = random.Random(f"roots|{seed}|{p}")
    roots: list[int] = []
    stack = [g]
    while stack:
        h = stack.pop()
        if len(h) == 2:
            roots.append((-h[0]) * _inv_scalar(h[1], p) % p)
            if max_roots and len(roots) >= max_roots:
                return roots
            continue
        # random split: gcd((x+a)^((p-1)/2) - 1, h)
        split = None
        for _ in range(40):
            a = rng.randrange(p)
            t = _xpowshift_mod((p - 1) // 2, a, h, p)
            t = list(t)
            if not t:
                t = [0]
            t[0] = (t[0] - 1) % p
            d = _pgcd(_ptrim(t), h, p)
            if 1 < len(d) < len(h):
                split = d
                break
        if split is None:
            continue  # give up on this factor; callers treat roots as best-effort
        quot = _pquo(h, split, p)
        stack.append(split)
        stack.append(quot)
    return roots


def _xpowshift_mod(e: int, a: int, h: list[int], p: int) -> list[int]:
    """(x+a)^e mod (h, p)."""
    result = [1]
    base = _prem([a, 1], h, p)
    while e:
        if e & 1:
            result = _pmulmod(result, base, h, p)
        e >>= 1
        if e:
            base = _pmulmod(base, base, h, p)
    return result


def _pquo(f: list[int], g: list[int], p: int) -> list[int]:
    """Quotient f // g mod p, assuming g monic after normalization."""
    inv = _inv_scalar(g[-1], p)
    g = [c * inv % p for c in g]
    f = list(f)
    q = [0] * (len(f) - len(g) + 1)
    dh = len(g) - 1
    while len(f) - 1 >= dh and f:
        lead = f[-1]
        shift = len(f) - 1 - dh
        if lead:
            q[shift] = lead  # g is monic here
            for i in range(dh):
                f[shift + i] = (f[shift + i] - lead * g[i]) % p
        f.pop()
    return _ptrim(q)


def _pderiv(f: list[int], p: int) -> list[int]:
    return _ptrim([c * i % p for i, c in enumerate(f)][1:])


def _pmul(f: list[int], g: list[int], p: int) -> list[int]:
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                if b:
                    out[i + j] = (out[i + j] + a * b) % p
    return _ptrim(out)


def _pmonic(f: list[int], p: int) -> list[int]:
    f = _ptrim(list(f))
    if not f or f[-1] == 1:
        return f
    inv = _inv_scalar(f[-1], p)
    return [c * inv % p for c in f]


def _pth_root(f: list[int], p: int) -> list[int]:
    # valid for coefficients in the prime field, where Frobenius is trivial
    return _ptrim([f[i] for i in range(0, len(f), p)])


def poly_squarefree_mod(f: list[int], p: int) -> list[tuple[list[int], int]]:
    """Squarefree decomposition mod p: pairwise coprime (g, e) with f = prod g^e."""
    out: list[tuple[list[int], int]] = []

    def rec(f: list[int], mult: int):
        f = _pmonic(f, p)
        if len(f) <= 1:
            return
        fd = _pderiv(f, p)
        if not fd:
            rec(_pth_root(f, p), mult * p)
            return
        c = _pgcd(f, fd, p)
        w = _pquo(f, c, p)
        i = 1
        while len(w) > 1:
            y = _pgcd(w, c, p)
            z = _pquo(w, y, p)
            if len(z) > 1:
                out.append((_pmonic(z, p), mult * i))
            w = y
            c = _pquo(c, y, p)
            i += 1
        if len(c) > 1:
            rec(_pth_root(c, p), mult * p)

    rec(list(f), 1)
    return out


def _ddf_mod(f: list[int], p: int) -> list[tuple[list[int], int]]:
    """Distinct-degree split of a squarefree monic f: (product, factor degree)."""
    out = []
    h = _prem([0, 1], f, p)  # x mod f
    d = 0
    while len(f) - 1 > 0:
        d += 1
        if 2 * d > len(f) - 1:
            out.append((f, len(f) - 1))
            break
        h = _ppow_frob(h, f, p)  # h <- h^p mod f
        diff = list(h)
        while len(diff) < 2:
            diff.append(0)
        diff[1] = (diff[1] - 1) % p
        g = _pgcd(_ptrim(diff), f, p)
        if len(g) > 1:
            out.append((g, d))
            f = _pmonic(_pquo(f, g, p), p)
            h = _prem(h, f, p)
    return out


def _ppow_frob(h: list[int], f: list[int], p: int) -> list[int]:
    """h^p mod (f, p) by square-and-multiply."""
    result = [1]
    base = list(h)
    e = p
    while e:
        if e & 1:
            result = _pmulmod(result, base, f, p)
        e >>= 1
        if e:
            base = _pmulmod(base, base, f, p)
    return result


def _edf_mod(f: list[int], d: int, p: int, rng: random.Random) -> list[list[int]]:
    """Equal-degree factorization: split monic squarefree f into irreducible
    factors, all of degree d (Cantor-Zassenhaus; trace map in characteristic 2)."""
    n = len(f) - 1
    if n == d:
        return [f]
    for _ in range(80):
        a = [rng.randrange(p) for _ in range(n)]
        a = _ptrim(a)
        if len(a) <= 0:
            continue
        if p == 2:
            t = list(a)
            acc = list(a)
            for _ in range(d - 1):
                acc = _pmulmod(acc, acc, f, p)
                t = _ptrim([(x + y) % p for x, y in zip(t + [0] * len(acc), acc + [0] * len(t))])
            g = _pgcd(t, f, p)
        else:
            e = (p**d - 1) // 2
            t = _pxpowpoly(a, e, f, p)
            t = list(t)
            if not t:
                t = [0]
            t[0] = (t[0] - 1) % p
            g = _pgcd(_ptrim(t), f, p)
        if 1 < len(g) < len(f):
            left = _pmonic(g, p)
            right = _pmonic(_pquo(f, g, p), p)
            return _edf_mod(left, d, p, rng) + _edf_mod(right, d, p, rng)
    return [f]  # give up; callers treat it as a single (possibly composite) factor


def _pxpowpoly(a: list[int], e: int, f: list[int], p: int) -> list[int]:
    result = [1]
    base = _prem(list(a), f, p)
    while e:
        if e & 1:
            result = _pmulmod(result, base, f, p)
        e >>= 1
        if e:
            base = _pmulmod(base, base, f, p)
    return result


def poly_factor_mod(f: list[int], p: int, seed=0) -> list[tuple[list[int], int]]:
    """Monic irreducible factors of f mod p with multiplicities."""
    rng = random.Random(f"factor|{seed}|{p}")
    out: list[tuple[list[int], int]] = []
    for g, mult in poly_squarefree_mod(f, p):
        for part, d in _ddf_mod(_pmonic(g, p), p):
            for irr in _edf_mod(part, d, p, rng):
                out.append((irr, mult))
    out.sort(key=lambda t: (len(t[0]), t[0]))
    return out


def poly_eval_matrix(f: list[int], m: np.ndarray, p: int) -> np.ndarray:
    """f(M) mod p by Horner."""
    n = m.shape[0]
    acc = fp_identity(n, p) * 0
    for c in reversed(f):
        acc = (acc @ m) % p
        if c:
            for i in range(n):
                acc[i, i] = (acc[i, i] + c) % p
    return acc


class FpEchelon:
    """Incremental reduced echelon over F_p for spinning loops."""

    def __init__(self, width: int, p: int):
        self.width = width
        self.p = p
        self.mat = np.zeros((0, width), dtype=_dtype_for(p))
        self.pivots: list[int] = []

    @property
    def dim(self) -> int:
        return len(self.pivots)

    def reduce(self, vec: np.ndarray) -> np.ndarray:
        v = vec % self.p
        if self.dim:
            coeffs = v[self.pivots]
            if np.any(coeffs):
                v = (v - coeffs @ self.mat) % self.p
        return v

    def add(self, vec: np.ndarray) -> bool:
        v = self.reduce(vec)
        nz = np.nonzero(v)[0]
        if len(nz) == 0:
            return False
        piv = int(nz[0])
        v = v * _inv_scalar(v[piv], self.p) % self.p
        if self.dim:
            col = self.mat[:, piv].copy()
            if np.any(col):
                self.mat = (self.mat - np.outer(col, v)) % self.p
        self.mat = np.vstack([self.mat, v[None, :]])
        self.pivots.append(piv)
        return True
