"""Adjoint representation on trace-zero matrices and enveloping algebras.

The canonical basis of the trace-zero space is E_ij (i != j) in row-major
order followed by E_ii - E_{i+1,i+1}; with that choice the conjugation
action x -> g^-1 x g has integer matrix entries whenever g is integral of
determinant 1, so determinant sieves built on adjoint images stay over Z.

Vectors of coordinates are rows and ad is a right action:
coords(x) * ad(g) = coords(g^-1 x g), hence ad(gh) = ad(g) ad(h).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exact_arith import next_prime
from .group_model import (
    GroupElement,
    LocalizedGroup,
    Word,
    reduce_mod,
    word_concat,
)
from .linalg import IntEchelon, QMat, flatten, integerize
from .modp import FpEchelon, fp_array, mat_inv_mod

__all__ = [
    "sl_dim",
    "sl_basis",
    "sl_coords",
    "ad_matrix",
    "ad_matrix_mod",
    "ad_group",
    "EnvBasis",
    "spin_basis",
    "env_words_lifted",
    "env_dim_q",
    "normal_closure_env_words",
    "NotAbsolutelyIrreducible",
]


class NotAbsolutelyIrreducible(RuntimeError):
    """Raised when a module that must span the full matrix algebra does not."""


def sl_dim(n: int) -> int:
    return n * n - 1


def sl_basis(n: int) -> list[list[list[int]]]:
    """Trace-zero basis: off-diagonal E_ij row-major, then E_ii - E_{i+1,i+1}."""
    basis = []
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            e = [[0] * n for _ in range(n)]
            e[i][j] = 1
            basis.append(e)
    for i in range(n - 1):
        e = [[0] * n for _ in range(n)]
        e[i][i] = 1
        e[i + 1][i + 1] = -1
        basis.append(e)
    return basis


def sl_coords(x) -> list:
    """Coordinates of a trace-zero matrix in the canonical basis.

    Off-diagonal coordinates are the matrix entries; the diagonal part
    expands over E_ii - E_{i+1,i+1} via partial sums.
    """
    n = len(x)
    coords = [x[i][j] for i in range(n) for j in range(n) if i != j]
    run = 0
    for i in range(n - 1):
        run = run + x[i][i]
        coords.append(run)
    return coords


def ad_matrix(g: QMat, ginv: QMat | None = None) -> QMat:
    """Matrix of x -> g^-1 x g on the trace-zero space, over Q.

    Row k is coords(g^-1 e_k g); sparse basis elements make each row an
    outer product of a column of g^-1 with a row of g.
    """
    n = g.nrows
    gi = ginv if ginv is not None else g.inv()
    gr = g.rows
    gir = gi.rows
    rows = []

    def conj_outer(i, j):
        # g^-1 E_ij g = (col i of g^-1) outer (row j of g)
        return [[gir[a][i] * gr[j][b] for b in range(n)] for a in range(n)]

    for i in range(n):
        for j in range(n):
            if i != j:
                rows.append(sl_coords(conj_outer(i, j)))
    for i in range(n - 1):
        a = conj_outer(i, i)
        b = conj_outer(i + 1, i + 1)
        diff = [[a[r][c] - b[r][c] for c in range(n)] for r in range(n)]
        rows.append(sl_coords(diff))
    return QMat(rows)


def ad_matrix_mod(gbar: np.ndarray, p: int) -> np.ndarray:
    """ad over F_p computed directly from a reduced matrix."""
    n = gbar.shape[0]
    gi = mat_inv_mod(gbar, p)
    rows = []

    def conj_outer(i, j):
        return [[int(gi[a, i]) * int(gbar[j, b]) % p for b in range(n)] for a in range(n)]

    for i in range(n):
        for j in range(n):
            if i != j:
                rows.append(sl_coords(conj_outer(i, j)))
    for i in range(n - 1):
        a = conj_outer(i, i)
        b = conj_outer(i + 1, i + 1)
        diff = [[(a[r][c] - b[r][c]) % p for c in range(n)] for r in range(n)]
        rows.append(sl_coords(diff))
    return fp_array(rows, p)


def ad_group(group: LocalizedGroup) -> LocalizedGroup:
    """The image of the group under ad, as a matrix group of degree n^2 - 1."""
    gens = [ad_matrix(g, gi) for g, gi in zip(group.gens, group.invs)]
    name = f"ad({group.name})" if group.name else "ad(H)"
    return LocalizedGroup(gens, name=name)


# -- spinning ---------------------------------------------------------------------


@dataclass
class EnvBasis:
    """Basis of an enveloping algebra with optional word provenance."""

    dim: int
    elements: list
    words: list[Word] | None = None


def spin_basis(seeds, actors, p: int | None = None, dim_cap: int | None = None) -> EnvBasis:
    """Closure of span(seeds) under left/right multiplication by actors.

    Works over Q (QMat inputs) or over F_p (numpy inputs with p given).
    The dimension is at most d^2 and equals d^2 exactly when the seeds
    generate an absolutely irreducible module under the actors.
    """
    if not seeds:
        return EnvBasis(0, [])
    if p is None:
        d = seeds[0].nrows
        ech = IntEchelon(d * d)

        def flat(m):
            v, _ = integerize(QMat([flatten(m)]))
            return v[0]

    else:
        d = seeds[0].shape[0]
        ech = FpEchelon(d * d, p)

        def flat(m):
            return np.asarray(m).reshape(-1) % p

    cap = dim_cap or d * d
    basis = []
    queue = []
    for s in seeds:
        if ech.add(flat(s)):
            basis.append(s)
            queue.append(s)
    while queue and ech.dim < cap:
        m = queue.pop(0)
        for a in actors:
            for prod in ((m * a, a * m) if p is None else ((m @ a) % p, (a @ m) % p)):
                if ech.add(flat(prod)):
                    basis.append(prod)
                    queue.append(prod)
                    if ech.dim >= cap:
                        break
            if ech.dim >= cap:
                break
    return EnvBasis(ech.dim, basis)


def _aux_primes(group: LocalizedGroup, count: int) -> list[int]:
    """Smallest primes > max(n, 3) coprime to the denominator base."""
    out = []
    q = max(group.n, 3)
    while len(out) < count:
        q = next_prime(q)
        if group.mu % q != 0:
            out.append(q)
    return out


def _letter_order(group: LocalizedGroup, shuffle_seed) -> list[tuple[int, int]]:
    letters = [(i, e) for i in range(group.ngens) for e in (1, -1)]
    if shuffle_seed is not None:
        random.Random(f"letters|{shuffle_seed}").shuffle(letters)
    return letters


def env_words_lifted(
    group: LocalizedGroup,
    *,
    seed=0,
    num_aux: int = 10,
) -> tuple[list[Word], int]:
    """n^2 words whose evaluations span Mat(n, Q), via finite-field spinning.

    A basis of the enveloping algebra is found mod an auxiliary prime q and
    the words are lifted; full rank mod q already certifies that the lifted
    evaluations are independent over Q, since reduction cannot raise rank.

    Raises NotAbsolutelyIrreducible when no auxiliary prime reaches full
    dimension and direct spinning over Q confirms the deficiency.
    """
    n = group.n
    target = n * n
    letters = _letter_order(group, seed)
    for q in _aux_primes(group, num_aux):
        gens = reduce_mod(group, q)
        invs = [mat_inv_mod(g, q) for g in gens]
        ech = FpEchelon(target, q)
        ident = fp_array([[int(i == j) for j in range(n)] for i in range(n)], q)
        words: list[Word] = []
        queue: list[tuple[Word, np.ndarray]] = []
        if ech.add(ident.reshape(-1)):
            words.append(())
            queue.append(((), ident))
        while queue and ech.dim < target:
            w, m = queue.pop(0)
            for i, e in letters:
                m2 = (m @ (gens[i] if e == 1 else invs[i])) % q
                w2 = word_concat(w, ((i, e),))
                if ech.add(m2.reshape(-1)):
                    words.append(w2)
                    queue.append((w2, m2))
                    if ech.dim >= target:
                        break
        if ech.dim == target:
            return words, q
    dim, words = env_dim_q(group, seed=seed)
    if dim == target:
        return words, 0
    raise NotAbsolutelyIrreducible(
        f"enveloping algebra has dimension {dim} < {target}: input not absolutely irreducible"
    )


def env_dim_q(group: LocalizedGroup, *, seed=None) -> tuple[int, list[Word]]:
    """Dimension of the enveloping algebra over Q by direct spinning, with words."""
    n = group.n
    target = n * n
    letters = _letter_order(group, seed)
    ech = IntEchelon(target)
    ident = QMat.identity(n)

    def flat_int(m: QMat):
        v, _ = integerize(QMat([flatten(m)]))
        return v[0]

    words: list[Word] = []
    queue: list[tuple[Word, QMat]] = []
    ech.add(flat_int(ident))
    words.append(())
    queue.append(((), ident))
    while queue and ech.dim < target:
        w, m = queue.pop(0)
        for i, e in letters:
            m2 = m * group.generator(i, e)
            w2 = word_concat(w, ((i, e),))
            if ech.add(flat_int(m2)):
                words.append(w2)
                queue.append((w2, m2))
                if ech.dim >= target:
                    break
    return ech.dim, words


def normal_closure_env_words(
    group: LocalizedGroup,
    seeds: list[GroupElement],
    *,
    seed=None,
) -> tuple[list[Word], list[QMat]]:
    """Words and matrices spanning the enveloping algebra of <seeds>^H over Q.

    Spins the unital algebra generated by the seeds and closes it under
    conjugation by the group generators; every returned element is a single
    word (a product of conjugated seeds), so reductions mod p land inside
    the span of the reduced normal closure.

    Raises NotAbsolutelyIrreducible if the closure spans less than Mat(n).
    """
    n = group.n
    target = n * n
    rng = random.Random(f"ncl|{seed}")
    ech = IntEchelon(target)

    def flat_int(m: QMat):
        v, _ = integerize(QMat([flatten(m)]))
        return v[0]

    # algebra generators: seed words (conjugates get appended on demand)
    alg: list[GroupElement] = [GroupElement(s.mat, s.word) for s in seeds]
    basis: list[tuple[Word, QMat]] = []
    processed: dict[int, int] = {}  # basis index -> number of alg gens applied

    ident = GroupElement(QMat.identity(n), ())
    ech.add(flat_int(ident.mat))
    basis.append(((), ident.mat))
    processed[0] = 0

    def spin_out():
        changed = True
        while changed and ech.dim < target:
            changed = False
            for bi in range(len(basis)):
                start = processed.get(bi, 0)
                if start >= len(alg):
                    continue
                w, m = basis[bi]
                for ai in range(start, len(alg)):
                    a = alg[ai]
                    prod = m * a.mat
                    wp = word_concat(w, a.word)
                    if ech.add(flat_int(prod)):
                        basis.append((wp, prod))
                        processed[len(basis) - 1] = 0
                        changed = True
                        if ech.dim >= target:
                            return
                processed[bi] = len(alg)

    spin_out()
    # close under conjugation by generators (both directions)
    stable = False
    while not stable and ech.dim < target:
        stable = True
        for bi in range(len(basis)):
            w, m = basis[bi]
            for j in range(group.ngens):
                for e in (1, -1):
                    conj = group.generator(j, -e) * m * group.generator(j, e)
                    if not ech.contains(flat_int(conj)):
                        wc = word_concat(((j, -e),), w, ((j, e),))
                        alg.append(GroupElement(conj, wc))
                        spin_out()
                        stable = False
            if ech.dim >= target:
                break
    if ech.dim < target:
        raise NotAbsolutelyIrreducible(
            f"normal closure spans dimension {ech.dim} < {target}"
        )
    if seed is not None:
        rng.shuffle(basis)
        # reselect an independent subset in shuffled order for witness variety
        ech2 = IntEchelon(target)
        chosen = [bw for bw in basis if ech2.add(flat_int(bw[1]))]
        basis = chosen
    words = [w for w, _ in basis[:target]]
    mats = [m for _, m in basis[:target]]
    return words, mats
