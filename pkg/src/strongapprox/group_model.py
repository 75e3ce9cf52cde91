"""Finitely generated subgroups of SL(n, Q) given by rational generators.

A LocalizedGroup records generators (with exact inverses), the degree and
the denominator base mu: the positive integer whose prime divisors are
exactly the primes occurring in denominators of the generators and their
inverses.  Reduction mod p is defined for p not dividing mu.

Group elements carry word provenance so that residues found over a finite
field can be lifted back to characteristic zero.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exact_arith import radical_of
from .linalg import QMat, kron
from .modp import fp_array

__all__ = [
    "Word",
    "GroupElement",
    "LocalizedGroup",
    "ProductReplacer",
    "word_inverse",
    "word_concat",
    "word_power",
    "random_element",
    "reduce_mod",
    "reduce_matrix_mod",
    "construct_K",
    "construct_C",
    "construct_triangle",
    "sl2_generators",
    "sl_standard_pair",
    "group_to_json",
    "group_from_json",
    "load_group",
    "save_group",
]

# A word is a sequence of (generator index, nonzero exponent) letters.
Word = tuple[tuple[int, int], ...]


def word_inverse(w: Word) -> Word:
    return tuple((i, -e) for i, e in reversed(w))


def word_concat(*ws: Word) -> Word:
    out: list[tuple[int, int]] = []
    for w in ws:
        for i, e in w:
            if out and out[-1][0] == i:
                s = out[-1][1] + e
                if s == 0:
                    out.pop()
                else:
                    out[-1] = (i, s)
            else:
                out.append((i, e))
    return tuple(out)


def word_power(w: Word, e: int) -> Word:
    if e == 0:
        return ()
    if e < 0:
        return word_power(word_inverse(w), -e)
    out: Word = ()
    for _ in range(e):
        out = word_concat(out, w)
    return out


def word_length(w: Word) -> int:
    return sum(abs(e) for _, e in w)


@dataclass
class GroupElement:
    """A group element together with a word witnessing it."""

    mat: QMat
    word: Word

    def inverse(self, group: "LocalizedGroup") -> "GroupElement":
        w = word_inverse(self.word)
        return GroupElement(group.evaluate(w), w)


class LocalizedGroup:
    """H = <g_1, ..., g_r> inside SL(n, (1/mu)Z)."""

    def __init__(self, gens, name: str | None = None):
        gens = tuple(g if isinstance(g, QMat) else QMat(g) for g in gens)
        if not gens:
            raise ValueError("need at least one generator")
        n = gens[0].nrows
        for g in gens:
            if g.nrows != n or g.ncols != n:
                raise ValueError("generators must be square of equal degree")
            if g.det() != 1:
                raise ValueError("generator with determinant != 1 is not in SL")
        self.n = n
        self.gens = gens
        self.invs = tuple(g.inv() for g in gens)
        self.name = name
        d = 1
        for g in list(gens) + list(self.invs):
            d = d * g.denominator_lcm() // math.gcd(d, g.denominator_lcm())
        self.mu = radical_of(d)

    @property
    def ngens(self) -> int:
        return len(self.gens)

    def generator(self, i: int, e: int = 1) -> QMat:
        if e >= 0:
            return self.gens[i] ** e if e != 1 else self.gens[i]
        return self.invs[i] ** (-e) if e != -1 else self.invs[i]

    def evaluate(self, word: Word) -> QMat:
        out = QMat.identity(self.n)
        for i, e in word:
            out = out * self.generator(i, e)
        return out

    def element(self, word: Word) -> GroupElement:
        return GroupElement(self.evaluate(word), word)

    def generator_elements(self) -> list[GroupElement]:
        return [GroupElement(g, ((i, 1),)) for i, g in enumerate(self.gens)]

    def __repr__(self) -> str:
        nm = self.name or "H"
        return f"<{nm} <= SL({self.n}, (1/{self.mu})Z), {self.ngens} generators>"


def reduce_matrix_mod(m: QMat, p: int) -> np.ndarray:
    """Entrywise reduction of a rational matrix mod p (denominators inverted)."""
    rows = []
    for r in m.rows:
        row = []
        for x in r:
            if x.denominator % p == 0:
                raise ValueError("prime not coprime to denominators")
            row.append(x.numerator * pow(x.denominator, -1, p) % p)
        rows.append(row)
    return fp_array(rows, p)


def reduce_mod(group: LocalizedGroup, p: int) -> list[np.ndarray]:
    """Images of the generators under the congruence homomorphism mod p."""
    if group.mu % p == 0:
        raise ValueError("prime not coprime to denominators")
    return [reduce_matrix_mod(g, p) for g in group.gens]


def reduce_word_mod(group: LocalizedGroup, word: Word, p: int) -> np.ndarray:
    """Evaluate a word directly in SL(n, p)."""
    from .modp import fp_identity, mat_inv_mod, mat_pow_mod

    out = fp_identity(group.n, p)
    for i, e in word:
        g = reduce_matrix_mod(group.gens[i], p)
        if e < 0:
            g = mat_inv_mod(g, p)
        out = out @ mat_pow_mod(g, abs(e), p) % p
    return out % p


class ProductReplacer:
    """Product-replacement random elements with word provenance.

    Slots hold (matrix, word) pairs; a stir multiplies one slot into
    another, capping word length at length_bound by resetting a slot to a
    random generator when a product would exceed it.  Deterministic for a
    fixed seed.
    """

    def __init__(self, group: LocalizedGroup, seed, length_bound: int = 12, scramble: int = 12):
        self.group = group
        self.length_bound = max(1, length_bound)
        self.rng = random.Random(f"pr|{seed}")
        self.slots: list[GroupElement] = []
        for i in range(group.ngens):
            self.slots.append(GroupElement(group.gens[i], ((i, 1),)))
            self.slots.append(GroupElement(group.invs[i], ((i, -1),)))
        if len(self.slots) < 4:
            self.slots *= 2
        self.acc = GroupElement(QMat.identity(group.n), ())
        for _ in range(scramble):
            self.stir()

    def _random_letter(self) -> GroupElement:
        i = self.rng.randrange(self.group.ngens)
        e = self.rng.choice((1, -1))
        return GroupElement(self.group.generator(i, e), ((i, e),))

    def stir(self) -> None:
        i = self.rng.randrange(len(self.slots))
        j = self.rng.randrange(len(self.slots))
        a, b = self.slots[i], self.slots[j]
        w = word_concat(a.word, b.word)
        if word_length(w) > self.length_bound or not w:
            self.slots[i] = self._random_letter()
        else:
            self.slots[i] = GroupElement(a.mat * b.mat, w)

    def sample(self) -> GroupElement:
        self.stir()
        i = self.rng.randrange(len(self.slots))
        s = self.slots[i]
        w = word_concat(self.acc.word, s.word)
        if word_length(w) > self.length_bound or not w:
            self.acc = s
        else:
            self.acc = GroupElement(self.acc.mat * s.mat, w)
        return self.acc


def random_element(group: LocalizedGroup, seed, length_bound: int = 12) -> GroupElement:
    """One random element; deterministic per seed."""
    pr = ProductReplacer(group, seed, length_bound=length_bound, scramble=6)
    return pr.sample()


# -- construction corpus --------------------------------------------------------


def sl_standard_pair(d: int) -> tuple[QMat, QMat]:
    """The classical two-generator set of SL(d, Z).

    x = 1 + E_{1,2}; y = the d-cycle permutation matrix with first row
    scaled by (-1)^(d-1) so that det(y) = 1.
    """
    if d < 2:
        raise ValueError("degree must be >= 2")
    x = [[1 if i == j else 0 for j in range(d)] for i in range(d)]
    x[0][1] = 1
    y = [[0] * d for _ in range(d)]
    sign = 1 if d % 2 == 1 else -1
    y[0][1 % d] = sign
    for i in range(1, d):
        y[i][(i + 1) % d] = 1
    return QMat(x), QMat(y)


def sl2_generators() -> tuple[QMat, QMat]:
    return sl_standard_pair(2)


def construct_K(a: int, b: int, m: int) -> LocalizedGroup:
    """Tensor-product group of degree ab plus a scaled elementary matrix.

    Generators: the standard SL(a,Z) pair and SL(b,Z) pair embedded as
    Kronecker factors, and 1 + m*E_{1,a+1} (1-based indices).
    """
    if a < 2 or b < 2:
        raise ValueError("factors must have degree >= 2")
    if m < 1:
        raise ValueError("m must be >= 1")
    xa, ya = sl_standard_pair(a)
    xb, yb = sl_standard_pair(b)
    ia, ib = QMat.identity(a), QMat.identity(b)
    t = [[1 if i == j else 0 for j in range(a * b)] for i in range(a * b)]
    t[0][a] = m
    gens = [kron(xa, ib), kron(ya, ib), kron(ia, xb), kron(ia, yb), QMat(t)]
    return LocalizedGroup(gens, name=f"K({a},{b},{m})")


def companion_matrix(coeffs: list) -> QMat:
    """Companion matrix of a monic polynomial given by ascending coefficients."""
    coeffs = [Fraction(c) for c in coeffs]
    if not coeffs or coeffs[-1] != 1:
        raise ValueError("polynomial must be monic")
    n = len(coeffs) - 1
    if n < 1:
        raise ValueError("polynomial must have positive degree")
    c = [[Fraction(0)] * n for _ in range(n)]
    for i in range(1, n):
        c[i][i - 1] = Fraction(1)
    for i in range(n):
        c[i][n - 1] = -coeffs[i]
    return QMat(c)


def _poly_str(coeffs) -> str:
    terms = []
    for e in range(len(coeffs) - 1, -1, -1):
        c = coeffs[e]
        if c == 0:
            continue
        if e == 0:
            terms.append(f"{c:+}")
        else:
            xs = "x" if e == 1 else f"x^{e}"
            if c == 1:
                terms.append(f"+{xs}")
            elif c == -1:
                terms.append(f"-{xs}")
            else:
                terms.append(f"{c:+}{xs}")
    s = "".join(terms)
    return s[1:] if s.startswith("+") else s


def construct_C(p_coeffs: list, q_coeffs: list) -> LocalizedGroup:
    """Two-generator group spanned by the companion matrices of p and q."""
    if len(p_coeffs) != len(q_coeffs):
        raise ValueError("polynomials must have equal degree")
    cp = companion_matrix(p_coeffs)
    cq = companion_matrix(q_coeffs)
    for c in (cp, cq):
        if c.det() != 1:
            raise ValueError("companion matrix not in SL")
    name = f"C({_poly_str(p_coeffs)}, {_poly_str(q_coeffs)})"
    return LocalizedGroup([cp, cq], name=name)


def triangle_rho_a(k: int) -> QMat:
    k = Fraction(k)
    rows = [
        [k * (3 - 4 * k + 4 * k**2), -1 - 4 * k - 8 * k**2 + 16 * k**3 - 16 * k**4, 0, 0],
        [1 - k + k**2, -1 - 3 * k + 4 * k**2 - 4 * k**3, 0, 0],
        [k * (1 - 2 * k + 2 * k**2), -3 - 4 * k - 2 * k**2 + 8 * k**3 - 8 * k**4, 1, 0],
        [2 * (1 - k + k**2), -2 * (1 + 2 * k - 4 * k**2 + 4 * k**3), 0, 1],
    ]
    return QMat(rows)


def triangle_rho_b() -> QMat:
    return QMat(
        [
            [1, 0, -4, 0],
            [0, 1, 0, -1],
            [0, 0, -1, -1],
            [0, 0, 1, 0],
        ]
    )


def construct_triangle(k: int, variant: str = "H") -> LocalizedGroup:
    """Degree-4 triangle-group representations H(k) and F(k).

    H(k) is generated by the two defining matrices; F(k) by the commutators
    [a, b] and [a, b^-1], a free subgroup of the same degree.
    """
    a = triangle_rho_a(k)
    b = triangle_rho_b()
    if variant.upper() == "H":
        return LocalizedGroup([a, b], name=f"H({k})")
    if variant.upper() == "F":
        ai, bi = a.inv(), b.inv()
        c1 = ai * bi * a * b
        c2 = ai * b * a * bi
        return LocalizedGroup([c1, c2], name=f"F({k})")
    raise ValueError("variant must be 'H' or 'F'")


# -- group description files -----------------------------------------------------


def _frac_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def group_to_json(group: LocalizedGroup) -> dict:
    return {
        "n": group.n,
        "generators": [[[_frac_str(x) for x in row] for row in g.rows] for g in group.gens],
        **({"name": group.name} if group.name else {}),
    }


def group_from_json(data: dict) -> LocalizedGroup:
    n = int(data["n"])
    gens = []
    for g in data["generators"]:
        rows = [[Fraction(str(x)) for x in row] for row in g]
        m = QMat(rows)
        if m.nrows != n or m.ncols != n:
            raise ValueError("generator degree does not match n")
        gens.append(m)
    return LocalizedGroup(gens, name=data.get("name"))


def save_group(group: LocalizedGroup, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(group_to_json(group), fh, indent=1)
        fh.write("\n")


def load_group(path: str) -> LocalizedGroup:
    with open(path) as fh:
        return group_from_json(json.load(fh))
