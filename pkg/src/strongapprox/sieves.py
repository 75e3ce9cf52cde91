"""Determinant sieves: finite supersets of the exceptional prime set.

Every sieve returns a SieveResult whose prime set provably contains all
primes (coprime to the denominator base) at which the targeted degeneracy
occurs; extra primes are harmless because the pipeline's second step
checks each candidate individually.  A prime can only be *missed* through
an unfactored composite, which is why unfactorable leftovers are reported
in ``unresolved`` instead of being dropped.

The determinants these sieves produce are far too large to factor
directly, so each sieve computes the witness quantity twice with
independent randomness and factors the gcd: target primes divide every
witness value, while accidental factors rarely survive the collapse.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .adjoint_env import (
    NotAbsolutelyIrreducible,
    ad_matrix,
    env_words_lifted,
    normal_closure_env_words,
)
from .exact_arith import factor, lcm_upto
from .group_model import (
    GroupElement,
    LocalizedGroup,
    ProductReplacer,
    Word,
    word_concat,
    word_inverse,
    word_power,
)
from .linalg import (
    IntEchelon,
    QMat,
    det_bareiss,
    flatten,
    full_rank_minor,
    integerize,
    left_nullspace_int,
    rank_int,
    right_nullspace_int,
)
from .modp import rank_mod, rref_mod, fp_array

__all__ = [
    "ORDER_BOUND_TABLE",
    "DEGREE_TWO_ORDER_BOUND",
    "order_bound_for_degree",
    "SieveResult",
    "SieveSearchError",
    "primes_for_order",
    "primes_for_abs_irreducible",
    "primes_for_irreducible_adjoint",
    "primes_for_primitive",
    "primes_for_reducible_second_derived",
    "primes_for_similarity",
    "invariant_form_space_q",
]

# Largest element order among the residual maximal-subgroup candidates
# (absolutely irreducible with irreducible adjoint action), per degree.
ORDER_BOUND_TABLE = {
    3: 21,
    4: 36,
    5: 60,
    6: 60,
    7: 84,
    8: 120,
    9: 90,
    10: 120,
    11: 253,
    12: 156,
}

# Degree 2 is below the table: the exceptional candidates are the binary
# tetrahedral/octahedral/icosahedral groups, whose element orders are at
# most 10 (reducible, imprimitive and normalizer-of-torus subgroups are
# caught by the other sieves).
DEGREE_TWO_ORDER_BOUND = 10


def order_bound_for_degree(n: int, user_bound: int | None = None) -> int:
    if user_bound is not None:
        if user_bound < 2:
            raise ValueError("order bound must be >= 2")
        return user_bound
    if n == 2:
        return DEGREE_TWO_ORDER_BOUND
    if n in ORDER_BOUND_TABLE:
        return ORDER_BOUND_TABLE[n]
    raise ValueError(f"no built-in element-order bound for degree {n}; supply one")


class SieveSearchError(RuntimeError):
    """A witness search exhausted its budget."""


@dataclass
class SieveResult:
    primes: set[int]
    sieve_name: str
    witnesses: dict = field(default_factory=dict)
    unresolved: list[int] = field(default_factory=list)

    @property
    def complete(self) -> bool:
        return not self.unresolved


def _factor_collapsed(values: list[int], group: LocalizedGroup, name: str, witnesses: dict,
                      extra_primes: set[int] | None = None, seed=0) -> SieveResult:
    """gcd the witness values, factor, and strip denominator-base primes."""
    g = 0
    for v in values:
        g = math.gcd(g, abs(v))
    if g == 0:
        raise ValueError("sieve produced a zero witness value")
    fac = factor(g, seed=f"sieve|{seed}")
    primes = {p for p in fac.primes() if group.mu % p != 0}
    if extra_primes:
        primes |= {p for p in extra_primes if group.mu % p != 0}
    unresolved = [] if fac.cofactor == 1 else [fac.cofactor]
    witnesses = dict(witnesses)
    witnesses["collapsed_gcd_bits"] = g.bit_length()
    return SieveResult(primes, name, witnesses, unresolved)


def _collapse_until_complete(
    value_iter,
    group: LocalizedGroup,
    name: str,
    witnesses: dict,
    *,
    min_values: int = 2,
    max_values: int = 5,
    extra_primes: set[int] | None = None,
    seed=0,
) -> SieveResult:
    """Accumulate witness values until the collapsed gcd factors completely.

    Target primes divide every witness value, so each extra value can only
    shrink the gcd; new values are drawn until the factorization has no
    composite leftover or the budget runs out (the leftover is then
    reported as unresolved).
    """
    values: list[int] = []
    result: SieveResult | None = None
    for v in value_iter:
        values.append(v)
        if len(values) >= min_values:
            result = _factor_collapsed(
                values, group, name, witnesses, extra_primes=extra_primes, seed=seed
            )
            if result.complete:
                return result
        if len(values) >= max_values:
            break
    if not values:
        raise SieveSearchError("witness search produced no values")
    if result is None:
        result = _factor_collapsed(
            values, group, name, witnesses, extra_primes=extra_primes, seed=seed
        )
    return result


# -- order sieve -------------------------------------------------------------------


def _order_witness_value(group: LocalizedGroup, el: GroupElement, k: int) -> int | None:
    """D(h) = prod_{j<=k} |det(h^j - 1)|, or None if some power has
    eigenvalue 1 over Q (such a j carries no modular information)."""
    n = group.n
    a, d = integerize(el.mat)
    power = [row[:] for row in a]
    dj = 1
    big = 1
    for j in range(1, k + 1):
        if j > 1:
            power = _imat_mul(power, a)
        dj *= d
        det = det_bareiss(
            [[power[r][c] - (dj if r == c else 0) for c in range(n)] for r in range(n)]
        )
        if det == 0:
            return None
        big *= abs(det)
    return big


def primes_for_order(
    group: LocalizedGroup,
    k: int,
    num_witnesses: int = 3,
    *,
    seed=0,
    search_budget: int = 120,
) -> SieveResult:
    """Superset of the primes p where every element of the image mod p has
    order at most k.

    If the image of h mod p has order j <= k then p divides det(h^j - 1),
    so p divides D(h) = prod_{j<=k} |det(h^j - 1)| for every witness h whose
    powers stay away from 1 over Q; the gcd over several witnesses is
    factored instead of any single astronomically large D(h).
    """
    if k < 2:
        raise ValueError("order bound must be >= 2")
    pr = ProductReplacer(group, f"order|{seed}", length_bound=8)
    witness_words: list[Word] = []

    def witness_values():
        attempts = 0
        while attempts < search_budget:
            attempts += 1
            el = pr.sample()
            value = _order_witness_value(group, el, k)
            if value is not None:
                witness_words.append(el.word)
                yield value

    meta = {"order_bound": k, "witness_words": []}
    res = _collapse_until_complete(
        witness_values(),
        group,
        "order",
        meta,
        min_values=num_witnesses,
        max_values=num_witnesses + 2,
        seed=seed,
    )
    if len(witness_words) < num_witnesses:
        raise SieveSearchError(
            "could not certify infinite order: no witness without small root-of-unity eigenvalues"
        )
    res.witnesses["witness_words"] = [_word_json(w) for w in witness_words]
    return res


def _imat_mul(a, b):
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(r, c)) for c in bt] for r in a]


def _word_json(w: Word):
    return [list(l) for l in w]


# -- absolute irreducibility sieve ----------------------------------------------------


def _witness_det(group: LocalizedGroup, mats: list[QMat]) -> int:
    rows = []
    for m in mats:
        v, _ = integerize(QMat([flatten(m)]))
        rows.append(v[0])
    det = det_bareiss(rows)
    if det == 0:
        raise AssertionError("witness stack unexpectedly singular over Q")
    return abs(det)


def primes_for_abs_irreducible(
    group: LocalizedGroup,
    seeds: list[GroupElement] | None = None,
    *,
    seed=0,
    max_sets: int = 3,
) -> SieveResult:
    """Superset of the primes where the module drops absolute irreducibility.

    Without seeds the module is the group itself; with seeds it is the
    normal closure of the seeds.  n^2 spanning witnesses are produced (by
    finite-field lifting, resp. conjugation-closed spinning), stacked as a
    flattened integer matrix, and the primes dividing its determinant are
    reported: away from those, the reduced witnesses still span the full
    matrix algebra.

    Raises NotAbsolutelyIrreducible when the module fails to span over Q.
    """
    name = "abs-irreducible" if seeds is None else "abs-irreducible-normal-closure"
    meta: dict = {"witness_words": []}

    def values():
        for i in range(max_sets):
            if seeds is None:
                words, q = env_words_lifted(group, seed=f"{seed}|set{i}")
                mats = [group.evaluate(w) for w in words]
                meta.setdefault("aux_primes", []).append(q)
            else:
                words, mats = normal_closure_env_words(
                    group, seeds, seed=f"{seed}|set{i}" if i else None
                )
            meta["witness_words"].append([_word_json(w) for w in words])
            yield _witness_det(group, mats)

    if seeds is not None:
        meta["seed_words"] = [_word_json(s.word) for s in seeds]
    return _collapse_until_complete(
        values(), group, name, meta, min_values=2, max_values=max_sets, seed=seed
    )


# -- Norton-criterion sieve for the adjoint module ---------------------------------------


def _short_words(group: LocalizedGroup, rng: random.Random, cap: int) -> list[Word]:
    words: list[Word] = [()]
    letters = [(i, e) for i in range(group.ngens) for e in (1, -1)]
    words += [(l,) for l in letters]
    pairs = [(l1, l2) for l1 in letters for l2 in letters]
    rng.shuffle(pairs)
    words += [tuple(p) for p in pairs]
    for _ in range(10):
        w = tuple(rng.choice(letters) for _ in range(rng.choice((3, 4))))
        words.append(w)
    seen = set()
    out = []
    for w in words:
        w = word_concat(w)  # normalize
        if w not in seen:
            seen.add(w)
            out.append(w)
        if len(out) >= cap:
            break
    return out


class _AdPool:
    """Integerized adjoint images of short words, with their inverses."""

    def __init__(self, group: LocalizedGroup, rng: random.Random, cap: int = 20):
        self.group = group
        self.words = _short_words(group, rng, cap)
        self.mats = []
        self.inv_mats = []
        for w in self.words:
            m, _ = integerize(ad_matrix(group.evaluate(w)))
            mi, _ = integerize(ad_matrix(group.evaluate(word_inverse(w))))
            self.mats.append(m)
            self.inv_mats.append(mi)
        self.dim = len(self.mats[0])

    def plain_combo(self, rng: random.Random, spread: int):
        m = [[0] * self.dim for _ in range(self.dim)]
        for a in self.mats:
            c = rng.randint(-spread, spread)
            if c:
                for r in range(self.dim):
                    row = m[r]
                    ra = a[r]
                    for j in range(self.dim):
                        row[j] += c * ra[j]
        return m

    def skew_combo(self, rng: random.Random, spread: int = 3):
        # ad(w) - ad(w^-1) is skew-adjoint for the trace form, and in odd
        # module dimension (even degree) such elements are always singular,
        # generically of corank exactly one
        m = [[0] * self.dim for _ in range(self.dim)]
        for a, b in zip(self.mats, self.inv_mats):
            c = rng.randint(-spread, spread)
            if c:
                for r in range(self.dim):
                    row = m[r]
                    ra, rb = a[r], b[r]
                    for j in range(self.dim):
                        row[j] += c * (ra[j] - rb[j])
        return m


def _find_corank_one(pool: _AdPool, rng: random.Random, attempts: int):
    """An integer matrix of rank dim-1 in the adjoint algebra, or None."""
    dim = pool.dim
    screen_p = 2**31 - 1
    for t in range(attempts):
        if t < attempts // 2:
            spread = 1 if t < attempts // 4 else 5
            m = pool.plain_combo(rng, spread)
            from .modp import det_mod

            if det_mod(fp_array(m, screen_p), screen_p) != 0:
                continue  # nonsingular over Q (mod-q certificate)
        else:
            if pool.dim % 2 == 0:
                # even module dimension: skew elements have even corank, so
                # singular plain combinations are the only road here
                m = pool.plain_combo(rng, 3)
                from .modp import det_mod

                if det_mod(fp_array(m, screen_p), screen_p) != 0:
                    continue
            else:
                m = pool.skew_combo(rng)
        if rank_int(m) == dim - 1:
            return m
    return None


def _spin_vector_int(start, actors, target: int):
    """BFS products start * (actor monomials); returns target independent rows."""
    ech = IntEchelon(len(start))
    rows = []
    queue = [tuple(start)]
    ech.add(start)
    rows.append(tuple(start))
    while queue and len(rows) < target:
        v = queue.pop(0)
        for a in actors:
            u = tuple(sum(x * a[i][j] for i, x in enumerate(v)) for j in range(len(v)))
            if ech.add(u):
                rows.append(u)
                queue.append(u)
                if len(rows) >= target:
                    break
    return rows if len(rows) == target else None


def primes_for_irreducible_adjoint(
    group: LocalizedGroup,
    attempts: int = 100,
    *,
    seed=0,
    runs: int = 2,
) -> SieveResult | None:
    """Norton-criterion sieve: primes where the adjoint module could fail to
    be (absolutely) irreducible, via three determinants per run.

    Needs an adjoint-algebra element B of corank one; M1 is a full-rank
    minor of B, M2 stacks a spun row-nullvector, M3 a spun column-nullvector.
    Away from the reported primes the Norton configuration survives
    reduction, which certifies irreducibility mod p (and nullity one forces
    a trivial endomorphism ring, hence absolute irreducibility).

    Returns None when no corank-one element was found within the budget;
    success additionally certifies that the adjoint module is irreducible
    over Q.
    """
    n = group.n
    dim = n * n - 1
    rng = random.Random(f"norton|{seed}")
    pool = _AdPool(group, rng)
    actors = []
    for i in range(group.ngens):
        a, _ = integerize(ad_matrix(group.gens[i], group.invs[i]))
        ai, _ = integerize(ad_matrix(group.invs[i], group.gens[i]))
        actors.append(a)
        actors.append(ai)
    actors_t = [list(map(list, zip(*a))) for a in actors]

    det_sizes = []
    failed = False

    def values():
        nonlocal failed
        for run in range(runs + 2):
            b = _find_corank_one(pool, rng, attempts)
            if b is None:
                failed = True
                return
            rows_idx, cols_idx = full_rank_minor(b, dim - 1)
            minor = [[b[r][c] for c in cols_idx] for r in rows_idx]
            d1 = det_bareiss(minor)
            v = left_nullspace_int(b)[0]
            m2 = _spin_vector_int(v, actors, dim)
            w = right_nullspace_int(b)[0]
            m3 = _spin_vector_int(w, actors_t, dim)
            if m2 is None or m3 is None:
                # the nullvector spins to a proper subspace: the adjoint
                # module is reducible over Q and Norton cannot certify
                failed = True
                return
            d2 = det_bareiss([list(r) for r in m2])
            d3 = det_bareiss([list(r) for r in m3])
            det_sizes.append([abs(d1).bit_length(), abs(d2).bit_length(), abs(d3).bit_length()])
            yield abs(d1) * abs(d2) * abs(d3)

    meta: dict = {"det_bits": det_sizes}
    try:
        res = _collapse_until_complete(
            values(), group, "norton-adjoint", meta,
            min_values=runs, max_values=runs + 2, seed=seed,
        )
    except SieveSearchError:
        return None
    if failed and len(det_sizes) < runs:
        return None
    return res


# -- Aschbacher-class sieves --------------------------------------------------------------


def _candidate_elements(group: LocalizedGroup, rng_label: str, budget: int):
    """Generators first, then short products, then random elements."""
    for i, g in enumerate(group.gens):
        yield GroupElement(g, ((i, 1),))
    count = 0
    for i in range(group.ngens):
        for j in range(group.ngens):
            if i != j:
                yield GroupElement(group.gens[i] * group.gens[j], ((i, 1), (j, 1)))
                count += 1
                if count > budget // 2:
                    break
        else:
            continue
        break
    pr = ProductReplacer(group, rng_label, length_bound=6)
    for _ in range(budget):
        yield pr.sample()


def primes_for_primitive(group: LocalizedGroup, *, seed=0, search_budget: int = 60) -> SieveResult:
    """Superset of the primes where the image preserves a direct-sum
    decomposition (acts imprimitively).

    A block permutation of n blocks has order dividing e = exp(Sym(n)) =
    lcm(1..n), so h^e lands in the block-diagonal part; a non-scalar h^e
    generates a normal subgroup that is reducible mod every imprimitive
    prime, and the normal-closure absolute-irreducibility sieve finishes.
    At an imprimitive prime this holds for every choice of h, so the gcd is
    collapsed over witness stacks seeded by different elements.
    """
    e = lcm_upto(group.n)
    base_words: list[Word] = []

    def values():
        count = 0
        for el in _candidate_elements(group, f"primitive|{seed}", search_budget):
            he = el.mat**e
            if he.is_scalar():
                continue
            seed_el = GroupElement(he, word_power(el.word, e))
            _, mats = normal_closure_env_words(
                group, [seed_el], seed=f"{seed}|p{count}" if count else None
            )
            base_words.append(el.word)
            count += 1
            yield _witness_det(group, mats)

    res = _collapse_until_complete(
        values(),
        group,
        "primitive",
        {"power": e},
        min_values=2,
        max_values=4,
        seed=seed,
    )
    res.witnesses["base_words"] = [_word_json(w) for w in base_words]
    return res


def _commutator(a: GroupElement, b: GroupElement, group: LocalizedGroup) -> GroupElement:
    mat = a.mat.inv() * b.mat.inv() * a.mat * b.mat
    word = word_concat(word_inverse(a.word), word_inverse(b.word), a.word, b.word)
    return GroupElement(mat, word)


def primes_for_reducible_second_derived(
    group: LocalizedGroup, *, seed=0, search_budget: int = 60
) -> SieveResult:
    """Superset of the primes where the image lies in a field-extension
    subgroup: the second derived subgroup there is quasisimple and
    reducible, so a non-scalar double commutator seeds the normal-closure
    absolute-irreducibility sieve.
    """
    gens = group.generator_elements()
    quads: list[tuple[GroupElement, ...]] = []
    if group.ngens >= 2:
        for a in gens[: min(4, group.ngens)]:
            for b in gens[: min(4, group.ngens)]:
                if a is not b:
                    quads.append((a, b, b, a))
                    quads.append((a, b, a, b))
    pr = ProductReplacer(group, f"c3|{seed}", length_bound=4)
    for _ in range(search_budget):
        quads.append(tuple(pr.sample() for _ in range(4)))
    comm_words: list[Word] = []

    def values():
        count = 0
        for a, b, c, d in quads[:search_budget]:
            g = _commutator(_commutator(a, b, group), _commutator(c, d, group), group)
            if g.mat.is_scalar():
                continue
            _, mats = normal_closure_env_words(
                group, [g], seed=f"{seed}|d{count}" if count else None
            )
            comm_words.append(g.word)
            count += 1
            yield _witness_det(group, mats)

    res = _collapse_until_complete(
        values(),
        group,
        "second-derived",
        {},
        min_values=2,
        max_values=4,
        seed=seed,
    )
    res.witnesses["double_commutator_words"] = [_word_json(w) for w in comm_words]
    return res


def _ikron(a, b):
    na, nb = len(a), len(b)
    out = []
    for i in range(na):
        for k in range(nb):
            out.append([a[i][j] * b[k][l] for j in range(na) for l in range(nb)])
    return out


def _form_condition_rows(mat: QMat) -> list[list[int]]:
    """Integer rows of the linear condition g X g^T = X on vec(X)."""
    a, d = integerize(mat)
    m = _ikron(a, a)
    dd = d * d
    for i in range(len(m)):
        m[i][i] -= dd
    return m


def invariant_form_space_q(group: LocalizedGroup, elements: list[QMat] | None = None) -> list[tuple]:
    """Basis of {X : g X g^T = X for the given elements} over Q (primitive)."""
    rows: list[list[int]] = []
    for g in elements if elements is not None else group.gens:
        rows.extend(_form_condition_rows(g))
    return right_nullspace_int(rows)


def primes_for_similarity(group: LocalizedGroup, *, seed=0, max_commutators: int = 40) -> SieveResult:
    """Superset of the primes where the image preserves a nonzero bilinear
    form (the classical-forms class).

    Form multipliers are homomorphisms into F_p^*, so commutators preserve
    any invariant form exactly; stacking the conditions c X c^T = X for
    commutator words c until the rational solution space is zero makes
    every form-prime divide all maximal minors of the stack.  The gcd of a
    few independent maximal minors is factored.  For even degree the prime
    2 is always included (quadratic-type distinctions in characteristic 2
    are not separated by the bilinear condition).
    """
    n = group.n
    if n < 3:
        raise ValueError("similarity sieve needs degree >= 3")
    rng = random.Random(f"c8|{seed}")
    pr = ProductReplacer(group, f"c8|{seed}", length_bound=6)
    gens = group.generator_elements()

    def candidates():
        for i in range(group.ngens):
            for j in range(i + 1, group.ngens):
                yield _commutator(gens[i], gens[j], group)
        while True:
            yield _commutator(pr.sample(), pr.sample(), group)

    rows: list[list[int]] = []
    comm_words = []
    screen_p = 2**31 - 1
    full = False
    stalled = 0
    last_rank = 0
    for c in candidates():
        if len(comm_words) >= max_commutators or stalled >= 8:
            break
        if c.mat.is_identity():
            continue
        comm_words.append(c.word)
        rows.extend(_form_condition_rows(c.mat))
        r = rank_mod(fp_array(rows, screen_p), screen_p)
        if r == n * n:
            full = True  # rank mod q certifies full rank over Q
            break
        stalled = stalled + 1 if r == last_rank else 0
        last_rank = r
    if not full and rank_int(rows) < n * n:
        raise NotAbsolutelyIrreducible("input preserves a bilinear form over Q")

    # independent row subsets via pivot rows mod q, in shuffled orders
    def subset_dets():
        order = list(range(len(rows)))
        for trial in range(6):
            if trial:
                rng.shuffle(order)
            arranged = [rows[i] for i in order]
            transpose = list(map(list, zip(*arranged)))
            _, pivots = rref_mod(fp_array(transpose, screen_p), screen_p)
            chosen = [arranged[i] for i in pivots]
            if len(chosen) != n * n:
                continue
            det = det_bareiss(chosen)
            if det:
                yield abs(det)

    extra = {2} if n % 2 == 0 else None
    return _collapse_until_complete(
        subset_dets(),
        group,
        "similarity",
        {"commutator_words": [_word_json(w) for w in comm_words]},
        min_values=2,
        max_values=5,
        extra_primes=extra,
        seed=seed,
    )
