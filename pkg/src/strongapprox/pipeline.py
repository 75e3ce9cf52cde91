"""End-to-end computation of the exceptional prime set, and the satctl CLI.

Step 1 assembles a finite candidate set from the sieves along one of three
routes (adjoint, Norton-modified, per-class); Step 2 decides surjectivity
for each candidate.  The exceptional set is exactly the candidates whose
image is a proper subgroup.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .adjoint_env import NotAbsolutelyIrreducible, ad_group, env_words_lifted
from .congruence_analysis import SurjConfig, SurjectivityVerdict, is_surjective
from .exact_arith import is_prime
from .group_model import (
    LocalizedGroup,
    ProductReplacer,
    construct_C,
    construct_K,
    construct_triangle,
    group_from_json,
    group_to_json,
)
from .linalg import det_bareiss, integerize
from .sieves import (
    SieveResult,
    SieveSearchError,
    invariant_form_space_q,
    order_bound_for_degree,
    primes_for_abs_irreducible,
    primes_for_irreducible_adjoint,
    primes_for_order,
    primes_for_primitive,
    primes_for_reducible_second_derived,
    primes_for_similarity,
)

__all__ = [
    "PipelineConfig",
    "DensityResult",
    "PiReport",
    "GroupNotDense",
    "PipelineError",
    "is_dense",
    "primes_non_surjective",
    "cli_main",
    "cli_main_entry",
]

SCHEMA = "satctl-report/1"
DENSITY_SCHEMA = "satctl-density/1"
VERDICT_SCHEMA = "satctl-verdict/1"


class GroupNotDense(RuntimeError):
    pass


class PipelineError(RuntimeError):
    pass


@dataclass
class PipelineConfig:
    method: str = "auto"
    seed: int = 0
    bsgs_limit: int = 10**7
    mc_trials: int = 64
    order_bound: int | None = None
    assume_dense: bool = False
    with_timings: bool = False

    def surj_config(self) -> SurjConfig:
        return SurjConfig(
            bsgs_limit=self.bsgs_limit,
            mc_trials=self.mc_trials,
            seed=self.seed,
            order_bound=self.order_bound,
        )


@dataclass
class DensityResult:
    status: str  # "Dense" | "NotDense" | "Undecided"
    reason: str
    certificate: dict = field(default_factory=dict)

    @property
    def dense(self) -> bool:
        return self.status == "Dense"


def _finite_closure_size(group: LocalizedGroup, cap: int = 512) -> int | None:
    """Order of the group if the closure completes within cap, else None."""
    from .linalg import QMat

    seen = set()
    start = QMat.identity(group.n)
    seen.add(start.rows)
    frontier = [start]
    mats = list(group.gens) + list(group.invs)
    while frontier:
        nxt = []
        for m in frontier:
            for g in mats:
                prod = m * g
                if prod.rows not in seen:
                    if len(seen) >= cap:
                        return None
                    if any(
                        abs(x.numerator) > 10**9 or x.denominator > 10**9
                        for r in prod.rows
                        for x in r
                    ):
                        return None  # entries diverge: certainly infinite
                    seen.add(prod.rows)
                    nxt.append(prod)
        frontier = nxt
    return len(seen)


def _infinite_order_witness(group: LocalizedGroup, k: int, seed, budget: int = 60):
    """A word whose element has det(h^j - 1) != 0 for all j <= k, or None.

    Such an element has infinite order: a finite-order rational matrix of
    degree n has order at most the largest m with phi(m) <= n, which is
    below every tabulated bound, so j = ord(h) <= k would force a zero
    determinant.
    """
    pr = ProductReplacer(group, f"infwit|{seed}", length_bound=8)
    n = group.n
    for _ in range(budget):
        el = pr.sample()
        a, d = integerize(el.mat)
        power = [row[:] for row in a]
        dj = 1
        ok = True
        for j in range(1, k + 1):
            if j > 1:
                power = [[sum(x * y for x, y in zip(r, c)) for c in zip(*a)] for r in power]
            dj *= d
            det = det_bareiss(
                [[power[r][c] - (dj if r == c else 0) for c in range(n)] for r in range(n)]
            )
            if det == 0:
                ok = False
                break
        if ok:
            return el.word
    return None


def is_dense(group: LocalizedGroup, config: PipelineConfig | None = None) -> DensityResult:
    """Dense / NotDense / Undecided, with the reason.

    NotDense routes: finite closure, enveloping algebra below full
    dimension, or an invariant bilinear form over Q (degree >= 3).  Dense
    routes: a surjective congruence image at an odd probe prime, or an
    irreducible adjoint module (Norton) plus absolute irreducibility plus
    an element of infinite order.
    """
    cfg = config or PipelineConfig()
    n = group.n
    size = _finite_closure_size(group)
    if size is not None:
        return DensityResult("NotDense", f"finite group of order {size}")
    try:
        env_words_lifted(group, seed=f"{cfg.seed}|dense")
    except NotAbsolutelyIrreducible:
        return DensityResult("NotDense", "not absolutely irreducible over Q")
    if n >= 3:
        forms = invariant_form_space_q(group)
        if forms:
            return DensityResult(
                "NotDense",
                "preserves a nonzero bilinear form over Q",
                {"form": [list(map(int, forms[0]))]},
            )
    scfg = SurjConfig(
        bsgs_limit=min(cfg.bsgs_limit, 10**6),
        mc_trials=cfg.mc_trials,
        seed=f"{cfg.seed}|dense",
        order_bound=cfg.order_bound,
    )
    probes = []
    p = 2
    from .exact_arith import next_prime

    while len(probes) < 3 and p < 1000:
        p = next_prime(p)
        if group.mu % p != 0 and p**n <= scfg.bsgs_limit:
            probes.append(p)
    for p in probes:
        verdict = is_surjective(group, p, scfg)
        if verdict.surjective:
            return DensityResult(
                "Dense", f"surjective congruence image mod {p}", {"prime": p}
            )
    try:
        k = order_bound_for_degree(n, cfg.order_bound)
    except ValueError:
        return DensityResult("Undecided", "no element-order bound available for this degree")
    norton = primes_for_irreducible_adjoint(group, seed=f"{cfg.seed}|dense")
    if norton is not None:
        wit = _infinite_order_witness(group, k, cfg.seed)
        if wit is not None:
            return DensityResult(
                "Dense",
                "adjoint module irreducible over Q, absolutely irreducible, "
                "and an element of infinite order exists",
                {"witness_word": [list(l) for l in wit]},
            )
    return DensityResult("Undecided", "no density certificate found within budget")


@dataclass
class PiReport:
    group: dict
    method: str
    candidates: list[dict]
    verdicts: list[dict]
    pi: list[int]
    undecided: list[int]
    unresolved: list[int]
    seed: int | str
    timings: dict | None = None

    @property
    def complete(self) -> bool:
        return not self.undecided and not self.unresolved

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "group": self.group,
            "method": self.method,
            "candidates": self.candidates,
            "verdicts": self.verdicts,
            "pi": self.pi,
            "undecided": self.undecided,
            "unresolved": self.unresolved,
            "seed": self.seed,
            "timings": self.timings,
        }


def _route_for(method: str, n: int) -> str:
    if method not in ("auto", "adjoint", "norton", "aschbacher"):
        raise PipelineError(f"unknown method {method!r}")
    if method == "aschbacher" and not (is_prime(n) or n == 4):
        raise PipelineError(
            "the per-class route is only complete for prime degree or degree 4"
        )
    if method == "auto":
        return "aschbacher" if (is_prime(n) or n == 4) else "norton"
    return method


def _adjoint_module_sieve(group: LocalizedGroup, cfg: PipelineConfig) -> SieveResult:
    """Primes where the adjoint module drops absolute irreducibility.

    For small degree this is the flattened-witness determinant over the
    adjoint image group; the (n^2-1)^2-dimensional determinant is out of
    desk range from degree 5 on, where the Norton configuration provides
    the same certificate (corank one forces a trivial endomorphism ring).
    """
    if group.n <= 4:
        res = primes_for_abs_irreducible(ad_group(group), seed=f"{cfg.seed}|adenv")
        res.sieve_name = "abs-irreducible-adjoint"
        # adjoint entries are mu-integral, but the flatten determinant can
        # pick up denominators of the base group; those primes are excluded
        res.primes = {p for p in res.primes if group.mu % p != 0}
        return res
    res = primes_for_irreducible_adjoint(group, seed=f"{cfg.seed}|adenv")
    if res is None:
        raise PipelineError(
            "adjoint route: no corank-one adjoint-algebra element found; "
            "retry with another seed or use the norton/aschbacher method"
        )
    res.sieve_name = "abs-irreducible-adjoint(norton)"
    return res


def primes_non_surjective(
    group: LocalizedGroup, method: str | None = None, config: PipelineConfig | None = None
) -> PiReport:
    """The full pipeline: density check, sieves, per-prime verdicts."""
    cfg = config or PipelineConfig()
    if method is not None:
        cfg.method = method
    n = group.n
    if n < 2:
        raise PipelineError("degree must be >= 2")
    timings: dict[str, float] = {}
    t0 = time.monotonic()
    if not cfg.assume_dense:
        dens = is_dense(group, cfg)
        if dens.status == "NotDense":
            raise GroupNotDense(f"input is not dense: {dens.reason}")
        if dens.status == "Undecided":
            raise PipelineError(
                "density could not be certified; rerun with assume_dense if known"
            )
    timings["density"] = time.monotonic() - t0

    k = order_bound_for_degree(n, cfg.order_bound)
    route = _route_for(cfg.method, n)
    t0 = time.monotonic()
    results: list[SieveResult] = [primes_for_order(group, k, seed=f"{cfg.seed}|order")]
    if route == "norton":
        norton = primes_for_irreducible_adjoint(group, seed=f"{cfg.seed}|norton")
        if norton is None:
            route = "adjoint"  # sanctioned fallback
        else:
            results.append(primes_for_abs_irreducible(group, seed=f"{cfg.seed}|absirr"))
            results.append(norton)
    if route == "adjoint":
        results.append(_adjoint_module_sieve(group, cfg))
    if route == "aschbacher":
        results.append(primes_for_abs_irreducible(group, seed=f"{cfg.seed}|absirr"))
        results.append(primes_for_primitive(group, seed=f"{cfg.seed}|prim"))
        results.append(primes_for_reducible_second_derived(group, seed=f"{cfg.seed}|c3"))
        if n >= 3:
            # degree 2 has no invariant-form class: SL(2) is the symplectic group
            results.append(primes_for_similarity(group, seed=f"{cfg.seed}|c8"))
    timings["sieves"] = time.monotonic() - t0

    candidates: dict[int, list[str]] = {}
    unresolved: list[int] = []
    for res in results:
        for p in res.primes:
            candidates.setdefault(int(p), []).append(res.sieve_name)
        unresolved.extend(int(c) for c in res.unresolved)

    t0 = time.monotonic()
    scfg = cfg.surj_config()
    verdict_rows = []
    pi: list[int] = []
    undecided: list[int] = []
    for p in sorted(candidates):
        verdict = is_surjective(group, p, scfg)
        verdict_rows.append(
            {
                "p": p,
                "verdict": verdict.verdict,
                "certificate": verdict.certificate,
                **({"notes": verdict.notes} if verdict.notes else {}),
            }
        )
        if verdict.verdict == "Proper":
            pi.append(p)
        elif verdict.verdict == "Undecided":
            undecided.append(p)
    timings["verdicts"] = time.monotonic() - t0

    meta = group_to_json(group)
    meta["mu"] = group.mu
    return PiReport(
        group=meta,
        method=route,
        candidates=[{"p": p, "sieves": sorted(set(candidates[p]))} for p in sorted(candidates)],
        verdicts=verdict_rows,
        pi=sorted(pi),
        undecided=sorted(undecided),
        unresolved=sorted(unresolved),
        seed=cfg.seed,
        timings={k: round(v, 3) for k, v in timings.items()} if cfg.with_timings else None,
    )


# -- command line -----------------------------------------------------------------


def _emit(obj: dict, output: str | None) -> None:
    text = json.dumps(obj, indent=1) + "\n"
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="RNG seed (reports are reproducible per seed)")
    p.add_argument("--bsgs-limit", type=int, default=10**7, help="point budget for exact orders")
    p.add_argument("--mc-trials", type=int, default=64, help="random elements for order certificates")
    p.add_argument("--order-bound", type=int, default=None, help="element-order bound override (degrees > 12)")
    p.add_argument("--output", default=None, help="write the JSON report here instead of stdout")


def _config_from(args) -> PipelineConfig:
    return PipelineConfig(
        method=getattr(args, "method", "auto"),
        seed=args.seed,
        bsgs_limit=args.bsgs_limit,
        mc_trials=args.mc_trials,
        order_bound=args.order_bound,
        assume_dense=getattr(args, "assume_dense", False),
        with_timings=getattr(args, "timings", False),
    )


def _parse_poly(text: str) -> list[Fraction]:
    return [Fraction(part.strip()) for part in text.split(",")]


def _construct_from_args(args) -> LocalizedGroup:
    family = args.family.upper()
    if family == "K":
        a, b, m = (int(x) for x in args.params.split(","))
        return construct_K(a, b, m)
    if family == "C":
        pq = args.params.split(";")
        if len(pq) != 2:
            raise PipelineError("family C needs two polynomials: --params 'c0,..,1;c0,..,1'")
        return construct_C(_parse_poly(pq[0]), _parse_poly(pq[1]))
    if family in ("H", "F"):
        return construct_triangle(int(args.params), family)
    raise PipelineError(f"unknown family {args.family!r} (use K, C, H or F)")


def cli_main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="satctl",
        description="Exceptional primes of congruence images of dense subgroups of SL(n, Q)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_primes = sub.add_parser("primes", help="compute the exceptional prime set")
    p_primes.add_argument("--input", required=True, help="group description JSON file")
    p_primes.add_argument(
        "--method",
        choices=["auto", "adjoint", "norton", "aschbacher"],
        default="auto",
        help="candidate-assembly route",
    )
    p_primes.add_argument("--assume-dense", action="store_true", help="skip the density check")
    p_primes.add_argument("--timings", action="store_true", help="include wall-clock timings")
    _add_common(p_primes)

    p_dense = sub.add_parser("dense", help="test Zariski density")
    p_dense.add_argument("--input", required=True)
    _add_common(p_dense)

    p_surj = sub.add_parser("surjective", help="verdict for a single prime")
    p_surj.add_argument("--input", required=True)
    p_surj.add_argument("--prime", type=int, required=True)
    _add_common(p_surj)

    p_con = sub.add_parser("construct", help="write a corpus group description")
    p_con.add_argument("--family", required=True, help="K, C, H or F")
    p_con.add_argument(
        "--params",
        required=True,
        help="K: 'a,b,m'; C: ascending coefficients 'p;q'; H/F: 'k'",
    )
    p_con.add_argument("--output", default=None)

    args = parser.parse_args(argv)
    try:
        if args.command == "construct":
            group = _construct_from_args(args)
            _emit(group_to_json(group), args.output)
            return 0
        if args.command == "primes":
            group = _load(args.input)
            report = primes_non_surjective(group, config=_config_from(args))
            _emit(report.to_json(), args.output)
            return 0 if report.complete else 2
        if args.command == "dense":
            group = _load(args.input)
            res = is_dense(group, _config_from(args))
            _emit(
                {
                    "schema": DENSITY_SCHEMA,
                    "group": group_to_json(group),
                    "status": res.status,
                    "reason": res.reason,
                    "certificate": res.certificate,
                    "seed": args.seed,
                },
                args.output,
            )
            return 0 if res.status != "Undecided" else 2
        if args.command == "surjective":
            group = _load(args.input)
            cfg = _config_from(args)
            verdict = is_surjective(group, args.prime, cfg.surj_config())
            _emit(
                {
                    "schema": VERDICT_SCHEMA,
                    "group": group_to_json(group),
                    "p": verdict.p,
                    "verdict": verdict.verdict,
                    "certificate": verdict.certificate,
                    "seed": args.seed,
                },
                args.output,
            )
            return 0 if verdict.verdict != "Undecided" else 2
    except (PipelineError, GroupNotDense, SieveSearchError, NotAbsolutelyIrreducible, ValueError) as exc:
        print(f"satctl: error: {exc}", file=sys.stderr)
        return 1
    return 1


def _load(path: str) -> LocalizedGroup:
    with open(path) as fh:
        return group_from_json(json.load(fh))


def cli_main_entry() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    cli_main_entry()
