"""Command-line front end: ``wsfzeta {expand,verify,compute,bench}``.

Exit codes: 0 when every check passes, 1 when some identity fails, 2 on
usage errors (bad index strings, violated preconditions, unknown flags).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, Optional

from . import fmzv_engine as fe
from . import identity_checker as ic
from . import index_algebra as ia
from . import smzv_numeric as sn

CACHE_ENV = "WSFZETA_CACHE_DIR"

log = logging.getLogger("wsfzeta")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# helpers


def _index_arg(text: str) -> ia.Index:
    try:
        k = ia.parse_index(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if not k:
        raise argparse.ArgumentTypeError("index must be nonempty")
    return k


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise UsageError(message)


def _need(args, *names: str) -> None:
    missing = [n for n in names if getattr(args, n) is None]
    _require(not missing, "missing required option(s): " + ", ".join("--" + n.replace("_", "-") for n in missing))


def _check_kri(k: int, r: int, i: int, odd_r: bool) -> None:
    _require(1 <= i <= r <= k, f"need 1 <= i <= r <= k, got k={k}, r={r}, i={i}")
    if odd_r:
        _require(r % 2 == 1, f"r must be odd, got r={r}")


def _variants(name: str) -> list[bool]:
    return {"nonstar": [False], "star": [True], "both": [False, True]}[name]


def _emit(args, text: str, payload: Any) -> None:
    body = json.dumps(payload, indent=2) + "\n" if args.json else text + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(body)
    else:
        sys.stdout.write(body)


def _cache(args) -> Optional[fe.ValueCache]:
    directory = args.cache or os.environ.get(CACHE_ENV)
    return fe.ValueCache(directory) if directory else None


def _run_job(job: tuple[Callable, tuple, dict]):
    fn, a, kw = job
    return fn(*a, **kw)


def _map(jobs: list[tuple[Callable, tuple, dict]], workers: int) -> list:
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_job, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    return [_run_job(j) for j in jobs]


# ---------------------------------------------------------------------------
# expand


def _combination_json(c: ia.IndexCombination) -> list[dict[str, str]]:
    return [{"index": ia.format_index(k), "coefficient": str(a)} for k, a in c.items()]


def cmd_expand(args) -> int:
    kind = args.kind
    if kind in ("phi", "dual", "star", "G1", "G2", "G"):
        _need(args, "index")
    if kind in ("G1", "G2", "G"):
        _need(args, "l")
        _require(args.l >= 0, "--l must be nonnegative")
    if kind in ("F", "H"):
        _need(args, "k", "r", "i")
        _check_kri(args.k, args.r, args.i, odd_r=False)

    if kind == "dual":
        d = ia.hoffman_dual(args.index)
        _emit(args, ia.format_index(d), {"kind": kind, "index": ia.format_index(args.index), "result": ia.format_index(d)})
        return 0
    if kind == "phi":
        c = ia.phi(args.index)
    elif kind == "star":
        c = ia.star_expand(args.index)
    elif kind == "G1":
        c = ia.build_G1(args.index, args.l)
    elif kind == "G2":
        c = ia.build_G2(args.index, args.l)
    elif kind == "G":
        c = ia.build_G(args.index, args.l)
    elif kind == "F":
        c = ia.build_F(args.k, args.r, args.i)
    else:
        c = ia.build_H(args.k, args.r, args.i)
    params = {
        name: (ia.format_index(v) if name == "index" else v)
        for name in ("index", "l", "k", "r", "i")
        if (v := getattr(args, name)) is not None
    }
    _emit(args, c.to_text(), {"kind": kind, "params": params, "result": c.to_text(), "terms": _combination_json(c)})
    return 0


# ---------------------------------------------------------------------------
# verify


def _lemma_job_results(target: str, args) -> list[dict[str, Any]]:
    if args.k is not None:
        _need(args, "r", "i")
        grid = [(args.k, args.r, args.i)]
    else:
        _require(args.max_k >= 1, "--max-k must be positive")
        grid = ic.lemma_grid(args.max_k, odd_r=target != "lemma1")
    odd = target != "lemma1"
    for k, r, i in grid:
        _check_kri(k, r, i, odd_r=odd)
    fn = {"key-lemma": ic.check_key_lemma, "lemma1": ic.check_lemma1, "lemma2": ic.check_lemma2}[target]
    results = _map([(fn, g, {}) for g in grid], args.workers)
    out = [res.to_json() for res in results]
    if target == "lemma2" and args.k is None:
        out.extend(ic.check_binomial_identity(d).to_json() for d in range(2, 65))
    return out


def _fmzv_jobs(target: str, args) -> list[tuple[Callable, tuple, dict]]:
    _require(2 <= args.pmin <= args.pmax, "need 2 <= --pmin <= --pmax")
    primes = fe.primes_in(args.pmin, args.pmax)
    jobs: list[tuple[Callable, tuple, dict]] = []
    if target == "fmzv-wsf":
        _need(args, "k")
        if args.all_ri:
            grid = [(args.k, r, i) for r in range(1, args.k + 1, 2) for i in range(1, r + 1)]
        else:
            _need(args, "r", "i")
            grid = [(args.k, args.r, args.i)]
        for k, r, i in grid:
            _check_kri(k, r, i, odd_r=True)
        for k, r, i in grid:
            for star in _variants(args.variant):
                jobs.append((fe.verify_weighted_sum, (k, r, i, primes), {"star": star}))
        return jobs

    if args.index is not None:
        indices = [args.index]
    else:
        _need(args, "max_weight")
        _require(args.max_weight >= 1, "--max-weight must be positive")
        indices = list(ia.indices_up_to(args.max_weight))
    if target == "phi":
        jobs = [(fe.verify_phi_duality, (k, primes), {}) for k in indices]
    elif target == "oyama":
        ls = [args.l] if args.l is not None else list(range(args.max_l + 1))
        _require(all(l >= 0 for l in ls), "--l must be nonnegative")
        jobs = [(fe.verify_oyama, (k, l, primes), {}) for k in indices for l in ls]
    elif target == "antipode":
        jobs = [(fe.verify_antipode, (k, primes), {}) for k in indices]
    elif target == "symsum":
        if args.index is not None:
            _require(len(args.index) <= fe.MAX_SYMMETRIC_DEPTH, f"depth must be at most {fe.MAX_SYMMETRIC_DEPTH}")
        else:
            indices = [k for k in indices if len(k) <= args.max_depth]
        jobs = [(fe.verify_symmetric_sum, (k, primes), {"star": s}) for k in indices for s in _variants(args.variant)]
    return jobs


def _smzv_jobs(args) -> list[tuple[Callable, tuple, dict]]:
    _need(args, "k")
    _require(args.k in sn.SUPPORTED_SMZV_WEIGHTS, f"--k must be one of {sn.SUPPORTED_SMZV_WEIGHTS}")
    _require(args.M >= 2, "--M must be at least 2")
    if args.all_ri:
        grid = [(args.k, r, i) for r in range(1, args.k + 1, 2) for i in range(1, r + 1)]
    else:
        _need(args, "r", "i")
        grid = [(args.k, args.r, args.i)]
    for k, r, i in grid:
        _check_kri(k, r, i, odd_r=True)
    kw = {"M": args.M, "max_den": args.max_den, "tol": args.tol, "check_stability": args.stability}
    return [(sn.verify_smzv_weighted_sum, g, dict(kw, star=s)) for g in grid for s in _variants(args.variant)]


def cmd_verify(args) -> int:
    target = args.target
    if target in ("key-lemma", "lemma1", "lemma2"):
        reports = _lemma_job_results(target, args)
    elif target == "smzv-wsf":
        reports = [rep.to_json() for rep in _map(_smzv_jobs(args), args.workers)]
    else:
        jobs = _fmzv_jobs(target, args)
        cache = _cache(args)
        if cache is None:
            results = _map(jobs, args.workers)
        else:
            # values flow through the cache in this process; primes fan out instead
            results = [fn(*a, **dict(kw, workers=args.workers, cache=cache)) for fn, a, kw in jobs]
        reports = [rep.to_json() for rep in results]

    def ok(rep: dict[str, Any]) -> bool:
        return rep["summary"]["all_pass"] if "summary" in rep else rep["pass"]

    failures = [rep for rep in reports if not ok(rep)]
    doc = {
        "target": target,
        "n_reports": len(reports),
        "all_pass": not failures,
        "first_counterexample": failures[0] if failures else None,
        "reports": reports,
    }
    summary = f"{target}: {len(reports) - len(failures)}/{len(reports)} checks pass"
    if failures:
        summary += "; first counterexample: " + json.dumps(failures[0])
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(json.dumps(doc, indent=2) + "\n")
        print(summary)
    elif args.json:
        sys.stdout.write(json.dumps(doc, indent=2) + "\n")
    else:
        print(summary)
    return 0 if not failures else 1


# ---------------------------------------------------------------------------
# compute


def cmd_compute(args) -> int:
    _need(args, "index")
    k = args.index
    if args.value in ("fmzv", "fmzsv"):
        _need(args, "prime")
        _require(fe.is_prime(args.prime) and args.prime <= fe.MAX_MODULUS, f"--prime must be a prime below 2**31, got {args.prime}")
        star = args.value == "fmzsv"
        cache = _cache(args)
        residue = cache.get(args.prime, k, star) if cache is not None else None
        if residue is None:
            residue = (fe.fmzsv_mod_p if star else fe.fmzv_mod_p)(k, args.prime).residue
            if cache is not None:
                cache.put_many(args.prime, {(k, star): residue})
        payload = {"quantity": args.value, "index": ia.format_index(k), "p": args.prime, "star": star, "residue": residue}
        text = f"{args.value}({ia.format_index(k)}) mod {args.prime} = {residue}"
    else:
        _require(args.M >= 1, "--M must be positive")
        if args.value == "mzv-trunc":
            v = sn.truncated_mzv(k, args.M, star=args.star)
        else:
            _require(args.M >= 2, "--M must be at least 2")
            v = (sn.smzsv_approx if args.star else sn.smzv_star_approx)(k, args.M)
        payload = {"quantity": args.value, **sn.describe(v)}
        text = f"{args.value}({ia.format_index(k)}; M={args.M}, star={args.star}) = {float(v.value):.15g}"
    _emit(args, text, payload)
    return 0


# ---------------------------------------------------------------------------
# bench


def cmd_bench(args) -> int:
    _require(2 <= args.pmin <= args.pmax, "need 2 <= --pmin <= --pmax")
    indices = list(ia.indices_up_to(args.max_weight))
    primes = fe.primes_in(args.pmin, args.pmax)
    start = time.perf_counter()
    for p in primes:
        for k in indices:
            fe.fmzv_mod_p(k, p)
    elapsed = time.perf_counter() - start
    pairs = len(indices) * len(primes)
    payload = {
        "grid": {"max_weight": args.max_weight, "pmin": args.pmin, "pmax": args.pmax},
        "pairs": pairs,
        "seconds": elapsed,
        "pairs_per_second": pairs / elapsed if elapsed else None,
    }
    _emit(args, f"{pairs} (index, prime) pairs in {elapsed:.3f} s: {pairs / elapsed:.1f} pairs/s", payload)
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the result here instead of stdout")
    common.add_argument("--cache", help=f"value cache directory (or set ${CACHE_ENV})")
    common.add_argument("--workers", type=int, default=fe.default_workers())
    common.add_argument("--json", action="store_true", help="print JSON instead of text")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="wsfzeta", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    ex = sub.add_parser("expand", parents=[common], help="expand an index operator")
    ex.add_argument("kind", choices=["phi", "dual", "star", "F", "G1", "G2", "G", "H"])
    ex.add_argument("--index", type=_index_arg)
    ex.add_argument("--l", type=int)
    ex.add_argument("--k", type=int)
    ex.add_argument("--r", type=int)
    ex.add_argument("--i", type=int)
    ex.set_defaults(func=cmd_expand)

    ve = sub.add_parser("verify", parents=[common], help="verify an identity over a parameter sweep")
    ve.add_argument(
        "target",
        choices=["key-lemma", "lemma1", "lemma2", "fmzv-wsf", "phi", "oyama", "antipode", "symsum", "smzv-wsf"],
    )
    ve.add_argument("--k", type=int)
    ve.add_argument("--r", type=int)
    ve.add_argument("--i", type=int)
    ve.add_argument("--all-ri", action="store_true", help="every odd r <= k and every i")
    ve.add_argument("--max-k", type=int, default=12)
    ve.add_argument("--index", type=_index_arg)
    ve.add_argument("--max-weight", type=int)
    ve.add_argument("--max-depth", type=int, default=4)
    ve.add_argument("--l", type=int)
    ve.add_argument("--max-l", type=int, default=3)
    ve.add_argument("--pmin", type=int, default=2)
    ve.add_argument("--pmax", type=int, default=200)
    ve.add_argument("--variant", choices=["nonstar", "star", "both"], default="both")
    ve.add_argument("--M", type=int, default=sn.DEFAULT_M)
    ve.add_argument("--max-den", type=int, default=sn.DEFAULT_MAX_DEN)
    ve.add_argument("--tol", type=float, default=sn.DEFAULT_TOL)
    ve.add_argument("--stability", action="store_true", help="also require the same rational at 2M")
    ve.set_defaults(func=cmd_verify)

    co = sub.add_parser("compute", parents=[common], help="compute a single value")
    co.add_argument("value", choices=["fmzv", "fmzsv", "mzv-trunc", "smzv"])
    co.add_argument("--index", type=_index_arg)
    co.add_argument("--prime", type=int)
    co.add_argument("--M", type=int, default=sn.DEFAULT_M)
    co.add_argument("--star", action="store_true")
    co.set_defaults(func=cmd_compute)

    be = sub.add_parser("bench", parents=[common], help="throughput of the mod-p kernel")
    be.add_argument("--max-weight", type=int, default=4)
    be.add_argument("--pmin", type=int, default=1000)
    be.add_argument("--pmax", type=int, default=1200)
    be.set_defaults(func=cmd_bench)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s %(name)s: %(message)s")
    if args.workers < 1:
        parser.error("--workers must be positive")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.exit(2, f"{parser.prog}: error: {exc}\n")


if __name__ == "__main__":
    sys.exit(main())
