"""Command-line interface: ``dp2 cohomology``, ``dp2 verify`` and ``dp2 selftest``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import __version__
from .complexes import CACHE_ENV, CapExceeded, cohomology, dim_D, set_cache_dir
from .field import FieldSpec, gf, parse_field
from .verify import (
    CLAIMS,
    ClaimResult,
    verify_cor_2_3,
    verify_cor_2_4,
    verify_cor_2_5,
    verify_cor_3_4,
    verify_dsquared,
    verify_eq3,
    verify_equivariance,
    verify_lemma_2_1,
    verify_lemma_3_3,
    verify_prop_3_1,
    verify_remark,
    verify_theorem_2_2,
    verify_theorem_3_2,
)

log = logging.getLogger("dp2")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
DEFAULT_SEED = 0


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class Caps:
    m: int = 3
    k: int = 3
    extra_degree: int = 8
    e: int = 3
    force: bool = False

    def raised(self) -> bool:
        return (self.m, self.k, self.extra_degree, self.e) != (3, 3, 8, 3) or self.force


def parse_degrees(text: str) -> list[int]:
    """``"0..9"`` (inclusive), ``"2,4,6"`` or a single integer."""
    try:
        if ".." in text:
            lo, hi = (int(x) for x in text.split("..", 1))
            out = list(range(lo, hi + 1))
        else:
            out = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad degree range {text!r}; use a..b or a,b,c") from None
    if not out or min(out) < 0:
        raise argparse.ArgumentTypeError(f"degree range {text!r} is empty or negative")
    return out


def _field_arg(text: str) -> FieldSpec:
    try:
        return parse_field(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _estimate_bytes(m: int, degrees, e: int) -> int:
    """Rough peak for one slice: dense copies of d_k plus the tracked kernel elimination."""
    worst = 0
    for k in degrees:
        rows, cols = dim_D(m, k + 2), dim_D(m, k)
        worst = max(worst, (rows + 2 * cols) * cols * e // 8 + rows * cols)
    return worst


def _announce_caps(caps: Caps, m: int, degrees, e: int):
    if caps.raised():
        mib = _estimate_bytes(m, degrees, e) / 2**20
        print(f"# caps raised; memory estimate ~{mib:.1f} MiB", file=sys.stderr)


def _check_common(caps: Caps, m: int | None, field: FieldSpec | None):
    if m is not None and not 1 <= m <= caps.m:
        raise UsageError(f"m={m} outside 1..{caps.m} (raise with --max-m)")
    if field is not None and field.e > caps.e:
        raise UsageError(f"e={field.e} above cap {caps.e} (raise with --max-e)")


def _init_worker(cache_dir, level):
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    set_cache_dir(cache_dir)


def _run_pool(fn, tasks, jobs: int, cache_dir):
    """Map ``fn`` over ``tasks`` preserving input order, inline when jobs == 1."""
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    level = logging.getLogger().level
    with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker, initargs=(cache_dir, level)) as pool:
        return list(pool.map(fn, tasks))


# -- cohomology ---------------------------------------------------------------------

TABLE_COLUMNS = ("degree", "dim_Dk", "rank_in", "dim_ker_out", "dim_H", "expected_dim", "match")


def _cohomology_row(task) -> dict:
    m, degree, e, force, extra = task
    field = gf(e)
    if degree > m + extra:
        return {"m": m, "degree": degree, "field": str(field), "match": False, "error": f"degree above cap m+{extra}"}
    try:
        return cohomology(m, degree, field, force=force).to_dict()
    except CapExceeded as exc:
        return {"m": m, "degree": degree, "field": str(field), "match": False, "error": str(exc)}


def format_table(rows: list[dict]) -> str:
    header = list(TABLE_COLUMNS)
    body = []
    for r in rows:
        if "error" in r:
            body.append([str(r["degree"])] + ["-"] * (len(header) - 2) + [f"ERROR: {r['error']}"])
        else:
            body.append([str(r[c]).lower() if c == "match" else str(r[c]) for c in header])
    widths = [max(len(h), *(len(b[i]) for b in body)) for i, h in enumerate(header)]
    lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
    lines += ["  ".join(c.rjust(w) for c, w in zip(b, widths)) for b in body]
    return "\n".join(lines)


def format_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("m", "field") + TABLE_COLUMNS + ("error",))
    for r in rows:
        w.writerow([r["m"], r["field"]] + [r.get(c, "") for c in TABLE_COLUMNS] + [r.get("error", "")])
    return buf.getvalue().rstrip("\n")


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True)


def cmd_cohomology(args) -> int:
    field = args.field or gf(1)
    _check_common(args.caps, args.m, field)
    _announce_caps(args.caps, args.m, args.degrees, field.e)
    tasks = [(args.m, k, field.e, args.caps.force, args.caps.extra_degree) for k in args.degrees]
    rows = _run_pool(_cohomology_row, tasks, args.jobs, args.cache_dir)
    if args.format == "json":
        print("\n".join(_dumps(r) for r in rows))
    elif args.format == "csv":
        print(format_csv(rows))
    else:
        print(f"# H^k(DV), m={args.m}, field {field}")
        print(format_table(rows))
    if args.json:
        with open(args.json, "w") as fh:
            fh.writelines(_dumps(r) + "\n" for r in rows)
    return EXIT_OK if all(r["match"] for r in rows) else EXIT_FAIL


# -- verify -------------------------------------------------------------------------


def _default_degrees(m: int) -> list[int]:
    return list(range(m + 9))


def claim_call(name: str, opts: dict) -> ClaimResult:
    """Run one claim with CLI-style options (m, k, n, degrees, kmax, nmax, e, mode, seed)."""
    m = opts.get("m") or 2
    e = opts.get("e")
    field = gf(e) if e else None
    degrees = opts.get("degrees") or _default_degrees(m)
    mode = opts.get("mode") or "auto"
    seed = opts.get("seed", DEFAULT_SEED)
    if name == "lemma2.1":
        return verify_lemma_2_1(opts.get("degrees") or range(12), field)
    if name == "cor2.3":
        return verify_cor_2_3(m, degrees, field)
    if name == "cor2.4":
        return verify_cor_2_4(m, degrees, field)
    if name == "cor2.5":
        js = [(d - m) // 2 for d in degrees if d >= m and (d - m) % 2 == 0]
        return verify_cor_2_5(m, js, field)
    if name == "thm2.2":
        return verify_theorem_2_2(m, degrees, field)
    if name == "eq3":
        return verify_eq3(opts.get("nmax") or 40)
    if name == "dsquared":
        return verify_dsquared(m, degrees, field)
    if name == "equivariance":
        return verify_equivariance(m, opts.get("degrees") or list(range(9)), field)
    if name == "prop3.1":
        return verify_prop_3_1(m, field, mode, seed)
    if name == "lemma3.3":
        return verify_lemma_3_3(opts.get("n") or 2, opts.get("k") if opts.get("k") is not None else 1, field)
    if name == "thm3.2":
        return verify_theorem_3_2(m, opts.get("k") if opts.get("k") is not None else 1, field)
    if name == "cor3.4":
        return verify_cor_3_4(m, field, mode, seed)
    if name == "remark":
        return verify_remark(opts.get("kmax") or 5, field, mode, seed)
    raise UsageError(f"unknown claim {name!r}")


def _claim_task(task):
    name, opts = task
    try:
        return claim_call(name, opts)
    except (ValueError, CapExceeded) as exc:
        return exc


def _highlights(r: ClaimResult) -> str:
    ev = r.evidence
    if r.claim == "remark" and "verdicts" in ev:
        return "verdicts {" + ", ".join(f"{k}:{v['verdict'][:3]}" for k, v in sorted(ev["verdicts"].items())) + "}"
    if r.claim == "thm3.2" and "target_dim" in ev:
        return f"dims {ev['source_dim']}={ev['target_dim']}"
    if "dims" in ev:
        return "dims " + ",".join(str(v) for _, v in sorted(ev["dims"].items()))
    if "irreducibility" in ev:
        return f"dim {ev.get('dim')}, highest weight {ev.get('highest_weight')}, {ev['irreducibility']['verdict']}"
    return ""


def _check_verify_caps(caps: Caps, opts: dict):
    field = gf(opts["e"]) if opts.get("e") else None
    m = opts.get("m")
    _check_common(caps, m, field)
    k = opts.get("k")
    if k is not None and k > caps.k:
        raise UsageError(f"k={k} above cap {caps.k} (raise with --max-k)")
    n = opts.get("n")
    if n is not None and n > 2 * caps.m:
        raise UsageError(f"n={n} above cap {2 * caps.m} (raise with --max-m)")
    mm = m or 2
    for d in opts.get("degrees") or ():
        if d > mm + caps.extra_degree:
            raise UsageError(f"degree {d} above cap m+{caps.extra_degree} (raise with --max-extra-degree)")
    kmax = opts.get("kmax")
    if kmax is not None and kmax > 1 + caps.extra_degree:
        raise UsageError(f"kmax={kmax} above cap {1 + caps.extra_degree}")


def cmd_verify(args) -> int:
    unknown = [c for c in args.claims if c not in CLAIMS]
    if unknown:
        raise UsageError(f"unknown claim(s) {', '.join(unknown)}; known: {', '.join(CLAIMS)}")
    opts = {
        "m": args.m,
        "k": args.k,
        "n": args.n,
        "degrees": args.degrees,
        "kmax": args.kmax,
        "nmax": args.nmax,
        "e": args.field.e if args.field else None,
        "mode": args.mode,
        "seed": args.seed,
    }
    _check_verify_caps(args.caps, opts)
    _announce_caps(args.caps, args.m or 2, args.degrees or _default_degrees(args.m or 2), opts["e"] or 1)
    results = _run_pool(_claim_task, [(c, opts) for c in args.claims], args.jobs, args.cache_dir)
    for r in results:
        if isinstance(r, Exception):
            raise UsageError(str(r))
    lines = [r.to_json(args.timings) for r in results]
    if args.format == "json":
        print("\n".join(lines))
    else:
        for r in results:
            params = " ".join(f"{k}={v}" for k, v in r.parameters.items() if k != "degrees")
            print(f"{r.verdict.upper():4}  {r.claim:12} {r.field:8} {params}  {_highlights(r)}".rstrip())
            if not r.passed:
                print(f"      counterexample: {json.dumps(r.evidence.get('counterexample'), default=str)}")
    if args.json:
        with open(args.json, "w") as fh:
            fh.writelines(line + "\n" for line in lines)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


# -- selftest -----------------------------------------------------------------------


def _criterion_task(task):
    from .selftest import CRITERIA, run_criterion

    number, e = task
    t0 = time.perf_counter()
    ok, results = run_criterion(CRITERIA[number - 1], gf(e))
    return ok, results, time.perf_counter() - t0


def cmd_selftest(args) -> int:
    from .selftest import CRITERIA

    field = args.field or gf(1)
    _check_common(args.caps, None, field)
    outcomes = _run_pool(_criterion_task, [(c.number, field.e) for c in CRITERIA], args.jobs, args.cache_dir)
    first_failure = None
    for c, (ok, results, secs) in zip(CRITERIA, outcomes):
        print(f"criterion {c.number:2d}  {'PASS' if ok else 'FAIL'}  {c.title}  ({secs:.1f}s)")
        if not ok and first_failure is None:
            first_failure = next(r for r in results if not r.passed)
    if first_failure is not None:
        print(f"first counterexample: {first_failure.to_json()}")
        return EXIT_FAIL
    print("all criteria passed")
    return EXIT_OK


# -- entry point --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", type=_field_arg, default=None, help="field GF(2^e), written 2^e (default depends on the command)")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"seed for randomized checks (default {DEFAULT_SEED})")
    common.add_argument("--cache-dir", default=None, help=f"persist computed subspaces here (env {CACHE_ENV})")
    common.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    common.add_argument("--max-m", type=int, default=3)
    common.add_argument("--max-k", type=int, default=3)
    common.add_argument("--max-extra-degree", type=int, default=8, help="allow degrees up to m plus this")
    common.add_argument("--max-e", type=int, default=3)
    common.add_argument("--force", action="store_true", help="ignore the matrix column cap")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="dp2", description="Divided power complexes over GF(2^e) and their cohomology.")
    p.add_argument("--version", action="version", version=f"dp2 {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("cohomology", parents=[common], help="tabulate dim H^k(DV)")
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--degrees", type=parse_degrees, required=True, help="a..b or a,b,c")
    c.add_argument("--format", choices=("table", "json", "csv"), default="table")
    c.add_argument("--json", metavar="FILE", help="also write JSON lines to FILE")
    c.set_defaults(func=cmd_cohomology)

    v = sub.add_parser("verify", parents=[common], help="check claims", description="claims: " + ", ".join(CLAIMS))
    v.add_argument("claims", nargs="+", metavar="claim")
    v.add_argument("--m", type=int)
    v.add_argument("--k", type=int)
    v.add_argument("--n", type=int, help="dimension for lemma3.3")
    v.add_argument("--degrees", type=parse_degrees)
    v.add_argument("--kmax", type=int, help="largest degree for remark")
    v.add_argument("--nmax", type=int, help="largest n for eq3")
    v.add_argument("--mode", choices=("auto", "exhaustive", "randomized"), default="auto")
    v.add_argument("--format", choices=("text", "json"), default="text")
    v.add_argument("--json", metavar="FILE", help="write JSON lines to FILE")
    v.add_argument("--timings", action="store_true", help="include runtimes in JSON (breaks byte-identity)")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("selftest", parents=[common], help="run the acceptance suite")
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )
    args.caps = Caps(args.max_m, args.max_k, args.max_extra_degree, args.max_e, args.force)
    if args.jobs < 1:
        print("dp2: error: --jobs must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    args.cache_dir = args.cache_dir or os.environ.get(CACHE_ENV) or None
    if args.cache_dir:
        os.makedirs(args.cache_dir, exist_ok=True)
    set_cache_dir(args.cache_dir)
    print(f"# seed {args.seed}", file=sys.stderr)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"dp2: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        set_cache_dir(os.environ.get(CACHE_ENV) or None)


def main_exit():
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
