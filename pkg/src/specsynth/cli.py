"""command-line front end.

subcommands:
  synth <problem.spq>          run the conjunction synthesizer
  size <problem.spq>           count the grammar's derivable properties
  bench <dir>                  run every .spq under dir, emit a CSV report
  bv abstract <formula>        cover a bit-vector formula by inequalities
  bv join <conj> <conj>        cover the union of two inequality conjunctions
  bv census [formula...]       sweep all inequalities at the given width

exit codes: 0 a best conjunction (or a completed report), 2 a partial
result after a timeout, 1 an input or usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

from .sexpr import SexprError, parse
from .grammar import GrammarError, language_size, term_text
from .engine import EngineOptions
from .problem import Problem, ProblemError, load_problem
from . import bvpoly

SYNTH_SCHEMA = "specsynth.synth/1"
SIZE_SCHEMA = "specsynth.size/1"
BV_SCHEMA = "specsynth.bv/1"
CENSUS_SCHEMA = "specsynth.census/1"


def _overrides(args):
    ov = {}
    if args.timeout_secs is not None:
        ov["timeout_secs"] = args.timeout_secs
    if args.no_harden:
        ov["harden"] = False
    if getattr(args, "trace", None):
        ov["trace"] = True
    if getattr(args, "max_list_len", None) is not None:
        ov["list_len"] = args.max_list_len
    if getattr(args, "int_bits", None) is not None:
        ov["int_bits"] = args.int_bits
    if getattr(args, "fuel", None) is not None:
        ov["fuel"] = args.fuel
    return ov


def _load_extra_seeds(problem: Problem, path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            forms = parse(fh.read())
    except OSError as e:
        raise ProblemError(str(e), path)
    except SexprError as e:
        raise ProblemError(str(e), path, e.line)
    problem.add_seeds(forms, path=path)


def _write_trace(trace, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(trace, fh, indent=2)
        fh.write("\n")


def _stats_json(stats):
    out = {}
    for kind in ("synthesize", "check_soundness", "check_precision", "issat"):
        out[kind] = {"num": stats[kind],
                     "secs": round(stats[kind + "_secs"], 6)}
    out["last_iter_secs"] = round(stats["last_iter_secs"], 6)
    out["total_secs"] = round(stats["seconds"], 6)
    return out


def _synth_record(problem: Problem, result):
    props = [term_text(t) for t in problem.seeds] + result.texts
    b = problem.bounds
    return {
        "schema": SYNTH_SCHEMA,
        "problem": problem.path,
        "name": problem.name,
        "status": "partial" if result.partial else "best",
        "properties": props,
        "seeds": [term_text(t) for t in problem.seeds],
        "synthesized": result.texts,
        "stats": _stats_json(result.stats),
        "bounds": {"list_len": b.list_len, "tree_size": b.tree_size,
                   "int_min": b.int_min, "int_max": b.int_max,
                   "fuel": b.effective_fuel()},
        "options": {"timeout_secs": problem.options.timeout_secs,
                    "harden": problem.options.harden},
    }


def cmd_synth(args, out):
    problem = load_problem(args.problem, overrides=_overrides(args))
    if args.seed_props:
        _load_extra_seeds(problem, args.seed_props)
    result = problem.run()
    if args.trace:
        _write_trace(result.trace, args.trace)
    record = _synth_record(problem, result)
    if args.json:
        print(json.dumps(record, indent=2), file=out)
    else:
        for p in record["properties"]:
            print(p, file=out)
        print("", file=out)
        print(json.dumps(record), file=out)
    return 2 if result.partial else 0


def cmd_size(args, out):
    problem = load_problem(args.problem, overrides=_overrides(args))
    ls = language_size(problem.grammar)
    record = {"schema": SIZE_SCHEMA, "problem": problem.path,
              "name": problem.name, "count": ls.count,
              "saturated": ls.saturated}
    if args.json:
        print(json.dumps(record, indent=2), file=out)
    else:
        suffix = " (at least; count saturated)" if ls.saturated else ""
        print(f"{ls.count} derivable properties{suffix}", file=out)
    return 0


BENCH_COLUMNS = [
    "problem", "status", "properties",
    "synthesize_num", "synthesize_secs",
    "check_soundness_num", "check_soundness_secs",
    "check_precision_num", "check_precision_secs",
    "last_iter_secs", "total_secs",
]


def cmd_bench(args, out):
    files = sorted(
        os.path.join(root, f)
        for root, _, names in os.walk(args.dir)
        for f in names if f.endswith(".spq"))
    if not files:
        print(f"no .spq files under {args.dir}", file=sys.stderr)
        return 1
    w = csv.writer(out, lineterminator="\n")
    w.writerow(BENCH_COLUMNS)
    errors = partials = 0
    for path in files:
        name = os.path.splitext(os.path.basename(path))[0]
        try:
            problem = load_problem(path, overrides=_overrides(args))
            result = problem.run()
        except (ProblemError, GrammarError) as e:
            print(f"{path}: {e}", file=sys.stderr)
            w.writerow([name, "error"] + [""] * (len(BENCH_COLUMNS) - 2))
            errors += 1
            continue
        s = result.stats
        partials += result.partial
        w.writerow([
            name, "partial" if result.partial else "best",
            len(problem.seeds) + len(result.conjuncts),
            s["synthesize"], f"{s['synthesize_secs']:.3f}",
            s["check_soundness"], f"{s['check_soundness_secs']:.3f}",
            s["check_precision"], f"{s['check_precision_secs']:.3f}",
            f"{s['last_iter_secs']:.3f}", f"{s['seconds']:.3f}",
        ])
    return 1 if errors else (2 if partials else 0)


# --- bit-vector subcommands ---------------------------------------------------


def _bv_options(args):
    kw = {}
    if args.timeout_secs is not None:
        kw["timeout_secs"] = args.timeout_secs
    if args.no_harden:
        kw["harden"] = False
    if getattr(args, "trace", None):
        kw["trace"] = True
    return EngineOptions(**kw)


def _bv_seeds(path, k):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as e:
        raise ProblemError(str(e), path)
    seeds = []
    for ln in lines:
        ln = ln.strip()
        if ln:
            seeds.extend(bvpoly.formula_ineqs(ln, k))
    return seeds


def _bv_record(op, k, inputs, result, seeds=()):
    # the cover is the seeds plus what the engine added; reporting only
    # the synthesized part would overstate a seeded cover's solution set
    cover = list(seeds) + result.conjuncts
    points = bvpoly.abstraction_bools(cover, k)
    return {
        "schema": BV_SCHEMA,
        "op": op,
        "bits": k,
        "inputs": inputs,
        "status": "partial" if result.partial else "best",
        "properties": [bvpoly.ineq_text(q) for q in cover],
        "seeds": [bvpoly.ineq_text(q) for q in seeds],
        "synthesized": [bvpoly.ineq_text(q) for q in result.conjuncts],
        "solution_count": int(points.sum()),
        "stats": _stats_json(result.stats),
    }, cover


def _bv_emit(args, out, record, cover, result, reference, k):
    if args.json:
        print(json.dumps(record, indent=2), file=out)
    else:
        for p in record["properties"]:
            print(p, file=out)
        if args.grid:
            pts = bvpoly.abstraction_bools(cover, k)
            print("", file=out)
            print(bvpoly.render_grid(pts, k, reference=reference,
                                     fmt=args.grid), file=out)
        print("", file=out)
        print(json.dumps(record), file=out)
    return 2 if result.partial else 0


def cmd_bv_abstract(args, out):
    k = args.bits
    seeds = _bv_seeds(args.seed_props, k) if args.seed_props else ()
    try:
        result = bvpoly.abstract(args.formula, k, options=_bv_options(args),
                                 seeds=seeds, allow_slow=args.allow_slow)
    except ValueError as e:
        raise ProblemError(str(e))
    if args.trace:
        _write_trace(result.trace, args.trace)
    record, cover = _bv_record("abstract", k, [args.formula], result, seeds)
    return _bv_emit(args, out, record, cover, result, args.formula, k)


def cmd_bv_join(args, out):
    k = args.bits
    a = bvpoly.formula_ineqs(args.formula_a, k)
    b = bvpoly.formula_ineqs(args.formula_b, k)
    result = bvpoly.join(a, b, k, options=_bv_options(args),
                         allow_slow=args.allow_slow)
    if args.trace:
        _write_trace(result.trace, args.trace)
    record, cover = _bv_record("join", k, [args.formula_a, args.formula_b],
                               result)
    union = bvpoly.conjunction_bools(a, k) | bvpoly.conjunction_bools(b, k)
    return _bv_emit(args, out, record, cover, result, union, k)


def cmd_bv_census(args, out):
    k = args.bits
    res = bvpoly.census(k, formulas=list(args.formulas),
                        workers=args.workers, allow_slow=args.allow_slow)
    record = {
        "schema": CENSUS_SCHEMA,
        "bits": k,
        "workers": args.workers,
        "total": res.total,
        "tautologies": res.tautologies,
        "non_tautologies": res.non_tautologies,
        "formulas": [
            {"text": f, "sound_count": c, "intersection_points": m.bit_count()}
            for f, c, m in zip(args.formulas, res.sound_counts,
                               res.intersections)
        ],
    }
    if args.json:
        print(json.dumps(record, indent=2), file=out)
        return 0
    print(f"bits: {k}", file=out)
    print(f"total inequalities: {res.total}", file=out)
    print(f"tautologies: {res.tautologies}", file=out)
    print(f"non-tautologies: {res.non_tautologies}", file=out)
    for f in record["formulas"]:
        print(f"{f['text']}: sound {f['sound_count']}, "
              f"intersection {f['intersection_points']} points", file=out)
    return 0


# --- argument wiring ---------------------------------------------------------


def _add_run_flags(p, bounds=True):
    p.add_argument("--timeout-secs", type=float, default=None)
    p.add_argument("--no-harden", action="store_true",
                   help="keep precision counterexamples provisional")
    p.add_argument("--json", action="store_true",
                   help="emit only the JSON record")
    if bounds:
        p.add_argument("--max-list-len", type=int, default=None)
        p.add_argument("--int-bits", type=int, default=None,
                       help="integer domain becomes 0 .. 2^k - 1")
        p.add_argument("--fuel", type=int, default=None)


def build_parser():
    ap = argparse.ArgumentParser(
        prog="specsynth",
        description="synthesize the most precise conjunctive specification "
                    "a property grammar can express for a bounded query")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="run the synthesizer on a problem file")
    p.add_argument("problem")
    _add_run_flags(p)
    p.add_argument("--trace", metavar="PATH", default=None,
                   help="write the primitive-call trace as JSON")
    p.add_argument("--seed-props", metavar="PATH", default=None,
                   help="file of warm-start properties, s-expression syntax")
    p.set_defaults(fn=cmd_synth)

    p = sub.add_parser("size", help="count derivable properties")
    p.add_argument("problem")
    _add_run_flags(p)
    p.set_defaults(fn=cmd_size)

    p = sub.add_parser("bench", help="run a directory of problems, CSV out")
    p.add_argument("dir")
    _add_run_flags(p)
    p.set_defaults(fn=cmd_bench)

    bv = sub.add_parser("bv", help="bit-vector inequality domain")
    bvsub = bv.add_subparsers(dest="bv_command", required=True)

    p = bvsub.add_parser("abstract", help="cover a formula by inequalities")
    p.add_argument("formula")
    _add_run_flags(p, bounds=False)
    p.add_argument("--bits", type=int, default=bvpoly.DEFAULT_BITS)
    p.add_argument("--allow-slow", action="store_true")
    p.add_argument("--grid", choices=("ascii", "csv"), default=None,
                   help="render the cover's solution set")
    p.add_argument("--trace", metavar="PATH", default=None)
    p.add_argument("--seed-props", metavar="PATH", default=None,
                   help="file of known-sound inequalities, infix syntax")
    p.set_defaults(fn=cmd_bv_abstract)

    p = bvsub.add_parser("join", help="cover the union of two conjunctions")
    p.add_argument("formula_a")
    p.add_argument("formula_b")
    _add_run_flags(p, bounds=False)
    p.add_argument("--bits", type=int, default=bvpoly.DEFAULT_BITS)
    p.add_argument("--allow-slow", action="store_true")
    p.add_argument("--grid", choices=("ascii", "csv"), default=None)
    p.add_argument("--trace", metavar="PATH", default=None)
    p.set_defaults(fn=cmd_bv_join)

    p = bvsub.add_parser("census", help="sweep all inequalities at width k")
    p.add_argument("formulas", nargs="*")
    p.add_argument("--bits", type=int, default=bvpoly.DEFAULT_BITS)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--allow-slow", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_bv_census)

    return ap


def run_cli(argv=None, out=None) -> int:
    """parse argv, run the chosen subcommand, and return the exit code."""
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 1 if e.code else 0
    try:
        return args.fn(args, out if out is not None else sys.stdout)
    except (ProblemError, GrammarError, SexprError,
            bvpoly.BVSyntaxError, bvpoly.WidthError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def main(argv=None) -> int:
    return run_cli(argv)


if __name__ == "__main__":
    sys.exit(main())
