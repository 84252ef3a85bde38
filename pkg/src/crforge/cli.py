"""Command line interface.

Exit status: 0 clean, 1 input errors, 2 anomaly or counterexample
artifacts present (anomalies win when both occur).
"""

from __future__ import annotations

import argparse
import os
import sys

from . import canonical, counting, pipeline
from .drawing import FileFormatError, iter_records


def _shard(text: str) -> tuple[int, int]:
    i, _, k = text.partition("/")
    si, sk = int(i), int(k)
    if not 0 <= si < sk:
        raise argparse.ArgumentTypeError(f"bad shard {text!r}, need i/k with i<k")
    return si, sk


def _exit(input_errors: bool, anomalies: bool) -> int:
    if anomalies:
        return 2
    if input_errors:
        return 1
    return 0


def cmd_generate(args) -> int:
    known = {} if args.discovery else None
    run = pipeline.run_stage(
        args.n, args.max_cr, getattr(args, "from"), args.out,
        mode=args.mode, shard=args.shard, workers=args.workers,
        use_parity=not args.no_parity,
        distinct_faces=not args.no_distinct_faces, known_cr=known,
        checkpoint=args.checkpoint, resume=args.resume,
        stop_after=args.stop_after)
    print(f"{run.drawings_in} drawing(s) in, {run.raw_generated} generated, "
          f"{run.drawings_out} written to {run.output_path}")
    for note in run.notes:
        print("note:", note)
    for line in run.error_lines:
        print(line)
    for msg in run.input_errors:
        print("input error:", msg, file=sys.stderr)
    for msg in run.anomalies:
        print("anomaly:", msg, file=sys.stderr)
    return _exit(bool(run.input_errors),
                 bool(run.anomalies or run.error_lines))


def cmd_k12check(args) -> int:
    report = pipeline.run_k12_compound(
        args.k10, args.report, extend_cr=args.extend_cr,
        target_x=args.target_cr, threshold=args.threshold,
        workers=args.workers)
    sys.stdout.write(report.to_text())
    for msg in report.input_errors:
        print("input error:", msg, file=sys.stderr)
    bad = bool(report.hit_lines or report.anomalies or report.error_lines)
    return _exit(bool(report.input_errors), bad)


def cmd_verify(args) -> int:
    report = pipeline.verify_file(args.file, use_parity=not args.no_parity,
                                  ndp=args.ndp)
    sys.stdout.write(report.to_text())
    return _exit(not report.ok, bool(report.anomalies))


def cmd_canon(args) -> int:
    with open(args.file, "r", encoding="ascii") as fh:
        text = fh.read()
    store = canonical.DedupStore()
    bad = False
    for idx, rec in iter_records(text):
        if isinstance(rec, FileFormatError):
            print(f"record {idx}: {rec}", file=sys.stderr)
            bad = True
            continue
        code = canonical.canonical_code(rec)
        store.insert_if_new(code)
        print(code.hex())
    if args.store:
        store.save(args.store)
        print(f"# {len(store)} distinct code(s) -> {args.store}",
              file=sys.stderr)
    return _exit(bad, False)


def cmd_stats(args) -> int:
    runs = pipeline.load_runs(args.paths)
    table = pipeline.stats_table(runs)
    sys.stdout.write(table)
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
        with open(os.path.join(args.out_dir, "stats.txt"), "w",
                  encoding="ascii") as fh:
            fh.write(table)
        with open(os.path.join(args.out_dir, "stats.tsv"), "w",
                  encoding="ascii") as fh:
            fh.write(pipeline.stats_tsv(runs))
        from .report import render_stats_figures
        for path in render_stats_figures(runs, args.out_dir):
            print("wrote", path, file=sys.stderr)
    return 0


def cmd_plan(args) -> int:
    known = {} if args.discovery else counting.KNOWN_CR
    plan = counting.stage_plan(args.target_n, args.target_cr,
                               not args.no_parity, known_cr=known)
    sys.stdout.write(plan.as_table())
    return 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="forge",
        description="Exhaustive generation of good drawings of complete "
                    "graphs with bounded crossing numbers.")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="extend drawings of K_{n-1} to K_n")
    g.add_argument("--from", required=True, help="input drawing file")
    g.add_argument("--n", type=int, required=True, help="output graph order")
    g.add_argument("--max-cr", type=int, required=True, help="crossing budget")
    g.add_argument("--mode", choices=("alg1", "alg2"), default="alg1")
    g.add_argument("--shard", type=_shard, default=(0, 1), metavar="i/k")
    g.add_argument("--out", required=True)
    g.add_argument("--no-parity", action="store_true")
    g.add_argument("--no-distinct-faces", action="store_true")
    g.add_argument("--discovery", action="store_true",
                   help="ignore known crossing-number floors")
    g.add_argument("--workers", type=int, default=1)
    g.add_argument("--checkpoint", help="checkpoint file for resume")
    g.add_argument("--resume", action="store_true")
    g.add_argument("--stop-after", type=int, default=None,
                   help="stop after this many inputs (checkpoint testing)")
    g.set_defaults(func=cmd_generate)

    k = sub.add_parser("k12check",
                       help="extend and test for heavy subdrawings, "
                            "keeping no intermediate drawings")
    k.add_argument("--k10", required=True, help="input drawing file")
    k.add_argument("--report", help="write the verdict log here")
    k.add_argument("--extend-cr", type=int, default=100,
                   help="crossing count of the intermediate stage")
    k.add_argument("--target-cr", type=int, default=151,
                   help="crossing count of the tested extensions")
    k.add_argument("--threshold", type=int, default=104,
                   help="subdrawing crossing count that counts as a hit")
    k.add_argument("--workers", type=int, default=1)
    k.set_defaults(func=cmd_k12check)

    v = sub.add_parser("verify", help="validate a drawing file")
    v.add_argument("file")
    v.add_argument("--ndp", action="store_true",
                   help="also check the normal deficiency property")
    v.add_argument("--no-parity", action="store_true")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("canon", help="print canonical codes of a file")
    c.add_argument("file")
    c.add_argument("--store", help="persist the dedup store here")
    c.set_defaults(func=cmd_canon)

    s = sub.add_parser("stats", help="tabulate stage statistics")
    s.add_argument("paths", nargs="+",
                   help="stats.json files or directories holding them")
    s.add_argument("--out-dir",
                   help="write stats.txt, stats.tsv and figure PNGs here")
    s.set_defaults(func=cmd_stats)

    p = sub.add_parser("plan", help="print the stage budget table")
    p.add_argument("--target-n", type=int, required=True)
    p.add_argument("--target-cr", type=int, required=True)
    p.add_argument("--no-parity", action="store_true")
    p.add_argument("--discovery", action="store_true")
    p.set_defaults(func=cmd_plan)

    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"forge: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
