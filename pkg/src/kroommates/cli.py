"""Command-line front end.

Exit codes: 0 success / stable, 1 unsatisfiable / blocked, 2 input error,
3 search budget exhausted.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .core import Instance, RoommatesError, validate_instance
from .formats import (
    dumps_instance,
    dumps_matchings,
    read_instance,
    read_matching,
    write_instance,
    write_text_atomic,
)
from .gen import (
    GenSpec,
    batch_seed,
    classify,
    completeness_degree,
    generate,
    mutual_acceptability_rate,
    preset,
)
from .knet import k_extend
from .solver import (
    IRVING_ATTEMPTS,
    ORACLE_MAX_AGENTS,
    SAT,
    TIMEOUT,
    Budget,
    brute_force_oracle,
    enumerate_k_stable,
    find_k_stable,
    verify_lists,
)

EXIT_OK, EXIT_NO, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3

log = logging.getLogger("kroommates")


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _emit(text: str, out: str | None) -> None:
    if out:
        write_text_atomic(out, text)
    else:
        sys.stdout.write(text)


def _load(path: str):
    inst = read_instance(path)
    problems = validate_instance(inst)
    if problems:
        raise InputError(f"{path}: " + "; ".join(problems))
    return inst


def _budget(args) -> Budget:
    return Budget(args.max_nodes, args.max_seconds)


def _metrics_line(inst) -> str:
    lists = k_extend(inst, 0).lists
    cd = completeness_degree(inst)
    try:
        rate = mutual_acceptability_rate(lists)
        return f"cd={cd:.4f} map={rate:.4f} class={classify(rate)}"
    except ValueError:
        return f"cd={cd:.4f} map=nan class=LMA"


def cmd_generate(args) -> int:
    manual = {"edge_prob": args.edge_prob, "truncate": args.truncate}
    extra = dict(
        criteria_count=args.criteria,
        response_rate=args.response,
        profile_seed=args.profile_seed,
        choices_per_criterion=args.choices,
        unwanted_pairs=args.unwanted,
    )
    if args.preset:
        given = [k.replace("_", "-") for k, v in manual.items() if v is not None]
        if given:
            raise InputError(f"--preset excludes --{', --'.join(given)}")
    elif args.edge_prob is None:
        raise InputError("--edge-prob is required without --preset")

    def spec_for(seed: int) -> GenSpec:
        if args.preset:
            return preset(args.preset, args.agents, seed, **extra)
        return GenSpec(n=args.agents, p=args.edge_prob, seed=seed, truncate=args.truncate, **extra)

    stem = f"{args.preset or 'er'}_n{args.agents}"
    if args.count == 1:
        out = Path(args.out or f"{stem}_s{args.seed}.json")
        inst = generate(spec_for(args.seed))
        write_instance(out, inst)
        print(f"{out}\tn={len(inst.agents)} {_metrics_line(inst)}")
        return EXIT_OK
    outdir = Path(args.out or stem)
    for i in range(args.count):
        seed = batch_seed(args.seed, i)
        inst = generate(spec_for(seed))
        path = outdir / f"{stem}_{i:04d}.json"
        write_instance(path, inst)
        print(f"{path}\tseed={seed} n={len(inst.agents)} {_metrics_line(inst)}")
    return EXIT_OK


def cmd_extend(args) -> int:
    inst = _load(args.input)
    ext = k_extend(inst, args.k, break_ties_at_zero=args.tie_break_at_zero)
    lists_inst = Instance(inst.agents, ext.lists, inst.unwanted)
    _emit(dumps_instance(lists_inst, ext.provenance), args.output)
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = _load(args.input)
    budget = _budget(args)
    if args.oracle:
        if len(inst.agents) > ORACLE_MAX_AGENTS:
            raise InputError(f"--oracle supports at most {ORACLE_MAX_AGENTS} agents")
        found = brute_force_oracle(inst, args.k)
        if not args.all:
            found = found[:1]
        elif args.limit:
            found = found[: args.limit]
    elif args.all:
        try:
            found = enumerate_k_stable(inst, args.k, args.limit, budget)
        except TimeoutError:
            print("timeout", file=sys.stderr)
            return EXIT_BUDGET
    else:
        r = find_k_stable(inst, args.k, budget, args.irving_attempts)
        log.info("outcome=%s method=%s nodes=%d seconds=%.3f", r.outcome, r.method, r.nodes, r.seconds)
        if r.outcome == TIMEOUT:
            print("timeout", file=sys.stderr)
            return EXIT_BUDGET
        found = [r.matching] if r.outcome == SAT else []
    if not found:
        print("unsatisfiable", file=sys.stderr)
        return EXIT_NO
    _emit(dumps_matchings(found), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    inst = _load(args.input)
    m = read_matching(args.matching, inst.agents)
    lists = k_extend(inst, args.k).lists
    cert = verify_lists(lists, m, inst.forbidden_pairs())
    if cert.stable:
        print(f"stable (k={args.k})")
        return EXIT_OK
    print(f"blocked (k={args.k}): {len(cert.blocking)} blocking pair(s)")
    for x, y in cert.blocking:
        print(f"{x}\t{y}")
    return EXIT_NO


def cmd_bench(args) -> int:
    from .bench import COLUMNS, ERROR, instance_files, run_bench

    if not instance_files(args.dir):
        write_text_atomic(args.out, ",".join(COLUMNS) + "\n")
        print(f"no instance files under {args.dir}", file=sys.stderr)
        return EXIT_INPUT
    records = run_bench(args.dir, args.k, args.out, _budget(args), args.jobs)
    if args.plot:
        from .plotting import plot_bench

        plot_bench(records, args.plot)
    if records and all(r.outcome == ERROR for r in records):
        return EXIT_INPUT
    return EXIT_OK


def cmd_plot(args) -> int:
    from .bench import read_records
    from .plotting import plot_bench

    plot_bench(read_records(args.csv), args.out, args.title)
    return EXIT_OK


def _k_list(text: str) -> list[int]:
    try:
        ks = sorted({int(t) for t in text.split(",") if t.strip()})
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad k list: {text!r}") from None
    if not ks or ks[0] < 0:
        raise argparse.ArgumentTypeError("k values must be non-negative")
    return ks


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _add_budget(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-nodes", type=_positive, default=10_000_000, help="search node budget")
    p.add_argument("--max-seconds", type=float, default=60.0, help="search time budget")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="kroommates", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write random instance(s)")
    g.add_argument("--agents", type=int, required=True)
    g.add_argument("--edge-prob", type=float)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--truncate", type=_positive)
    g.add_argument("--criteria", type=_nonneg, default=0)
    g.add_argument("--response", type=float, default=0.0)
    g.add_argument("--profile-seed", type=int, default=0)
    g.add_argument("--choices", type=_positive, default=3, help="choices per criterion")
    g.add_argument("--unwanted", type=_nonneg, default=0, help="random unwanted declarations to inject")
    g.add_argument("--preset", choices=["hma", "lma"])
    g.add_argument("--count", type=_positive, default=1, help="instances to write (seed ^ i each)")
    g.add_argument("--out", help="output file, or directory when --count > 1")
    g.set_defaults(func=cmd_generate)

    e = sub.add_parser("extend", help="write k-extended lists with provenance")
    e.add_argument("--input", required=True)
    e.add_argument("--k", type=_nonneg, required=True)
    e.add_argument("--output")
    e.add_argument("--tie-break-at-zero", action="store_true")
    e.set_defaults(func=cmd_extend)

    s = sub.add_parser("solve", help="find k-stable matching(s)")
    s.add_argument("--input", required=True)
    s.add_argument("--k", type=_nonneg, default=0)
    s.add_argument("--all", action="store_true", help="enumerate matchings")
    s.add_argument("--limit", type=_positive, default=10)
    s.add_argument("--oracle", action="store_true", help="exhaustive search (small instances)")
    s.add_argument("--out")
    s.add_argument("--irving-attempts", type=_nonneg, default=IRVING_ATTEMPTS,
                   help="tie refinements tried with Irving's algorithm before searching")
    _add_budget(s)
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="check a matching for k-blocking pairs")
    v.add_argument("--input", required=True)
    v.add_argument("--k", type=_nonneg, default=0)
    v.add_argument("--matching", required=True)
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="solve a directory of instances, write CSV")
    b.add_argument("--dir", required=True)
    b.add_argument("--k", type=_k_list, default=[0, 2], help="comma-separated k values")
    b.add_argument("--out", required=True)
    b.add_argument("--jobs", type=_positive, default=1)
    b.add_argument("--plot", help="also render a PNG/PDF summary figure")
    _add_budget(b)
    b.set_defaults(func=cmd_bench)

    pl = sub.add_parser("plot", help="render a figure from a bench CSV")
    pl.add_argument("--csv", required=True)
    pl.add_argument("--out", required=True)
    pl.add_argument("--title")
    pl.set_defaults(func=cmd_plot)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (InputError, RoommatesError, OSError, ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as e:  # exit codes are restricted to 0-3
        log.exception("unexpected failure")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
