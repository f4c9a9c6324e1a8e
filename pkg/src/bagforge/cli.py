"""Command-line front end.

Exit status: 0 success, 2 usage error, 3 input or format error,
4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import data
from .bench import format_tsv, run_bench
from .chart import generate
from .domains import compile_domains, compute_inner, compute_outer, dumps, load_domains
from .errors import BagforgeError, CacheError, InvariantError
from .grammar import Grammar, load_bag, load_grammar
from .oracle import derivation_oracle, permutation_oracle

EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_INVARIANT = 4


def resolve(path: str, subdir: str = "") -> str:
    """A filesystem path if it exists, else the bundled file of that name."""
    if path.startswith(data.PREFIX) or Path(path).exists():
        return path
    bundled = data.names()
    for candidate in (path, f"{subdir}/{path}" if subdir else path):
        if candidate in bundled:
            return data.PREFIX + candidate
    raise BagforgeError(f"no such file: {path}")


def default_cache(grammar_path: str) -> Path:
    if grammar_path.startswith(data.PREFIX):
        root = Path(os.environ.get("XDG_CACHE_HOME") or Path.home() / ".cache") / "bagforge"
        return root / (Path(grammar_path[len(data.PREFIX):]).stem + ".domains")
    return Path(grammar_path).with_suffix(".domains")


def _grammar(args) -> tuple[str, Grammar]:
    path = resolve(args.grammar)
    grammar = load_grammar(path)
    if getattr(args, "start", None):
        grammar = grammar.with_start(args.start)
    return path, grammar


def _outer(args, path: str, grammar: Grammar, err):
    if args.domains:
        try:
            text = Path(args.domains).read_text(encoding="utf-8")
        except OSError as exc:
            raise CacheError(f"cannot read domain cache {args.domains}: {exc.strerror}") from None
        return load_domains(text, grammar.content_hash)
    cache = default_cache(path)
    if cache.exists():
        try:
            return load_domains(cache.read_text(encoding="utf-8"), grammar.content_hash)
        except CacheError:
            print(f"note: domain cache {cache} is out of date, recompiling", file=err)
    else:
        print(f"note: no domain cache at {cache}, compiling", file=err)
    outer = compute_outer(grammar)
    try:
        cache.parent.mkdir(parents=True, exist_ok=True)
        cache.write_text(dumps(outer), encoding="utf-8")
    except OSError:
        print(f"note: could not write {cache}", file=err)
    return outer


def cmd_compile(args, out, err) -> int:
    path, grammar = _grammar(args)
    _, outer = compile_domains(grammar)
    target = Path(args.out) if args.out else default_cache(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(dumps(outer), encoding="utf-8")
    print(f"{target}: {len(outer)} outer-domain triples", file=out)
    return 0


def cmd_generate(args, out, err) -> int:
    path, grammar = _grammar(args)
    bag = load_bag(resolve(args.bag, "bags"), grammar)
    outer = _outer(args, path, grammar, err) if args.prune else None
    trace = (lambda line: print(line, file=err)) if args.trace_prune else None
    result = generate(grammar, bag, outer, first_solution=args.first_solution, trace=trace)
    if args.all_derivations:
        for d in result.derivations:
            print(d.bracketed, file=out)
    else:
        for s in result.strings:
            print(s, file=out)
    stats = result.stats.as_dict(timing=not args.no_timing)
    stats["solutions"] = len(result.strings)
    if args.stats == "tsv":
        print("\t".join(stats), file=out)
        print("\t".join(str(v) for v in stats.values()), file=out)
    else:
        print(json.dumps(stats), file=out)
    return 0


def cmd_oracle(args, out, err) -> int:
    path, grammar = _grammar(args)
    if args.depth is not None:
        for line in derivation_oracle(grammar, args.depth).lines():
            print(line, file=out)
        return 0
    if not args.bag:
        raise BagforgeError("oracle needs --bag or --depth")
    bag = load_bag(resolve(args.bag, "bags"), grammar)
    for s in sorted(permutation_oracle(grammar, bag)):
        print(s, file=out)
    return 0


def cmd_bench(args, out, err) -> int:
    path, grammar = _grammar(args)
    if args.bag:
        names = [resolve(b, "bags") for b in args.bag]
    else:
        names = [data.PREFIX + n for n in data.names(".bag") if n.startswith("bags/bench/")]
    bags = [(n, load_bag(n, grammar)) for n in names]
    outer = _outer(args, path, grammar, err)
    rows = run_bench(grammar, bags, outer)
    if args.no_timing:
        for row in rows:
            row.time_unpruned = row.time_pruned = 0.0
    out.write(format_tsv(rows))
    return 0


def cmd_dump_domains(args, out, err) -> int:
    path, grammar = _grammar(args)
    if args.kind == "inner":
        domains = compute_inner(grammar)
    elif args.domains:
        domains = _outer(args, path, grammar, err)
    else:
        domains = compute_outer(grammar)
    if args.full:
        lines = [t.line(domains.kind) for t in domains.triples if args.cat in (None, t.sign.category)]
    else:
        lines = domains.category_lines(args.cat)
    for line in lines:
        print(line, file=out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bagforge", description="Bag generation with connectivity pruning.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def command(name: str, func, help: str, bag: bool = False) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help, description=help)
        p.add_argument("--grammar", required=name != "bench", default=None, help="grammar file or bundled name")
        p.add_argument("--start", help="start sign, e.g. NP (default from the grammar)")
        if bag:
            p.add_argument("--bag", required=True, help="bag file or bundled name")
        p.set_defaults(func=func)
        return p

    p = command("compile", cmd_compile, "compile outer domains into a cache file")
    p.add_argument("--out", help="cache path (default: next to the grammar)")

    p = command("generate", cmd_generate, "generate sentences from a bag", bag=True)
    p.add_argument("--prune", action=argparse.BooleanOptionalAction, default=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--all-solutions", dest="first_solution", action="store_false", default=False)
    mode.add_argument("--first-solution", dest="first_solution", action="store_true")
    p.add_argument("--all-derivations", action="store_true", help="print one bracketing per derivation")
    p.add_argument("--domains", help="domain cache to use")
    p.add_argument("--trace-prune", action="store_true", help="log every pruning test to stderr")
    p.add_argument("--stats", choices=("json", "tsv"), default="json")
    p.add_argument("--no-timing", action="store_true")

    p = command("oracle", cmd_oracle, "brute-force reference results")
    p.add_argument("--bag", help="print every ordering the grammar accepts")
    p.add_argument("--depth", type=int, help="print outer-domain triples seen in derivations up to this depth")

    p = command("bench", cmd_bench, "pruned vs. unpruned benchmark as TSV")
    p.add_argument("--bag", action="append", help="bag to run (repeatable; default: bundled bench bags)")
    p.add_argument("--domains", help="domain cache to use")
    p.add_argument("--no-timing", action="store_true")

    p = command("dump-domains", cmd_dump_domains, "print compiled domains")
    p.add_argument("--cat", help="only triples for this category")
    p.add_argument("--kind", choices=("inner", "outer"), default="outer")
    p.add_argument("--full", action="store_true", help="print abstract signs and merged binds")
    p.add_argument("--domains", help="read outer domains from this cache")
    return parser


def run_cli(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else 0
    if args.command == "bench" and args.grammar is None:
        args.grammar = data.PREFIX + "bench.gr"
    try:
        return args.func(args, out, err)
    except InvariantError as exc:
        print(f"bagforge: internal error: {exc}", file=err)
        return EXIT_INVARIANT
    except BagforgeError as exc:
        print(f"bagforge: {exc}", file=err)
        return EXIT_INPUT
    except OSError as exc:
        print(f"bagforge: {exc.filename or ''}: {exc.strerror}", file=err)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
