"""Command-line pipeline: parse sources, mine idioms, compress, expand.

Exit codes: 0 success, 1 domain error (parse failures, verification
mismatches, bad input files), 2 usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from .compress import (compress_corpus, expand_tree, k_sweep, render_sweep)
from .grammar import Grammar, TreeIdiomsError
from .mining import (MiningConfig, TIE_BREAK_POLICIES, expand_idiom,
                     extract_idioms, idiom_set_from_json, idiom_set_to_json)
from .minilang import (MiniLanguage, SourceProgram, generate_demo_corpus,
                       mini_language, parse as parse_program,
                       read_corpus_file, write_corpus_file)
from .oracle import brute_force_counts
from .trees import (ParseTree, deserialize_tree, serialize_tree,
                    read_tree_file, write_tree_file)

BUILTIN_MINI = "builtin:mini"


def _load_grammar(spec: str) -> Grammar:
    if spec == BUILTIN_MINI:
        return mini_language().grammar
    try:
        with open(spec, encoding="utf-8") as fh:
            return Grammar.from_json(json.load(fh))
    except OSError as exc:
        raise TreeIdiomsError(f"cannot read grammar {spec!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise TreeIdiomsError(f"grammar {spec!r} is not valid JSON: {exc}") from exc


def _load_idioms(path: str, grammar: Grammar):
    try:
        with open(path, encoding="utf-8") as fh:
            return idiom_set_from_json(json.load(fh), grammar)
    except OSError as exc:
        raise TreeIdiomsError(f"cannot read idiom file {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise TreeIdiomsError(f"idiom file {path!r} is not valid JSON: {exc}") from exc


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _emit(stream, text: str) -> None:
    stream.write(text + "\n")


# -- subcommands ---------------------------------------------------------

def cmd_demo_corpus(args) -> int:
    programs = generate_demo_corpus(args.seed, args.count)
    write_corpus_file(args.output, programs)
    _emit(sys.stdout, f"wrote {len(programs)} programs to {args.output}")
    return 0


def cmd_parse(args) -> int:
    if args.grammar != BUILTIN_MINI:
        raise TreeIdiomsError(
            "parse requires --grammar builtin:mini; external grammars come "
            "with pre-parsed tree files instead")
    lang = mini_language()
    trees = []
    failures = []
    for path in args.sources:
        for prog in read_corpus_file(path):
            try:
                trees.append(parse_program(prog, lang))
            except TreeIdiomsError as exc:
                failures.append(f"{prog.origin}: {exc}")
                if args.strict:
                    for line in failures:
                        _emit(sys.stderr, line)
                    return 1
    write_tree_file(args.output, trees)
    for line in failures:
        _emit(sys.stderr, line)
    _emit(sys.stdout, f"parsed {len(trees)} trees -> {args.output}"
          + (f" ({len(failures)} failures)" if failures else ""))
    return 1 if failures else 0


def cmd_extract(args) -> int:
    grammar = _load_grammar(args.grammar)
    corpus = read_tree_file(args.trees, grammar)
    config = MiningConfig(n=args.n, min_count=args.min_count,
                          tie_break=args.tie_break,
                          identifier_idioms=not args.no_identifier_idioms)
    result = extract_idioms(corpus, grammar, config, workers=args.workers)
    _write_json(args.output, idiom_set_to_json(result.idiom_set, grammar))
    if args.rewritten_out:
        write_tree_file(args.rewritten_out, result.corpus)
    final_rules = sum(len(list(_preorder_rules(t))) for t in result.corpus)
    _emit(sys.stdout,
          f"{len(result.idiom_set)} idioms -> {args.output} "
          f"(halt: {result.halt_reason}, final corpus rules: {final_rules})")
    return 0


def _preorder_rules(tree: ParseTree):
    stack = [tree]
    while stack:
        n = stack.pop()
        if n.is_internal:
            yield n.rule_id
            stack.extend(n.children)


def cmd_compress(args) -> int:
    grammar = _load_grammar(args.grammar)
    corpus = read_tree_file(args.trees, grammar)
    idiom_set = _load_idioms(args.idioms, grammar)
    if args.k is not None:
        idiom_set = idiom_set.prefix(args.k)
    if args.sweep:
        ks = [int(x) for x in args.sweep.split(",")]
        rows = k_sweep(corpus, idiom_set, grammar, ks, workers=args.workers)
        _emit(sys.stdout, render_sweep(rows))
    compressed, report = compress_corpus(corpus, idiom_set, grammar,
                                         workers=args.workers,
                                         fixpoint=args.fixpoint)
    write_tree_file(args.output, compressed)
    if args.report:
        _write_json(args.report, report.to_json())
    if args.table:
        _emit(sys.stdout, report.render_table())
    _emit(sys.stdout,
          f"compressed {len(compressed)} trees -> {args.output} "
          f"(mean ratio {report.mean_ratio:.4f})")
    return 0


def cmd_expand(args) -> int:
    grammar = _load_grammar(args.grammar)
    idiom_set = _load_idioms(args.idioms, grammar)
    corpus = read_tree_file(args.trees, grammar)
    expanded = [expand_tree(t, idiom_set, grammar) for t in corpus]
    write_tree_file(args.output, expanded)
    if args.verify:
        original = read_tree_file(args.verify, grammar)
        mismatches = []
        if len(original) != len(expanded):
            _emit(sys.stderr,
                  f"tree count mismatch: {len(expanded)} expanded vs "
                  f"{len(original)} original")
            return 1
        for i, (exp, orig) in enumerate(zip(expanded, original)):
            if exp != orig:
                mismatches.append(i + 1)
        if mismatches:
            for line_no in mismatches:
                _emit(sys.stderr, f"line {line_no}: expansion differs from original")
            return 1
        _emit(sys.stdout, f"verified {len(expanded)} trees: 0 mismatches")
    _emit(sys.stdout, f"expanded {len(expanded)} trees -> {args.output}")
    return 0


def _render_template(tree: ParseTree) -> str:
    if not tree.is_internal:
        if tree.symbol.terminal:
            return f'"{tree.symbol.name}"'
        return f"<{tree.symbol.name}>"
    inner = " ".join(_render_template(c) for c in tree.children)
    return f"({tree.symbol.name} {inner})"


def cmd_catalog(args) -> int:
    grammar = _load_grammar(args.grammar)
    idiom_set = _load_idioms(args.idioms, grammar)
    idioms = list(idiom_set)
    if args.top is not None:
        idioms = idioms[:args.top]
    for idiom in idioms:
        _emit(sys.stdout, f"#{idiom.rank} support={idiom.support} {idiom.rule}")
        template = expand_idiom(idiom, idiom_set, grammar)
        _emit(sys.stdout, f"    {_render_template(template)}")
    return 0


def cmd_oracle(args) -> int:
    grammar = _load_grammar(args.grammar)
    corpus = read_tree_file(args.trees, grammar)
    counts = brute_force_counts(corpus, grammar)
    for pattern, count in sorted(counts.items(),
                                 key=lambda it: (-it[1], it[0])):
        parent = grammar.rule(pattern.parent_rule)
        child = grammar.rule(pattern.child_rule)
        _emit(sys.stdout,
              f"{count:>6}  [{parent}] @{pattern.child_pos} [{child}]")
    return 0


# -- argument parsing ----------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treeidioms",
        description="Mine frequent syntax-tree idioms and use them to "
                    "compress derivations.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("demo-corpus", help="generate the bundled demo corpus")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--count", type=int, default=500)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_demo_corpus)

    p = sub.add_parser("parse", help="parse mini-language sources into a tree file")
    p.add_argument("sources", nargs="+")
    p.add_argument("--grammar", default=BUILTIN_MINI)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--strict", action="store_true",
                   help="stop at the first parse failure")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("extract", help="mine an idiom set from a tree file")
    p.add_argument("trees")
    p.add_argument("--grammar", required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("-n", type=int, default=200, help="idiom budget")
    p.add_argument("--min-count", type=int, default=2)
    p.add_argument("--tie-break", default="lexicographic",
                   choices=TIE_BREAK_POLICIES)
    p.add_argument("--no-identifier-idioms", action="store_true")
    p.add_argument("--rewritten-out", help="also write the rewritten corpus")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("compress", help="apply an idiom set to a tree file")
    p.add_argument("trees")
    p.add_argument("--idioms", required=True)
    p.add_argument("--grammar", required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--report", help="write a JSON compression report")
    p.add_argument("--table", action="store_true",
                   help="print the per-tree table")
    p.add_argument("--k", type=int, help="use only the top-K idioms")
    p.add_argument("--sweep", help="comma-separated prefix sizes to sweep")
    p.add_argument("--fixpoint", action="store_true",
                   help="re-run the idiom pass until stable (non-default variant)")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("expand", help="expand a compressed tree file back to base rules")
    p.add_argument("trees")
    p.add_argument("--idioms", required=True)
    p.add_argument("--grammar", required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--verify", help="compare the expansion against this tree file")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("catalog", help="render an idiom set as a readable catalog")
    p.add_argument("--idioms", required=True)
    p.add_argument("--grammar", required=True)
    p.add_argument("--top", type=int)
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("oracle")  # debugging aid, undocumented on purpose
    p.add_argument("trees")
    p.add_argument("--grammar", required=True)
    p.set_defaults(func=cmd_oracle)

    return parser


def _validate(args) -> str | None:
    for attr, minimum in [("n", 0), ("min_count", 1), ("workers", 1),
                          ("count", 1), ("k", 0), ("top", 0)]:
        value = getattr(args, attr, None)
        if value is not None and value < minimum:
            return f"--{attr.replace('_', '-')} must be >= {minimum}"
    return None


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    problem = _validate(args)
    if problem:
        parser.error(problem)  # exits 2
    try:
        return args.func(args)
    except TreeIdiomsError as exc:
        _emit(sys.stderr, f"error: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
