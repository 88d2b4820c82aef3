"""Applying a mined idiom set to new trees, and undoing it.

Compression follows the mined order: each idiom's provenance pattern is
applied exhaustively before the next idiom is considered, one pass over the
idiom list.  Expansion replaces every idiom-rule node with its base-rule
template, so compress followed by expand is the identity.
"""

from __future__ import annotations

import statistics
from collections import Counter
from dataclasses import dataclass

from .grammar import IDIOM, Grammar, TreeIdiomsError
from .mining import FingerprintMismatch, IdiomSet, expand_idiom, rewrite_tree
from .trees import ParseTree, frontier, rule_sequence


class CompressionError(TreeIdiomsError):
    pass


def _check_fingerprint(idiom_set: IdiomSet, grammar: Grammar) -> None:
    if idiom_set.grammar_fingerprint != grammar.fingerprint:
        raise FingerprintMismatch(idiom_set.grammar_fingerprint,
                                  grammar.fingerprint)


def compress_tree(tree: ParseTree, idiom_set: IdiomSet, grammar: Grammar,
                  fixpoint: bool = False) -> tuple[ParseTree, Counter]:
    """Apply idioms in rank order; returns the tree and per-rank hit counts.

    ``fixpoint`` re-runs the ordered pass until no idiom fires anymore; the
    default single pass mirrors how the idioms were extracted.
    """
    _check_fingerprint(idiom_set, grammar)
    applications: Counter = Counter()
    while True:
        fired = 0
        for idiom in idiom_set:
            tree, hits = rewrite_tree(tree, idiom.provenance, idiom.rule)
            if hits:
                applications[idiom.rank] += hits
                fired += hits
        if not fixpoint or fired == 0:
            return tree, applications


def expand_tree(tree: ParseTree, idiom_set: IdiomSet,
                grammar: Grammar) -> ParseTree:
    """Replace every idiom-rule node by its base-grammar derivation."""

    def visit(node: ParseTree) -> ParseTree:
        if not node.is_internal:
            return node
        children = tuple(visit(c) for c in node.children)
        rule = grammar.rule(node.rule_id)
        if rule.origin != IDIOM:
            if all(a is b for a, b in zip(children, node.children)):
                return node
            return ParseTree(node.symbol, node.rule_id, children)
        idiom = idiom_set.by_rule_id(node.rule_id)
        if idiom is None:
            raise CompressionError(
                f"tree uses idiom rule {node.rule_id} not present in the idiom set")
        template = expand_idiom(idiom, idiom_set, grammar)
        return _fill_template(template, children)

    return visit(tree)


def _fill_template(template: ParseTree, children) -> ParseTree:
    """Substitute the idiom node's children into the template's slots,
    left to right along the frontier."""
    it = iter(children)

    def visit(node: ParseTree) -> ParseTree:
        if not node.is_internal:
            child = next(it)
            if child.symbol != node.symbol:
                raise CompressionError(
                    f"template slot {node.symbol!r} cannot take {child.symbol!r}")
            return child
        return ParseTree(node.symbol, node.rule_id,
                         tuple(visit(c) for c in node.children))

    filled = visit(template)
    leftover = sum(1 for _ in it)
    if leftover:
        raise CompressionError(f"{leftover} children left over after filling template")
    return filled


# -- corpus-level compression and statistics -----------------------------

@dataclass(frozen=True, slots=True)
class TreeRecord:
    index: int
    original_rules: int
    compressed_rules: int

    @property
    def ratio(self) -> float:
        return 1.0 - self.compressed_rules / self.original_rules


@dataclass(frozen=True)
class CompressionReport:
    records: tuple[TreeRecord, ...]
    idiom_applications: dict[int, int]  # rank -> replacement count

    @property
    def total_rules_before(self) -> int:
        return sum(r.original_rules for r in self.records)

    @property
    def total_rules_after(self) -> int:
        return sum(r.compressed_rules for r in self.records)

    @property
    def mean_ratio(self) -> float:
        return statistics.fmean(r.ratio for r in self.records) if self.records else 0.0

    @property
    def median_ratio(self) -> float:
        return statistics.median(r.ratio for r in self.records) if self.records else 0.0

    def to_json(self) -> dict:
        return {
            "format_version": 1,
            "trees": [{"index": r.index,
                       "original_rules": r.original_rules,
                       "compressed_rules": r.compressed_rules,
                       "ratio": r.ratio}
                      for r in self.records],
            "aggregate": {
                "mean_ratio": self.mean_ratio,
                "median_ratio": self.median_ratio,
                "total_rules_before": self.total_rules_before,
                "total_rules_after": self.total_rules_after,
                "idiom_applications": {str(rank): count for rank, count
                                       in sorted(self.idiom_applications.items())},
            },
        }

    def render_table(self) -> str:
        lines = [f"{'tree':>6} {'rules':>7} {'compressed':>10} {'ratio':>7}"]
        for r in self.records:
            lines.append(f"{r.index:>6} {r.original_rules:>7} "
                         f"{r.compressed_rules:>10} {r.ratio:>7.3f}")
        lines.append(f"{'mean':>6} {self.total_rules_before:>7} "
                     f"{self.total_rules_after:>10} {self.mean_ratio:>7.3f}")
        return "\n".join(lines)


def compress_corpus(corpus, idiom_set: IdiomSet, grammar: Grammar,
                    workers: int = 1,
                    fixpoint: bool = False) -> tuple[list[ParseTree], CompressionReport]:
    _check_fingerprint(idiom_set, grammar)

    def one(args):
        index, tree = args
        compressed, applications = compress_tree(tree, idiom_set, grammar,
                                                 fixpoint)
        record = TreeRecord(index, len(rule_sequence(tree)),
                            len(rule_sequence(compressed)))
        return compressed, record, applications

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(one, enumerate(corpus)))
    else:
        results = [one(item) for item in enumerate(corpus)]

    out = [compressed for compressed, _, _ in results]
    totals: Counter = Counter()
    for _, _, applications in results:
        totals += applications
    report = CompressionReport(tuple(rec for _, rec, _ in results), dict(totals))
    return out, report


@dataclass(frozen=True, slots=True)
class SweepRow:
    k: int
    mean_ratio: float
    total_rules_after: int


def k_sweep(corpus, idiom_set: IdiomSet, grammar: Grammar, ks,
            workers: int = 1) -> list[SweepRow]:
    """Compression statistics for rank prefixes of the idiom set."""
    ks = list(ks)
    if ks != sorted(ks):
        raise CompressionError("sweep sizes must be sorted ascending")
    rows = []
    for k in ks:
        _, report = compress_corpus(corpus, idiom_set.prefix(k), grammar,
                                    workers)
        rows.append(SweepRow(k, report.mean_ratio, report.total_rules_after))
    return rows


def render_sweep(rows) -> str:
    lines = [f"{'K':>6} {'mean_ratio':>11} {'total_rules':>12}"]
    for row in rows:
        lines.append(f"{row.k:>6} {row.mean_ratio:>11.4f} {row.total_rules_after:>12}")
    return "\n".join(lines)


def verify_round_trip(original, compressed, idiom_set: IdiomSet,
                      grammar: Grammar) -> list[int]:
    """Indices of trees whose expansion does not match the original."""
    mismatches = []
    for i, (orig, comp) in enumerate(zip(original, compressed)):
        if expand_tree(comp, idiom_set, grammar) != orig:
            mismatches.append(i)
    return mismatches


def check_yields_match(before: ParseTree, after: ParseTree) -> bool:
    return frontier(before) == frontier(after)
