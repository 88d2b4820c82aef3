"""Iterative idiom extraction by collapsing frequent depth-2 subtrees.

Each round counts (parent rule, child position, child rule) incidences over
the corpus, picks the most frequent one, splices the child rule's rhs into
the parent's to form a new idiom rule, and rewrites every occurrence in the
corpus to apply that rule in a single step.  Because rewritten trees feed
the next round, later idioms can have earlier idioms as their parent or
child, which is how idioms deeper than two levels arise.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .grammar import IDIOM, LEXICAL, Grammar, ProductionRule, TreeIdiomsError
from .trees import ParseTree, frontier, internal_node_count, leaf

TIE_BREAK_POLICIES = ("lexicographic",)


class MiningError(TreeIdiomsError):
    pass


class FingerprintMismatch(TreeIdiomsError):
    def __init__(self, expected: str, actual: str):
        super().__init__(
            f"idiom set was mined under grammar {expected[:12]}..., "
            f"supplied grammar is {actual[:12]}...")
        self.expected = expected
        self.actual = actual


@dataclass(frozen=True, slots=True, order=True)
class Depth2Pattern:
    """One full parent expansion plus one full child expansion."""
    parent_rule: int
    child_pos: int
    child_rule: int


@dataclass(frozen=True, slots=True)
class Idiom:
    rank: int  # 1-based extraction ordinal
    rule: ProductionRule
    provenance: Depth2Pattern
    support: int


@dataclass(frozen=True, slots=True)
class MiningConfig:
    n: int = 200
    min_count: int = 2
    tie_break: str = "lexicographic"
    identifier_idioms: bool = True

    def __post_init__(self):
        if self.n < 0:
            raise MiningError("n must be >= 0")
        if self.min_count < 1:
            raise MiningError("min_count must be >= 1")
        if self.tie_break not in TIE_BREAK_POLICIES:
            raise MiningError(f"unknown tie-break policy {self.tie_break!r}")


@dataclass(frozen=True)
class IdiomSet:
    idioms: tuple[Idiom, ...]
    grammar_fingerprint: str
    config: MiningConfig
    _by_rule_id: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        for i, idiom in enumerate(self.idioms, 1):
            if idiom.rank != i:
                raise MiningError(f"ranks not contiguous: position {i} has rank {idiom.rank}")
            self._by_rule_id[idiom.rule.id] = idiom

    def __len__(self):
        return len(self.idioms)

    def __iter__(self):
        return iter(self.idioms)

    def prefix(self, k: int) -> "IdiomSet":
        if not 0 <= k <= len(self.idioms):
            raise MiningError(f"prefix size {k} out of range 0..{len(self.idioms)}")
        return IdiomSet(self.idioms[:k], self.grammar_fingerprint, self.config)

    def by_rule_id(self, rule_id: int) -> Idiom | None:
        return self._by_rule_id.get(rule_id)


PatternCounts = Counter  # Depth2Pattern -> occurrence count


def count_patterns(corpus, grammar: Grammar,
                   identifier_idioms: bool = True,
                   workers: int = 1) -> PatternCounts:
    """Count every (internal node, internal child) incidence in the corpus.

    Overlapping occurrences all count, like adjacent-pair counting in
    sequence merge algorithms.  With ``identifier_idioms`` off, incidences
    whose child is a spelling rule are skipped (but still descended into).
    """
    if workers > 1:
        chunk = (len(corpus) + workers - 1) // workers
        counts = PatternCounts()
        for start in range(0, len(corpus), max(chunk, 1)):
            counts += _count_chunk(corpus[start:start + chunk], grammar,
                                   identifier_idioms)
        return counts
    return _count_chunk(corpus, grammar, identifier_idioms)


def _count_chunk(corpus, grammar, identifier_idioms) -> PatternCounts:
    counts = PatternCounts()
    lexical_ids = None
    if not identifier_idioms:
        lexical_ids = {r.id for r in grammar.rules if r.origin == LEXICAL}
    for tree in corpus:
        stack = [tree]
        while stack:
            node = stack.pop()
            if not node.is_internal:
                continue
            for i, child in enumerate(node.children):
                if child.is_internal:
                    if lexical_ids is None or child.rule_id not in lexical_ids:
                        counts[Depth2Pattern(node.rule_id, i, child.rule_id)] += 1
                    stack.append(child)
    return counts


def most_frequent(counts: PatternCounts, min_count: int = 2,
                  tie_break: str = "lexicographic") -> Depth2Pattern | None:
    """Max-count pattern meeting min_count; ties go to the smallest triple."""
    if tie_break not in TIE_BREAK_POLICIES:
        raise MiningError(f"unknown tie-break policy {tie_break!r}")
    best = None
    best_key = None
    for pattern, count in counts.items():
        if count < min_count:
            continue
        key = (-count, pattern.parent_rule, pattern.child_pos, pattern.child_rule)
        if best_key is None or key < best_key:
            best, best_key = pattern, key
    return best


def collapse_pattern(pattern: Depth2Pattern, grammar: Grammar,
                     rank: int) -> ProductionRule:
    """Splice the child rhs into the parent rhs; register the idiom rule."""
    parent = grammar.rule(pattern.parent_rule)
    child = grammar.rule(pattern.child_rule)
    if not 0 <= pattern.child_pos < len(parent.rhs):
        raise MiningError(f"child position {pattern.child_pos} out of range for [{parent}]")
    slot = parent.rhs[pattern.child_pos]
    if slot.terminal or slot != child.lhs:
        raise MiningError(
            f"pattern mismatch: [{parent}] position {pattern.child_pos} "
            f"is {slot!r}, child rule is [{child}]")
    rhs = (parent.rhs[:pattern.child_pos] + child.rhs
           + parent.rhs[pattern.child_pos + 1:])
    return grammar.add_idiom_rule(parent.lhs, rhs, rank)


def rewrite_tree(tree: ParseTree, pattern: Depth2Pattern,
                 rule: ProductionRule) -> tuple[ParseTree, int]:
    """Replace every pattern occurrence with one application of ``rule``.

    Pre-order; a rewritten node is re-examined before its children are
    descended into, so chained occurrences are exhausted.  Returns the new
    tree (the same object when nothing fired) and the replacement count.
    """
    hits = 0

    def visit(node: ParseTree) -> ParseTree:
        nonlocal hits
        while node.rule_id == pattern.parent_rule:
            child = node.children[pattern.child_pos]
            if child.rule_id != pattern.child_rule:
                break
            node = ParseTree(node.symbol, rule.id,
                             node.children[:pattern.child_pos]
                             + child.children
                             + node.children[pattern.child_pos + 1:])
            hits += 1
        if not node.children:
            return node
        new_children = tuple(visit(c) for c in node.children)
        if all(a is b for a, b in zip(new_children, node.children)):
            return node
        return ParseTree(node.symbol, node.rule_id, new_children)

    return visit(tree), hits


def rewrite_corpus(corpus, pattern: Depth2Pattern,
                   rule: ProductionRule, workers: int = 1) -> tuple[list[ParseTree], int]:
    """Apply :func:`rewrite_tree` to every tree; order is preserved."""
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(lambda t: rewrite_tree(t, pattern, rule),
                                    corpus))
    else:
        results = [rewrite_tree(t, pattern, rule) for t in corpus]
    return [t for t, _ in results], sum(h for _, h in results)


@dataclass(frozen=True)
class ExtractionResult:
    idiom_set: IdiomSet
    corpus: list[ParseTree]
    halt_reason: str  # "budget" or "no-frequent-pattern"


def extract_idioms(corpus, grammar: Grammar, config: MiningConfig,
                   workers: int = 1) -> ExtractionResult:
    """Run the count / select / collapse / rewrite loop up to ``config.n`` times."""
    corpus = list(corpus)
    idioms = []
    halt_reason = "budget"
    for rank in range(1, config.n + 1):
        counts = count_patterns(corpus, grammar, config.identifier_idioms,
                                workers)
        pattern = most_frequent(counts, config.min_count, config.tie_break)
        if pattern is None:
            halt_reason = "no-frequent-pattern"
            break
        rule = collapse_pattern(pattern, grammar, rank)
        corpus, _ = rewrite_corpus(corpus, pattern, rule, workers)
        idioms.append(Idiom(rank, rule, pattern, counts[pattern]))
    idiom_set = IdiomSet(tuple(idioms), grammar.fingerprint, config)
    for idiom in idiom_set:
        _check_idiom(idiom, idiom_set, grammar)
    return ExtractionResult(idiom_set, corpus, halt_reason)


def _check_idiom(idiom: Idiom, idiom_set: IdiomSet, grammar: Grammar) -> None:
    template = expand_idiom(idiom, idiom_set, grammar)
    if tuple(frontier(template)) != idiom.rule.rhs:
        raise MiningError(
            f"idiom {idiom.rank}: rhs does not match its expansion frontier")
    if internal_node_count(template) < 2:
        raise MiningError(f"idiom {idiom.rank}: expands to fewer than 2 rules")


# -- expansion back to base rules ---------------------------------------

def expand_idiom(idiom: Idiom, idiom_set: IdiomSet,
                 grammar: Grammar) -> ParseTree:
    """Base-rule derivation template witnessing the idiom, slots as leaves."""
    prov = idiom.provenance
    parent = _rule_template(prov.parent_rule, idiom_set, grammar)
    child = _rule_template(prov.child_rule, idiom_set, grammar)
    return _graft_at_leaf(parent, prov.child_pos, child)


def _rule_template(rule_id: int, idiom_set: IdiomSet,
                   grammar: Grammar) -> ParseTree:
    rule = grammar.rule(rule_id)
    if rule.origin == IDIOM:
        inner = idiom_set.by_rule_id(rule_id)
        if inner is None:
            raise MiningError(f"dangling provenance reference to idiom rule {rule_id}")
        return expand_idiom(inner, idiom_set, grammar)
    return ParseTree(rule.lhs, rule.id, tuple(leaf(s) for s in rule.rhs))


def _graft_at_leaf(tree: ParseTree, leaf_index: int,
                   subtree: ParseTree) -> ParseTree:
    """Replace the leaf at the given frontier position with ``subtree``."""
    seen = 0

    def visit(node: ParseTree) -> ParseTree:
        nonlocal seen
        if not node.is_internal:
            seen += 1
            if seen - 1 == leaf_index:
                if node.symbol != subtree.symbol:
                    raise MiningError(
                        f"graft mismatch: slot {node.symbol!r} vs {subtree.symbol!r}")
                return subtree
            return node
        if seen > leaf_index:
            return node
        return ParseTree(node.symbol, node.rule_id,
                         tuple(visit(c) for c in node.children))

    return visit(tree)


# -- idiom set files -----------------------------------------------------

FORMAT_VERSION = 1


def _sym_json(sym):
    return {"symbol": sym.name, "terminal": sym.terminal}


def idiom_set_to_json(idiom_set: IdiomSet, grammar: Grammar) -> dict:
    lexical = {}
    for idiom in idiom_set:
        for rid in (idiom.provenance.parent_rule, idiom.provenance.child_rule):
            rule = grammar.rule(rid)
            if rule.origin == LEXICAL:
                lexical[rid] = rule
    return {
        "format_version": FORMAT_VERSION,
        "grammar_fingerprint": idiom_set.grammar_fingerprint,
        "config": {
            "n": idiom_set.config.n,
            "min_count": idiom_set.config.min_count,
            "tie_break": idiom_set.config.tie_break,
            "identifier_idioms": idiom_set.config.identifier_idioms,
        },
        "lexical_rules": [
            {"id": rid, "lhs": rule.lhs.name, "lexeme": rule.rhs[0].name}
            for rid, rule in sorted(lexical.items())],
        "idioms": [
            {"rank": idiom.rank,
             "id": idiom.rule.id,
             "lhs": idiom.rule.lhs.name,
             "rhs": [_sym_json(s) for s in idiom.rule.rhs],
             "provenance": {
                 "parent_rule": idiom.provenance.parent_rule,
                 "child_pos": idiom.provenance.child_pos,
                 "child_rule": idiom.provenance.child_rule,
             },
             "support": idiom.support}
            for idiom in idiom_set],
    }


def idiom_set_from_json(data: dict, grammar: Grammar) -> IdiomSet:
    """Load an idiom set into ``grammar``, verifying the fingerprint.

    Registers the idiom rules (and any spelling rules their provenance
    needs) in the grammar as a side effect.
    """
    if data.get("format_version") != FORMAT_VERSION:
        raise MiningError(
            f"unsupported idiom file format_version {data.get('format_version')!r}")
    fp = data["grammar_fingerprint"]
    if fp != grammar.fingerprint:
        raise FingerprintMismatch(fp, grammar.fingerprint)
    config = MiningConfig(**data["config"])
    for rec in data["lexical_rules"]:
        rule = grammar.lexical_rule(rec["lhs"], rec["lexeme"])
        if rule.id != rec["id"]:
            raise MiningError(
                f"lexical rule id mismatch for {rec['lhs']} -> {rec['lexeme']!r}")
    idioms = []
    for rec in data["idioms"]:
        prov = Depth2Pattern(rec["provenance"]["parent_rule"],
                             rec["provenance"]["child_pos"],
                             rec["provenance"]["child_rule"])
        rank = rec["rank"]
        rule = collapse_pattern(prov, grammar, rank)
        declared_rhs = tuple(grammar.symbol(s["symbol"], s["terminal"])
                             for s in rec["rhs"])
        if rule.rhs != declared_rhs or rule.lhs.name != rec["lhs"]:
            raise MiningError(f"idiom {rank}: stored rule does not match provenance")
        if rule.id != rec["id"]:
            raise MiningError(f"idiom {rank}: stored id {rec['id']} != {rule.id}")
        idioms.append(Idiom(rank, rule, prov, rec["support"]))
    idiom_set = IdiomSet(tuple(idioms), fp, config)
    for idiom in idiom_set:
        _check_idiom(idiom, idiom_set, grammar)
    return idiom_set
