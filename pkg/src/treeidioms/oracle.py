"""Naive reference implementations used by the test suite.

Everything here favors obviousness over speed and deliberately shares no
counting or rewriting code with the optimized modules: counting walks
breadth-first instead of depth-first, selection sorts the whole candidate
list, and rewriting rescans the tree from the root after every single
replacement.  Inputs are expected to be small.
"""

from __future__ import annotations

from collections import Counter, deque

from .grammar import Grammar, LEXICAL
from .mining import (Depth2Pattern, ExtractionResult, Idiom, IdiomSet,
                     MiningConfig, collapse_pattern)
from .trees import ParseTree, leaf


def brute_force_counts(corpus, grammar: Grammar,
                       identifier_idioms: bool = True) -> Counter:
    """Depth-2 pattern counts by breadth-first enumeration."""
    counts: Counter = Counter()
    for tree in corpus:
        queue = deque([tree])
        nodes = []
        while queue:
            n = queue.popleft()
            nodes.append(n)
            queue.extend(n.children)
        for n in nodes:
            if not n.is_internal:
                continue
            for pos, child in enumerate(n.children):
                if not child.is_internal:
                    continue
                if (not identifier_idioms
                        and grammar.rule(child.rule_id).origin == LEXICAL):
                    continue
                counts[Depth2Pattern(n.rule_id, pos, child.rule_id)] += 1
    return counts


def _select(counts: Counter, min_count: int) -> Depth2Pattern | None:
    candidates = [(count, p) for p, count in counts.items() if count >= min_count]
    candidates.sort(key=lambda item: (-item[0], item[1].parent_rule,
                                      item[1].child_pos, item[1].child_rule))
    return candidates[0][1] if candidates else None


def _find_occurrence(tree: ParseTree, pattern: Depth2Pattern,
                     path=()):
    """Pre-order path of the first occurrence, or None."""
    if tree.rule_id == pattern.parent_rule:
        child = tree.children[pattern.child_pos]
        if child.rule_id == pattern.child_rule:
            return path
    for i, child in enumerate(tree.children):
        found = _find_occurrence(child, pattern, path + (i,))
        if found is not None:
            return found
    return None


def _replace_at(tree: ParseTree, path, pattern: Depth2Pattern,
                rule) -> ParseTree:
    if not path:
        child = tree.children[pattern.child_pos]
        return ParseTree(tree.symbol, rule.id,
                         tree.children[:pattern.child_pos]
                         + child.children
                         + tree.children[pattern.child_pos + 1:])
    i = path[0]
    new_child = _replace_at(tree.children[i], path[1:], pattern, rule)
    return ParseTree(tree.symbol, tree.rule_id,
                     tree.children[:i] + (new_child,) + tree.children[i + 1:])


def naive_rewrite(tree: ParseTree, pattern: Depth2Pattern, rule) -> ParseTree:
    """Replace one occurrence at a time, rescanning from the root."""
    while True:
        path = _find_occurrence(tree, pattern)
        if path is None:
            return tree
        tree = _replace_at(tree, path, pattern, rule)


def reference_extract(corpus, grammar: Grammar,
                      config: MiningConfig) -> ExtractionResult:
    """Literal transcription of the extraction loop; registers idiom rules
    into ``grammar`` exactly like the optimized extractor does."""
    corpus = list(corpus)
    idioms = []
    halt_reason = "budget"
    for rank in range(1, config.n + 1):
        counts = brute_force_counts(corpus, grammar, config.identifier_idioms)
        pattern = _select(counts, config.min_count)
        if pattern is None:
            halt_reason = "no-frequent-pattern"
            break
        rule = collapse_pattern(pattern, grammar, rank)
        corpus = [naive_rewrite(t, pattern, rule) for t in corpus]
        idioms.append(Idiom(rank, rule, pattern, counts[pattern]))
    idiom_set = IdiomSet(tuple(idioms), grammar.fingerprint, config)
    return ExtractionResult(idiom_set, corpus, halt_reason)


# -- pairwise merge reference (sequence analog) --------------------------

END_MARKER = "<end>"


def chain_grammar(sequences) -> Grammar:
    """Grammar whose trees are right-branching chains over the vocabulary.

    One rule ``Seq -> tok Seq`` per vocabulary token (sorted order) plus the
    terminating ``Seq -> <end>``, so a token sequence becomes a chain tree
    and adjacent tokens become depth-2 parent/child incidences.
    """
    vocab = sorted({tok for seq in sequences for tok in seq})
    if END_MARKER in vocab:
        raise ValueError(f"sequences may not contain {END_MARKER!r}")
    g = Grammar("Seq")
    seq = g.nonterminal("Seq")
    for tok in vocab:
        g.add_rule(seq, (g.terminal(tok), seq))
    g.add_rule(seq, (g.terminal(END_MARKER),))
    return g.freeze()


def encode_sequence(tokens, grammar: Grammar) -> ParseTree:
    seq = grammar.nonterminal("Seq")
    by_token = {}
    end_rule = None
    for rule in grammar.base_rules:
        if len(rule.rhs) == 2:
            by_token[rule.rhs[0].name] = rule
        else:
            end_rule = rule
    tree = ParseTree(seq, end_rule.id, (leaf(end_rule.rhs[0]),))
    for tok in reversed(list(tokens)):
        rule = by_token[tok]
        tree = ParseTree(seq, rule.id, (leaf(rule.rhs[0]), tree))
    return tree


def reference_pair_bpe(sequences, n_merges: int,
                       min_count: int = 2) -> list[tuple[str, ...]]:
    """Greedy adjacent-pair merging over token sequences.

    Every sequence carries the end marker as its final unit.  Ties are
    broken by unit creation order (sorted vocabulary, end marker, then
    merged units in merge order), mirroring the miner's rule-id tie-break.
    Returns the merged units, in merge order.
    """
    vocab = sorted({tok for seq in sequences for tok in seq})
    unit_id = {(tok,): i for i, tok in enumerate(vocab)}
    unit_id[(END_MARKER,)] = len(vocab)
    next_id = len(vocab) + 1
    seqs = [[(tok,) for tok in seq] + [(END_MARKER,)] for seq in sequences]

    merges = []
    for _ in range(n_merges):
        counts: Counter = Counter()
        for s in seqs:
            for i in range(len(s) - 1):
                counts[(s[i], s[i + 1])] += 1
        candidates = [(count, pair) for pair, count in counts.items()
                      if count >= min_count]
        candidates.sort(key=lambda item: (-item[0], unit_id[item[1][0]],
                                          unit_id[item[1][1]]))
        if not candidates:
            break
        left, right = candidates[0][1]
        merged = left + right
        unit_id[merged] = next_id
        next_id += 1
        merges.append(merged)
        for idx, s in enumerate(seqs):
            out = []
            i = 0
            while i < len(s):
                if i + 1 < len(s) and s[i] == left and s[i + 1] == right:
                    out.append(merged)
                    i += 2
                else:
                    out.append(s[i])
                    i += 1
            seqs[idx] = out
    return merges
