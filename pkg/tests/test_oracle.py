import json
import random

from treeidioms.mining import (Depth2Pattern, MiningConfig, count_patterns,
                               collapse_pattern, extract_idioms,
                               idiom_set_to_json, rewrite_tree)
from treeidioms.minilang import generate_demo_corpus, mini_language, parse
from treeidioms.oracle import (END_MARKER, brute_force_counts, chain_grammar,
                               encode_sequence, naive_rewrite,
                               reference_extract, reference_pair_bpe)
from treeidioms.trees import frontier, validate_tree


def random_sequences(rng, vocab_size=5, count=12, max_len=10):
    vocab = [f"t{i}" for i in range(vocab_size)]
    return [[rng.choice(vocab) for _ in range(rng.randint(1, max_len))]
            for _ in range(count)]


def test_brute_force_counts_match_fast_counts(mini):
    corpus = [parse(p, mini) for p in generate_demo_corpus(31, 40)]
    assert brute_force_counts(corpus, mini.grammar) == \
        count_patterns(corpus, mini.grammar)
    assert brute_force_counts(corpus, mini.grammar, identifier_idioms=False) \
        == count_patterns(corpus, mini.grammar, identifier_idioms=False)


def test_naive_rewrite_matches_fast_rewrite(if_scenario):
    s = if_scenario
    g = s.grammar.clone()
    pattern = Depth2Pattern(s.r_if.id, 1, s.r_par.id)
    rule = collapse_pattern(pattern, g, 1)
    for tree in s.corpus():
        fast, _ = rewrite_tree(tree, pattern, rule)
        assert naive_rewrite(tree, pattern, rule) == fast


def test_reference_extract_matches_extract_idioms():
    lang1, lang2 = mini_language(), mini_language()
    corpus1 = [parse(p, lang1) for p in generate_demo_corpus(41, 30)]
    corpus2 = [parse(p, lang2) for p in generate_demo_corpus(41, 30)]
    config = MiningConfig(n=12)
    fast = extract_idioms(corpus1, lang1.grammar, config)
    slow = reference_extract(corpus2, lang2.grammar, config)
    assert fast.halt_reason == slow.halt_reason
    assert json.dumps(idiom_set_to_json(fast.idiom_set, lang1.grammar)) == \
        json.dumps(idiom_set_to_json(slow.idiom_set, lang2.grammar))
    assert fast.corpus == slow.corpus


def test_chain_grammar_encodes_sequences_losslessly():
    rng = random.Random(0)
    sequences = random_sequences(rng)
    g = chain_grammar(sequences)
    for seq in sequences:
        tree = encode_sequence(seq, g)
        assert validate_tree(tree, g) == []
        assert [sym.name for sym in frontier(tree)] == seq + [END_MARKER]


def test_adjacent_pairs_become_depth2_incidences():
    g = chain_grammar([["a", "b", "a", "b"]])
    tree = encode_sequence(["a", "b", "a", "b"], g)
    counts = brute_force_counts([tree], g)
    rule_for = {r.rhs[0].name: r.id for r in g.base_rules}
    # "ab" occurs twice; "ba" once; "b<end>" once
    assert counts[Depth2Pattern(rule_for["a"], 1, rule_for["b"])] == 2
    assert counts[Depth2Pattern(rule_for["b"], 1, rule_for["a"])] == 1
    assert counts[Depth2Pattern(rule_for["b"], 1, rule_for[END_MARKER])] == 1


def test_pair_bpe_on_repetitive_corpus():
    merges = reference_pair_bpe([["a", "b", "a", "b"],
                                 ["a", "b", "c"]], n_merges=2)
    assert merges[0] == ("a", "b")


def test_pair_bpe_stops_without_frequent_pairs():
    assert reference_pair_bpe([["a"], ["b"]], n_merges=5, min_count=2) == []


def test_miner_merge_order_equals_pair_bpe():
    rng = random.Random(7)
    for _ in range(10):
        sequences = random_sequences(rng)
        g = chain_grammar(sequences).clone()
        corpus = [encode_sequence(s, g) for s in sequences]
        result = extract_idioms(corpus, g, MiningConfig(n=8))
        mined = [tuple(sym.name for sym in idiom.rule.rhs if sym.terminal)
                 for idiom in result.idiom_set]
        assert mined == reference_pair_bpe(sequences, 8)
