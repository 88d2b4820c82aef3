import pytest

from treeidioms.grammar import Grammar
from treeidioms.minilang import SourceProgram, generate_demo_corpus, parse
from treeidioms.trees import (ParseTree, ReplayError, TreeFormatError,
                              deserialize_tree, internal_node_count, leaf,
                              replay, rule_sequence, serialize_tree,
                              tree_yield, validate_tree)


@pytest.fixture
def tiny():
    g = Grammar("S")
    s = g.nonterminal("S")
    a = g.nonterminal("A")
    b = g.nonterminal("B")
    g.add_rule(s, (g.terminal("a"),))          # 0: S -> a
    g.add_rule(s, (g.terminal("b"),))          # 1: S -> b
    g.add_rule(s, (a, b))                      # 2: S -> A B
    g.add_rule(a, (g.terminal("a"),))          # 3: A -> a
    g.add_rule(b, (g.terminal("b"),))          # 4: B -> b
    return g.freeze()


def single_rule_tree(g, rule_id=0):
    rule = g.rule(rule_id)
    return ParseTree(rule.lhs, rule_id, tuple(leaf(s) for s in rule.rhs))


# -- validation ----------------------------------------------------------

def test_validate_accepts_single_rule_tree(tiny):
    assert validate_tree(single_rule_tree(tiny), tiny) == []


def test_validate_flags_rhs_mismatch_at_root(tiny):
    tree = ParseTree(tiny.nonterminal("S"), 1, (leaf(tiny.terminal("a")),))
    violations = validate_tree(tree, tiny)
    assert len(violations) == 1
    assert violations[0].path == ()
    assert "rhs mismatch" in violations[0].message


def test_validate_flags_unknown_rule_id(tiny):
    tree = ParseTree(tiny.nonterminal("S"), 9999, (leaf(tiny.terminal("a")),))
    violations = validate_tree(tree, tiny)
    assert "unknown rule id" in violations[0].message


def test_validate_reports_slot_leaves_unless_allowed(tiny):
    tree = ParseTree(tiny.nonterminal("S"), 2,
                     (leaf(tiny.nonterminal("A")), leaf(tiny.nonterminal("B"))))
    assert validate_tree(tree, tiny) != []
    assert validate_tree(tree, tiny, allow_slots=True) == []


def test_if_else_skeleton_validates(mini):
    tree = parse(SourceProgram("if ( x ) { y = 1 ; } else { y = 2 ; }"), mini)
    assert validate_tree(tree, mini.grammar) == []
    seq = rule_sequence(tree)
    assert mini.rules["if_else"].id in seq
    assert mini.rules["par_expr"].id in seq
    assert mini.rules["if_tail"].id in seq


# -- rule sequences and replay -------------------------------------------

def test_rule_sequence_of_depth_one_tree(tiny):
    assert rule_sequence(single_rule_tree(tiny)) == [0]


def test_rule_sequence_length_equals_internal_nodes(mini):
    for prog in generate_demo_corpus(3, 25):
        tree = parse(prog, mini)
        assert len(rule_sequence(tree)) == internal_node_count(tree)


def test_replay_single_rule(tiny):
    assert replay([0], tiny) == single_rule_tree(tiny)


def test_replay_identity_on_demo_corpus(mini):
    for prog in generate_demo_corpus(1, 50):
        tree = parse(prog, mini)
        assert replay(rule_sequence(tree), mini.grammar) == tree


def test_replay_premature_exhaustion(tiny):
    # S -> A B followed by B -> b leaves A unexpanded
    with pytest.raises(ReplayError):
        replay([2, 4], tiny)


def test_replay_leftover_rules(tiny):
    with pytest.raises(ReplayError, match="leftover"):
        replay([0, 0], tiny)


def test_replay_empty_sequence(tiny):
    with pytest.raises(ReplayError):
        replay([], tiny)


# -- serialization -------------------------------------------------------

def test_serialize_single_rule_tree(tiny):
    assert serialize_tree(single_rule_tree(tiny)) == '(S@0 "a")'


def test_round_trip_on_demo_corpus(mini):
    for prog in generate_demo_corpus(2, 50):
        tree = parse(prog, mini)
        assert deserialize_tree(serialize_tree(tree), mini.grammar) == tree


def test_unbalanced_parenthesis_reports_offset(tiny):
    with pytest.raises(TreeFormatError) as exc:
        deserialize_tree('(S@2 (A@3 "a"', tiny)
    assert exc.value.offset is not None


def test_unknown_symbol_rejected(tiny):
    with pytest.raises(TreeFormatError, match="unknown nonterminal"):
        deserialize_tree('(Zzz@0 "a")', tiny)


def test_slot_leaves_serialize_bare(tiny):
    tree = ParseTree(tiny.nonterminal("S"), 2,
                     (leaf(tiny.nonterminal("A")), leaf(tiny.nonterminal("B"))))
    text = serialize_tree(tree)
    assert text == "(S@2 A B)"
    assert deserialize_tree(text, tiny) == tree


def test_escaped_quotes_round_trip(tiny):
    tree = ParseTree(tiny.nonterminal("A"),
                     tiny.lexical_rule("A", 'say "hi" \\ now').id,
                     (leaf(tiny.terminal('say "hi" \\ now')),))
    assert deserialize_tree(serialize_tree(tree), tiny) == tree


def test_yield_matches_token_lexemes(mini):
    text = "try { f ( ) ; } catch ( E e ) { g ( ) ; }"
    tree = parse(SourceProgram(text), mini)
    assert " ".join(tree_yield(tree)) == text
