import pytest

from treeidioms.grammar import Grammar
from treeidioms.trees import ParseTree, leaf


class IfScenario:
    """A tiny conditional grammar plus trees exercising nested collapses.

    The corpus is arranged so that mining first collapses the parenthesized
    condition into the if-rule, then composes that idiom with the else arm
    into a three-rule idiom; the nested tree compresses from 5 rules to 2.
    """

    def __init__(self):
        g = Grammar("Statement")
        self.St = g.nonterminal("Statement")
        self.PE = g.nonterminal("ParExpr")
        self.Ex = g.nonterminal("Expr")
        self.IoE = g.nonterminal("IfOrElse")
        self.t_if = g.terminal("if")
        self.t_else = g.terminal("else")
        self.t_l = g.terminal("(")
        self.t_r = g.terminal(")")
        self.r_if = g.add_rule(self.St, (self.t_if, self.PE, self.St, self.IoE))
        self.r_par = g.add_rule(self.PE, (self.t_l, self.Ex, self.t_r))
        self.r_else = g.add_rule(self.IoE, (self.t_else, self.St))
        self.grammar = g.freeze()

    def par(self) -> ParseTree:
        return ParseTree(self.PE, self.r_par.id,
                         (leaf(self.t_l), leaf(self.Ex), leaf(self.t_r)))

    def simple_if(self) -> ParseTree:
        tail = ParseTree(self.IoE, self.r_else.id,
                         (leaf(self.t_else), leaf(self.St)))
        return ParseTree(self.St, self.r_if.id,
                         (leaf(self.t_if), self.par(), leaf(self.St), tail))

    def nested_if(self) -> ParseTree:
        inner = ParseTree(self.St, self.r_if.id,
                          (leaf(self.t_if), self.par(), leaf(self.St),
                           leaf(self.IoE)))
        tail = ParseTree(self.IoE, self.r_else.id, (leaf(self.t_else), inner))
        return ParseTree(self.St, self.r_if.id,
                         (leaf(self.t_if), self.par(), leaf(self.St), tail))

    def corpus(self):
        return [self.simple_if(), self.simple_if(), self.nested_if()]


@pytest.fixture
def if_scenario():
    return IfScenario()


@pytest.fixture
def mini():
    from treeidioms.minilang import mini_language
    return mini_language()
