"""Derivation trees: validation, rule sequences, replay and serialization.

Trees are immutable; every rewrite in the package builds new nodes.  A leaf
is either a terminal, or a nonterminal "slot" when the tree is a pattern
template (an idiom expansion, or a partially derived example).
"""

from __future__ import annotations

from dataclasses import dataclass

from .grammar import Grammar, Symbol, TreeIdiomsError


class TreeError(TreeIdiomsError):
    pass


class ReplayError(TreeIdiomsError):
    pass


class TreeFormatError(TreeIdiomsError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


@dataclass(frozen=True, slots=True)
class ParseTree:
    symbol: Symbol
    rule_id: int | None = None
    children: tuple["ParseTree", ...] = ()

    def __post_init__(self):
        if self.rule_id is None and self.children:
            raise TreeError("node without an applied rule cannot have children")
        if self.rule_id is not None and self.symbol.terminal:
            raise TreeError("terminal node cannot apply a rule")

    @property
    def is_internal(self) -> bool:
        return self.rule_id is not None


def leaf(symbol: Symbol) -> ParseTree:
    return ParseTree(symbol)


def node(symbol: Symbol, rule_id: int, children) -> ParseTree:
    return ParseTree(symbol, rule_id, tuple(children))


def internal_node_count(tree: ParseTree) -> int:
    count = 0
    stack = [tree]
    while stack:
        n = stack.pop()
        if n.is_internal:
            count += 1
            stack.extend(n.children)
    return count


def frontier(tree: ParseTree) -> list[Symbol]:
    """Left-to-right leaf symbols (terminals, plus nonterminal slots)."""
    out = []
    stack = [tree]
    while stack:
        n = stack.pop()
        if n.is_internal:
            stack.extend(reversed(n.children))
        else:
            out.append(n.symbol)
    return out


def tree_yield(tree: ParseTree) -> list[str]:
    """Leaf names in frontier order (slot leaves included by name, so yield
    preservation is checkable on templates too)."""
    return [s.name for s in frontier(tree)]


# -- validation ----------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Violation:
    path: tuple[int, ...]
    message: str

    def __str__(self):
        where = ".".join(map(str, self.path)) or "<root>"
        return f"{where}: {self.message}"


def validate_tree(tree: ParseTree, grammar: Grammar,
                  allow_slots: bool = False) -> list[Violation]:
    """Check every internal node against its applied rule.

    Returns the list of violations; an empty list means the tree is valid.
    With ``allow_slots`` nonterminal leaves are permitted (pattern templates).
    """
    violations = []
    stack = [(tree, ())]
    while stack:
        n, path = stack.pop()
        if not n.is_internal:
            if not n.symbol.terminal and not allow_slots:
                violations.append(Violation(path, f"unexpanded nonterminal {n.symbol.name!r}"))
            continue
        if not grammar.has_rule(n.rule_id):
            violations.append(Violation(path, f"unknown rule id {n.rule_id}"))
            continue
        rule = grammar.rule(n.rule_id)
        if rule.lhs != n.symbol:
            violations.append(Violation(
                path, f"rule {n.rule_id} expands {rule.lhs.name!r}, node is {n.symbol.name!r}"))
            continue
        child_syms = tuple(c.symbol for c in n.children)
        if child_syms != rule.rhs:
            violations.append(Violation(path, f"rhs mismatch for rule {n.rule_id} [{rule}]"))
            continue
        for i, c in enumerate(n.children):
            stack.append((c, path + (i,)))
    violations.sort(key=lambda v: v.path)
    return violations


def check_tree(tree: ParseTree, grammar: Grammar, allow_slots: bool = False) -> None:
    violations = validate_tree(tree, grammar, allow_slots)
    if violations:
        raise TreeError("; ".join(str(v) for v in violations[:5]))


# -- rule sequences ------------------------------------------------------

def rule_sequence(tree: ParseTree) -> list[int]:
    """Pre-order rule ids of internal nodes (leftmost-derivation order)."""
    out = []
    stack = [tree]
    while stack:
        n = stack.pop()
        if n.is_internal:
            out.append(n.rule_id)
            stack.extend(reversed(n.children))
    return out


def replay(sequence, grammar: Grammar, root: Symbol | None = None) -> ParseTree:
    """Rebuild the tree by expanding the leftmost unexpanded nonterminal.

    Inverse of :func:`rule_sequence` on complete trees.
    """
    sequence = list(sequence)
    if not sequence:
        raise ReplayError("empty rule sequence")
    if root is None:
        root = grammar.rule(sequence[0]).lhs
    it = iter(sequence)

    def build(symbol: Symbol) -> ParseTree:
        try:
            rule_id = next(it)
        except StopIteration:
            raise ReplayError(
                f"premature exhaustion: no rule left to expand {symbol.name!r}") from None
        rule = grammar.rule(rule_id)
        if rule.lhs != symbol:
            raise ReplayError(
                f"rule {rule_id} [{rule}] inapplicable at nonterminal {symbol.name!r}")
        children = tuple(leaf(s) if s.terminal else build(s) for s in rule.rhs)
        return ParseTree(symbol, rule_id, children)

    tree = build(root)
    leftover = sum(1 for _ in it)
    if leftover:
        raise ReplayError(f"{leftover} leftover rule(s) after the tree was complete")
    return tree


# -- serialization -------------------------------------------------------

def _quote(lexeme: str) -> str:
    return '"' + lexeme.replace("\\", "\\\\").replace('"', '\\"') + '"'


def serialize_tree(tree: ParseTree) -> str:
    parts = []

    def emit(n: ParseTree):
        if n.is_internal:
            parts.append(f"({n.symbol.name}@{n.rule_id}")
            for c in n.children:
                parts.append(" ")
                emit(c)
            parts.append(")")
        elif n.symbol.terminal:
            parts.append(_quote(n.symbol.name))
        else:
            parts.append(n.symbol.name)

    emit(tree)
    return "".join(parts)


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def peek(self) -> str:
        self.skip_ws()
        if self.pos >= len(self.text):
            raise TreeFormatError("unexpected end of input", self.pos)
        return self.text[self.pos]

    def read_string(self) -> str:
        start = self.pos
        assert self.text[self.pos] == '"'
        self.pos += 1
        out = []
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch == "\\":
                if self.pos + 1 >= len(self.text):
                    break
                nxt = self.text[self.pos + 1]
                if nxt not in ('"', "\\"):
                    raise TreeFormatError(f"bad escape \\{nxt}", self.pos)
                out.append(nxt)
                self.pos += 2
            elif ch == '"':
                self.pos += 1
                return "".join(out)
            else:
                out.append(ch)
                self.pos += 1
        raise TreeFormatError("unterminated string", start)

    def read_name(self) -> str:
        start = self.pos
        while (self.pos < len(self.text)
               and self.text[self.pos] not in ' \t()"@'):
            self.pos += 1
        if self.pos == start:
            raise TreeFormatError(
                f"expected a symbol, found {self.text[start]!r}", start)
        return self.text[start:self.pos]


def deserialize_tree(text: str, grammar: Grammar) -> ParseTree:
    """Parse the parenthesized form.

    Rule ids unknown to the grammar are materialized when they are valid
    lexical spelling rules; anything else is rejected.
    """
    sc = _Scanner(text)

    def read_node() -> ParseTree:
        ch = sc.peek()
        if ch == '"':
            return leaf(grammar.terminal(sc.read_string()))
        if ch != "(":
            name = sc.read_name()
            if not grammar.has_nonterminal(name):
                raise TreeFormatError(f"unknown nonterminal {name!r}", sc.pos)
            return leaf(grammar.nonterminal(name))
        open_pos = sc.pos
        sc.pos += 1
        name = sc.read_name()
        if not grammar.has_nonterminal(name):
            raise TreeFormatError(f"unknown nonterminal {name!r}", open_pos)
        symbol = grammar.nonterminal(name)
        if sc.pos >= len(sc.text) or sc.text[sc.pos] != "@":
            raise TreeFormatError("expected '@ruleId' after node symbol", sc.pos)
        sc.pos += 1
        id_start = sc.pos
        while sc.pos < len(sc.text) and sc.text[sc.pos].isdigit():
            sc.pos += 1
        if sc.pos == id_start:
            raise TreeFormatError("expected a rule id", id_start)
        rule_id = int(sc.text[id_start:sc.pos])
        children = []
        while True:
            if sc.at_end():
                raise TreeFormatError("unbalanced parenthesis", open_pos)
            if sc.peek() == ")":
                sc.pos += 1
                break
            children.append(read_node())
        rule = grammar.materialize_rule(rule_id, symbol,
                                        tuple(c.symbol for c in children))
        if rule.rhs != tuple(c.symbol for c in children):
            raise TreeFormatError(f"children do not match rule {rule_id}", open_pos)
        return ParseTree(symbol, rule_id, tuple(children))

    tree = read_node()
    if not sc.at_end():
        raise TreeFormatError("trailing garbage after tree", sc.pos)
    return tree


def write_tree_file(path, trees) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for t in trees:
            fh.write(serialize_tree(t))
            fh.write("\n")


def read_tree_file(path, grammar: Grammar) -> list[ParseTree]:
    out = []
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise TreeError(f"cannot read tree file {str(path)!r}: {exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                out.append(deserialize_tree(line, grammar))
            except TreeIdiomsError as exc:
                raise TreeError(f"{path}:{lineno}: {exc}") from exc
    return out
