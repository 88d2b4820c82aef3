"""Symbols, production rules and grammars.

A Grammar starts from a static set of declared symbols and rules (the part
covered by the fingerprint) and can grow in two controlled ways afterwards:
unary lexical rules interned on demand for identifier/literal spellings, and
idiom rules appended by the miner.  Rules are append-only; nothing is ever
mutated in place, so rule ids stay valid for the lifetime of the grammar.

Rule ids live in three disjoint ranges so that they are stable across runs
and across corpora sharing the same static grammar:

  static rules    0 .. S-1          (grammar-file order)
  idiom rules     IDIOM_ID_BASE + rank - 1
  lexical rules   LEXICAL_ID_BASE + content hash of (lhs, lexeme)

Content-hashed lexical ids mean two independent runs that both intern
``Name -> "System"`` agree on its id, which is what lets an idiom file mined
on one corpus be applied to another without an id-translation table.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

IDIOM_ID_BASE = 1 << 20
LEXICAL_ID_BASE = 1 << 32


class TreeIdiomsError(Exception):
    """Base class for all errors raised by this package."""


class GrammarError(TreeIdiomsError):
    pass


@dataclass(frozen=True, slots=True)
class Symbol:
    name: str
    terminal: bool

    def __repr__(self):
        kind = "T" if self.terminal else "N"
        return f"{kind}:{self.name}"


# rule origins
BASE = "base"
LEXICAL = "lexical"  # unary spelling rule, materialized on demand
IDIOM = "idiom"


def lexical_rule_id(lhs_name: str, lexeme: str) -> int:
    digest = hashlib.sha256(
        lhs_name.encode() + b"\x00" + lexeme.encode()).digest()
    return LEXICAL_ID_BASE + (int.from_bytes(digest[:8], "big") >> 2)


@dataclass(frozen=True, slots=True)
class ProductionRule:
    id: int
    lhs: Symbol
    rhs: tuple[Symbol, ...]
    origin: str = BASE
    rank: int | None = None  # extraction rank, idiom rules only

    def __post_init__(self):
        if self.lhs.terminal:
            raise GrammarError(f"rule {self.id}: lhs {self.lhs.name!r} is a terminal")
        if len(self.rhs) < 1:
            raise GrammarError(f"rule {self.id}: empty rhs")
        if (self.origin == IDIOM) != (self.rank is not None):
            raise GrammarError(f"rule {self.id}: rank must be set iff origin is idiom")

    def __str__(self):
        rhs = " ".join(f'"{s.name}"' if s.terminal else s.name for s in self.rhs)
        return f"{self.lhs.name} -> {rhs}"


class Grammar:
    """Symbol inventory plus an append-only rule table.

    The fingerprint covers only the declared symbols and static rules;
    interned lexemes and idiom rules do not affect it, so idiom sets remain
    portable across corpora that share a static grammar.
    """

    def __init__(self, start: str):
        self._nonterminals: dict[str, Symbol] = {}
        self._terminals: dict[str, Symbol] = {}
        self._declared_terminals: set[str] = set()
        self._rules: dict[int, ProductionRule] = {}
        self._static_count = 0
        self._start_name = start
        self._frozen = False
        self._fingerprint: str | None = None

    # -- symbols ---------------------------------------------------------

    def nonterminal(self, name: str) -> Symbol:
        sym = self._nonterminals.get(name)
        if sym is None:
            if self._frozen:
                raise GrammarError(f"unknown nonterminal {name!r}")
            sym = Symbol(name, terminal=False)
            self._nonterminals[name] = sym
        return sym

    def terminal(self, name: str) -> Symbol:
        """Return the terminal symbol, interning it if new.

        Terminals interned after freezing (identifier spellings and the
        like) are not part of the fingerprint.
        """
        sym = self._terminals.get(name)
        if sym is None:
            sym = Symbol(name, terminal=True)
            self._terminals[name] = sym
        if not self._frozen:
            self._declared_terminals.add(name)
        return sym

    def has_nonterminal(self, name: str) -> bool:
        return name in self._nonterminals

    def symbol(self, name: str, terminal: bool) -> Symbol:
        return self.terminal(name) if terminal else self.nonterminal(name)

    @property
    def start(self) -> Symbol:
        return self.nonterminal(self._start_name)

    # -- rules -----------------------------------------------------------

    def _register(self, rule: ProductionRule) -> ProductionRule:
        for sym in (rule.lhs, *rule.rhs):
            table = self._terminals if sym.terminal else self._nonterminals
            if table.get(sym.name) is not sym:
                raise GrammarError(f"rule references foreign symbol {sym!r}")
        existing = self._rules.get(rule.id)
        if existing is not None:
            if existing.lhs != rule.lhs or existing.rhs != rule.rhs:
                raise GrammarError(
                    f"rule id {rule.id} conflict: have [{existing}], new [{rule}]")
            return existing
        self._rules[rule.id] = rule
        return rule

    def add_rule(self, lhs: Symbol, rhs) -> ProductionRule:
        """Append a static (base) rule; ids follow declaration order."""
        if self._frozen:
            raise GrammarError("cannot add base rules to a frozen grammar")
        rule = ProductionRule(self._static_count, lhs, tuple(rhs), BASE)
        if rule.id >= IDIOM_ID_BASE:
            raise GrammarError("static rule table overflow")
        self._register(rule)
        self._static_count += 1
        return rule

    def add_idiom_rule(self, lhs: Symbol, rhs, rank: int) -> ProductionRule:
        if rank < 1:
            raise GrammarError(f"idiom rank must be >= 1, got {rank}")
        rule = ProductionRule(IDIOM_ID_BASE + rank - 1, lhs, tuple(rhs),
                              IDIOM, rank)
        return self._register(rule)

    def lexical_rule(self, lhs_name: str, lexeme: str) -> ProductionRule:
        """Get-or-create the unary spelling rule ``lhs -> "lexeme"``."""
        rid = lexical_rule_id(lhs_name, lexeme)
        rule = self._rules.get(rid)
        if rule is None:
            lhs = self.nonterminal(lhs_name)
            tok = self.terminal(lexeme)
            rule = self._register(ProductionRule(rid, lhs, (tok,), LEXICAL))
        return rule

    def rule(self, rule_id: int) -> ProductionRule:
        rule = self._rules.get(rule_id)
        if rule is None:
            raise GrammarError(f"unknown rule id {rule_id}")
        return rule

    def has_rule(self, rule_id: int) -> bool:
        return rule_id in self._rules

    def materialize_rule(self, rule_id: int, lhs: Symbol, rhs) -> ProductionRule:
        """Register a rule under an id dictated by a tree file.

        Only lexical rules may be introduced this way, and the id must match
        the content hash; any other unknown id is corrupt input.
        """
        rhs = tuple(rhs)
        existing = self._rules.get(rule_id)
        if existing is not None:
            if existing.lhs != lhs or existing.rhs != rhs:
                raise GrammarError(
                    f"rule id {rule_id} conflict: have [{existing}], "
                    f"tree says {lhs.name} -> {' '.join(s.name for s in rhs)}")
            return existing
        if (len(rhs) == 1 and rhs[0].terminal
                and rule_id == lexical_rule_id(lhs.name, rhs[0].name)):
            return self.lexical_rule(lhs.name, rhs[0].name)
        raise GrammarError(f"unknown rule id {rule_id}")

    @property
    def rules(self) -> list[ProductionRule]:
        return list(self._rules.values())

    @property
    def base_rules(self) -> list[ProductionRule]:
        return [self._rules[i] for i in range(self._static_count)]

    @property
    def idiom_rules(self) -> list[ProductionRule]:
        out = [r for r in self._rules.values() if r.origin == IDIOM]
        out.sort(key=lambda r: r.rank)
        return out

    # -- fingerprint -----------------------------------------------------

    def freeze(self) -> "Grammar":
        """Mark the static part complete and fix the fingerprint."""
        if not self._frozen:
            if self._start_name not in self._nonterminals:
                raise GrammarError(f"start symbol {self._start_name!r} undeclared")
            self._frozen = True
            self._fingerprint = self._compute_fingerprint()
        return self

    def _compute_fingerprint(self) -> str:
        def enc(sym: Symbol):
            return ["T" if sym.terminal else "N", sym.name]

        payload = {
            "nonterminals": sorted(self._nonterminals),
            "terminals": sorted(self._declared_terminals),
            "start": self._start_name,
            "rules": [[enc(r.lhs), [enc(s) for s in r.rhs]]
                      for r in self.base_rules],
        }
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    @property
    def fingerprint(self) -> str:
        if self._fingerprint is None:
            raise GrammarError("grammar not frozen yet")
        return self._fingerprint

    # -- copying ---------------------------------------------------------

    def clone(self) -> "Grammar":
        """Independent copy; rule/symbol values are shared (they are frozen)."""
        g = Grammar(self._start_name)
        g._nonterminals = dict(self._nonterminals)
        g._terminals = dict(self._terminals)
        g._declared_terminals = set(self._declared_terminals)
        g._rules = dict(self._rules)
        g._static_count = self._static_count
        g._frozen = self._frozen
        g._fingerprint = self._fingerprint
        return g

    # -- grammar files ---------------------------------------------------

    FORMAT_VERSION = 1

    def to_json(self) -> dict:
        # rhs entries are plain names; kind is recovered from the symbol lists,
        # so grammar files require the two name spaces to be disjoint.
        return {
            "format_version": self.FORMAT_VERSION,
            "nonterminals": sorted(self._nonterminals),
            "terminals": sorted(self._declared_terminals),
            "start": self._start_name,
            "rules": [{"lhs": r.lhs.name, "rhs": [s.name for s in r.rhs]}
                      for r in self.base_rules],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Grammar":
        if data.get("format_version") != cls.FORMAT_VERSION:
            raise GrammarError(
                f"unsupported grammar format_version {data.get('format_version')!r}")
        nts = set(data["nonterminals"])
        terms = set(data["terminals"])
        if nts & terms:
            raise GrammarError(f"symbols declared as both kinds: {sorted(nts & terms)}")
        g = cls(data["start"])
        for name in data["nonterminals"]:
            g.nonterminal(name)
        for name in data["terminals"]:
            g.terminal(name)
        for spec in data["rules"]:
            if spec["lhs"] not in nts:
                raise GrammarError(f"rule lhs {spec['lhs']!r} is not a nonterminal")
            rhs = []
            for name in spec["rhs"]:
                if name in nts:
                    rhs.append(g.nonterminal(name))
                elif name in terms:
                    rhs.append(g.terminal(name))
                else:
                    raise GrammarError(f"undeclared symbol {name!r} in rule rhs")
            g.add_rule(g.nonterminal(spec["lhs"]), rhs)
        return g.freeze()
