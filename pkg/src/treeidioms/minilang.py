"""A small Java-like statement language with a deliberately tall grammar.

The grammar routes every construct through several intermediate
nonterminals (Stmt -> IfStmt -> ParExpr -> Expr -> ... chains), which gives
the miner multi-step derivations to collapse.  Identifiers and literals
enter trees through unary spelling rules (Name -> "System" and friends), so
mined idioms can embed concrete identifier names.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass

from .grammar import Grammar, TreeIdiomsError
from .trees import ParseTree, leaf


class LexError(TreeIdiomsError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


class MiniParseError(TreeIdiomsError):
    def __init__(self, message: str, line: int, col: int, expected=()):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col
        self.expected = tuple(expected)


@dataclass(frozen=True, slots=True)
class SourceProgram:
    text: str
    origin: str = "<string>"


@dataclass(frozen=True, slots=True)
class Token:
    type: str  # "ident", "int", "string", or the lexeme itself
    lexeme: str
    line: int
    col: int


KEYWORDS = {"if", "else", "while", "for", "try", "catch", "throw",
            "return", "new", "int"}

# longest-match first
PUNCTUATION = ["++", "==", "!=", "<=", ">=",
               "{", "}", "(", ")", ";", ",", ".", "=",
               "<", ">", "+", "-", "*", "!"]

_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<string>"(?:\\.|[^"\\\n])*")
      | (?P<badstring>"(?:\\.|[^"\\\n])*$)
      | (?P<int>\d+)
      | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
      | (?P<punct>\+\+|==|!=|<=|>=|[{}();,.=<>+\-*!])
    """, re.VERBOSE | re.MULTILINE)


def tokenize(program: SourceProgram) -> list[Token]:
    text = program.text
    tokens = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise LexError(f"illegal character {text[pos]!r}", line, col)
        kind = m.lastgroup
        lexeme = m.group()
        if kind == "badstring":
            raise LexError("unterminated string literal", line, col)
        if kind == "ws":
            for i, ch in enumerate(lexeme):
                if ch == "\n":
                    line += 1
                    line_start = pos + i + 1
        else:
            if kind == "ident" and lexeme in KEYWORDS:
                tokens.append(Token(lexeme, lexeme, line, col))
            elif kind == "punct":
                tokens.append(Token(lexeme, lexeme, line, col))
            elif kind == "int":
                # "number", so the keyword token type "int" stays unambiguous
                tokens.append(Token("number", lexeme, line, col))
            else:
                tokens.append(Token(kind, lexeme, line, col))
        pos = m.end()
    return tokens


class MiniLanguage:
    """The built-in grammar plus its parser-facing rule handles."""

    def __init__(self):
        g = Grammar("Program")
        for name in ["Program", "StmtList", "Stmt", "Block", "IfStmt",
                     "IfTail", "WhileStmt", "ForStmt", "ForInit", "ForUpdate",
                     "TryStmt", "CatchClause", "ThrowStmt", "ReturnStmt",
                     "DeclStmt", "AssignStmt", "ExprStmt", "ParExpr", "Expr",
                     "CmpExpr", "CmpOp", "AddExpr", "AddOp", "MulExpr",
                     "MulOp", "Unary", "Postfix", "CallArgs", "Args",
                     "Primary", "NewExpr", "TypeName", "Name", "IntLit",
                     "StrLit"]:
            g.nonterminal(name)
        for lex in sorted(KEYWORDS | set(PUNCTUATION)):
            g.terminal(lex)

        self.rules = {}

        def rule(key: str, lhs: str, rhs_spec: str):
            rhs = []
            for part in rhs_spec.split():
                if g.has_nonterminal(part):
                    rhs.append(g.nonterminal(part))
                else:
                    rhs.append(g.terminal(part))
            self.rules[key] = g.add_rule(g.nonterminal(lhs), rhs)

        rule("program", "Program", "StmtList")
        rule("stmtlist_cons", "StmtList", "Stmt StmtList")
        rule("stmtlist_one", "StmtList", "Stmt")
        for kind in ["IfStmt", "WhileStmt", "ForStmt", "TryStmt", "ThrowStmt",
                     "ReturnStmt", "Block", "DeclStmt", "AssignStmt",
                     "ExprStmt"]:
            rule(f"stmt_{kind.lower()}", "Stmt", kind)
        rule("block", "Block", "{ StmtList }")
        rule("block_empty", "Block", "{ }")
        rule("if_else", "IfStmt", "if ParExpr Stmt IfTail")
        rule("if_plain", "IfStmt", "if ParExpr Stmt")
        rule("if_tail", "IfTail", "else Stmt")
        rule("while", "WhileStmt", "while ParExpr Stmt")
        rule("for", "ForStmt", "for ( ForInit Expr ; ForUpdate ) Stmt")
        rule("for_init", "ForInit", "TypeName Name = Expr ;")
        rule("for_incr", "ForUpdate", "Name ++")
        rule("for_assign", "ForUpdate", "Name = Expr")
        rule("try", "TryStmt", "try Block CatchClause")
        rule("catch", "CatchClause", "catch ( TypeName Name ) Block")
        rule("throw", "ThrowStmt", "throw Expr ;")
        rule("return_value", "ReturnStmt", "return Expr ;")
        rule("return_void", "ReturnStmt", "return ;")
        rule("decl_init", "DeclStmt", "TypeName Name = Expr ;")
        rule("decl_plain", "DeclStmt", "TypeName Name ;")
        rule("assign", "AssignStmt", "Name = Expr ;")
        rule("expr_stmt", "ExprStmt", "Expr ;")
        rule("par_expr", "ParExpr", "( Expr )")
        rule("expr", "Expr", "CmpExpr")
        rule("cmp_op", "CmpExpr", "AddExpr CmpOp AddExpr")
        rule("cmp_unit", "CmpExpr", "AddExpr")
        for op in ["<", ">", "<=", ">=", "==", "!="]:
            rule(f"cmpop_{op}", "CmpOp", op)
        rule("add_op", "AddExpr", "MulExpr AddOp AddExpr")
        rule("add_unit", "AddExpr", "MulExpr")
        rule("addop_+", "AddOp", "+")
        rule("addop_-", "AddOp", "-")
        rule("mul_op", "MulExpr", "Unary MulOp MulExpr")
        rule("mul_unit", "MulExpr", "Unary")
        rule("mulop_*", "MulOp", "*")
        rule("unary_not", "Unary", "! Unary")
        rule("unary_postfix", "Unary", "Postfix")
        rule("postfix_call", "Postfix", "Postfix . Name CallArgs")
        rule("postfix_field", "Postfix", "Postfix . Name")
        rule("postfix_primary", "Postfix", "Primary")
        rule("callargs_empty", "CallArgs", "( )")
        rule("callargs", "CallArgs", "( Args )")
        rule("args_cons", "Args", "Expr , Args")
        rule("args_one", "Args", "Expr")
        rule("primary_call", "Primary", "Name CallArgs")
        rule("primary_name", "Primary", "Name")
        rule("primary_int", "Primary", "IntLit")
        rule("primary_str", "Primary", "StrLit")
        rule("primary_paren", "Primary", "ParExpr")
        rule("primary_new", "Primary", "NewExpr")
        rule("new", "NewExpr", "new TypeName CallArgs")
        rule("type_name", "TypeName", "Name")
        rule("type_int", "TypeName", "int")

        self.grammar = g.freeze()


def mini_language() -> MiniLanguage:
    """Fresh grammar instance (callers may append idiom rules to it)."""
    return MiniLanguage()


_CMP_OPS = {"<", ">", "<=", ">=", "==", "!="}
_STMT_KEYWORDS = {"if", "while", "for", "try", "throw", "return", "{", "int"}


class _Parser:
    def __init__(self, tokens: list[Token], lang: MiniLanguage):
        self.tokens = tokens
        self.pos = 0
        self.lang = lang
        self.g = lang.grammar

    # -- plumbing --------------------------------------------------------

    def peek(self, ahead: int = 0) -> Token | None:
        i = self.pos + ahead
        return self.tokens[i] if i < len(self.tokens) else None

    def error(self, message: str, expected=()) -> MiniParseError:
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else Token("", "", 1, 1)
            return MiniParseError(f"{message}, found end of input",
                                  last.line, last.col + len(last.lexeme), expected)
        return MiniParseError(f"{message}, found {tok.lexeme!r}",
                              tok.line, tok.col, expected)

    def expect(self, ttype: str) -> Token:
        tok = self.peek()
        if tok is None or tok.type != ttype:
            raise self.error(f"expected {ttype!r}", [ttype])
        self.pos += 1
        return tok

    def node(self, rule_key: str, children) -> ParseTree:
        rule = self.lang.rules[rule_key]
        return ParseTree(rule.lhs, rule.id, tuple(children))

    def term(self, ttype: str) -> ParseTree:
        tok = self.expect(ttype)
        return leaf(self.g.terminal(tok.lexeme))

    def lexical(self, nt: str, ttype: str) -> ParseTree:
        tok = self.expect(ttype)
        rule = self.g.lexical_rule(nt, tok.lexeme)
        return ParseTree(rule.lhs, rule.id, (leaf(rule.rhs[0]),))

    # -- grammar ---------------------------------------------------------

    def parse_program(self) -> ParseTree:
        if self.peek() is None:
            raise MiniParseError("expected statement, found empty program", 1, 1,
                                 sorted(_STMT_KEYWORDS))
        tree = self.node("program", [self.parse_stmt_list()])
        if self.peek() is not None:
            raise self.error("expected statement")
        return tree

    def parse_stmt_list(self) -> ParseTree:
        stmt = self.parse_stmt()
        tok = self.peek()
        if tok is not None and tok.type != "}":
            return self.node("stmtlist_cons", [stmt, self.parse_stmt_list()])
        return self.node("stmtlist_one", [stmt])

    def parse_stmt(self) -> ParseTree:
        tok = self.peek()
        if tok is None:
            raise self.error("expected statement", sorted(_STMT_KEYWORDS))
        if tok.type == "if":
            return self.node("stmt_ifstmt", [self.parse_if()])
        if tok.type == "while":
            return self.node("stmt_whilestmt", [self.parse_while()])
        if tok.type == "for":
            return self.node("stmt_forstmt", [self.parse_for()])
        if tok.type == "try":
            return self.node("stmt_trystmt", [self.parse_try()])
        if tok.type == "throw":
            return self.node("stmt_throwstmt", [self.parse_throw()])
        if tok.type == "return":
            return self.node("stmt_returnstmt", [self.parse_return()])
        if tok.type == "{":
            return self.node("stmt_block", [self.parse_block()])
        if tok.type == "int":
            return self.node("stmt_declstmt", [self.parse_decl()])
        if tok.type == "ident":
            nxt = self.peek(1)
            if nxt is not None and nxt.type == "ident":
                return self.node("stmt_declstmt", [self.parse_decl()])
            if nxt is not None and nxt.type == "=":
                stmt = self.node("assign", [
                    self.lexical("Name", "ident"), self.term("="),
                    self.parse_expr(), self.term(";")])
                return self.node("stmt_assignstmt", [stmt])
        stmt = self.node("expr_stmt", [self.parse_expr(), self.term(";")])
        return self.node("stmt_exprstmt", [stmt])

    def parse_block(self) -> ParseTree:
        lbrace = self.term("{")
        tok = self.peek()
        if tok is not None and tok.type == "}":
            return self.node("block_empty", [lbrace, self.term("}")])
        return self.node("block", [lbrace, self.parse_stmt_list(), self.term("}")])

    def parse_if(self) -> ParseTree:
        kw = self.term("if")
        cond = self.parse_par_expr()
        then = self.parse_stmt()
        tok = self.peek()
        if tok is not None and tok.type == "else":
            tail = self.node("if_tail", [self.term("else"), self.parse_stmt()])
            return self.node("if_else", [kw, cond, then, tail])
        return self.node("if_plain", [kw, cond, then])

    def parse_while(self) -> ParseTree:
        return self.node("while", [self.term("while"), self.parse_par_expr(),
                                   self.parse_stmt()])

    def parse_for(self) -> ParseTree:
        kw = self.term("for")
        lparen = self.term("(")
        init = self.node("for_init", [
            self.parse_type(), self.lexical("Name", "ident"),
            self.term("="), self.parse_expr(), self.term(";")])
        cond = self.parse_expr()
        semi = self.term(";")
        update = self.parse_for_update()
        return self.node("for", [kw, lparen, init, cond, semi, update,
                                 self.term(")"), self.parse_stmt()])

    def parse_for_update(self) -> ParseTree:
        name = self.lexical("Name", "ident")
        tok = self.peek()
        if tok is not None and tok.type == "++":
            return self.node("for_incr", [name, self.term("++")])
        return self.node("for_assign", [name, self.term("="), self.parse_expr()])

    def parse_try(self) -> ParseTree:
        kw = self.term("try")
        body = self.parse_block()
        clause = self.node("catch", [
            self.term("catch"), self.term("("), self.parse_type(),
            self.lexical("Name", "ident"), self.term(")"), self.parse_block()])
        return self.node("try", [kw, body, clause])

    def parse_throw(self) -> ParseTree:
        return self.node("throw", [self.term("throw"), self.parse_expr(),
                                   self.term(";")])

    def parse_return(self) -> ParseTree:
        kw = self.term("return")
        tok = self.peek()
        if tok is not None and tok.type == ";":
            return self.node("return_void", [kw, self.term(";")])
        return self.node("return_value", [kw, self.parse_expr(), self.term(";")])

    def parse_decl(self) -> ParseTree:
        typ = self.parse_type()
        name = self.lexical("Name", "ident")
        tok = self.peek()
        if tok is not None and tok.type == "=":
            return self.node("decl_init", [typ, name, self.term("="),
                                           self.parse_expr(), self.term(";")])
        return self.node("decl_plain", [typ, name, self.term(";")])

    def parse_type(self) -> ParseTree:
        tok = self.peek()
        if tok is not None and tok.type == "int":
            return self.node("type_int", [self.term("int")])
        return self.node("type_name", [self.lexical("Name", "ident")])

    def parse_par_expr(self) -> ParseTree:
        return self.node("par_expr", [self.term("("), self.parse_expr(),
                                      self.term(")")])

    def parse_expr(self) -> ParseTree:
        return self.node("expr", [self.parse_cmp()])

    def parse_cmp(self) -> ParseTree:
        left = self.parse_add()
        tok = self.peek()
        if tok is not None and tok.type in _CMP_OPS:
            op = self.node(f"cmpop_{tok.type}", [self.term(tok.type)])
            return self.node("cmp_op", [left, op, self.parse_add()])
        return self.node("cmp_unit", [left])

    def parse_add(self) -> ParseTree:
        left = self.parse_mul()
        tok = self.peek()
        if tok is not None and tok.type in ("+", "-"):
            op = self.node(f"addop_{tok.type}", [self.term(tok.type)])
            return self.node("add_op", [left, op, self.parse_add()])
        return self.node("add_unit", [left])

    def parse_mul(self) -> ParseTree:
        left = self.parse_unary()
        tok = self.peek()
        if tok is not None and tok.type == "*":
            op = self.node("mulop_*", [self.term("*")])
            return self.node("mul_op", [left, op, self.parse_mul()])
        return self.node("mul_unit", [left])

    def parse_unary(self) -> ParseTree:
        tok = self.peek()
        if tok is not None and tok.type == "!":
            return self.node("unary_not", [self.term("!"), self.parse_unary()])
        return self.node("unary_postfix", [self.parse_postfix()])

    def parse_postfix(self) -> ParseTree:
        tree = self.node("postfix_primary", [self.parse_primary()])
        while True:
            tok = self.peek()
            if tok is None or tok.type != ".":
                return tree
            dot = self.term(".")
            name = self.lexical("Name", "ident")
            nxt = self.peek()
            if nxt is not None and nxt.type == "(":
                tree = self.node("postfix_call",
                                 [tree, dot, name, self.parse_call_args()])
            else:
                tree = self.node("postfix_field", [tree, dot, name])

    def parse_call_args(self) -> ParseTree:
        lparen = self.term("(")
        tok = self.peek()
        if tok is not None and tok.type == ")":
            return self.node("callargs_empty", [lparen, self.term(")")])
        return self.node("callargs", [lparen, self.parse_args(), self.term(")")])

    def parse_args(self) -> ParseTree:
        expr = self.parse_expr()
        tok = self.peek()
        if tok is not None and tok.type == ",":
            return self.node("args_cons", [expr, self.term(","), self.parse_args()])
        return self.node("args_one", [expr])

    def parse_primary(self) -> ParseTree:
        tok = self.peek()
        if tok is None:
            raise self.error("expected expression")
        if tok.type == "ident":
            nxt = self.peek(1)
            name = self.lexical("Name", "ident")
            if nxt is not None and nxt.type == "(":
                return self.node("primary_call", [name, self.parse_call_args()])
            return self.node("primary_name", [name])
        if tok.type == "number":
            return self.node("primary_int", [self.lexical("IntLit", "number")])
        if tok.type == "string":
            return self.node("primary_str", [self.lexical("StrLit", "string")])
        if tok.type == "(":
            return self.node("primary_paren", [self.parse_par_expr()])
        if tok.type == "new":
            new = self.node("new", [self.term("new"), self.parse_type(),
                                    self.parse_call_args()])
            return self.node("primary_new", [new])
        raise self.error("expected expression")


def parse(program: SourceProgram, lang: MiniLanguage) -> ParseTree:
    tokens = tokenize(program)
    return _Parser(tokens, lang).parse_program()


# -- demo corpus ---------------------------------------------------------

_IDENTS = ["x", "y", "z", "i", "j", "k", "n", "m", "count", "total",
           "value", "item", "result", "index", "size", "flag", "temp",
           "data", "buffer", "score", "limit", "offset", "width", "height",
           "weight", "cursor", "state", "level", "depth", "sum"]
_TYPES = ["Vector", "ArrayList", "HashMap", "StringBuilder", "Point",
          "Matrix", "Buffer"]
_EXCEPTIONS = ["Exception", "IOException", "IllegalArgumentException",
               "RuntimeException"]
_STRINGS = ['"hello"', '"done"', '"error"', '"value out of range"',
            '"started"', '"finished"', '"ok"', '"warning"',
            '"empty input"', '"result"', '"retrying"', '"skipped"']
_INTS = ["0", "1", "2", "3", "5", "10", "42", "100"]
_METHODS = ["add", "get", "put", "remove", "size", "clear", "update",
            "close", "reset"]


def _expr(rng: random.Random) -> str:
    pick = rng.randrange(6)
    if pick == 0:
        return rng.choice(_IDENTS)
    if pick == 1:
        return rng.choice(_INTS)
    if pick == 2:
        return f"{rng.choice(_IDENTS)} + {rng.choice(_INTS)}"
    if pick == 3:
        return f"{rng.choice(_IDENTS)} * {rng.choice(_IDENTS)}"
    if pick == 4:
        return f"{rng.choice(_IDENTS)} . {rng.choice(_METHODS)} ( )"
    return f"{rng.choice(_IDENTS)} . {rng.choice(_METHODS)} ( {rng.choice(_IDENTS)} )"


def _simple_stmt(rng: random.Random) -> str:
    pick = rng.randrange(4)
    if pick == 0:
        return f"{rng.choice(_IDENTS)} = {_expr(rng)} ;"
    if pick == 1:
        return f"System . out . println ( {rng.choice(_STRINGS)} ) ;"
    if pick == 2:
        return f"{rng.choice(_IDENTS)} . {rng.choice(_METHODS)} ( ) ;"
    return f"{rng.choice(_IDENTS)} . {rng.choice(_METHODS)} ( {_expr(rng)} ) ;"


def _statement(rng: random.Random) -> str:
    pick = rng.randrange(12)
    if pick == 0:
        return f"System . out . println ( {rng.choice(_STRINGS)} ) ;"
    if pick == 1:
        typ = rng.choice(_TYPES)
        args = rng.choice(["", rng.choice(_INTS),
                           f"{rng.choice(_IDENTS)} , {rng.choice(_INTS)}"])
        return (f"{typ} {rng.choice(_IDENTS)} = new {typ} ( {args} ) ;"
                .replace("(  )", "( )"))
    if pick == 2:
        return (f"try {{ {_simple_stmt(rng)} }} catch "
                f"( {rng.choice(_EXCEPTIONS)} e ) {{ "
                f"System . out . println ( {rng.choice(_STRINGS)} ) ; }}")
    if pick == 3:
        i = rng.choice(["i", "j", "k"])
        return (f"for ( int {i} = 0 ; {i} < {rng.choice(_IDENTS)} ; {i} ++ ) "
                f"{{ {_simple_stmt(rng)} }}")
    if pick == 4:
        op = rng.choice(["<", ">", "==", "!=", "<=", ">="])
        return (f"if ( {rng.choice(_IDENTS)} {op} {rng.choice(_INTS)} ) "
                f"{{ {_simple_stmt(rng)} }} else {{ {_simple_stmt(rng)} }}")
    if pick == 5:
        return (f"if ( {rng.choice(_IDENTS)} < 0 ) {{ throw new "
                f"{rng.choice(_EXCEPTIONS)} ( {rng.choice(_STRINGS)} ) ; }}")
    if pick == 6:
        return f"{rng.choice(_IDENTS)} = {_expr(rng)} ;"
    if pick == 7:
        return f"{rng.choice(_IDENTS)} . {rng.choice(_METHODS)} ( ) ;"
    if pick == 8:
        return f"return {_expr(rng)} ;"
    if pick == 9:
        return (f"int {rng.choice(_IDENTS)} = {rng.choice(_INTS)} ;")
    if pick == 10:
        op = rng.choice(["<", "=="])
        return (f"if ( {rng.choice(_IDENTS)} {op} {rng.choice(_INTS)} ) "
                f"{{ {_simple_stmt(rng)} }}")
    return (f"while ( {rng.choice(_IDENTS)} < {rng.choice(_IDENTS)} ) "
            f"{{ {_simple_stmt(rng)} }}")


def generate_demo_corpus(seed: int, count: int) -> list[SourceProgram]:
    """Deterministic template-sampled programs; every one of them parses."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = random.Random(seed)
    programs = []
    for idx in range(count):
        stmts = [_statement(rng) for _ in range(rng.randint(1, 4))]
        programs.append(SourceProgram("\n".join(stmts),
                                      origin=f"demo:{seed}:{idx}"))
    return programs


CORPUS_SEPARATOR = "%%"


def write_corpus_file(path, programs) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for i, prog in enumerate(programs):
            if i:
                fh.write(CORPUS_SEPARATOR + "\n")
            fh.write(prog.text.rstrip("\n") + "\n")


def read_corpus_file(path) -> list[SourceProgram]:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise TreeIdiomsError(
            f"cannot read corpus file {str(path)!r}: {exc}") from exc
    programs = []
    chunk: list[str] = []
    lines = text.splitlines()
    n_chunks = 0
    for line in lines + [CORPUS_SEPARATOR]:
        if line.strip() == CORPUS_SEPARATOR:
            body = "\n".join(chunk).strip("\n")
            if body.strip():
                programs.append(SourceProgram(body, origin=f"{path}#{n_chunks}"))
            n_chunks += 1
            chunk = []
        else:
            chunk.append(line)
    return programs
