"""Recursive descent parser producing :class:`~seamlab.source.nodes.Program`."""

from ..errors import ParseError
from . import nodes as n

_COMPARISONS = ("==", "~=", "<", "<=", ">", ">=")
_BLOCK_END = ("end", "else", "elseif", "catch", "function")
_NO_SPACE_BEFORE = {")", "]", ",", ".", "(", ";"}
_NO_SPACE_AFTER = {"(", "[", "@", "."}


def parse(tokens, path="<string>"):
    """Parse a token sequence (as produced by ``tokenize``) into a Program."""
    return _Parser(tokens, path).program()


def _join_lexemes(tokens):
    out = []
    prev = None
    for tok in tokens:
        if prev is not None and tok.lexeme not in _NO_SPACE_BEFORE \
                and prev.lexeme not in _NO_SPACE_AFTER:
            out.append(" ")
        out.append(tok.lexeme)
        prev = tok
    return "".join(out)


class _Parser:
    def __init__(self, tokens, path):
        self.path = path
        self.all_tokens = list(tokens)
        self.tokens = [t for t in self.all_tokens if t.kind != "comment"]
        self.pos = 0

    # -- token helpers --------------------------------------------------------

    def peek(self, offset=0):
        i = self.pos + offset
        return self.tokens[i] if i < len(self.tokens) else None

    def at(self, lexeme, kind=None, offset=0):
        tok = self.peek(offset)
        if tok is None or tok.lexeme != lexeme:
            return False
        return kind is None or tok.kind == kind

    def at_keyword(self, *words):
        tok = self.peek()
        return tok is not None and tok.kind == "keyword" and tok.lexeme in words

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, expected, tok=None):
        tok = tok if tok is not None else self.peek()
        if tok is None:
            last = self.all_tokens[-1] if self.all_tokens else None
            line = last.line if last else 1
            col = (last.column + len(last.lexeme)) if last else 1
            return ParseError(f"expected {expected}, found end of input", line, col, self.path)
        found = "newline" if tok.kind == "newline" else repr(tok.lexeme)
        return ParseError(f"expected {expected}, found {found}", tok.line, tok.column, self.path)

    def expect(self, lexeme, kind=None):
        if not self.at(lexeme, kind):
            raise self.error(repr(lexeme))
        return self.advance()

    def expect_ident(self):
        tok = self.peek()
        if tok is None or tok.kind != "identifier":
            raise self.error("identifier")
        return self.advance()

    def is_separator(self, tok):
        return tok is not None and (tok.kind == "newline" or tok.lexeme in (";", ","))

    def skip_separators(self):
        while self.is_separator(self.peek()):
            self.pos += 1

    def skip_newlines(self):
        while self.peek() is not None and self.peek().kind == "newline":
            self.pos += 1

    # -- program ----------------------------------------------------------------

    def program(self):
        self.skip_separators()
        last_line = max((t.line for t in self.all_tokens), default=1)
        if self.at_keyword("function"):
            functions = []
            while self.peek() is not None:
                functions.append(self.function())
                self.skip_separators()
            self._fix_spans(functions)
            names = set()
            for fn in functions:
                if fn.name in names:
                    raise ParseError(f"function '{fn.name}' defined twice",
                                     fn.line_span[0], 1, self.path)
                names.add(fn.name)
            return n.Program("function-file", functions, [], self.path, last_line)
        body = self.block(())
        if self.peek() is not None:
            raise self.error("statement")
        return n.Program("script", [], body, self.path, last_line)

    def function(self):
        head = self.expect("function", "keyword")
        outputs = []
        if self.at("[", "punctuation"):
            self.advance()
            while not self.at("]", "punctuation"):
                outputs.append(self.expect_ident().lexeme)
                if self.at(",", "punctuation"):
                    self.advance()
            self.advance()
            self.expect("=", "operator")
        elif self.peek(1) is not None and self.peek(1).lexeme == "=" \
                and self.peek(1).kind == "operator":
            outputs.append(self.expect_ident().lexeme)
            self.advance()
        name = self.expect_ident().lexeme
        params = []
        if self.at("(", "punctuation"):
            self.advance()
            while not self.at(")", "punctuation"):
                params.append(self.expect_ident().lexeme)
                if self.at(",", "punctuation"):
                    self.advance()
                elif not self.at(")", "punctuation"):
                    raise self.error("',' or ')'")
            self.advance()
        body = self.block(("end", "function"))
        last = None
        if self.at_keyword("end"):
            last = self.advance().line
        elif not (self.peek() is None or self.at_keyword("function")):
            raise self.error("'function' or end of input")
        fn = n.FunctionDef(name, params, outputs, body, (head.line, last or head.line))
        fn._closed = last is not None
        return fn

    def _fix_spans(self, functions):
        # An unterminated function extends to the last token (comments
        # included) before the next function header.
        headers = [fn.line_span[0] for fn in functions]
        for i, fn in enumerate(functions):
            if fn._closed:
                continue
            limit = headers[i + 1] if i + 1 < len(headers) else None
            last = fn.line_span[0]
            for tok in self.all_tokens:
                if tok.kind == "newline" or tok.line < fn.line_span[0]:
                    continue
                if limit is not None and tok.line >= limit:
                    break
                last = max(last, tok.line)
            fn.line_span = (fn.line_span[0], last)

    # -- statements -------------------------------------------------------------

    def block(self, terminators):
        body = []
        while True:
            self.skip_separators()
            tok = self.peek()
            if tok is None:
                return body
            if tok.kind == "keyword" and tok.lexeme in terminators:
                return body
            if tok.kind == "keyword" and tok.lexeme in _BLOCK_END:
                raise self.error("statement", tok)
            body.append(self.statement())
            nxt = self.peek()
            if nxt is not None and not self.is_separator(nxt):
                raise self.error("';', ',' or newline")

    def statement(self):
        tok = self.peek()
        line, col = tok.line, tok.column
        if tok.kind == "keyword":
            word = tok.lexeme
            if word == "for":
                return self.for_stmt()
            if word == "while":
                self.advance()
                cond = self.expr()
                body = self.block(("end",))
                self.expect("end", "keyword")
                return n.While(line, col, cond, body)
            if word == "if":
                return self.if_stmt()
            if word == "try":
                return self.try_stmt()
            if word == "return":
                self.advance()
                return n.Return(line, col)
            raise self.error("statement")
        if tok.kind == "identifier":
            if self.at("=", "operator", 1):
                self.advance()
                self.advance()
                return n.Assign(line, col, tok.lexeme, None, self.expr())
            if self.at("(", "punctuation", 1):
                close = self._matching(self.pos + 1, "(", ")")
                if close is not None and self._is_assign_op(close + 1):
                    self.advance()
                    self.advance()
                    args = self.arguments(")")
                    self.expect("=", "operator")
                    return n.Assign(line, col, tok.lexeme, args, self.expr())
        if tok.lexeme == "[" and tok.kind == "punctuation":
            close = self._matching(self.pos, "[", "]")
            if close is not None and self._is_assign_op(close + 1):
                self.advance()
                targets = []
                while not self.at("]", "punctuation"):
                    targets.append(self.expect_ident().lexeme)
                    if self.at(",", "punctuation"):
                        self.advance()
                    elif not self.at("]", "punctuation"):
                        raise self.error("',' or ']'")
                self.advance()
                self.expect("=", "operator")
                return n.MultiAssign(line, col, targets, self.expr())
        return n.ExprStmt(line, col, self.expr())

    def _is_assign_op(self, i):
        tok = self.tokens[i] if i < len(self.tokens) else None
        return tok is not None and tok.kind == "operator" and tok.lexeme == "="

    def _matching(self, i, open_, close):
        depth = 0
        while i < len(self.tokens):
            tok = self.tokens[i]
            if tok.kind == "newline":
                return None
            if tok.kind == "punctuation":
                if tok.lexeme == open_:
                    depth += 1
                elif tok.lexeme == close:
                    depth -= 1
                    if depth == 0:
                        return i
            i += 1
        return None

    def for_stmt(self):
        head = self.advance()
        var = self.expect_ident().lexeme
        self.expect("=", "operator")
        iterable = self.expr()
        body = self.block(("end",))
        self.expect("end", "keyword")
        return n.For(head.line, head.column, var, iterable, body)

    def if_stmt(self):
        head = self.advance()
        branches = [(self.expr(), self.block(("elseif", "else", "end")))]
        else_body = None
        while True:
            if self.at_keyword("elseif"):
                self.advance()
                branches.append((self.expr(), self.block(("elseif", "else", "end"))))
            elif self.at_keyword("else"):
                self.advance()
                else_body = self.block(("end",))
            else:
                break
        self.expect("end", "keyword")
        return n.If(head.line, head.column, branches, else_body)

    def try_stmt(self):
        head = self.advance()
        body = self.block(("catch", "end"))
        catch_var = None
        catch_body = []
        if self.at_keyword("catch"):
            catch_tok = self.advance()
            nxt = self.peek()
            if nxt is not None and nxt.kind == "identifier" and nxt.line == catch_tok.line:
                after = self.peek(1)
                if after is None or self.is_separator(after):
                    catch_var = self.advance().lexeme
            catch_body = self.block(("end",))
        self.expect("end", "keyword")
        return n.Try(head.line, head.column, body, catch_var, catch_body)

    # -- expressions ------------------------------------------------------------

    def expr(self):
        return self.or_expr()

    def _binary_level(self, ops, operand):
        left = operand()
        while True:
            tok = self.peek()
            if tok is None or tok.kind != "operator" or tok.lexeme not in ops:
                return left
            self.advance()
            left = n.Binary(tok.line, tok.column, tok.lexeme, left, operand())

    def or_expr(self):
        return self._binary_level(("||",), self.and_expr)

    def and_expr(self):
        return self._binary_level(("&&",), self.comparison)

    def comparison(self):
        return self._binary_level(_COMPARISONS, self.range_expr)

    def range_expr(self):
        start = self.additive()
        if not self.at(":", "operator"):
            return start
        self.advance()
        second = self.additive()
        if self.at(":", "operator"):
            self.advance()
            third = self.additive()
            return n.Range(start.line, start.column, start, second, third)
        return n.Range(start.line, start.column, start, None, second)

    def additive(self):
        return self._binary_level(("+", "-"), self.multiplicative)

    def multiplicative(self):
        return self._binary_level(("*", "/"), self.unary)

    def unary(self):
        tok = self.peek()
        if tok is not None and tok.kind == "operator" and tok.lexeme in ("-", "+", "~"):
            self.advance()
            return n.Unary(tok.line, tok.column, tok.lexeme, self.unary())
        return self.power()

    def power(self):
        base = self.postfix()
        while self.at("^", "operator"):
            tok = self.advance()
            nxt = self.peek()
            if nxt is not None and nxt.kind == "operator" and nxt.lexeme in ("-", "+", "~"):
                self.advance()
                exponent = n.Unary(nxt.line, nxt.column, nxt.lexeme, self.postfix())
            else:
                exponent = self.postfix()
            base = n.Binary(tok.line, tok.column, "^", base, exponent)
        return base

    def postfix(self):
        node = self.primary()
        while True:
            if self.at("(", "punctuation"):
                tok = self.advance()
                node = n.Apply(tok.line, tok.column, node, self.arguments(")"))
            elif self.at(".", "operator"):
                tok = self.advance()
                node = n.Field(tok.line, tok.column, node, self.expect_ident().lexeme)
            else:
                return node

    def arguments(self, close):
        args = []
        if self.at(close, "punctuation"):
            self.advance()
            return args
        while True:
            args.append(self.expr())
            if self.at(",", "punctuation"):
                self.advance()
                continue
            self.expect(close, "punctuation")
            return args

    def primary(self):
        tok = self.peek()
        if tok is None:
            raise self.error("expression")
        if tok.kind == "number":
            self.advance()
            return n.Number(tok.line, tok.column, tok.value)
        if tok.kind == "string":
            self.advance()
            return n.String(tok.line, tok.column, tok.value)
        if tok.kind == "identifier":
            self.advance()
            return n.Name(tok.line, tok.column, tok.lexeme)
        if tok.kind == "punctuation" and tok.lexeme == "(":
            self.advance()
            inner = self.expr()
            self.expect(")", "punctuation")
            return inner
        if tok.kind == "punctuation" and tok.lexeme == "[":
            self.advance()
            return n.ArrayLit(tok.line, tok.column, self.arguments("]"))
        if tok.kind == "operator" and tok.lexeme == "@":
            self.advance()
            if self.at("(", "punctuation"):
                self.advance()
                params = []
                while not self.at(")", "punctuation"):
                    params.append(self.expect_ident().lexeme)
                    if self.at(",", "punctuation"):
                        self.advance()
                    elif not self.at(")", "punctuation"):
                        raise self.error("',' or ')'")
                self.advance()
                start = self.pos
                body = self.expr()
                text = "@(" + ",".join(params) + ") " + _join_lexemes(self.tokens[start:self.pos])
                return n.Lambda(tok.line, tok.column, params, body, text)
            return n.HandleRef(tok.line, tok.column, self.expect_ident().lexeme)
        raise self.error("expression")
