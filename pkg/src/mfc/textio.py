"""Workspace file format, expression parser and canonical serializer.

Grammar (line oriented, ``#`` comments):

    set <key> = <value>
    chart <name> { <id> : even|odd, ... }
    morphism <name> : <chart> -> <chart> kind=even|odd order=<N> { S = <expr> }
    function <name> on <chart> { <expr> }

Expressions use rational literals ``p/q``, identifiers, ``+ - * ^`` and
parentheses.  Multiplication is order-significant at the source level;
canonicalization (with Koszul signs) happens in the algebra kernel.
Momentum variables are auto-declared as ``q_<coord>`` (even kind) and
``ys_<coord>`` (odd kind); derived variables as ``dot_<v>`` / ``par_<v>``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .superalg import Chart, ODD, SuperSeries, mul


class ParseError(ValueError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {msg}" if line else msg)
        self.msg = msg
        self.line = line
        self.col = col


# -- serializer ----------------------------------------------------------


def _mono_key(chart, mono):
    return (sum(mono), tuple(-e for e in mono))


def serialize(s: SuperSeries) -> str:
    """Canonical text form: deterministic, equal series give equal bytes."""
    if s.is_zero():
        return "0"
    items = sorted(s.terms.items(), key=lambda kv: _mono_key(s.chart, kv[0]))
    pieces = []
    for mono, coeff in items:
        factors = []
        for v, e in zip(s.chart.variables, mono):
            if e == 1:
                factors.append(v.name)
            elif e > 1:
                factors.append(f"{v.name}^{e}")
        mag = abs(coeff)
        if not factors:
            body = str(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = "*".join([str(mag)] + factors)
        pieces.append(("-" if coeff < 0 else "+", body))
    sign, body = pieces[0]
    out = ("-" if sign == "-" else "") + body
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


# -- lexer ----------------------------------------------------------------

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<comment>\#[^\n]*)
  | (?P<number>\d+(?:/\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<arrow>->)
  | (?P<op>[-+*^(){}:,=])
""", re.VERBOSE)


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> List[Token]:
    tokens = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        lexeme = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, lexeme, line, col))
        nl = lexeme.count("\n")
        if nl:
            line += nl
            col = len(lexeme) - lexeme.rfind("\n")
        else:
            col += len(lexeme)
        pos = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: List[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def fail(self, msg: str):
        t = self.peek()
        raise ParseError(msg, t.line, t.col)

    def expect(self, kind: str, text: Optional[str] = None) -> Token:
        t = self.peek()
        if t.kind != kind or (text is not None and t.text != text):
            want = text or kind
            self.fail(f"expected {want!r}, found {t.text or t.kind!r}")
        return self.next()

    # expression grammar over a fixed chart -----------------------------

    def expr(self, chart: Chart, order: int) -> SuperSeries:
        out = self.term(chart, order)
        while self.peek().text in ("+", "-"):
            op = self.next().text
            rhs = self.term(chart, order)
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self, chart: Chart, order: int) -> SuperSeries:
        out = self.factor(chart, order)
        while self.peek().text == "*":
            self.next()
            out = mul(out, self.factor(chart, order))
        return out

    def factor(self, chart: Chart, order: int) -> SuperSeries:
        t = self.peek()
        if t.text == "-":
            self.next()
            return -self.factor(chart, order)
        base = self.atom(chart, order)
        if self.peek().text == "^":
            self.next()
            e = self.expect("number")
            if "/" in e.text:
                raise ParseError("exponent must be an integer", e.line, e.col)
            n = int(e.text)
            if base.chart is chart and len(base.terms) == 1:
                (mono, coeff), = base.terms.items()
                for i, ee in enumerate(mono):
                    if ee and chart.parities[i] == ODD and n > 1:
                        raise ParseError(
                            f"odd variable {chart.variables[i].name!r} squared",
                            e.line, e.col)
            return base ** n
        return base

    def atom(self, chart: Chart, order: int) -> SuperSeries:
        t = self.next()
        if t.kind == "number":
            return SuperSeries.const(chart, Fraction(t.text), order)
        if t.kind == "ident":
            if t.text not in chart:
                raise ParseError(f"undeclared identifier {t.text!r}", t.line, t.col)
            return SuperSeries.of_var(chart, t.text, order)
        if t.text == "(":
            inner = self.expr(chart, order)
            self.expect("op", ")")
            return inner
        raise ParseError(f"unexpected token {t.text or t.kind!r}", t.line, t.col)


def parse_series(text: str, chart: Chart, order: int) -> SuperSeries:
    """Parse a standalone expression on a known chart."""
    p = _Parser(tokenize(text))
    out = p.expr(chart, order)
    if p.peek().kind != "eof":
        p.fail("trailing input")
    return out


# -- workspace -------------------------------------------------------------


@dataclass
class Workspace:
    charts: Dict[str, Chart] = field(default_factory=dict)
    morphisms: Dict[str, "object"] = field(default_factory=dict)
    functions: Dict[str, SuperSeries] = field(default_factory=dict)
    settings: Dict[str, str] = field(default_factory=dict)

    @property
    def default_order(self) -> int:
        return int(self.settings.get("order", "3"))

    @property
    def strict(self) -> bool:
        return self.settings.get("strict", "1") != "0"


def parse_workspace(text: str, strict: Optional[bool] = None) -> Workspace:
    from .morphisms import mk_thick
    from .superalg import Variable, EVEN, ODD
    from .superforms import extend_chart, PIT, T

    ws = Workspace()
    if strict is not None:
        ws.settings["strict"] = "1" if strict else "0"
    p = _Parser(tokenize(text))
    while p.peek().kind != "eof":
        head = p.expect("ident")
        if head.text == "set":
            key = p.expect("ident").text
            p.expect("op", "=")
            val = p.next()
            if val.kind not in ("number", "ident"):
                p.fail("expected a setting value")
            ws.settings[key] = val.text
        elif head.text == "chart":
            name = p.expect("ident").text
            if name in ws.charts:
                raise ParseError(f"duplicate chart {name!r}", head.line, head.col)
            p.expect("op", "{")
            variables = []
            while p.peek().text != "}":
                vname = p.expect("ident").text
                p.expect("op", ":")
                par = p.expect("ident").text
                if par not in ("even", "odd"):
                    p.fail("parity must be 'even' or 'odd'")
                variables.append(Variable(vname, EVEN if par == "even" else ODD))
                if p.peek().text == ",":
                    p.next()
            p.expect("op", "}")
            ws.charts[name] = Chart(name, variables)
        elif head.text == "morphism":
            name = p.expect("ident").text
            if name in ws.morphisms:
                raise ParseError(f"duplicate morphism {name!r}", head.line, head.col)
            p.expect("op", ":")
            src = p.expect("ident").text
            p.expect("arrow")
            tgt = p.expect("ident").text
            kind = order = None
            while p.peek().text != "{":
                key = p.expect("ident").text
                p.expect("op", "=")
                val = p.next().text
                if key == "kind":
                    kind = val
                elif key == "order":
                    order = int(val)
                else:
                    p.fail(f"unknown morphism attribute {key!r}")
            if kind not in ("even", "odd"):
                p.fail("morphism needs kind=even|odd")
            if order is None:
                order = ws.default_order
            for c in (src, tgt):
                if c not in ws.charts:
                    p.fail(f"undeclared chart {c!r}")
            p.expect("op", "{")
            p.expect("ident", "S")
            p.expect("op", "=")
            from .morphisms import combined_chart
            chart = combined_chart(ws.charts[src], ws.charts[tgt], kind)
            s = p.expr(chart, order)
            p.expect("op", "}")
            ws.morphisms[name] = mk_thick(ws.charts[src], ws.charts[tgt], kind,
                                          s, order, strict=ws.strict)
        elif head.text == "function":
            name = p.expect("ident").text
            if name in ws.functions:
                raise ParseError(f"duplicate function {name!r}", head.line, head.col)
            p.expect("ident", "on")
            cname = p.expect("ident").text
            if cname not in ws.charts:
                p.fail(f"undeclared chart {cname!r}")
            chart = ws.charts[cname]
            p.expect("op", "{")
            # auto-extend for derived variables mentioned in the body
            save = p.pos
            idents = set()
            depth = 1
            while depth:
                t = p.next()
                if t.kind == "eof":
                    p.fail("unterminated function body")
                if t.text == "{":
                    depth += 1
                elif t.text == "}":
                    depth -= 1
                elif t.kind == "ident":
                    idents.add(t.text)
            p.pos = save
            if any(i.startswith("par_") and i not in chart for i in idents):
                chart = extend_chart(chart, PIT)
            if any(i.startswith("dot_") and i not in chart for i in idents):
                chart = extend_chart(chart, T)
            body = p.expr(chart, ws.default_order)
            p.expect("op", "}")
            ws.functions[name] = body
        else:
            p.fail(f"unknown declaration {head.text!r}")
    return ws
