"""
OpenQASM 2.0 subset reader/writer.

Supported: the ``OPENQASM 2.0;`` header, ``include "qelib1.inc";`` (accepted
and ignored), ``qreg``/``creg`` declarations, the gates in GateKind,
``measure a -> b;``, ``barrier`` and the break-barrier directive, a line
containing exactly ``// cirquo:breakbarrier``.

Angles may be numeric literals, ``pi`` and arithmetic on them
(``+ - * /``, ``^`` with integer exponents, parentheses).
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .ir import Circuit, CircuitError, GateKind, GateOp, SourceSpan

BREAKBARRIER_DIRECTIVE = "// cirquo:breakbarrier"
HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";'


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int, token: str | None = None):
        self.message = message
        self.line = line
        self.column = column
        self.token = token
        super().__init__(f"line {line}, column {column}: {message}")


@dataclass(frozen=True)
class _Tok:
    kind: str  # NUM, ID, STR, SYM, ARROW, DIRECTIVE, EOF
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(r"""
    (?P<comment>//[^\n]*)
  | (?P<ws>[ \t\r\f\v]+)
  | (?P<nl>\n)
  | (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][-+]?\d+)?)
  | (?P<id>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<str>"[^"\n]*")
  | (?P<arrow>->)
  | (?P<sym>[\[\](){},;+\-*/^])
""", re.VERBOSE)


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col, text[pos])
        kind = m.lastgroup
        value = m.group()
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "comment":
            whole_line = text[line_start:m.start()].strip() == ""
            if whole_line and value.rstrip() == BREAKBARRIER_DIRECTIVE:
                toks.append(_Tok("DIRECTIVE", value.rstrip(), line, col))
        elif kind != "ws":
            toks.append(_Tok(kind.upper(), value, line, col))
        pos = m.end()
    toks.append(_Tok("EOF", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str, origin: str):
        self.toks = _tokenize(text)
        self.i = 0
        self.origin = origin
        self.qregs: dict[str, int] = {}
        self.cregs: dict[str, int] = {}
        # (kind, qubit refs as (reg, idx), angles, clbit refs, span)
        self.pending: list[tuple] = []

    # -- token helpers -----------------------------------------------------

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, message: str, tok: _Tok | None = None):
        tok = tok or self.tok
        raise ParseError(message, tok.line, tok.col, tok.text or None)

    def advance(self) -> _Tok:
        tok = self.tok
        self.i += 1
        return tok

    def expect(self, kind: str, text: str | None = None) -> _Tok:
        tok = self.tok
        if tok.kind != kind or (text is not None and tok.text != text):
            want = repr(text) if text is not None else kind.lower()
            got = repr(tok.text) if tok.text else "end of input"
            self.error(f"expected {want}, found {got}")
        return self.advance()

    def accept(self, kind: str, text: str | None = None) -> _Tok | None:
        if self.tok.kind == kind and (text is None or self.tok.text == text):
            return self.advance()
        return None

    # -- grammar -----------------------------------------------------------

    def parse(self) -> Circuit:
        self.header()
        while self.tok.kind != "EOF":
            self.statement()
        if not self.qregs:
            self.error("program declares no qreg")
        circuit = Circuit(qregs=list(self.qregs.items()), cregs=list(self.cregs.items()),
                          name=Path(self.origin).stem or "circuit")
        offsets = _offsets(self.qregs)
        coffsets = _offsets(self.cregs)
        for kind, qrefs, angles, crefs, span in self.pending:
            if kind is GateKind.BreakBarrier:
                qs = list(range(circuit.num_qubits))
            else:
                qs = [offsets[r] + i for r, i in qrefs]
            cs = [coffsets[r] + i for r, i in crefs]
            circuit.apply(kind, qs, angles, cs, span=span)
        return circuit

    def header(self):
        tok = self.tok
        if tok.kind != "ID" or tok.text != "OPENQASM":
            self.error("malformed header: program must start with 'OPENQASM 2.0;'")
        self.advance()
        ver = self.tok
        if ver.kind != "NUM" or ver.text not in ("2.0", "2"):
            self.error("malformed header: only OPENQASM 2.0 is supported")
        self.advance()
        self.expect("SYM", ";")

    def statement(self):
        tok = self.tok
        span = SourceSpan(self.origin, tok.line, tok.col)
        if tok.kind == "DIRECTIVE":
            self.advance()
            self.pending.append((GateKind.BreakBarrier, [], (), [], span))
            return
        if tok.kind != "ID":
            self.error(f"unexpected {tok.text!r}")
        word = tok.text
        if word == "include":
            self.advance()
            name = self.expect("STR")
            if name.text != '"qelib1.inc"':
                self.error(f"unsupported include {name.text}", name)
            self.expect("SYM", ";")
        elif word in ("qreg", "creg"):
            self.declaration(word)
        elif word == "measure":
            self.advance()
            q = self.argument(self.qregs, "qreg")
            self.expect("ARROW")
            c = self.argument(self.cregs, "creg")
            self.expect("SYM", ";")
            if len(q) != len(c):
                self.error("measure operands have different sizes", tok)
            for qi, ci in zip(q, c):
                self.pending.append((GateKind.Measure, [qi], (), [ci], span))
        elif word == "barrier":
            self.advance()
            qs = [ref for arg in self.arglist() for ref in arg]
            self.expect("SYM", ";")
            if len(set(qs)) != len(qs):
                self.error("duplicate qubit in barrier", tok)
            self.pending.append((GateKind.Barrier, qs, (), [], span))
        elif word in ("gate", "opaque", "if", "reset", "U", "CX"):
            self.error(f"unsupported statement {word!r}")
        else:
            self.gate(tok, span)

    def declaration(self, word: str):
        self.advance()
        name = self.expect("ID")
        self.expect("SYM", "[")
        size_tok = self.expect("NUM")
        if not size_tok.text.isdigit() or int(size_tok.text) < 1:
            self.error("register size must be a positive integer", size_tok)
        self.expect("SYM", "]")
        self.expect("SYM", ";")
        if name.text in self.qregs or name.text in self.cregs:
            self.error(f"register {name.text!r} declared twice", name)
        (self.qregs if word == "qreg" else self.cregs)[name.text] = int(size_tok.text)

    def gate(self, tok: _Tok, span: SourceSpan):
        try:
            kind = GateKind.parse(tok.text)
        except CircuitError:
            kind = None
        if kind is None or kind.is_directive or kind is GateKind.Measure or tok.text != kind.value:
            self.error(f"unknown gate {tok.text!r}")
        self.advance()
        angles: list[float] = []
        if self.accept("SYM", "("):
            if not self.accept("SYM", ")"):
                angles.append(self.expr())
                while self.accept("SYM", ","):
                    angles.append(self.expr())
                self.expect("SYM", ")")
        if len(angles) != kind.num_angles:
            self.error(f"{kind.value} takes {kind.num_angles} parameter(s), got {len(angles)}", tok)
        args = self.arglist()
        self.expect("SYM", ";")
        if len(args) != kind.num_qubits:
            self.error(f"{kind.value} takes {kind.num_qubits} qubit argument(s), got {len(args)}", tok)
        sizes = {len(a) for a in args if len(a) > 1}
        if len(sizes) > 1:
            self.error("register arguments have different sizes", tok)
        width = sizes.pop() if sizes else 1
        for k in range(width):
            qs = [a[k] if len(a) > 1 else a[0] for a in args]
            if len(set(qs)) != len(qs):
                self.error(f"duplicate qubit in {kind.value}", tok)
            self.pending.append((kind, qs, tuple(angles), [], span))

    def arglist(self) -> list[list[tuple[str, int]]]:
        args = [self.argument(self.qregs, "qreg")]
        while self.accept("SYM", ","):
            args.append(self.argument(self.qregs, "qreg"))
        return args

    def argument(self, regs: dict[str, int], what: str) -> list[tuple[str, int]]:
        name = self.expect("ID")
        if name.text not in regs:
            self.error(f"undeclared {what} {name.text!r}", name)
        if self.accept("SYM", "["):
            idx = self.expect("NUM")
            if not idx.text.isdigit():
                self.error("index must be a non-negative integer", idx)
            self.expect("SYM", "]")
            if int(idx.text) >= regs[name.text]:
                self.error(f"index {idx.text} out of range for {name.text}[{regs[name.text]}]", idx)
            return [(name.text, int(idx.text))]
        return [(name.text, i) for i in range(regs[name.text])]

    # -- angle expressions -------------------------------------------------

    def expr(self) -> float:
        value = self.term()
        while self.tok.kind == "SYM" and self.tok.text in "+-":
            op = self.advance().text
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> float:
        value = self.factor()
        while self.tok.kind == "SYM" and self.tok.text in "*/":
            op = self.advance()
            rhs = self.factor()
            if op.text == "/":
                if rhs == 0:
                    self.error("division by zero", op)
                value /= rhs
            else:
                value *= rhs
        return value

    def factor(self) -> float:
        if self.tok.kind == "SYM" and self.tok.text in "+-":
            sign = -1.0 if self.advance().text == "-" else 1.0
            return sign * self.factor()
        base = self.atom()
        if self.accept("SYM", "^"):
            exp_tok = self.tok
            exp = self.factor()
            if exp != int(exp):
                self.error("only integer exponents are supported", exp_tok)
            return base ** int(exp)
        return base

    def atom(self) -> float:
        tok = self.tok
        if tok.kind == "NUM":
            self.advance()
            return float(tok.text)
        if tok.kind == "ID" and tok.text == "pi":
            self.advance()
            return math.pi
        if self.accept("SYM", "("):
            value = self.expr()
            self.expect("SYM", ")")
            return value
        self.error(f"expected an angle expression, found {tok.text or 'end of input'!r}")


def _offsets(regs: dict[str, int]) -> dict[str, int]:
    out, acc = {}, 0
    for name, size in regs.items():
        out[name] = acc
        acc += size
    return out


def parse(text: str, origin: str = "<string>") -> Circuit:
    """Parse program text into a Circuit whose ops carry origin/line/column spans."""
    return _Parser(text, origin).parse()


def parse_file(path: str | Path) -> Circuit:
    path = Path(path)
    return parse(path.read_text(encoding="utf-8"), origin=path.name)


def format_angle(theta: float) -> str:
    """Render an angle, as a multiple of pi when it is one to double precision."""
    if theta == 0:
        return "0"
    ratio = Fraction(theta / math.pi).limit_denominator(1 << 20)
    if ratio.numerator and math.isclose(float(ratio) * math.pi, theta, rel_tol=4e-16, abs_tol=0.0):
        num, den = ratio.numerator, ratio.denominator
        sign = "-" if num < 0 else ""
        num = abs(num)
        text = "pi" if num == 1 else f"{num}*pi"
        if den != 1:
            text += f"/{den}"
        return sign + text
    return repr(float(theta))


def serialize(circuit: Circuit) -> str:
    lines = [HEADER]
    lines += [f"qreg {name}[{size}];" for name, size in circuit.qregs]
    lines += [f"creg {name}[{size}];" for name, size in circuit.cregs]
    for op in circuit:
        if op.kind is GateKind.BreakBarrier:
            lines.append(BREAKBARRIER_DIRECTIVE)
            continue
        args = ",".join(str(q) for q in op.qubits)
        if op.kind is GateKind.Measure:
            lines.append(f"measure {args} -> {op.clbits[0]};")
            continue
        params = f"({','.join(format_angle(a) for a in op.angles)})" if op.angles else ""
        lines.append(f"{op.kind.value}{params} {args};")
    return "\n".join(lines) + "\n"


def write_file(circuit: Circuit, path: str | Path) -> None:
    Path(path).write_text(serialize(circuit), encoding="utf-8")
