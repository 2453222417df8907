"""OpenQASM 2.0 front end: lexer, recursive-descent parser, lowering, emitter.

The parser accepts the OpenQASM 2.0 core used by published circuit files:
version header, ``include "qelib1.inc"`` (resolved against a bundled copy),
qreg/creg, user ``gate`` definitions with parameters, the U/CX primitives,
parameter arithmetic (+ - * / ^, pi, unary minus, parentheses, the standard
math functions), measure, and barrier.  It never raises on malformed input;
every problem becomes a positioned diagnostic.

Lowering inlines all gate definitions down to U (a generic 1q matrix) and
CX (a generic 2q matrix) and packs the resulting gates greedily into cycles.
Global phase is out of semantic scope everywhere: equivalence of parsed,
lowered and emitted circuits is phase-aligned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .circuit import Circuit, Cycle, Gate, gate_matrix, generic_1q, generic_2q
from . import synth

MAX_DIAGNOSTICS = 100
MAX_EXPR_DEPTH = 64
MAX_INLINE_DEPTH = 128


class QasmError(Exception):
    """Lowering was attempted on an invalid program."""

    def __init__(self, message, diagnostics=(), source_name="<input>"):
        super().__init__(message)
        self.diagnostics = list(diagnostics)
        self.source_name = source_name

    def render_diagnostics(self) -> str:
        return "\n".join(d.render(self.source_name) for d in self.diagnostics)


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    line: int
    col: int
    message: str

    def render(self, name: str = "<input>") -> str:
        return f"{name}:{self.line}:{self.col}: {self.severity}: {self.message}"


# ---------------------------------------------------------------------------
# Expressions


@dataclass(frozen=True)
class Expr:
    op: str  # "num" | "pi" | "name" | "neg" | "call" | one of + - * / ^
    args: tuple = ()
    value: float = 0.0
    name: str = ""


_FUNCS = {
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
    "exp": math.exp,
    "ln": math.log,
    "sqrt": math.sqrt,
}


def eval_expr(expr: Expr, env: dict[str, float]) -> float:
    if expr.op == "num":
        return expr.value
    if expr.op == "pi":
        return math.pi
    if expr.op == "name":
        return env[expr.name]
    if expr.op == "neg":
        return -eval_expr(expr.args[0], env)
    if expr.op == "call":
        return _FUNCS[expr.name](eval_expr(expr.args[0], env))
    a = eval_expr(expr.args[0], env)
    b = eval_expr(expr.args[1], env)
    if expr.op == "+":
        return a + b
    if expr.op == "-":
        return a - b
    if expr.op == "*":
        return a * b
    if expr.op == "/":
        return a / b
    if expr.op == "^":
        return a**b
    raise ValueError(f"bad expression op {expr.op!r}")


def _expr_names(expr: Expr, out: set[str]) -> None:
    if expr.op == "name":
        out.add(expr.name)
    for a in expr.args:
        _expr_names(a, out)


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Argument:
    """A register reference, optionally indexed."""

    reg: str
    index: int | None
    line: int
    col: int


@dataclass(frozen=True)
class GateCall:
    name: str
    params: tuple[Expr, ...]
    qargs: tuple[Argument, ...]
    line: int
    col: int


@dataclass(frozen=True)
class MeasureStmt:
    qubit: Argument
    clbit: Argument
    line: int


@dataclass(frozen=True)
class BarrierStmt:
    qargs: tuple[Argument, ...]
    line: int


@dataclass(frozen=True)
class GateDef:
    name: str
    params: tuple[str, ...]
    qargs: tuple[str, ...]
    body: tuple[GateCall, ...]
    line: int


@dataclass
class Program:
    """Parsed OpenQASM 2.0 program."""

    version: str = ""
    includes: list[str] = field(default_factory=list)
    qregs: dict[str, int] = field(default_factory=dict)
    cregs: dict[str, int] = field(default_factory=dict)
    gates: dict[str, GateDef] = field(default_factory=dict)
    statements: list = field(default_factory=list)

    @property
    def num_qubits(self) -> int:
        return sum(self.qregs.values())

    def qubit_offset(self, reg: str) -> int:
        off = 0
        for name, size in self.qregs.items():
            if name == reg:
                return off
            off += size
        raise KeyError(reg)


@dataclass
class ParseResult:
    program: Program
    diagnostics: list[Diagnostic]
    name: str = "<input>"

    @property
    def ok(self) -> bool:
        return not any(d.severity == "error" for d in self.diagnostics)

    def render_diagnostics(self) -> str:
        return "\n".join(d.render(self.name) for d in self.diagnostics)


# ---------------------------------------------------------------------------
# Lexer

_SYMBOLS = (";", ",", "(", ")", "{", "}", "[", "]", "+", "-", "*", "/", "^", "==")


@dataclass(frozen=True)
class Token:
    kind: str  # "id" | "int" | "real" | "string" | "arrow" | symbol text | "eof"
    text: str
    line: int
    col: int


def _lex(source: str, diags: list[Diagnostic]) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i, size = 0, len(source)
    while i < size:
        ch = source[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if source.startswith("//", i):
            while i < size and source[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if ch.isalpha() or ch == "_":
            j = i
            while j < size and (source[j].isalnum() or source[j] == "_"):
                j += 1
            tokens.append(Token("id", source[i:j], start_line, start_col))
            col += j - i
            i = j
            continue
        if ch.isdigit() or (ch == "." and i + 1 < size and source[i + 1].isdigit()):
            j = i
            seen_dot = seen_exp = False
            while j < size:
                c = source[j]
                if c.isdigit():
                    j += 1
                elif c == "." and not seen_dot and not seen_exp:
                    seen_dot = True
                    j += 1
                elif c in "eE" and not seen_exp and j > i:
                    if j + 1 < size and (source[j + 1].isdigit() or source[j + 1] in "+-"):
                        seen_exp = True
                        j += 2 if source[j + 1] in "+-" else 1
                    else:
                        break
                else:
                    break
            text = source[i:j]
            kind = "real" if (seen_dot or seen_exp) else "int"
            tokens.append(Token(kind, text, start_line, start_col))
            col += j - i
            i = j
            continue
        if ch == '"':
            j = i + 1
            while j < size and source[j] not in '"\n':
                j += 1
            if j >= size or source[j] != '"':
                _diag(diags, "error", start_line, start_col, "unterminated string")
                tokens.append(Token("string", source[i + 1 : j], start_line, start_col))
                col += j - i
                i = j
                continue
            tokens.append(Token("string", source[i + 1 : j], start_line, start_col))
            col += j - i + 1
            i = j + 1
            continue
        if source.startswith("->", i):
            tokens.append(Token("arrow", "->", start_line, start_col))
            i += 2
            col += 2
            continue
        if source.startswith("==", i):
            tokens.append(Token("==", "==", start_line, start_col))
            i += 2
            col += 2
            continue
        if ch in ";,(){}[]+-*/^":
            tokens.append(Token(ch, ch, start_line, start_col))
            i += 1
            col += 1
            continue
        _diag(diags, "error", start_line, start_col, f"unexpected character {ch!r}")
        i += 1
        col += 1
    tokens.append(Token("eof", "", line, col))
    return tokens


def _diag(diags: list[Diagnostic], severity: str, line: int, col: int, msg: str) -> None:
    if len(diags) < MAX_DIAGNOSTICS:
        diags.append(Diagnostic(severity, line, col, msg))


# ---------------------------------------------------------------------------
# Parser


class _Parser:
    def __init__(self, tokens: list[Token], diags: list[Diagnostic], program: Program):
        self.toks = tokens
        self.pos = 0
        self.diags = diags
        self.prog = program

    # -- token helpers

    def peek(self) -> Token:
        return self.toks[self.pos]

    def next(self) -> Token:
        t = self.toks[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def at(self, kind: str, text: str | None = None) -> bool:
        t = self.peek()
        return t.kind == kind and (text is None or t.text == text)

    def expect(self, kind: str, what: str) -> Token | None:
        t = self.peek()
        if t.kind == kind:
            return self.next()
        self.error(t, f"expected {what}, found {t.text!r}" if t.text else f"expected {what}")
        return None

    def error(self, tok: Token, msg: str) -> None:
        _diag(self.diags, "error", tok.line, tok.col, msg)

    def sync(self) -> None:
        """Skip to just past the next ';' (or past a '}') to recover."""
        depth = 0
        while True:
            t = self.next()
            if t.kind == "eof":
                return
            if t.kind == "{":
                depth += 1
            elif t.kind == "}":
                if depth <= 0:
                    return
                depth -= 1
            elif t.kind == ";" and depth == 0:
                return

    # -- grammar

    def parse_program(self) -> None:
        t = self.peek()
        if t.kind == "id" and t.text == "OPENQASM":
            self.next()
            v = self.expect("real", "version number")
            self.prog.version = v.text if v else ""
            if v and v.text != "2.0":
                self.error(v, f"unsupported OpenQASM version {v.text}")
            self.expect(";", "';'")
        else:
            self.error(t, "missing 'OPENQASM 2.0;' header")
        while not self.at("eof"):
            before = self.pos
            self.parse_statement()
            if self.pos == before:  # defensive: never loop in place
                self.next()

    def parse_statement(self) -> None:
        t = self.peek()
        if t.kind != "id":
            self.error(t, f"expected a statement, found {t.text!r}")
            self.sync()
            return
        kw = t.text
        if kw == "include":
            self.parse_include()
        elif kw in ("qreg", "creg"):
            self.parse_reg(kw)
        elif kw == "gate":
            self.parse_gate_def()
        elif kw == "measure":
            self.parse_measure()
        elif kw == "barrier":
            self.parse_barrier()
        elif kw in ("opaque", "if", "reset"):
            self.error(t, f"'{kw}' statements are not supported")
            self.sync()
        else:
            call = self.parse_gate_call(formal_env=None)
            if call is not None:
                self.prog.statements.append(call)

    def parse_include(self) -> None:
        kw = self.next()
        name = self.expect("string", "include file name")
        self.expect(";", "';'")
        if name is None:
            return
        if name.text != "qelib1.inc":
            self.error(kw, f'unknown include "{name.text}" (only "qelib1.inc" is bundled)')
            return
        if name.text in self.prog.includes:
            return
        self.prog.includes.append(name.text)
        lib_diags: list[Diagnostic] = []
        lib_tokens = _lex(_load_qelib1(), lib_diags)
        lib_parser = _Parser(lib_tokens, lib_diags, self.prog)
        while not lib_parser.at("eof"):
            lib_parser.parse_statement()
        for d in lib_diags:  # should be none; surface as internal errors if not
            _diag(self.diags, d.severity, kw.line, kw.col, f"qelib1.inc: {d.message}")

    def parse_reg(self, kw: str) -> None:
        kw_tok = self.next()
        name = self.expect("id", "register name")
        self.expect("[", "'['")
        size = self.expect("int", "register size")
        self.expect("]", "']'")
        self.expect(";", "';'")
        if name is None or size is None:
            return
        regs = self.prog.qregs if kw == "qreg" else self.prog.cregs
        if name.text in self.prog.qregs or name.text in self.prog.cregs:
            self.error(name, f"register {name.text!r} already defined")
            return
        n = int(size.text)
        if n < 1:
            self.error(size, f"register size must be >= 1, got {n}")
            return
        regs[name.text] = n

    def parse_gate_def(self) -> None:
        self.next()
        name = self.expect("id", "gate name")
        params: list[str] = []
        if self.at("("):
            self.next()
            if not self.at(")"):
                while True:
                    p = self.expect("id", "parameter name")
                    if p is None:
                        self.sync()
                        return
                    params.append(p.text)
                    if self.at(","):
                        self.next()
                        continue
                    break
            self.expect(")", "')'")
        qargs: list[str] = []
        while True:
            q = self.expect("id", "qubit argument name")
            if q is None:
                self.sync()
                return
            qargs.append(q.text)
            if self.at(","):
                self.next()
                continue
            break
        if self.expect("{", "'{'") is None:
            self.sync()
            return
        if name is None:
            self.sync()
            return
        if name.text in self.prog.gates or name.text in ("U", "CX"):
            self.error(name, f"gate {name.text!r} already defined")
        if len(set(params)) != len(params) or len(set(qargs)) != len(qargs):
            self.error(name, f"duplicate formal arguments in gate {name.text!r}")
        env = set(params)
        body: list[GateCall] = []
        while not self.at("}") and not self.at("eof"):
            t = self.peek()
            if t.kind == "id" and t.text == "barrier":
                self.parse_barrier(record=False)
                continue
            call = self.parse_gate_call(formal_env=(set(qargs), env), defining=name.text)
            if call is not None:
                body.append(call)
        self.expect("}", "'}'")
        self.prog.gates[name.text] = GateDef(
            name.text, tuple(params), tuple(qargs), tuple(body), name.line
        )

    def parse_measure(self) -> None:
        self.next()
        q = self.parse_argument(formal=None)
        self.expect("arrow", "'->'")
        c = self.parse_argument(formal=None, classical=True)
        self.expect(";", "';'")
        if q is None or c is None:
            return
        line = q.line
        qreg_size = self.prog.qregs.get(q.reg)
        creg_size = self.prog.cregs.get(c.reg)
        if qreg_size is None or creg_size is None:
            return  # diagnostics already emitted by parse_argument
        if q.index is None and c.index is None and qreg_size != creg_size:
            self.error(
                Token("id", q.reg, q.line, q.col),
                f"measure register sizes differ ({qreg_size} vs {creg_size})",
            )
            return
        self.prog.statements.append(MeasureStmt(q, c, line))

    def parse_barrier(self, record: bool = True) -> None:
        tok = self.next()
        args: list[Argument] = []
        while not self.at(";") and not self.at("eof"):
            a = self.parse_argument(formal=None, allow_missing_reg=not record)
            if a is None:
                self.sync()
                return
            args.append(a)
            if self.at(","):
                self.next()
        self.expect(";", "';'")
        if record:
            self.prog.statements.append(BarrierStmt(tuple(args), tok.line))

    def parse_gate_call(self, formal_env, defining: str | None = None) -> GateCall | None:
        name = self.expect("id", "gate name")
        if name is None:
            self.sync()
            return None
        params: list[Expr] = []
        if self.at("("):
            self.next()
            if not self.at(")"):
                while True:
                    e = self.parse_expr(0)
                    if e is None:
                        self.sync()
                        return None
                    params.append(e)
                    if self.at(","):
                        self.next()
                        continue
                    break
            if self.expect(")", "')'") is None:
                self.sync()
                return None
        qargs: list[Argument] = []
        while True:
            a = self.parse_argument(formal=formal_env[0] if formal_env else None)
            if a is None:
                self.sync()
                return None
            qargs.append(a)
            if self.at(","):
                self.next()
                continue
            break
        if self.expect(";", "';'") is None:
            self.sync()
        call = GateCall(name.text, tuple(params), tuple(qargs), name.line, name.col)
        self.validate_call(call, formal_env, defining)
        return call

    def parse_argument(
        self, formal, classical: bool = False, allow_missing_reg: bool = False
    ) -> Argument | None:
        name = self.expect("id", "register name")
        if name is None:
            return None
        index = None
        if self.at("["):
            self.next()
            idx = self.expect("int", "index")
            if self.expect("]", "']'") is None or idx is None:
                return None
            index = int(idx.text)
        arg = Argument(name.text, index, name.line, name.col)
        if formal is not None:
            if name.text not in formal:
                self.error(name, f"unknown formal qubit argument {name.text!r}")
                return None
            if index is not None:
                self.error(name, "formal gate arguments cannot be indexed")
                return None
            return arg
        regs = self.prog.cregs if classical else self.prog.qregs
        size = regs.get(name.text)
        if size is None:
            if allow_missing_reg:
                return arg
            kind = "classical register" if classical else "quantum register"
            self.error(name, f"unknown {kind} {name.text!r}")
            return None
        if index is not None and not 0 <= index < size:
            self.error(name, f"index {index} out of bounds for {name.text}[{size}]")
            return None
        return arg

    def validate_call(self, call: GateCall, formal_env, defining) -> None:
        tok = Token("id", call.name, call.line, call.col)
        if call.name == "U":
            want_params, want_qargs = 3, 1
        elif call.name == "CX":
            want_params, want_qargs = 0, 2
        else:
            gd = self.prog.gates.get(call.name)
            if gd is None or call.name == defining:
                self.error(tok, f"unknown gate {call.name!r}")
                return
            want_params, want_qargs = len(gd.params), len(gd.qargs)
        if len(call.params) != want_params:
            self.error(
                tok,
                f"gate {call.name!r} takes {want_params} parameter(s), got {len(call.params)}",
            )
            return
        if len(call.qargs) != want_qargs:
            self.error(
                tok,
                f"gate {call.name!r} takes {want_qargs} qubit argument(s), got {len(call.qargs)}",
            )
            return
        if formal_env is not None:
            _, param_names = formal_env
            for e in call.params:
                names: set[str] = set()
                _expr_names(e, names)
                for nm in sorted(names - param_names):
                    self.error(tok, f"unknown parameter {nm!r} in gate body expression")
            # body args are plain formal names; repetition is an error
            seen = set()
            for a in call.qargs:
                if a.reg in seen:
                    self.error(tok, f"qubit argument {a.reg!r} repeated in gate call")
                seen.add(a.reg)
            return
        # top-level call: check broadcast shapes and qubit distinctness
        try:
            expansions = expand_call(call, self.prog.qregs)
        except ValueError as exc:
            self.error(tok, str(exc))
            return
        for combo in expansions:
            if len(set(combo)) != len(combo):
                self.error(tok, "gate call repeats a qubit")
                return
        for e in call.params:
            names: set[str] = set()
            _expr_names(e, names)
            for nm in sorted(names):
                self.error(tok, f"unknown identifier {nm!r} in parameter expression")

    # -- expressions (precedence climbing)

    def parse_expr(self, depth: int) -> Expr | None:
        if depth > MAX_EXPR_DEPTH:
            self.error(self.peek(), "expression too deeply nested")
            return None
        node = self.parse_term(depth)
        if node is None:
            return None
        while self.at("+") or self.at("-"):
            op = self.next().kind
            rhs = self.parse_term(depth)
            if rhs is None:
                return None
            node = Expr(op, (node, rhs))
        return node

    def parse_term(self, depth: int) -> Expr | None:
        node = self.parse_pow(depth)
        if node is None:
            return None
        while self.at("*") or self.at("/"):
            op = self.next().kind
            rhs = self.parse_pow(depth)
            if rhs is None:
                return None
            node = Expr(op, (node, rhs))
        return node

    def parse_pow(self, depth: int) -> Expr | None:
        base = self.parse_atom(depth)
        if base is None:
            return None
        if self.at("^"):
            self.next()
            exp = self.parse_pow(depth + 1)  # right associative
            if exp is None:
                return None
            return Expr("^", (base, exp))
        return base

    def parse_atom(self, depth: int) -> Expr | None:
        t = self.peek()
        if t.kind == "-":
            self.next()
            inner = self.parse_atom(depth + 1)
            return None if inner is None else Expr("neg", (inner,))
        if t.kind in ("int", "real"):
            self.next()
            return Expr("num", value=float(t.text))
        if t.kind == "(":
            self.next()
            inner = self.parse_expr(depth + 1)
            if inner is None:
                return None
            if self.expect(")", "')'") is None:
                return None
            return inner
        if t.kind == "id":
            self.next()
            if t.text == "pi":
                return Expr("pi")
            if t.text in _FUNCS:
                if self.expect("(", "'('") is None:
                    return None
                inner = self.parse_expr(depth + 1)
                if inner is None or self.expect(")", "')'") is None:
                    return None
                return Expr("call", (inner,), name=t.text)
            return Expr("name", name=t.text)
        self.error(t, f"expected an expression, found {t.text!r}")
        return None


def _load_qelib1() -> str:
    return resources.files(__package__).joinpath("qelib1.inc").read_text()


def expand_call(call: GateCall, qregs: dict[str, int]) -> list[tuple[int, ...]]:
    """Resolve a top-level call's register arguments to global qubit tuples.

    Whole-register arguments broadcast elementwise; their sizes must agree
    (size-1 and indexed arguments repeat).
    """
    offsets: dict[str, int] = {}
    off = 0
    for name, size in qregs.items():
        offsets[name] = off
        off += size
    widths = []
    for a in call.qargs:
        if a.reg not in qregs:
            raise ValueError(f"unknown quantum register {a.reg!r}")
        widths.append(1 if a.index is not None else qregs[a.reg])
    breadth = max(widths, default=1)
    if any(w not in (1, breadth) for w in widths):
        raise ValueError(f"mismatched register sizes {widths} in gate call")
    combos = []
    for i in range(breadth):
        combo = []
        for a, w in zip(call.qargs, widths):
            if a.index is not None:
                combo.append(offsets[a.reg] + a.index)
            elif w == 1:
                combo.append(offsets[a.reg])
            else:
                combo.append(offsets[a.reg] + i)
        combos.append(tuple(combo))
    return combos


def parse_qasm(source: str, name: str = "<input>") -> ParseResult:
    """Parse OpenQASM 2.0 text; never raises, reports diagnostics instead."""
    diags: list[Diagnostic] = []
    program = Program()
    try:
        tokens = _lex(source, diags)
        _Parser(tokens, diags, program).parse_program()
    except RecursionError:  # pragma: no cover - defensive
        _diag(diags, "error", 1, 1, "input too deeply nested")
    except Exception as exc:  # pragma: no cover - defensive
        _diag(diags, "error", 1, 1, f"internal parser error: {exc}")
    return ParseResult(program, diags, name)


# ---------------------------------------------------------------------------
# Lowering


def u_gate_matrix(theta: float, phi: float, lam: float) -> np.ndarray:
    """The OpenQASM U(theta, phi, lambda) single-qubit matrix."""
    ct, st = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return np.array(
        [
            [ct, -np.exp(1j * lam) * st],
            [np.exp(1j * phi) * st, np.exp(1j * (phi + lam)) * ct],
        ],
        dtype=np.complex128,
    )


# CX in the |control target> basis (local index = 2*bit(control)+bit(target)).
CX_MATRIX = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128
)


def _inline_call(
    call: GateCall,
    param_values,
    qubits,
    gates: dict[str, GateDef],
    out: list,
    depth: int,
) -> None:
    if depth > MAX_INLINE_DEPTH:
        raise QasmError(f"gate {call.name!r}: definitions nested too deeply")
    if call.name == "U":
        out.append((u_gate_matrix(*param_values), qubits))
        return
    if call.name == "CX":
        out.append((CX_MATRIX, qubits))
        return
    gd = gates[call.name]
    binding = dict(zip(gd.qargs, qubits))
    env = dict(zip(gd.params, param_values))
    for inner in gd.body:
        values = [eval_expr(e, env) for e in inner.params]
        mapped = tuple(binding[a.reg] for a in inner.qargs)
        _inline_call(inner, values, mapped, gates, out, depth + 1)


def lower_to_circuit(result_or_program) -> Circuit:
    """Inline a valid program to primitive gates packed greedily into cycles.

    A gate opens a new cycle only when it shares a qubit with the current
    one.  Measure statements are recorded in the circuit metadata and
    otherwise ignored; barriers are dropped.
    """
    if isinstance(result_or_program, ParseResult):
        if not result_or_program.ok:
            raise QasmError(
                "cannot lower a program with parse errors",
                result_or_program.diagnostics,
                result_or_program.name,
            )
        program = result_or_program.program
    else:
        program = result_or_program
    ops: list = []
    measurements = []
    for stmt in program.statements:
        if isinstance(stmt, BarrierStmt):
            continue
        if isinstance(stmt, MeasureStmt):
            for q, c in _expand_measure(stmt, program):
                measurements.append((q, c))
            continue
        try:
            values = [eval_expr(e, {}) for e in stmt.params]
            for combo in expand_call(stmt, program.qregs):
                _inline_call(stmt, values, combo, program.gates, ops, 0)
        except (ZeroDivisionError, OverflowError, ValueError) as exc:
            raise QasmError(f"line {stmt.line}: cannot lower {stmt.name!r}: {exc}") from exc
    for matrix, qubits in ops:
        if len(qubits) > 2:
            raise QasmError(f"gate of arity {len(qubits)} is unsupported after inlining")
    cycles = []
    current: list[Gate] = []
    used: set[int] = set()
    for matrix, qubits in ops:
        if any(q in used for q in qubits):
            cycles.append(Cycle(tuple(current)))
            current, used = [], set()
        kind = generic_1q(matrix) if len(qubits) == 1 else generic_2q(matrix)
        current.append(Gate(kind, qubits))
        used.update(qubits)
    if current:
        cycles.append(Cycle(tuple(current)))
    meta = {"label": "qasm", "measurements": tuple(measurements)}
    return Circuit(program.num_qubits, tuple(cycles), meta)


def _expand_measure(stmt: MeasureStmt, program: Program):
    qoff = program.qubit_offset(stmt.qubit.reg)
    if stmt.qubit.index is not None:
        cidx = stmt.clbit.index if stmt.clbit.index is not None else 0
        yield qoff + stmt.qubit.index, (stmt.clbit.reg, cidx)
    else:
        size = program.qregs[stmt.qubit.reg]
        for i in range(size):
            ci = stmt.clbit.index if stmt.clbit.index is not None else i
            yield qoff + i, (stmt.clbit.reg, ci)


# ---------------------------------------------------------------------------
# Emission

_EMITTED_DEFS = {
    "sqrt_x": ("sx_half", "gate sx_half a { U(pi/2,-pi/2,pi/2) a; }"),
    "sqrt_y": ("sy_half", "gate sy_half a { U(pi/2,0,0) a; }"),
    "sqrt_w": ("sw_half", "gate sw_half a { U(pi/2,-pi/4,pi/4) a; }"),
    "pauli_x": ("px", "gate px a { U(pi,0,pi) a; }"),
    "pauli_y": ("py", "gate py a { U(pi,pi/2,pi/2) a; }"),
    "pauli_z": ("pz", "gate pz a { U(0,0,pi) a; }"),
}

_FSIM_DEF = """gate fsim(theta,phi) a,b {
  U(pi/2,0,pi) a; U(pi/2,0,pi) b;
  CX a,b; U(0,0,theta) b; CX a,b;
  U(pi/2,0,pi) a; U(pi/2,0,pi) b;
  U(0,0,-pi/2) a; U(pi/2,0,pi) a; U(0,0,-pi/2) b; U(pi/2,0,pi) b;
  CX a,b; U(0,0,theta) b; CX a,b;
  U(pi/2,0,pi) a; U(0,0,pi/2) a; U(pi/2,0,pi) b; U(0,0,pi/2) b;
  U(0,0,-phi/2) a; CX a,b; U(0,0,phi/2) b; CX a,b; U(0,0,-phi/2) b;
}"""


def _fmt(x: float) -> str:
    return repr(float(x))


def emit_qasm(circuit: Circuit) -> str:
    """Serialize a circuit; parse(emit(c)) preserves the unitary up to phase.

    Named kinds are emitted through self-contained gate definitions; generic
    matrices are synthesized into U/CX sequences on the fly.
    """
    used_defs = []
    for g in circuit.all_gates():
        key = g.kind.name
        if key in _EMITTED_DEFS and key not in used_defs:
            used_defs.append(key)
        if key == "fsim" and "fsim" not in used_defs:
            used_defs.append("fsim")
    lines = ["OPENQASM 2.0;"]
    for key in used_defs:
        lines.append(_FSIM_DEF if key == "fsim" else _EMITTED_DEFS[key][1])
    lines.append(f"qreg q[{max(circuit.n, 1)}];")
    for cyc in circuit.cycles:
        for g in cyc.gates:
            lines.extend(_emit_gate(g))
    return "\n".join(lines) + "\n"


def _emit_gate(g: Gate) -> list[str]:
    name = g.kind.name
    if name in _EMITTED_DEFS:
        return [f"{_EMITTED_DEFS[name][0]} q[{g.targets[0]}];"]
    if name == "fsim":
        theta, phi = g.kind.params
        return [f"fsim({_fmt(theta)},{_fmt(phi)}) q[{g.targets[0]}],q[{g.targets[1]}];"]
    if name == "generic_1q":
        theta, phi, lam = synth.zyz_angles(gate_matrix(g.kind))
        return [f"U({_fmt(theta)},{_fmt(phi)},{_fmt(lam)}) q[{g.targets[0]}];"]
    if name == "generic_2q":
        out = []
        for op, qubits, params in synth.two_qubit_to_ops(gate_matrix(g.kind)):
            mapped = [g.targets[i] for i in qubits]
            if op == "CX":
                out.append(f"CX q[{mapped[0]}],q[{mapped[1]}];")
            else:
                t, p, lam = params
                out.append(f"U({_fmt(t)},{_fmt(p)},{_fmt(lam)}) q[{mapped[0]}];")
        return out
    raise ValueError(f"cannot emit gate kind {name!r}")
