"""Deeply embedded context language: a simply-typed lambda calculus.

Untrusted plugins can be written as source text in a small typed language
instead of as host closures.  The language has base types (unit, int,
bytes, fd, err), pairs, sums, unary functions, a handful of pure byte
helpers, and one effect form `io OP e` that routes through the secure IO
library supplied at link time.  There is no recursion, so every typed term
terminates.

`parse` builds the AST, `typecheck` verifies it against the boundary type
it must inhabit, and `translate` produces a target context whose runtime
behaviour matches a hand-written one event for event.

Concrete syntax::

    \\x:T. e                     abstraction        T ::= unit | int | bytes
    e1 e2                        application             | fd | err | T * T
    (e1, e2)    fst e    snd e   pairs                   | either T T | T -> T
    inl e | inr e                sum injections
    case e of inl x => e1 | inr y => e2
    let x = e1 in e2
    io Openfile e                secure IO call
    123  "bytes\\r\\n"  ()        literals
    concat, request_path, temp_path, http_ok   pure helpers
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import httputil
from .contracts import (
    ArrowT,
    BytesT,
    DBytes,
    DClosure,
    DErr,
    DFd,
    DInt,
    DLeft,
    DPair,
    DRight,
    DUnit,
    DynValue,
    EitherT,
    ErrT,
    FdT,
    IntT,
    PairT,
    TypeDesc,
    UnitT,
)
from .effects import Comp, IoOp, Lazy, Ret, bind, do, is_err, ret
from .monitor import SecureIoLib

# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------


class CtxType:
    __slots__ = ()


@dataclass(frozen=True)
class TUnit(CtxType):
    def __str__(self):
        return "unit"


@dataclass(frozen=True)
class TInt(CtxType):
    def __str__(self):
        return "int"


@dataclass(frozen=True)
class TBytes(CtxType):
    def __str__(self):
        return "bytes"


@dataclass(frozen=True)
class TFd(CtxType):
    def __str__(self):
        return "fd"


@dataclass(frozen=True)
class TErr(CtxType):
    def __str__(self):
        return "err"


@dataclass(frozen=True)
class TPair(CtxType):
    fst: CtxType
    snd: CtxType

    def __str__(self):
        return f"{_atomstr(self.fst)} * {_atomstr(self.snd)}"


@dataclass(frozen=True)
class TEither(CtxType):
    left: CtxType
    right: CtxType

    def __str__(self):
        return f"either {_atomstr(self.left)} {_atomstr(self.right)}"


@dataclass(frozen=True)
class TArrow(CtxType):
    dom: CtxType
    cod: CtxType

    def __str__(self):
        dom = f"({self.dom})" if isinstance(self.dom, TArrow) else _atomstr(self.dom)
        return f"{dom} -> {self.cod}"


def _atomstr(t: CtxType) -> str:
    return f"({t})" if isinstance(t, (TPair, TEither, TArrow)) else str(t)


def curried_view(td: TypeDesc) -> CtxType:
    """The boundary type as this language sees it: multi-argument
    functions become chains of unary ones."""
    if isinstance(td, UnitT):
        return TUnit()
    if isinstance(td, IntT):
        return TInt()
    if isinstance(td, BytesT):
        return TBytes()
    if isinstance(td, FdT):
        return TFd()
    if isinstance(td, ErrT):
        return TErr()
    if isinstance(td, PairT):
        return TPair(curried_view(td.fst), curried_view(td.snd))
    if isinstance(td, EitherT):
        return TEither(curried_view(td.left), curried_view(td.right))
    if isinstance(td, ArrowT):
        out = curried_view(td.cod)
        for dom in reversed(td.doms):
            out = TArrow(curried_view(dom), out)
        return out
    raise TypeError(f"unknown type descriptor {td!r}")


# Per-op argument and success-result types; results come wrapped in
# `either _ err`.
IO_SIG: dict[IoOp, tuple[CtxType, CtxType]] = {
    IoOp.OPENFILE: (TBytes(), TFd()),
    IoOp.READ: (TFd(), TBytes()),
    IoOp.WRITE: (TPair(TFd(), TBytes()), TUnit()),
    IoOp.CLOSE: (TFd(), TUnit()),
    IoOp.SOCKET: (TUnit(), TFd()),
}

PRIM_TYPES: dict[str, CtxType] = {
    "concat": TArrow(TBytes(), TArrow(TBytes(), TBytes())),
    "request_path": TArrow(TBytes(), TBytes()),
    "temp_path": TArrow(TBytes(), TBytes()),
    "http_ok": TArrow(TBytes(), TBytes()),
}

# ---------------------------------------------------------------------------
# Syntax
# ---------------------------------------------------------------------------


class CtxExpr:
    __slots__ = ()


@dataclass(frozen=True)
class Var(CtxExpr):
    name: str


@dataclass(frozen=True)
class Lam(CtxExpr):
    var: str
    ty: CtxType
    body: CtxExpr


@dataclass(frozen=True)
class App(CtxExpr):
    fn: CtxExpr
    arg: CtxExpr


@dataclass(frozen=True)
class IntLit(CtxExpr):
    value: int


@dataclass(frozen=True)
class BytesLit(CtxExpr):
    value: bytes


@dataclass(frozen=True)
class UnitLit(CtxExpr):
    pass


@dataclass(frozen=True)
class PairE(CtxExpr):
    fst: CtxExpr
    snd: CtxExpr


@dataclass(frozen=True)
class Proj(CtxExpr):
    side: str  # "fst" | "snd"
    expr: CtxExpr


@dataclass(frozen=True)
class Inject(CtxExpr):
    side: str  # "inl" | "inr"
    expr: CtxExpr


@dataclass(frozen=True)
class Case(CtxExpr):
    scrutinee: CtxExpr
    left_var: str
    left_body: CtxExpr
    right_var: str
    right_body: CtxExpr


@dataclass(frozen=True)
class Let(CtxExpr):
    var: str
    bound: CtxExpr
    body: CtxExpr


@dataclass(frozen=True)
class IoCall(CtxExpr):
    op: IoOp
    arg: CtxExpr


class ParseError(ValueError):
    def __init__(self, pos: int, message: str):
        super().__init__(f"at offset {pos}: {message}")
        self.pos = pos


class TypecheckError(ValueError):
    pass


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<int>-?\d+)
  | (?P<str>"(?:\\.|[^"\\])*")
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<sym>->|=>|[\\:.(),|=*])
    """,
    re.VERBOSE,
)

_KEYWORDS = {"let", "in", "case", "of", "inl", "inr", "io", "fst", "snd"}
_TYPE_NAMES = {"unit": TUnit, "int": TInt, "bytes": TBytes, "fd": TFd, "err": TErr}
_ESCAPES = {"n": b"\n", "r": b"\r", "t": b"\t", '"': b'"', "\\": b"\\"}


@dataclass(frozen=True)
class _Token:
    kind: str  # "int" | "str" | "ident" | "sym" | "eof"
    text: str
    pos: int


def _lex(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(pos, f"unexpected character {text[pos]!r}")
        if m.lastgroup != "ws":
            tokens.append(_Token(m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(_Token("eof", "", len(text)))
    return tokens


def _unescape(raw: str, pos: int) -> bytes:
    out = bytearray()
    body = raw[1:-1]
    i = 0
    while i < len(body):
        c = body[i]
        if c == "\\":
            i += 1
            esc = body[i]
            if esc not in _ESCAPES:
                raise ParseError(pos, f"unknown escape \\{esc}")
            out += _ESCAPES[esc]
        else:
            out += c.encode("latin-1")
        i += 1
    return bytes(out)


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str, text: str | None = None) -> _Token:
        tok = self.next()
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text or kind
            raise ParseError(tok.pos, f"expected {want!r}, found {tok.text or 'end of input'!r}")
        return tok

    def at_sym(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind == "sym" and tok.text == text

    def at_kw(self, word: str) -> bool:
        tok = self.peek()
        return tok.kind == "ident" and tok.text == word

    # -- types --------------------------------------------------------

    def type_(self) -> CtxType:
        left = self.type_prod()
        if self.at_sym("->"):
            self.next()
            return TArrow(left, self.type_())
        return left

    def type_prod(self) -> CtxType:
        left = self.type_atom()
        while self.at_sym("*"):
            self.next()
            left = TPair(left, self.type_atom())
        return left

    def type_atom(self) -> CtxType:
        tok = self.peek()
        if tok.kind == "sym" and tok.text == "(":
            self.next()
            inner = self.type_()
            self.expect("sym", ")")
            return inner
        if tok.kind == "ident":
            self.next()
            if tok.text in _TYPE_NAMES:
                return _TYPE_NAMES[tok.text]()
            if tok.text == "either":
                return TEither(self.type_atom(), self.type_atom())
        raise ParseError(tok.pos, f"expected a type, found {tok.text!r}")

    # -- expressions --------------------------------------------------

    def expr(self) -> CtxExpr:
        tok = self.peek()
        if tok.kind == "sym" and tok.text == "\\":
            self.next()
            var = self.expect("ident").text
            self.expect("sym", ":")
            ty = self.type_()
            self.expect("sym", ".")
            return Lam(var, ty, self.expr())
        if self.at_kw("let"):
            self.next()
            var = self.expect("ident").text
            self.expect("sym", "=")
            bound = self.expr()
            if not self.at_kw("in"):
                raise ParseError(self.peek().pos, "expected 'in'")
            self.next()
            return Let(var, bound, self.expr())
        if self.at_kw("case"):
            self.next()
            scrutinee = self.expr()
            if not self.at_kw("of"):
                raise ParseError(self.peek().pos, "expected 'of'")
            self.next()
            if not self.at_kw("inl"):
                raise ParseError(self.peek().pos, "expected 'inl' branch")
            self.next()
            lv = self.expect("ident").text
            self.expect("sym", "=>")
            lb = self.expr()
            self.expect("sym", "|")
            if not self.at_kw("inr"):
                raise ParseError(self.peek().pos, "expected 'inr' branch")
            self.next()
            rv = self.expect("ident").text
            self.expect("sym", "=>")
            rb = self.expr()
            return Case(scrutinee, lv, lb, rv, rb)
        return self.application()

    def application(self) -> CtxExpr:
        expr = self.unit_expr()
        while self._starts_unit():
            expr = App(expr, self.unit_expr())
        return expr

    def _starts_unit(self) -> bool:
        tok = self.peek()
        if tok.kind in ("int", "str"):
            return True
        if tok.kind == "sym" and tok.text == "(":
            return True
        if tok.kind == "ident" and tok.text not in ("in", "of"):
            return True
        return False

    def unit_expr(self) -> CtxExpr:
        tok = self.peek()
        if tok.kind == "int":
            self.next()
            return IntLit(int(tok.text))
        if tok.kind == "str":
            self.next()
            return BytesLit(_unescape(tok.text, tok.pos))
        if tok.kind == "sym" and tok.text == "(":
            self.next()
            if self.at_sym(")"):
                self.next()
                return UnitLit()
            first = self.expr()
            if self.at_sym(","):
                self.next()
                second = self.expr()
                self.expect("sym", ")")
                return PairE(first, second)
            self.expect("sym", ")")
            return first
        if tok.kind == "ident":
            if tok.text in ("fst", "snd"):
                self.next()
                return Proj(tok.text, self.unit_expr())
            if tok.text in ("inl", "inr"):
                self.next()
                return Inject(tok.text, self.unit_expr())
            if tok.text == "io":
                self.next()
                op_tok = self.expect("ident")
                try:
                    op = IoOp(op_tok.text)
                except ValueError:
                    raise ParseError(op_tok.pos, f"unknown IO operation {op_tok.text!r}") from None
                if op not in IO_SIG:
                    raise ParseError(op_tok.pos, f"operation {op.value} not callable from contexts")
                return IoCall(op, self.unit_expr())
            if tok.text in _KEYWORDS:
                raise ParseError(tok.pos, f"unexpected keyword {tok.text!r}")
            self.next()
            return Var(tok.text)
        raise ParseError(tok.pos, f"expected an expression, found {tok.text or 'end of input'!r}")


def parse(text: str) -> CtxExpr:
    parser = _Parser(_lex(text))
    expr = parser.expr()
    tok = parser.peek()
    if tok.kind != "eof":
        raise ParseError(tok.pos, f"trailing input starting at {tok.text!r}")
    return expr


# ---------------------------------------------------------------------------
# Type checking
# ---------------------------------------------------------------------------


def typecheck(expr: CtxExpr, expected: CtxType) -> None:
    """Check a closed term against the type it must inhabit."""
    _check(expr, expected, dict(PRIM_TYPES), "term")


def _fail(path: str, message: str):
    raise TypecheckError(f"{path}: {message}")


def _check(expr: CtxExpr, expected: CtxType, env: dict, path: str) -> None:
    if isinstance(expr, Lam):
        if not isinstance(expected, TArrow):
            _fail(path, f"function found where {expected} expected")
        if expr.ty != expected.dom:
            _fail(path, f"argument annotated {expr.ty}, needs {expected.dom}")
        _check(expr.body, expected.cod, {**env, expr.var: expr.ty}, path + ".body")
        return
    if isinstance(expr, Inject):
        if not isinstance(expected, TEither):
            _fail(path, f"sum injection found where {expected} expected")
        side = expected.left if expr.side == "inl" else expected.right
        _check(expr.expr, side, env, path + "." + expr.side)
        return
    if isinstance(expr, PairE) and isinstance(expected, TPair):
        _check(expr.fst, expected.fst, env, path + ".fst")
        _check(expr.snd, expected.snd, env, path + ".snd")
        return
    if isinstance(expr, Case):
        scrutinee = _infer(expr.scrutinee, env, path + ".scrutinee")
        if not isinstance(scrutinee, TEither):
            _fail(path, f"case scrutinee has type {scrutinee}, not a sum")
        _check(expr.left_body, expected, {**env, expr.left_var: scrutinee.left}, path + ".inl")
        _check(expr.right_body, expected, {**env, expr.right_var: scrutinee.right}, path + ".inr")
        return
    if isinstance(expr, Let):
        bound = _infer(expr.bound, env, path + ".bound")
        _check(expr.body, expected, {**env, expr.var: bound}, path + ".body")
        return
    actual = _infer(expr, env, path)
    if actual != expected:
        _fail(path, f"has type {actual}, needs {expected}")


def _infer(expr: CtxExpr, env: dict, path: str) -> CtxType:
    if isinstance(expr, Var):
        if expr.name not in env:
            _fail(path, f"unbound variable {expr.name!r}")
        return env[expr.name]
    if isinstance(expr, IntLit):
        return TInt()
    if isinstance(expr, BytesLit):
        return TBytes()
    if isinstance(expr, UnitLit):
        return TUnit()
    if isinstance(expr, Lam):
        body = _infer(expr.body, {**env, expr.var: expr.ty}, path + ".body")
        return TArrow(expr.ty, body)
    if isinstance(expr, App):
        fn = _infer(expr.fn, env, path + ".fn")
        if not isinstance(fn, TArrow):
            _fail(path, f"applied expression has type {fn}, not a function")
        _check(expr.arg, fn.dom, env, path + ".arg")
        return fn.cod
    if isinstance(expr, PairE):
        return TPair(_infer(expr.fst, env, path + ".fst"), _infer(expr.snd, env, path + ".snd"))
    if isinstance(expr, Proj):
        pair = _infer(expr.expr, env, path + "." + expr.side)
        if not isinstance(pair, TPair):
            _fail(path, f"projection from type {pair}, not a pair")
        return pair.fst if expr.side == "fst" else pair.snd
    if isinstance(expr, IoCall):
        arg_t, res_t = IO_SIG[expr.op]
        _check(expr.arg, arg_t, env, path + ".arg")
        return TEither(res_t, TErr())
    if isinstance(expr, Let):
        bound = _infer(expr.bound, env, path + ".bound")
        return _infer(expr.body, {**env, expr.var: bound}, path + ".body")
    if isinstance(expr, Case):
        scrutinee = _infer(expr.scrutinee, env, path + ".scrutinee")
        if not isinstance(scrutinee, TEither):
            _fail(path, f"case scrutinee has type {scrutinee}, not a sum")
        left = _infer(expr.left_body, {**env, expr.left_var: scrutinee.left}, path + ".inl")
        right = _infer(expr.right_body, {**env, expr.right_var: scrutinee.right}, path + ".inr")
        if left != right:
            _fail(path, f"branches disagree: {left} vs {right}")
        return left
    if isinstance(expr, Inject):
        _fail(path, "cannot infer the type of a bare sum injection; add context")
    raise TypeError(f"unknown expression {expr!r}")


# ---------------------------------------------------------------------------
# Translation
# ---------------------------------------------------------------------------


class TranslateError(ValueError):
    pass


def _prim_closures() -> dict[str, DynValue]:
    def unary(fn):
        return DClosure(lambda a: ret(DBytes(fn(a.data))))

    concat = DClosure(lambda a: ret(DClosure(lambda b: ret(DBytes(a.data + b.data)))))
    return {
        "concat": concat,
        "request_path": unary(httputil.request_path),
        "temp_path": unary(httputil.temp_path),
        "http_ok": unary(httputil.http_ok),
    }


def _io_arg(op: IoOp, dv: DynValue):
    if op is IoOp.OPENFILE:
        return (dv.data.decode("latin-1"), (), 0)
    if op is IoOp.WRITE:
        return (dv.fst.fd, dv.snd.data)
    if op in (IoOp.READ, IoOp.CLOSE):
        return dv.fd
    if op is IoOp.SOCKET:
        return ()
    raise TranslateError(f"operation {op.value} not callable from contexts")


def _io_result(op: IoOp, result) -> DynValue:
    if is_err(result):
        return DRight(DErr(result.code, result.why))
    if op in (IoOp.OPENFILE, IoOp.SOCKET):
        return DLeft(DFd(result.value))
    if op is IoOp.READ:
        return DLeft(DBytes(result.value))
    return DLeft(DUnit())


def _eval(expr: CtxExpr, env: dict, lib: SecureIoLib) -> Comp:
    if isinstance(expr, Var):
        return ret(env[expr.name])
    if isinstance(expr, IntLit):
        return ret(DInt(expr.value))
    if isinstance(expr, BytesLit):
        return ret(DBytes(expr.value))
    if isinstance(expr, UnitLit):
        return ret(DUnit())
    if isinstance(expr, Lam):
        return ret(DClosure(lambda dv: _eval(expr.body, {**env, expr.var: dv}, lib)))
    if isinstance(expr, App):
        return bind(
            _eval(expr.fn, env, lib),
            lambda fn: bind(_eval(expr.arg, env, lib), lambda arg: fn.fn(arg)),
        )
    if isinstance(expr, PairE):
        return bind(
            _eval(expr.fst, env, lib),
            lambda a: bind(_eval(expr.snd, env, lib), lambda b: ret(DPair(a, b))),
        )
    if isinstance(expr, Proj):
        return bind(
            _eval(expr.expr, env, lib),
            lambda p: ret(p.fst if expr.side == "fst" else p.snd),
        )
    if isinstance(expr, Inject):
        wrap = DLeft if expr.side == "inl" else DRight
        return bind(_eval(expr.expr, env, lib), lambda v: ret(wrap(v)))
    if isinstance(expr, Case):
        def branch(v):
            if isinstance(v, DLeft):
                return _eval(expr.left_body, {**env, expr.left_var: v.value}, lib)
            return _eval(expr.right_body, {**env, expr.right_var: v.value}, lib)

        return bind(_eval(expr.scrutinee, env, lib), branch)
    if isinstance(expr, Let):
        return bind(
            _eval(expr.bound, env, lib),
            lambda v: _eval(expr.body, {**env, expr.var: v}, lib),
        )
    if isinstance(expr, IoCall):
        return bind(
            _eval(expr.arg, env, lib),
            lambda dv: bind(lib.call(expr.op, _io_arg(expr.op, dv)), lambda r: ret(_io_result(expr.op, r))),
        )
    raise TypeError(f"unknown expression {expr!r}")


def _force_value(comp: Comp) -> DynValue:
    while isinstance(comp, Lazy):
        comp = comp.force()
    if isinstance(comp, Ret):
        return comp.value
    raise TranslateError("a context must be a value; effects belong inside its functions")


def _adapt_out(v: DynValue, td: TypeDesc) -> DynValue:
    """Shape a language value to the boundary type (uncurry functions)."""
    if isinstance(td, ArrowT):
        doms, cod = td.doms, td.cod

        @do
        def fn(*dyn_args):
            cur = v
            for dom, arg in zip(doms, dyn_args):
                cur = yield cur.fn(_adapt_in(arg, dom))
            return _adapt_out(cur, cod)

        return DClosure(fn)
    if isinstance(td, PairT):
        return DPair(_adapt_out(v.fst, td.fst), _adapt_out(v.snd, td.snd))
    if isinstance(td, EitherT):
        if isinstance(v, DLeft):
            return DLeft(_adapt_out(v.value, td.left))
        return DRight(_adapt_out(v.value, td.right))
    return v


def _adapt_in(v: DynValue, td: TypeDesc) -> DynValue:
    """Shape a boundary value for language code (curry functions)."""
    if isinstance(td, ArrowT):
        doms, cod = td.doms, td.cod

        def chain(collected):
            if len(collected) == len(doms):
                outward = [_adapt_out(a, d) for a, d in zip(collected, doms)]
                return bind(v.fn(*outward), lambda r: ret(_adapt_in(r, cod)))
            return ret(DClosure(lambda arg: chain(collected + [arg])))

        return _force_value(chain([]))
    if isinstance(td, PairT):
        return DPair(_adapt_in(v.fst, td.fst), _adapt_in(v.snd, td.snd))
    if isinstance(td, EitherT):
        if isinstance(v, DLeft):
            return DLeft(_adapt_in(v.value, td.left))
        return DRight(_adapt_in(v.value, td.right))
    return v


def translate(expr: CtxExpr, ctype: TypeDesc):
    """Typed source text to target context.  Total on typed terms."""
    typecheck(expr, curried_view(ctype))

    def target_ctx(lib: SecureIoLib) -> DynValue:
        value = _force_value(_eval(expr, _prim_closures(), lib))
        return _adapt_out(value, ctype)

    return target_ctx


def load(text: str, ctype: TypeDesc):
    return translate(parse(text), ctype)


# ---------------------------------------------------------------------------
# Pretty printing
# ---------------------------------------------------------------------------


def pretty(expr: CtxExpr) -> str:
    return _pp(expr, 0)


def _pp(expr: CtxExpr, level: int) -> str:
    # level 0: any form; 1: application operands; 2: atoms only
    if isinstance(expr, Lam):
        return _wrap(f"\\{expr.var}:{expr.ty}. {_pp(expr.body, 0)}", level > 0)
    if isinstance(expr, Let):
        return _wrap(f"let {expr.var} = {_pp(expr.bound, 0)} in {_pp(expr.body, 0)}", level > 0)
    if isinstance(expr, Case):
        return _wrap(
            f"case {_pp(expr.scrutinee, 0)} of inl {expr.left_var} => {_pp(expr.left_body, 0)}"
            f" | inr {expr.right_var} => {_pp(expr.right_body, 0)}",
            level > 0,
        )
    if isinstance(expr, App):
        return _wrap(f"{_pp(expr.fn, 1)} {_pp(expr.arg, 2)}", level > 1)
    if isinstance(expr, Proj):
        return _wrap(f"{expr.side} {_pp(expr.expr, 2)}", level > 1)
    if isinstance(expr, Inject):
        return _wrap(f"{expr.side} {_pp(expr.expr, 2)}", level > 1)
    if isinstance(expr, IoCall):
        return _wrap(f"io {expr.op.value} {_pp(expr.arg, 2)}", level > 1)
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, IntLit):
        return str(expr.value)
    if isinstance(expr, BytesLit):
        return '"' + _escape(expr.value) + '"'
    if isinstance(expr, UnitLit):
        return "()"
    if isinstance(expr, PairE):
        return f"({_pp(expr.fst, 0)}, {_pp(expr.snd, 0)})"
    raise TypeError(f"unknown expression {expr!r}")


def _wrap(text: str, needed: bool) -> str:
    return f"({text})" if needed else text


_UNESCAPES = {b"\n": "\\n", b"\r": "\\r", b"\t": "\\t", b'"': '\\"', b"\\": "\\\\"}


def _escape(data: bytes) -> str:
    out = []
    for i in range(len(data)):
        b = data[i : i + 1]
        if b in _UNESCAPES:
            out.append(_UNESCAPES[b])
        else:
            out.append(b.decode("latin-1"))
    return "".join(out)
