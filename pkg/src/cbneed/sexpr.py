"""Bit-exact S-expression surface syntax.

Grammar (whitespace-insensitive between tokens):

    closure := (closure cmd store)
    cmd     := (cmd term ectx)
    term    := (var NAME) | (const NAME) | (lam NAME type term)
             | (mu NAME type cmd)
    ectx    := fctx | (covar NAME) | (tmub NAME type fctx store)
             | (tmu NAME type cmd)
    fctx    := (coconst NAME) | (app term catchable)
    store   := (store binding*)
    binding := (bind NAME term) | (cobind NAME catchable)
    type    := NAME | (-> type type)
    NAME    := [A-Za-z][A-Za-z0-9_]* optionally followed by #[0-9]+

The `#n` suffix is reserved for machine-generated fresh names; the reader
accepts it so that printed machine states parse back.  A catchable slot
(second argument of `app`, value of `cobind`) rejects `tmu` forms with a
CategoryError.
"""

from __future__ import annotations

import re

from .errors import CategoryError, ParseError
from .syntax import (
    AppFrame, Arrow, Atom, Closure, CoConst, Command, Const, CoVar, CtxBind,
    Lam, Mu, Store, TermBind, Tmu, TmuBracket, Var,
)

_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*(?:#[0-9]+)?")
_NUMBER_RE = re.compile(r"[0-9]+")


# ---------------------------------------------------------------------------
# Generic reader

class SAtom:
    __slots__ = ("text", "line", "col")

    def __init__(self, text, line, col):
        self.text = text
        self.line = line
        self.col = col


class SList:
    __slots__ = ("items", "line", "col")

    def __init__(self, items, line, col):
        self.items = items
        self.line = line
        self.col = col


def tokenize(text):
    line, col = 1, 1
    i, n = 0, len(text)
    out = []
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            col += 1
            i += 1
            continue
        if ch in "()":
            out.append((ch, ch, line, col))
            col += 1
            i += 1
            continue
        if text.startswith("->", i):
            out.append(("arrow", "->", line, col))
            col += 2
            i += 2
            continue
        m = _NAME_RE.match(text, i)
        if m:
            out.append(("name", m.group(), line, col))
            col += len(m.group())
            i += len(m.group())
            continue
        m = _NUMBER_RE.match(text, i)
        if m:
            # numerals only occur in derivation files (lit, arities)
            out.append(("number", m.group(), line, col))
            col += len(m.group())
            i += len(m.group())
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col)
    return out


def read_forms(text):
    """Parse text into a list of nested SAtom/SList trees."""
    tokens = tokenize(text)
    pos = 0

    def read():
        nonlocal pos
        if pos >= len(tokens):
            raise ParseError("unexpected end of input", None, None)
        kind, tok, line, col = tokens[pos]
        pos += 1
        if kind in ("name", "arrow", "number"):
            return SAtom(tok, line, col)
        if kind == "(":
            items = []
            while True:
                if pos >= len(tokens):
                    raise ParseError("unclosed parenthesis", line, col)
                if tokens[pos][0] == ")":
                    pos += 1
                    return SList(items, line, col)
                items.append(read())
        raise ParseError("unexpected )", line, col)

    forms = []
    while pos < len(tokens):
        forms.append(read())
    return forms


def read_one(text):
    forms = read_forms(text)
    if len(forms) != 1:
        raise ParseError(f"expected exactly one form, found {len(forms)}",
                         1, 1)
    return forms[0]


# ---------------------------------------------------------------------------
# Forms to AST

def _head(form, what):
    if not isinstance(form, SList) or not form.items \
            or not isinstance(form.items[0], SAtom):
        where = form if isinstance(form, SAtom) else form
        raise ParseError(f"expected {what}", where.line, where.col)
    return form.items[0].text


def _arity(form, n, what):
    if len(form.items) != n + 1:
        raise ParseError(
            f"{what} takes {n} arguments, got {len(form.items) - 1}",
            form.line, form.col)


def _name(form, what="name"):
    if not isinstance(form, SAtom) or not _NAME_RE.fullmatch(form.text):
        line = form.line
        col = form.col
        raise ParseError(f"expected {what}", line, col)
    return form.text


def _type(form):
    if isinstance(form, SAtom):
        if form.text == "->":
            raise ParseError("expected type", form.line, form.col)
        return Atom(_name(form, "type name"))
    head = _head(form, "type")
    if head != "->":
        raise ParseError(f"unknown type form {head!r}", form.line, form.col)
    _arity(form, 2, "->")
    return Arrow(_type(form.items[1]), _type(form.items[2]))


def _atomic_type(form):
    ty = _type(form)
    if not isinstance(ty, Atom):
        raise CategoryError("constant types must be atomic",
                            form.line, form.col)
    return ty


def _term(form):
    head = _head(form, "term")
    if head == "var":
        _arity(form, 1, "var")
        return Var(_name(form.items[1]))
    if head == "const":
        _arity(form, 1, "const")
        return Const(_name(form.items[1]))
    if head == "lam":
        _arity(form, 3, "lam")
        return Lam(_name(form.items[1]), _type(form.items[2]),
                   _term(form.items[3]))
    if head == "mu":
        _arity(form, 3, "mu")
        return Mu(_name(form.items[1]), _type(form.items[2]),
                  _command(form.items[3]))
    if head in ("coconst", "app", "covar", "tmub", "tmu"):
        raise CategoryError(f"context form {head!r} where a term is required",
                            form.line, form.col)
    raise ParseError(f"unknown term form {head!r}", form.line, form.col)


def _forcing(form):
    head = _head(form, "forcing context")
    if head == "coconst":
        _arity(form, 1, "coconst")
        return CoConst(_name(form.items[1]))
    if head == "app":
        _arity(form, 2, "app")
        return AppFrame(_term(form.items[1]), _catchable(form.items[2]))
    if head in ("covar", "tmub", "tmu"):
        raise CategoryError(
            f"{head!r} is not a forcing context", form.line, form.col)
    raise ParseError(f"unknown context form {head!r}", form.line, form.col)


def _catchable(form):
    head = _head(form, "catchable context")
    if head == "tmu":
        raise CategoryError("tmu context where a catchable context is "
                            "required", form.line, form.col)
    return _ectx(form)


def _ectx(form):
    head = _head(form, "context")
    if head in ("coconst", "app"):
        return _forcing(form)
    if head == "covar":
        _arity(form, 1, "covar")
        return CoVar(_name(form.items[1]))
    if head == "tmub":
        _arity(form, 4, "tmub")
        return TmuBracket(_name(form.items[1]), _type(form.items[2]),
                          _forcing(form.items[3]), _store(form.items[4]))
    if head == "tmu":
        _arity(form, 3, "tmu")
        return Tmu(_name(form.items[1]), _type(form.items[2]),
                   _command(form.items[3]))
    if head in ("var", "const", "lam", "mu"):
        raise CategoryError(f"term form {head!r} where a context is required",
                            form.line, form.col)
    raise ParseError(f"unknown context form {head!r}", form.line, form.col)


def _store(form):
    head = _head(form, "store")
    if head != "store":
        raise CategoryError(f"expected (store ...), got {head!r}",
                            form.line, form.col)
    bindings = []
    for item in form.items[1:]:
        bhead = _head(item, "binding")
        if bhead == "bind":
            _arity(item, 2, "bind")
            bindings.append(TermBind(_name(item.items[1]),
                                     _term(item.items[2])))
        elif bhead == "cobind":
            _arity(item, 2, "cobind")
            bindings.append(CtxBind(_name(item.items[1]),
                                    _catchable(item.items[2])))
        else:
            raise ParseError(f"unknown binding form {bhead!r}",
                             item.line, item.col)
    return Store(tuple(bindings))


def _command(form):
    head = _head(form, "command")
    if head != "cmd":
        raise CategoryError(f"expected (cmd ...), got {head!r}",
                            form.line, form.col)
    _arity(form, 2, "cmd")
    return Command(_term(form.items[1]), _ectx(form.items[2]))


def _closure(form):
    head = _head(form, "closure")
    if head != "closure":
        raise CategoryError(f"top-level form must be (closure ...), "
                            f"got {head!r}", form.line, form.col)
    _arity(form, 2, "closure")
    return Closure(_command(form.items[1]), _store(form.items[2]))


def parse_closure(text: str) -> Closure:
    return _closure(read_one(text))


def parse_command(text: str) -> Command:
    return _command(read_one(text))


def parse_term(text: str):
    return _term(read_one(text))


def parse_context(text: str):
    return _ectx(read_one(text))


def parse_store(text: str) -> Store:
    return _store(read_one(text))


def parse_type(text: str):
    return _type(read_one(text))


# ---------------------------------------------------------------------------
# Printer

def print_type(ty) -> str:
    if isinstance(ty, Atom):
        return ty.name
    return f"(-> {print_type(ty.dom)} {print_type(ty.cod)})"


def print_node(node) -> str:
    """Render any syntax node; inverse of the corresponding parser."""
    match node:
        case Var(x):
            return f"(var {x})"
        case Const(k):
            return f"(const {k})"
        case Lam(x, a, b):
            return f"(lam {x} {print_type(a)} {print_node(b)})"
        case Mu(al, a, b):
            return f"(mu {al} {print_type(a)} {print_node(b)})"
        case CoConst(k):
            return f"(coconst {k})"
        case AppFrame(t, e):
            return f"(app {print_node(t)} {print_node(e)})"
        case CoVar(al):
            return f"(covar {al})"
        case TmuBracket(x, a, f, s):
            return (f"(tmub {x} {print_type(a)} {print_node(f)} "
                    f"{print_node(s)})")
        case Tmu(x, a, b):
            return f"(tmu {x} {print_type(a)} {print_node(b)})"
        case Command(t, e):
            return f"(cmd {print_node(t)} {print_node(e)})"
        case Closure(c, s):
            return f"(closure {print_node(c)} {print_node(s)})"
        case Store(bindings):
            parts = ["store"]
            for b in bindings:
                marker = "bind" if isinstance(b, TermBind) else "cobind"
                parts.append(f"({marker} {b.name} {print_node(b.value)})")
            return "(" + " ".join(parts) + ")"
    raise TypeError(f"not a syntax node: {node!r}")


def print_closure(closure: Closure) -> str:
    return print_node(closure)


def print_store(store: Store) -> str:
    return print_node(store)
