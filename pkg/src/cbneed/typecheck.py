"""Syntax-directed checker for the nine judgment levels.

Levels are named by single letters matching the syntactic categories:
v (strong values), V (weak values), t (terms), F (forcing contexts),
E (catchable contexts), e (evaluation contexts), c (commands),
tau (stores), l (closures).  Value and term judgments assert a type;
context judgments expect one; store judgments produce a typing context;
command and closure judgments are checks with no type.

Every node carries enough annotations that exactly one rule applies at
its level, so inference is a single recursive pass with no unification
and no backtracking.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CategoryError, ParseError, TypeCheckError
from .sexpr import (
    SAtom, SList, _atomic_type, _catchable, _name, _type, print_node,
    print_type, read_one,
)
from .syntax import (
    AppFrame, Arrow, Atom, Closure, CoConst, Command, Const, CoVar, CtxBind,
    Lam, Mu, SimpleType, Store, TermBind, Tmu, TmuBracket, Var,
    CATCHABLE_CONTEXTS, EVAL_CONTEXTS, FORCING_CONTEXTS, STRONG_VALUES,
    TERMS, WEAK_VALUES,
)

LEVELS = ("v", "V", "t", "F", "E", "e", "c", "tau", "l")


@dataclass(frozen=True)
class TermVarEntry:
    name: str
    type: SimpleType


@dataclass(frozen=True)
class CtxVarEntry:
    """Context-variable entry; the recorded type A stands for A dualized."""
    name: str
    type: SimpleType


@dataclass(frozen=True)
class TypingContext:
    entries: tuple = ()

    def extend_term(self, name, ty) -> "TypingContext":
        self._check_new(name, TermVarEntry)
        return TypingContext(self.entries + (TermVarEntry(name, ty),))

    def extend_ctx(self, name, ty) -> "TypingContext":
        self._check_new(name, CtxVarEntry)
        return TypingContext(self.entries + (CtxVarEntry(name, ty),))

    def _check_new(self, name, kind):
        if any(isinstance(e, kind) and e.name == name for e in self.entries):
            raise TypeCheckError("c", f"name already in context: {name}",
                                 name=name)

    def concat(self, other: "TypingContext") -> "TypingContext":
        ctx = self
        for entry in other.entries:
            if isinstance(entry, TermVarEntry):
                ctx = ctx.extend_term(entry.name, entry.type)
            else:
                ctx = ctx.extend_ctx(entry.name, entry.type)
        return ctx

    def lookup_term(self, name):
        for entry in self.entries:
            if isinstance(entry, TermVarEntry) and entry.name == name:
                return entry.type
        return None

    def lookup_ctx(self, name):
        for entry in self.entries:
            if isinstance(entry, CtxVarEntry) and entry.name == name:
                return entry.type
        return None

    def __str__(self):
        parts = []
        for entry in self.entries:
            mark = "" if isinstance(entry, TermVarEntry) else "^"
            parts.append(f"{entry.name} : {type_repr(entry.type)}{mark}")
        return ", ".join(parts) if parts else "(empty)"


EMPTY_CONTEXT = TypingContext()


def type_repr(ty):
    from .syntax import type_str
    return type_str(ty)


@dataclass(frozen=True)
class Signature:
    """Ambient typing of constants (atomic) and co-constants (any type)."""
    consts: dict
    coconsts: dict

    def __post_init__(self):
        for name, ty in self.consts.items():
            if not isinstance(ty, Atom):
                raise TypeCheckError(
                    "v", f"constant {name} must have an atomic type",
                    name=name)


EMPTY_SIGNATURE = Signature({}, {})


def parse_signature(text: str) -> Signature:
    """Read a `(sig (const NAME atom)* (coconst NAME type)*)` file."""
    form = read_one(text)
    if not isinstance(form, SList) or not form.items \
            or not isinstance(form.items[0], SAtom) \
            or form.items[0].text != "sig":
        raise ParseError("expected (sig ...)",
                         getattr(form, "line", 1), getattr(form, "col", 1))
    consts, coconsts = {}, {}
    for item in form.items[1:]:
        if not isinstance(item, SList) or len(item.items) != 3 \
                or not isinstance(item.items[0], SAtom):
            raise ParseError("expected (const NAME type) or "
                             "(coconst NAME type)", item.line, item.col)
        head = item.items[0].text
        name = _name(item.items[1])
        if head == "const":
            consts[name] = _atomic_type(item.items[2])
        elif head == "coconst":
            coconsts[name] = _type(item.items[2])
        else:
            raise ParseError(f"unknown signature entry {head!r}",
                             item.line, item.col)
    return Signature(consts, coconsts)


def _mismatch(level, node, expected, actual):
    return TypeCheckError(
        level,
        f"expected {type_repr(expected)}, got {type_repr(actual)}",
        subject=print_node(node), expected=expected, actual=actual)


class TypeChecker:
    """Checker for one signature; all methods are pure."""

    def __init__(self, signature: Signature):
        self.signature = signature

    # -- value and term levels ------------------------------------------

    def infer_strong_value(self, ctx: TypingContext, node) -> SimpleType:
        match node:
            case Const(name):
                ty = self.signature.consts.get(name)
                if ty is None:
                    raise TypeCheckError("v", f"unknown constant {name}",
                                         name=name)
                return ty
            case Lam(x, annot, body):
                inner = ctx.extend_term(x, annot)
                return Arrow(annot, self.infer_term(inner, body))
        raise TypeCheckError("v", f"not a strong value: {print_node(node)}")

    def infer_weak_value(self, ctx: TypingContext, node) -> SimpleType:
        if isinstance(node, Var):
            ty = ctx.lookup_term(node.name)
            if ty is None:
                raise TypeCheckError("V", f"unbound variable {node.name}",
                                     name=node.name)
            return ty
        if isinstance(node, STRONG_VALUES):
            return self.infer_strong_value(ctx, node)
        raise TypeCheckError("V", f"not a weak value: {print_node(node)}")

    def infer_term(self, ctx: TypingContext, node) -> SimpleType:
        if isinstance(node, Mu):
            inner = ctx.extend_ctx(node.binder, node.annot)
            self.check_command(inner, node.body)
            return node.annot
        if isinstance(node, WEAK_VALUES):
            return self.infer_weak_value(ctx, node)
        raise TypeCheckError("t", f"not a term: {print_node(node)}")

    # -- context levels --------------------------------------------------

    def infer_forcing(self, ctx: TypingContext, node) -> SimpleType:
        match node:
            case CoConst(name):
                ty = self.signature.coconsts.get(name)
                if ty is None:
                    raise TypeCheckError("F", f"unknown co-constant {name}",
                                         name=name)
                return ty
            case AppFrame(arg, rest):
                dom = self.infer_term(ctx, arg)
                cod = self.infer_catchable(ctx, rest)
                return Arrow(dom, cod)
        raise TypeCheckError("F", f"not a forcing context: {print_node(node)}")

    def infer_catchable(self, ctx: TypingContext, node) -> SimpleType:
        if isinstance(node, CoVar):
            ty = ctx.lookup_ctx(node.name)
            if ty is None:
                raise TypeCheckError("E", f"unbound co-variable {node.name}",
                                     name=node.name)
            return ty
        if isinstance(node, TmuBracket):
            annot = node.annot
            inner = ctx.extend_term(node.binder, annot)
            suffix_ctx = self.check_store(inner, node.suffix)
            actual = self.infer_forcing(inner.concat(suffix_ctx),
                                        node.forcing)
            if actual != annot:
                raise _mismatch("E", node, annot, actual)
            return annot
        if isinstance(node, FORCING_CONTEXTS):
            return self.infer_forcing(ctx, node)
        raise TypeCheckError("E",
                             f"not a catchable context: {print_node(node)}")

    def infer_eval_context(self, ctx: TypingContext, node) -> SimpleType:
        if isinstance(node, Tmu):
            inner = ctx.extend_term(node.binder, node.annot)
            self.check_command(inner, node.body)
            return node.annot
        if isinstance(node, CATCHABLE_CONTEXTS):
            return self.infer_catchable(ctx, node)
        raise TypeCheckError("e", f"not a context: {print_node(node)}")

    # -- command, store, closure -----------------------------------------

    def check_command(self, ctx: TypingContext, node: Command) -> None:
        """The cut: both sides must agree on the type, taken from the term."""
        term_ty = self.infer_term(ctx, node.term)
        ctx_ty = self.infer_eval_context(ctx, node.context)
        if term_ty != ctx_ty:
            raise _mismatch("c", node, term_ty, ctx_ty)

    def check_store(self, ctx: TypingContext, store: Store) -> TypingContext:
        """Context produced by the store, built binding by binding.

        Each value is typed under the incoming context extended with the
        context of the bindings before it.
        """
        produced = EMPTY_CONTEXT
        for binding in store.bindings:
            scope = ctx.concat(produced)
            if isinstance(binding, TermBind):
                ty = self.infer_term(scope, binding.value)
                produced = produced.extend_term(binding.name, ty)
            else:
                ty = self.infer_catchable(scope, binding.value)
                produced = produced.extend_ctx(binding.name, ty)
        return produced

    def check_closure(self, closure: Closure) -> None:
        store_ctx = self.check_store(EMPTY_CONTEXT, closure.store)
        self.check_command(store_ctx, closure.command)

    def cut_type(self, closure: Closure) -> SimpleType:
        """Type at which the closure's command cuts; checks it first."""
        store_ctx = self.check_store(EMPTY_CONTEXT, closure.store)
        self.check_command(store_ctx, closure.command)
        return self.infer_term(store_ctx, closure.command.term)

    def check_with_context(self, ctx: TypingContext, node, level: str):
        """Entry point over all nine levels; returns what the level yields."""
        match level:
            case "v":
                return self.infer_strong_value(ctx, node)
            case "V":
                return self.infer_weak_value(ctx, node)
            case "t":
                return self.infer_term(ctx, node)
            case "F":
                return self.infer_forcing(ctx, node)
            case "E":
                return self.infer_catchable(ctx, node)
            case "e":
                return self.infer_eval_context(ctx, node)
            case "c":
                return self.check_command(ctx, node)
            case "tau":
                return self.check_store(ctx, node)
            case "l":
                if ctx.entries:
                    raise TypeCheckError(
                        "l", "closures are checked under the empty context")
                return self.check_closure(node)
        raise ValueError(f"unknown judgment level {level!r}")

    # -- machine support ---------------------------------------------------

    def annotate_closure(self, closure: Closure) -> Closure:
        """Fill in type caches on the top-level store's term bindings.

        Best effort: returns the closure unchanged when it does not
        typecheck.  Lets the machine annotate the frames it builds when
        demanding bindings that were parsed from text.
        """
        try:
            self.check_closure(closure)
        except TypeCheckError:
            return closure
        produced = EMPTY_CONTEXT
        out = []
        for binding in closure.store.bindings:
            if isinstance(binding, TermBind):
                ty = self.infer_term(produced, binding.value)
                out.append(TermBind(binding.name, binding.value, ty))
                produced = produced.extend_term(binding.name, ty)
            else:
                ty = self.infer_catchable(produced, binding.value)
                out.append(binding)
                produced = produced.extend_ctx(binding.name, ty)
        return Closure(closure.command, Store(tuple(out)))
