"""AST for a call-by-need sequent-style language with control and stores.

The grammar is stratified into nine categories.  On the program side:
strong values (lambda abstractions and constants), weak values (strong
values and variables), and terms (weak values and mu abstractions, which
capture their evaluation context).  On the context side: forcing contexts
(application frames and co-constants), catchable contexts (forcing
contexts, context variables, and the bracket frame created when a lazily
stored term is demanded), and evaluation contexts (catchable contexts and
tmu binders, which store their term lazily).  A command pairs a term with
an evaluation context; a closure pairs a command with a store; a store is
an ordered list of lazy bindings.

Variables and co-variables live in disjoint namespaces: binding a term
variable `x` never shadows a context variable spelled `x`.

Binders carry simple-type annotations so that type checking is
syntax-directed; the machine never reads them.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import NamedTuple, Union

from .errors import DuplicateKey

# ---------------------------------------------------------------------------
# Simple types

@dataclass(frozen=True)
class Atom:
    name: str

    def __repr__(self):
        return f"Atom({self.name!r})"


@dataclass(frozen=True)
class Arrow:
    dom: "SimpleType"
    cod: "SimpleType"


SimpleType = Union[Atom, Arrow]


def type_str(ty: SimpleType) -> str:
    """Human-readable rendering, right-associated arrows: (X -> Y) -> Z."""
    if isinstance(ty, Atom):
        return ty.name
    dom = type_str(ty.dom)
    if isinstance(ty.dom, Arrow):
        dom = f"({dom})"
    return f"{dom} -> {type_str(ty.cod)}"


# ---------------------------------------------------------------------------
# Terms and contexts

@dataclass(frozen=True)
class Const:
    """Constant; its type comes from the ambient signature and is atomic."""
    name: str


@dataclass(frozen=True)
class Lam:
    binder: str
    annot: SimpleType
    body: "Term"


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Mu:
    """Control abstraction: binds a co-variable over a command."""
    binder: str
    annot: SimpleType
    body: "Command"


@dataclass(frozen=True)
class CoConst:
    """Co-constant; a primitive forcing context typed by the signature."""
    name: str


@dataclass(frozen=True)
class AppFrame:
    """Application frame: argument term pushed on a catchable context."""
    arg: "Term"
    rest: "CatchableContext"


@dataclass(frozen=True)
class CoVar:
    name: str


@dataclass(frozen=True)
class TmuBracket:
    """Frame awaiting the value of a demanded store binding.

    Denotes a context that, when given a value, writes it back for
    `binder`, reinstalls the `suffix` store, and resumes in `forcing`.
    The binder scopes over both `forcing` and `suffix`; suffix keys must
    be distinct from it.
    """
    binder: str
    annot: SimpleType
    forcing: "ForcingContext"
    suffix: "Store"


@dataclass(frozen=True)
class Tmu:
    """Lazy let binder: binds a term variable over a command."""
    binder: str
    annot: SimpleType
    body: "Command"


@dataclass(frozen=True)
class Command:
    term: "Term"
    context: "EvalContext"


@dataclass(frozen=True)
class TermBind:
    """Store binding of a (possibly unevaluated) term to a variable.

    `annot` caches the binding's type for the machine; it is ignored by
    structural equality and never printed.
    """
    name: str
    value: "Term"
    annot: SimpleType | None = field(default=None, compare=False)

    @property
    def key(self):
        return ("var", self.name)


@dataclass(frozen=True)
class CtxBind:
    """Store binding of a saved catchable context to a co-variable."""
    name: str
    value: "CatchableContext"

    @property
    def key(self):
        return ("covar", self.name)


Binding = Union[TermBind, CtxBind]


@dataclass(frozen=True)
class Store:
    """Ordered sequence of bindings with pairwise distinct keys.

    In a closed store every value may reference only keys bound strictly
    earlier in the sequence.
    """
    bindings: tuple[Binding, ...] = ()

    def __post_init__(self):
        seen = set()
        for b in self.bindings:
            if b.key in seen:
                raise DuplicateKey(f"key bound twice in store: {b.name}")
            seen.add(b.key)

    def __len__(self):
        return len(self.bindings)


@dataclass(frozen=True)
class Closure:
    """Machine state: a command paired with its store."""
    command: Command
    store: Store


StrongValue = Union[Lam, Const]
WeakValue = Union[Lam, Const, Var]
Term = Union[Lam, Const, Var, Mu]
ForcingContext = Union[AppFrame, CoConst]
CatchableContext = Union[AppFrame, CoConst, CoVar, TmuBracket]
EvalContext = Union[AppFrame, CoConst, CoVar, TmuBracket, Tmu]

STRONG_VALUES = (Lam, Const)
WEAK_VALUES = (Lam, Const, Var)
TERMS = (Lam, Const, Var, Mu)
FORCING_CONTEXTS = (AppFrame, CoConst)
CATCHABLE_CONTEXTS = (AppFrame, CoConst, CoVar, TmuBracket)
EVAL_CONTEXTS = (AppFrame, CoConst, CoVar, TmuBracket, Tmu)

EMPTY_STORE = Store()

_CATEGORY = {
    Lam: "v", Const: "v",
    Var: "V",
    Mu: "t",
    AppFrame: "F", CoConst: "F",
    CoVar: "E", TmuBracket: "E",
    Tmu: "e",
    Command: "c",
    Closure: "l",
    Store: "tau",
}


def category(node) -> str:
    """Lowest syntactic category of a node, as a judgment-level letter."""
    return _CATEGORY[type(node)]


# ---------------------------------------------------------------------------
# Fresh names

FRESH_MARK = "#"


def strip_fresh(name: str) -> str:
    stem, _, idx = name.partition(FRESH_MARK)
    return stem if idx.isdigit() else name


class FreshSupply:
    """Monotone counter for machine-generated names.

    Emitted names carry a `#n` suffix, a lexical shape reserved for this
    supply, so a supply seeded past every index already present in a
    closure can never collide with it.
    """

    def __init__(self, start: int = 0):
        self.counter = start

    def fresh(self, base: str) -> str:
        name = f"{strip_fresh(base)}{FRESH_MARK}{self.counter}"
        self.counter += 1
        return name

    def advance_past(self, node) -> "FreshSupply":
        """Bump the counter above every fresh-name index in `node`."""
        for name in iter_names(node):
            stem, _, idx = name.partition(FRESH_MARK)
            if idx.isdigit():
                self.counter = max(self.counter, int(idx) + 1)
        return self


def iter_names(node):
    """Yield every variable, co-variable, binder, and store key in `node`."""
    match node:
        case Var(x) | CoVar(x) | Const(x) | CoConst(x):
            yield x
        case Lam(x, _, b) | Mu(x, _, b) | Tmu(x, _, b):
            yield x
            yield from iter_names(b)
        case AppFrame(t, e):
            yield from iter_names(t)
            yield from iter_names(e)
        case TmuBracket(x, _, f, s):
            yield x
            yield from iter_names(f)
            yield from iter_names(s)
        case Command(t, e):
            yield from iter_names(t)
            yield from iter_names(e)
        case Closure(c, s):
            yield from iter_names(c)
            yield from iter_names(s)
        case Store(bindings):
            for b in bindings:
                yield b.name
                yield from iter_names(b.value)


# ---------------------------------------------------------------------------
# Free variables

class FreeVars(NamedTuple):
    vars: frozenset[str]
    covars: frozenset[str]

    def __or__(self, other):
        return FreeVars(self.vars | other.vars, self.covars | other.covars)


NO_FREE = FreeVars(frozenset(), frozenset())


def store_keys(store: Store) -> tuple[frozenset[str], frozenset[str]]:
    """Bound keys of a store, split by namespace: (term keys, context keys)."""
    kv, kc = set(), set()
    for b in store.bindings:
        (kv if isinstance(b, TermBind) else kc).add(b.name)
    return frozenset(kv), frozenset(kc)


def free_vars(node) -> FreeVars:
    """Unbound names of any syntactic category, split by namespace.

    Store clauses treat each key as binding all later values: a name is
    free in a store when some binding mentions it without a preceding
    binding for it.  A key never binds its own value, so self-referential
    bindings are not closed.
    """
    match node:
        case Var(x):
            return FreeVars(frozenset((x,)), frozenset())
        case CoVar(a):
            return FreeVars(frozenset(), frozenset((a,)))
        case Const(_) | CoConst(_):
            return NO_FREE
        case Lam(x, _, b) | Tmu(x, _, b):
            fv = free_vars(b)
            return FreeVars(fv.vars - {x}, fv.covars)
        case Mu(a, _, b):
            fv = free_vars(b)
            return FreeVars(fv.vars, fv.covars - {a})
        case AppFrame(t, e):
            return free_vars(t) | free_vars(e)
        case TmuBracket(x, _, f, suffix):
            kv, kc = store_keys(suffix)
            ff = free_vars(f)
            fv = free_vars(suffix) | FreeVars(ff.vars - kv, ff.covars - kc)
            return FreeVars(fv.vars - {x}, fv.covars)
        case Command(t, e):
            return free_vars(t) | free_vars(e)
        case Closure(c, s):
            kv, kc = store_keys(s)
            fc = free_vars(c)
            return free_vars(s) | FreeVars(fc.vars - kv, fc.covars - kc)
        case Store(bindings):
            out_v, out_c = set(), set()
            seen_v, seen_c = set(), set()
            for b in bindings:
                bv = free_vars(b.value)
                out_v |= bv.vars - seen_v
                out_c |= bv.covars - seen_c
                (seen_v if isinstance(b, TermBind) else seen_c).add(b.name)
            return FreeVars(frozenset(out_v), frozenset(out_c))
    raise TypeError(f"not a syntax node: {node!r}")


def is_closed_in(node, store: Store) -> bool:
    """True when `store` is closed and binds every free name of `node`."""
    if free_vars(store) != NO_FREE:
        return False
    kv, kc = store_keys(store)
    fv = free_vars(node)
    return fv.vars <= kv and fv.covars <= kc


# ---------------------------------------------------------------------------
# Renaming

def rename_free_var(node, old: str, new: str):
    """Rewrite free occurrences of term variable `old` to `new`.

    Occurrences under a binder or store key for `old` are left alone.
    `new` is assumed fresh for `node` (no capture check).
    """
    match node:
        case Var(x):
            return Var(new) if x == old else node
        case Const(_) | CoConst(_) | CoVar(_):
            return node
        case Lam(x, a, b):
            return node if x == old else Lam(x, a, rename_free_var(b, old, new))
        case Tmu(x, a, b):
            return node if x == old else Tmu(x, a, rename_free_var(b, old, new))
        case Mu(al, a, b):
            return Mu(al, a, rename_free_var(b, old, new))
        case AppFrame(t, e):
            return AppFrame(rename_free_var(t, old, new),
                            rename_free_var(e, old, new))
        case TmuBracket(x, a, f, suffix):
            if x == old:
                return node
            suffix, shadowed = _rename_in_store(suffix, old, new, True)
            if not shadowed:
                f = rename_free_var(f, old, new)
            return TmuBracket(x, a, f, suffix)
        case Command(t, e):
            return Command(rename_free_var(t, old, new),
                           rename_free_var(e, old, new))
        case Closure(c, s):
            s, shadowed = _rename_in_store(s, old, new, True)
            if not shadowed:
                c = rename_free_var(c, old, new)
            return Closure(c, s)
        case Store(_):
            return _rename_in_store(node, old, new, True)[0]
    raise TypeError(f"not a syntax node: {node!r}")


def rename_free_covar(node, old: str, new: str):
    """Rewrite free occurrences of co-variable `old` to `new`."""
    match node:
        case CoVar(a):
            return CoVar(new) if a == old else node
        case Const(_) | CoConst(_) | Var(_):
            return node
        case Mu(al, a, b):
            return node if al == old else Mu(al, a, rename_free_covar(b, old, new))
        case Lam(x, a, b):
            return Lam(x, a, rename_free_covar(b, old, new))
        case Tmu(x, a, b):
            return Tmu(x, a, rename_free_covar(b, old, new))
        case AppFrame(t, e):
            return AppFrame(rename_free_covar(t, old, new),
                            rename_free_covar(e, old, new))
        case TmuBracket(x, a, f, suffix):
            suffix, shadowed = _rename_in_store(suffix, old, new, False)
            if not shadowed:
                f = rename_free_covar(f, old, new)
            return TmuBracket(x, a, f, suffix)
        case Command(t, e):
            return Command(rename_free_covar(t, old, new),
                           rename_free_covar(e, old, new))
        case Closure(c, s):
            s, shadowed = _rename_in_store(s, old, new, False)
            if not shadowed:
                c = rename_free_covar(c, old, new)
            return Closure(c, s)
        case Store(_):
            return _rename_in_store(node, old, new, False)[0]
    raise TypeError(f"not a syntax node: {node!r}")


def _rename_in_store(store: Store, old, new, is_var: bool):
    """Rename `old` in store values until a key rebinds it.

    Returns the renamed store and whether `old` ended up shadowed, which
    tells the caller whether anything after the store still sees it.
    """
    rename = rename_free_var if is_var else rename_free_covar
    kind = TermBind if is_var else CtxBind
    out = []
    shadowed = False
    for b in store.bindings:
        if shadowed:
            out.append(b)
        elif isinstance(b, TermBind):
            out.append(TermBind(b.name, rename(b.value, old, new), b.annot))
        else:
            out.append(CtxBind(b.name, rename(b.value, old, new)))
        if isinstance(b, kind) and b.name == old:
            shadowed = True
    return Store(tuple(out)), shadowed


def rename_binder(node, supply: FreshSupply):
    """Replace the top binder of `node` with a fresh name.

    The result is alpha-equivalent to the input.  For the bracket frame
    the binder is rewritten in both the forcing context and the suffix
    store, the two positions it scopes over.
    """
    match node:
        case Lam(x, a, b):
            x2 = supply.fresh(x)
            return Lam(x2, a, rename_free_var(b, x, x2))
        case Mu(al, a, b):
            a2 = supply.fresh(al)
            return Mu(a2, a, rename_free_covar(b, al, a2))
        case Tmu(x, a, b):
            x2 = supply.fresh(x)
            return Tmu(x2, a, rename_free_var(b, x, x2))
        case TmuBracket(x, a, f, suffix):
            x2 = supply.fresh(x)
            return TmuBracket(x2, a,
                              rename_free_var(f, x, x2),
                              rename_free_var(suffix, x, x2))
    raise TypeError(f"no top binder: {node!r}")


# ---------------------------------------------------------------------------
# Alpha equivalence

def alpha_normalize(node):
    """Canonical form with binders and store keys renamed to _0, _1, ...

    Two nodes are alpha-equivalent exactly when their canonical forms are
    structurally equal.  Free names are untouched; annotations are kept
    as written.
    """
    counter = [0]
    return _canon(node, {}, {}, counter)


def alpha_eq(a, b) -> bool:
    return alpha_normalize(a) == alpha_normalize(b)


def _canon_name(counter):
    counter[0] += 1
    return f"_{counter[0] - 1}"


def _canon(node, env_v, env_c, counter):
    match node:
        case Var(x):
            return Var(env_v.get(x, x))
        case CoVar(a):
            return CoVar(env_c.get(a, a))
        case Const(_) | CoConst(_):
            return node
        case Lam(x, a, b):
            x2 = _canon_name(counter)
            return Lam(x2, a, _canon(b, {**env_v, x: x2}, env_c, counter))
        case Tmu(x, a, b):
            x2 = _canon_name(counter)
            return Tmu(x2, a, _canon(b, {**env_v, x: x2}, env_c, counter))
        case Mu(al, a, b):
            a2 = _canon_name(counter)
            return Mu(a2, a, _canon(b, env_v, {**env_c, al: a2}, counter))
        case AppFrame(t, e):
            return AppFrame(_canon(t, env_v, env_c, counter),
                            _canon(e, env_v, env_c, counter))
        case TmuBracket(x, a, f, suffix):
            x2 = _canon_name(counter)
            env_v = {**env_v, x: x2}
            suffix, env_v, env_c = _canon_store(suffix, env_v, env_c, counter)
            return TmuBracket(x2, a, _canon(f, env_v, env_c, counter), suffix)
        case Command(t, e):
            return Command(_canon(t, env_v, env_c, counter),
                           _canon(e, env_v, env_c, counter))
        case Closure(c, s):
            s, env_v, env_c = _canon_store(s, env_v, env_c, counter)
            return Closure(_canon(c, env_v, env_c, counter), s)
        case Store(_):
            return _canon_store(node, env_v, env_c, counter)[0]
    raise TypeError(f"not a syntax node: {node!r}")


def _canon_store(store, env_v, env_c, counter):
    out = []
    for b in store.bindings:
        value = _canon(b.value, env_v, env_c, counter)
        k2 = _canon_name(counter)
        if isinstance(b, TermBind):
            env_v = {**env_v, b.name: k2}
            out.append(TermBind(k2, value))
        else:
            env_c = {**env_c, b.name: k2}
            out.append(CtxBind(k2, value))
    return Store(tuple(out)), env_v, env_c
