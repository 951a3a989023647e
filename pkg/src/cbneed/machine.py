"""Deterministic small-step machine over closed closures.

Six rules, dispatched on the shape of the command (and, for lookups, the
store).  Priority falls out of the syntax: a tmu context always wins (Let),
then a mu term (Catch), and the remaining shapes are mutually exclusive.
Binders entering the store (Let, Catch, Restore) are freshened first, so
store keys stay globally unique without scanning.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NotClosed
from .sexpr import print_closure
from .store import append, concat, covar_key, lookup, split_at, var_key
from .syntax import (
    Atom, AppFrame, Closure, Command, CoVar, CtxBind, FreshSupply, Lam, Mu,
    Store, TermBind, Tmu, TmuBracket, Var, WEAK_VALUES, STRONG_VALUES,
    CATCHABLE_CONTEXTS, FORCING_CONTEXTS, Const, free_vars, is_closed_in,
    rename_binder,
)

RULE_NAMES = ("Beta", "Let", "Catch", "LookupAlpha", "LookupX", "Restore")

NORMAL_VALUE_VS_COCONST = "ValueVsCoConst"
NORMAL_CONST_VS_APP = "ConstVsApp"

# Annotation used when a demanded binding was parsed without type
# information; evaluation never reads it.
UNKNOWN_TYPE = Atom("Unknown")


@dataclass(frozen=True)
class Reduced:
    rule: str
    closure: Closure


@dataclass(frozen=True)
class Normal:
    kind: str


@dataclass(frozen=True)
class Stuck:
    reason: str


@dataclass(frozen=True)
class FuelExhausted:
    pass


@dataclass(frozen=True)
class Trace:
    """Record of a run: every post-step closure with the rule that made it."""
    initial: Closure
    steps: tuple[tuple[str, Closure], ...]
    outcome: Normal | Stuck | FuelExhausted

    @property
    def fuel_used(self) -> int:
        return len(self.steps)

    @property
    def final(self) -> Closure:
        return self.steps[-1][1] if self.steps else self.initial

    @property
    def rules(self) -> tuple[str, ...]:
        return tuple(rule for rule, _ in self.steps)


# ---------------------------------------------------------------------------
# Left-hand sides, each testable on its own

def _lhs_beta(closure):
    c = closure.command
    return isinstance(c.term, Lam) and isinstance(c.context, AppFrame)


def _lhs_let(closure):
    return isinstance(closure.command.context, Tmu)


def _lhs_catch(closure):
    c = closure.command
    return isinstance(c.term, Mu) and isinstance(c.context, CATCHABLE_CONTEXTS)


def _lhs_lookup_alpha(closure):
    c = closure.command
    return (isinstance(c.term, WEAK_VALUES)
            and isinstance(c.context, CoVar)
            and lookup(closure.store, covar_key(c.context.name)) is not None)


def _lhs_lookup_x(closure):
    c = closure.command
    return (isinstance(c.term, Var)
            and isinstance(c.context, FORCING_CONTEXTS)
            and lookup(closure.store, var_key(c.term.name)) is not None)


def _lhs_restore(closure):
    c = closure.command
    return (isinstance(c.term, WEAK_VALUES)
            and isinstance(c.context, TmuBracket))


RULE_PATTERNS = {
    "Beta": _lhs_beta,
    "Let": _lhs_let,
    "Catch": _lhs_catch,
    "LookupAlpha": _lhs_lookup_alpha,
    "LookupX": _lhs_lookup_x,
    "Restore": _lhs_restore,
}


def matching_rules(closure: Closure) -> list[str]:
    """Names of every rule whose left-hand side matches, in rule order."""
    return [name for name, pat in RULE_PATTERNS.items() if pat(closure)]


def _require_closed(closure):
    if not is_closed_in(closure.command, closure.store):
        fv = free_vars(closure)
        loose = sorted(fv.vars) + sorted(fv.covars)
        raise NotClosed("closure not closed, unbound: " + ", ".join(loose))


def applicable_rule(closure: Closure) -> str | None:
    """The unique matching rule, or None on a normal form."""
    _require_closed(closure)
    matches = matching_rules(closure)
    if not matches:
        return None
    assert len(matches) == 1, f"rules overlap: {matches}"
    return matches[0]


def _normal_kind(command: Command) -> str:
    if isinstance(command.term, Const) and isinstance(command.context,
                                                      AppFrame):
        return NORMAL_CONST_VS_APP
    assert isinstance(command.term, STRONG_VALUES)
    return NORMAL_VALUE_VS_COCONST


def step(closure: Closure, supply: FreshSupply) -> Reduced | Normal:
    """One machine step, or the normal-form classification."""
    _require_closed(closure)
    cmd, store = closure.command, closure.store
    term, ctx = cmd.term, cmd.context

    if isinstance(ctx, Tmu):
        fresh = rename_binder(ctx, supply)
        new_store = append(store, TermBind(fresh.binder, term, fresh.annot))
        return Reduced("Let", Closure(fresh.body, new_store))

    if isinstance(term, Mu):
        fresh = rename_binder(term, supply)
        new_store = append(store, CtxBind(fresh.binder, ctx))
        return Reduced("Catch", Closure(fresh.body, new_store))

    if isinstance(term, Lam) and isinstance(ctx, AppFrame):
        inner = Command(term.body, ctx.rest)
        new_ctx = Tmu(term.binder, term.annot, inner)
        return Reduced("Beta", Closure(Command(ctx.arg, new_ctx), store))

    if isinstance(term, Var) and isinstance(ctx, FORCING_CONTEXTS):
        view = split_at(store, var_key(term.name))
        annot = view.binding.annot or UNKNOWN_TYPE
        bracket = TmuBracket(term.name, annot, ctx, view.suffix)
        return Reduced("LookupX",
                       Closure(Command(view.value, bracket), view.prefix))

    if isinstance(ctx, CoVar):
        binding = lookup(store, covar_key(ctx.name))
        return Reduced("LookupAlpha",
                       Closure(Command(term, binding.value), store))

    if isinstance(ctx, TmuBracket):
        fresh = rename_binder(ctx, supply)
        new_store = concat(
            append(store, TermBind(fresh.binder, term, fresh.annot)),
            fresh.suffix)
        return Reduced("Restore",
                       Closure(Command(term, fresh.forcing), new_store))

    return Normal(_normal_kind(cmd))


def _all_store_keys(node):
    match node:
        case Store(bindings):
            for b in bindings:
                yield b.key
                yield from _all_store_keys(b.value)
        case TmuBracket(_, _, f, suffix):
            yield from _all_store_keys(f)
            yield from _all_store_keys(suffix)
        case Closure(c, s):
            yield from _all_store_keys(c)
            yield from _all_store_keys(s)
        case Command(t, e):
            yield from _all_store_keys(t)
            yield from _all_store_keys(e)
        case Lam(_, _, b) | Mu(_, _, b) | Tmu(_, _, b):
            yield from _all_store_keys(b)
        case AppFrame(t, e):
            yield from _all_store_keys(t)
            yield from _all_store_keys(e)
        case _:
            return


def run(closure: Closure, fuel: int, supply: FreshSupply | None = None) -> Trace:
    """Iterate `step` until a normal form, a user error, or fuel runs out.

    A closure with unbound names or duplicate store keys yields a Stuck
    outcome instead of stepping; such states never arise mid-run.
    """
    if supply is None:
        supply = FreshSupply().advance_past(closure)
    fv = free_vars(closure)
    if fv.vars or fv.covars:
        loose = sorted(fv.vars) + sorted(fv.covars)
        return Trace(closure, (), Stuck("unbound: " + ", ".join(loose)))
    seen = set()
    for key in _all_store_keys(closure):
        if key in seen:
            return Trace(closure, (),
                         Stuck(f"duplicate store key: {key[1]}"))
        seen.add(key)

    steps = []
    current = closure
    while True:
        result = step(current, supply)
        if isinstance(result, Normal):
            return Trace(closure, tuple(steps), result)
        if len(steps) >= fuel:
            return Trace(closure, tuple(steps), FuelExhausted())
        steps.append((result.rule, result.closure))
        current = result.closure


def format_trace(trace: Trace, show_steps: bool = True) -> str:
    """Line-oriented rendering: STEP lines then one OUTCOME line."""
    lines = []
    if show_steps:
        for i, (rule, closure) in enumerate(trace.steps, start=1):
            lines.append(f"STEP {i} {rule} {print_closure(closure)}")
    match trace.outcome:
        case Normal(kind):
            what = f"Normal {kind}"
        case FuelExhausted():
            what = "FuelExhausted"
        case Stuck(reason):
            what = f"Stuck {reason}"
    lines.append(f"OUTCOME {what} FUEL_USED {trace.fuel_used}")
    return "\n".join(lines)
