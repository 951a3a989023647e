"""Store algebra: domains, compatibility, extension, union, splitting.

Stores are persistent; every operation returns a new store and leaves its
arguments untouched.  A key is a `(kind, name)` pair with kind "var" or
"covar", so a term variable and a co-variable spelled alike never clash.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DuplicateKey, IncompatibleStores, KeyNotFound
from .syntax import Binding, CtxBind, Store, TermBind, alpha_eq

Key = tuple[str, str]


def var_key(name: str) -> Key:
    return ("var", name)


def covar_key(name: str) -> Key:
    return ("covar", name)


@dataclass(frozen=True)
class SplitView:
    """Decomposition of a store around one binding.

    prefix ++ [binding] ++ suffix reassembles the original store.
    """
    prefix: Store
    binding: Binding
    suffix: Store

    @property
    def key(self) -> Key:
        return self.binding.key

    @property
    def value(self):
        return self.binding.value

    def reassemble(self) -> Store:
        return Store(self.prefix.bindings + (self.binding,)
                     + self.suffix.bindings)


def domain(store: Store) -> set[Key]:
    """Set of all bound keys."""
    return {b.key for b in store.bindings}


def independent(left: Store, right: Store) -> bool:
    """True when the two stores bind disjoint sets of keys."""
    return not (domain(left) & domain(right))


def compatible(left: Store, right: Store) -> bool:
    """True when every key bound by both stores maps to the same value.

    Values are compared up to alpha-equivalence, so machine-freshened
    copies of one binding still count as coinciding.
    """
    rmap = {b.key: b for b in right.bindings}
    for b in left.bindings:
        other = rmap.get(b.key)
        if other is not None and not alpha_eq(b.value, other.value):
            return False
    return True


def extends(small: Store, big: Store) -> bool:
    """True when `big` binds everything `small` does, compatibly."""
    return domain(small) <= domain(big) and compatible(small, big)


def lookup(store: Store, key: Key):
    """Binding for `key`, or None."""
    for b in store.bindings:
        if b.key == key:
            return b
    return None


def split_at(store: Store, key) -> SplitView:
    """Split the store around `key`.

    `key` may be a (kind, name) pair or a bare name; a bare name must be
    unambiguous between the two namespaces.
    """
    if isinstance(key, str):
        hits = [b.key for b in store.bindings if b.name == key]
        if len(hits) > 1:
            raise KeyNotFound(f"name {key!r} bound in both namespaces; "
                              f"pass a (kind, name) key")
        if not hits:
            raise KeyNotFound(f"key not in store: {key!r}")
        key = hits[0]
    for i, b in enumerate(store.bindings):
        if b.key == key:
            return SplitView(Store(store.bindings[:i]), b,
                             Store(store.bindings[i + 1:]))
    raise KeyNotFound(f"key not in store: {key!r}")


def append(store: Store, binding: Binding) -> Store:
    """Extend on the right with one binding; the key must be new."""
    if lookup(store, binding.key) is not None:
        raise DuplicateKey(f"key already bound: {binding.name}")
    return Store(store.bindings + (binding,))


def concat(left: Store, right: Store) -> Store:
    """Append all bindings of `right` after `left`."""
    return Store(left.bindings + right.bindings)


def union(left: Store, right: Store) -> Store:
    """Compatible union of two closed stores.

    Shared keys are resolved left to right in the order they occur in
    `left`, keeping the left value; between two shared keys the pending
    independent segments of both stores are emitted, left segment first.
    Shared keys must occur in the same relative order in both stores.

    Raises IncompatibleStores when a shared key carries conflicting
    values; behaviour on open stores is unspecified.
    """
    if not compatible(left, right):
        raise IncompatibleStores("stores disagree on a shared key")
    out: list[Binding] = []
    lb, rb = list(left.bindings), list(right.bindings)
    while True:
        shared = None
        for i, b in enumerate(lb):
            j = next((j for j, rbind in enumerate(rb) if rbind.key == b.key),
                     None)
            if j is not None:
                shared = (i, j, b)
                break
        if shared is None:
            break
        i, j, b = shared
        out.extend(lb[:i])
        out.extend(rb[:j])
        out.append(b)
        lb, rb = lb[i + 1:], rb[j + 1:]
    out.extend(lb)
    out.extend(rb)
    try:
        return Store(tuple(out))
    except DuplicateKey as exc:
        raise IncompatibleStores(
            f"shared keys occur in different orders: {exc}") from exc
