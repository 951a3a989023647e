"""Exception types shared across the package."""


class CbneedError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(CbneedError):
    """Malformed input text. Carries a 1-based line/column position."""

    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        if line is not None:
            message = f"{line}:{col}: {message}"
        super().__init__(message)


class CategoryError(ParseError):
    """A syntactically valid form appeared in a slot of the wrong category,
    e.g. a (tmu ...) context where only a catchable context is allowed."""


class DuplicateKey(CbneedError):
    """A store would bind the same key twice."""


class KeyNotFound(CbneedError):
    """Lookup or split on a key absent from the store."""


class IncompatibleStores(CbneedError):
    """Union of two stores that disagree on a shared key."""


class NotClosed(CbneedError):
    """Machine operation on a closure with unbound names."""


class TypeCheckError(CbneedError):
    """Failure of one of the nine typing judgments.

    level    -- judgment level, one of v V t F E e c tau l
    subject  -- printed form of the node where the rule failed
    expected/actual -- types involved in a mismatch, when applicable
    name     -- missing or duplicate name, when applicable
    """

    def __init__(self, level, message, subject=None, expected=None,
                 actual=None, name=None):
        self.level = level
        self.subject = subject
        self.expected = expected
        self.actual = actual
        self.name = name
        detail = f"[{level}] {message}"
        if subject is not None:
            detail += f" in {subject}"
        super().__init__(detail)


class DerivationError(CbneedError):
    """Base class for explicit-derivation checking failures."""


class RuleMismatch(DerivationError):
    """Conclusion or premises do not instantiate the named rule."""


class SideConditionViolated(DerivationError):
    """A freshness side condition failed (quantified variable free in the
    context)."""


class ValueRestrictionViolated(DerivationError):
    """A right quantifier rule used at a level other than strong values."""


class LevelViolation(DerivationError):
    """A left quantifier rule used at a level other than e."""


class ArityMismatch(DerivationError):
    """Predicate or function applied to the wrong number of arguments."""


class GenerationFailed(CbneedError):
    """The random generator could not complete within its retry budget."""


class IllTypedPureTerm(CbneedError):
    """A pure lambda term given to the call-by-name tools does not typecheck."""
