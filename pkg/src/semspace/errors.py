"""Exception hierarchy for the semspace engine.

Every engine error derives from SemspaceError so the CLI can map failures
onto its exit-code contract (1 = invariant/model violation, 2 = usage,
3 = scenario parse error).
"""


class SemspaceError(Exception):
    """Base class for all engine errors."""


class UnknownAgentError(SemspaceError):
    """A promise or operation referenced an agent id that does not exist."""


class SelfPromiseError(SemspaceError):
    """An agent attempted to promise to itself."""


class SelfReferenceError(SemspaceError):
    """A promise body named its own promiser in its agent references."""


class DuplicateAliasError(SemspaceError):
    """Two scalar labels would become ambiguous inside one scope."""


class AutonomyViolationError(SemspaceError):
    """Emission of a non-resident child, or absorption of a bound one."""


class TypeMismatchError(SemspaceError):
    """Use-promises of the wrong body type were offered to a saturation check."""


class AlphabetMismatchError(SemspaceError):
    """Bodies over different alphabets compared or translated without a matrix."""


class UntranslatableSymbolError(SemspaceError):
    """A source symbol has no image in the target alphabet."""

    def __init__(self, symbol):
        super().__init__(f"symbol {symbol!r} has no image in the target alphabet")
        self.symbol = symbol


class NotInvertibleError(SemspaceError):
    """A translation matrix has no two-sided inverse."""


class ChainDimensionError(SemspaceError):
    """Translation matrices in a patch chain do not line up dimensionally."""


class ScaleError(SemspaceError):
    """A scale's groups overlap, or a group fails the subspace condition."""


class PartialResolutionError(SemspaceError):
    """Coarse promises could not be resolved for lack of directory entries."""

    def __init__(self, missing_types, promises):
        types = ", ".join(sorted(missing_types))
        super().__init__(f"no directory entry for promise type(s): {types}")
        self.missing_types = frozenset(missing_types)
        self.promises = tuple(promises)


class SizeLimitError(SemspaceError):
    """An operation refused an input above its configured size bound."""


class NoChannelError(SemspaceError):
    """No adjacency channel connects the promiser to the target surface."""


class OpacityError(SemspaceError):
    """Dispatch attempted without a directory and without a gateway."""


class SlotExhaustedError(SemspaceError):
    """A bounded resource offer has no remaining valency slots (strict policy)."""


class IncompleteBindingError(SemspaceError):
    """A tenancy binding is missing one of its five template promises."""


class MultiTenancyError(SemspaceError):
    """Tenant count exceeds valency, or shares exceed the fair-sharing cap."""

    def __init__(self, message, overflow=()):
        super().__init__(message)
        self.overflow = tuple(overflow)


class DuplicateNameError(SemspaceError):
    """Interior agent names collide inside a namespace."""


class NoRouteError(SemspaceError):
    """Message forwarding stalled at an agent with no usable entry."""

    def __init__(self, agent, destination):
        super().__init__(f"no route toward {destination!r} at agent {agent!r}")
        self.agent = agent
        self.destination = destination


class ScenarioParseError(SemspaceError):
    """Syntax or reference error in a scenario file."""

    def __init__(self, line, column, message):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
