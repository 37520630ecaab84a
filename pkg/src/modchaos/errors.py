"""Exception hierarchy shared by all modchaos modules."""


class ModChaosError(Exception):
    """Base class for every error raised by this package."""


class HorizonExceeded(ModChaosError, IndexError):
    """A finite sequence was read past its last known symbol."""


class AlphabetMismatch(ModChaosError, ValueError):
    pass


class EmptyBlock(ModChaosError, ValueError):
    pass


class SymbolOutOfRange(ModChaosError, ValueError):
    pass


class DepthExceeded(ModChaosError, ValueError):
    pass


class IncompatibleDescriptors(ModChaosError, TypeError):
    pass


class BudgetExceeded(ModChaosError, RuntimeError):
    """An enumeration would exceed the configured work budget."""


class ModuleMismatch(ModChaosError, ValueError):
    pass


class InvalidOffset(ModChaosError, ValueError):
    pass


class InvalidArgument(ModChaosError, ValueError):
    pass


class PreconditionError(ModChaosError, ValueError):
    pass


class RangesOverlap(ModChaosError, ValueError):
    pass


class WitnessNotFound(ModChaosError, LookupError):
    """A witness search ran out of budget or horizon without success."""
