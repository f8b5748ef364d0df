from enum import Enum


class QuasistaticError(Exception):
    """Base exception for every error raised by the quasistatic package."""
    pass


class SolutionMode(str, Enum):
    """Solution concepts and steppers of the zero-dimensional example."""
    WEAK = 'weak'
    STRONG = 'strong'
    EXTENDED = 'extended'
    GLOBAL = 'global'
    LOCAL = 'local'

    def __str__(self) -> str:
        """Return the value when converting to string."""
        return self.value


class Suite(str, Enum):
    """Estimate suites runnable through ``verify``."""
    COERCIVITY = 'coercivity'
    TIME = 'time'
    SPACE = 'space'
    SOBOLEV = 'sobolev'
    HOLDER = 'holder'
    UNIQUENESS = 'uniqueness'
    ALL = 'all'

    def __str__(self) -> str:
        """Return the value when converting to string."""
        return self.value

    @classmethod
    def expand(cls, suite: 'Suite') -> list:
        """Resolve ``all`` into the concrete suites, in a fixed order."""
        if suite == cls.ALL:
            return [s for s in cls if s != cls.ALL]
        return [suite]
