"""Exception hierarchy shared by the engine and the CLI."""


class TreeMonoError(Exception):
    """Base class for all errors raised by treemono."""


class ConfigError(TreeMonoError, ValueError):
    """Invalid user-supplied configuration (degree, exponent, model file...)."""


class RootHasNoParent(TreeMonoError, ValueError):
    pass


class NoEdgeAtRoot(TreeMonoError, ValueError):
    pass


class WrongDegree(ConfigError):
    pass


class NonIntegralPower(ConfigError):
    """A non-integer exponent was requested in exact mode."""


class UnsupportedPower(ConfigError):
    pass


class FamilyMismatch(ConfigError):
    """An oracle family was compared against a model it does not describe."""


class HarmonicityError(TreeMonoError, ValueError):
    """Values that violate the neighbour-average constraint."""


class SplitterSumError(HarmonicityError):
    """A splitter produced children whose sum is not d*u - u_parent."""

    def __init__(self, level, value, parent_value, children, expected):
        self.level = level
        self.value = value
        self.parent_value = parent_value
        self.children = tuple(children)
        self.expected = expected
        super().__init__(
            f"children of level-{level} class (u={value}, u_parent={parent_value}) "
            f"sum to {sum(self.children)}, expected {expected}"
        )


class ClassNotInTable(TreeMonoError, KeyError):
    pass


class DepthInsufficient(TreeMonoError, ValueError):
    pass
