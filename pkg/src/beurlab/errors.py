"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class BudgetError(RuntimeError):
    """A configured evaluation/memory budget would be exceeded."""


class PoleError(DomainError):
    """Evaluation requested exactly at a pole or a zero of a logarithm."""


class MissingArtifactError(FileNotFoundError):
    """A pipeline stage needs an artifact another subcommand must produce first."""


class ConfigError(ValueError):
    """Malformed or inconsistent experiment configuration."""
