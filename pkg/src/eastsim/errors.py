class DomainError(ValueError):
    """Input outside the domain of a link-model mapping."""


class ConfigError(ValueError):
    """Invalid simulation configuration."""
