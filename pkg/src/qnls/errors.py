"""Error types shared across modules and mapped to CLI exit codes."""


class ConfigError(ValueError):
    """Invalid or inconsistent configuration (CLI exit code 4)."""


class BudgetError(RuntimeError):
    """An enumeration or size guard tripped (CLI exit code 3)."""
