from fibrostage.core.errors import ConfigError, FibrostageError

__all__ = ["ConfigError", "FibrostageError"]
