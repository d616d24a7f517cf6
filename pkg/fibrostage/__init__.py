"""Registration-aided multi-parametric liver MRI toolkit."""

__version__ = "0.1.0"
