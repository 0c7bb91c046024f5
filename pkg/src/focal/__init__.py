"""focal: a proof checker for dependent type theory with commuting focuses."""

__version__ = "0.1.0"
