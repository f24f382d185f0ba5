"""Block diagonal matching fields: quadratic Groebner bases and SAGBI certificates."""

__version__ = "0.1.0"
