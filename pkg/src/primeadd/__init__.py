"""Prime-additive numbers: arithmetic kernel, conditional prime searches,
certified constructions and brute-force enumeration."""

__version__ = "0.1.0"
