"""synthesis of strongest conjunctive specifications over bounded domains."""

__version__ = "0.1.0"
