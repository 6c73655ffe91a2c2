"""Deductive synthesis workbench: non-clausal inference over a formula
database, answer extraction into controller circuits, recorded-proof
replay, and closed-loop validation against a production-cell plant model."""

__version__ = "0.1.0"
