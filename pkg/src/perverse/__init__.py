"""Exact-arithmetic Hochschild cohomology for perverse differential graded algebras."""

__version__ = "0.1.0"
