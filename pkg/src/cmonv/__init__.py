"""Exact-arithmetic verification of commutative-monoid model-structure axioms
for non-negatively graded chain complexes over Q and small prime fields."""

__version__ = "0.1.0"
