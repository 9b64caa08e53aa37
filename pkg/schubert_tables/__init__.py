"""
Schubert Tables
===============

Exakte Schubert-Rechnung auf verallgemeinerten Graßmann-Mannigfaltigkeiten G/H:
Nebenklassen, Euler-Matrizen, additive Kohomologie, Ringtabellen und
Strukturmatrizen, berechnet aus Cartan-Matrizen und gegen Fixtures geprüft.
"""

__all__ = [
    "constants",
    "config",
    "logging_utils",
    "weyl",
    "intlat",
    "localization",
    "schubert",
    "fixtures",
    "pipeline",
    "report",
    "cli",
]
