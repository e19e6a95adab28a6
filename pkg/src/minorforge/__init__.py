"""Excluded-minor search for classes of matroids representable over a partial field."""

__version__ = "0.1.0"
