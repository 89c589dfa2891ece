"""Cohomological residue forms of polynomial ideals and membership by duality."""

__version__ = "0.1.0"
