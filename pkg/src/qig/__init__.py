"""Symbolic derivation of quantum isometry groups of finitely presented groups."""

__version__ = "0.1.0"
