"""Exact computer algebra for Saito primitive forms of Gepner singularities."""

__version__ = "0.1.0"
