"""Reconstruct, classify and cross-verify Euler's elastica."""

__version__ = "0.1.0"
