"""Boundary triplets, boundary relations and canonical systems in finite dimensions."""

__version__ = "0.1.0"
