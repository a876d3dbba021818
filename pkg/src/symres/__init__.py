"""Resonances of the Laplacian on products of two rank-one symmetric spaces."""

__version__ = "0.1.0"
