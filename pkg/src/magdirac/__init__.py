"""Dirac operators on the 3-sphere with magnetic fields supported on links."""

__version__ = "0.1.0"
