"""Jet-based tensor calculus and numerical checks of projective/conformal Weyl coincidence."""

__version__ = "0.1.0"
