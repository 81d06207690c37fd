"""Warped-product model spaces, glued potentials, band-width bounds and
discrete mu-bubbles."""

__version__ = "0.1.0"
