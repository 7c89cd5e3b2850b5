"""Bethe vectors of the Gaudin model and the Wronski map, checked at desk scale."""

__version__ = "0.1.0"
