"""Simulator for a three-node entangled optical clock network in curved spacetime."""

__version__ = "1.0.0"
