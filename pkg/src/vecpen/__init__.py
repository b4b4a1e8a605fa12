"""Henig-proper efficiency and vectorial penalisation on sampled instances."""

__version__ = "0.1.0"
