"""Topological data analysis: VR persistence and its applications."""

__version__ = "0.1.0"
