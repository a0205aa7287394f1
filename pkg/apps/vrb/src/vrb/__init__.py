"""Viewpoint Retrieval Bench."""

__version__ = "0.3.0"
