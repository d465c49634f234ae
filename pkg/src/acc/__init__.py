"""Automated colony counting for clonogenic assay images."""

__version__ = "0.1.0"
