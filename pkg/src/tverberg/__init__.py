"""Exact computational checks of k-wise Tverberg bounds on rayed point configurations."""

__version__ = "0.1.0"
