"""Exact values and certified bounds for k-page book crossing numbers of K_n."""

__version__ = "0.1.0"
