"""Exact construction of simple graded spaces with operators and checks of their structure."""

__version__ = "0.1.0"
