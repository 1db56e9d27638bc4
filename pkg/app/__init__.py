"""Least squares subdivision toolkit: records, configuration, CLI and HTTP API."""

__version__ = "1.0.0"
