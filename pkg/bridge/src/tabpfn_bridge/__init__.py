"""Subprocess bridge exposing TabPFN v2 posteriors over a JSON-lines protocol."""

__version__ = "0.1.0"
