"""Dynamic weighted set cover and dominating set maintenance."""

__version__ = "1.0.0"
