"""Clinical temporal information extraction: events, temporal expressions, temporal links."""

__version__ = "0.1.0"
