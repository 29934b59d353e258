"""Information-gain driven 20-questions over synthetic shape scenes."""

__version__ = "0.1.0"
