"""Reference model server for the coordination wire protocol."""

__version__ = "0.1.0"
