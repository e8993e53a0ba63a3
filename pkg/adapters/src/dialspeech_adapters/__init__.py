"""Batch inference adapters: manifest in, score-interchange rows out."""

__version__ = "0.1.0"


class AdapterError(Exception):
    """Base class for adapter failures."""


class ModelLoadError(AdapterError):
    """A model backend could not be constructed."""


class CanonicalSpecError(AdapterError):
    """Audio violates the canonical 16 kHz mono 16-bit precondition."""
