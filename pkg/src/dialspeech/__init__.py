"""Toolkit for standardizing dialectal Arabic speech corpora, profiling
them, constructing reproducible benchmark splits, and scoring ASR output."""

__version__ = "0.1.0"
