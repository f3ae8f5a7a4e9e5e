"""Feature profiles of human-written summaries and extractive summaries of repository activity.

A corpus of human summaries becomes a target profile over a fixed 27-feature
vector. Summaries are sentence subsets drawn from a time window of software
artefacts, searched for the closest match to that profile.
"""

__version__ = "0.1.0"


class HlsumError(Exception):
    """Base class for data and runtime errors raised by this package."""


class LoadError(HlsumError):
    """An input file could not be parsed; the message names the offending row."""
