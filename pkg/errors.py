"""
Exception hierarchy for superdenom.

Configuration problems (bad family parameters, excluded families, mismatched
weight bases) derive from ConfigurationError and map to CLI exit code 2.
Everything else signals corrupted data or an internal inconsistency.
"""

from __future__ import annotations


class SuperdenomError(Exception):
    """Base class for every error raised by this package."""


class ConfigurationError(SuperdenomError):
    pass


class SpecError(ConfigurationError):
    pass


class UnsupportedFamily(ConfigurationError):
    pass


class DataError(SuperdenomError):
    pass


class AssumptionError(SuperdenomError):
    pass


class SpanError(SuperdenomError):
    pass


class ReflectError(SuperdenomError):
    pass


class TranslationError(SuperdenomError):
    pass


class FrameError(SuperdenomError):
    pass


class DegenerateFactor(SuperdenomError):
    pass


class WindowError(SuperdenomError):
    pass


class ConsistencyError(SuperdenomError):
    pass
