"""Shared exception hierarchy.

Every error the library raises deliberately derives from ``GerkitError`` so
callers (and the CLI) can distinguish expected failures from bugs.
"""


class GerkitError(Exception):
    """Base class for all errors raised by this package."""
