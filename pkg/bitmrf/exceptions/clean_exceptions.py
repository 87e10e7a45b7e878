"""Exceptions that don't need the config reader, kept apart to avoid circular imports with read_config.py"""


class BitMrfError(Exception):
    """Custom error for bitmrf, raised when the input data or parameters make a run impossible.

    This error is caught in main, which aborts with the error's exit code.
    Data errors (unreadable images, mismatching dimensions, empty datasets) exit with code 2.
    """

    exit_code: int = 2


class UsageError(BitMrfError):
    """Error in how the program was called, e.g. an invalid option value. Exits with code 1."""

    exit_code: int = 1
