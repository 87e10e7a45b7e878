"""Only used to get the version."""

from importlib import metadata


def get_version():
    """Returns the installed bitmrf version."""
    return metadata.version("bitmrf")
