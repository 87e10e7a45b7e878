from __future__ import annotations

import re
from pathlib import Path
from typing import Any

from bitmrf.constants import Keywords
from bitmrf.exceptions.clean_exceptions import UsageError
from bitmrf.exceptions.exceptions import ConfigFormatError
from bitmrf.logger import logger

_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}


def _normalize_key(key: str) -> str:
    return key.strip().replace("-", "_").lower()


def _is_comment(line: str) -> bool:
    stripped = line.strip()
    return not stripped or stripped.startswith("#") or stripped.startswith("--")


class ReadConfigFile:
    """Class for reading bitmrf config files.

    A config file holds one `key = value` pair per line. Keys are the long command line options, written with
    '_' or '-'. Blank lines and lines starting with '#' or '--' are comments, and anything after a '#' is ignored.
    Values override the built-in defaults and are in turn overridden by options given on the command line.

    Example:
        # segmentation settings
        optimizer = sa
        beta = 0.8
        levels = 1, 3, 5

    Attributes:
        path: The config file.
        lines: Original lines of the file, for error messages.
        values: Parsed values keyed by keyword, only for the keys present in the file.
    """

    def __init__(self, config_file: str | Path):
        """Read and parse a config file.

        Args:
            config_file: Path to the config file.

        Raises:
            UsageError: If the file cannot be read.
            ConfigFormatError: On a malformed line, an unknown key or a value of the wrong type.
        """
        self.path = Path(config_file)
        try:
            self.lines = self.path.read_text(encoding="utf-8").splitlines()
        except FileNotFoundError as e:
            raise UsageError(f"Could not find the config file: '{self.path}'!") from e
        except (OSError, UnicodeDecodeError) as e:
            raise UsageError(f"Could not read the config file '{self.path}': {e}") from e
        self.values: dict[str, Any] = {}
        self.read_values()

    def read_values(self) -> None:
        """Parse every non-comment line into `values`."""
        for index, line in enumerate(self.lines):
            if _is_comment(line):
                continue
            content = line.split("#", 1)[0]
            if "=" not in content:
                raise ConfigFormatError("Expected a line of the form 'key = value'.", self.lines, error_index=index)
            raw_key, _, raw_value = content.partition("=")
            key = _normalize_key(raw_key)
            if key not in Keywords:
                raise ConfigFormatError(
                    f"Unknown key '{raw_key.strip()}'. Legal keys are: {', '.join(Keywords)}.",
                    self.lines,
                    error_index=index,
                )
            if key in self.values:
                logger.warning(
                    "The key '%s' is defined more than once in '%s', the last value is used.", key, self.path
                )
            try:
                self.values[key] = self.convert(key, raw_value.strip())
            except ValueError as e:
                raise ConfigFormatError(f"{e} for key '{key}'.", self.lines, error_index=index) from e
        logger.debug("Read %d settings from '%s'.", len(self.values), self.path)

    @staticmethod
    def convert(key: str, value: str) -> Any:
        """Convert a raw config value to the type of its key.

        Args:
            key: Normalized keyword.
            value: Raw value, without surrounding whitespace.

        Returns:
            bool, int, float, tuple of ints (levels) or str.

        Raises:
            ValueError: If the value cannot be converted.
        """
        value = value.strip("'\"")
        if not value:
            raise ValueError("Missing value")
        if key in Keywords.booleans:
            if value.lower() in _TRUE:
                return True
            if value.lower() in _FALSE:
                return False
            raise ValueError(f"Could not convert '{value}' to a boolean")
        if key in Keywords.integers:
            try:
                return int(value)
            except ValueError:
                raise ValueError(f"Could not convert '{value}' to an integer")
        if key in Keywords.floats:
            try:
                return float(value)
            except ValueError:
                raise ValueError(f"Could not convert '{value}' to a number")
        if key == Keywords.LEVELS:
            try:
                return tuple(int(level) for level in re.split(r"[,\s]+", value) if level)
            except ValueError:
                raise ValueError(f"Could not convert '{value}' to a list of levels")
        return value
