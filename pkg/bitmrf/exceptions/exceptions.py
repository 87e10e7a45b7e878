from __future__ import annotations

from bitmrf.exceptions.clean_exceptions import UsageError


def show_config_lines(message: str, lines: list[str], error_index: int, window_size: int = 3) -> str:
    """Prefix an error message with the config lines around the faulty one.

    Format example:
          1: # segmentation settings
          2: optimizer = icm
        > 3: beta = abc
          4: seed = 7

        Error at line 3 in config file:
        Could not convert 'abc' to a number for key 'beta'.

    Args:
        message: Error message appended after the lines.
        lines: All lines of the config file.
        error_index: 0-indexed line of the error.
        window_size: Lines shown before and after the faulty one.

    Returns:
        The formatted message.
    """
    start = max(0, error_index - window_size)
    end = min(len(lines), error_index + window_size + 1)
    width = len(str(end))
    shown = [
        f"{'>' if number == error_index + 1 else ' '} {str(number).rjust(width)}: {line}"
        for number, line in enumerate(lines[start:end], start=start + 1)
    ]
    return "\n" + "\n".join(shown) + f"\n\nError at line {error_index + 1} in config file:\n{message}"


class ConfigFormatError(UsageError):
    """A config file line with an unknown key or a value that cannot be converted.

    When the file lines are given, the message shows them around the faulty line, found from
    `error_index` or else from the first line assigning `key`.
    """

    def __init__(
        self,
        message: str = "Something went wrong while reading the config file!",
        lines: list[str] | None = None,
        key: str | None = None,
        error_index: int | None = None,
    ):
        if lines is not None and error_index is None and key is not None:
            try:
                error_index = self.find_error_line(key, lines)
            except ValueError:
                pass
        if lines is not None and error_index is not None:
            message = show_config_lines(message, lines, error_index)
        super().__init__(message)

    @staticmethod
    def find_error_line(key: str, lines: list[str]) -> int:
        """Find the first line assigning a key.

        Args:
            key: Config key, with either '-' or '_' as separator.
            lines: The original config file lines.

        Returns:
            0-indexed line number.

        Raises:
            ValueError: If the line could not be found.
        """
        wanted = key.replace("-", "_").lower()
        for index, line in enumerate(lines):
            name, _, _ = line.partition("=")
            if name.strip().replace("-", "_").lower() == wanted:
                return index
        raise ValueError(f"Could not find the line defining '{key}'.")
