"""Logging for bitmrf, and the debug archive written when a run fails unexpectedly."""

from __future__ import annotations

import json
import logging
import random
import socket
import string
import sys
import time
import traceback
from collections.abc import Callable
from functools import wraps
from pathlib import Path
from typing import Any, TextIO
from zipfile import ZIP_DEFLATED, ZipFile

from bitmrf.exceptions.clean_exceptions import BitMrfError
from bitmrf.get_version import get_version

_FORMAT = "%(levelname)s:%(name)s:%(message)s"


def _stream_handler(stream: TextIO, keep: Callable[[logging.LogRecord], bool]) -> logging.Handler:
    handler = logging.StreamHandler(stream)
    handler.addFilter(keep)
    handler.setFormatter(logging.Formatter(_FORMAT))
    return handler


def get_logger(module_name: str = "bitmrf") -> logging.Logger:
    """Logger writing errors to stderr and everything below ERROR to stdout.

    Args:
        module_name: The name for logger.
    """
    logger_ = logging.getLogger(module_name)
    logger_.addHandler(_stream_handler(sys.stdout, lambda record: record.levelno < logging.ERROR))
    logger_.addHandler(_stream_handler(sys.stderr, lambda record: record.levelno >= logging.ERROR))
    return logger_


logger = get_logger(__name__)


def handle_error_messages(func):
    """Decorator turning unexpected failures into a logged error, a debug archive and exit code 1.

    BitMrfError and its subclasses pass through, main turns them into exit codes.
    A SystemExit with a zero or empty code passes through as well; one with a failing code
    also gets an archive and keeps its code. See `dump_debug_information` for the archive.
    """

    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except BitMrfError:
            raise
        except SystemExit as ex:
            if not ex.code:
                raise
            dump_debug_information(**kwargs)
            sys.exit(ex.code)
        except Exception as ex:
            logger.error(ex)
            dump_debug_information(**kwargs)
            sys.exit(1)

    return wrapper


def _jsonable(value: Any) -> Any:
    if isinstance(value, Path):
        return str(value)
    if value is None or isinstance(value, (str, int, float, bool)):
        return value
    return repr(value)


def _archive_name() -> str:
    """bitmrf-<yyyymmdd>-<hhmmss>-<letter><5 digits>, the suffix drawn at random."""
    suffix = random.choice(string.ascii_letters) + "".join(random.choices(string.digits, k=5))
    return f"bitmrf-{time.strftime('%Y%m%d-%H%M%S', time.localtime())}-{suffix}"


def dump_debug_information(**kwargs) -> Path:
    """Write `<name>.zip` to the working directory, holding one folder `<name>` with
    traceback.txt, machine.txt, version.txt and arguments.json (the keyword arguments of the failed call).

    Returns:
        Path of the archive.
    """
    name = _archive_name()
    logger.error(
        "bitmrf failed. Writing debugging information to %s.zip. "
        "Please include said file when reporting the issue.\n"
        "NOTE: the file includes all arguments you gave to bitmrf",
        name,
    )
    trace = traceback.format_exc()
    logger.debug(trace)

    contents = {
        "traceback.txt": trace,
        "machine.txt": socket.getfqdn(),
        "version.txt": get_version(),
        "arguments.json": json.dumps({key: _jsonable(value) for key, value in kwargs.items()}, indent=4),
    }
    archive = Path(f"{name}.zip")
    with ZipFile(archive, mode="x", compression=ZIP_DEFLATED) as zipfile:
        for file_name, text in contents.items():
            zipfile.writestr(f"{name}/{file_name}", text.encode("UTF-8"))
    return archive
