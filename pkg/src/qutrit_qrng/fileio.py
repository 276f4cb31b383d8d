#!/usr/bin/env python3
"""Output files for qutrit-qrng: path checks, overwrite confirmation and atomic writes."""

import logging
import os
import sys
import tempfile
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import BinaryIO, Optional, cast

try:
    import questionary

    HAS_QUESTIONARY = True
except ImportError:
    HAS_QUESTIONARY = False

from .base import ConfigError, env_flag

logger = logging.getLogger(__name__)


def ask_confirmation(message: str, default: bool = False) -> bool:
    """Ask for user confirmation with questionary if available, otherwise input().

    Args:
        message: The question to ask
        default: Default answer (True for yes, False for no)

    Returns:
        Boolean answer from user
    """
    if HAS_QUESTIONARY:
        return cast(bool, questionary.confirm(message, default=default).ask())
    # Fallback to input()
    default_str = "Y/n" if default else "y/N"
    response = input(f"{message} [{default_str}]: ")
    if not response:  # User pressed enter without typing
        return default
    return response.lower() in ["y", "yes"]


def require_input(path: Path) -> Path:
    """Validate that an input file exists and is a regular file."""
    if not path.exists():
        raise ConfigError(f"Input file not found: {path}")
    if not path.is_file():
        raise ConfigError(f"Input is not a regular file: {path}")
    return path


def require_output(path: Path) -> Path:
    """Validate that an output path can be created."""
    parent = path.parent
    if not parent.is_dir():
        raise ConfigError(f"Output directory does not exist: {parent}")
    if path.exists() and path.is_dir():
        raise ConfigError(f"Output path is a directory: {path}")
    return path


def confirm_overwrite(path: Path, assume_yes: bool = False) -> bool:
    """
    Decide whether an output path may be written.

    New paths are always writable. Existing ones need --yes, QRNG_ASSUME_YES, or an
    interactive confirmation; without a terminal the answer is no.
    """
    if not path.exists():
        return True
    if assume_yes or env_flag("QRNG_ASSUME_YES"):
        logger.debug(f"Overwriting {path} without asking")
        return True
    if not sys.stdin.isatty():
        logger.warning(f"{path} exists and stdin is not a terminal; not overwriting")
        return False
    return ask_confirmation(f"{path} exists. Overwrite?", default=False)


@contextmanager
def atomic_output(path: Path) -> Iterator[BinaryIO]:
    """Open a temporary file next to path and move it into place on success.

    Args:
        path: Final destination

    Yields:
        Binary file handle for the temporary file

    Raises:
        Exception: If writing or the final rename fails (the temporary file is removed)
    """
    # Same directory keeps the rename on one filesystem
    fd, temp_path = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.tmp.")
    try:
        with os.fdopen(fd, "wb") as fh:
            yield fh
        # Atomic replace (POSIX guarantees atomicity)
        Path(temp_path).replace(path)
        logger.debug(f"Wrote {path}")
    except BaseException:
        try:
            Path(temp_path).unlink()
        except OSError:
            pass
        raise


def write_text_atomic(path: Path, content: str) -> None:
    with atomic_output(path) as fh:
        fh.write(content.encode("utf-8"))


def sidecar_path(path: Path, suffix: str = ".json") -> Path:
    """Path of the metadata file written next to a stream file."""
    return path.with_name(path.name + suffix)


def describe_output(path: Optional[Path]) -> str:
    return str(path) if path is not None else "<stdout>"
