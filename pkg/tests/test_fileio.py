#!/usr/bin/env python3
"""Unit tests for output-file handling."""

import os
from pathlib import Path
from unittest.mock import MagicMock, patch

import pytest

from qutrit_qrng.base import ConfigError
from qutrit_qrng.fileio import (
    ask_confirmation,
    atomic_output,
    confirm_overwrite,
    require_input,
    require_output,
    sidecar_path,
    write_text_atomic,
)

pytestmark = pytest.mark.unit


class TestAskConfirmation:
    """Test the confirmation prompt."""

    @patch("qutrit_qrng.fileio.HAS_QUESTIONARY", False)
    @patch("builtins.input", return_value="")
    def test_input_fallback_default(self, mock_input: MagicMock) -> None:
        """Test an empty answer returns the default."""
        assert ask_confirmation("Overwrite?", default=True) is True
        mock_input.assert_called_once_with("Overwrite? [Y/n]: ")

    @patch("qutrit_qrng.fileio.HAS_QUESTIONARY", False)
    @patch("builtins.input", return_value="yes")
    def test_input_fallback_yes(self, mock_input: MagicMock) -> None:
        """Test 'yes' confirms."""
        assert ask_confirmation("Overwrite?") is True

    @patch("qutrit_qrng.fileio.HAS_QUESTIONARY", False)
    @patch("builtins.input", return_value="n")
    def test_input_fallback_no(self, mock_input: MagicMock) -> None:
        """Test 'n' declines."""
        assert ask_confirmation("Overwrite?", default=True) is False


class TestPaths:
    """Test path validation."""

    def test_missing_input(self, tmp_path: Path) -> None:
        """Test a missing input file is a ConfigError."""
        with pytest.raises(ConfigError):
            require_input(tmp_path / "absent.qt3")

    def test_directory_input(self, tmp_path: Path) -> None:
        """Test a directory is not an input file."""
        with pytest.raises(ConfigError):
            require_input(tmp_path)

    def test_output_parent_missing(self, tmp_path: Path) -> None:
        """Test outputs need an existing directory."""
        with pytest.raises(ConfigError):
            require_output(tmp_path / "nope" / "out.json")

    def test_output_is_directory(self, tmp_path: Path) -> None:
        """Test a directory is not a valid output."""
        with pytest.raises(ConfigError):
            require_output(tmp_path)

    def test_sidecar(self) -> None:
        """Test the sidecar sits next to the stream file."""
        assert sidecar_path(Path("/data/run.qt3")) == Path("/data/run.qt3.json")


class TestConfirmOverwrite:
    """Test overwrite decisions."""

    def test_new_path(self, tmp_path: Path) -> None:
        """Test new paths are writable."""
        assert confirm_overwrite(tmp_path / "new.bin")

    def test_assume_yes(self, tmp_path: Path) -> None:
        """Test --yes overwrites."""
        target = tmp_path / "old.bin"
        target.write_bytes(b"x")
        assert confirm_overwrite(target, assume_yes=True)

    @patch.dict(os.environ, {"QRNG_ASSUME_YES": "1"})
    def test_env_assume_yes(self, tmp_path: Path) -> None:
        """Test QRNG_ASSUME_YES overwrites."""
        target = tmp_path / "old.bin"
        target.write_bytes(b"x")
        assert confirm_overwrite(target)

    @patch.dict(os.environ, {"QRNG_ASSUME_YES": ""})
    @patch("sys.stdin")
    def test_non_interactive_refuses(self, mock_stdin: MagicMock, tmp_path: Path) -> None:
        """Test existing files are kept without a terminal."""
        mock_stdin.isatty.return_value = False
        target = tmp_path / "old.bin"
        target.write_bytes(b"x")
        assert not confirm_overwrite(target)

    @patch.dict(os.environ, {"QRNG_ASSUME_YES": ""})
    @patch("qutrit_qrng.fileio.ask_confirmation", return_value=True)
    @patch("sys.stdin")
    def test_interactive_asks(
        self, mock_stdin: MagicMock, mock_ask: MagicMock, tmp_path: Path
    ) -> None:
        """Test a terminal user is asked."""
        mock_stdin.isatty.return_value = True
        target = tmp_path / "old.bin"
        target.write_bytes(b"x")
        assert confirm_overwrite(target)
        mock_ask.assert_called_once()


class TestAtomicOutput:
    """Test atomic writes."""

    def test_write(self, tmp_path: Path) -> None:
        """Test content lands at the destination."""
        target = tmp_path / "out.json"
        write_text_atomic(target, "{}\n")
        assert target.read_text() == "{}\n"

    def test_failure_keeps_original(self, tmp_path: Path) -> None:
        """Test a failed write leaves the old file and no temporary files."""
        target = tmp_path / "out.bin"
        target.write_bytes(b"original")
        with pytest.raises(RuntimeError):
            with atomic_output(target) as fh:
                fh.write(b"partial")
                raise RuntimeError("disk full")
        assert target.read_bytes() == b"original"
        assert sorted(p.name for p in tmp_path.iterdir()) == ["out.bin"]
