#!/usr/bin/env python3
"""Ternary/binary stream containers, the 3 -> 2 alphabetic morphism and packed file formats.

Packed ternary file ("QT3\\0"): header then 5 digits per byte, base 243 with the first
digit most significant; the last group is zero-padded. Packed bit file ("QB2\\0"):
header then 8 bits per byte, least significant bit first; the last byte is
zero-padded. Both headers are ``magic (4 bytes) | version (u8) | count (u64 LE)``.
"""

import io
import logging
import struct
from collections.abc import Iterable, Iterator
from types import TracebackType
from typing import BinaryIO, Callable, Optional

import numpy as np
import numpy.typing as npt

from .base import CorruptFile, InvalidDigit

logger = logging.getLogger(__name__)

DigitArray = npt.NDArray[np.uint8]

HEADER = struct.Struct("<4sBQ")
FORMAT_VERSION = 1
TERNARY_MAGIC = b"QT3\x00"
BIT_MAGIC = b"QB2\x00"

TRITS_PER_BYTE = 5
BITS_PER_BYTE = 8
MAX_TERNARY_BYTE = 242
_TRIT_WEIGHTS = np.array([81, 27, 9, 3, 1], dtype=np.int64)

DEFAULT_CHUNK_BYTES = 1 << 16


def _as_digits(values: Iterable[int], alphabet: int) -> DigitArray:
    if isinstance(values, np.ndarray):
        array = values
    else:
        array = np.fromiter((int(v) for v in values), dtype=np.int64)
    if array.ndim != 1:
        raise ValueError("Streams are one-dimensional")
    if array.size and (array.min() < 0 or array.max() >= alphabet):
        raise InvalidDigit(f"Stream contains symbols outside 0..{alphabet - 1}")
    return np.ascontiguousarray(array, dtype=np.uint8)


class _Stream:
    alphabet = 2

    def __init__(self, values: Iterable[int] = ()) -> None:
        self.digits = _as_digits(values, self.alphabet)

    def __len__(self) -> int:
        return int(self.digits.size)

    def __iter__(self) -> Iterator[int]:
        return (int(d) for d in self.digits)

    def __eq__(self, other: object) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return bool(np.array_equal(self.digits, other.digits))  # type: ignore[attr-defined]

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.digits.tobytes()))

    def __repr__(self) -> str:
        preview = "".join(str(int(d)) for d in self.digits[:32])
        suffix = "..." if len(self) > 32 else ""
        return f"{type(self).__name__}({preview}{suffix}, length={len(self)})"

    @property
    def length(self) -> int:
        return len(self)

    def to_string(self) -> str:
        return "".join(str(int(d)) for d in self.digits)


class TernaryStream(_Stream):
    """Digits over {0, 1, 2}."""

    alphabet = 3

    def __add__(self, other: "TernaryStream") -> "TernaryStream":
        return TernaryStream(np.concatenate([self.digits, other.digits]))

    @classmethod
    def from_string(cls, text: str) -> "TernaryStream":
        return cls(int(ch) for ch in text)


class BitStream(_Stream):
    """Bits over {0, 1}."""

    alphabet = 2

    def __add__(self, other: "BitStream") -> "BitStream":
        return BitStream(np.concatenate([self.digits, other.digits]))

    @classmethod
    def from_string(cls, text: str) -> "BitStream":
        return cls(int(ch) for ch in text)

    def prefix(self, length: int) -> "BitStream":
        return BitStream(self.digits[:length])


def morphism_digit(a: int) -> int:
    """Map one ternary digit: 0 -> 0, 1 -> 1, 2 -> 0."""
    if isinstance(a, bool) or a not in (0, 1, 2):
        raise InvalidDigit(f"Not a ternary digit: {a!r}")
    return 1 if a == 1 else 0


def morphism_array(digits: DigitArray) -> DigitArray:
    """Elementwise morphism over a chunk of validated ternary digits."""
    return (digits == 1).astype(np.uint8)


def morphism_stream(x: TernaryStream) -> BitStream:
    """Apply the morphism letter by letter; the output has the input's length."""
    return BitStream(morphism_array(x.digits))


def legacy_readout_array(digits: DigitArray) -> DigitArray:
    if np.any(digits == 1):
        raise InvalidDigit("Digit 1 (S_x = 0) has no detector in the two-outcome readout")
    return (digits == 0).astype(np.uint8)


def legacy_readout(x: TernaryStream) -> BitStream:
    """Two-outcome detector labels: S_x = +1 (digit 0) -> 1, S_x = -1 (digit 2) -> 0."""
    return BitStream(legacy_readout_array(x.digits))


def _encode_trits(digits: DigitArray) -> bytes:
    pad = (-len(digits)) % TRITS_PER_BYTE
    padded = np.concatenate([digits, np.zeros(pad, dtype=np.uint8)]) if pad else digits
    groups = padded.reshape(-1, TRITS_PER_BYTE).astype(np.int64)
    return (groups @ _TRIT_WEIGHTS).astype(np.uint8).tobytes()


def _decode_trits(payload: bytes) -> DigitArray:
    values = np.frombuffer(payload, dtype=np.uint8)
    if values.size and int(values.max()) > MAX_TERNARY_BYTE:
        raise CorruptFile(f"Payload byte {int(values.max())} exceeds {MAX_TERNARY_BYTE}")
    digits = (values.astype(np.int64)[:, None] // _TRIT_WEIGHTS) % 3
    return digits.astype(np.uint8).ravel()


def _encode_bits(bits: DigitArray) -> bytes:
    return np.packbits(bits, bitorder="little").tobytes()


def _decode_bits(payload: bytes) -> DigitArray:
    return np.unpackbits(np.frombuffer(payload, dtype=np.uint8), bitorder="little")


def read_header(fh: BinaryIO, magic: bytes) -> int:
    """Read and validate a header; returns the element count."""
    raw = fh.read(HEADER.size)
    if len(raw) != HEADER.size:
        raise CorruptFile("Truncated header")
    found_magic, version, count = HEADER.unpack(raw)
    if found_magic != magic:
        raise CorruptFile(f"Bad magic {found_magic!r}, expected {magic!r}")
    if version != FORMAT_VERSION:
        raise CorruptFile(f"Unsupported format version {version}")
    return int(count)


class _PackedWriter:
    magic = b""
    group = 1
    alphabet = 2

    def __init__(self, fh: BinaryIO, count: int) -> None:
        if count < 0:
            raise ValueError("Count must be non-negative")
        self.fh = fh
        self.count = count
        self.written = 0
        self._pending = np.zeros(0, dtype=np.uint8)
        fh.write(HEADER.pack(self.magic, FORMAT_VERSION, count))

    def _encode(self, digits: DigitArray) -> bytes:
        raise NotImplementedError

    def write(self, values: Iterable[int]) -> None:
        digits = _as_digits(values, self.alphabet)
        if self.written + len(digits) > self.count:
            raise ValueError(f"Writing past the declared count of {self.count}")
        self.written += len(digits)
        data = np.concatenate([self._pending, digits]) if self._pending.size else digits
        whole = len(data) - len(data) % self.group
        if whole:
            self.fh.write(self._encode(data[:whole]))
        self._pending = data[whole:].copy()

    def close(self) -> None:
        if self.written != self.count:
            raise ValueError(f"Declared {self.count} elements but wrote {self.written}")
        if self._pending.size:
            self.fh.write(self._encode(self._pending))
            self._pending = np.zeros(0, dtype=np.uint8)

    def __enter__(self) -> "_PackedWriter":
        return self

    def __exit__(
        self,
        exc_type: Optional[type[BaseException]],
        exc: Optional[BaseException],
        tb: Optional[TracebackType],
    ) -> None:
        if exc_type is None:
            self.close()


class TernaryWriter(_PackedWriter):
    magic = TERNARY_MAGIC
    group = TRITS_PER_BYTE
    alphabet = 3

    def _encode(self, digits: DigitArray) -> bytes:
        return _encode_trits(digits)


class BitWriter(_PackedWriter):
    magic = BIT_MAGIC
    group = BITS_PER_BYTE
    alphabet = 2

    def _encode(self, digits: DigitArray) -> bytes:
        return _encode_bits(digits)


class _PackedReader:
    magic = b""
    group = 1
    decode: Callable[[bytes], DigitArray]

    def __init__(self, fh: BinaryIO) -> None:
        self.fh = fh
        self.count = read_header(fh, self.magic)

    def __len__(self) -> int:
        return self.count

    def chunks(self, chunk_bytes: int = DEFAULT_CHUNK_BYTES) -> Iterator[DigitArray]:
        """Yield decoded elements in bounded-size chunks."""
        total_bytes = -(-self.count // self.group)
        remaining = self.count
        read = 0
        while read < total_bytes:
            want = min(chunk_bytes, total_bytes - read)
            payload = self.fh.read(want)
            if len(payload) != want:
                raise CorruptFile(
                    f"Truncated payload: expected {total_bytes} bytes, found {read + len(payload)}"
                )
            read += want
            digits = type(self).decode(payload)
            if len(digits) > remaining:
                if np.any(digits[remaining:]):
                    raise CorruptFile("Nonzero padding after the final element")
                digits = digits[:remaining]
            remaining -= len(digits)
            yield digits
        if self.fh.read(1):
            raise CorruptFile(f"Payload longer than the declared count of {self.count}")

    def read_all(self) -> DigitArray:
        parts = list(self.chunks())
        return np.concatenate(parts) if parts else np.zeros(0, dtype=np.uint8)


class TernaryReader(_PackedReader):
    magic = TERNARY_MAGIC
    group = TRITS_PER_BYTE
    decode = staticmethod(_decode_trits)

    def read_stream(self) -> TernaryStream:
        return TernaryStream(self.read_all())


class BitReader(_PackedReader):
    magic = BIT_MAGIC
    group = BITS_PER_BYTE
    decode = staticmethod(_decode_bits)

    def read_stream(self) -> BitStream:
        return BitStream(self.read_all())


def pack_ternary(x: TernaryStream) -> bytes:
    buffer = io.BytesIO()
    with TernaryWriter(buffer, len(x)) as writer:
        writer.write(x.digits)
    return buffer.getvalue()


def unpack_ternary(data: bytes) -> TernaryStream:
    return TernaryReader(io.BytesIO(data)).read_stream()


def pack_bits(x: BitStream) -> bytes:
    buffer = io.BytesIO()
    with BitWriter(buffer, len(x)) as writer:
        writer.write(x.digits)
    return buffer.getvalue()


def unpack_bits(data: bytes) -> BitStream:
    return BitReader(io.BytesIO(data)).read_stream()
