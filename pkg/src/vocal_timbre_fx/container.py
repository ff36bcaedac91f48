"""Little-endian binary container used by feature dumps and checkpoints.

Layout::

    magic            8 bytes
    version          uint32
    n_ints           uint16, then n_ints x (name, int64)
    n_floats         uint16, then n_floats x (name, float64)
    n_arrays         uint32, then n_arrays x (name, ndim uint8, dims uint32[ndim], float32 data)

Names are uint16-length-prefixed UTF-8. Fields keep the order they were written in.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Tuple, Type

import numpy as np

from vocal_timbre_fx.errors import VocalFxError


@dataclass
class Container:
    """In-memory form of a container file."""

    magic: bytes
    version: int
    ints: Dict[str, int] = field(default_factory=dict)
    floats: Dict[str, float] = field(default_factory=dict)
    arrays: Dict[str, np.ndarray] = field(default_factory=dict)


def encode_container(container: Container) -> bytes:
    """Serialize `container`; arrays are stored as float32."""
    if len(container.magic) != 8:
        raise ValueError("Container magic must be exactly 8 bytes.")
    parts = [container.magic, struct.pack("<I", container.version)]

    parts.append(struct.pack("<H", len(container.ints)))
    for name, value in container.ints.items():
        parts.append(_pack_name(name))
        parts.append(struct.pack("<q", int(value)))

    parts.append(struct.pack("<H", len(container.floats)))
    for name, value in container.floats.items():
        parts.append(_pack_name(name))
        parts.append(struct.pack("<d", float(value)))

    parts.append(struct.pack("<I", len(container.arrays)))
    for name, array in container.arrays.items():
        data = np.ascontiguousarray(array, dtype="<f4")
        parts.append(_pack_name(name))
        parts.append(struct.pack("<B", data.ndim))
        parts.append(struct.pack(f"<{data.ndim}I", *data.shape))
        parts.append(data.tobytes())
    return b"".join(parts)


def decode_container(
    payload: bytes,
    magic: bytes,
    supported_versions: Tuple[int, ...],
    corrupt_error: Type[VocalFxError],
    version_error: Type[VocalFxError],
) -> Container:
    """Parse `payload`, raising `corrupt_error` on any structural problem."""
    reader = _Reader(payload, corrupt_error)
    if reader.take(8) != magic:
        raise corrupt_error(f"Bad magic tag; expected {magic!r}.")
    (version,) = reader.unpack("<I")
    if version not in supported_versions:
        raise version_error(f"Unsupported format version {version}; supported: {supported_versions}.")

    container = Container(magic=magic, version=version)
    (n_ints,) = reader.unpack("<H")
    for _ in range(n_ints):
        name = reader.name()
        (container.ints[name],) = reader.unpack("<q")
    (n_floats,) = reader.unpack("<H")
    for _ in range(n_floats):
        name = reader.name()
        (container.floats[name],) = reader.unpack("<d")
    (n_arrays,) = reader.unpack("<I")
    for _ in range(n_arrays):
        name = reader.name()
        (ndim,) = reader.unpack("<B")
        shape = reader.unpack(f"<{ndim}I") if ndim else ()
        count = int(np.prod(shape)) if ndim else 1
        raw = reader.take(4 * count)
        container.arrays[name] = np.frombuffer(raw, dtype="<f4").reshape(shape).copy()
    if not reader.exhausted:
        raise corrupt_error("Trailing bytes after the last array.")
    return container


def write_container(container: Container, path: Path) -> None:
    Path(path).write_bytes(encode_container(container))


def read_container(
    path: Path,
    magic: bytes,
    supported_versions: Tuple[int, ...],
    corrupt_error: Type[VocalFxError],
    version_error: Type[VocalFxError],
) -> Container:
    payload = Path(path).read_bytes()
    return decode_container(payload, magic, supported_versions, corrupt_error, version_error)


def _pack_name(name: str) -> bytes:
    encoded = name.encode("utf-8")
    return struct.pack("<H", len(encoded)) + encoded


class _Reader:
    def __init__(self, payload: bytes, corrupt_error: Type[VocalFxError]) -> None:
        self._payload = payload
        self._pos = 0
        self._error = corrupt_error

    @property
    def exhausted(self) -> bool:
        return self._pos == len(self._payload)

    def take(self, n: int) -> bytes:
        end = self._pos + n
        if end > len(self._payload):
            raise self._error("File is truncated.")
        chunk = self._payload[self._pos : end]
        self._pos = end
        return chunk

    def unpack(self, fmt: str) -> tuple:
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))

    def name(self) -> str:
        (length,) = self.unpack("<H")
        try:
            return self.take(length).decode("utf-8")
        except UnicodeDecodeError as e:
            raise self._error("Field name is not valid UTF-8.") from e
