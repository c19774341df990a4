"""Frame sources: headerless raw luma planes and YUV4MPEG2 files."""

from __future__ import annotations

import io
import os
from dataclasses import dataclass
from typing import BinaryIO, Iterator, Optional

import numpy as np

from .errors import (
    FileUnreadable,
    HeaderMalformed,
    ResolutionInvalid,
    TruncatedFrame,
    UnsupportedColorspace,
)

Y4M_MAGIC = b"YUV4MPEG2"
Y4M_FRAME = b"FRAME"

# Y4M colour tags that are 8-bit planar, mapped to the byte count of the
# chroma planes for a width x height frame.
_CHROMA_BYTES = {
    "420": lambda w, h: 2 * ((w + 1) // 2) * ((h + 1) // 2),
    "420jpeg": lambda w, h: 2 * ((w + 1) // 2) * ((h + 1) // 2),
    "420mpeg2": lambda w, h: 2 * ((w + 1) // 2) * ((h + 1) // 2),
    "420paldv": lambda w, h: 2 * ((w + 1) // 2) * ((h + 1) // 2),
    "422": lambda w, h: 2 * ((w + 1) // 2) * h,
    "444": lambda w, h: 2 * w * h,
    "mono": lambda w, h: 0,
}


@dataclass(frozen=True)
class Resolution:
    width: int
    height: int

    def __post_init__(self):
        validate_resolution(self.width, self.height)

    @property
    def plane_size(self) -> int:
        return self.width * self.height

    def __str__(self):
        return f"{self.width}x{self.height}"

    @classmethod
    def parse(cls, text: str) -> "Resolution":
        """Parse ``"WIDTHxHEIGHT"``."""
        try:
            w, h = (int(t) for t in text.lower().split("x"))
        except ValueError:
            raise ResolutionInvalid(f"cannot parse resolution {text!r}") from None
        return cls(w, h)


def validate_resolution(width: int, height: int) -> None:
    if width % 8 or height % 8:
        raise ResolutionInvalid(
            f"resolution {width}x{height} is not a multiple of 8 in both dimensions"
        )
    if width < 16 or height < 16:
        raise ResolutionInvalid(f"resolution {width}x{height} is below the 16x16 minimum")


@dataclass(frozen=True)
class Frame:
    """One luma plane, stored as a ``(height, width)`` uint8 array."""

    index: int
    luma: np.ndarray

    def __post_init__(self):
        if self.luma.ndim != 2 or self.luma.dtype != np.uint8:
            raise ValueError("luma must be a 2-D uint8 array")

    @property
    def width(self) -> int:
        return self.luma.shape[1]

    @property
    def height(self) -> int:
        return self.luma.shape[0]

    @property
    def resolution(self) -> Resolution:
        return Resolution(self.width, self.height)

    @classmethod
    def from_bytes(cls, index: int, data: bytes, resolution: Resolution) -> "Frame":
        if len(data) != resolution.plane_size:
            raise ValueError(
                f"expected {resolution.plane_size} luma bytes, got {len(data)}"
            )
        luma = np.frombuffer(data, dtype=np.uint8).reshape(
            resolution.height, resolution.width
        )
        return cls(index, luma)


class FrameSource:
    """Sequential single-consumer iterator over the frames of one file.

    Iteration stops at the exact end of the data; a partial plane raises
    :class:`TruncatedFrame`.
    """

    def __init__(self, stream: BinaryIO, resolution: Resolution, name: str = "<stream>"):
        self._stream = stream
        self.resolution = resolution
        self.name = name
        self._next_index = 0

    def _read_exact(self, n: int, what: str) -> Optional[bytes]:
        data = self._stream.read(n)
        if not data:
            return None
        while len(data) < n:
            more = self._stream.read(n - len(data))
            if not more:
                raise TruncatedFrame(
                    f"{self.name}: frame {self._next_index} {what} has "
                    f"{len(data)} of {n} bytes"
                )
            data += more
        return data

    def _read_plane(self) -> Optional[bytes]:
        return self._read_exact(self.resolution.plane_size, "luma plane")

    def next_frame(self) -> Optional[Frame]:
        """Return the next frame, or ``None`` at end of stream."""
        data = self._read_plane()
        if data is None:
            return None
        frame = Frame.from_bytes(self._next_index, data, self.resolution)
        self._next_index += 1
        return frame

    def __iter__(self) -> Iterator[Frame]:
        return self

    def __next__(self) -> Frame:
        frame = self.next_frame()
        if frame is None:
            raise StopIteration
        return frame

    def close(self) -> None:
        self._stream.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class Y4MSource(FrameSource):
    """YUV4MPEG2 reader that yields only the luma plane of each frame."""

    def __init__(self, stream: BinaryIO, name: str = "<stream>"):
        header = stream.readline()
        if not header.endswith(b"\n"):
            raise HeaderMalformed(f"{name}: unterminated stream header")
        tokens = header.split()
        if not tokens or tokens[0] != Y4M_MAGIC:
            raise HeaderMalformed(f"{name}: missing YUV4MPEG2 signature")
        params = {}
        for tok in tokens[1:]:
            params[chr(tok[0])] = tok[1:].decode("ascii", "replace")
        try:
            width, height = int(params["W"]), int(params["H"])
        except (KeyError, ValueError):
            raise HeaderMalformed(f"{name}: header lacks a valid W/H pair") from None
        colour = params.get("C", "420")
        if colour not in _CHROMA_BYTES:
            raise UnsupportedColorspace(f"{name}: colourspace C{colour} is not 8-bit planar")
        super().__init__(stream, Resolution(width, height), name)
        self.colourspace = colour
        self._chroma_bytes = _CHROMA_BYTES[colour](width, height)

    def _read_plane(self) -> Optional[bytes]:
        marker = self._stream.readline()
        if not marker:
            return None
        if not marker.startswith(Y4M_FRAME) or not marker.endswith(b"\n"):
            raise HeaderMalformed(
                f"{self.name}: expected FRAME marker before frame {self._next_index}"
            )
        luma = self._read_exact(self.resolution.plane_size, "luma plane")
        if luma is None:
            raise TruncatedFrame(f"{self.name}: frame {self._next_index} has no data")
        if self._chroma_bytes:
            chroma = self._read_exact(self._chroma_bytes, "chroma planes")
            if chroma is None:
                raise TruncatedFrame(
                    f"{self.name}: frame {self._next_index} is missing its chroma planes"
                )
        return luma


def _open(path) -> BinaryIO:
    try:
        return open(path, "rb")
    except OSError as exc:
        raise FileUnreadable(f"{path}: {exc.strerror or exc}") from exc


def open_raw_source(path, resolution: Resolution) -> FrameSource:
    if not isinstance(resolution, Resolution):
        resolution = Resolution(*resolution)
    return FrameSource(_open(path), resolution, name=os.fspath(path))


def open_y4m_source(path) -> Y4MSource:
    stream = _open(path)
    try:
        return Y4MSource(stream, name=os.fspath(path))
    except Exception:
        stream.close()
        raise


def write_raw(path, frames) -> None:
    with open(path, "wb") as fh:
        for luma in frames:
            fh.write(np.ascontiguousarray(luma, dtype=np.uint8).tobytes())


def write_y4m(path, frames, colourspace: str = "420", fill: int = 128) -> None:
    """Write luma planes as a Y4M file with flat chroma of value ``fill``."""
    frames = list(frames)
    if not frames:
        raise ValueError("need at least one frame to infer the resolution")
    h, w = frames[0].shape
    buf = io.BytesIO()
    buf.write(f"YUV4MPEG2 W{w} H{h} F30:1 Ip A1:1 C{colourspace}\n".encode())
    chroma = bytes([fill]) * _CHROMA_BYTES[colourspace](w, h)
    for luma in frames:
        buf.write(b"FRAME\n")
        buf.write(np.ascontiguousarray(luma, dtype=np.uint8).tobytes())
        buf.write(chroma)
    with open(path, "wb") as fh:
        fh.write(buf.getvalue())
