"""Stream files.

Text: one decimal item id per line, LF-terminated. The universe size is not
stored, so readers take it as an argument (default: the largest id seen).

Binary: magic ``HHS1``, u32 LE n, u64 LE m, then m u32 LE item ids.
"""
from __future__ import annotations

import os
import struct

import numpy as np

from .core import Stream

MAGIC = b"HHS1"
_HEADER = struct.Struct("<4sIQ")


class StreamFormatError(ValueError):
    pass


def write_text(stream: Stream, path) -> None:
    with open(path, "w", newline="\n") as fh:
        for item in stream.items.tolist():
            fh.write(f"{item}\n")


def read_text(path, n: int | None = None) -> Stream:
    with open(path) as fh:
        lines = [ln.strip() for ln in fh]
    try:
        items = np.array([int(ln) for ln in lines if ln], dtype=np.int64)
    except ValueError as exc:
        raise StreamFormatError(f"{path}: {exc}") from None
    if n is None:
        n = int(items.max()) if items.size else 1
    return Stream(items, n)


def write_binary(stream: Stream, path) -> None:
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, stream.n, stream.m))
        fh.write(stream.items.astype("<u4").tobytes())


def read_binary(path) -> Stream:
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) != _HEADER.size:
            raise StreamFormatError(f"{path}: truncated header")
        magic, n, m = _HEADER.unpack(head)
        if magic != MAGIC:
            raise StreamFormatError(f"{path}: bad magic {magic!r}")
        body = fh.read()
    if len(body) != 4 * m:
        raise StreamFormatError(f"{path}: expected {m} ids, found {len(body) // 4}")
    return Stream(np.frombuffer(body, dtype="<u4"), n)


def read_stream(path, n: int | None = None) -> Stream:
    """Sniff the format from the magic bytes."""
    with open(path, "rb") as fh:
        is_binary = fh.read(4) == MAGIC
    if is_binary:
        stream = read_binary(path)
        if n is not None and n != stream.n:
            stream = Stream(stream.items, n)
        return stream
    return read_text(path, n)


def write_stream(stream: Stream, path, fmt: str | None = None) -> None:
    if fmt is None:
        fmt = "bin" if os.fspath(path).endswith((".bin", ".hhs")) else "txt"
    if fmt in ("bin", "binary"):
        write_binary(stream, path)
    elif fmt in ("txt", "text"):
        write_text(stream, path)
    else:
        raise ValueError(f"unknown stream format {fmt!r}")
