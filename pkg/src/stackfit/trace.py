"""Memory access traces: the binary/text file formats and synthetic generators.

Binary layout (all integers little-endian)::

    offset  size  field
    0       8     magic b"STKTRC01"
    8       1     kind (0 = instruction, 1 = data)
    9       7     zero padding
    16      8     record count (u64)
    24      8*n   addresses (u64)

Text layout: one address per line, decimal or ``0x`` hex. Lines starting
with ``#`` are comments, blank lines are skipped. A ``# kind=instruction``
comment overrides the kind passed to the reader.
"""

from __future__ import annotations

import io
import os
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import TraceFormatError

INSTRUCTION = "instruction"
DATA = "data"
KINDS = (INSTRUCTION, DATA)

MAGIC = b"STKTRC01"
_HEADER = struct.Struct("<8sB7xQ")
HEADER_SIZE = _HEADER.size  # 24
_KIND_CODE = {INSTRUCTION: 0, DATA: 1}
_CODE_KIND = {v: k for k, v in _KIND_CODE.items()}


@dataclass(frozen=True, eq=False)
class AccessSequence:
    """Ordered byte addresses of a single instruction or data stream."""

    kind: str
    addresses: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        addrs = self.addresses
        if not isinstance(addrs, np.ndarray):
            # via Python ints: a plain np.asarray would route 2**64-1 through float64
            try:
                addrs = np.array([int(a) for a in addrs], dtype=np.uint64)
            except OverflowError:
                raise ValueError("addresses must fit in 64 unsigned bits") from None
        if addrs.dtype.kind not in "ui":
            raise ValueError(f"addresses must be integers, got {addrs.dtype}")
        if addrs.size and addrs.dtype.kind == "i" and addrs.min() < 0:
            raise ValueError("addresses must be non-negative")
        addrs = np.ascontiguousarray(addrs, dtype=np.uint64).reshape(-1)
        addrs.flags.writeable = False
        object.__setattr__(self, "addresses", addrs)

    def __len__(self):
        return self.addresses.size

    def __eq__(self, other):
        if not isinstance(other, AccessSequence):
            return NotImplemented
        return self.kind == other.kind and np.array_equal(self.addresses, other.addresses)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return AccessSequence(self.kind, self.addresses[item])
        return int(self.addresses[item])

    def __repr__(self):
        return f"AccessSequence(kind={self.kind!r}, n={len(self)})"


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------

def _as_bytes(source) -> bytes:
    if isinstance(source, (bytes, bytearray, memoryview)):
        return bytes(source)
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            return fh.read()
    data = source.read()
    return data.encode("ascii", errors="replace") if isinstance(data, str) else data


def read_trace(source, fmt: str = "binary", kind: str = DATA) -> AccessSequence:
    """Decode a trace from bytes, a path, or a file object.

    ``kind`` applies to text traces only; binary traces carry their own.
    """
    raw = _as_bytes(source)
    if fmt == "binary":
        return _read_binary(raw)
    if fmt == "text":
        return _read_text(raw, kind)
    raise ValueError(f"unknown trace format {fmt!r}")


def _read_binary(raw: bytes) -> AccessSequence:
    if len(raw) < HEADER_SIZE:
        raise TraceFormatError(
            f"truncated header: {len(raw)} of {HEADER_SIZE} bytes", position=len(raw))
    magic, code, count = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise TraceFormatError(f"bad magic {magic!r}", position=0)
    if code not in _CODE_KIND:
        raise TraceFormatError(f"bad kind byte {code}", position=8)
    if any(raw[9:16]):
        raise TraceFormatError("non-zero header padding", position=9)
    body = len(raw) - HEADER_SIZE
    if body % 8:
        raise TraceFormatError("truncated record", position=HEADER_SIZE + body - body % 8)
    if body // 8 != count:
        pos = HEADER_SIZE + min(body, 8 * count)
        raise TraceFormatError(
            f"header declares {count} records, found {body // 8}", position=pos)
    addrs = np.frombuffer(raw, dtype="<u8", offset=HEADER_SIZE, count=count)
    return AccessSequence(_CODE_KIND[code], addrs.astype(np.uint64))


def _read_text(raw: bytes, kind: str) -> AccessSequence:
    out = []
    for lineno, line in enumerate(raw.decode("ascii", errors="replace").splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            tag = line[1:].strip()
            if tag.startswith("kind=") and tag[5:] in KINDS:
                kind = tag[5:]
            continue
        try:
            value = int(line, 16) if line[:2].lower() == "0x" else int(line, 10)
        except ValueError:
            raise TraceFormatError(f"not an address: {line!r}", position=lineno) from None
        if not 0 <= value < 2**64:
            raise TraceFormatError(f"address out of 64-bit range: {line!r}", position=lineno)
        out.append(value)
    return AccessSequence(kind, np.array(out, dtype=np.uint64))


def write_trace(seq: AccessSequence, sink=None, fmt: str = "binary"):
    """Encode ``seq``. Returns the bytes when ``sink`` is None, else writes
    to the path or binary file object given."""
    if fmt == "binary":
        payload = _HEADER.pack(MAGIC, _KIND_CODE[seq.kind], len(seq))
        payload += seq.addresses.astype("<u8").tobytes()
    elif fmt == "text":
        buf = io.StringIO()
        buf.write(f"# kind={seq.kind}\n")
        for a in seq.addresses.tolist():
            buf.write(f"{a:#x}\n")
        payload = buf.getvalue().encode("ascii")
    else:
        raise ValueError(f"unknown trace format {fmt!r}")

    if sink is None:
        return payload
    if isinstance(sink, (str, os.PathLike)):
        with open(sink, "wb") as fh:
            fh.write(payload)
    else:
        sink.write(payload)
    return None


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

def gen_cyclic(num_lines: int, num_accesses: int, line_size: int = 64,
               kind: str = DATA) -> AccessSequence:
    """Round-robin over ``num_lines`` line-aligned addresses.

    Every access after the first ``num_lines`` has distance ``num_lines - 1``.
    """
    if num_lines < 1:
        raise ValueError("num_lines must be >= 1")
    idx = np.arange(num_accesses, dtype=np.uint64) % np.uint64(num_lines)
    return AccessSequence(kind, idx * np.uint64(line_size))


def gen_random_uniform(num_lines: int, num_accesses: int, line_size: int = 64,
                       seed: int = 0, kind: str = DATA) -> AccessSequence:
    if num_lines < 1:
        raise ValueError("num_lines must be >= 1")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, num_lines, size=num_accesses, dtype=np.uint64)
    return AccessSequence(kind, idx * np.uint64(line_size))


def gen_from_distance_model(model, num_accesses: int, seed: int = 0,
                            line_size: int = 64, kind: str | None = None) -> AccessSequence:
    """Build a trace whose reuse distances follow ``model``.

    ``model`` is anything with a ``draw(n, rng)`` method returning distances,
    normally a :class:`~stackfit.characterize.Characterization`. Each draw is
    rounded to the nearest non-negative integer ``d`` and the line at LRU
    stack depth ``d`` is touched; if the stack is shallower than ``d`` a new
    line is pushed (a cold access).
    """
    rng = np.random.default_rng(seed)
    draws = np.asarray(model.draw(num_accesses, rng), dtype=float)
    depths = np.rint(np.clip(draws, 0.0, None)).astype(np.int64).tolist()

    stack = []  # MRU at the end
    out = np.empty(num_accesses, dtype=np.uint64)
    fresh = 0
    for i, d in enumerate(depths):
        if d < len(stack):
            line = stack.pop(-1 - d)
        else:
            line = fresh
            fresh += 1
        stack.append(line)
        out[i] = line
    if kind is None:
        kind = getattr(model, "kind", DATA)
    return AccessSequence(kind, out * np.uint64(line_size))
