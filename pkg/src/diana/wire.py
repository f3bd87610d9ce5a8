"""Bit-exact wire codec for quantized vectors.

Each block is framed as a float scale header followed by Elias-gamma coded
index gaps, one sign bit per kept coordinate, and (when the block does not
end on its last coordinate) a terminator. docs/wire-format.md describes the
layout bit by bit; decode_wire(encode_wire(q)) reproduces q exactly.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .quantize import BlockLayout, QuantizedVector, _trusted_quantized


class WireFormatError(ValueError):
    """Raised when a bitstream cannot be decoded against a layout."""


class PrecisionLossError(ValueError):
    """Raised in strict mode when a scale is not representable at the
    requested header width."""


@dataclass(frozen=True)
class Bitstream:
    """Immutable bit string: packed bytes plus an exact bit count.

    Bits are stored most-significant-first; unused low bits of the final
    byte are zero.
    """

    data: bytes
    nbits: int

    def __post_init__(self):
        if self.nbits < 0 or self.nbits > 8 * len(self.data):
            raise ValueError("bit count out of range for the byte payload")
        if len(self.data) != (self.nbits + 7) // 8:
            raise ValueError("payload has unaccounted trailing bytes")
        pad = 8 * len(self.data) - self.nbits
        if pad and (self.data[-1] & ((1 << pad) - 1)):
            raise ValueError("padding bits must be zero")

    def __len__(self) -> int:
        return self.nbits

    def to01(self) -> str:
        bits = "".join(f"{b:08b}" for b in self.data)
        return bits[: self.nbits]


class _BitWriter:
    # Messages are small (tens of bytes), so one big-int accumulator beats
    # byte-at-a-time flushing.
    __slots__ = ("acc", "nbits")

    def __init__(self):
        self.acc = 0
        self.nbits = 0

    def write(self, value: int, nbits: int) -> None:
        self.acc = (self.acc << nbits) | value
        self.nbits += nbits

    def gamma(self, n: int) -> None:
        # Elias gamma: (L-1) zeros then the L bits of n, n >= 1.
        self.write(n, 2 * n.bit_length() - 1)

    def finish(self) -> Bitstream:
        pad = (-self.nbits) % 8
        data = (self.acc << pad).to_bytes((self.nbits + pad) // 8, "big")
        return Bitstream(data, self.nbits)


class _BitReader:
    __slots__ = ("acc", "nbits", "pad", "pos")

    def __init__(self, stream: Bitstream):
        self.acc = int.from_bytes(stream.data, "big")
        self.nbits = stream.nbits
        self.pad = 8 * len(stream.data) - stream.nbits
        self.pos = 0

    def read(self, nbits: int) -> int:
        if self.pos + nbits > self.nbits:
            raise WireFormatError("truncated stream")
        shift = self.nbits - self.pos - nbits + self.pad
        self.pos += nbits
        return (self.acc >> shift) & ((1 << nbits) - 1)

    def gamma(self) -> int:
        zeros = 0
        while self.read(1) == 0:
            zeros += 1
            if zeros > 63:
                raise WireFormatError("malformed gamma code (zero run too long)")
        if zeros == 0:
            return 1
        return (1 << zeros) | self.read(zeros)


def encode_wire(
    q: QuantizedVector, float_bits: int = 32, scale_policy: str = "round"
) -> Bitstream:
    """Serialize a QuantizedVector to its canonical bitstream.

    Parameters
    ----------
    q : vector to serialize.
    float_bits : width of the per-block scale header, 32 or 64.
    scale_policy : what to do when a scale is not exactly representable at
        float_bits ("round" to nearest, or "raise" PrecisionLossError).
        Irrelevant at 64 bits.
    """
    if float_bits not in (32, 64):
        raise ValueError("float_bits must be 32 or 64")
    if scale_policy not in ("round", "raise"):
        raise ValueError("scale_policy must be 'round' or 'raise'")
    w = _BitWriter()
    for l, sl in enumerate(q.layout.slices()):
        scale = float(q.scales[l])
        if float_bits == 32:
            if scale_policy == "raise" and float(np.float32(scale)) != scale:
                raise PrecisionLossError(
                    f"block {l} scale {scale!r} is not a binary32 value"
                )
            w.write(struct.unpack(">I", struct.pack(">f", scale))[0], 32)
        else:
            w.write(struct.unpack(">Q", struct.pack(">d", scale))[0], 64)
        block_size = sl.stop - sl.start
        prev = -1
        for idx in np.flatnonzero(q.support[sl]):
            idx = int(idx)
            w.gamma(idx - prev + 1)  # gap + 1, so every entry code is >= 2
            w.write(1 if q.signs[sl.start + idx] > 0 else 0, 1)
            prev = idx
        if prev != block_size - 1:
            # Entry codes are >= 2, so gamma(1) + a zero bit marks the end.
            w.gamma(1)
            w.write(0, 1)
    return w.finish()


def decode_wire(
    stream: Bitstream, layout: BlockLayout, float_bits: int = 32
) -> QuantizedVector:
    """Parse a bitstream produced by encode_wire back into a vector.

    Raises WireFormatError on truncation, out-of-range indices, malformed
    gamma codes, non-finite or negative scale headers, a set sign bit on a
    terminator, or unconsumed trailing bits.
    """
    if float_bits not in (32, 64):
        raise ValueError("float_bits must be 32 or 64")
    r = _BitReader(stream)
    scales = np.empty(layout.n_blocks)
    signs = np.zeros(layout.total_dim, dtype=np.int8)
    support = np.zeros(layout.total_dim, dtype=bool)
    for l, sl in enumerate(layout.slices()):
        if float_bits == 32:
            scale = float(
                struct.unpack(">f", struct.pack(">I", r.read(32)))[0]
            )
        else:
            scale = float(
                struct.unpack(">d", struct.pack(">Q", r.read(64)))[0]
            )
        if not (scale >= 0.0) or scale == float("inf"):
            raise WireFormatError(f"block {l} scale header is not finite >= 0")
        scales[l] = scale
        block_size = sl.stop - sl.start
        prev = -1
        while prev != block_size - 1:
            code = r.gamma()
            sign_bit = r.read(1)
            if code == 1:
                if sign_bit:
                    raise WireFormatError(f"block {l} terminator carries a sign")
                break
            idx = prev + code - 1
            if idx >= block_size:
                raise WireFormatError(
                    f"block {l} index {idx} outside block of size {block_size}"
                )
            support[sl.start + idx] = True
            signs[sl.start + idx] = 1 if sign_bit else -1
            prev = idx
    if r.pos != r.nbits:
        raise WireFormatError(f"{r.nbits - r.pos} trailing bits after last block")
    # The parser only ever writes +-1 signs on kept coordinates and checks
    # every scale, so the output satisfies the invariants by construction.
    return _trusted_quantized(layout, scales, signs, support)
