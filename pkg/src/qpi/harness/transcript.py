"""Transcripts and their binary wire form.

Layout (all integers little-endian):

    magic      4 bytes  b"QPI1"
    protocol   u8
    n t m q p  u16 each
    nbits      u32      query length in bits
    nanswers   u32      number of (real or complex) answers
    kind       u8       0 = real doubles, 1 = complex as (re, im) pairs
    query      ceil(nbits / 8) bytes, MSB-first, zero padded
    answers    binary64 values
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Any

import numpy as np

MAGIC = b"QPI1"
PROTOCOL_IDS = {
    "coset": 1,
    "improved_random_key": 2,
    "random_key": 3,
    "joint": 4,
    "perfect": 5,
    "hard": 6,
    "rou": 7,
    "zpm1": 8,
}
PROTOCOL_NAMES = {v: k for k, v in PROTOCOL_IDS.items()}
_HEADER = struct.Struct("<4sB5HIIB")


class TranscriptError(ValueError):
    pass


@dataclass(frozen=True)
class Transcript:
    protocol: str
    n: int
    t: int
    m: int
    q: int
    p: int
    A: str | None
    query_bits: np.ndarray
    answers: np.ndarray
    projections: np.ndarray | None = None
    decoded: Any = None
    direct: Any = None

    @classmethod
    def build(cls, setup, bits, answers, projections, decoded, direct) -> "Transcript":
        return cls(
            setup.protocol,
            setup.n,
            setup.t,
            setup.m,
            setup.q,
            setup.p,
            None if setup.A is None else str(setup.A),
            np.asarray(bits, dtype=np.uint8),
            np.asarray(answers),
            projections,
            decoded,
            direct,
        )

    @property
    def d_bits(self) -> int:
        return int(self.query_bits.size)

    def to_bytes(self) -> bytes:
        answers = np.asarray(self.answers)
        is_complex = np.iscomplexobj(answers)
        header = _HEADER.pack(
            MAGIC,
            PROTOCOL_IDS[self.protocol],
            self.n,
            self.t,
            self.m,
            self.q,
            self.p,
            self.d_bits,
            answers.size,
            int(is_complex),
        )
        query = np.packbits(self.query_bits, bitorder="big").tobytes()
        if is_complex:
            payload = np.stack([answers.real, answers.imag], axis=-1).astype("<f8").tobytes()
        else:
            payload = answers.astype("<f8").tobytes()
        return header + query + payload

    @classmethod
    def from_bytes(cls, data: bytes) -> "Transcript":
        """Wire fields only: projections, decoded and direct are not transmitted."""
        if len(data) < _HEADER.size:
            raise TranscriptError("truncated header")
        magic, pid, n, t, m, q, p, nbits, nans, kind = _HEADER.unpack_from(data)
        if magic != MAGIC:
            raise TranscriptError(f"bad magic {magic!r}")
        if pid not in PROTOCOL_NAMES:
            raise TranscriptError(f"unknown protocol id {pid}")
        offset = _HEADER.size
        qbytes = (nbits + 7) // 8
        width = 16 if kind else 8
        if len(data) != offset + qbytes + width * nans:
            raise TranscriptError("length does not match header")
        bits = np.unpackbits(np.frombuffer(data, np.uint8, qbytes, offset), count=nbits, bitorder="big")
        raw = np.frombuffer(data, "<f8", offset=offset + qbytes).astype(float)
        answers = raw[0::2] + 1j * raw[1::2] if kind else raw
        return cls(PROTOCOL_NAMES[pid], n, t, m, q, p, None, bits, answers)

    def same_wire(self, other: "Transcript") -> bool:
        return self.to_bytes() == other.to_bytes()
