"""Coset algebra of the [7,4,3] Hamming code pair used by the [[7,1,3]] code.

Errors on the 7-qubit data block are 7-bit vectors.  Internally a vector is a
plain int in 0..127 with bit j-1 standing for data qubit j; every public
function also accepts a length-7 iterable of 0/1.  The parity-check matrix is
fixed so that column j is the binary expansion of j, which makes Hamming
decoding "syndrome == error position".
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, NamedTuple, Sequence, TextIO, Union

import numpy as np

N_QUBITS = 7

# Rows of the parity-check matrix H as bit masks (bit j-1 <-> position j).
# Row k has 1s exactly at the positions whose k-th binary digit is set.
H_ROWS = (0b1010101, 0b1100110, 0b1111000)

ALL_ONES = 0b1111111

ErrorLike = Union[int, Sequence[int], Iterable[int]]


class ErrorClass(enum.IntEnum):
    """Correctability class of a residual error, ordered by effective weight."""

    TRIVIAL = 0
    CORRECTABLE_W1 = 1
    MISCORRECT_W2 = 2
    LOGICAL = 3


class Syndrome(NamedTuple):
    s1: int
    s2: int
    s3: int
    s4: int

    @property
    def position(self) -> int:
        """Hamming-decoded error position (0 means no error)."""
        return self.s1 | (self.s2 << 1) | (self.s3 << 2)


@dataclass(frozen=True)
class ResidualClass:
    x_class: ErrorClass
    z_class: ErrorClass


def as_int(e: ErrorLike) -> int:
    """Coerce an error vector (int or length-7 bit sequence) to its int form."""
    if isinstance(e, (int, np.integer)):
        v = int(e)
        if not 0 <= v < 128:
            raise ValueError(f"error vector out of range: {v}")
        return v
    bits = list(e)
    if len(bits) != N_QUBITS or any(b not in (0, 1) for b in bits):
        raise ValueError(f"expected 7 bits of 0/1, got {bits!r}")
    return sum(b << i for i, b in enumerate(bits))


def as_bits(e: ErrorLike) -> tuple[int, ...]:
    v = as_int(e)
    return tuple((v >> i) & 1 for i in range(N_QUBITS))


def weight(e: ErrorLike) -> int:
    return bin(as_int(e)).count("1")


def _span(generators: Sequence[int]) -> frozenset[int]:
    words = {0}
    for g in generators:
        words |= {w ^ g for w in words}
    return frozenset(words)


@dataclass(frozen=True)
class CodeTables:
    """Precomputed word lists and lookup tables for the code pair C_perp < C."""

    cperp_words: frozenset[int]
    c_words: frozenset[int]
    h_rows: tuple[int, int, int]
    syndrome_to_leader: dict[int, int]
    # index by the 7-bit error int
    effective_weight_lut: np.ndarray
    class_lut: np.ndarray


def build_tables() -> CodeTables:
    """Construct the code tables; deterministic and cheap (128 vectors)."""
    cperp = _span(H_ROWS)
    c = _span(H_ROWS + (ALL_ONES,))
    leaders = {0: 0}
    for j in range(1, 8):
        leaders[syndrome_of(1 << (j - 1)).position] = 1 << (j - 1)
    w_eff = np.empty(128, dtype=np.uint8)
    for e in range(128):
        w_eff[e] = min(bin(e ^ u).count("1") for u in cperp)
    return CodeTables(
        cperp_words=cperp,
        c_words=c,
        h_rows=H_ROWS,
        syndrome_to_leader=leaders,
        effective_weight_lut=w_eff,
        class_lut=w_eff.copy(),  # class index == effective weight
    )


_TABLES: CodeTables | None = None


def tables() -> CodeTables:
    global _TABLES
    if _TABLES is None:
        _TABLES = build_tables()
    return _TABLES


def syndrome_of(e: ErrorLike) -> Syndrome:
    """C-syndrome (s1,s2,s3) plus the overall-parity bit s4.

    Linear over F2: syndrome_of(e ^ f) == syndrome_of(e) xor syndrome_of(f).
    """
    v = as_int(e)
    bits = [bin(v & row).count("1") & 1 for row in H_ROWS]
    return Syndrome(bits[0], bits[1], bits[2], bin(v).count("1") & 1)


def effective_weight(e: ErrorLike) -> int:
    """Min weight of e modulo C_perp; always in 0..3."""
    return int(tables().effective_weight_lut[as_int(e)])


def classify(e: ErrorLike) -> ErrorClass:
    """Correctability class of e, a function of its effective weight only."""
    return ErrorClass(effective_weight(e))


def correction_for(s: ErrorLike | Syndrome) -> int:
    """The unique weight<=1 vector with the given 3-bit C-syndrome."""
    if isinstance(s, Syndrome):
        pos = s.position
    elif isinstance(s, (int, np.integer)):
        pos = int(s)
    else:
        bits = list(s)
        if len(bits) != 3:
            raise ValueError(f"expected a 3-bit syndrome, got {bits!r}")
        pos = bits[0] | (bits[1] << 1) | (bits[2] << 2)
    if not 0 <= pos < 8:
        raise ValueError(f"syndrome out of range: {pos}")
    return 0 if pos == 0 else 1 << (pos - 1)


def ideal_recovery(x_residual: ErrorLike, z_residual: ErrorLike) -> ResidualClass:
    """Noise-free Hamming correction of both sectors, then classification.

    The corrected vectors always land in C, so each output class is either
    TRIVIAL or LOGICAL; this is the oracle behind "uncorrectable".
    """
    out = []
    for res in (x_residual, z_residual):
        v = as_int(res)
        v ^= correction_for(syndrome_of(v).position)
        out.append(classify(v))
    return ResidualClass(out[0], out[1])


def overlap_factor(cls: ResidualClass, a: float) -> float:
    """Squared overlap with the ideal encoded state a|0_L> + b|1_L>, b real >= 0.

    A logical X alone contributes |2ab|^2, a logical Z alone |a^2-b^2|^2, a
    combined logical XZ is taken as overlap 0, and any detectable (weight 1
    or 2) residual is orthogonal to the ideal state.
    """
    if not 0.0 <= a <= 1.0:
        raise ValueError(f"amplitude a must lie in [0, 1], got {a}")
    b_sq = 1.0 - a * a
    x, z = cls.x_class, cls.z_class
    if x in (ErrorClass.CORRECTABLE_W1, ErrorClass.MISCORRECT_W2):
        return 0.0
    if z in (ErrorClass.CORRECTABLE_W1, ErrorClass.MISCORRECT_W2):
        return 0.0
    x_log = x is ErrorClass.LOGICAL
    z_log = z is ErrorClass.LOGICAL
    if x_log and z_log:
        return 0.0
    if x_log:
        return 4.0 * a * a * b_sq
    if z_log:
        return (a * a - b_sq) ** 2
    return 1.0


def dump_tables(stream: TextIO) -> None:
    """Write the word lists and syndrome map as CSV, one 7-char vector per row."""

    def fmt(v: int) -> str:
        return "".join(str((v >> i) & 1) for i in range(N_QUBITS))

    t = tables()
    stream.write("table,key,vector\n")
    for w in sorted(t.cperp_words):
        stream.write(f"cperp,,{fmt(w)}\n")
    for w in sorted(t.c_words):
        stream.write(f"c,,{fmt(w)}\n")
    for s in range(8):
        stream.write(f"syndrome_leader,{s},{fmt(t.syndrome_to_leader[s])}\n")


def enumerate_by_class() -> dict[ErrorClass, list[int]]:
    """All 128 vectors grouped by class (sizes 8 / 56 / 56 / 8)."""
    groups: dict[ErrorClass, list[int]] = {c: [] for c in ErrorClass}
    for e in range(128):
        groups[classify(e)].append(e)
    return groups


def weight_k_vectors(k: int) -> list[int]:
    return [sum(1 << i for i in idx) for idx in combinations(range(N_QUBITS), k)]
