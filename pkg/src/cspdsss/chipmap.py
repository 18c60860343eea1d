"""Symbol-to-chip mapping and the derived per-channel I/Q dictionaries."""

from __future__ import annotations

import io
from dataclasses import dataclass
from importlib import resources
from typing import BinaryIO, Iterable, Sequence

import numpy as np

DEFAULT_TABLE = "ieee802154_2450mhz.txt"

# 802.15.4 2450 MHz profile
PROFILE_M = 16
PROFILE_C = 32


class ChipTableError(ValueError):
    """Base class for chip-table problems."""


class ChipTableFormatError(ChipTableError):
    """The chip-table file does not follow the text format."""


class ChipTableValidationError(ChipTableError):
    """The table parses but violates a structural invariant."""


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ChipTable:
    """M x C matrix of chip polarities; row m is the PRN sequence of symbol m."""

    chips: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "chips", _freeze(np.asarray(self.chips, dtype=np.int8)))
        _validate_table(self.chips)

    @property
    def M(self) -> int:
        return self.chips.shape[0]

    @property
    def C(self) -> int:
        return self.chips.shape[1]

    @property
    def N(self) -> int:
        return self.M.bit_length() - 1


@dataclass(frozen=True)
class Dictionary:
    """Discrete in-phase/quadrature dictionaries, each C_h x M.

    Column m of ``psi_i`` holds the even-indexed chips of symbol m, column m
    of ``psi_q`` the odd-indexed ones.
    """

    psi_i: np.ndarray
    psi_q: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "psi_i", _freeze(self.psi_i))
        object.__setattr__(self, "psi_q", _freeze(self.psi_q))
        if self.psi_i.shape != self.psi_q.shape:
            raise ChipTableValidationError("psi_i and psi_q shapes differ")

    @property
    def C_h(self) -> int:
        return self.psi_i.shape[0]

    @property
    def M(self) -> int:
        return self.psi_i.shape[1]


@dataclass(frozen=True)
class SymbolAlpha:
    """Index of the single active dictionary column."""

    index: int
    M: int = PROFILE_M

    def __post_init__(self):
        if not 0 <= self.index < self.M:
            raise ValueError(f"symbol index {self.index} outside [0, {self.M})")

    def one_hot(self) -> np.ndarray:
        alpha = np.zeros(self.M, dtype=np.int8)
        alpha[self.index] = 1
        return alpha


def _validate_table(chips: np.ndarray) -> None:
    if chips.ndim != 2 or chips.shape[0] == 0:
        raise ChipTableValidationError("chip table must be a non-empty 2-D matrix")
    M = chips.shape[0]
    if M & (M - 1):
        raise ChipTableValidationError(f"symbol count {M} is not a power of two")
    if not np.isin(chips, (-1, 1)).all():
        raise ChipTableValidationError("chip polarities must be -1 or +1")
    if len({row.tobytes() for row in chips}) != M:
        raise ChipTableValidationError("chip table contains duplicate rows")


def load_chip_table(source: BinaryIO | bytes, M: int = PROFILE_M, C: int = PROFILE_C) -> ChipTable:
    """Parse a chip-table text file (``#`` comments, then M lines of C bits)."""
    raw = source if isinstance(source, bytes) else source.read()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ChipTableFormatError(f"chip table is not UTF-8: {exc}") from None

    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if len(line) != C:
            raise ChipTableFormatError(f"line {lineno}: expected {C} chips, got {len(line)}")
        bad = set(line) - {"0", "1"}
        if bad:
            raise ChipTableFormatError(f"line {lineno}: invalid characters {sorted(bad)}")
        rows.append([2 * int(ch) - 1 for ch in line])

    if len(rows) != M:
        raise ChipTableFormatError(f"expected {M} chip rows, got {len(rows)}")
    return ChipTable(np.array(rows, dtype=np.int8))


def load_default_table() -> ChipTable:
    """The shipped IEEE 802.15.4 2450 MHz table."""
    data = resources.files("cspdsss.data").joinpath(DEFAULT_TABLE).read_bytes()
    return load_chip_table(io.BytesIO(data))


def build_dictionaries(table: ChipTable) -> Dictionary:
    if table.C % 2:
        raise ChipTableValidationError(f"odd chip count {table.C} cannot be split into I/Q")
    return Dictionary(psi_i=table.chips[:, 0::2].T, psi_q=table.chips[:, 1::2].T)


def interleave(psi_i: np.ndarray, psi_q: np.ndarray) -> np.ndarray:
    """Inverse of the I/Q split: rebuild M x C chip rows from the dictionaries."""
    C_h, M = psi_i.shape
    rows = np.empty((M, 2 * C_h), dtype=psi_i.dtype)
    rows[:, 0::2] = psi_i.T
    rows[:, 1::2] = psi_q.T
    return rows


def encode_bits(bits: Sequence[int], N: int = 4) -> SymbolAlpha:
    """Map an N-bit block to a symbol, first bit least significant."""
    if len(bits) != N:
        raise ValueError(f"bit block must have length {N}, got {len(bits)}")
    index = 0
    for k, b in enumerate(bits):
        if b not in (0, 1):
            raise ValueError(f"bits must be 0 or 1, got {b!r}")
        index |= int(b) << k
    return SymbolAlpha(index, 1 << N)


def decode_symbol(alpha: SymbolAlpha | int, N: int = 4) -> list[int]:
    index = alpha.index if isinstance(alpha, SymbolAlpha) else int(alpha)
    return [(index >> k) & 1 for k in range(N)]


def bits_to_indices(bits: Iterable[int] | np.ndarray, N: int = 4) -> np.ndarray:
    """Vectorised ``encode_bits`` over a whole packet."""
    bits = np.asarray(bits, dtype=np.int64)
    if bits.size % N:
        raise ValueError(f"bit count {bits.size} is not a multiple of {N}")
    return bits.reshape(-1, N) @ (1 << np.arange(N))


def indices_to_bits(indices: np.ndarray, N: int = 4) -> np.ndarray:
    indices = np.asarray(indices, dtype=np.int64)
    return ((indices[:, None] >> np.arange(N)) & 1).astype(np.uint8).ravel()
