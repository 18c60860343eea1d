"""DSSS transmitter: spreading, half-sine shaping, random packets."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chipmap import Dictionary, SymbolAlpha

DEFAULT_OVERSAMPLE = 16


@dataclass(frozen=True)
class ChipVector:
    i_chips: np.ndarray
    q_chips: np.ndarray


@dataclass(frozen=True)
class Waveform:
    """Oversampled single-channel baseband signal.

    ``samples`` may be 1-D (one symbol) or 2-D with one symbol per row.
    ``chip_period`` is the per-channel chip duration, i.e. twice the
    interleaved chip duration.
    """

    samples: np.ndarray
    oversample: int
    chip_period: float = 1.0

    @property
    def n_chips(self) -> int:
        return self.samples.shape[-1] // self.oversample


def spread(alpha: SymbolAlpha | int, dictionary: Dictionary) -> ChipVector:
    m = alpha.index if isinstance(alpha, SymbolAlpha) else int(alpha)
    if not 0 <= m < dictionary.M:
        raise ValueError(f"symbol index {m} outside [0, {dictionary.M})")
    return ChipVector(dictionary.psi_i[:, m].copy(), dictionary.psi_q[:, m].copy())


def spread_indices(indices: np.ndarray, dictionary: Dictionary) -> tuple[np.ndarray, np.ndarray]:
    """Chips for a run of symbols, shape (n_symbols, C_h) per channel."""
    indices = np.asarray(indices)
    return dictionary.psi_i.T[indices], dictionary.psi_q.T[indices]


def halfsine_pulse(oversample: int) -> np.ndarray:
    """Half-sine chip pulse sampled at chip-interval midpoints."""
    if oversample < 2:
        raise ValueError(f"oversample must be >= 2, got {oversample}")
    j = np.arange(oversample)
    return np.sin(np.pi * (j + 0.5) / oversample)


def shape_halfsine(chips: np.ndarray, oversample: int = DEFAULT_OVERSAMPLE) -> Waveform:
    """Place one half-sine pulse per chip on disjoint consecutive supports.

    Works on a single chip vector or on a (n_symbols, C_h) batch.
    """
    pulse = halfsine_pulse(oversample)
    chips = np.asarray(chips, dtype=float)
    samples = (chips[..., None] * pulse).reshape(*chips.shape[:-1], -1)
    return Waveform(samples, oversample)


def make_packet(bit_count: int, rng: np.random.Generator, N: int = 4) -> np.ndarray:
    if bit_count % N:
        raise ValueError(f"packet size {bit_count} is not a multiple of {N}")
    return rng.integers(0, 2, size=bit_count, dtype=np.uint8)
