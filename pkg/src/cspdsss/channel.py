"""AWGN and constant-offset channels, calibrated in Eb/N0."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chipmap import ChipTable
from .tx import Waveform, halfsine_pulse


@dataclass(frozen=True)
class NoiseSpec:
    """Per-chip noise std at the (normalised) matched-filter output."""

    sigma_chip: float


def sigma_from_ebn0(ebn0_db: float, table: ChipTable | None = None) -> NoiseSpec:
    """Noise level for unit chip energy; Eb = (C/N) * Ec and sigma^2 = N0/2.

    ``ebn0_db = inf`` gives a noise-free channel.
    """
    if math.isnan(ebn0_db) or ebn0_db == -math.inf:
        raise ValueError(f"Eb/N0 must be finite or +inf, got {ebn0_db}")
    C, N = (table.C, table.N) if table is not None else (32, 4)
    if ebn0_db == math.inf:
        return NoiseSpec(0.0)
    rho = 10.0 ** (ebn0_db / 10.0)
    eb = C / N
    return NoiseSpec(math.sqrt(eb / (2.0 * rho)))


def add_awgn(i_chips, q_chips, spec: NoiseSpec, rng: np.random.Generator):
    """Independent real Gaussian noise on every I and Q chip sample."""
    i_chips = np.asarray(i_chips, dtype=float)
    q_chips = np.asarray(q_chips, dtype=float)
    if spec.sigma_chip == 0.0:
        return i_chips.copy(), q_chips.copy()
    noise = rng.standard_normal((2,) + i_chips.shape)
    return i_chips + spec.sigma_chip * noise[0], q_chips + spec.sigma_chip * noise[1]


def pulse_energy(oversample: int) -> float:
    p = halfsine_pulse(oversample)
    return float(p @ p)


def waveform_noise_std(spec: NoiseSpec, oversample: int) -> float:
    """Per-sample std giving ``sigma_chip`` after energy-normalised matched filtering.

    A correlator normalised by the pulse energy E_p maps per-sample variance
    s^2 to s^2 / E_p, so s = sigma_chip * sqrt(E_p).
    """
    return spec.sigma_chip * math.sqrt(pulse_energy(oversample))


def add_awgn_waveform(w: Waveform, spec: NoiseSpec, rng: np.random.Generator) -> Waveform:
    if spec.sigma_chip == 0.0:
        return Waveform(w.samples.copy(), w.oversample, w.chip_period)
    std = waveform_noise_std(spec, w.oversample)
    noisy = w.samples + std * rng.standard_normal(w.samples.shape)
    return Waveform(noisy, w.oversample, w.chip_period)


def add_constant(x, offset: float):
    """Add a deterministic offset to chips (array) or to a :class:`Waveform`."""
    if not math.isfinite(offset):
        raise ValueError(f"offset must be finite, got {offset}")
    if isinstance(x, Waveform):
        return Waveform(x.samples + offset, x.oversample, x.chip_period)
    return np.asarray(x, dtype=float) + offset
