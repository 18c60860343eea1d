"""Matched-filter receivers (Nyquist and block-aggregated) and LS classification."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import channel as ch
from .chipmap import Dictionary, bits_to_indices, indices_to_bits
from .tx import Waveform, halfsine_pulse, shape_halfsine, spread_indices

NYQUIST = "nyquist"
BLOCK_AGGREGATE = "blockAggregate"

# relative slack used to decide that two candidate distances tie
TIE_RTOL = 1e-9


@dataclass(frozen=True)
class MeasurementMatrix:
    kind: str
    kappa: float
    rows: np.ndarray

    @property
    def L(self) -> int:
        return self.rows.shape[0]

    @property
    def C_h(self) -> int:
        return self.rows.shape[1]

    @property
    def block(self) -> int:
        """Chips aggregated per sample."""
        return self.C_h // self.L


@dataclass(frozen=True)
class ComplexSampleVector:
    re: np.ndarray
    im: np.ndarray

    def __post_init__(self):
        if np.shape(self.re) != np.shape(self.im):
            raise ValueError("I and Q sample vectors differ in length")

    @property
    def y(self) -> np.ndarray:
        return np.asarray(self.re) + 1j * np.asarray(self.im)


@dataclass(frozen=True)
class CandidateSet:
    """Noise-free measured vectors, one row per symbol (M x L complex)."""

    candidates: np.ndarray

    @property
    def M(self) -> int:
        return self.candidates.shape[0]

    @property
    def L(self) -> int:
        return self.candidates.shape[1]


def _block_size(kappa) -> int:
    frac = Fraction(kappa).limit_denominator(1 << 20)
    if not 0 < frac <= 1 or frac.numerator != 1 or abs(float(frac) - float(kappa)) > 1e-12:
        raise ValueError(f"1/kappa must be a positive integer, got kappa={kappa}")
    return frac.denominator


def make_measurement(kind: str, kappa: float = 1.0, C_h: int = 16) -> MeasurementMatrix:
    """Build Theta_1 (identity) or Theta_1/kappa (disjoint blocks of 1/kappa ones)."""
    if kind == NYQUIST:
        if kappa != 1:
            raise ValueError(f"nyquist sampling requires kappa = 1, got {kappa}")
        rows = np.eye(C_h, dtype=np.int8)
    elif kind == BLOCK_AGGREGATE:
        block = _block_size(kappa)
        if C_h % block:
            raise ValueError(f"C_h * kappa = {C_h}/{block} is not an integer")
        rows = np.kron(np.eye(C_h // block, dtype=np.int8), np.ones((1, block), dtype=np.int8))
    else:
        raise ValueError(f"unknown measurement kind {kind!r}")
    rows.setflags(write=False)
    return MeasurementMatrix(kind, 1.0 / (rows.shape[1] // rows.shape[0]), rows)


def measurement_for(kappa: float, C_h: int = 16) -> MeasurementMatrix:
    """Nyquist for kappa == 1, block aggregation otherwise."""
    if kappa == 1:
        return make_measurement(NYQUIST, 1.0, C_h)
    return make_measurement(BLOCK_AGGREGATE, kappa, C_h)


def _apply(theta: MeasurementMatrix, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != theta.C_h:
        raise ValueError(f"expected {theta.C_h} chips per channel, got {x.shape[-1]}")
    return x @ theta.rows.T


def sample_chips(noisy_i, noisy_q, theta: MeasurementMatrix) -> ComplexSampleVector:
    """Apply theta to chip-rate matched-filter outputs (1-D or batched rows)."""
    return ComplexSampleVector(_apply(theta, noisy_i), _apply(theta, noisy_q))


def matched_filter(w: Waveform) -> np.ndarray:
    """Per-chip correlation with the half-sine template, normalised to chip units."""
    pulse = halfsine_pulse(w.oversample)
    samples = np.asarray(w.samples, dtype=float)
    if samples.shape[-1] % w.oversample:
        raise ValueError("waveform length is not a whole number of chips")
    per_chip = samples.reshape(*samples.shape[:-1], -1, w.oversample)
    return per_chip @ pulse / (pulse @ pulse)


def sample_waveform(w_i: Waveform, w_q: Waveform, theta: MeasurementMatrix) -> ComplexSampleVector:
    """Integrate-and-dump against the pulse repeated over each row's chip block."""
    if w_i.oversample != w_q.oversample or np.shape(w_i.samples) != np.shape(w_q.samples):
        raise ValueError("I and Q waveforms must share shape and oversampling")
    return sample_chips(matched_filter(w_i), matched_filter(w_q), theta)


def build_candidates(dictionary: Dictionary, theta: MeasurementMatrix) -> CandidateSet:
    if dictionary.C_h != theta.C_h:
        raise ValueError(f"dictionary has {dictionary.C_h} chips/channel, theta expects {theta.C_h}")
    s = _apply(theta, dictionary.psi_i.T) + 1j * _apply(theta, dictionary.psi_q.T)
    s.setflags(write=False)
    return CandidateSet(s)


def _real(z: np.ndarray) -> np.ndarray:
    return np.concatenate([z.real, z.imag], axis=-1)


def distances(y: np.ndarray, cands: CandidateSet) -> np.ndarray:
    """Squared Euclidean distance of each received vector to every candidate.

    Expanded as |y|^2 - 2 Re(s^H y) + |s|^2 so the batch reduces to one matmul.
    """
    y = np.asarray(y)
    if y.shape[-1] != cands.L:
        raise ValueError(f"sample length {y.shape[-1]} != candidate length {cands.L}")
    yr = _real(y)
    sr = _real(cands.candidates)
    y2 = np.einsum("...i,...i->...", yr, yr)[..., None]
    s2 = np.einsum("ij,ij->i", sr, sr)
    d = y2 - 2.0 * (yr @ sr.T) + s2
    return np.maximum(d, 0.0)


def _argmin_lowest(d: np.ndarray, scale: np.ndarray) -> np.ndarray:
    # distances within rounding of the minimum count as ties; lowest index wins
    dmin = d.min(axis=-1, keepdims=True)
    return np.argmax(d <= dmin + TIE_RTOL * scale, axis=-1)


def _decide(y: np.ndarray, cands: CandidateSet) -> np.ndarray:
    d = distances(y, cands)
    yr = _real(np.asarray(y))
    scale = 1.0 + np.einsum("...i,...i->...", yr, yr)[..., None] + np.abs(cands.candidates).max() ** 2 * cands.L
    return _argmin_lowest(d, scale)


def classify(y: ComplexSampleVector | np.ndarray, cands: CandidateSet) -> int:
    """Least-squares symbol decision; ties go to the lowest index."""
    if cands.M == 0:
        raise ValueError("empty candidate set")
    if isinstance(y, ComplexSampleVector):
        y = y.y
    y = np.asarray(y)
    if y.ndim != 1:
        raise ValueError("classify takes a single sample vector; use classify_batch")
    return int(_decide(y, cands))


def classify_batch(y: np.ndarray, cands: CandidateSet) -> np.ndarray:
    """Vectorised ``classify`` over rows of ``y`` (n x L complex)."""
    if cands.M == 0:
        raise ValueError("empty candidate set")
    return _decide(np.atleast_2d(y), cands)


def classify_with_prn(noisy_i, noisy_q, p, theta: MeasurementMatrix, dictionary: Dictionary):
    """Classifier with a receiver-side PRN mixed in before theta.

    Received chips and dictionary columns are both multiplied entrywise by
    ``p`` prior to sampling. Accepts single vectors or batched rows.
    """
    p = np.asarray(p)
    if p.shape != (theta.C_h,) or not np.isin(p, (-1, 1)).all():
        raise ValueError(f"p must be a length-{theta.C_h} vector of +/-1")
    mixed = Dictionary(dictionary.psi_i * p[:, None], dictionary.psi_q * p[:, None])
    cands = build_candidates(mixed, theta)
    y = sample_chips(np.asarray(noisy_i) * p, np.asarray(noisy_q) * p, theta).y
    if y.ndim == 1:
        return classify(y, cands)
    return classify_batch(y, cands)


def demodulate_packet(
    bits,
    dictionary: Dictionary,
    theta: MeasurementMatrix,
    noise: ch.NoiseSpec | None = None,
    rng: np.random.Generator | None = None,
    path: str = "chip",
    oversample: int = 16,
    offset: float | None = None,
    cands: CandidateSet | None = None,
) -> np.ndarray:
    """Spread, corrupt and classify one packet; returns the decoded bits.

    ``path='waveform'`` runs half-sine shaping and the matched filter, the
    chip path uses its exact discrete equivalent. ``offset`` adds a constant
    to both channels of the transmitted signal.
    """
    N = dictionary.M.bit_length() - 1
    indices = bits_to_indices(bits, N)
    if cands is None:
        cands = build_candidates(dictionary, theta)
    chips_i, chips_q = spread_indices(indices, dictionary)
    needs_rng = noise is not None and noise.sigma_chip > 0
    if needs_rng and rng is None:
        raise ValueError("a random generator is required for a noisy channel")

    if path == "chip":
        r_i, r_q = chips_i.astype(float), chips_q.astype(float)
        if offset is not None:
            r_i, r_q = ch.add_constant(r_i, offset), ch.add_constant(r_q, offset)
        if needs_rng:
            r_i, r_q = ch.add_awgn(r_i, r_q, noise, rng)
        y = sample_chips(r_i, r_q, theta)
    elif path == "waveform":
        w_i, w_q = shape_halfsine(chips_i, oversample), shape_halfsine(chips_q, oversample)
        if offset is not None:
            w_i, w_q = ch.add_constant(w_i, offset), ch.add_constant(w_q, offset)
        if needs_rng:
            w_i = ch.add_awgn_waveform(w_i, noise, rng)
            w_q = ch.add_awgn_waveform(w_q, noise, rng)
        y = sample_waveform(w_i, w_q, theta)
    else:
        raise ValueError(f"unknown path model {path!r}")

    decisions = classify_batch(y.y, cands)
    return indices_to_bits(decisions, N)


def min_candidate_distance(cands: CandidateSet) -> float:
    d = distances(cands.candidates, cands)
    d[np.diag_indices_from(d)] = math.inf
    return float(np.sqrt(d.min()))
