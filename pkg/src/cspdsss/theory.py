"""Reference BER curves for 16-ary orthogonal signalling (coherent and non-coherent)."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

M_ARY = 16
BITS_PER_SYMBOL = 4
# bit-error fraction of a symbol error for orthogonal signalling: (M/2)/(M-1)
BIT_FACTOR = (M_ARY / 2) / (M_ARY - 1)

QUAD_HALF_WIDTH = 12.0
QUAD_EPSABS = 1e-12
QUAD_EPSREL = 1e-10


class QuadratureError(ArithmeticError):
    """Adaptive quadrature failed to reach the requested accuracy."""


def _linear(ebn0_db: float) -> float:
    if math.isnan(ebn0_db) or ebn0_db == math.inf:
        raise ValueError(f"Eb/N0 must be finite (or -inf for zero SNR), got {ebn0_db}")
    return 0.0 if ebn0_db == -math.inf else 10.0 ** (ebn0_db / 10.0)


def symbol_error_given(x):
    """1 - (1 - Q(x))^15, evaluated through log Phi(x) to keep precision."""
    return -np.expm1((M_ARY - 1) * special.log_ndtr(x))


def ber_coherent_mfsk(ebn0_db: float) -> float:
    """Coherent 16-FSK bit error probability by adaptive quadrature.

    ``ebn0_db = -inf`` evaluates the zero-SNR limit.
    """
    mu = math.sqrt(2 * BITS_PER_SYMBOL * _linear(ebn0_db))

    def integrand(x):
        return symbol_error_given(x) * math.exp(-0.5 * (x - mu) ** 2)

    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            value, abserr = integrate.quad(
                integrand,
                mu - QUAD_HALF_WIDTH,
                mu + QUAD_HALF_WIDTH,
                points=[mu],
                epsabs=QUAD_EPSABS,
                epsrel=QUAD_EPSREL,
                limit=200,
            )
        except integrate.IntegrationWarning as exc:
            raise QuadratureError(f"quadrature failed at Eb/N0={ebn0_db} dB: {exc}") from None
    value /= math.sqrt(2 * math.pi)
    abserr /= math.sqrt(2 * math.pi)
    if abserr > max(QUAD_EPSABS, QUAD_EPSREL * abs(value)):
        raise QuadratureError(
            f"quadrature error estimate {abserr:.3g} too large at Eb/N0={ebn0_db} dB (value {value:.6g})"
        )
    return BIT_FACTOR * value


def ber_noncoherent_mfsk(ebn0_db: float) -> float:
    """Non-coherent 16-FSK bit error probability (closed-form alternating sum)."""
    e = _linear(ebn0_db)
    total = sum(
        (-1) ** m * math.comb(M_ARY, m) * math.exp(BITS_PER_SYMBOL * e * (1.0 / m - 1.0))
        for m in range(2, M_ARY + 1)
    )
    return BIT_FACTOR * total / M_ARY


@dataclass
class TheoryCurve:
    name: str
    points: list[tuple[float, float]] = field(default_factory=list)


def theory_curve(name: str, grid_db) -> TheoryCurve:
    fn = {"coherent": ber_coherent_mfsk, "noncoherent": ber_noncoherent_mfsk}[name]
    return TheoryCurve(name, [(float(db), fn(float(db))) for db in grid_db])


def crossing_db(grid_db, ber, target: float) -> float:
    """First dB value where a BER curve falls to ``target`` (linear in log-BER).

    Returns nan when the curve never brackets the target.
    """
    grid_db = np.asarray(grid_db, dtype=float)
    ber = np.asarray(ber, dtype=float)
    logt = math.log10(target)
    for k in range(len(grid_db) - 1):
        b0, b1 = ber[k], ber[k + 1]
        if b0 >= target > b1 or (b0 >= target and b1 == target):
            if b1 <= 0:
                return float(grid_db[k + 1])
            l0, l1 = math.log10(b0), math.log10(b1)
            return float(grid_db[k] + (logt - l0) * (grid_db[k + 1] - grid_db[k]) / (l1 - l0))
    return math.nan
