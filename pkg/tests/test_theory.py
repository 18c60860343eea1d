import math

import numpy as np
import pytest
from scipy import stats

from cspdsss import theory

GRID = np.arange(-10.0, 12.0 + 1e-9, 0.5)


def test_coherent_zero_snr_is_half():
    # Q(X) is uniform for standard normal X, so E[(1-Q)^15] = 1/16
    assert abs(theory.ber_coherent_mfsk(-math.inf) - 0.5) < 1e-9


def test_noncoherent_zero_snr_is_half():
    assert abs(theory.ber_noncoherent_mfsk(-math.inf) - 0.5) < 1e-12


def test_noncoherent_strictly_decreasing():
    pb = [theory.ber_noncoherent_mfsk(db) for db in GRID]
    assert all(a > b for a, b in zip(pb, pb[1:]))


def test_coherent_monotone_and_bounded():
    pb = [theory.ber_coherent_mfsk(db) for db in GRID]
    assert all(a >= b for a, b in zip(pb, pb[1:]))
    assert all(0 < p <= 0.5 for p in pb)


def test_high_snr_limits():
    assert theory.ber_coherent_mfsk(20.0) < 1e-30
    assert theory.ber_noncoherent_mfsk(20.0) < 1e-30


def test_coherent_below_noncoherent():
    for db in GRID[GRID > 0]:
        assert theory.ber_coherent_mfsk(db) <= theory.ber_noncoherent_mfsk(db)


@pytest.mark.parametrize("db", [0.0, 3.0, 6.0])
def test_coherent_against_monte_carlo(db):
    rng = np.random.default_rng(int(db * 10) + 1)
    mu = math.sqrt(8 * 10 ** (db / 10))
    n, chunk = 10**7, 10**6
    total = total_sq = 0.0
    for _ in range(n // chunk):
        x = mu + rng.standard_normal(chunk)
        v = 1.0 - (1.0 - stats.norm.sf(x)) ** 15
        total += v.sum()
        total_sq += (v * v).sum()
    mean = total / n
    se = math.sqrt((total_sq / n - mean**2) / n)
    assert abs(theory.ber_coherent_mfsk(db) - 8 / 15 * mean) < 3 * 8 / 15 * se


def test_infinite_snr_rejected():
    with pytest.raises(ValueError):
        theory.ber_coherent_mfsk(math.inf)


def test_crossing_interpolates_in_log_ber():
    grid = [0.0, 1.0, 2.0]
    ber = [1e-1, 1e-2, 1e-4]
    assert theory.crossing_db(grid, ber, 1e-2) == pytest.approx(1.0)
    assert theory.crossing_db(grid, ber, 1e-3) == pytest.approx(1.5)
    assert math.isnan(theory.crossing_db(grid, ber, 1e-6))


def test_theory_curve():
    c = theory.theory_curve("noncoherent", [0.0, 1.0])
    assert c.points[0] == (0.0, theory.ber_noncoherent_mfsk(0.0))
