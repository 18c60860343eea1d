"""DSSS (802.15.4 O-QPSK) link simulator with Nyquist and compressive receivers."""

from .chipmap import (
    ChipTable,
    Dictionary,
    SymbolAlpha,
    build_dictionaries,
    decode_symbol,
    encode_bits,
    load_chip_table,
    load_default_table,
)
from .channel import NoiseSpec, add_awgn, add_awgn_waveform, add_constant, sigma_from_ebn0
from .harness import BerRecord, SimConfig, emit_csv, parse_csv, run_point, run_sweep
from .rx import (
    CandidateSet,
    ComplexSampleVector,
    MeasurementMatrix,
    build_candidates,
    classify,
    classify_batch,
    classify_with_prn,
    demodulate_packet,
    make_measurement,
    sample_chips,
    sample_waveform,
)
from .theory import ber_coherent_mfsk, ber_noncoherent_mfsk
from .tx import ChipVector, Waveform, make_packet, shape_halfsine, spread

__version__ = "0.1.0"
