"""Seeded Monte Carlo BER sweeps with a minimum-error stopping rule."""

from __future__ import annotations

import csv
import dataclasses
import io
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np
import yaml

from . import channel, rx, theory
from .chipmap import ChipTable, build_dictionaries, load_chip_table, load_default_table

log = logging.getLogger(__name__)

METHODS = ("classic", "cs")
METHOD_IDS = {"classic": 0, "cs": 1}
PATH_MODELS = ("chip", "waveform")

CSV_COLUMNS = (
    "method", "kappa", "ebn0_db", "bits_sent", "bit_errors", "ber",
    "packets", "capped", "seed", "elapsed_s",
)
THEORY_COLUMNS = ("pb_coherent", "pb_noncoherent")

# grid key reserved for the noise-free (+inf dB) sentinel
_INF_KEY = 2**63


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    method: str = "classic"
    kappa: float = 0.5
    ebn0_grid_db: tuple[float, ...] = tuple(float(x) for x in range(-2, 13))
    min_errors: int = 200
    max_bits: int = 10**8
    packet_bits: int = 1016
    seed: int = 0
    oversample: int = 16
    path_model: str = "chip"
    chipmap: str | None = None
    workers: int = 1

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.path_model not in PATH_MODELS:
            raise ConfigError(f"path_model must be one of {PATH_MODELS}, got {self.path_model!r}")
        if self.min_errors < 1:
            raise ConfigError("min_errors must be >= 1")
        if self.max_bits < 1:
            raise ConfigError("max_bits must be >= 1")
        if self.packet_bits < 1 or self.packet_bits % 4:
            raise ConfigError(f"packet_bits must be a positive multiple of 4, got {self.packet_bits}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.oversample < 2:
            raise ConfigError("oversample must be >= 2")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.method == "classic":
            object.__setattr__(self, "kappa", 1.0)
        try:
            rx.measurement_for(self.kappa)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        object.__setattr__(self, "ebn0_grid_db", tuple(float(x) for x in self.ebn0_grid_db))

    def with_method(self, method: str) -> "SimConfig":
        kappa = self.kappa
        if method == "cs" and self.method == "classic":
            kappa = 0.5
        return dataclasses.replace(self, method=method, kappa=kappa)


@dataclass
class BerRecord:
    method: str
    kappa: float
    ebn0_db: float
    bits_sent: int
    bit_errors: int
    ber: float
    packets: int
    capped: bool
    seed: int
    elapsed: float = field(default=0.0, compare=False)

    @property
    def std_error(self) -> float:
        p = self.ber
        return math.sqrt(max(p * (1 - p), 0.0) / self.bits_sent) if self.bits_sent else math.inf


def load_config(path: str | Path, **overrides) -> SimConfig:
    """Read a flat YAML (or JSON) mapping of SimConfig fields; ``None`` overrides are ignored."""
    try:
        data = yaml.safe_load(Path(path).read_text()) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config file must be a flat key/value mapping")
    return make_config(data, **overrides)


def make_config(data: dict | None = None, **overrides) -> SimConfig:
    merged = dict(data or {})
    merged.update({k: v for k, v in overrides.items() if v is not None})
    names = {f.name for f in dataclasses.fields(SimConfig)}
    unknown = set(merged) - names
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if "ebn0_grid_db" in merged:
        merged["ebn0_grid_db"] = parse_grid(merged["ebn0_grid_db"])
    try:
        return SimConfig(**merged)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def parse_grid(spec) -> tuple[float, ...]:
    """Accept a list, ``"a,b,c"`` or an inclusive range ``"start:stop:step"``."""
    if isinstance(spec, (int, float)):
        return (float(spec),)
    if not isinstance(spec, str):
        return tuple(float(x) for x in spec)
    spec = spec.strip()
    try:
        if ":" in spec:
            parts = [float(x) for x in spec.split(":")]
            start, stop = parts[0], parts[1]
            step = parts[2] if len(parts) > 2 else 1.0
            if step <= 0:
                raise ConfigError("grid step must be positive")
            n = int(math.floor((stop - start) / step + 1e-9)) + 1
            return tuple(round(start + k * step, 10) for k in range(n))
        return tuple(float(x) for x in spec.split(",") if x.strip())
    except ValueError as exc:
        raise ConfigError(f"bad Eb/N0 grid {spec!r}: {exc}") from None


def _point_key(ebn0_db: float) -> int:
    if ebn0_db == math.inf:
        return _INF_KEY
    k = round(ebn0_db * 1000)
    return 2 * k if k >= 0 else -2 * k - 1


def packet_rng(seed: int, method: str, ebn0_db: float, packet: int) -> np.random.Generator:
    """Private substream for one packet of one sweep point."""
    ss = np.random.SeedSequence([seed, METHOD_IDS[method], _point_key(ebn0_db), packet])
    return np.random.Generator(np.random.PCG64(ss))


def _table(cfg: SimConfig) -> ChipTable:
    if cfg.chipmap is None:
        return load_default_table()
    with open(cfg.chipmap, "rb") as fh:
        return load_chip_table(fh)


def _packet_errors(cfg: SimConfig, ebn0_db: float, first: int, count: int) -> list[int]:
    table = _table(cfg)
    dictionary = build_dictionaries(table)
    theta = rx.measurement_for(cfg.kappa, dictionary.C_h)
    cands = rx.build_candidates(dictionary, theta)
    noise = channel.sigma_from_ebn0(ebn0_db, table)
    errors = []
    for i in range(first, first + count):
        rng = packet_rng(cfg.seed, cfg.method, ebn0_db, i)
        bits = rng.integers(0, 2, size=cfg.packet_bits, dtype=np.uint8)
        decoded = rx.demodulate_packet(
            bits, dictionary, theta, noise, rng,
            path=cfg.path_model, oversample=cfg.oversample, cands=cands,
        )
        errors.append(int(np.count_nonzero(decoded != bits)))
    return errors


def run_point(cfg: SimConfig, ebn0_db: float, executor: ProcessPoolExecutor | None = None) -> BerRecord:
    """Send whole packets until ``min_errors`` bit errors or ``max_bits`` bits.

    Packets are simulated in chunks (in parallel when an executor is given)
    and then scanned in packet order, so the record does not depend on the
    worker count.
    """
    t0 = time.perf_counter()
    max_packets = -(-cfg.max_bits // cfg.packet_bits)
    if channel.sigma_from_ebn0(ebn0_db).sigma_chip == 0.0:
        # noise-free decoding is exact; further packets cannot add errors
        max_packets = 1
    workers = cfg.workers if executor is not None else 1
    chunk = 8
    next_packet = 0
    bits = errs = packets = 0
    done = False
    while not done:
        starts = []
        for _ in range(workers):
            if next_packet >= max_packets:
                break
            n = min(chunk, max_packets - next_packet)
            starts.append((next_packet, n))
            next_packet += n
        if executor is None:
            results = [_packet_errors(cfg, ebn0_db, s, n) for s, n in starts]
        else:
            futures = [executor.submit(_packet_errors, cfg, ebn0_db, s, n) for s, n in starts]
            results = [f.result() for f in futures]
        for per_packet in results:
            for e in per_packet:
                errs += e
                bits += cfg.packet_bits
                packets += 1
                if errs >= cfg.min_errors or packets >= max_packets:
                    done = True
                    break
            if done:
                break
        chunk = min(chunk * 2, 512)

    capped = errs < cfg.min_errors
    rec = BerRecord(
        method=cfg.method, kappa=float(cfg.kappa), ebn0_db=float(ebn0_db),
        bits_sent=bits, bit_errors=errs, ber=errs / bits, packets=packets,
        capped=capped, seed=cfg.seed, elapsed=time.perf_counter() - t0,
    )
    log.info("%s kappa=%g %.2f dB: %d/%d errors ber=%.3e%s", rec.method, rec.kappa,
             rec.ebn0_db, errs, bits, rec.ber, " (capped)" if capped else "")
    return rec


def run_sweep(
    cfg: SimConfig,
    methods: Sequence[str] | None = None,
    out: io.TextIOBase | None = None,
    theory_columns: bool = False,
    timing: bool = True,
    on_record: Callable[[BerRecord], None] | None = None,
) -> tuple[list[BerRecord], dict[str, theory.TheoryCurve]]:
    """Run every grid point for each method; rows are streamed to ``out`` as they finish."""
    methods = tuple(methods or (cfg.method,))
    cfgs = [cfg if m == cfg.method else cfg.with_method(m) for m in methods]
    records: list[BerRecord] = []
    writer = None
    if out is not None:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(CSV_COLUMNS + (THEORY_COLUMNS if theory_columns else ()))

    executor = ProcessPoolExecutor(cfg.workers) if cfg.workers > 1 else None
    try:
        for c in cfgs:
            for db in c.ebn0_grid_db:
                rec = run_point(c, db, executor)
                records.append(rec)
                if writer is not None:
                    writer.writerow(_row(rec, theory_columns, timing))
                    out.flush()
                if on_record is not None:
                    on_record(rec)
    finally:
        if executor is not None:
            executor.shutdown(cancel_futures=True)

    curves = {}
    if theory_columns:
        curves = {n: theory.theory_curve(n, cfg.ebn0_grid_db) for n in ("coherent", "noncoherent")}
    return records, curves


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    return repr(float(x)) if isinstance(x, float) else str(x)


def _row(rec: BerRecord, theory_columns: bool, timing: bool) -> list[str]:
    row = [rec.method, rec.kappa, rec.ebn0_db, rec.bits_sent, rec.bit_errors, rec.ber,
           rec.packets, rec.capped, rec.seed, rec.elapsed if timing else 0.0]
    if theory_columns:
        if rec.ebn0_db == math.inf:
            row += [0.0, 0.0]
        else:
            row += [theory.ber_coherent_mfsk(rec.ebn0_db), theory.ber_noncoherent_mfsk(rec.ebn0_db)]
    return [_fmt(x) for x in row]


def emit_csv(records: Iterable[BerRecord], theory_columns: bool = False, timing: bool = True) -> str:
    """CSV text with a fixed column order and round-trip exact floats.

    ``timing=False`` writes ``elapsed_s`` as 0.0 so output is reproducible byte for byte.
    """
    records = list(records)
    if not records:
        raise ValueError("no records to emit")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS + (THEORY_COLUMNS if theory_columns else ()))
    for rec in records:
        writer.writerow(_row(rec, theory_columns, timing))
    return buf.getvalue()


def parse_csv(text: str) -> list[BerRecord]:
    rows = list(csv.DictReader(io.StringIO(text)))
    return [
        BerRecord(
            method=r["method"], kappa=float(r["kappa"]), ebn0_db=float(r["ebn0_db"]),
            bits_sent=int(r["bits_sent"]), bit_errors=int(r["bit_errors"]), ber=float(r["ber"]),
            packets=int(r["packets"]), capped=r["capped"] == "1", seed=int(r["seed"]),
            elapsed=float(r["elapsed_s"]),
        )
        for r in rows
    ]
