import io
import math

import numpy as np
import pytest

from cspdsss import cli, harness, theory
from cspdsss.harness import ConfigError, SimConfig


def small(**kw):
    base = dict(min_errors=50, max_bits=2 * 10**6, ebn0_grid_db=(2.0, 4.0))
    base.update(kw)
    return SimConfig(**base)


def test_config_validation():
    with pytest.raises(ConfigError):
        SimConfig(method="fancy")
    with pytest.raises(ConfigError):
        SimConfig(method="cs", kappa=1 / 3)
    with pytest.raises(ConfigError):
        SimConfig(packet_bits=1015)
    with pytest.raises(ConfigError):
        SimConfig(min_errors=0)
    assert SimConfig(method="classic", kappa=0.25).kappa == 1.0


def test_grid_parsing():
    assert harness.parse_grid("0:12:2") == (0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0)
    assert harness.parse_grid("1,2.5") == (1.0, 2.5)
    assert harness.parse_grid([3, 4]) == (3.0, 4.0)
    assert len(harness.parse_grid("-2:12:1")) == 15
    with pytest.raises(ConfigError):
        harness.parse_grid("a,b")


def test_noise_free_point_is_capped_after_one_packet():
    rec = harness.run_point(SimConfig(method="cs"), math.inf)
    assert (rec.bit_errors, rec.packets, rec.bits_sent, rec.capped) == (0, 1, 1016, True)


def test_stopping_rule_whole_packets():
    cfg = SimConfig(min_errors=1000)
    rec = harness.run_point(cfg, 4.0)
    assert rec.bit_errors >= 1000 and not rec.capped
    assert rec.bits_sent == rec.packets * 1016
    # stops on the first packet that reaches the target
    per_packet = harness._packet_errors(cfg, 4.0, 0, rec.packets)
    assert sum(per_packet) == rec.bit_errors
    assert sum(per_packet[:-1]) < 1000


def test_max_bits_cap():
    rec = harness.run_point(SimConfig(min_errors=10**6, max_bits=5000), 3.0)
    assert rec.capped and rec.packets == 5 and rec.bits_sent == 5080


def test_identical_seed_identical_records():
    a = harness.run_point(small(), 3.0)
    b = harness.run_point(small(), 3.0)
    assert a == b


def test_worker_count_does_not_change_records():
    cfg = small(method="cs", ebn0_grid_db=(5.0,))
    one, _ = harness.run_sweep(cfg)
    many, _ = harness.run_sweep(small(method="cs", ebn0_grid_db=(5.0,), workers=3))
    assert one == many


def test_substreams_distinct():
    draws = {
        harness.packet_rng(1, m, db, i).integers(0, 2**63)
        for m in ("classic", "cs") for db in (0.0, 0.5, -0.5, math.inf) for i in range(3)
    }
    assert len(draws) == 24


def test_sweep_counts_both_methods():
    cfg = SimConfig(method="cs", ebn0_grid_db=harness.parse_grid("0:12:2"), min_errors=5, max_bits=20000)
    records, curves = harness.run_sweep(cfg, ("classic", "cs"), theory_columns=True)
    assert len(records) == 14
    assert [r.method for r in records] == ["classic"] * 7 + ["cs"] * 7
    assert set(curves) == {"coherent", "noncoherent"}
    assert len(curves["coherent"].points) == 7


def test_ber_monotone_within_noise():
    records, _ = harness.run_sweep(SimConfig(method="cs", ebn0_grid_db=(2.0, 4.0, 6.0, 8.0), min_errors=100))
    for a, b in zip(records, records[1:]):
        assert b.ber <= a.ber + 3 * math.hypot(a.std_error, b.std_error)


def test_csv_round_trip_and_schema():
    records, _ = harness.run_sweep(small())
    text = harness.emit_csv(records)
    assert text.splitlines()[0] == ",".join(harness.CSV_COLUMNS)
    parsed = harness.parse_csv(text)
    assert parsed == records
    assert [r.elapsed for r in parsed] == [r.elapsed for r in records]
    one = harness.emit_csv(records[:1], theory_columns=True).splitlines()
    assert len(one) == 2
    assert one[0].endswith("pb_coherent,pb_noncoherent")
    assert float(one[1].split(",")[-2]) == theory.ber_coherent_mfsk(records[0].ebn0_db)


def test_emit_requires_records():
    with pytest.raises(ValueError):
        harness.emit_csv([])


def test_streamed_csv_matches_emit():
    buf = io.StringIO()
    records, _ = harness.run_sweep(small(), out=buf, timing=False)
    assert buf.getvalue() == harness.emit_csv(records, timing=False)


def test_config_file(tmp_path):
    path = tmp_path / "sim.yaml"
    path.write_text("method: cs\nkappa: 0.25\nebn0_grid_db: '1:3:1'\nseed: 99\n")
    cfg = harness.load_config(path, seed=5)
    assert (cfg.method, cfg.kappa, cfg.ebn0_grid_db, cfg.seed) == ("cs", 0.25, (1.0, 2.0, 3.0), 5)
    path.write_text("methd: cs\n")
    with pytest.raises(ConfigError):
        harness.load_config(path)


def test_cli_run(tmp_path):
    out = tmp_path / "ber.csv"
    code = cli.main(["run", "--method", "both", "--ebn0", "3,5", "--min-errors", "20",
                     "--seed", "4", "--out", str(out), "--theory", "--no-timing"])
    assert code == cli.EXIT_OK
    lines = out.read_text().splitlines()
    assert len(lines) == 5
    assert lines[0] == ",".join(harness.CSV_COLUMNS + harness.THEORY_COLUMNS)


def test_cli_exit_codes(tmp_path, capsys):
    assert cli.main(["run", "--method", "cs", "--kappa", "0.3"]) == cli.EXIT_CONFIG
    out = tmp_path / "x.csv"
    assert cli.main(["run", "--ebn0", "10", "--max-bits", "3000", "--out", str(out)]) == cli.EXIT_CAPPED
    bad = tmp_path / "bad.txt"
    bad.write_text("0101\n")
    assert cli.main(["run", "--chipmap", str(bad), "--ebn0", "1", "--out", str(out)]) == cli.EXIT_CONFIG
    cfg = tmp_path / "c.yaml"
    cfg.write_text("- not a mapping\n")
    assert cli.main(["run", "--config", str(cfg)]) == cli.EXIT_CONFIG


def test_cli_waveform_path(tmp_path):
    out = tmp_path / "w.csv"
    code = cli.main(["run", "--method", "cs", "--path", "waveform", "--oversample", "4",
                     "--ebn0", "6", "--min-errors", "20", "--out", str(out)])
    assert code == cli.EXIT_OK
    rec = harness.parse_csv(out.read_text())[0]
    assert rec.method == "cs" and rec.kappa == 0.5 and rec.bit_errors >= 20


def test_shipped_config_loads():
    from pathlib import Path

    cfg = harness.load_config(Path(__file__).parents[1] / "configs" / "fig2.yaml")
    assert cfg.min_errors == 1000 and cfg.packet_bits == 1016 and cfg.kappa == 0.5
    assert cfg.ebn0_grid_db[0] == 0.0 and cfg.ebn0_grid_db[-1] == 11.0
