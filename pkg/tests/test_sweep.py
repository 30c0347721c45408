import dataclasses
import math

import pytest

from iqiperf.config import parse_config
from iqiperf.sweep import (
    MIN_CHECKED_SER,
    CurveRow,
    format_csv,
    format_report,
    read_csv,
    run_sweep,
    validate,
    write_csv,
)

SPEC = """
[sweep]
scenarios = ideal, single-joint, multi-rx, multi-joint
modulations = psk-4, dpsk-2, fsk-2
snr_db = 0, 20
simulate = yes

[iqi]
tx_irr_db = 20
tx_phi_deg = 3
rx_irr_db = 20
rx_phi_deg = 3

[simulation]
n_symbols = 20000
seed = 7
model = sinr
"""


@pytest.fixture(scope="module")
def spec():
    return parse_config(SPEC)


@pytest.fixture(scope="module")
def validated(spec):
    return validate(spec)


class TestRunSweep:
    def test_row_layout(self, spec):
        rows = run_sweep(spec, simulate=False)
        assert len(rows) == 4 * 3 * 2
        assert [r.scenario for r in rows[:6]] == ["ideal"] * 6
        assert all(r.ser_analytic is not None and r.ser_mc is None for r in rows)
        ideal = rows[0]
        assert ideal.irr_db is None and ideal.phi_deg is None
        joint = next(r for r in rows if r.scenario == "multi-joint")
        assert joint.irr_db == 20.0 and joint.phi_deg == 3.0

    def test_flags(self, spec):
        rows = run_sweep(spec, simulate=True, bound=True)
        psk = [r for r in rows if r.modulation == "4-PSK"]
        assert all(r.ser_bound is not None and r.ser_floor is not None for r in psk)
        fsk = [r for r in rows if r.modulation == "2-FSK"]
        assert all(r.ser_bound is None for r in fsk)
        assert all(r.ser_mc is not None and r.n_symbols == 20000 and r.seed == 7 for r in rows)

    def test_deterministic(self, spec):
        assert run_sweep(spec) == run_sweep(spec)

    def test_unsupported_bound_is_a_note(self):
        text = SPEC.replace("rx_irr_db = 20", "rx_irr_db = 25").replace("simulate = yes", "bound = yes") \
                   .replace("psk-4, dpsk-2, fsk-2", "psk-4")
        rows = run_sweep(parse_config(text))
        joint = [r for r in rows if r.scenario == "multi-joint"]
        assert all(r.ser_bound is None and r.note.startswith("no bound:") for r in joint)
        assert all(not r.error for r in rows)

    def test_point_errors_are_recorded(self):
        # phase 3 deg caps the IRR near 31.6 dB: the 35 dB point fails, the others run
        text = SPEC.replace("snr_db = 0, 20", "snr_db = 20\nirr_db = 25, 35").replace("simulate = yes", "")
        rows = run_sweep(parse_config(text))
        bad = [r for r in rows if r.irr_db == 35.0]
        good = [r for r in rows if r.irr_db == 25.0 or r.scenario == "ideal"]
        assert bad and all("InfeasibleParametersError" in r.error for r in bad if r.scenario != "ideal")
        assert all(not r.error and r.ser_analytic is not None for r in good)

    def test_insufficient_trials_note(self):
        text = SPEC.replace("snr_db = 0, 20", "snr_db = 40").replace("scenarios = ideal, single-joint, multi-rx, multi-joint",
                                                                      "scenarios = ideal").replace("psk-4, dpsk-2, fsk-2", "psk-2")
        (row,) = run_sweep(parse_config(text.replace("n_symbols = 20000", "n_symbols = 1000")))
        assert row.ser_analytic < MIN_CHECKED_SER
        assert row.note == "insufficient trials"


class TestCsv:
    def test_round_trip(self, spec, tmp_path):
        rows = run_sweep(spec, bound=True)
        path = write_csv(tmp_path / "out" / "curve.csv", rows, spec)
        meta, back = read_csv(path)
        assert back == rows
        assert meta["tool"] == "iqiperf"
        assert meta["seed"] == "7"
        assert meta["config_hash"] == spec.config_hash
        assert meta["sim_model"] == "sinr"

    def test_text_round_trip_preserves_floats_exactly(self):
        row = CurveRow("single-tx", "2-PSK", 2, 12.5, 20.0, 3.0, ser_analytic=math.pi / 10 ** 7,
                       note='has "quotes", commas')
        _, (back,) = read_csv(format_csv([row]))
        assert back == row

    def test_header(self, spec):
        text = format_csv(run_sweep(spec, simulate=False), spec)
        header = next(line for line in text.splitlines() if not line.startswith("#"))
        assert header.split(",")[:6] == ["scenario", "modulation", "M", "snr_db", "irr_db", "phi_deg"]

    def test_byte_identical_reruns(self, spec):
        assert format_csv(run_sweep(spec), spec) == format_csv(run_sweep(spec), spec)


class TestValidate:
    def test_passes(self, validated):
        rows, lines = validated
        assert len(lines) == len(rows) == 24
        assert all(line.ok for line in lines), format_report(lines)
        assert any(line.coverage == "pass" for line in lines)
        assert all(line.mgf_max_rel_err <= 1e-8 for line in lines)

    def test_report_format(self, validated):
        report = format_report(validated[1])
        assert report.endswith("# points=24 failures=0\n")
        assert report.splitlines()[0].startswith("PASS scenario=ideal modulation=4-PSK")

    def test_dominance_negative_control(self, spec, validated):
        rows = [dataclasses.replace(r) for r in validated[0]]
        target = next(r for r in rows if r.ser_bound is not None and r.scenario == "single-joint")
        target.ser_bound = 0.5 * target.ser_analytic
        _, lines = validate(spec, rows)
        bad = [line for line in lines if not line.ok]
        assert len(bad) == 1 and bad[0].dominance == "fail"
        assert format_report(lines).endswith("failures=1\n")

    def test_coverage_negative_control(self, spec, validated):
        rows = [dataclasses.replace(r) for r in validated[0]]
        target = next(r for r in rows if r.ser_analytic > 0.01 and r.ser_mc is not None)
        target.ser_analytic = 2.0 * target.mc_ci_hi
        target.ser_bound = None  # leave dominance out of it
        _, lines = validate(spec, rows)
        bad = [line for line in lines if not line.ok]
        assert len(bad) == 1 and bad[0].coverage == "fail"

    def test_error_rows_fail(self, spec, validated):
        rows = [dataclasses.replace(r) for r in validated[0]]
        rows[3].error = "AccuracyError: synthetic"
        _, lines = validate(spec, rows)
        assert not lines[3].ok and "synthetic" in lines[3].format()
