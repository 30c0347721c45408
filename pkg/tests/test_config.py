import math
from pathlib import Path

import pytest

from iqiperf.config import (
    SideSpec,
    fixture_path,
    load_config,
    parse_config,
    parse_modulation,
    parse_range,
    parse_scenario,
)
from iqiperf.errors import ConfigError
from iqiperf.iqi import CarrierMode, Impairment, Side, irr_db
from iqiperf.ser import ModulationSpec, Scheme

BASE = """
[sweep]
scenarios = ideal, single-tx, multi-joint
modulations = psk-2, dpsk-4
snr_db = 0:10:5

[iqi]
tx_irr_db = 20
tx_phi_deg = 3
rx_irr_db = 25
rx_phi_deg = 1

[simulation]
n_symbols = 2000
seed = 99
"""

SHIPPED = sorted(p.name for p in fixture_path("acceptance.cfg").parent.glob("*.cfg"))


class TestParsers:
    @pytest.mark.parametrize("text, expected", [
        ("0:40:5", (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0)),
        ("0:1:0.25", (0.0, 0.25, 0.5, 0.75, 1.0)),
        ("0:50:2.5", tuple(2.5 * i for i in range(21))),
        ("0:9:4", (0.0, 4.0, 8.0)),
        ("25", (25.0,)),
        ("10, 20,40", (10.0, 20.0, 40.0)),
    ])
    def test_range(self, text, expected):
        assert parse_range(text) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("text", ["0:10:0", "10:0:1", "a:b:c", "1:2", ""])
    def test_bad_range(self, text):
        with pytest.raises(ConfigError):
            parse_range(text)

    @pytest.mark.parametrize("text, expected", [
        ("ideal", (CarrierMode.SINGLE, Impairment.IDEAL)),
        ("Single-TX", (CarrierMode.SINGLE, Impairment.TX)),
        (" multi-joint ", (CarrierMode.MULTI, Impairment.JOINT)),
    ])
    def test_scenario(self, text, expected):
        assert parse_scenario(text) == expected

    @pytest.mark.parametrize("text", ["multi", "double-tx", "single-both", "multi-tx-rx"])
    def test_bad_scenario(self, text):
        with pytest.raises(ConfigError):
            parse_scenario(text)

    def test_modulation(self):
        assert parse_modulation("DPSK-16") == ModulationSpec(Scheme.DPSK, 16)

    @pytest.mark.parametrize("text", ["qam-16", "psk", "psk-1", "fsk-64", "psk-x"])
    def test_bad_modulation(self, text):
        with pytest.raises(ConfigError):
            parse_modulation(text)


class TestParseConfig:
    def test_base(self):
        spec = parse_config(BASE)
        assert len(spec.scenarios) == 3
        assert spec.snr_db == (0.0, 5.0, 10.0)
        assert spec.sim.n_symbols == 2000 and spec.sim.seed == 99
        assert spec.sim.model == "baseband"
        assert spec.normalize and not spec.simulate and not spec.bound
        assert irr_db(spec.tx.coefficients()) == pytest.approx(20.0, rel=1e-10)
        assert irr_db(spec.rx.coefficients()) == pytest.approx(25.0, rel=1e-10)

    def test_eps_instead_of_irr(self):
        text = BASE.replace("tx_irr_db = 20", "tx_eps = 1.1")
        spec = parse_config(text)
        assert spec.tx.eps == 1.1
        assert spec.tx.irr_value() == pytest.approx(irr_db(spec.tx.coefficients()))

    def test_duplicates_removed(self):
        spec = parse_config(BASE.replace("psk-2, dpsk-4", "psk-2, dpsk-4, psk-2"))
        assert len(spec.modulations) == 2

    def test_random_seed_recorded(self):
        a = parse_config(BASE.replace("seed = 99", ""))
        b = parse_config(BASE.replace("seed = 99", ""))
        assert a.sim.seed != b.sim.seed

    @pytest.mark.parametrize("mutation, message", [
        (lambda t: t.replace("[iqi]", "[imbalance]"), "unknown section"),
        (lambda t: t.replace("tx_phi_deg", "tx_phase"), "unknown key"),
        (lambda t: t.replace("modulations = psk-2, dpsk-4\n", ""), "modulations"),
        (lambda t: t.replace("tx_irr_db = 20\n", ""), "tx_irr_db"),
        (lambda t: t.replace("tx_irr_db = 20", "tx_irr_db = 20\ntx_eps = 1.1"), "not both"),
        (lambda t: t.replace("tx_irr_db = 20", "tx_irr_db = 45"), "tx"),
        (lambda t: t + "model = magic\n", "invalid setting"),
        (lambda t: t.replace("n_symbols = 2000", "n_symbols = 10"), "invalid setting"),
        (lambda t: t.replace("snr_db = 0:10:5", "snr_db = 0:10:5\nsimulate = maybe"), "yes/no"),
        (lambda t: t.replace("snr_db = 0:10:5", "snr_db = 0:10:5\nirr_db = 10:20:5"), "single snr_db"),
        (lambda t: "[sweep\n", "malformed"),
        (lambda t: "[iqi]\ntx_irr_db = 3\n", "missing [sweep]"),
    ])
    def test_rejections(self, mutation, message):
        with pytest.raises(ConfigError, match=message.replace("[", r"\[")):
            parse_config(mutation(BASE))

    def test_fsk_bound_rejected(self):
        text = BASE.replace("psk-2, dpsk-4", "psk-2, fsk-4").replace("snr_db = 0:10:5", "snr_db = 0:10:5\nbound = yes")
        with pytest.raises(ConfigError, match="no upper bound exists for FSK"):
            parse_config(text)

    def test_irr_sweep(self):
        text = BASE.replace("snr_db = 0:10:5", "snr_db = 25\nirr_db = 10:35:1")
        spec = parse_config(text)
        assert spec.irr_db[0] == 10.0 and spec.irr_db[-1] == 35.0 and len(spec.irr_db) == 26

    def test_hash_tracks_content(self):
        a = parse_config(BASE)
        assert a.config_hash == parse_config(BASE).config_hash
        assert a.config_hash != parse_config(BASE.replace("seed = 99", "seed = 98")).config_hash
        assert a.config_hash != a.with_overrides(snr_db=[0.0]).config_hash
        assert a.config_hash == a.with_overrides(output="elsewhere").config_hash

    def test_overrides(self):
        spec = parse_config(BASE).with_overrides(snr_db=(30.0,), seed=5, output="x/y")
        assert spec.snr_db == (30.0,) and spec.sim.seed == 5 and spec.output == "x/y"

    def test_load_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "nope.cfg")

    def test_side_spec_needs_a_value(self):
        with pytest.raises(ConfigError):
            SideSpec(Side.TX, 3.0).coefficients()


class TestShippedConfigs:
    def test_present(self):
        assert "acceptance.cfg" in SHIPPED
        assert {f"paper_fig{i}.cfg" for i in range(1, 10)} <= set(SHIPPED)

    @pytest.mark.parametrize("name", SHIPPED)
    def test_parse(self, name):
        spec = load_config(fixture_path(name))
        assert spec.sim.seed is not None
        assert isinstance(spec.config_hash, str) and len(spec.config_hash) == 16

    def test_unknown_fixture(self):
        with pytest.raises(ConfigError):
            fixture_path("paper_fig99.cfg")

    def test_acceptance_config_uses_sinr_model(self):
        spec = load_config(fixture_path("acceptance.cfg"))
        assert spec.sim.model == "sinr"
        assert len(spec.scenarios) == 7

    @pytest.mark.parametrize("name, phi", [("paper_fig8.cfg", 2.0), ("paper_fig9.cfg", 1.0)])
    def test_irr_sweeps(self, name, phi):
        spec = load_config(fixture_path(name))
        assert spec.irr_db is not None and len(spec.snr_db) == 1
        assert spec.rx.phi_deg == phi
        # every swept IRR must be reachable with that phase mismatch
        assert max(spec.irr_db) < 20 * math.log10(1 / math.tan(math.radians(phi) / 2))
